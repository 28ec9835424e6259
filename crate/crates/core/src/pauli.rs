//! Dense-matrix ground truth for small systems: generalized Pauli operators,
//! stabilizer projectors and an explicit syndrome-recovery channel.
//!
//! `X|j> = |j-1 mod d>`, `Z|j> = w^j |j>` with `w = exp(2 pi i / d)`, and
//! `N_(i,j) = X^i Z^j`. Multi-site operators are Kronecker products in site
//! order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::codes::{failure_probability, CorrectableSet};
use crate::error::{Error, Result};
use crate::symplectic::{pairing_unchecked, Field, SymplecticSubspace, SymplecticVector};
use crate::types::NoiseDistribution;

/// Largest Hilbert-space dimension `d^n` handled with dense matrices.
pub const MAX_HILBERT_DIM: usize = 32;

/// `N_x N_y = w^{s <x,y>} N_y N_x` with this `s`. Found by brute force over
/// all pairs at `d = 3, n = 1`; see the `commutation_sign_by_brute_force` test.
pub const COMMUTATION_SIGN: u32 = 1;

const MATRIX_TOLERANCE: f64 = 1e-10;

/// A dense unitary on `(C^d)^{⊗n}`.
#[derive(Clone, Debug)]
pub struct UnitaryMatrix {
    matrix: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let product = &self.matrix * self.matrix.adjoint();
        max_abs_diff(&product, &DMatrix::identity(self.dim(), self.dim())) < tol
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `w^t` for `w = exp(2 pi i / d)`, exact at the real points.
pub fn root_of_unity(d: u32, t: u32) -> Complex64 {
    let t = t % d;
    if t == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * t == d {
        return Complex64::new(-1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / d as f64)
}

fn hilbert_dim(n: usize, d: u32) -> Result<usize> {
    let dim = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > MAX_HILBERT_DIM as u128 {
        return Err(Error::InstanceTooLarge {
            what: "Hilbert space d^n",
            predicted: dim,
            cap: MAX_HILBERT_DIM as u128,
        });
    }
    Ok(dim as usize)
}

fn single_site(d: u32, i: u32, j: u32) -> DMatrix<Complex64> {
    let du = d as usize;
    let mut m = DMatrix::zeros(du, du);
    // X^i Z^j |m> = w^{j m} |m - i>
    for col in 0..d {
        let row = ((col + d - i % d) % d) as usize;
        m[(row, col as usize)] = root_of_unity(d, (j % d) * col % d);
    }
    m
}

/// `N_(i,j) = X^i Z^j` on a single `d`-level system.
pub fn pauli_matrix(d: u32, symbol: (u32, u32)) -> Result<UnitaryMatrix> {
    let field = Field::new(d)?;
    let (i, j) = symbol;
    if i >= field.order() || j >= field.order() {
        return Err(Error::InvalidArgument(format!(
            "symbol ({}, {}) outside F_{} x F_{}",
            i, j, d, d
        )));
    }
    Ok(UnitaryMatrix {
        matrix: single_site(d, i, j),
    })
}

/// `N_x = N_{x_1} ⊗ ... ⊗ N_{x_n}`.
pub fn pauli_tensor(x: &SymplecticVector) -> Result<UnitaryMatrix> {
    hilbert_dim(x.n(), x.d())?;
    Ok(UnitaryMatrix {
        matrix: tensor_unchecked(x),
    })
}

fn tensor_unchecked(x: &SymplecticVector) -> DMatrix<Complex64> {
    let d = x.d();
    let c = x.coords();
    let mut m = single_site(d, c[0], c[1]);
    for site in 1..x.n() {
        m = m.kronecker(&single_site(d, c[2 * site], c[2 * site + 1]));
    }
    m
}

/// The `c` with `N_x N_y = w^c N_y N_x`, found by comparing matrices.
pub fn commutation_exponent(x: &SymplecticVector, y: &SymplecticVector) -> Result<u32> {
    let nx = pauli_tensor(x)?;
    let ny = pauli_tensor(y)?;
    if nx.dim() != ny.dim() || x.d() != y.d() {
        return Err(Error::DimensionMismatch(
            "operators on different spaces".into(),
        ));
    }
    let xy = nx.matrix() * ny.matrix();
    let yx = ny.matrix() * nx.matrix();
    (0..x.d())
        .find(|&c| max_abs_diff(&xy, &(&yx * root_of_unity(x.d(), c))) < 1e-9)
        .ok_or_else(|| {
            Error::InvariantViolation(format!(
                "N_{} and N_{} do not commute up to a root of unity",
                x, y
            ))
        })
}

fn matrix_power(m: &DMatrix<Complex64>, e: u32) -> DMatrix<Complex64> {
    let mut out = DMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..e {
        out = &out * m;
    }
    out
}

/// The code `{psi : M psi = psi for every phased M in N_L}` of an isotropic `L`.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    l: SymplecticSubspace,
    generators: Vec<SymplecticVector>,
    phased: Vec<DMatrix<Complex64>>,
    projector: DMatrix<Complex64>,
}

/// Builds the code of `l`. Each generator `N_g` is rescaled by a phase so its
/// `d`-th power is the identity; the projector averages the ordered products
/// of phased-generator powers over all of `L`.
pub fn stabilizer_code(l: &SymplecticSubspace) -> Result<StabilizerCode> {
    if !l.is_isotropic() {
        return Err(Error::NotIsotropic);
    }
    let d = l.field().order();
    let dim = hilbert_dim(l.n(), d)?;
    let identity = DMatrix::<Complex64>::identity(dim, dim);
    let generators = l.basis().to_vec();

    let mut phased = Vec::with_capacity(generators.len());
    for g in &generators {
        let m = tensor_unchecked(g);
        let power = matrix_power(&m, d);
        let lambda = power[(0, 0)];
        if max_abs_diff(&power, &(&identity * lambda)) > MATRIX_TOLERANCE {
            return Err(Error::InvariantViolation(format!(
                "N_{}^{} is not a scalar",
                g, d
            )));
        }
        let theta = Complex64::from_polar(1.0, -lambda.arg() / d as f64);
        let p = m * theta;
        if max_abs_diff(&matrix_power(&p, d), &identity) > MATRIX_TOLERANCE {
            return Err(Error::InvariantViolation(format!(
                "phased N_{} does not have order {}",
                g, d
            )));
        }
        phased.push(p);
    }
    for (i, a) in phased.iter().enumerate() {
        for b in &phased[i + 1..] {
            if max_abs_diff(&(a * b), &(b * a)) > MATRIX_TOLERANCE {
                return Err(Error::InvariantViolation(
                    "phased generators do not commute".into(),
                ));
            }
        }
    }

    let mut projector = identity.clone();
    for p in &phased {
        projector = &projector * eigenspace_projector(p, d, 0);
    }
    let code = StabilizerCode {
        l: l.clone(),
        generators,
        phased,
        projector,
    };
    code.check_projector()?;
    Ok(code)
}

/// Projector onto the `w^e` eigenspace of an order-`d` unitary `p`:
/// `(1/d) sum_c w^{-c e} p^c`.
fn eigenspace_projector(p: &DMatrix<Complex64>, d: u32, e: u32) -> DMatrix<Complex64> {
    let n = p.nrows();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    let mut power = DMatrix::<Complex64>::identity(n, n);
    for c in 0..d {
        acc += &power * root_of_unity(d, (d - (c * e) % d) % d);
        power = &power * p;
    }
    acc / Complex64::new(d as f64, 0.0)
}

impl StabilizerCode {
    pub fn subspace(&self) -> &SymplecticSubspace {
        &self.l
    }

    pub fn generators(&self) -> &[SymplecticVector] {
        &self.generators
    }

    pub fn phased_generators(&self) -> &[DMatrix<Complex64>] {
        &self.phased
    }

    pub fn projector(&self) -> &DMatrix<Complex64> {
        &self.projector
    }

    pub fn d(&self) -> u32 {
        self.l.field().order()
    }

    pub fn hilbert_dim(&self) -> usize {
        self.projector.nrows()
    }

    /// `d^k`, the expected trace of the projector.
    pub fn code_dimension(&self) -> usize {
        (self.d() as usize).pow((self.l.n() - self.l.dim()) as u32)
    }

    fn check_projector(&self) -> Result<()> {
        let p = &self.projector;
        if max_abs_diff(&(p * p), p) > MATRIX_TOLERANCE {
            return Err(Error::InvariantViolation(
                "projector is not idempotent".into(),
            ));
        }
        if max_abs_diff(&p.adjoint(), p) > MATRIX_TOLERANCE {
            return Err(Error::InvariantViolation(
                "projector is not Hermitian".into(),
            ));
        }
        let trace = p.trace();
        if (trace.re - self.code_dimension() as f64).abs() > 1e-8 || trace.im.abs() > 1e-8 {
            return Err(Error::InvariantViolation(format!(
                "projector trace {} differs from d^k = {}",
                trace,
                self.code_dimension()
            )));
        }
        Ok(())
    }

    /// Eigenvalue exponents `(e_1, ..., e_m)` of the phased generators on
    /// `N_x psi` for a code state `psi`: `e_j = s <g_j, x>`.
    pub fn syndrome_pattern(&self, x: &SymplecticVector) -> Vec<u32> {
        let f = self.l.field();
        self.generators
            .iter()
            .map(|g| f.mul(COMMUTATION_SIGN, pairing_unchecked(g, x)))
            .collect()
    }

    /// Projector onto the joint eigenspace with exponents `pattern`.
    pub fn syndrome_projector(&self, pattern: &[u32]) -> DMatrix<Complex64> {
        let n = self.hilbert_dim();
        let d = self.d();
        self.phased
            .iter()
            .zip(pattern)
            .fold(DMatrix::identity(n, n), |acc, (p, &e)| {
                acc * eigenspace_projector(p, d, e)
            })
    }

    /// Whether `N_x` and `N_y` agree on the code space up to a global phase:
    /// `P N_x^† N_y P = c P` with `|c| = 1`.
    pub fn same_action(&self, x: &SymplecticVector, y: &SymplecticVector) -> Result<bool> {
        if x.n() != self.l.n() || y.n() != self.l.n() {
            return Err(Error::DimensionMismatch(
                "operator length differs from code".into(),
            ));
        }
        let p = &self.projector;
        let m = p * tensor_unchecked(x).adjoint() * tensor_unchecked(y) * p;
        let c = m.trace() / p.trace();
        Ok((c.norm() - 1.0).abs() < 1e-9 && max_abs_diff(&m, &(p * c)) < 1e-9)
    }

    /// A Haar-like random unit vector inside the code space.
    pub fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<Complex64> {
        let n = self.hilbert_dim();
        loop {
            let raw = DVector::from_fn(n, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let projected = &self.projector * raw;
            let norm = projected.norm();
            if norm > 1e-6 {
                return projected / Complex64::new(norm, 0.0);
            }
        }
    }
}

/// Syndrome measurement followed by the inverse of the leader's Pauli:
/// Kraus operators `N_z^† Pi_e`, one per syndrome pattern `e`.
#[derive(Clone, Debug)]
pub struct Recovery {
    kraus: Vec<DMatrix<Complex64>>,
}

impl Recovery {
    pub fn new(code: &StabilizerCode, set: &CorrectableSet) -> Result<Self> {
        if code.subspace() != set.subspace() {
            return Err(Error::DimensionMismatch(
                "code and correctable set come from different subspaces".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut kraus = Vec::with_capacity(set.leaders().len());
        for z in set.leaders() {
            let pattern = code.syndrome_pattern(z);
            if !seen.insert(pattern.clone()) {
                return Err(Error::InvariantViolation(format!(
                    "two leaders share syndrome pattern {:?}",
                    pattern
                )));
            }
            kraus.push(tensor_unchecked(z).adjoint() * code.syndrome_projector(&pattern));
        }
        let n = code.hilbert_dim();
        let completeness = kraus
            .iter()
            .fold(DMatrix::<Complex64>::zeros(n, n), |acc, k| {
                acc + k.adjoint() * k
            });
        if max_abs_diff(&completeness, &DMatrix::identity(n, n)) > 1e-9 {
            return Err(Error::InvariantViolation(
                "recovery is not trace preserving".into(),
            ));
        }
        Ok(Self { kraus })
    }

    pub fn kraus_operators(&self) -> &[DMatrix<Complex64>] {
        &self.kraus
    }

    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = rho.nrows();
        self.kraus
            .iter()
            .fold(DMatrix::zeros(n, n), |acc, k| acc + k * rho * k.adjoint())
    }

    /// `<psi| R(|phi><phi|) |psi>`.
    pub fn overlap(&self, psi: &DVector<Complex64>, phi: &DVector<Complex64>) -> f64 {
        self.kraus
            .iter()
            .map(|k| psi.dotc(&(k * phi)).norm_sqr())
            .sum()
    }
}

/// `A^{⊗n}(rho) = sum_x P^n(x) N_x rho N_x^†`.
pub fn apply_channel(
    rho: &DMatrix<Complex64>,
    n: usize,
    p: &NoiseDistribution,
) -> Result<DMatrix<Complex64>> {
    let field = p.field();
    let dim = hilbert_dim(n, field.order())?;
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for idx in 0..field.space_size(n)? {
        let x = SymplecticVector::from_index(idx, n, field);
        let weight = p.sequence_probability(&x);
        if weight == 0.0 {
            continue;
        }
        let nx = tensor_unchecked(&x);
        out += (&nx * rho * nx.adjoint()) * Complex64::new(weight, 0.0);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrectabilityReport {
    pub members_checked: usize,
    pub states_checked: usize,
    /// smallest `<psi| R(N_x psi psi^† N_x^†) |psi>` over members `x` and states
    pub min_member_overlap: f64,
    pub failure_probability: f64,
    /// smallest `<psi| R(A^{⊗n}(psi psi^†)) |psi>` over states
    pub min_fidelity: f64,
    pub passed: bool,
}

/// Overlap tolerance for exact recovery and for the fidelity bound.
pub const RECOVERY_TOLERANCE: f64 = 1e-8;

/// Simulates syndrome recovery on random code states: every member of
/// `Gamma(L)` must be undone exactly, and the channel fidelity must be at
/// least `1 - failure_probability`.
pub fn verify_correctability(
    code: &StabilizerCode,
    set: &CorrectableSet,
    p: &NoiseDistribution,
    trials: usize,
    seed: u64,
) -> Result<CorrectabilityReport> {
    let recovery = Recovery::new(code, set)?;
    let n = code.subspace().n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<DVector<Complex64>> =
        (0..trials).map(|_| code.random_state(&mut rng)).collect();

    let mut min_member_overlap = f64::INFINITY;
    let mut members_checked = 0;
    for x in set.members() {
        let nx = tensor_unchecked(&x);
        for psi in &states {
            let phi = &nx * psi;
            min_member_overlap = min_member_overlap.min(recovery.overlap(psi, &phi));
        }
        members_checked += 1;
    }

    let fail = failure_probability(set, p)?;
    let mut min_fidelity = f64::INFINITY;
    for psi in &states {
        let rho = psi * psi.adjoint();
        let out = recovery.apply(&apply_channel(&rho, n, p)?);
        let fidelity = psi.dotc(&(&out * psi)).re;
        min_fidelity = min_fidelity.min(fidelity);
    }
    if states.is_empty() {
        min_member_overlap = 1.0;
        min_fidelity = 1.0;
    }
    let passed = min_member_overlap >= 1.0 - RECOVERY_TOLERANCE
        && min_fidelity >= 1.0 - fail - RECOVERY_TOLERANCE;
    Ok(CorrectabilityReport {
        members_checked,
        states_checked: states.len(),
        min_member_overlap,
        failure_probability: fail,
        min_fidelity,
        passed,
    })
}
