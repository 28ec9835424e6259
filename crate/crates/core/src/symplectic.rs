//! Linear algebra over `F_d^{2n}` with the symplectic pairing.
//!
//! Vectors use the interleaved layout `(u_1, v_1, ..., u_n, v_n)`, where
//! `(u_i, v_i)` indexes the single-site operator `X^{u_i} Z^{v_i}`. The same
//! order defines the lexicographic order and the integer index of a vector,
//! so `from_index(i)` enumerates `F_d^{2n}` in lexicographic order.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest ensemble `enumerate_isotropic` will materialize.
pub const MAX_ENSEMBLE: u128 = 1_000_000;
/// Largest ambient space `d^{2n}` that is walked vector by vector.
pub const MAX_SPACE: u128 = 1 << 24;

/// The prime field `F_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    d: u32,
}

impl Field {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2
            || (2..d)
                .take_while(|p| p * p <= d)
                .any(|p| d.is_multiple_of(p))
        {
            return Err(Error::NotPrime(d));
        }
        Ok(Self { d })
    }

    #[inline]
    pub fn order(self) -> u32 {
        self.d
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.d
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.d - b) % self.d
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.d as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.d - a % self.d) % self.d
    }

    /// Multiplicative inverse by Fermat's little theorem. `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.d));
        let mut result = 1u32;
        let mut base = a % self.d;
        let mut exp = self.d - 2;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        result
    }

    /// `d^exp` as an exact integer.
    pub fn pow_big(self, exp: u32) -> BigUint {
        BigUint::from(self.d).pow(exp)
    }

    /// Number of vectors in `F_d^{2n}`, or an error when it exceeds [`MAX_SPACE`].
    pub fn space_size(self, n: usize) -> Result<usize> {
        let size = self.pow_big(2 * n as u32);
        match size.to_u128() {
            Some(s) if s <= MAX_SPACE => Ok(s as usize),
            other => Err(Error::InstanceTooLarge {
                what: "ambient space d^(2n)",
                predicted: other.unwrap_or(u128::MAX),
                cap: MAX_SPACE,
            }),
        }
    }
}

/// An element of `F_d^{2n}` in interleaved layout.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymplecticVector {
    field: Field,
    coords: Vec<u32>,
}

impl fmt::Debug for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self)
    }
}

impl fmt::Display for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.coords {
            write!(f, "{}", c)?;
        }
        Ok(())
    }
}

impl SymplecticVector {
    pub fn new(field: Field, coords: Vec<u32>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "expected 2n > 0 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= field.order()) {
            return Err(Error::InvalidArgument(format!(
                "coordinate {} is not a residue mod {}",
                c,
                field.order()
            )));
        }
        Ok(Self { field, coords })
    }

    pub fn zero(n: usize, field: Field) -> Self {
        Self {
            field,
            coords: vec![0; 2 * n],
        }
    }

    /// Inverse of [`SymplecticVector::index`].
    pub fn from_index(mut index: usize, n: usize, field: Field) -> Self {
        let d = field.order() as usize;
        let mut coords = vec![0u32; 2 * n];
        for c in coords.iter_mut().rev() {
            *c = (index % d) as u32;
            index /= d;
        }
        Self { field, coords }
    }

    /// Position of this vector in the lexicographic enumeration of `F_d^{2n}`.
    pub fn index(&self) -> usize {
        let d = self.field.order() as usize;
        self.coords.iter().fold(0, |acc, &c| acc * d + c as usize)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn d(&self) -> u32 {
        self.field.order()
    }

    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// The site-`i` symbol `(u_i, v_i)` as an index `u_i * d + v_i` into `F_d x F_d`.
    pub fn symbol(&self, site: usize) -> usize {
        let d = self.field.order() as usize;
        self.coords[2 * site] as usize * d + self.coords[2 * site + 1] as usize
    }

    /// The length-`n` sequence over `F_d x F_d` this vector encodes.
    pub fn symbols(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.symbol(i)).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field || self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch(format!(
                "vectors over F_{}^{} and F_{}^{}",
                self.d(),
                self.coords.len(),
                other.d(),
                other.coords.len()
            )));
        }
        Ok(())
    }

    /// `self + scale * other`. Panics on mismatched spaces.
    pub fn add_scaled(&self, other: &Self, scale: u32) -> Self {
        assert_eq!(self.coords.len(), other.coords.len());
        let f = self.field;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| f.add(a, f.mul(scale, b)))
            .collect();
        Self { field: f, coords }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, self.field.order() - 1)
    }

    pub fn scale(&self, a: u32) -> Self {
        let f = self.field;
        Self {
            field: f,
            coords: self.coords.iter().map(|&c| f.mul(a, c)).collect(),
        }
    }
}

/// `<x, y> = sum_i u_i v'_i - v_i u'_i  (mod d)`.
pub fn pairing(x: &SymplecticVector, y: &SymplecticVector) -> Result<u32> {
    x.check_compatible(y)?;
    Ok(pairing_unchecked(x, y))
}

pub(crate) fn pairing_unchecked(x: &SymplecticVector, y: &SymplecticVector) -> u32 {
    let f = x.field;
    let mut acc = 0u32;
    for (a, b) in x.coords.chunks_exact(2).zip(y.coords.chunks_exact(2)) {
        acc = f.add(acc, f.mul(a[0], b[1]));
        acc = f.sub(acc, f.mul(a[1], b[0]));
    }
    acc
}

/// Reduces `rows` in place to row-reduced echelon form and drops zero rows.
/// Returns the pivot column of each remaining row.
fn rref(field: Field, rows: &mut Vec<Vec<u32>>, width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = field.inv(rows[r][col]);
        for c in rows[r].iter_mut() {
            *c = field.mul(*c, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for (c, &p) in row.iter_mut().zip(&pivot_row) {
                *c = field.sub(*c, field.mul(factor, p));
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// A subspace of `F_d^{2n}` held as its row-reduced echelon basis.
///
/// The basis is canonical, so two values compare equal exactly when they
/// span the same subspace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymplecticSubspace {
    field: Field,
    n: usize,
    basis: Vec<SymplecticVector>,
    pivots: Vec<usize>,
}

impl SymplecticSubspace {
    pub fn zero(n: usize, field: Field) -> Self {
        Self {
            field,
            n,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn whole(n: usize, field: Field) -> Self {
        let basis = (0..2 * n)
            .map(|i| {
                let mut coords = vec![0; 2 * n];
                coords[i] = 1;
                SymplecticVector { field, coords }
            })
            .collect();
        Self {
            field,
            n,
            basis,
            pivots: (0..2 * n).collect(),
        }
    }

    /// Span of `vectors` in canonical form; dependent rows are discarded.
    pub fn span(n: usize, field: Field, vectors: &[SymplecticVector]) -> Result<Self> {
        for v in vectors {
            if v.field != field || v.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "vector over F_{}^{} in a subspace of F_{}^{}",
                    v.d(),
                    v.coords.len(),
                    field.order(),
                    2 * n
                )));
            }
        }
        let mut rows: Vec<Vec<u32>> = vectors.iter().map(|v| v.coords.clone()).collect();
        Ok(Self::from_rows(n, field, &mut rows))
    }

    fn from_rows(n: usize, field: Field, rows: &mut Vec<Vec<u32>>) -> Self {
        let pivots = rref(field, rows, 2 * n);
        let basis = rows
            .drain(..)
            .map(|coords| SymplecticVector { field, coords })
            .collect();
        Self {
            field,
            n,
            basis,
            pivots,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SymplecticVector] {
        &self.basis
    }

    /// Number of elements, `d^dim`.
    pub fn cardinality(&self) -> usize {
        (self.field.order() as usize).pow(self.dim() as u32)
    }

    fn check_vector(&self, x: &SymplecticVector) -> Result<()> {
        if x.field != self.field || x.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector over F_{}^{} against a subspace of F_{}^{}",
                x.d(),
                x.coords.len(),
                self.field.order(),
                2 * self.n
            )));
        }
        Ok(())
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains(&self, x: &SymplecticVector) -> bool {
        if x.field != self.field || x.n() != self.n {
            return false;
        }
        let f = self.field;
        let mut r = x.coords.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let factor = r[p];
            if factor != 0 {
                for (c, &b) in r.iter_mut().zip(&row.coords) {
                    *c = f.sub(*c, f.mul(factor, b));
                }
            }
        }
        r.iter().all(|&c| c == 0)
    }

    /// Subspace spanned by `self` and `x`.
    pub fn extend(&self, x: &SymplecticVector) -> Result<Self> {
        self.check_vector(x)?;
        let mut rows: Vec<Vec<u32>> = self.basis.iter().map(|v| v.coords.clone()).collect();
        rows.push(x.coords.clone());
        Ok(Self::from_rows(self.n, self.field, &mut rows))
    }

    /// `L^perp` with respect to the symplectic pairing.
    pub fn dual(&self) -> Self {
        let f = self.field;
        let width = 2 * self.n;
        // x in L^perp iff sum_i x_{u_i} b_{v_i} - x_{v_i} b_{u_i} = 0 for every basis b.
        let mut constraints: Vec<Vec<u32>> = self
            .basis
            .iter()
            .map(|b| {
                let mut row = vec![0; width];
                for i in 0..self.n {
                    row[2 * i] = b.coords[2 * i + 1];
                    row[2 * i + 1] = f.neg(b.coords[2 * i]);
                }
                row
            })
            .collect();
        let pivots = rref(f, &mut constraints, width);
        let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
        let mut rows: Vec<Vec<u32>> = free
            .iter()
            .map(|&fc| {
                let mut v = vec![0; width];
                v[fc] = 1;
                for (row, &p) in constraints.iter().zip(&pivots) {
                    v[p] = f.neg(row[fc]);
                }
                v
            })
            .collect();
        Self::from_rows(self.n, f, &mut rows)
    }

    /// True when every pair of basis vectors pairs to zero, i.e. `L ⊆ L^perp`.
    pub fn is_isotropic(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, x)| {
            self.basis[i + 1..]
                .iter()
                .all(|y| pairing_unchecked(x, y) == 0)
        })
    }

    /// All `d^dim` elements, ordered by their coefficient vectors over the basis.
    pub fn elements(&self) -> Vec<SymplecticVector> {
        let d = self.field.order();
        let mut out = vec![SymplecticVector::zero(self.n, self.field)];
        for b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for v in &out {
                for c in 0..d {
                    next.push(v.add_scaled(b, c));
                }
            }
            out = next;
        }
        out
    }

    /// Syndrome of `x` against this subspace's basis, packed as a base-`d`
    /// integer with the first basis vector most significant. Two vectors share
    /// a syndrome exactly when their difference lies in `self.dual()`.
    pub fn syndrome_index(&self, x: &SymplecticVector) -> usize {
        let d = self.field.order() as usize;
        self.basis
            .iter()
            .fold(0, |acc, g| acc * d + pairing_unchecked(x, g) as usize)
    }
}

/// Canonical row-reduced echelon representation of the span of `vectors`.
pub fn canonical_form(
    n: usize,
    field: Field,
    vectors: &[SymplecticVector],
) -> Result<SymplecticSubspace> {
    SymplecticSubspace::span(n, field, vectors)
}

/// Exact number of isotropic `m`-dimensional subspaces of `F_d^{2n}`:
/// ordered isotropic independent tuples divided by ordered bases of an `m`-space.
pub fn isotropic_count(n: usize, m: usize, field: Field) -> BigUint {
    let d = BigUint::from(field.order());
    let pow = |e: usize| d.pow(e as u32);
    let mut tuples = BigUint::one();
    for i in 1..=m {
        let (a, b) = (pow(2 * n + 1 - i), pow(i - 1));
        if a <= b {
            return BigUint::zero();
        }
        tuples *= a - b;
    }
    let mut bases = BigUint::one();
    for i in 0..m {
        bases *= pow(m) - pow(i);
    }
    tuples / bases
}

fn check_ensemble_size(n: usize, m: usize, field: Field) -> Result<()> {
    field.space_size(n)?;
    let count = isotropic_count(n, m, field);
    match count.to_u128() {
        Some(c) if c <= MAX_ENSEMBLE => Ok(()),
        other => Err(Error::InstanceTooLarge {
            what: "isotropic ensemble",
            predicted: other.unwrap_or(u128::MAX),
            cap: MAX_ENSEMBLE,
        }),
    }
}

/// Every isotropic `m`-dimensional subspace of `F_d^{2n}`, each once, sorted by
/// canonical basis.
pub fn enumerate_isotropic(n: usize, m: usize, field: Field) -> Result<Vec<SymplecticSubspace>> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    check_ensemble_size(n, m, field)?;
    let mut level: BTreeSet<SymplecticSubspace> = BTreeSet::new();
    level.insert(SymplecticSubspace::zero(n, field));
    for _ in 0..m {
        let mut next = BTreeSet::new();
        for s in &level {
            for v in s.dual().elements() {
                if !s.contains(&v) {
                    next.insert(s.extend(&v)?);
                }
            }
        }
        level = next;
    }
    Ok(level.into_iter().collect())
}

/// Uniform draw from the isotropic `m`-dimensional subspaces, driven by `rng`.
///
/// Each step draws uniformly from `S^perp \ S` for the current span `S`; the
/// number of choices at step `i` depends only on `i`, so every ordered basis of
/// every target subspace is equally likely.
pub fn sample_isotropic_with<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    field: Field,
    rng: &mut R,
) -> Result<SymplecticSubspace> {
    if n == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= m <= n and n > 0, got n={}, m={}",
            n, m
        )));
    }
    let d = field.order();
    let mut current = SymplecticSubspace::zero(n, field);
    for _ in 0..m {
        let perp = current.dual();
        let v = loop {
            let mut v = SymplecticVector::zero(n, field);
            for b in perp.basis() {
                v = v.add_scaled(b, rng.random_range(0..d));
            }
            if !current.contains(&v) {
                break v;
            }
        };
        current = current.extend(&v)?;
    }
    Ok(current)
}

/// Seeded uniform draw; the same seed always yields the same subspace.
pub fn sample_isotropic(n: usize, m: usize, field: Field, seed: u64) -> Result<SymplecticSubspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_isotropic_with(n, m, field, &mut rng)
}

/// Iterates `F_d^{2n}` in lexicographic order.
pub fn all_vectors(n: usize, field: Field) -> Result<impl Iterator<Item = SymplecticVector>> {
    let size = field.space_size(n)?;
    Ok((0..size).map(move |i| SymplecticVector::from_index(i, n, field)))
}

/// The cosets of `l_perp` in `F_d^{2n}`.
///
/// Each coset is listed in lexicographic order and cosets are ordered by their
/// least element, so the first coset is `l_perp` itself.
pub fn cosets(l_perp: &SymplecticSubspace) -> Result<Vec<Vec<SymplecticVector>>> {
    let n = l_perp.n();
    let field = l_perp.field();
    let annihilator = l_perp.dual();
    let count = annihilator.cardinality();
    let mut slot_of_syndrome = vec![usize::MAX; count];
    let mut out: Vec<Vec<SymplecticVector>> = Vec::with_capacity(count);
    for x in all_vectors(n, field)? {
        let s = annihilator.syndrome_index(&x);
        if slot_of_syndrome[s] == usize::MAX {
            slot_of_syndrome[s] = out.len();
            out.push(Vec::new());
        }
        out[slot_of_syndrome[s]].push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(d: u32) -> Field {
        Field::new(d).unwrap()
    }

    fn v(d: u32, c: &[u32]) -> SymplecticVector {
        SymplecticVector::new(f(d), c.to_vec()).unwrap()
    }

    #[test]
    fn composite_field_rejected() {
        assert!(matches!(Field::new(4), Err(Error::NotPrime(4))));
        assert!(matches!(Field::new(1), Err(Error::NotPrime(1))));
        assert!(Field::new(2).is_ok());
        assert!(Field::new(7).is_ok());
    }

    #[test]
    fn inverse() {
        let f7 = f(7);
        for a in 1..7 {
            assert_eq!(f7.mul(a, f7.inv(a)), 1);
        }
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&v(2, &[1, 0]), &v(2, &[0, 1])).unwrap(), 1);
        assert_eq!(
            pairing(&v(5, &[1, 2, 3, 4]), &v(5, &[4, 3, 2, 1])).unwrap(),
            0
        );
        let x = v(3, &[1, 2, 0, 1]);
        assert_eq!(pairing(&x, &x).unwrap(), 0);
    }

    #[test]
    fn pairing_rejects_mismatch() {
        assert!(pairing(&v(2, &[1, 0]), &v(2, &[1, 0, 0, 0])).is_err());
        assert!(pairing(&v(2, &[1, 0]), &v(3, &[1, 0])).is_err());
    }

    #[test]
    fn vector_rejects_bad_coords() {
        assert!(SymplecticVector::new(f(3), vec![0, 3]).is_err());
        assert!(SymplecticVector::new(f(3), vec![0, 1, 2]).is_err());
        assert!(SymplecticVector::new(f(3), vec![]).is_err());
    }

    #[test]
    fn index_round_trip_is_lexicographic() {
        let field = f(3);
        let all: Vec<_> = all_vectors(2, field).unwrap().collect();
        assert_eq!(all.len(), 81);
        for (i, x) in all.iter().enumerate() {
            assert_eq!(x.index(), i);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn canonical_form_examples() {
        let field = f(2);
        let s = canonical_form(2, field, &[v(2, &[1, 0, 1, 0]), v(2, &[1, 0, 1, 0])]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis(), &[v(2, &[1, 0, 1, 0])]);

        let s = canonical_form(1, field, &[v(2, &[0, 1]), v(2, &[1, 1])]).unwrap();
        assert_eq!(s.basis(), &[v(2, &[1, 0]), v(2, &[0, 1])]);
        assert_eq!(s, SymplecticSubspace::whole(1, field));

        let s = canonical_form(3, field, &[]).unwrap();
        assert_eq!(s.dim(), 0);
        assert_eq!(s, SymplecticSubspace::zero(3, field));
    }

    #[test]
    fn dual_examples() {
        let field = f(2);
        assert_eq!(
            SymplecticSubspace::zero(2, field).dual(),
            SymplecticSubspace::whole(2, field)
        );
        let l = canonical_form(1, field, &[v(2, &[1, 0])]).unwrap();
        // brute force over F_2^2
        let brute: Vec<_> = all_vectors(1, field)
            .unwrap()
            .filter(|x| pairing(x, &v(2, &[1, 0])).unwrap() == 0)
            .collect();
        assert_eq!(brute, vec![v(2, &[0, 0]), v(2, &[1, 0])]);
        assert_eq!(l.dual(), l);
        assert_eq!(l.dual().elements().len(), brute.len());
    }

    #[test]
    fn dual_dimension_n_plus_k() {
        let field = f(3);
        for l in enumerate_isotropic(2, 1, field).unwrap() {
            assert_eq!(l.dual().dim(), 3);
        }
    }

    #[test]
    fn isotropy_examples() {
        let field = f(2);
        assert!(SymplecticSubspace::zero(2, field).is_isotropic());
        assert!(canonical_form(1, field, &[v(2, &[1, 1])])
            .unwrap()
            .is_isotropic());
        assert!(!SymplecticSubspace::whole(1, field).is_isotropic());
    }

    #[test]
    fn enumeration_counts_match_formula() {
        for d in [2, 3] {
            let field = f(d);
            for n in 1..=3 {
                for m in 0..=n {
                    let all = enumerate_isotropic(n, m, field).unwrap();
                    assert_eq!(
                        BigUint::from(all.len()),
                        isotropic_count(n, m, field),
                        "d={d} n={n} m={m}"
                    );
                    assert!(all.windows(2).all(|w| w[0] < w[1]));
                    assert!(all.iter().all(|l| l.is_isotropic() && l.dim() == m));
                }
            }
        }
        assert_eq!(enumerate_isotropic(2, 1, f(2)).unwrap().len(), 15);
        assert_eq!(enumerate_isotropic(3, 2, f(2)).unwrap().len(), 315);
        assert_eq!(enumerate_isotropic(3, 0, f(2)).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_cap() {
        let err = enumerate_isotropic(6, 6, f(2)).unwrap_err();
        assert!(matches!(err, Error::InstanceTooLarge { .. }));
        let err = enumerate_isotropic(13, 1, f(2)).unwrap_err();
        assert!(matches!(err, Error::InstanceTooLarge { .. }));
    }

    #[test]
    fn sampling_is_deterministic_and_isotropic() {
        let field = f(3);
        let a = sample_isotropic(3, 2, field, 42).unwrap();
        let b = sample_isotropic(3, 2, field, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.is_isotropic());
        assert_eq!(a.dim(), 2);
        assert_eq!(
            sample_isotropic(2, 0, field, 7).unwrap(),
            SymplecticSubspace::zero(2, field)
        );
        assert!(sample_isotropic(2, 3, field, 7).is_err());
    }

    #[test]
    fn coset_examples() {
        let field = f(2);
        let lp = canonical_form(1, field, &[v(2, &[1, 0])]).unwrap();
        let cs = cosets(&lp).unwrap();
        assert_eq!(
            cs,
            vec![
                vec![v(2, &[0, 0]), v(2, &[1, 0])],
                vec![v(2, &[0, 1]), v(2, &[1, 1])]
            ]
        );
        assert_eq!(
            cosets(&SymplecticSubspace::whole(2, field)).unwrap().len(),
            1
        );
        for l in enumerate_isotropic(3, 2, field).unwrap() {
            let cs = cosets(&l.dual()).unwrap();
            assert_eq!(cs.len(), 4);
            assert!(cs.iter().all(|c| c.len() == 16));
        }
    }
}
