fn main() {
    std::process::exit(fidelity_exponent::cli::run_from(std::env::args_os()));
}
