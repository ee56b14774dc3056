fn main() {
    if !lambda_holo_validation::run_all() {
        std::process::exit(1);
    }
}
