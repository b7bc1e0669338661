fn main() {
    std::process::exit(nmext::cli::run(std::env::args().collect()));
}
