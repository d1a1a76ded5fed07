fn main() {
    std::process::exit(cdperc::cli::run(std::env::args().collect()));
}
