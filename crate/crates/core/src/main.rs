fn main() {
    std::process::exit(stabopt::cli::run());
}
