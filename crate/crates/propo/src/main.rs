fn main() {
    std::process::exit(propo::cli::run());
}
