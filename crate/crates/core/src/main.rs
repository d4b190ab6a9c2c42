fn main() {
    std::process::exit(daegeo::cli::run());
}
