fn main() {
    std::process::exit(finslerlab::cli::run());
}
