fn main() {
    std::process::exit(vsparse::cli::run());
}
