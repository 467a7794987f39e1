fn main() {
    std::process::exit(segrank::cli::run());
}
