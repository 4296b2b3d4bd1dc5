fn main() {
    std::process::exit(subgap::cli::run());
}
