fn main() {
    std::process::exit(ssea::harness::cli::run_cli());
}
