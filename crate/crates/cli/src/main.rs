fn main() {
    std::process::exit(epstein_cli::run(std::env::args_os().skip(1)));
}
