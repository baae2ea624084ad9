fn main() {
    std::process::exit(fibwalk_cli::run_cli(std::env::args_os()));
}
