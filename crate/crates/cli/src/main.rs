fn main() {
    std::process::exit(fluorospec_cli::run(std::env::args_os()));
}
