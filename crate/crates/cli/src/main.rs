fn main() {
    std::process::exit(scatgate_cli::run(std::env::args_os().collect()));
}
