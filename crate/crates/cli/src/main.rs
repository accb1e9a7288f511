fn main() {
    std::process::exit(tmlod_cli::run(std::env::args_os()));
}
