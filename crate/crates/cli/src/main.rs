fn main() {
    std::process::exit(canonflow_cli::run(std::env::args_os()));
}
