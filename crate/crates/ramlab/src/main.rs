fn main() {
    std::process::exit(ramlab::cli::main_from_args(std::env::args_os()));
}
