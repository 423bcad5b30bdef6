fn main() {
    std::process::exit(phasekit::cli::main_with_args(std::env::args_os()));
}
