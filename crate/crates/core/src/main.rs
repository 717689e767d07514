fn main() {
    std::process::exit(qthermo_core::cli::main_with_args(std::env::args_os()));
}
