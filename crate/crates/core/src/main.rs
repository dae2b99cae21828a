fn main() {
    std::process::exit(cstar_numrange::cli::main_with_args(std::env::args_os()));
}
