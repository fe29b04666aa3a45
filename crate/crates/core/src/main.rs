fn main() {
    std::process::exit(stochsym::cli::main_with_args(std::env::args_os()));
}
