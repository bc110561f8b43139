fn main() {
    std::process::exit(rtlnp::cli::main_with_args(std::env::args_os()));
}
