fn main() {
    std::process::exit(sphaerica::cli::main_with_args(std::env::args_os()));
}
