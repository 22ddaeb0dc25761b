fn main() {
    std::process::exit(empo::cli::main_with_args(std::env::args_os()));
}
