fn main() {
    std::process::exit(fisherflow::cli::main_with_args(std::env::args_os()));
}
