fn main() {
    std::process::exit(obtuse::cli::main_with_args(std::env::args_os()));
}
