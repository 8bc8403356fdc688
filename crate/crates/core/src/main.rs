fn main() {
    std::process::exit(hadwiger::cli::main_with_args(std::env::args_os()));
}
