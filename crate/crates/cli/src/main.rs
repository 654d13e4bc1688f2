fn main() {
    std::process::exit(logimath_cli::main_with(std::env::args_os()));
}
