fn main() {
    std::process::exit(mirrorlang::main_with_args(std::env::args_os()));
}
