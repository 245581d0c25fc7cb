fn main() {
    std::process::exit(riskcurve::cli::main_with_args(std::env::args_os()));
}
