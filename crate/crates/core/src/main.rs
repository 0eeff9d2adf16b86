fn main() {
    std::process::exit(topos_measure::cli::main_with_args(std::env::args_os()));
}
