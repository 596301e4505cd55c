fn main() {
    std::process::exit(polyanalytic::cli::run_from(std::env::args_os()));
}
