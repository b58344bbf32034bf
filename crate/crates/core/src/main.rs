fn main() {
    std::process::exit(quiver_varieties::cli::run(std::env::args_os()));
}
