fn main() {
    std::process::exit(revsim::cli::run(std::env::args_os()));
}
