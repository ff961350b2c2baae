fn main() {
    std::process::exit(levsim::cli::run(std::env::args_os()));
}
