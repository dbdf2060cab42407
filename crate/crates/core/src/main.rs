fn main() {
    std::process::exit(cautious::cli::run(std::env::args_os()));
}
