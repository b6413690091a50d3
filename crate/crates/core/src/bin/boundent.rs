fn main() {
    std::process::exit(boundent::cli::run(std::env::args_os()));
}
