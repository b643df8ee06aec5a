fn main() {
    std::process::exit(shipctl::cli::run(std::env::args_os()));
}
