fn main() {
    std::process::exit(biotok_cli::run(std::env::args_os()));
}
