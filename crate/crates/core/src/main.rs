fn main() {
    std::process::exit(ptlame::cli::run(std::env::args_os()));
}
