fn main() {
    std::process::exit(newton_circle::cli::run(std::env::args_os()));
}
