fn main() {
    std::process::exit(fefferman::cli::run(std::env::args_os()));
}
