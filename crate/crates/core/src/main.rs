fn main() {
    std::process::exit(oentropy::cli::run(std::env::args_os()));
}
