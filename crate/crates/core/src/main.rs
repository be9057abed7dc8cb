fn main() {
    std::process::exit(rfgan::cli::run(std::env::args_os()));
}
