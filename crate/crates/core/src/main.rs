fn main() {
    std::process::exit(jscc::cli::run(std::env::args_os()));
}
