fn main() {
    std::process::exit(sepverify::cli::run(std::env::args_os()));
}
