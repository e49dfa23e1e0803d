fn main() {
    std::process::exit(svcrypt::cli::run(std::env::args_os()));
}
