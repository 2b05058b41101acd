fn main() {
    std::process::exit(ccgrowth::cli::run(std::env::args_os()));
}
