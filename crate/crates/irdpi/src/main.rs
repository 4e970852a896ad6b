fn main() {
    std::process::exit(irdpi::cli::run(std::env::args_os()));
}
