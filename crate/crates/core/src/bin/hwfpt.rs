fn main() {
    std::process::exit(hwfpt::cli::run(std::env::args_os()));
}
