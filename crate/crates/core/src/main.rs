fn main() {
    std::process::exit(altgen::cli::run(std::env::args_os()));
}
