fn main() {
    std::process::exit(pwcet::cli::run(std::env::args_os()));
}
