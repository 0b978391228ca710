fn main() {
    std::process::exit(uai::cli::run(std::env::args_os()));
}
