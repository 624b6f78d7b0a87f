fn main() {
    std::process::exit(ezplan::cli::run(std::env::args_os()));
}
