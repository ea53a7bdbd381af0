fn main() {
    std::process::exit(braidmat_cli::run(std::env::args_os()));
}
