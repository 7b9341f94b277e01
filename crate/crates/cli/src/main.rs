fn main() {
    std::process::exit(qkpr_cli::run(std::env::args_os()));
}
