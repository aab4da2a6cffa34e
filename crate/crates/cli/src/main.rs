fn main() {
    std::process::exit(hgp_cli::run(std::env::args_os()));
}
