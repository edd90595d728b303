fn main() {
    std::process::exit(fictplay_cli::run(std::env::args_os()));
}
