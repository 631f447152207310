fn main() {
    std::process::exit(krein_cli::app::run(std::env::args_os()));
}
