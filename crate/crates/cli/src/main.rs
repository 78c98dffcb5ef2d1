fn main() {
    std::process::exit(qconn_cli::run(std::env::args_os()));
}
