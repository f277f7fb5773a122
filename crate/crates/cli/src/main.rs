fn main() {
    std::process::exit(pcacal_cli::run(std::env::args_os()));
}
