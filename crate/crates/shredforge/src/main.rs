fn main() {
    std::process::exit(shredforge::cli::run(std::env::args_os()));
}
