fn main() {
    std::process::exit(capenergy::cli::run(std::env::args_os()));
}
