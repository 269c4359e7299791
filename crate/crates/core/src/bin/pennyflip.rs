fn main() {
    std::process::exit(pennyflip::cli::run(std::env::args_os()));
}
