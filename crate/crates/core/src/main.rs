fn main() {
    std::process::exit(diophant::cli::run(std::env::args_os()));
}
