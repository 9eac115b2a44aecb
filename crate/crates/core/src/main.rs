fn main() {
    std::process::exit(bicons::export::cli::run_from(std::env::args_os()));
}
