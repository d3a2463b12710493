fn main() {
    std::process::exit(twostroke::cli::run(std::env::args_os()));
}
