fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(kaexp::cli::run_cli(&args));
}
