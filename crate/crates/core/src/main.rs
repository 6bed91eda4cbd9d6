fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(msrlab::cli::dispatch(&argv));
}
