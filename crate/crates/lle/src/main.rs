fn main() {
    let code = lle::cli::run(std::env::args_os());
    std::process::exit(code);
}
