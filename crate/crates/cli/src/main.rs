fn main() {
    let (code, out) = revsig_cli::run(std::env::args_os());
    print!("{out}");
    std::process::exit(code);
}
