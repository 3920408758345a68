fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let out = toric_gtheory::cli::run_command(&argv);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code)
}
