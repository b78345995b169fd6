fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = nonarch::cli::run_from_env(&args);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
