fn main() {
    let env = |key: &str| std::env::var(key).ok();
    let code = ftgap::cli::run(std::env::args_os(), &env, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
