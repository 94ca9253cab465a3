//! Driving the `ftgap` command line in-process, including the table cache.

use ftgap::cli::run;

fn main() {
    let cache = std::env::temp_dir().join("ftgap-example-cache");
    let cache = cache.to_string_lossy().into_owned();
    let env = |_: &str| None;
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    for args in [
        vec!["ftgap", "eval", "--x", "2", "--s", "4", "--method", "auto"],
        vec!["ftgap", "scan", "--x-range", "1:3:1", "--s-range", "0:8:4", "--with-truth"],
        vec!["ftgap", "painleve", "pii", "--cache-dir", &cache],
        vec!["ftgap", "painleve", "pii", "--cache-dir", &cache, "--format", "json"],
        vec!["ftgap", "eval", "--x", "20", "--s", "100", "--method", "thm2"],
    ] {
        println!("$ {}", args[1..].join(" "));
        let code = run(args, &env, &mut out, &mut err);
        println!("(exit {code})\n");
    }
}
