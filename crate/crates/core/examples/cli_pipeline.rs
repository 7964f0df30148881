//! Driving the command line in-process: generate, then check.

use amice_core::cli::dispatch;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dispatch(std::iter::once("amice").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn main() {
    let fam = r#"{"prime": 2, "a0": 0, "pos_bound": 8, "neg_bound": 0,
                  "entries": [{"n": 1, "witt": {"components": [1, 0, 0, 0]}}]}"#;
    let (code, op) = run(&["solvable", "generate", "--family", fam, "--kind", "diff"]);
    println!("generate exit {code}");
    let (code, report) = run(&["--format", "table", "solvable", "check", "--in", &op]);
    println!("check exit {code}");
    for line in report.lines().filter(|l| l.starts_with("result.verdict")) {
        println!("{line}");
    }
}
