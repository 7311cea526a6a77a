//! Drives the command-line front end in-process and shows both output formats.

use hwfpt::cli::{execute, run_with_io, OutputFormat, RunSpec};

fn main() {
    let spec = RunSpec::parse(["hwfpt", "theta-max", "--beta", "0", "--b", "20"]).expect("valid flags");
    println!("canonical: {}", spec.to_argv().join(" "));
    let out = execute(&spec).expect("root exists");
    print!("{}", out.text(OutputFormat::Json));
    print!("{}", out.text(OutputFormat::Csv));

    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let code = run_with_io(["hwfpt", "mean", "--beta", "1", "--b", "1", "--x", "3"], &mut stdout, &mut stderr);
    print!("exit {code}: {}", String::from_utf8_lossy(&stderr));
}
