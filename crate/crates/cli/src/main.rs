use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ltsheaf_cli::{load, parse_command, render_human, run, summarize, to_json_string, Diagnostic, Options};

/// Checks coverages, sheafifies presheaves and runs the small-map axiom
/// harness on a `.site` specification.
#[derive(Parser)]
#[command(name = "ltsheaf", version)]
struct Args {
    /// The `.site` file.
    spec: PathBuf,
    /// Run this command instead of the file's `run` lines, e.g. `sheafify X`.
    command: Vec<String>,
    /// Override every size guard.
    #[arg(long)]
    cap: Option<usize>,
    /// Also write the JSON report to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Print a one-line summary per command instead of JSON.
    #[arg(long)]
    human: bool,
}

fn input_error(path: &std::path::Path, d: &Diagnostic) -> ExitCode {
    eprintln!("{}:{d}", path.display());
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", args.spec.display());
            return ExitCode::from(2);
        }
    };
    let site = match load(&text) {
        Ok(s) => s,
        Err(d) => return input_error(&args.spec, &d),
    };
    let opts = Options { cap: args.cap };
    let commands = if args.command.is_empty() {
        site.commands.clone()
    } else {
        match parse_command(&args.command.join(" ")) {
            Ok(c) => vec![c],
            Err(d) => {
                eprintln!("command:{d}");
                return ExitCode::from(2);
            }
        }
    };
    let mut reports = Vec::new();
    for c in &commands {
        match run(&site, c, &opts) {
            Ok(r) => reports.push(r),
            Err(d) if args.command.is_empty() => return input_error(&args.spec, &d),
            Err(d) => {
                eprintln!("command:{d}");
                return ExitCode::from(2);
            }
        }
    }
    let report = summarize(&reports);
    let json = to_json_string(&report);
    if let Some(path) = &args.json {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if args.human {
        print!("{}", render_human(&report));
    } else {
        print!("{json}");
    }
    if report["passed"].as_bool() == Some(true) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
