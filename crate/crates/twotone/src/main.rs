//! Thin manifest runner for the `twotone` library.
//!
//! ```text
//! twotone --manifest <path> [--seed <u64>] [--out <dir>] [--mc-samples <n>] [--strict]
//! ```
//!
//! Exit codes: 0 all scenarios and assertions passed, 1 an embedded
//! assertion failed, 2 configuration or I/O error (with `--strict`,
//! warnings are promoted to configuration errors).

use std::path::PathBuf;
use std::process::ExitCode;
use twotone::scenario::{load_manifest, run, RunOptions};

struct Args {
    manifest: PathBuf,
    out: PathBuf,
    opts: RunOptions,
}

fn parse_args() -> Result<Args, String> {
    let mut manifest = None;
    let mut out = PathBuf::from("out");
    let mut opts = RunOptions::default();
    let mut it = std::env::args().skip(1);
    while let Some(arg) = it.next() {
        let mut value = |flag: &str| {
            it.next()
                .ok_or_else(|| format!("{flag} expects a value"))
        };
        match arg.as_str() {
            "--manifest" => manifest = Some(PathBuf::from(value("--manifest")?)),
            "--out" => out = PathBuf::from(value("--out")?),
            "--seed" => {
                opts.seed_override = Some(
                    value("--seed")?
                        .parse()
                        .map_err(|e| format!("--seed: {e}"))?,
                )
            }
            "--mc-samples" => {
                opts.mc_samples_override = Some(
                    value("--mc-samples")?
                        .parse()
                        .map_err(|e| format!("--mc-samples: {e}"))?,
                )
            }
            "--strict" => opts.strict = true,
            "--help" | "-h" => {
                println!(
                    "usage: twotone --manifest <path> [--seed <u64>] [--out <dir>] \
                     [--mc-samples <n>] [--strict]"
                );
                std::process::exit(0);
            }
            other => return Err(format!("unknown argument: {other}")),
        }
    }
    Ok(Args {
        manifest: manifest.ok_or("--manifest is required")?,
        out,
        opts,
    })
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let manifest = match load_manifest(&args.manifest) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let summary = match run(&manifest, &args.out, &args.opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for report in &summary.reports {
        match &report.error {
            Some(e) => println!("[{}] ERROR {e}", report.name),
            None => {
                for a in &report.assertions {
                    println!(
                        "[{}] {} {}: {}",
                        report.name,
                        if a.passed { "PASS" } else { "FAIL" },
                        a.name,
                        a.detail
                    );
                }
                for w in &report.warnings {
                    println!("[{}] WARN {w}", report.name);
                }
                println!(
                    "[{}] wrote {} artifact(s)",
                    report.name,
                    report.artifacts.len()
                );
            }
        }
    }
    println!(
        "summary: {} scenario(s), all_passed = {}, summary.json in {}",
        summary.reports.len(),
        summary.all_passed,
        args.out.display()
    );
    if args.opts.strict && summary.had_warnings {
        eprintln!("error: warnings are fatal under --strict");
        return ExitCode::from(2);
    }
    if summary.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
