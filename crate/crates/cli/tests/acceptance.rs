//! Acceptance gate: runs every criterion at its tolerance and prints one
//! PASS/FAIL line each. Exits non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use scatgate_cli::reproduce::CRITERIA;

fn run_reproduce(dir: &Path) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_scatgate"))
        .args(["reproduce-paper", "--reproducible", "--jobs", "2", "--out-dir"])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(format!("exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)))
    }
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let e = e.map_err(|e| e.to_string())?;
            let bytes = fs::read(e.path()).map_err(|e| e.to_string())?;
            Ok((e.file_name().to_string_lossy().into_owned(), bytes))
        })
        .collect::<Result<Vec<_>, String>>()?;
    files.sort();
    Ok(files)
}

/// Two reproducible runs must produce byte-identical artifacts.
fn determinism() -> Result<String, String> {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_reproduce(a.path())?;
    run_reproduce(b.path())?;
    let (fa, fb) = (read_dir_sorted(a.path())?, read_dir_sorted(b.path())?);
    if fa.is_empty() {
        return Err("no artifacts written".into());
    }
    if fa != fb {
        let names: Vec<&str> = fa
            .iter()
            .zip(&fb)
            .filter(|(x, y)| x != y)
            .map(|(x, _)| x.0.as_str())
            .collect();
        return Err(format!("outputs differ: {names:?}"));
    }
    Ok(format!("{} files identical", fa.len()))
}

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, title, f) in CRITERIA {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(section) => {
                let ok = section.passed();
                if !ok {
                    failed += 1;
                }
                println!(
                    "criterion {id:>2} {:<32} {}  ({} checks, {secs:.2} s)",
                    title,
                    if ok { "PASS" } else { "FAIL" },
                    section.checks.len()
                );
                for c in section.checks.iter().filter(|c| !c.pass()) {
                    println!("    {}: {} outside [{}, {}]", c.name, c.value, c.lo, c.hi);
                }
            }
            Err(e) => {
                failed += 1;
                println!("criterion {id:>2} {title:<32} FAIL  (error: {e})");
            }
        }
    }
    let start = Instant::now();
    match determinism() {
        Ok(msg) => println!(
            "criterion 10 {:<32} PASS  ({msg}, {:.2} s)",
            "determinism",
            start.elapsed().as_secs_f64()
        ),
        Err(e) => {
            failed += 1;
            println!("criterion 10 {:<32} FAIL  ({e})", "determinism");
        }
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
