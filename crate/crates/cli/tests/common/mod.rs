#![allow(dead_code)]

use std::io::Write;
use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Run the `toda` binary on a config given as JSON text.
pub fn toda(subcommand: &str, config: &str, extra: &[&str]) -> Run {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(config.as_bytes()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_toda"))
        .arg(subcommand)
        .arg("--config")
        .arg(file.path())
        .args(extra)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Rows of a CSV block (header dropped), stopping at the first blank line.
pub fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

/// JSON that follows the blank line after a CSV block.
pub fn trailing_json(text: &str) -> serde_json::Value {
    let (_, json) = text.split_once("\n\n").expect("blank line before summary");
    serde_json::from_str(json).unwrap()
}

pub fn range(lo: f64, hi: f64, step: f64) -> String {
    let count = ((hi - lo) / step).round() as usize;
    let values: Vec<String> = (0..=count)
        .map(|i| format!("{}", lo + step * i as f64))
        .collect();
    format!("[{}]", values.join(","))
}
