//! Acceptance criterion 10: every command is deterministic — identical bytes
//! out for identical inputs, across repeated runs.

use std::path::Path;
use std::process::{Command, Output};

fn frontera(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frontera"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_fixture(dir: &Path) -> std::path::PathBuf {
    // small deterministic weekly panel
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut text = String::from("date,AA,BB,CC\n");
    for t in 0..110 {
        let label = format!("20{:02}-{:02}", 9 + t / 52, (t % 52) + 1);
        let a = 0.002 + 0.04 * (next() + next() - 1.0);
        let b = 0.001 + 0.03 * (next() + next() - 1.0);
        let c = 0.004 + 0.05 * (next() + next() - 1.0);
        text.push_str(&format!("{label},{a:.6},{b:.6},{c:.6}\n"));
    }
    let path = dir.join("panel.csv");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn criterion_10_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path());
    let input = input.to_str().unwrap();

    let command_sets: Vec<Vec<&str>> = vec![
        vec!["stats", "--input", input],
        vec!["stats", "--input", input, "--split", "2010-52", "--format", "json"],
        vec!["portfolio", "gmv", "--input", input, "--format", "csv"],
        vec!["portfolio", "tp", "--input", input],
        vec!["portfolio", "msr", "--input", input, "--msr-rate", "0.001", "--format", "json"],
        vec!["portfolio", "mcesr", "--input", input, "--interval", "0:0.0015"],
        vec![
            "portfolio", "mcesr", "--input", input, "--interval", "0:0.0015", "--no-short",
            "--grid", "200",
        ],
        vec![
            "backtest", "--input", input, "--split", "2010-26", "--horizons", "5,15",
            "--msr-rate", "0.001", "--interval", "0:0.001", "--grid", "100", "--format", "csv",
        ],
    ];

    for args in &command_sets {
        let first = frontera(args);
        assert!(
            first.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&first.stderr)
        );
        let second = frontera(args);
        assert_eq!(
            first.stdout, second.stdout,
            "stdout of {args:?} differs between runs"
        );
        assert_eq!(first.status.code(), second.status.code());
    }

    // plotdata: the emitted files must be byte-identical across runs
    let out_a = dir.path().join("plots_a");
    let out_b = dir.path().join("plots_b");
    for out in [&out_a, &out_b] {
        let run = frontera(&[
            "plotdata",
            "--input",
            input,
            "--split",
            "2010-52",
            "--msr-rate",
            "0.001",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(run.status.success());
    }
    for name in ["frontier.csv", "lines.csv", "points.csv", "equity.csv"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }

    println!("criterion 10: PASS  CLI outputs are byte-identical across runs");
}
