//! Golden CLI invocations shared by the `cli` and `acceptance` targets.
//!
//! Each case runs from the crate root, so input paths are relative to it.
//! Set `UAI_BLESS=1` to rewrite the stored outputs.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub struct GoldenCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
}

pub const GOLDEN: &[GoldenCase] = &[
    GoldenCase { name: "ce_gaussian", args: &["ce", "--utility", "exp", "--gamma", "1", "--gaussian", "0.08,0.2"] },
    GoldenCase {
        name: "ce_powerlike",
        args: &["ce", "--utility", "powerlike:alpha=1,beta=2", "--gamma", "2", "--input", "tests/data/returns.csv"],
    },
    GoldenCase { name: "index_returns", args: &["index", "--utility", "exp", "--input", "tests/data/returns.csv"] },
    GoldenCase {
        name: "index_benchmarked",
        args: &[
            "index",
            "--utility",
            "modexp",
            "--input",
            "tests/data/returns.csv",
            "--benchmark-rate",
            "0.01",
            "--horizon",
            "2",
        ],
    },
    GoldenCase {
        name: "perf_wide",
        args: &["perf", "--utility", "exp", "--input", "tests/data/growth_wide.csv", "--benchmark", "0.02"],
    },
    GoldenCase {
        name: "maximize",
        args: &[
            "maximize",
            "--utility",
            "exp",
            "--candidate",
            "wide=tests/data/growth_wide.csv",
            "--candidate",
            "narrow=tests/data/growth_narrow.csv",
            "--benchmark",
            "0.02",
        ],
    },
    GoldenCase {
        name: "simulate_fgn",
        args: &["simulate", "--model", "fgn", "--hurst", "0.7", "--sigma", "0.02", "--mean", "0.001", "--n", "64", "--seed", "42"],
    },
    GoldenCase {
        name: "simulate_arma",
        args: &["simulate", "--model", "arma:phi=0.5,theta=0.3,mean=0.01,sigma=0.1", "--n", "64", "--seed", "3"],
    },
    GoldenCase {
        name: "simulate_ou",
        args: &[
            "simulate", "--model", "ou", "--kappa", "1", "--level", "0.5", "--sigma", "0.3", "--x0", "0", "--dt", "0.1", "--n",
            "64", "--seed", "5",
        ],
    },
    GoldenCase { name: "regularity_iterexp", args: &["regularity", "--utility", "iterexp"] },
    GoldenCase {
        name: "longrun_iid",
        args: &[
            "longrun", "--utility", "exp", "--model", "iid", "--mean", "0.07", "--sigma", "0.2", "--lambda", "0.02", "--tgrid",
            "32:256:x2", "--paths", "1000", "--seed", "7",
        ],
    },
    GoldenCase {
        name: "duality",
        args: &["duality", "--m", "0.08", "--sigma", "0.2", "--lambda", "0.02", "--paths", "5000", "--horizon", "4"],
    },
];

pub fn crate_root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

pub fn golden_path(case: &GoldenCase) -> PathBuf {
    crate_root().join("tests").join("golden").join(format!("{}.json", case.name))
}

/// Runs the `uai` binary from the crate root.
pub fn run_uai(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uai"))
        .args(args)
        .current_dir(crate_root())
        .env("UAI_THREADS", "2")
        .output()
        .expect("failed to spawn uai")
}

/// Compares one run against the stored output, or stores it when blessing.
pub fn check_golden(case: &GoldenCase, stdout: &[u8]) -> Result<(), String> {
    let path = golden_path(case);
    if std::env::var_os("UAI_BLESS").is_some() {
        std::fs::write(&path, stdout).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(());
    }
    let expected = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == stdout {
        Ok(())
    } else {
        Err(format!(
            "{}: output differs from {}\n  got:      {}\n  expected: {}",
            case.name,
            path.display(),
            String::from_utf8_lossy(stdout).trim_end(),
            String::from_utf8_lossy(&expected).trim_end()
        ))
    }
}
