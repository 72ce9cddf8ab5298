//! Experiment runner behind the `su3pol` binary: configs, analyses, sweeps,
//! the built-in self-test and result documents.

pub mod config;
pub mod experiment;
pub mod output;
pub mod selftest;
pub mod sweep;

use su3pol::{Error, Result};

use config::{Analysis, ExperimentConfig};
use output::Document;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

/// Truncation and basis-size failures are capacity errors; everything else
/// means the config asked for something undefined.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capacity(_) | Error::Truncation { .. } | Error::BoundaryViolation { .. } => {
            EXIT_CAPACITY
        }
        _ => EXIT_USAGE,
    }
}

fn analysis_name(a: Analysis) -> &'static str {
    match a {
        Analysis::State => "state",
        Analysis::Gellmann => "gellmann",
        Analysis::Polarization => "polarization",
        Analysis::Interferometer => "interferometer",
        Analysis::Amplitude => "amplitude",
    }
}

/// Runs `config` (as a sweep if it carries one) into a result document.
pub fn execute(config: &ExperimentConfig) -> Result<Document> {
    let outcome = match config.sweep {
        Some(_) => sweep::sweep(config)?,
        None => experiment::run(config)?,
    };
    let name = match config.sweep {
        Some(s) => format!(
            "sweep {} over {}",
            analysis_name(config.analysis),
            s.parameter.name()
        ),
        None => analysis_name(config.analysis).to_string(),
    };
    Ok(Document::new(
        output::config_hash(config),
        &name,
        outcome.rows,
        outcome.tail_mass,
        outcome.notes,
    ))
}

/// Self-test document and whether every check passed.
pub fn selftest_document() -> Result<(Document, bool)> {
    let checks = selftest::run_checks()?;
    let ok = checks.iter().all(selftest::Check::passed);
    let rows = checks.iter().map(selftest::Check::row).collect();
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let note = format!("{} checks, {} failed", checks.len(), failed);
    let hash = output::sha256_hex(b"selftest");
    Ok((Document::new(hash, "selftest", rows, 0.0, vec![note]), ok))
}
