//! Result documents: provenance header plus rows, as CSV or JSON.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Format};
use crate::experiment::Row;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub cli_version: &'static str,
    pub core_version: &'static str,
    /// SHA-256 of the config's canonical JSON.
    pub config_hash: String,
    pub analysis: String,
    /// Largest truncation tail mass over all evaluated states.
    pub tail_mass: f64,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Document {
    pub provenance: Provenance,
    pub rows: Vec<Row>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    sha256_hex(&serde_json::to_vec(config).expect("config serializes"))
}

impl Document {
    pub fn new(
        config_hash: String,
        analysis: &str,
        rows: Vec<Row>,
        tail_mass: f64,
        notes: Vec<String>,
    ) -> Self {
        Self {
            provenance: Provenance {
                tool: "su3pol",
                cli_version: env!("CARGO_PKG_VERSION"),
                core_version: su3pol::VERSION,
                config_hash,
                analysis: analysis.to_string(),
                tail_mass,
                notes,
            },
            rows,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("document serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> String {
        let p = &self.provenance;
        let mut out = String::new();
        out.push_str(&format!(
            "# tool: {} {} (core {})\n",
            p.tool, p.cli_version, p.core_version
        ));
        out.push_str(&format!("# config_hash: {}\n", p.config_hash));
        out.push_str(&format!("# analysis: {}\n", p.analysis));
        out.push_str(&format!("# tail_mass: {:e}\n", p.tail_mass));
        for n in &p.notes {
            out.push_str(&format!("# note: {n}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "state",
            "setting",
            "observable",
            "mean",
            "variance",
            "reference_value",
            "compared",
            "residual",
            "provenance",
        ])
        .expect("in-memory write");
        let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.state.as_str(),
                &r.setting,
                &r.observable,
                &num(r.mean),
                &num(r.variance),
                &num(r.reference_value),
                match r.compared {
                    Some(crate::experiment::Compared::Mean) => "mean",
                    Some(crate::experiment::Compared::Variance) => "variance",
                    None => "",
                },
                &num(r.residual),
                r.provenance,
            ])
            .expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        out.push_str(&String::from_utf8(bytes).expect("csv is utf-8"));
        out
    }
}
