use rayon::prelude::*;
use su3pol::{Error, Result};

use crate::config::ExperimentConfig;
use crate::experiment::{self, Outcome};

/// Runs the analysis at every sweep point in parallel and concatenates the
/// rows in sweep order. An empty range gives an empty outcome.
pub fn sweep(config: &ExperimentConfig) -> Result<Outcome> {
    let spec = config
        .sweep
        .ok_or_else(|| Error::Domain("no sweep specified".into()))?;
    let points = spec.points();
    let per_point: Vec<Result<Outcome>> = points
        .par_iter()
        .map(|&v| {
            let c = config.at(spec.parameter, v).map_err(Error::Domain)?;
            let mut o = experiment::run(&c)?;
            let tag = format!("{}={v}", spec.parameter.name());
            for r in &mut o.rows {
                r.setting = if r.setting.is_empty() {
                    tag.clone()
                } else {
                    format!("{tag};{}", r.setting)
                };
            }
            o.notes = o
                .notes
                .into_iter()
                .map(|n| format!("[{tag}] {n}"))
                .collect();
            Ok(o)
        })
        .collect();

    let mut out = Outcome::default();
    for o in per_point {
        let o = o?;
        out.rows.extend(o.rows);
        out.tail_mass = out.tail_mass.max(o.tail_mass);
        out.notes.extend(o.notes);
    }
    Ok(out)
}
