use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::Subcommand;
use serde_json::json;
use tsk_core::distance::DistanceSpace;
use tsk_core::domination::{
    as_dominating, embed_minimal_metric, lexicographic_pair_order, minimal_dominating_metric, pin_pair,
    some_dominating_metric, verify_minimal, DominatingMetric, DominationError,
};
use tsk_core::exactnum::pow2_inv;

use crate::input;
use crate::report::Outcome;
use crate::Inputs;

#[derive(Subcommand)]
pub enum Op {
    /// The constant metric at the diameter
    Any,
    /// Pin a pair to its distance
    Pin {
        #[arg(long)]
        pair: String,
        /// Metric to edit (defaults to the constant metric)
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Lexicographically minimal dominating metric
    Minimize {
        /// Pair order as `a,b;c,d;...` (defaults to lexicographic label order)
        #[arg(long)]
        order: Option<String>,
    },
    /// Certify that a dominating metric is minimal
    Verify {
        #[arg(long)]
        rho: PathBuf,
    },
    /// Embed a minimal metric into the tight span
    Embed {
        #[arg(long)]
        rho: PathBuf,
        /// Accepted error on embedded distances when a point cannot be snapped
        #[arg(long)]
        tol: Option<String>,
    },
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::Any => "any",
            Op::Pin { .. } => "pin",
            Op::Minimize { .. } => "minimize",
            Op::Verify { .. } => "verify",
            Op::Embed { .. } => "embed",
        }
    }
}

/// A metric file over the labels of `d`. Triangle violations are violations, not input errors.
fn load_rho(inputs: &mut Inputs, d: &DistanceSpace, path: &Path) -> Result<Result<DominatingMetric, Outcome>> {
    let rho = input::distance_space(&inputs.read(path)?)?;
    match as_dominating(d, rho) {
        Ok(rho) => Ok(Ok(rho)),
        Err(DominationError::NotMetric(cert)) => Ok(Err(Outcome::verdict(false, json!({ "certificate": cert })))),
        Err(e) => Err(e.into()),
    }
}

fn order(s: &str) -> Result<Vec<(String, String)>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(input::pair).collect()
}

pub fn run(inputs: &mut Inputs, path: &Path, op: &Op) -> Result<Outcome> {
    let d = input::distance_space(&inputs.read(path)?)?;
    match op {
        Op::Any => Ok(Outcome::ok(json!({ "metric": some_dominating_metric(&d).metric().space() }))),
        Op::Pin { pair, rho } => {
            let (x, y) = input::pair(pair)?;
            let p = match rho {
                Some(r) => match load_rho(inputs, &d, r)? {
                    Ok(p) => p,
                    Err(violation) => return Ok(violation),
                },
                None => some_dominating_metric(&d),
            };
            let pinned = pin_pair(&p, &x, &y)?;
            Ok(Outcome::ok(json!({ "metric": pinned.metric().space(), "changed": pinned != p })))
        }
        Op::Minimize { order: o } => {
            let pairs = match o {
                Some(o) => order(o)?,
                None => lexicographic_pair_order(&d),
            };
            let rho = minimal_dominating_metric(&d, &pairs)?;
            let minimal = verify_minimal(&rho)?;
            Ok(Outcome::verdict(minimal, json!({ "metric": rho.metric().space(), "minimal": minimal })))
        }
        Op::Verify { rho } => {
            let rho = match load_rho(inputs, &d, rho)? {
                Ok(p) => p,
                Err(violation) => return Ok(violation),
            };
            let minimal = verify_minimal(&rho)?;
            Ok(Outcome::verdict(minimal, json!({ "minimal": minimal })))
        }
        Op::Embed { rho, tol } => {
            let rho = match load_rho(inputs, &d, rho)? {
                Ok(p) => p,
                Err(violation) => return Ok(violation),
            };
            let tol = match tol {
                Some(t) => input::rational(t)?,
                None => pow2_inv(40),
            };
            if !verify_minimal(&rho)? {
                bail!("the metric is not minimal");
            }
            let emb = embed_minimal_metric(&d, &rho, &tol)?;
            let points: Vec<_> = emb.points.iter().map(|(l, f)| json!({ "label": l, "values": f })).collect();
            Ok(Outcome::ok(json!({ "points": points, "exact": emb.exact })))
        }
    }
}
