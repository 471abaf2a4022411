use std::path::Path;

use anyhow::{bail, Result};
use clap::{Subcommand, ValueEnum};
use serde_json::{json, Value};
use tsk_core::distance::DistanceSpace;
use tsk_core::exactnum::zero;
use tsk_core::tightspan::{
    contraction_retract, geodesic_point, in_pd, in_td, kappa_gates, retract_to_td, verify_kappa_distance,
    ContractionOptions, PointFunction, TightSpanError, TightSpanPoint,
};

use crate::input;
use crate::report::Outcome;
use crate::Inputs;

#[derive(Subcommand)]
pub enum Op {
    /// Membership of a function in P_d and T_d
    Member {
        /// Values in label order, comma separated
        #[arg(long)]
        f: String,
    },
    /// A point of T_d below a function of P_d
    Retract {
        #[arg(long)]
        f: String,
        #[arg(long, value_enum, default_value_t = Method::Lp)]
        method: Method,
    },
    /// The point of T_d at distance t from x on the way to y
    Geodesic {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        t: String,
    },
    /// Gate points of κ(x) towards every other point
    Kappa {
        #[arg(long)]
        x: String,
    },
    /// Witnesses realizing d(x,y) as the distance between κ(x) and κ(y)
    Dist {
        #[arg(long)]
        pair: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Lp,
    Contraction,
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::Member { .. } => "member",
            Op::Retract { .. } => "retract",
            Op::Geodesic { .. } => "geodesic",
            Op::Kappa { .. } => "kappa",
            Op::Dist { .. } => "dist",
        }
    }
}

fn function(d: &DistanceSpace, s: &str) -> Result<PointFunction> {
    let v = input::values(s)?;
    if v.len() != d.len() {
        bail!("expected {} values, found {}", d.len(), v.len());
    }
    Ok(PointFunction::new(v))
}

fn point_json(d: &DistanceSpace, p: &TightSpanPoint) -> Value {
    json!({ "values": p.function(), "support": p.support_labels(d) })
}

/// Extended four-point failures become violations; other errors stay errors.
fn or_violation(r: Result<Outcome, TightSpanError>) -> Result<Outcome> {
    match r {
        Err(TightSpanError::NotExtFourPoint(cert)) => Ok(Outcome::verdict(false, json!({ "certificate": cert }))),
        other => Ok(other?),
    }
}

pub fn run(inputs: &mut Inputs, path: &Path, op: &Op) -> Result<Outcome> {
    let d = input::distance_space(&inputs.read(path)?)?;
    match op {
        Op::Member { f } => {
            let f = function(&d, f)?;
            let pd = in_pd(&d, &f)?;
            let td = pd && in_td(&d, &f)?;
            Ok(Outcome::verdict(td, json!({ "in_Pd": pd, "in_Td": td })))
        }
        Op::Retract { f, method } => {
            let f = function(&d, f)?;
            if !in_pd(&d, &f)? {
                bail!("the function is not in P_d");
            }
            match method {
                Method::Lp => Ok(Outcome::ok(point_json(&d, &retract_to_td(&d, &f)?))),
                Method::Contraction => {
                    let out = contraction_retract(&d, &f, &ContractionOptions::default())?;
                    Ok(Outcome::ok(json!({
                        "values": out.point,
                        "iterations": out.iterations,
                        "exact": out.exact,
                        "snapped": out.snapped,
                    })))
                }
            }
        }
        Op::Geodesic { pair, t } => {
            let (x, y) = input::pair(pair)?;
            let t = input::rational(t)?;
            or_violation(geodesic_point(&d, &x, &y, &t).map(|p| Outcome::ok(point_json(&d, &p))))
        }
        Op::Kappa { x } => {
            let xi = d.index_of(x)?;
            let towards: Vec<&String> =
                (0..d.len()).filter(|&y| *d.get(xi, y) > zero()).map(|y| &d.labels()[y]).collect();
            or_violation(kappa_gates(&d, x).map(|gates| {
                let gates: Vec<Value> = towards
                    .iter()
                    .zip(&gates)
                    .map(|(y, g)| json!({ "towards": y, "point": point_json(&d, g) }))
                    .collect();
                Outcome::ok(json!({ "x": x, "gates": gates }))
            }))
        }
        Op::Dist { pair } => {
            let (x, y) = input::pair(pair)?;
            let k = verify_kappa_distance(&d, &x, &y)?;
            let target = d.dist(&x, &y)?.clone();
            let equal = k.distance == target;
            Ok(Outcome::verdict(
                equal,
                json!({
                    "in_kappa_x": point_json(&d, &k.g),
                    "in_kappa_y": point_json(&d, &k.f),
                    "distance": k.distance.to_string(),
                    "d": target.to_string(),
                    "equal": equal,
                }),
            ))
        }
    }
}
