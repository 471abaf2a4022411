use std::path::Path;

use anyhow::{bail, Result};
use clap::ValueEnum;
use serde_json::json;
use tsk_core::distance::{check_extended_four_point, check_four_point, check_metric};
use tsk_core::diversity::{Diversity, DiversityError};

use crate::input;
use crate::report::Outcome;
use crate::Inputs;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Metric,
    #[value(name = "4pt")]
    FourPoint,
    #[value(name = "ext4pt")]
    ExtFourPoint,
    Diversity,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Metric => "metric",
            Kind::FourPoint => "4pt",
            Kind::ExtFourPoint => "ext4pt",
            Kind::Diversity => "diversity",
        }
    }
}

pub fn run(inputs: &mut Inputs, path: &Path, kind: Kind, restrict: Option<&str>) -> Result<Outcome> {
    let file = inputs.read(path)?;
    if let Kind::Diversity = kind {
        if restrict.is_some() {
            bail!("--restrict applies to distance tables only");
        }
        let j = input::diversity_json(&file)?;
        return match Diversity::try_from(j) {
            Ok(_) => Ok(Outcome::ok(json!({ "certificate": tsk_core::distance::Certificate::ok() }))),
            Err(DiversityError::AxiomViolation(cert)) => Ok(Outcome::verdict(false, json!({ "certificate": cert }))),
            Err(e) => Err(e.into()),
        };
    }
    let mut d = input::distance_space(&file)?;
    if let Some(r) = restrict {
        d = d.restrict(&input::labels(r))?;
    }
    let cert = match kind {
        Kind::Metric => check_metric(&d),
        Kind::FourPoint => check_four_point(&d),
        Kind::ExtFourPoint => check_extended_four_point(&d),
        Kind::Diversity => unreachable!(),
    };
    if cert.is_ok() {
        return Ok(Outcome::ok(json!({ "certificate": cert })));
    }
    let reproduces = cert.reproduces(&d);
    Ok(Outcome::verdict(false, json!({ "certificate": cert, "reproduces": reproduces })))
}
