use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::json;
use tsk_core::realtree::{build_subtree_representation, verify_subtree_representation, TreeError};

use crate::input;
use crate::report::Outcome;
use crate::Inputs;

pub fn run(inputs: &mut Inputs, path: &Path, out: Option<&Path>) -> Result<Outcome> {
    let d = input::distance_space(&inputs.read(path)?)?;
    let rep = match build_subtree_representation(&d) {
        Ok(rep) => rep,
        Err(TreeError::NotExtFourPoint(cert)) => return Ok(Outcome::verdict(false, json!({ "certificate": cert }))),
        Err(e) => return Err(e.into()),
    };
    let cert = verify_subtree_representation(&rep, &d)?;
    let mut result = json!({
        "certificate": cert,
        "vertices": rep.tree.vertex_count(),
        "edges": rep.tree.edges().len(),
        "total_length": rep.tree.total_length().to_string(),
    });
    let mut outcome = Outcome::verdict(cert.is_ok(), json!(null));
    match out {
        Some(out) => {
            let text = serde_json::to_string_pretty(&rep)?;
            fs::write(out, text + "\n").with_context(|| format!("cannot write {}", out.display()))?;
            outcome.artifacts.push(out.display().to_string());
        }
        None => result["representation"] = serde_json::to_value(&rep)?,
    }
    outcome.result = result;
    Ok(outcome)
}
