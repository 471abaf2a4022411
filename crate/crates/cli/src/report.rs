use serde::Serialize;
use serde_json::Value;

use crate::input::InputDigest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Ok,
    Violation,
}

/// What a command produced, before it is wrapped into a [`RunReport`].
pub struct Outcome {
    pub verdict: Verdict,
    pub result: Value,
    pub artifacts: Vec<String>,
}

impl Outcome {
    pub fn ok(result: Value) -> Outcome {
        Outcome { verdict: Verdict::Ok, result, artifacts: Vec::new() }
    }

    pub fn verdict(ok: bool, result: Value) -> Outcome {
        Outcome { verdict: if ok { Verdict::Ok } else { Verdict::Violation }, result, artifacts: Vec::new() }
    }
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub verdict: Verdict,
    pub result: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}
