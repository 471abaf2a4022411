use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use tsk_core::distance::{DistanceSpace, DistanceSpaceJson};
use tsk_core::diversity::DiversityJson;
use tsk_core::exactnum::parse_rational;
use tsk_core::Rational;

/// A file read from disk together with its digest.
pub struct Input {
    pub text: String,
    pub digest: InputDigest,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn read(path: &Path) -> Result<Input> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let digest = InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) };
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not valid UTF-8", path.display()))?;
    Ok(Input { text, digest })
}

/// Parses `{labels, matrix}` JSON, or a whitespace matrix whose first line holds the labels.
pub fn distance_space(input: &Input) -> Result<DistanceSpace> {
    let path = &input.digest.path;
    if input.text.trim_start().starts_with('{') {
        let j: DistanceSpaceJson = serde_json::from_str(&input.text).with_context(|| format!("{path}: bad JSON"))?;
        return DistanceSpace::try_from(j).with_context(|| format!("{path}: invalid distance table"));
    }
    parse_matrix(&input.text).with_context(|| format!("{path}: bad matrix"))
}

fn parse_matrix(text: &str) -> Result<DistanceSpace> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty input"))?;
    let labels: Vec<String> = header.split_whitespace().map(str::to_string).collect();
    let n = labels.len();
    let mut table = Vec::with_capacity(n);
    for (line, row) in lines {
        let mut fields: Vec<&str> = row.split_whitespace().collect();
        // Rows may repeat their label in front.
        if fields.len() == n + 1 {
            if fields[0] != labels[table.len().min(n - 1)] {
                bail!("line {line}: row label {:?} does not match the header", fields[0]);
            }
            fields.remove(0);
        }
        if fields.len() != n {
            bail!("line {line}: expected {n} values, found {}", fields.len());
        }
        let values = fields
            .iter()
            .enumerate()
            .map(|(col, f)| parse_rational(f).map_err(|e| anyhow!("line {line}, column {}: {e}", col + 1)))
            .collect::<Result<Vec<Rational>>>()?;
        table.push(values);
        if table.len() > n {
            bail!("line {line}: more rows than labels");
        }
    }
    if table.len() != n {
        bail!("expected {n} rows, found {}", table.len());
    }
    Ok(DistanceSpace::new(labels, table)?)
}

pub fn diversity_json(input: &Input) -> Result<DiversityJson> {
    serde_json::from_str(&input.text).with_context(|| format!("{}: bad diversity JSON", input.digest.path))
}

/// Comma or whitespace separated rationals.
pub fn values(s: &str) -> Result<Vec<Rational>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .enumerate()
        .map(|(i, p)| parse_rational(p).with_context(|| format!("value {}", i + 1)))
        .collect()
}

pub fn rational(s: &str) -> Result<Rational> {
    Ok(parse_rational(s)?)
}

/// `x,y` into its two labels.
pub fn pair(s: &str) -> Result<(String, String)> {
    match s.split(',').map(str::trim).collect::<Vec<_>>()[..] {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => bail!("expected a pair `x,y`, found {s:?}"),
    }
}

pub fn labels(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(str::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsk_core::exactnum::{frac, int};

    #[test]
    fn matrix_with_and_without_row_labels() {
        let a = parse_matrix("x y\n0 1/2\n1/2 0\n").unwrap();
        let b = parse_matrix("# comment\n x y\n\nx 0 1/2\ny 1/2 0").unwrap();
        assert_eq!(a, b);
        assert_eq!(*a.get(0, 1), frac(1, 2));
    }

    #[test]
    fn matrix_errors_name_the_line() {
        let e = parse_matrix("x y\n0 1\n1\n").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = parse_matrix("x y\n0 0.5\n0.5 0\n").unwrap_err().to_string();
        assert!(e.contains("line 2, column 2"), "{e}");
        assert!(parse_matrix("x y\n0 1\n2 0\n").is_err());
    }

    #[test]
    fn value_lists_and_pairs() {
        assert_eq!(values("0, 1/2 3").unwrap(), vec![int(0), frac(1, 2), int(3)]);
        assert!(values("1,x").is_err());
        assert_eq!(pair("a, b").unwrap(), ("a".into(), "b".into()));
        assert!(pair("a").is_err());
    }
}
