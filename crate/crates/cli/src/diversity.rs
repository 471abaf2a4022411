use std::path::Path;

use anyhow::{bail, Result};
use clap::Subcommand;
use serde_json::{json, Value};
use tsk_core::diversity::{
    check_nice, d_delta, delta_t, embed_into_td, g_map, in_t_delta, is_arboreal, is_phylogenetic, subset_order,
    Diversity, SubsetFunction,
};
use tsk_core::tightspan::d_inf;

use crate::input;
use crate::report::Outcome;
use crate::Inputs;

#[derive(Subcommand)]
pub enum Op {
    /// The induced distance D_δ on non-empty subsets
    Ddelta,
    /// Extended four-point condition of D_δ
    Arboreal,
    /// Whether δ is the hull length of a weighted tree
    Phylo,
    /// Whether P_δ is cut out by the pairwise constraints
    Nice,
    /// Map members of T_δ into the tight span of D_δ
    Embed {
        /// One function in size-then-lexicographic subset order, starting with the empty set;
        /// defaults to the maps A ↦ δ(A ∪ {x})
        #[arg(long)]
        f: Option<String>,
    },
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::Ddelta => "ddelta",
            Op::Arboreal => "arboreal",
            Op::Phylo => "phylo",
            Op::Nice => "nice",
            Op::Embed { .. } => "embed",
        }
    }
}

fn labelled(delta: &Diversity, f: &SubsetFunction) -> Value {
    let pairs: Vec<Value> = f.labelled(delta).into_iter().map(|(k, v)| json!([k, v])).collect();
    Value::Array(pairs)
}

fn embed(delta: &Diversity, named: Vec<(String, SubsetFunction)>) -> Result<Outcome> {
    let mut points = Vec::new();
    let mut images = Vec::new();
    for (name, f) in &named {
        if !in_t_delta(delta, f)? {
            bail!("{name} is not in T_δ");
        }
        let g = embed_into_td(delta, f)?;
        points.push(json!({ "name": name, "image": g }));
        images.push(g);
    }
    let mut pairs = Vec::new();
    let mut preserved = true;
    for i in 0..named.len() {
        for j in 0..i {
            let before = d_inf(&named[i].1.to_point_function(), &named[j].1.to_point_function())?;
            let after = d_inf(&images[i], &images[j])?;
            let dt = delta_t(delta, &[named[i].1.clone(), named[j].1.clone()])?;
            let ok = before == after && before == dt;
            preserved &= ok;
            pairs.push(json!({
                "pair": [named[j].0, named[i].0],
                "d_inf": before.to_string(),
                "image_d_inf": after.to_string(),
                "delta_t": dt.to_string(),
            }));
        }
    }
    Ok(Outcome::verdict(preserved, json!({ "points": points, "pairs": pairs, "preserved": preserved })))
}

pub fn run(inputs: &mut Inputs, path: &Path, op: &Op) -> Result<Outcome> {
    let delta = Diversity::try_from(input::diversity_json(&inputs.read(path)?)?)?;
    match op {
        Op::Ddelta => Ok(Outcome::ok(json!({ "distance": d_delta(&delta) }))),
        Op::Arboreal => {
            let cert = is_arboreal(&delta);
            Ok(Outcome::verdict(cert.is_ok(), json!({ "certificate": cert })))
        }
        Op::Phylo => {
            let v = is_phylogenetic(&delta)?;
            Ok(Outcome::verdict(
                v.phylogenetic,
                json!({ "phylogenetic": v.phylogenetic, "witness": v.witness, "tree": v.tree }),
            ))
        }
        Op::Nice => {
            let r = check_nice(&delta)?;
            let witness = r.witness.map(|w| {
                json!({
                    "collection": w.collection,
                    "point": labelled(&delta, &w.point),
                    "sum": w.sum.to_string(),
                    "required": w.required.to_string(),
                })
            });
            Ok(Outcome::verdict(r.nice, json!({ "nice": r.nice, "witness": witness })))
        }
        Op::Embed { f } => {
            let named = match f {
                Some(s) => {
                    let v = input::values(s)?;
                    let size = delta.table().len();
                    if v.len() != size {
                        bail!("expected {size} values, found {}", v.len());
                    }
                    let mut table = vec![v[0].clone(); size];
                    for (k, m) in subset_order(delta.len()).into_iter().enumerate() {
                        table[m as usize] = v[k].clone();
                    }
                    vec![("f".to_string(), SubsetFunction(table))]
                }
                None => {
                    delta.elements().iter().map(|x| Ok((format!("g_{x}"), g_map(&delta, x)?))).collect::<Result<_>>()?
                }
            };
            embed(&delta, named)
        }
    }
}
