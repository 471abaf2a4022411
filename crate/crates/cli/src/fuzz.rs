use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tsk_core::distance::{check_extended_four_point, check_four_point, DistanceSpace};
use tsk_core::diversity::{check_nice, is_arboreal, is_phylogenetic, phylogenetic_diversity, Diversity};
use tsk_core::random::{random_diameter_diversity, random_l1_diversity, random_metric};
use tsk_core::realtree::{
    anchor_leaves, build_subtree_representation, random_subtree_distance, random_tree, verify_subtree_representation,
};

use crate::report::Outcome;
use crate::FuzzMode;

pub fn mode_name(mode: FuzzMode) -> &'static str {
    match mode {
        FuzzMode::Subtree => "subtree",
        FuzzMode::Metric => "metric",
        FuzzMode::Diversity => "diversity",
    }
}

/// Case `i` draws from its own generator so that a failing case can be replayed alone.
fn case_rng(seed: u64, i: usize) -> (u64, ChaCha8Rng) {
    let s = seed.wrapping_add(i as u64);
    (s, ChaCha8Rng::seed_from_u64(s))
}

pub fn run(seed: u64, count: usize, mode: FuzzMode) -> Outcome {
    let mut failures: Vec<Value> = Vec::new();
    let mut tally = json!({});
    for i in 0..count {
        let (s, mut rng) = case_rng(seed, i);
        let res = match mode {
            FuzzMode::Subtree => subtree_case(s, &mut rng, &mut tally),
            FuzzMode::Metric => metric_case(i, &mut rng, &mut tally),
            FuzzMode::Diversity => diversity_case(i, &mut rng, &mut tally),
        };
        if let Err(reason) = res {
            failures.push(json!({ "case": i, "seed": s, "reason": reason }));
        }
    }
    let ok = failures.is_empty();
    Outcome::verdict(ok, json!({ "seed": seed, "count": count, "tally": tally, "failures": failures }))
}

fn bump(tally: &mut Value, key: &str) {
    let v = &mut tally[key];
    *v = json!(v.as_u64().unwrap_or(0) + 1);
}

fn subtree_case(s: u64, rng: &mut ChaCha8Rng, tally: &mut Value) -> Result<(), String> {
    let n = rng.gen_range(2..=6);
    let size = rng.gen_range(1..=20);
    let (d, _) = random_subtree_distance(s, n, size);
    let cert = check_extended_four_point(&d);
    if !cert.is_ok() {
        return Err(format!("induced distance fails the extended four-point condition: {cert}"));
    }
    bump(tally, "ext4pt_ok");
    let rep = build_subtree_representation(&d).map_err(|e| e.to_string())?;
    let cert = verify_subtree_representation(&rep, &d).map_err(|e| e.to_string())?;
    if !cert.is_ok() {
        return Err(format!("roundtrip mismatch: {cert}"));
    }
    bump(tally, "roundtrip_ok");
    Ok(())
}

fn tree_leaf_metric(rng: &mut ChaCha8Rng) -> DistanceSpace {
    let edges = rng.gen_range(1..=8);
    let mut tree = random_tree(rng, edges);
    let mut names = anchor_leaves(&mut tree);
    names.truncate(6);
    DistanceSpace::from_fn(names.clone(), |i, j| tree.tree_distance(&names[i], &names[j]).expect("anchored"))
        .expect("tree distances")
}

fn metric_case(i: usize, rng: &mut ChaCha8Rng, tally: &mut Value) -> Result<(), String> {
    let d = if i.is_multiple_of(2) {
        let n = rng.gen_range(2..=6);
        random_metric(rng, n)
    } else {
        tree_leaf_metric(rng)
    };
    let four = check_four_point(&d).is_ok();
    let ext = check_extended_four_point(&d).is_ok();
    if four != ext {
        return Err(format!("four-point {four}, extended four-point {ext}"));
    }
    bump(tally, "agree");
    bump(tally, if four { "tree_like" } else { "violations" });
    Ok(())
}

fn monotone(delta: &Diversity) -> bool {
    let full = delta.full();
    (0..=full).all(|a| (0..delta.len()).all(|x| delta.value(a) <= delta.value(a | 1 << x)))
}

fn diversity_case(i: usize, rng: &mut ChaCha8Rng, tally: &mut Value) -> Result<(), String> {
    let n = rng.gen_range(2..=4);
    let delta = match i % 3 {
        0 => random_diameter_diversity(rng, n),
        1 => random_l1_diversity(rng, n),
        _ => {
            let edges = rng.gen_range(1..=6);
            let mut tree = random_tree(rng, edges);
            let mut names = anchor_leaves(&mut tree);
            names.truncate(5);
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let delta = phylogenetic_diversity(&tree, &refs).map_err(|e| e.to_string())?;
            let v = is_phylogenetic(&delta).map_err(|e| e.to_string())?;
            if !v.phylogenetic {
                return Err(format!("tree diversity judged non-phylogenetic: {:?}", v.witness));
            }
            if !is_arboreal(&delta).is_ok() {
                return Err("phylogenetic diversity is not arboreal".into());
            }
            bump(tally, "phylogenetic_ok");
            delta
        }
    };
    if !monotone(&delta) {
        return Err("not monotone".into());
    }
    bump(tally, "monotone");
    if i % 3 != 2 {
        let r = check_nice(&delta).map_err(|e| e.to_string())?;
        if !r.nice {
            return Err(format!("diameter or l1 diversity is not nice: {:?}", r.witness));
        }
        bump(tally, "nice");
    }
    Ok(())
}
