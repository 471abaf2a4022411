use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::representation::SubtreeRepresentation;
use super::subtree::{Segment, Subtree};
use super::tree::{TreePoint, WeightedTree};
use crate::distance::DistanceSpace;
use crate::exactnum::{frac, zero, Rational};

/// Random tree on `edges + 1` vertices; vertex `i > 0` hangs off a uniformly chosen earlier
/// vertex. Lengths are drawn from `{1/2, 1, 3/2, ..., 3}`.
pub fn random_tree<R: Rng>(rng: &mut R, edges: usize) -> WeightedTree {
    let list = (1..=edges).map(|v| (rng.gen_range(0..v), v, random_length(rng))).collect();
    WeightedTree::new(edges + 1, list).expect("positive lengths on a tree")
}

fn random_length<R: Rng>(rng: &mut R) -> Rational {
    frac(rng.gen_range(1..=6), 2)
}

fn random_subtree<R: Rng>(rng: &mut R, tree: &WeightedTree) -> Subtree {
    let n = tree.vertex_count();
    if tree.edges().is_empty() {
        return Subtree::from_vertex(0);
    }
    // A piece of a single edge, possibly a single point.
    if rng.gen_ratio(1, 8) {
        let e = rng.gen_range(0..tree.edges().len());
        let len = &tree.edge(e).length;
        let a = len * frac(rng.gen_range(0..=4), 4);
        let b = len * frac(rng.gen_range(0..=4), 4);
        let (from, to) = if a <= b { (a, b) } else { (b, a) };
        return Subtree { vertices: BTreeSet::new(), segments: vec![Segment::new(e, from, to)] };
    }
    let start = rng.gen_range(0..n);
    let mut verts = BTreeSet::from([start]);
    for _ in 0..rng.gen_range(0..4) {
        let frontier: Vec<usize> = verts
            .iter()
            .flat_map(|&v| tree.neighbors(v).iter().map(|&(w, _)| w))
            .filter(|w| !verts.contains(w))
            .collect();
        match frontier.choose(rng) {
            Some(&w) => {
                verts.insert(w);
            }
            None => break,
        }
    }
    let mut segments: Vec<Segment> = tree
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| verts.contains(&e.a) && verts.contains(&e.b))
        .map(|(i, e)| Segment::new(i, zero(), e.length.clone()))
        .collect();
    if rng.gen_ratio(1, 3) {
        let leaving: Vec<(usize, bool)> = tree
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| verts.contains(&e.a) != verts.contains(&e.b))
            .map(|(i, e)| (i, verts.contains(&e.a)))
            .collect();
        if let Some(&(e, from_a)) = leaving.choose(rng) {
            let len = &tree.edge(e).length;
            let part = len * frac(rng.gen_range(1..=3), 4);
            segments.push(if from_a {
                Segment::new(e, zero(), part)
            } else {
                Segment::new(e, len - part, len.clone())
            });
        }
    }
    Subtree { vertices: verts, segments }
}

/// Random tree with `tree_size` edges and `n_points` random connected subtrees labelled
/// `s0, s1, ...`, together with the distance they induce.
pub fn random_subtree_distance(seed: u64, n_points: usize, tree_size: usize) -> (DistanceSpace, SubtreeRepresentation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = random_tree(&mut rng, tree_size);
    let mut subtrees: Vec<Subtree> = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        if !subtrees.is_empty() && rng.gen_ratio(1, 8) {
            let copy = subtrees.choose(&mut rng).expect("non-empty").clone();
            subtrees.push(copy);
        } else {
            subtrees.push(random_subtree(&mut rng, &tree));
        }
    }
    let labels: Vec<String> = (0..n_points).map(|i| format!("s{i}")).collect();
    let rep = SubtreeRepresentation::new(tree, labels, subtrees).expect("generated subtrees are valid");
    let d = rep.induced_distance().expect("labels are distinct");
    (d, rep)
}

/// Anchors every leaf of `tree` as `l0, l1, ...` in vertex order and returns the names.
pub fn anchor_leaves(tree: &mut WeightedTree) -> Vec<String> {
    let leaves: Vec<usize> = (0..tree.vertex_count()).filter(|&v| tree.degree(v) <= 1).collect();
    leaves
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let name = format!("l{i}");
            tree.add_anchor(&name, TreePoint::vertex(v)).expect("vertex exists");
            name
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{check_extended_four_point, check_four_point};
    use crate::realtree::{additive_tree_reconstruction, hull_length, verify_subtree_representation};

    #[test]
    fn induced_distance_is_ext_four_point() {
        for seed in 0..30 {
            let (d, rep) = random_subtree_distance(seed, 5, 8);
            assert!(check_extended_four_point(&d).is_ok(), "seed {seed}");
            assert!(verify_subtree_representation(&rep, &d).unwrap().is_ok());
        }
    }

    #[test]
    fn leaf_singletons_give_leaf_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut tree = random_tree(&mut rng, 7);
        let names = anchor_leaves(&mut tree);
        let d =
            DistanceSpace::from_fn(names.clone(), |i, j| tree.tree_distance(&names[i], &names[j]).unwrap()).unwrap();
        assert!(check_four_point(&d).is_ok());
        let back = additive_tree_reconstruction(&d).unwrap();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        assert_eq!(back.total_length(), hull_length(&tree, &refs).unwrap());
    }

    #[test]
    fn identical_subtrees_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let tree = random_tree(&mut rng, 5);
        let s = random_subtree(&mut rng, &tree);
        let rep = SubtreeRepresentation::new(tree, vec!["a".into(), "b".into()], vec![s.clone(), s]).unwrap();
        assert_eq!(*rep.induced_distance().unwrap().get(0, 1), zero());
    }
}
