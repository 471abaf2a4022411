use num_traits::{Signed, Zero};

use super::tree::{TreePoint, VertexId, WeightedTree};
use super::TreeError;
use crate::distance::{check_four_point, DistanceSpace};
use crate::exactnum::{half, Rational};

/// Realizes a tree metric as a weighted tree with one vertex anchor per label.
///
/// Labels are inserted in order. Each new label hangs off the span of the earlier ones at the
/// point minimizing the Gromov product, and the result is checked after every insertion.
pub fn additive_tree_reconstruction(rho: &DistanceSpace) -> Result<WeightedTree, TreeError> {
    let n = rho.len();
    let labels = rho.labels();
    let mut tree = WeightedTree::point();
    let mut at: Vec<VertexId> = vec![0];
    let fail = || {
        let c = check_four_point(rho);
        if c.is_ok() {
            // Four-point holds but the insertion still went wrong: report the broken pair.
            TreeError::VerificationFailed(c)
        } else {
            TreeError::NotAdditive(c)
        }
    };
    for c in 1..n {
        if let Some(i) = (0..c).find(|&i| rho.get(c, i).is_zero()) {
            at.push(at[i]);
        } else {
            let mut best: Option<(Rational, usize, usize)> = None;
            for i in 0..c {
                for j in i..c {
                    let l = half(&(rho.get(c, i) + rho.get(c, j) - rho.get(i, j)));
                    if best.as_ref().is_none_or(|b| l < b.0) {
                        best = Some((l, i, j));
                    }
                }
            }
            let (pendant, i, j) = best.expect("at least one earlier label");
            if pendant.is_negative() {
                return Err(fail());
            }
            let along = rho.get(c, i) - &pendant;
            let (ai, aj) = (at[i], at[j]);
            if along.is_negative() || along > *rho.get(i, j) {
                return Err(fail());
            }
            let base = match tree.point_along(ai, aj, &along).map_err(|_| fail())? {
                TreePoint::Vertex { vertex } => vertex,
                TreePoint::OnEdge { edge, offset } => tree.split_edge(edge, &offset.0),
            };
            let v = if pendant.is_zero() {
                base
            } else {
                let v = tree.push_vertex();
                tree.push_edge(base, v, pendant);
                v
            };
            at.push(v);
        }
        let dist = tree.distances_from(at[c]);
        if (0..c).any(|i| dist[at[i]] != *rho.get(c, i)) {
            return Err(fail());
        }
    }
    for (i, label) in labels.iter().enumerate() {
        tree.add_anchor(label, TreePoint::vertex(at[i]))?;
    }
    Ok(tree)
}
