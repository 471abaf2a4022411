use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::reconstruct::additive_tree_reconstruction;
use super::subtree::{hull_subtree, subtree_distance_unchecked, Subtree, SubtreeJson};
use super::tree::{TreeJson, TreePoint, WeightedTree};
use super::TreeError;
use crate::distance::{check_extended_four_point, Certificate, CertificateKind, DistanceSpace};
use crate::exactnum::Rational;
use crate::tightspan::{d_inf, d_inf_by_formula, geodesic_point_unchecked, retract_to_td, PointFunction};

/// A tree together with one closed subtree per label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeRepresentation {
    pub tree: WeightedTree,
    pub labels: Vec<String>,
    pub subtrees: Vec<Subtree>,
}

impl SubtreeRepresentation {
    pub fn new(tree: WeightedTree, labels: Vec<String>, subtrees: Vec<Subtree>) -> Result<Self, TreeError> {
        if labels.len() != subtrees.len() {
            return Err(TreeError::LabelMismatch);
        }
        if labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
            return Err(TreeError::InvalidSubtree("duplicate label".into()));
        }
        for s in &subtrees {
            s.validate(&tree)?;
        }
        Ok(SubtreeRepresentation { tree, labels, subtrees })
    }

    pub fn subtree(&self, label: &str) -> Option<&Subtree> {
        self.labels.iter().position(|l| l == label).map(|i| &self.subtrees[i])
    }

    /// Pairwise subtree distances as a distance space.
    pub fn induced_distance(&self) -> Result<DistanceSpace, TreeError> {
        let s = &self.subtrees;
        let t = &self.tree;
        Ok(DistanceSpace::from_fn(self.labels.clone(), |i, j| subtree_distance_unchecked(t, &s[i], &s[j]))?)
    }
}

/// The points of the tight span behind a constructed representation. Anchor `g{i}` of the tree
/// is `points[i]`. `gates[x]` lists the points spanning `S_x`: the gates `f_(x,y,0)` and, for
/// each `y` with `d(x,y) = 0`, a common point of `κ(x)` and `κ(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSkeleton {
    pub points: Vec<PointFunction>,
    pub gates: Vec<Vec<usize>>,
    /// Index of `f_(x,y,0)` for each ordered pair with `d(x,y) > 0`.
    pub pair_gate: BTreeMap<(usize, usize), usize>,
}

impl GateSkeleton {
    pub fn anchor_name(i: usize) -> String {
        format!("g{i}")
    }
}

/// Builds a subtree representation of a distance satisfying the extended four-point
/// condition from the gate points of its tight span, then checks it.
pub fn build_subtree_representation(d: &DistanceSpace) -> Result<SubtreeRepresentation, TreeError> {
    build_with_gates(d).map(|(rep, _)| rep)
}

/// [`build_subtree_representation`] also returning the gate points.
pub fn build_with_gates(d: &DistanceSpace) -> Result<(SubtreeRepresentation, GateSkeleton), TreeError> {
    let cert = check_extended_four_point(d);
    if !cert.is_ok() {
        return Err(TreeError::NotExtFourPoint(cert));
    }
    let n = d.len();
    let labels = d.labels().to_vec();
    if d.is_null() {
        let rep =
            SubtreeRepresentation { tree: WeightedTree::point(), labels, subtrees: vec![Subtree::from_vertex(0); n] };
        let skel = GateSkeleton { points: Vec::new(), gates: vec![Vec::new(); n], pair_gate: BTreeMap::new() };
        return Ok((rep, skel));
    }

    let mut index: BTreeMap<Vec<Rational>, usize> = BTreeMap::new();
    let mut points: Vec<PointFunction> = Vec::new();
    let mut gates: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pair_gate = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            if !d.get(x, y).is_positive() {
                continue;
            }
            let f = geodesic_point_unchecked(d, x, y, &Rational::zero())?.into_function();
            let k = *index.entry(f.values().to_vec()).or_insert_with(|| {
                points.push(f);
                points.len() - 1
            });
            if !gates[x].contains(&k) {
                gates[x].push(k);
            }
            pair_gate.insert((x, y), k);
        }
    }
    // Hulls of gates alone can miss each other when d(x,y) = 0; add a common point of κ(x) and κ(y).
    for (x, y) in d.pairs() {
        if !d.get(x, y).is_zero() || gates[x].is_empty() || gates[y].is_empty() {
            continue;
        }
        let f = retract_to_td(d, &meeting_bound(d, x, y))?.into_function();
        let k = *index.entry(f.values().to_vec()).or_insert_with(|| {
            points.push(f);
            points.len() - 1
        });
        for z in [x, y] {
            if !gates[z].contains(&k) {
                gates[z].push(k);
            }
        }
    }

    let names: Vec<String> = (0..points.len()).map(GateSkeleton::anchor_name).collect();
    let mut err = None;
    let gate_metric = DistanceSpace::from_fn(names, |i, j| {
        let v = d_inf_by_formula(d, &points[i], &points[j]);
        debug_assert_eq!(v.as_ref().ok(), d_inf(&points[i], &points[j]).as_ref().ok());
        v.unwrap_or_else(|e| {
            err = Some(e);
            Rational::zero()
        })
    })?;
    if let Some(e) = err {
        return Err(e.into());
    }
    let tree = additive_tree_reconstruction(&gate_metric)?;

    let mut subtrees = Vec::with_capacity(n);
    for g in &gates {
        if g.is_empty() {
            subtrees.push(tree.whole());
        } else {
            let pts: Vec<TreePoint> =
                g.iter().map(|&k| tree.anchor(&GateSkeleton::anchor_name(k)).cloned()).collect::<Result<_, _>>()?;
            subtrees.push(hull_subtree(&tree, &pts)?);
        }
    }
    let rep = SubtreeRepresentation { tree, labels, subtrees };
    let check = verify_subtree_representation(&rep, d)?;
    if !check.is_ok() {
        return Err(TreeError::VerificationFailed(check));
    }
    Ok((rep, GateSkeleton { points, gates, pair_gate }))
}

/// A point of `P_d` vanishing at `x` and `y` (which are at distance zero).
fn meeting_bound(d: &DistanceSpace, x: usize, y: usize) -> PointFunction {
    PointFunction::new(
        (0..d.len())
            .map(|z| {
                if z == x || z == y {
                    Rational::zero()
                } else {
                    let ecc = d.row(z).iter().max().cloned().unwrap_or_else(Rational::zero);
                    ecc.max(d.get(x, z).clone()).max(d.get(y, z).clone())
                }
            })
            .collect(),
    )
}

/// Compares subtree distances with `d` pair by pair. A mismatch is reported with
/// `lhs` the represented distance and `rhs` the value of `d`.
pub fn verify_subtree_representation(rep: &SubtreeRepresentation, d: &DistanceSpace) -> Result<Certificate, TreeError> {
    if rep.labels != d.labels() {
        return Err(TreeError::LabelMismatch);
    }
    for s in &rep.subtrees {
        s.validate(&rep.tree)?;
    }
    for (i, j) in d.pairs() {
        let got = subtree_distance_unchecked(&rep.tree, &rep.subtrees[i], &rep.subtrees[j]);
        if got != *d.get(i, j) {
            return Ok(Certificate::violation(
                CertificateKind::RepresentationMismatch,
                vec![d.labels()[i].clone(), d.labels()[j].clone()],
                got,
                d.get(i, j).clone(),
            ));
        }
    }
    Ok(Certificate::ok())
}

#[derive(Serialize, Deserialize)]
struct RepresentationJson {
    vertices: Vec<usize>,
    edges: Vec<super::tree::EdgeJson>,
    #[serde(default)]
    anchors: BTreeMap<String, TreePoint>,
    subtrees: Vec<SubtreeJson>,
}

impl Serialize for SubtreeRepresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let t = TreeJson::from(&self.tree);
        RepresentationJson {
            vertices: t.vertices,
            edges: t.edges,
            anchors: t.anchors,
            subtrees: self.labels.iter().zip(&self.subtrees).map(|(l, s)| SubtreeJson::new(l, s)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubtreeRepresentation {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = RepresentationJson::deserialize(de)?;
        let tree = WeightedTree::try_from(TreeJson { vertices: j.vertices, edges: j.edges, anchors: j.anchors })
            .map_err(serde::de::Error::custom)?;
        let (labels, subtrees) = j.subtrees.into_iter().map(SubtreeJson::into_subtree).unzip();
        SubtreeRepresentation::new(tree, labels, subtrees).map_err(serde::de::Error::custom)
    }
}
