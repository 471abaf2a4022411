//! Finite diversities: subset tables with the diversity axioms, the induced distance `D_δ` on
//! subsets, the polyhedra `P_δ` and `P_δ^(2)` with their minimal elements, and tests for
//! arboreal and phylogenetic diversities.
//!
//! Subsets are bitmasks over the element list; bit `i` stands for element `i`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{
    check_extended_four_point, check_four_point, Certificate, CertificateKind, DistanceError, DistanceSpace,
};
use crate::exactnum::{minimize, LpError, LpOutcome, Polyhedron, Rational, Relation, Q};
use crate::realtree::{
    additive_tree_reconstruction, hull_length, hull_length_of_points, TreeError, TreePoint, WeightedTree,
};
use crate::tightspan::{in_td, PointFunction, TightSpanError};

pub type Subset = u32;

/// Default bound on the number of elements.
pub const DEFAULT_ELEMENT_CAP: usize = 5;
const HARD_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiversityError {
    #[error("{n} elements exceed the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("incomplete table: {0}")]
    IncompleteTable(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("points {0:?} and {1:?} are at distance zero")]
    NonSeparated(String, String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("diversity axioms fail: {0}")]
    AxiomViolation(Certificate),
    #[error("the subset must be non-empty")]
    EmptySubset,
    #[error("function is not in P_δ")]
    NotInP,
    #[error("function is not in T_δ")]
    NotInT,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    TightSpan(Box<TightSpanError>),
}

impl From<TightSpanError> for DiversityError {
    fn from(e: TightSpanError) -> Self {
        DiversityError::TightSpan(Box::new(e))
    }
}

/// Masks of all subsets of an `n`-set ordered by size, then lexicographically by members.
pub fn subset_order(n: usize) -> Vec<Subset> {
    let mut all: Vec<Subset> = (0..1u32 << n).collect();
    all.sort_by_key(|&m| (m.count_ones(), members(m)));
    all
}

/// Element indices of a mask, increasing.
pub fn members(m: Subset) -> Vec<usize> {
    (0..32).filter(|i| m >> i & 1 == 1).collect()
}

fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diversity {
    elements: Vec<String>,
    table: Vec<Rational>,
}

impl Diversity {
    /// Checks completeness, the size cap and the axioms. `table[m]` is the value at mask `m`.
    pub fn new(elements: Vec<String>, table: Vec<Rational>) -> Result<Diversity, DiversityError> {
        Self::with_cap(elements, table, DEFAULT_ELEMENT_CAP)
    }

    pub fn with_cap(elements: Vec<String>, table: Vec<Rational>, cap: usize) -> Result<Diversity, DiversityError> {
        check_labels(&elements, cap)?;
        let cert = check_diversity_axioms(&elements, &table)?;
        if !cert.is_ok() {
            return Err(DiversityError::AxiomViolation(cert));
        }
        Ok(Diversity { elements, table })
    }

    /// Table from a function on masks; the value at `∅` is ignored and set to zero.
    pub fn from_fn(
        elements: Vec<String>,
        cap: usize,
        mut f: impl FnMut(Subset) -> Rational,
    ) -> Result<Diversity, DiversityError> {
        check_labels(&elements, cap)?;
        let table = (0..1u32 << elements.len()).map(|m| if m == 0 { Rational::zero() } else { f(m) }).collect();
        Self::with_cap(elements, table, cap)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn full(&self) -> Subset {
        (1u32 << self.len()) - 1
    }

    pub fn value(&self, m: Subset) -> &Rational {
        &self.table[m as usize]
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    /// Mask of the given labels.
    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<Subset, DiversityError> {
        labels.iter().try_fold(0, |m, l| {
            let l = l.as_ref();
            self.elements
                .iter()
                .position(|e| e == l)
                .map(|i| m | 1 << i)
                .ok_or_else(|| DiversityError::UnknownLabel(l.to_string()))
        })
    }

    pub fn delta(&self, labels: &[&str]) -> Result<&Rational, DiversityError> {
        Ok(self.value(self.subset(labels)?))
    }

    /// `{a,b}` style label of a mask.
    pub fn subset_label(&self, m: Subset) -> String {
        subset_label(&self.elements, m)
    }
}

fn subset_label(elements: &[String], m: Subset) -> String {
    let names: Vec<&str> = members(m).into_iter().map(|i| elements[i].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

fn check_labels(elements: &[String], cap: usize) -> Result<(), DiversityError> {
    let cap = cap.min(HARD_CAP);
    if elements.len() > cap {
        return Err(DiversityError::TooLarge { n: elements.len(), cap });
    }
    for (i, e) in elements.iter().enumerate() {
        if elements[..i].contains(e) {
            return Err(DiversityError::DuplicateLabel(e.clone()));
        }
    }
    Ok(())
}

/// Checks non-negativity, axiom (i) (`δ(A) = 0` iff `|A| ≤ 1`) and axiom (ii)
/// (`δ(A∪C) ≤ δ(A∪B) + δ(B∪C)` for `B ≠ ∅`). The witness starts with `nonneg`, `i` or `ii`
/// followed by the subsets involved; for (ii) `lhs = δ(A∪C)` and `rhs` the sum.
pub fn check_diversity_axioms(elements: &[String], table: &[Rational]) -> Result<Certificate, DiversityError> {
    let n = elements.len();
    if n > HARD_CAP {
        return Err(DiversityError::TooLarge { n, cap: HARD_CAP });
    }
    if table.len() != 1 << n {
        return Err(DiversityError::IncompleteTable(format!(
            "expected {} entries, found {}",
            1usize << n,
            table.len()
        )));
    }
    let order = subset_order(n);
    let label = |m: Subset| subset_label(elements, m);
    let viol = |tag: &str, sets: &[Subset], lhs: Rational, rhs: Rational| {
        let mut w = vec![tag.to_string()];
        w.extend(sets.iter().map(|&m| label(m)));
        Certificate::violation(CertificateKind::DiversityAxiomViolation, w, lhs, rhs)
    };
    for &a in &order {
        let v = &table[a as usize];
        if v.is_negative() {
            return Ok(viol("nonneg", &[a], Rational::zero(), v.clone()));
        }
        if (a.count_ones() <= 1) != v.is_zero() {
            return Ok(viol("i", &[a], v.clone(), Rational::zero()));
        }
    }
    for &a in &order {
        for &b in order.iter().filter(|&&b| b != 0) {
            for &c in &order {
                let lhs = &table[(a | c) as usize];
                let rhs = &table[(a | b) as usize] + &table[(b | c) as usize];
                if *lhs > rhs {
                    return Ok(viol("ii", &[a, b, c], lhs.clone(), rhs));
                }
            }
        }
    }
    Ok(Certificate::ok())
}

/// `δ(A) = max { ρ(x,y) : x, y ∈ A }`.
pub fn diameter_diversity(rho: &DistanceSpace) -> Result<Diversity, DiversityError> {
    for (i, j) in rho.pairs() {
        if !rho.get(i, j).is_positive() {
            return Err(DiversityError::NonSeparated(rho.labels()[i].clone(), rho.labels()[j].clone()));
        }
    }
    Diversity::from_fn(rho.labels().to_vec(), DEFAULT_ELEMENT_CAP, |m| {
        let idx = members(m);
        let mut best = Rational::zero();
        for &i in &idx {
            for &j in &idx {
                best = best.max(rho.get(i, j).clone());
            }
        }
        best
    })
}

/// `δ(A) = Σ_k max { |x_k − y_k| : x, y ∈ A }`.
pub fn l1_diversity(labels: Vec<String>, points: &[Vec<Rational>]) -> Result<Diversity, DiversityError> {
    if labels.len() != points.len() {
        return Err(DiversityError::DimensionMismatch { expected: labels.len(), found: points.len() });
    }
    let dim = points.first().map_or(0, Vec::len);
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(DiversityError::DimensionMismatch { expected: dim, found: p.len() });
    }
    for i in 0..points.len() {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(DiversityError::NonSeparated(labels[j].clone(), labels[i].clone()));
            }
        }
    }
    Diversity::from_fn(labels, DEFAULT_ELEMENT_CAP, |m| {
        let idx = members(m);
        (0..dim)
            .map(|k| {
                let lo = idx.iter().map(|&i| &points[i][k]).min().expect("non-empty");
                let hi = idx.iter().map(|&i| &points[i][k]).max().expect("non-empty");
                hi - lo
            })
            .fold(Rational::zero(), |acc, v| acc + v)
    })
}

/// `δ(A)` is the length of the convex hull of the anchors named in `A`.
pub fn phylogenetic_diversity(tree: &WeightedTree, labels: &[&str]) -> Result<Diversity, DiversityError> {
    let points: Vec<TreePoint> = labels.iter().map(|l| tree.anchor(l).cloned()).collect::<Result<_, _>>()?;
    let elements: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    check_labels(&elements, DEFAULT_ELEMENT_CAP)?;
    let mut table = Vec::with_capacity(1 << labels.len());
    for m in 0..1u32 << labels.len() {
        let pts: Vec<TreePoint> = members(m).into_iter().map(|i| points[i].clone()).collect();
        table.push(hull_length_of_points(tree, &pts)?);
    }
    Diversity::new(elements, table)
}

/// `D_δ(A, B) = max { δ(A∪B) − δ(A) − δ(B), 0 }` on all subsets, labelled in
/// [`subset_order`].
pub fn d_delta(delta: &Diversity) -> DistanceSpace {
    let order = subset_order(delta.len());
    let labels = order.iter().map(|&m| delta.subset_label(m)).collect();
    DistanceSpace::from_fn(labels, |i, j| {
        let (a, b) = (order[i], order[j]);
        let v = delta.value(a | b) - delta.value(a) - delta.value(b);
        v.max(Rational::zero())
    })
    .expect("D_δ is a valid distance")
}

/// A function on all subsets, indexed by mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetFunction(pub Vec<Rational>);

impl SubsetFunction {
    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, m: Subset) -> &Rational {
        &self.0[m as usize]
    }

    /// Values listed in [`subset_order`], matching the labels of [`d_delta`].
    pub fn to_point_function(&self) -> PointFunction {
        let n = self.0.len().trailing_zeros() as usize;
        PointFunction::new(subset_order(n).into_iter().map(|m| self.0[m as usize].clone()).collect())
    }

    /// Inverse of [`SubsetFunction::to_point_function`].
    pub fn from_point_function(f: &PointFunction) -> SubsetFunction {
        let n = f.len().trailing_zeros() as usize;
        let mut v = vec![Rational::zero(); f.len()];
        for (k, m) in subset_order(n).into_iter().enumerate() {
            v[m as usize] = f[k].clone();
        }
        SubsetFunction(v)
    }

    pub fn labelled(&self, delta: &Diversity) -> Vec<(String, Q)> {
        subset_order(delta.len()).into_iter().map(|m| (delta.subset_label(m), Q(self.get(m).clone()))).collect()
    }
}

fn check_fn(delta: &Diversity, f: &SubsetFunction) -> Result<(), DiversityError> {
    if f.0.len() != delta.table.len() {
        return Err(DiversityError::IncompleteTable(format!(
            "expected {} values, found {}",
            delta.table.len(),
            f.0.len()
        )));
    }
    Ok(())
}

/// Collections of non-empty subsets in which no member lies inside the union of the others,
/// as lists of masks.
pub fn irredundant_collections(n: usize) -> Vec<Vec<Subset>> {
    fn rec(start: Subset, end: Subset, cur: &mut Vec<Subset>, out: &mut Vec<Vec<Subset>>) {
        for c in start..end {
            let ok = {
                let union_others = |skip: usize, extra: Subset| {
                    cur.iter().enumerate().filter(|&(k, _)| k != skip).fold(extra, |u, (_, &m)| u | m)
                };
                !is_subset(c, union_others(usize::MAX, 0))
                    && (0..cur.len()).all(|k| !is_subset(cur[k], union_others(k, c)))
            };
            if ok {
                cur.push(c);
                out.push(cur.clone());
                rec(c + 1, end, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(1, 1 << n, &mut Vec::new(), &mut out);
    out.sort_by_key(|c| c.len());
    out
}

fn union(c: &[Subset]) -> Subset {
    c.iter().fold(0, |u, m| u | m)
}

/// `f(∅) = 0`, `f(A) ≥ δ(A)` and `f(A) + f(B) ≥ δ(A∪B)` for all non-empty `A`, `B`.
pub fn in_p2(delta: &Diversity, f: &SubsetFunction) -> Result<bool, DiversityError> {
    check_fn(delta, f)?;
    let size = 1u32 << delta.len();
    Ok(f.get(0).is_zero()
        && (1..size).all(|a| f.get(a) >= delta.value(a))
        && (1..size).all(|a| (a + 1..size).all(|b| f.get(a) + f.get(b) >= *delta.value(a | b))))
}

/// `f(∅) = 0` and `Σ_{C∈𝒞} f(C) ≥ δ(⋃𝒞)` for every irredundant collection `𝒞`.
pub fn in_p_delta(delta: &Diversity, f: &SubsetFunction) -> Result<bool, DiversityError> {
    check_fn(delta, f)?;
    Ok(f.get(0).is_zero()
        && irredundant_collections(delta.len())
            .iter()
            .all(|c| c.iter().fold(Rational::zero(), |s, &m| s + f.get(m)) >= *delta.value(union(c))))
}

/// `P_δ` over the variables `f(m)`, `m = 1, …, 2^n − 1` (variable `m − 1`).
pub fn p_delta_polyhedron(delta: &Diversity) -> Polyhedron {
    let dim = (1usize << delta.len()) - 1;
    let mut p = Polyhedron::new(dim);
    for c in irredundant_collections(delta.len()) {
        let coeffs: Vec<(usize, Rational)> = c.iter().map(|&m| (m as usize - 1, Rational::one())).collect();
        p.add_sparse(&coeffs, Relation::Ge, delta.value(union(&c)).clone()).expect("indices in range");
    }
    p
}

/// `P_δ^(2)` over the same variables. Pairs `A ⊆ B` are implied by `f(B) ≥ δ(B)` and skipped.
pub fn p2_polyhedron(delta: &Diversity) -> Polyhedron {
    let size = 1u32 << delta.len();
    let mut p = Polyhedron::new(size as usize - 1);
    let one = Rational::one();
    for a in 1..size {
        p.add_sparse(&[(a as usize - 1, one.clone())], Relation::Ge, delta.value(a).clone()).expect("indices in range");
        for b in a + 1..size {
            if !is_subset(a, b) && !is_subset(b, a) {
                p.add_sparse(
                    &[(a as usize - 1, one.clone()), (b as usize - 1, one.clone())],
                    Relation::Ge,
                    delta.value(a | b).clone(),
                )
                .expect("indices in range");
            }
        }
    }
    p
}

fn to_vars(f: &SubsetFunction) -> Vec<Rational> {
    f.0[1..].to_vec()
}

fn from_vars(v: Vec<Rational>) -> SubsetFunction {
    let mut out = vec![Rational::zero()];
    out.extend(v);
    SubsetFunction(out)
}

fn minimal_below(p: &Polyhedron, f: &SubsetFunction) -> Result<Rational, DiversityError> {
    let mut q = p.clone();
    for (k, v) in to_vars(f).into_iter().enumerate() {
        q.add_sparse(&[(k, Rational::one())], Relation::Le, v)?;
    }
    match minimize(&q, vec![Rational::one(); p.dim()])? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        _ => Err(DiversityError::NotInP),
    }
}

fn sum(f: &SubsetFunction) -> Rational {
    f.0.iter().fold(Rational::zero(), |s, v| s + v)
}

/// Minimal elements of `P_δ`: `f ∈ P_δ` and no `g ∈ P_δ` with `g ≼ f`, `g ≠ f`.
pub fn in_t_delta(delta: &Diversity, f: &SubsetFunction) -> Result<bool, DiversityError> {
    if !in_p_delta(delta, f)? {
        return Ok(false);
    }
    Ok(minimal_below(&p_delta_polyhedron(delta), f)? == sum(f))
}

/// Minimal elements of `P_δ^(2)`.
pub fn in_t2(delta: &Diversity, f: &SubsetFunction) -> Result<bool, DiversityError> {
    if !in_p2(delta, f)? {
        return Ok(false);
    }
    Ok(minimal_below(&p2_polyhedron(delta), f)? == sum(f))
}

/// A minimal element of `P_δ` below `f0`, minimizing `Σ w(A) g(A)` for positive weights
/// (all ones when `weights` is `None`).
pub fn retract_to_t_delta(
    delta: &Diversity,
    f0: &SubsetFunction,
    weights: Option<&[Rational]>,
) -> Result<SubsetFunction, DiversityError> {
    if !in_p_delta(delta, f0)? {
        return Err(DiversityError::NotInP);
    }
    let mut p = p_delta_polyhedron(delta);
    for (k, v) in to_vars(f0).into_iter().enumerate() {
        p.add_sparse(&[(k, Rational::one())], Relation::Le, v)?;
    }
    let w = match weights {
        Some(w) if w.len() == p.dim() && w.iter().all(Signed::is_positive) => w.to_vec(),
        Some(w) => return Err(DiversityError::DimensionMismatch { expected: p.dim(), found: w.len() }),
        None => vec![Rational::one(); p.dim()],
    };
    match minimize(&p, w)? {
        LpOutcome::Optimal { point, .. } => Ok(from_vars(point)),
        _ => Err(DiversityError::NotInP),
    }
}

/// `g_x(A) = δ(A ∪ {x})`.
pub fn g_map(delta: &Diversity, x: &str) -> Result<SubsetFunction, DiversityError> {
    let xm = delta.subset(&[x])?;
    Ok(SubsetFunction((0..1u32 << delta.len()).map(|a| delta.value(a | xm).clone()).collect()))
}

/// `δ_T(F) = max_𝒞 { δ(⋃𝒞) − Σ_{C∈𝒞} min_{f∈F} f(C) }` over irredundant collections, with the
/// empty collection contributing 0. Members of `F` are checked to lie in `T_δ`.
pub fn delta_t(delta: &Diversity, fs: &[SubsetFunction]) -> Result<Rational, DiversityError> {
    for f in fs {
        if !in_t_delta(delta, f)? {
            return Err(DiversityError::NotInT);
        }
    }
    Ok(delta_t_unchecked(delta, fs))
}

pub fn delta_t_unchecked(delta: &Diversity, fs: &[SubsetFunction]) -> Rational {
    if fs.is_empty() {
        return Rational::zero();
    }
    let size = 1usize << delta.len();
    let low: Vec<Rational> = (0..size).map(|m| fs.iter().map(|f| f.0[m].clone()).min().expect("non-empty")).collect();
    irredundant_collections(delta.len())
        .iter()
        .map(|c| delta.value(union(c)) - c.iter().fold(Rational::zero(), |s, &m| s + &low[m as usize]))
        .fold(Rational::zero(), Rational::max)
}

/// `f − δ` as a point function over the labels of [`d_delta`]; lies in `T_{D_δ}` for
/// `f ∈ T_δ`, which is checked.
pub fn embed_into_td(delta: &Diversity, f: &SubsetFunction) -> Result<PointFunction, DiversityError> {
    if !in_t_delta(delta, f)? {
        return Err(DiversityError::NotInT);
    }
    let g = SubsetFunction(f.0.iter().zip(&delta.table).map(|(a, b)| a - b).collect()).to_point_function();
    if !in_td(&d_delta(delta), &g)? {
        return Err(DiversityError::NotInT);
    }
    Ok(g)
}

/// A collection whose constraint `Σ f(C) ≥ δ(⋃𝒞)` fails at a point of `P_δ^(2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceWitness {
    pub collection: Vec<String>,
    pub point: SubsetFunction,
    pub sum: Rational,
    pub required: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceReport {
    pub nice: bool,
    pub witness: Option<NiceWitness>,
}

/// Decides `P_δ = P_δ^(2)`: for each irredundant collection of three or more sets, minimizes
/// its left-hand side over `P_δ^(2)`. A shortfall comes with the minimizing vertex.
pub fn check_nice(delta: &Diversity) -> Result<NiceReport, DiversityError> {
    let p2 = p2_polyhedron(delta);
    for c in irredundant_collections(delta.len()).into_iter().filter(|c| c.len() >= 3) {
        let mut obj = vec![Rational::zero(); p2.dim()];
        for &m in &c {
            obj[m as usize - 1] = Rational::one();
        }
        let (value, point) = minimize(&p2, obj)?.optimal().expect("P_δ^(2) is non-empty and bounded below by zero");
        let required = delta.value(union(&c)).clone();
        if value < required {
            return Ok(NiceReport {
                nice: false,
                witness: Some(NiceWitness {
                    collection: c.iter().map(|&m| delta.subset_label(m)).collect(),
                    point: from_vars(point),
                    sum: value,
                    required,
                }),
            });
        }
    }
    Ok(NiceReport { nice: true, witness: None })
}

/// Extended four-point condition of `D_δ`.
pub fn is_arboreal(delta: &Diversity) -> Certificate {
    check_extended_four_point(&d_delta(delta))
}

/// `B_A = { x : δ(A ∪ {x}) ≤ δ(A) }`.
pub fn b_set(delta: &Diversity, a: Subset) -> Result<Subset, DiversityError> {
    if a == 0 {
        return Err(DiversityError::EmptySubset);
    }
    Ok((0..delta.len()).filter(|&x| delta.value(a | 1 << x) <= delta.value(a)).fold(0, |b, x| b | 1 << x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PhyloWitness {
    /// The pair distances are not a tree metric.
    FourPoint { certificate: Certificate },
    /// `δ(A)` differs from the hull length of `A` in the realizing tree.
    Subset { subset: String, delta: Q, hull: Q },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhyloVerdict {
    pub phylogenetic: bool,
    pub witness: Option<PhyloWitness>,
    pub tree: Option<WeightedTree>,
}

/// Realizes the pair distances `δ({x,y})` as a tree and compares every `δ(A)` with the hull
/// length of `A` in it.
pub fn is_phylogenetic(delta: &Diversity) -> Result<PhyloVerdict, DiversityError> {
    let pair = DistanceSpace::from_fn(delta.elements.clone(), |i, j| delta.value(1 << i | 1 << j).clone())?;
    let cert = check_four_point(&pair);
    if !cert.is_ok() {
        return Ok(PhyloVerdict {
            phylogenetic: false,
            witness: Some(PhyloWitness::FourPoint { certificate: cert }),
            tree: None,
        });
    }
    let tree = additive_tree_reconstruction(&pair)?;
    for m in subset_order(delta.len()) {
        let names: Vec<&str> = members(m).into_iter().map(|i| delta.elements[i].as_str()).collect();
        let hull = hull_length(&tree, &names)?;
        if hull != *delta.value(m) {
            return Ok(PhyloVerdict {
                phylogenetic: false,
                witness: Some(PhyloWitness::Subset {
                    subset: delta.subset_label(m),
                    delta: Q(delta.value(m).clone()),
                    hull: Q(hull),
                }),
                tree: Some(tree),
            });
        }
    }
    Ok(PhyloVerdict { phylogenetic: true, witness: None, tree: Some(tree) })
}

/// On-disk form: `{"elements": [...], "delta": {"a,b": "4", ...}}`. Keys are comma-joined
/// labels in any order; the empty key is optional and must map to 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiversityJson {
    pub elements: Vec<String>,
    pub delta: BTreeMap<String, Q>,
}

impl TryFrom<DiversityJson> for Diversity {
    type Error = DiversityError;
    fn try_from(j: DiversityJson) -> Result<Self, DiversityError> {
        diversity_from_keys(j.elements, j.delta)
    }
}

impl Serialize for Diversity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let delta = (1..1u32 << self.len())
            .map(|m| {
                let key: Vec<&str> = members(m).into_iter().map(|i| self.elements[i].as_str()).collect();
                (key.join(","), Q(self.value(m).clone()))
            })
            .collect();
        DiversityJson { elements: self.elements.clone(), delta }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Diversity {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = DiversityJson::deserialize(de)?;
        diversity_from_keys(j.elements, j.delta).map_err(serde::de::Error::custom)
    }
}

fn diversity_from_keys(elements: Vec<String>, delta: BTreeMap<String, Q>) -> Result<Diversity, DiversityError> {
    check_labels(&elements, DEFAULT_ELEMENT_CAP)?;
    let n = elements.len();
    let mut table: Vec<Option<Rational>> = vec![None; 1 << n];
    table[0] = Some(Rational::zero());
    for (key, Q(v)) in delta {
        let mut m: Subset = 0;
        for part in key.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let i = elements
                .iter()
                .position(|e| e == part)
                .ok_or_else(|| DiversityError::UnknownLabel(part.to_string()))?;
            m |= 1 << i;
        }
        if m == 0 {
            if !v.is_zero() {
                return Err(DiversityError::IncompleteTable("the empty set must have value 0".into()));
            }
            continue;
        }
        if table[m as usize].replace(v).is_some() {
            return Err(DiversityError::IncompleteTable(format!("subset {key:?} given twice")));
        }
    }
    let table = table
        .into_iter()
        .enumerate()
        .map(|(m, v)| {
            v.ok_or_else(|| {
                DiversityError::IncompleteTable(format!("missing {}", subset_label(&elements, m as Subset)))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Diversity::new(elements, table)
}
