//! Points of `P_d` and the tight span `T_d` of a finite distance space.
//!
//! `P_d = { f : f(x) + f(y) ≥ d(x,y) for all x, y }` and `T_d` is its set of pointwise-minimal
//! elements; at finite `X`, `f ∈ T_d` iff `f(x) = max_y (d(x,y) - f(y))` for every `x`.

use std::fmt;
use std::ops::Index;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{check_extended_four_point, Certificate, DistanceError, DistanceSpace};
use crate::domination::{kuratowski, pin_pair, some_dominating_metric, DominationError};
use crate::exactnum::linalg::{null_space, solve, Solution};
use crate::exactnum::{
    dominated_by, int, minimize, pow2_inv, sup_distance, LpError, LpOutcome, Polyhedron, Rational, Relation, Q,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TightSpanError {
    #[error("dimension mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("function is not in P_d")]
    NotInPd,
    #[error("function is not in the tight span")]
    NotInTightSpan,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("extended four-point condition fails: {0}")]
    NotExtFourPoint(Certificate),
    #[error("tight-span point is not unique for the requested coordinates")]
    NonUniqueDetected,
    #[error("no convergence within {0} iterations")]
    IterationCapExceeded(usize),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

impl From<DominationError> for TightSpanError {
    fn from(e: DominationError) -> Self {
        TightSpanError::ConstructionFailed(e.to_string())
    }
}

/// Real-valued function on the points of a distance space, indexed like its labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointFunction(Vec<Rational>);

impl PointFunction {
    pub fn new(values: Vec<Rational>) -> Self {
        PointFunction(values)
    }

    pub fn from_ints(values: &[i64]) -> Self {
        PointFunction(values.iter().map(|&v| int(v)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        PointFunction(vec![Rational::zero(); n])
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ≼ other` pointwise.
    pub fn dominated_by(&self, other: &PointFunction) -> bool {
        dominated_by(&self.0, &other.0)
    }

    /// `(1 - s) self + s other`.
    pub fn lerp(&self, other: &PointFunction, s: &Rational) -> PointFunction {
        PointFunction(self.0.iter().zip(&other.0).map(|(a, b)| a + s * (b - a)).collect())
    }
}

impl Index<usize> for PointFunction {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Display for PointFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(|q| q.to_string()).collect();
        write!(f, "[{}]", v.join(", "))
    }
}

impl Serialize for PointFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Q> = self.0.iter().cloned().map(Q).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<Q>::deserialize(d)?;
        Ok(PointFunction(v.into_iter().map(|q| q.0).collect()))
    }
}

/// A verified element of `T_d` together with, for each point `x`, the points attaining
/// `max_y (d(x,y) - f(y))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightSpanPoint {
    function: PointFunction,
    support: Vec<Vec<usize>>,
}

impl TightSpanPoint {
    pub fn new(d: &DistanceSpace, f: PointFunction) -> Result<Self, TightSpanError> {
        if !in_td(d, &f)? {
            return Err(TightSpanError::NotInTightSpan);
        }
        let support = support_sets(d, &f);
        Ok(TightSpanPoint { function: f, support })
    }

    pub fn function(&self) -> &PointFunction {
        &self.function
    }

    pub fn into_function(self) -> PointFunction {
        self.function
    }

    /// Support of each point, as indices into the label list.
    pub fn support(&self) -> &[Vec<usize>] {
        &self.support
    }

    pub fn support_labels(&self, d: &DistanceSpace) -> Vec<Vec<String>> {
        self.support.iter().map(|s| s.iter().map(|&i| d.labels()[i].clone()).collect()).collect()
    }
}

fn support_sets(d: &DistanceSpace, f: &PointFunction) -> Vec<Vec<usize>> {
    let sharp = sharp_values(d, f);
    (0..d.len()).map(|x| (0..d.len()).filter(|&y| d.get(x, y) - &f[y] == sharp[x]).collect()).collect()
}

fn check_len(d: &DistanceSpace, f: &PointFunction) -> Result<(), TightSpanError> {
    if f.len() != d.len() {
        return Err(TightSpanError::DimensionMismatch { expected: d.len(), found: f.len() });
    }
    Ok(())
}

fn sharp_values(d: &DistanceSpace, f: &PointFunction) -> Vec<Rational> {
    (0..d.len()).map(|x| (0..d.len()).map(|y| d.get(x, y) - &f[y]).max().expect("non-empty space")).collect()
}

/// `f(x) + f(y) ≥ d(x,y)` for all pairs including `x = y`.
pub fn in_pd(d: &DistanceSpace, f: &PointFunction) -> Result<bool, TightSpanError> {
    check_len(d, f)?;
    let n = d.len();
    Ok((0..n).all(|x| (x..n).all(|y| &f[x] + &f[y] >= *d.get(x, y))))
}

/// `f(x) = max_y (d(x,y) - f(y))` for every `x`.
pub fn in_td(d: &DistanceSpace, f: &PointFunction) -> Result<bool, TightSpanError> {
    check_len(d, f)?;
    Ok(sharp_values(d, f).iter().zip(f.values()).all(|(s, v)| s == v))
}

/// `f#(x) = max_y (d(x,y) - f(y))`.
pub fn f_sharp(d: &DistanceSpace, f: &PointFunction) -> Result<PointFunction, TightSpanError> {
    check_len(d, f)?;
    Ok(PointFunction(sharp_values(d, f)))
}

/// Sup-norm distance.
pub fn d_inf(f: &PointFunction, g: &PointFunction) -> Result<Rational, TightSpanError> {
    if f.len() != g.len() {
        return Err(TightSpanError::DimensionMismatch { expected: f.len(), found: g.len() });
    }
    Ok(sup_distance(f.values(), g.values()))
}

/// `max_{x,y} (d(x,y) - f(x) - g(y))`, which equals `d_inf(f, g)` on `T_d`.
pub fn d_inf_by_formula(d: &DistanceSpace, f: &PointFunction, g: &PointFunction) -> Result<Rational, TightSpanError> {
    if !in_td(d, f)? || !in_td(d, g)? {
        return Err(TightSpanError::NotInTightSpan);
    }
    let n = d.len();
    Ok((0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| d.get(x, y) - &f[x] - &g[y])
        .max()
        .expect("non-empty space"))
}

/// `P_d` as a polyhedron over one variable per point.
pub fn pd_polyhedron(d: &DistanceSpace) -> Polyhedron {
    let n = d.len();
    let one = Rational::one();
    let mut p = Polyhedron::new(n);
    for x in 0..n {
        for y in x..n {
            p.add_sparse(&[(x, one.clone()), (y, one.clone())], Relation::Ge, d.get(x, y).clone())
                .expect("indices in range");
        }
    }
    p
}

fn unit(i: usize) -> Vec<(usize, Rational)> {
    vec![(i, Rational::one())]
}

/// A minimal element of `P_d` below `f0`: minimizes `Σ g` over `{ g ∈ P_d : g ≼ f0 }`.
pub fn retract_to_td(d: &DistanceSpace, f0: &PointFunction) -> Result<TightSpanPoint, TightSpanError> {
    if !in_pd(d, f0)? {
        return Err(TightSpanError::NotInPd);
    }
    let n = d.len();
    let mut p = pd_polyhedron(d);
    for x in 0..n {
        p.add_sparse(&unit(x), Relation::Le, f0[x].clone())?;
    }
    match minimize(&p, vec![Rational::one(); n])? {
        LpOutcome::Optimal { point, .. } => TightSpanPoint::new(d, PointFunction(point))
            .map_err(|_| TightSpanError::ConstructionFailed("retraction is not minimal".into())),
        other => Err(TightSpanError::ConstructionFailed(format!("retraction LP: {other:?}"))),
    }
}

/// One step of the non-expansive retraction: `½ (f + f#)`.
pub fn contraction_step(d: &DistanceSpace, f: &PointFunction) -> Result<PointFunction, TightSpanError> {
    let s = f_sharp(d, f)?;
    let half = Rational::new(1.into(), 2.into());
    Ok(PointFunction(f.values().iter().zip(s.values()).map(|(a, b)| (a + b) * &half).collect()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionOptions {
    /// Stop once `d_inf(f, f#) ≤ tol`.
    pub tol: Rational,
    pub max_iterations: usize,
    /// Try to jump to the exact limit once the argmax pattern is stable.
    pub snap: bool,
}

impl Default for ContractionOptions {
    fn default() -> Self {
        ContractionOptions { tol: pow2_inv(40), max_iterations: 10_000, snap: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionOutcome {
    pub point: PointFunction,
    pub iterations: usize,
    /// `point` lies in `T_d` exactly (reached directly or by snapping).
    pub exact: bool,
    pub snapped: bool,
}

/// Iterates `f ↦ ½ (f + f#)` from `f0 ∈ P_d` towards a point of `T_d` below `f0`.
pub fn contraction_retract(
    d: &DistanceSpace,
    f0: &PointFunction,
    opts: &ContractionOptions,
) -> Result<ContractionOutcome, TightSpanError> {
    if !in_pd(d, f0)? {
        return Err(TightSpanError::NotInPd);
    }
    if !opts.tol.is_positive() {
        return Err(TightSpanError::PreconditionViolated("tolerance must be positive".into()));
    }
    let mut f = f0.clone();
    let mut prev_pattern: Option<Vec<usize>> = None;
    for k in 0..=opts.max_iterations {
        let sharp = f_sharp(d, &f)?;
        let gap = sup_distance(f.values(), sharp.values());
        if gap.is_zero() {
            return Ok(ContractionOutcome { point: f, iterations: k, exact: true, snapped: false });
        }
        if opts.snap {
            let pattern = argmax_pattern(d, &f);
            if prev_pattern.as_ref() == Some(&pattern) {
                if let Some(p) = snap(d, &f, &sharp, f0, &pattern) {
                    return Ok(ContractionOutcome { point: p, iterations: k, exact: true, snapped: true });
                }
            }
            prev_pattern = Some(pattern);
        }
        if gap <= opts.tol {
            return Ok(ContractionOutcome { point: f, iterations: k, exact: false, snapped: false });
        }
        if k == opts.max_iterations {
            break;
        }
        f = contraction_step(d, &f)?;
    }
    Err(TightSpanError::IterationCapExceeded(opts.max_iterations))
}

/// For each `x` the smallest `y` attaining `max_y (d(x,y) - f(y))`.
fn argmax_pattern(d: &DistanceSpace, f: &PointFunction) -> Vec<usize> {
    let n = d.len();
    (0..n)
        .map(|x| {
            let mut best = 0;
            for y in 1..n {
                if d.get(x, y) - &f[y] > d.get(x, best) - &f[best] {
                    best = y;
                }
            }
            best
        })
        .collect()
}

/// Solves `f(x) + f(a_x) = d(x, a_x)` together with the quantities the iteration preserves
/// while the pattern `a` is fixed, then checks the result.
fn snap(
    d: &DistanceSpace,
    f: &PointFunction,
    sharp: &PointFunction,
    f0: &PointFunction,
    pattern: &[usize],
) -> Option<PointFunction> {
    let n = d.len();
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut c = Vec::with_capacity(n);
    for x in 0..n {
        a[x][x] += Rational::one();
        a[x][pattern[x]] += Rational::one();
        c.push(d.get(x, pattern[x]).clone());
    }
    // Left null vectors w of A: along the iteration w·f is constant when w·c = 0.
    let at: Vec<Vec<Rational>> = (0..n).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect();
    let mut rows = a;
    let mut rhs = c;
    for w in null_space(&at, n) {
        rhs.push(crate::exactnum::linalg::dot(&w, f.values()));
        rows.push(w);
    }
    let x = match solve(&rows, &rhs) {
        Solution::Unique(x) => PointFunction(x),
        _ => return None,
    };
    let ok = in_td(d, &x).ok()? && x.dominated_by(f0) && sharp.dominated_by(&x) && x.dominated_by(f);
    ok.then_some(x)
}

fn check_ext4pt(d: &DistanceSpace) -> Result<(), TightSpanError> {
    let c = check_extended_four_point(d);
    if c.is_ok() {
        Ok(())
    } else {
        Err(TightSpanError::NotExtFourPoint(c))
    }
}

/// The unique `f ∈ T_d` with `f(x) = t` and `f(y) = d(x,y) - t`.
pub fn geodesic_point(d: &DistanceSpace, x: &str, y: &str, t: &Rational) -> Result<TightSpanPoint, TightSpanError> {
    check_ext4pt(d)?;
    geodesic_point_unchecked(d, d.index_of(x)?, d.index_of(y)?, t)
}

/// [`geodesic_point`] by index, for callers that have already checked the extended
/// four-point condition. The output is still verified.
pub fn geodesic_point_unchecked(
    d: &DistanceSpace,
    x: usize,
    y: usize,
    t: &Rational,
) -> Result<TightSpanPoint, TightSpanError> {
    let dxy = d.get(x, y).clone();
    if !dxy.is_positive() {
        return Err(TightSpanError::PreconditionViolated(format!(
            "d({}, {}) must be positive",
            d.labels()[x],
            d.labels()[y]
        )));
    }
    if t.is_negative() || *t > dxy {
        return Err(TightSpanError::PreconditionViolated(format!("t = {t} outside [0, {dxy}]")));
    }
    let n = d.len();
    let mut p = pd_polyhedron(d);
    p.add_sparse(&unit(x), Relation::Eq, t.clone())?;
    p.add_sparse(&unit(y), Relation::Eq, &dxy - t)?;
    let (opt, point) = minimize(&p, vec![Rational::one(); n])?.optimal().ok_or(TightSpanError::NonUniqueDetected)?;
    let f = PointFunction(point);
    if !in_td(d, &f)? {
        return Err(TightSpanError::NonUniqueDetected);
    }
    // A second optimum of the same face with another objective must coincide.
    let mut face = p;
    face.add(vec![Rational::one(); n], Relation::Eq, opt)?;
    let weights: Vec<Rational> = (0..n).map(|i| int(-(i as i64) - 1)).collect();
    let (_, other) = minimize(&face, weights)?.optimal().ok_or(TightSpanError::NonUniqueDetected)?;
    if other != f.0 {
        return Err(TightSpanError::NonUniqueDetected);
    }
    TightSpanPoint::new(d, f)
}

/// A point `g ∈ κ(x)` with `d_inf(f, g) = f(x)`.
pub fn nearest_kappa_point(d: &DistanceSpace, f: &PointFunction, x: &str) -> Result<TightSpanPoint, TightSpanError> {
    nearest_kappa_point_idx(d, f, d.index_of(x)?)
}

pub(crate) fn nearest_kappa_point_idx(
    d: &DistanceSpace,
    f: &PointFunction,
    x: usize,
) -> Result<TightSpanPoint, TightSpanError> {
    if !in_td(d, f)? {
        return Err(TightSpanError::NotInTightSpan);
    }
    // Row x of the metric ρ_f(u, v) = f(u) + f(v), u ≠ v.
    let h = PointFunction((0..d.len()).map(|u| if u == x { Rational::zero() } else { &f[x] + &f[u] }).collect());
    let g = retract_to_td(d, &h)?;
    if !g.function()[x].is_zero() || d_inf(f, g.function())? != f[x] {
        return Err(TightSpanError::ConstructionFailed("retracted Kuratowski row misses the required distance".into()));
    }
    Ok(g)
}

/// Gate points `f_(x,y,0)` for every `y` with `d(x,y) > 0`, in label order.
pub fn kappa_gates(d: &DistanceSpace, x: &str) -> Result<Vec<TightSpanPoint>, TightSpanError> {
    check_ext4pt(d)?;
    let xi = d.index_of(x)?;
    (0..d.len())
        .filter(|&y| d.get(xi, y).is_positive())
        .map(|y| geodesic_point_unchecked(d, xi, y, &Rational::zero()))
        .collect()
}

/// Witnesses `f ∈ κ(y)`, `g ∈ κ(x)` with `d_inf(f, g) = d(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaDistance {
    pub f: TightSpanPoint,
    pub g: TightSpanPoint,
    pub distance: Rational,
}

/// Realizes `d(x,y) = min { d_inf(f, g) : f ∈ κ(x), g ∈ κ(y) }` with explicit witnesses.
pub fn verify_kappa_distance(d: &DistanceSpace, x: &str, y: &str) -> Result<KappaDistance, TightSpanError> {
    let xi = d.index_of(x)?;
    let yi = d.index_of(y)?;
    let rho = pin_pair(&some_dominating_metric(d), x, y)?;
    let h = kuratowski(&rho, y)?;
    let f = retract_to_td(d, &h)?;
    let g = nearest_kappa_point_idx(d, f.function(), xi)?;
    let distance = d_inf(f.function(), g.function())?;
    let fail = |m: &str| Err(TightSpanError::ConstructionFailed(m.to_string()));
    if !f.function()[yi].is_zero() || !g.function()[xi].is_zero() {
        return fail("witness outside κ");
    }
    if distance != f.function()[xi] || distance > *d.get(xi, yi) {
        return fail("witness distance exceeds d(x, y)");
    }
    // Lower bound: d_inf(f, g) ≥ g(y) - f(y) ≥ d(x, y) - g(x) = d(x, y).
    if distance < *d.get(xi, yi) {
        return fail("witness distance below d(x, y)");
    }
    Ok(KappaDistance { f, g, distance })
}
