//! Metrics dominating a distance: `M(d) = { ρ ≽ d : ρ is a metric }`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::distance::{check_metric, Certificate, DistanceError, DistanceSpace, Metric};
use crate::exactnum::{lex_minimize, minimize, LpError, LpOutcome, Polyhedron, Rational, Relation};
use crate::tightspan::{contraction_retract, d_inf, in_td, ContractionOptions, PointFunction, TightSpanError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DominationError {
    #[error("labels of the metric and the base distance differ")]
    LabelMismatch,
    #[error("metric does not dominate the distance at ({0}, {1})")]
    NotDominating(String, String),
    #[error("not a metric: {0}")]
    NotMetric(Certificate),
    #[error("pair order must list every unordered pair exactly once")]
    BadPairOrder,
    #[error("metric is not certified minimal in M(d)")]
    MinimalityNotCertified,
    #[error("embedded distance for ({0}, {1}) is off by more than the tolerance")]
    ToleranceExceeded(String, String),
    #[error("function is not in the tight span")]
    NotInTightSpan,
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    TightSpan(Box<TightSpanError>),
}

impl From<TightSpanError> for DominationError {
    fn from(e: TightSpanError) -> Self {
        DominationError::TightSpan(Box::new(e))
    }
}

/// A metric `ρ ∈ M(d)` together with the distance it dominates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominatingMetric {
    metric: Metric,
    base: DistanceSpace,
}

impl DominatingMetric {
    pub fn new(base: DistanceSpace, rho: DistanceSpace) -> Result<Self, DominationError> {
        if base.labels() != rho.labels() {
            return Err(DominationError::LabelMismatch);
        }
        for (i, j) in base.pairs() {
            if rho.get(i, j) < base.get(i, j) {
                return Err(DominationError::NotDominating(base.labels()[i].clone(), base.labels()[j].clone()));
            }
        }
        let metric = Metric::new(rho).map_err(|e| match e {
            DistanceError::NotMetric(c) => DominationError::NotMetric(c),
            other => DominationError::Distance(other),
        })?;
        Ok(DominatingMetric { metric, base })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn base(&self) -> &DistanceSpace {
        &self.base
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        self.metric.get(i, j)
    }
}

/// Constant metric at `diam(d)` off the diagonal (zero metric when `d` is null).
pub fn some_dominating_metric(d: &DistanceSpace) -> DominatingMetric {
    let diam = d.diameter();
    let rho = DistanceSpace::from_fn(d.labels().to_vec(), |_, _| diam.clone()).expect("same labels as a valid space");
    DominatingMetric::new(d.clone(), rho).expect("constant metric dominates")
}

/// Edits `p` so that the pair `(x, y)` sits at distance `d(x, y)`; identity when it already
/// does.
pub fn pin_pair(p: &DominatingMetric, x: &str, y: &str) -> Result<DominatingMetric, DominationError> {
    let xi = p.base.index_of(x)?;
    let yi = p.base.index_of(y)?;
    if p.get(xi, yi) == p.base.get(xi, yi) {
        return Ok(p.clone());
    }
    pin_pair_formula(p, x, y)
}

/// The pinning formulas applied unconditionally:
/// `ρ(x,y) = d(x,y)`, `ρ(x,u) = p(x,u) + p(x,y) - d(x,y)`, `ρ(y,u) = p(x,u) + p(x,y)`,
/// all other entries unchanged.
pub fn pin_pair_formula(p: &DominatingMetric, x: &str, y: &str) -> Result<DominatingMetric, DominationError> {
    let d = &p.base;
    let xi = d.index_of(x)?;
    let yi = d.index_of(y)?;
    if xi == yi {
        return Ok(p.clone());
    }
    let pxy = p.get(xi, yi).clone();
    let dxy = d.get(xi, yi).clone();
    let rho = DistanceSpace::from_fn(d.labels().to_vec(), |i, j| {
        let pair = |a: usize, b: usize| (i == a && j == b) || (i == b && j == a);
        if pair(xi, yi) {
            return dxy.clone();
        }
        let other = |a: usize| if i == a { j } else { i };
        if i == xi || j == xi {
            p.get(xi, other(xi)) + &pxy - &dxy
        } else if i == yi || j == yi {
            p.get(xi, other(yi)) + &pxy
        } else {
            p.get(i, j).clone()
        }
    })?;
    DominatingMetric::new(d.clone(), rho)
}

/// Variable index of each unordered pair in `order`, checking it is a permutation of all
/// pairs.
fn pair_index(n: usize, order: &[(usize, usize)]) -> Result<Vec<Vec<usize>>, DominationError> {
    let mut idx = vec![vec![usize::MAX; n]; n];
    for (k, &(a, b)) in order.iter().enumerate() {
        if a == b || a >= n || b >= n || idx[a][b] != usize::MAX {
            return Err(DominationError::BadPairOrder);
        }
        idx[a][b] = k;
        idx[b][a] = k;
    }
    if order.len() != n * (n - 1) / 2 {
        return Err(DominationError::BadPairOrder);
    }
    Ok(idx)
}

/// `M(d)` over pair variables: `ρ ≽ d` plus every triangle inequality.
fn md_polyhedron(d: &DistanceSpace, idx: &[Vec<usize>], m: usize) -> Polyhedron {
    let n = d.len();
    let one = Rational::one();
    let mut p = Polyhedron::new(m);
    for i in 0..n {
        for j in i + 1..n {
            p.add_sparse(&[(idx[i][j], one.clone())], Relation::Ge, d.get(i, j).clone()).expect("in range");
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in a + 1..n {
                if b == a || b == c {
                    continue;
                }
                // ρ(a,c) ≤ ρ(a,b) + ρ(b,c)
                p.add_sparse(
                    &[(idx[a][b], one.clone()), (idx[b][c], one.clone()), (idx[a][c], -one.clone())],
                    Relation::Ge,
                    Rational::zero(),
                )
                .expect("in range");
            }
        }
    }
    p
}

/// All unordered pairs in lexicographic label order.
pub fn lexicographic_pair_order(d: &DistanceSpace) -> Vec<(String, String)> {
    d.pairs().into_iter().map(|(i, j)| (d.labels()[i].clone(), d.labels()[j].clone())).collect()
}

fn resolve_order(d: &DistanceSpace, order: &[(String, String)]) -> Result<Vec<(usize, usize)>, DominationError> {
    order.iter().map(|(a, b)| Ok((d.index_of(a)?, d.index_of(b)?))).collect()
}

/// Lexicographic minimum of `M(d)` under `pair_order`; a ≼-minimal element of `M(d)`.
pub fn minimal_dominating_metric(
    d: &DistanceSpace,
    pair_order: &[(String, String)],
) -> Result<DominatingMetric, DominationError> {
    let n = d.len();
    let order = resolve_order(d, pair_order)?;
    let idx = pair_index(n, &order)?;
    if n == 1 {
        return DominatingMetric::new(d.clone(), d.clone());
    }
    let p = md_polyhedron(d, &idx, order.len());
    let priority: Vec<usize> = (0..order.len()).collect();
    let x = lex_minimize(&p, &priority)?;
    let rho = DistanceSpace::from_fn(d.labels().to_vec(), |i, j| x[idx[i][j]].clone())?;
    DominatingMetric::new(d.clone(), rho)
}

/// True iff no metric in `M(d)` lies strictly below `ρ`: `min Σσ` over `{σ ∈ M(d), σ ≼ ρ}`
/// equals `Σρ`.
pub fn verify_minimal(rho: &DominatingMetric) -> Result<bool, DominationError> {
    let d = &rho.base;
    let n = d.len();
    if n == 1 {
        return Ok(true);
    }
    let order = d.pairs();
    let idx = pair_index(n, &order)?;
    let mut p = md_polyhedron(d, &idx, order.len());
    let one = Rational::one();
    let mut total = Rational::zero();
    for (k, &(i, j)) in order.iter().enumerate() {
        p.add_sparse(&[(k, one.clone())], Relation::Le, rho.get(i, j).clone())?;
        total += rho.get(i, j);
    }
    match minimize(&p, vec![one; order.len()])? {
        LpOutcome::Optimal { value, .. } => Ok(value == total),
        other => unreachable!("ρ itself is feasible and the sum is bounded below: {other:?}"),
    }
}

/// Kuratowski function `h_x^ρ : y ↦ ρ(x, y)`.
pub fn kuratowski(rho: &DominatingMetric, x: &str) -> Result<PointFunction, DominationError> {
    let i = rho.base.index_of(x)?;
    Ok(PointFunction::new(rho.metric.row(i).to_vec()))
}

/// Images `ψ(x) ∈ κ(x)` of a minimal `ρ`, with `d_inf(ψ(x), ψ(y)) = ρ(x,y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimalEmbedding {
    pub points: Vec<(String, PointFunction)>,
    /// All images were snapped to exact points of `T_d`.
    pub exact: bool,
}

pub fn embed_minimal_metric(
    d: &DistanceSpace,
    rho: &DominatingMetric,
    tol: &Rational,
) -> Result<MinimalEmbedding, DominationError> {
    if rho.base != *d {
        return Err(DominationError::LabelMismatch);
    }
    if !verify_minimal(rho)? {
        return Err(DominationError::MinimalityNotCertified);
    }
    let opts = ContractionOptions { tol: tol.clone(), ..ContractionOptions::default() };
    let mut points = Vec::with_capacity(d.len());
    let mut exact = true;
    for x in d.labels() {
        let out = contraction_retract(d, &kuratowski(rho, x)?, &opts)?;
        exact &= out.exact;
        points.push((x.clone(), out.point));
    }
    for (i, j) in d.pairs() {
        let got = d_inf(&points[i].1, &points[j].1)?;
        let want = rho.get(i, j);
        let ok = if exact { got == *want } else { (got - want).abs() <= tol + tol };
        if !ok {
            return Err(DominationError::ToleranceExceeded(d.labels()[i].clone(), d.labels()[j].clone()));
        }
    }
    Ok(MinimalEmbedding { points, exact })
}

/// `ρ_f(x, y) = f(x) + f(y)` for `x ≠ y`.
pub fn metric_from_point(d: &DistanceSpace, f: &PointFunction) -> Result<DominatingMetric, DominationError> {
    if !in_td(d, f)? {
        return Err(DominationError::NotInTightSpan);
    }
    let rho = DistanceSpace::from_fn(d.labels().to_vec(), |i, j| &f[i] + &f[j])?;
    DominatingMetric::new(d.clone(), rho)
}

/// Checks a metric table before wrapping, reporting the triangle violation if any.
pub fn as_dominating(d: &DistanceSpace, rho: DistanceSpace) -> Result<DominatingMetric, DominationError> {
    let c = check_metric(&rho);
    if !c.is_ok() {
        return Err(DominationError::NotMetric(c));
    }
    DominatingMetric::new(d.clone(), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    fn strict() -> DistanceSpace {
        DistanceSpace::from_int_rows(
            &["w", "x", "y", "z"],
            &[&[0, 0, 0, 0], &[0, 0, 4, 0], &[0, 4, 0, 0], &[0, 0, 0, 0]],
        )
        .unwrap()
    }

    fn strict_rho() -> DistanceSpace {
        DistanceSpace::from_int_rows(
            &["w", "x", "y", "z"],
            &[&[0, 1, 3, 2], &[1, 0, 4, 3], &[3, 4, 0, 1], &[2, 3, 1, 0]],
        )
        .unwrap()
    }

    fn five_point() -> DistanceSpace {
        DistanceSpace::from_int_rows(
            &["x", "y", "z", "v", "w"],
            &[&[0, 9, 1, 6, 9], &[9, 0, 3, 1, 10], &[1, 3, 0, 0, 2], &[6, 1, 0, 0, 7], &[9, 10, 2, 7, 0]],
        )
        .unwrap()
    }

    #[test]
    fn constant_dominating_metric() {
        let p = some_dominating_metric(&five_point());
        assert!(p.metric().pairs().iter().all(|&(i, j)| *p.get(i, j) == int(10)));
        let two = DistanceSpace::from_int_rows(&["a", "b"], &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(some_dominating_metric(&two).metric().space(), &two);
    }

    #[test]
    fn pin_examples() {
        let d = strict();
        let c4 = DistanceSpace::from_fn(d.labels().to_vec(), |_, _| int(4)).unwrap();
        let p = DominatingMetric::new(d.clone(), c4).unwrap();
        assert_eq!(pin_pair(&p, "x", "y").unwrap(), p);
        let r = pin_pair_formula(&p, "x", "y").unwrap();
        assert_eq!(r.metric().dist("x", "y").unwrap(), &int(4));
        for u in ["w", "z"] {
            assert_eq!(r.metric().dist("x", u).unwrap(), &int(4));
            assert_eq!(r.metric().dist("y", u).unwrap(), &int(8));
        }
        let q = pin_pair(&some_dominating_metric(&five_point()), "v", "z").unwrap();
        assert_eq!(q.metric().dist("v", "z").unwrap(), &int(0));
    }

    #[test]
    fn minimal_metrics() {
        let d = strict();
        let r = minimal_dominating_metric(&d, &lexicographic_pair_order(&d)).unwrap();
        assert_eq!(r.get(0, 1), &int(0));
        assert!(verify_minimal(&r).unwrap());

        let line =
            DistanceSpace::from_fn(vec!["a".into(), "b".into(), "c".into()], |i, j| int((j - i) as i64)).unwrap();
        let r = minimal_dominating_metric(&line, &lexicographic_pair_order(&line)).unwrap();
        assert_eq!(r.metric().space(), &line);

        let r = minimal_dominating_metric(&five_point(), &lexicographic_pair_order(&five_point())).unwrap();
        assert_eq!(r.metric().dist("x", "z").unwrap(), &int(1));
        assert!(verify_minimal(&r).unwrap());
    }

    #[test]
    fn minimality_certificates() {
        let r = DominatingMetric::new(strict(), strict_rho()).unwrap();
        assert!(verify_minimal(&r).unwrap());
        assert!(!verify_minimal(&some_dominating_metric(&five_point())).unwrap());
    }

    #[test]
    fn kuratowski_rows() {
        let r = DominatingMetric::new(strict(), strict_rho()).unwrap();
        assert_eq!(kuratowski(&r, "w").unwrap(), PointFunction::from_ints(&[0, 1, 3, 2]));
    }

    #[test]
    fn embedding_reproduces_rho() {
        let r = DominatingMetric::new(strict(), strict_rho()).unwrap();
        let e = embed_minimal_metric(&strict(), &r, &crate::exactnum::pow2_inv(40)).unwrap();
        assert!(e.exact);
        for (i, j) in strict().pairs() {
            assert_eq!(&d_inf(&e.points[i].1, &e.points[j].1).unwrap(), r.get(i, j));
            assert!(e.points[i].1[i].is_zero());
        }
    }

    #[test]
    fn metric_from_tight_span_point() {
        let d = DistanceSpace::from_int_rows(&["x", "y", "z"], &[&[0, 3, 1], &[3, 0, 1], &[1, 1, 0]]).unwrap();
        let r = metric_from_point(&d, &PointFunction::from_ints(&[1, 2, 0])).unwrap();
        assert_eq!((r.get(0, 1), r.get(0, 2), r.get(1, 2)), (&int(3), &int(1), &int(2)));
        let r = metric_from_point(&strict(), &PointFunction::from_ints(&[0, 1, 3, 0])).unwrap();
        assert_eq!(r.get(1, 2), &int(4));
    }
}
