//! Exact two-phase simplex.
//!
//! A program `min c·x` over `{ x : a_i·x ≥ b_i, a_j·x = b_j }` with free variables is solved
//! through its dual, which is already in standard form
//! `max b·y  s.t.  Aᵀ y = c, y_I ≥ 0`. The primal optimum is read off the reduced costs of
//! the phase-one artificial columns, which the tableau keeps for that purpose.

use std::sync::OnceLock;

use num_traits::{Signed, Zero};

use super::{LpError, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = super::linalg::dot(&self.coeffs, x);
        match self.relation {
            Relation::Ge => lhs >= self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Finite intersection of closed half-spaces and hyperplanes in `Q^dim`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polyhedron {
    dim: usize,
    constraints: Vec<Constraint>,
}

impl Polyhedron {
    pub fn new(dim: usize) -> Self {
        Polyhedron { dim, constraints: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn push(&mut self, c: Constraint) -> Result<(), LpError> {
        if c.coeffs.len() != self.dim {
            return Err(LpError::DimensionMismatch { expected: self.dim, found: c.coeffs.len() });
        }
        self.constraints.push(c);
        Ok(())
    }

    /// Adds `coeffs · x (rel) rhs`.
    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Result<(), LpError> {
        self.push(Constraint::new(coeffs, relation, rhs))
    }

    /// Adds `Σ_k weight_k x_{idx_k} (rel) rhs` from a sparse description.
    pub fn add_sparse(
        &mut self,
        terms: &[(usize, Rational)],
        relation: Relation,
        rhs: Rational,
    ) -> Result<(), LpError> {
        let mut coeffs = vec![Rational::zero(); self.dim];
        for (i, w) in terms {
            if *i >= self.dim {
                return Err(LpError::DimensionMismatch { expected: self.dim, found: *i + 1 });
            }
            coeffs[*i] += w;
        }
        self.push(Constraint::new(coeffs, relation, rhs))
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim && self.constraints.iter().all(|c| c.is_satisfied_by(x))
    }
}

/// `minimize objective · x` over `polyhedron`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub polyhedron: Polyhedron,
    pub objective: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<(Rational, Vec<Rational>)> {
        match self {
            LpOutcome::Optimal { value, point } => Some((value, point)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variable. Never cycles.
    Bland,
    /// Most negative reduced cost; ties and the ratio test still use Bland's order.
    Dantzig,
}

impl PivotRule {
    /// Rule selected by the `TSK_LP_PIVOT` environment variable (`bland` or `dantzig`),
    /// read once per process. Defaults to Bland.
    pub fn from_env() -> PivotRule {
        static RULE: OnceLock<PivotRule> = OnceLock::new();
        *RULE.get_or_init(|| match std::env::var("TSK_LP_PIVOT").as_deref() {
            Ok("dantzig") => PivotRule::Dantzig,
            _ => PivotRule::Bland,
        })
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    solve_lp_with(lp, PivotRule::from_env())
}

pub fn solve_lp_with(lp: &LinearProgram, rule: PivotRule) -> Result<LpOutcome, LpError> {
    let n = lp.polyhedron.dim();
    if lp.objective.len() != n {
        return Err(LpError::DimensionMismatch { expected: n, found: lp.objective.len() });
    }
    match solve_via_dual(&lp.polyhedron, &lp.objective, rule) {
        DualResult::Solved(point) => {
            let value = super::linalg::dot(&lp.objective, &point);
            debug_assert!(lp.polyhedron.contains(&point));
            Ok(LpOutcome::Optimal { value, point })
        }
        DualResult::DualUnbounded => Ok(LpOutcome::Infeasible),
        DualResult::DualInfeasible => {
            // The primal is either infeasible or unbounded; a zero objective settles which.
            let zero = vec![Rational::zero(); n];
            match solve_via_dual(&lp.polyhedron, &zero, rule) {
                DualResult::Solved(_) => Ok(LpOutcome::Unbounded),
                _ => Ok(LpOutcome::Infeasible),
            }
        }
    }
}

/// Minimizes `objective` over `poly`.
pub fn minimize(poly: &Polyhedron, objective: Vec<Rational>) -> Result<LpOutcome, LpError> {
    solve_lp(&LinearProgram { polyhedron: poly.clone(), objective })
}

/// Lexicographic minimum over `poly`: minimize `x[priority[0]]`, fix it, minimize the next, ...
pub fn lex_minimize(poly: &Polyhedron, priority: &[usize]) -> Result<Vec<Rational>, LpError> {
    let n = poly.dim();
    let mut work = poly.clone();
    let mut last = None;
    for &v in priority {
        if v >= n {
            return Err(LpError::DimensionMismatch { expected: n, found: v + 1 });
        }
        let mut obj = vec![Rational::zero(); n];
        obj[v] = Rational::from_integer(1.into());
        match minimize(&work, obj)? {
            LpOutcome::Optimal { value, point } => {
                work.add_sparse(&[(v, Rational::from_integer(1.into()))], Relation::Eq, value)?;
                last = Some(point);
            }
            LpOutcome::Infeasible => return Err(LpError::Infeasible),
            LpOutcome::Unbounded => return Err(LpError::UnboundedCoordinate(v)),
        }
    }
    match last {
        Some(p) => Ok(p),
        None => match minimize(&work, vec![Rational::zero(); n])? {
            LpOutcome::Optimal { point, .. } => Ok(point),
            _ => Err(LpError::Infeasible),
        },
    }
}

enum DualResult {
    Solved(Vec<Rational>),
    DualInfeasible,
    DualUnbounded,
}

fn solve_via_dual(poly: &Polyhedron, c: &[Rational], rule: PivotRule) -> DualResult {
    let n = poly.dim();
    // Dual columns: one per `≥` row, two per equality (free dual variable split).
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    let mut costs: Vec<Rational> = Vec::new();
    for con in poly.constraints() {
        let (a, b): (Vec<Rational>, Rational) = match con.relation {
            Relation::Ge | Relation::Eq => (con.coeffs.clone(), con.rhs.clone()),
            Relation::Le => (con.coeffs.iter().map(|v| -v).collect(), -con.rhs.clone()),
        };
        if con.relation == Relation::Eq {
            cols.push(a.iter().map(|v| -v).collect());
            costs.push(b.clone());
        }
        cols.push(a);
        costs.push(-b);
    }
    let signs: Vec<bool> = c.iter().map(|v| v.is_negative()).collect();
    let m = n;
    let k = cols.len();
    // Row i: Σ_j cols[j][i] u_j = c_i, sign-normalized so that the right-hand side is ≥ 0.
    let mut rows: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut r: Vec<Rational> = Vec::with_capacity(k + m + 1);
            for col in &cols {
                r.push(if signs[i] { -col[i].clone() } else { col[i].clone() });
            }
            for a in 0..m {
                r.push(if a == i { Rational::from_integer(1.into()) } else { Rational::zero() });
            }
            r.push(if signs[i] { -c[i].clone() } else { c[i].clone() });
            r
        })
        .collect();
    let total = k + m;
    let mut basis: Vec<usize> = (k..total).collect();

    // Phase one: minimize the sum of artificials.
    let mut obj = vec![Rational::zero(); total + 1];
    for r in &rows {
        for j in 0..k {
            obj[j] -= &r[j];
        }
        obj[total] -= &r[total];
    }
    let phase1 = run_simplex(&mut rows, &mut obj, &mut basis, total, rule);
    debug_assert!(phase1, "phase one is bounded below by zero");
    if !obj[total].is_zero() {
        return DualResult::DualInfeasible;
    }
    // Drive zero-level artificials out of the basis where a structural pivot exists.
    for i in 0..m {
        if basis[i] >= k {
            if let Some(j) = (0..k).find(|&j| !rows[i][j].is_zero()) {
                pivot(&mut rows, &mut obj, &mut basis, i, j);
            }
        }
    }

    // Phase two with the dual costs; artificials may not re-enter.
    let mut obj = vec![Rational::zero(); total + 1];
    obj[..k].clone_from_slice(&costs);
    for (i, &bv) in basis.iter().enumerate() {
        if bv < k && !costs[bv].is_zero() {
            let cb = costs[bv].clone();
            for (o, v) in obj.iter_mut().zip(&rows[i]) {
                if !v.is_zero() {
                    *o -= &cb * v;
                }
            }
        }
    }
    if !run_simplex(&mut rows, &mut obj, &mut basis, k, rule) {
        return DualResult::DualUnbounded;
    }
    // Reduced cost of artificial a is -π_a; the primal point is x = -S π.
    let point = (0..m)
        .map(|a| {
            let r = obj[k + a].clone();
            if signs[a] {
                -r
            } else {
                r
            }
        })
        .collect();
    DualResult::Solved(point)
}

/// Runs simplex iterations with entering candidates restricted to columns `< allowed`.
/// Returns `false` when the objective is unbounded below.
fn run_simplex(
    rows: &mut [Vec<Rational>],
    obj: &mut [Rational],
    basis: &mut [usize],
    allowed: usize,
    rule: PivotRule,
) -> bool {
    let rhs = obj.len() - 1;
    loop {
        let entering = match rule {
            PivotRule::Bland => (0..allowed).find(|&j| obj[j].is_negative()),
            PivotRule::Dantzig => {
                let mut best: Option<usize> = None;
                for j in 0..allowed {
                    if obj[j].is_negative() && best.is_none_or(|b| obj[j] < obj[b]) {
                        best = Some(j);
                    }
                }
                best
            }
        };
        let Some(j) = entering else {
            return true;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, r) in rows.iter().enumerate() {
            if r[j].is_positive() {
                let ratio = &r[rhs] / &r[j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leave else {
            return false;
        };
        pivot(rows, obj, basis, i, j);
    }
}

fn pivot(rows: &mut [Vec<Rational>], obj: &mut [Rational], basis: &mut [usize], i: usize, j: usize) {
    let inv = rows[i][j].recip();
    for v in rows[i].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let prow = rows[i].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&c| !prow[c].is_zero()).collect();
    for (r, row) in rows.iter_mut().enumerate() {
        if r == i || row[j].is_zero() {
            continue;
        }
        let f = row[j].clone();
        for &c in &nz {
            row[c] -= &f * &prow[c];
        }
    }
    if !obj[j].is_zero() {
        let f = obj[j].clone();
        for &c in &nz {
            obj[c] -= &f * &prow[c];
        }
    }
    basis[i] = j;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{frac, int};

    fn row(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_program() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0
        let mut p = Polyhedron::new(2);
        p.add(row(&[1, 2]), Relation::Le, int(4)).unwrap();
        p.add(row(&[3, 1]), Relation::Le, int(6)).unwrap();
        p.add(row(&[1, 0]), Relation::Ge, int(0)).unwrap();
        p.add(row(&[0, 1]), Relation::Ge, int(0)).unwrap();
        let out = minimize(&p, row(&[-1, -1])).unwrap();
        assert_eq!(out, LpOutcome::Optimal { value: frac(-14, 5), point: vec![frac(8, 5), frac(6, 5)] });
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = Polyhedron::new(1);
        p.add(row(&[1]), Relation::Ge, int(2)).unwrap();
        p.add(row(&[1]), Relation::Le, int(1)).unwrap();
        assert_eq!(minimize(&p, row(&[1])).unwrap(), LpOutcome::Infeasible);

        let mut q = Polyhedron::new(2);
        q.add(row(&[1, 1]), Relation::Ge, int(1)).unwrap();
        assert_eq!(minimize(&q, row(&[1, 0])).unwrap(), LpOutcome::Unbounded);
        assert!(matches!(minimize(&q, row(&[1, 1])).unwrap(), LpOutcome::Optimal { .. }));
    }

    #[test]
    fn equalities_and_free_variables() {
        // min x s.t. x - y = -3, y >= 1  → x = -2
        let mut p = Polyhedron::new(2);
        p.add(row(&[1, -1]), Relation::Eq, int(-3)).unwrap();
        p.add(row(&[0, 1]), Relation::Ge, int(1)).unwrap();
        let (v, x) = minimize(&p, row(&[1, 0])).unwrap().optimal().unwrap();
        assert_eq!(v, int(-2));
        assert_eq!(x, row(&[-2, 1]));
    }

    #[test]
    fn empty_constraint_set() {
        let p = Polyhedron::new(2);
        assert!(matches!(minimize(&p, row(&[0, 0])).unwrap(), LpOutcome::Optimal { .. }));
        assert_eq!(minimize(&p, row(&[0, 1])).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn dantzig_agrees_with_bland() {
        let mut p = Polyhedron::new(3);
        p.add(row(&[1, 1, 1]), Relation::Ge, int(3)).unwrap();
        p.add(row(&[1, -1, 0]), Relation::Le, int(1)).unwrap();
        p.add(row(&[0, 1, -2]), Relation::Ge, int(-4)).unwrap();
        p.add(row(&[1, 0, 0]), Relation::Ge, int(0)).unwrap();
        p.add(row(&[0, 0, 1]), Relation::Ge, int(0)).unwrap();
        let lp = LinearProgram { polyhedron: p, objective: row(&[2, 1, 3]) };
        let a = solve_lp_with(&lp, PivotRule::Bland).unwrap().optimal().unwrap().0;
        let b = solve_lp_with(&lp, PivotRule::Dantzig).unwrap().optimal().unwrap().0;
        assert_eq!(a, b);
    }

    #[test]
    fn lexicographic_minimum() {
        // x + y >= 2, x >= 0, y >= 0: lex (x, y) gives (0, 2); lex (y, x) gives (2, 0).
        let mut p = Polyhedron::new(2);
        p.add(row(&[1, 1]), Relation::Ge, int(2)).unwrap();
        p.add(row(&[1, 0]), Relation::Ge, int(0)).unwrap();
        p.add(row(&[0, 1]), Relation::Ge, int(0)).unwrap();
        assert_eq!(lex_minimize(&p, &[0, 1]).unwrap(), row(&[0, 2]));
        assert_eq!(lex_minimize(&p, &[1, 0]).unwrap(), row(&[2, 0]));
        let mut q = Polyhedron::new(1);
        q.add(row(&[1]), Relation::Le, int(0)).unwrap();
        assert_eq!(lex_minimize(&q, &[0]), Err(LpError::UnboundedCoordinate(0)));
    }
}
