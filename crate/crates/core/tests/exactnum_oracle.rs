#![allow(clippy::needless_range_loop)]

//! Simplex and double description checked against brute-force vertex enumeration.

use num_traits::Zero;
use proptest::prelude::*;
use tsk_core::exactnum::{
    enumerate_vertices, int, minimize, solve_lp_with, LinearProgram, LpOutcome, PivotRule, Polyhedron, Rational,
    Relation,
};

/// Cramer-free brute force: every `dim`-subset of constraint hyperplanes with a unique
/// intersection point that satisfies all constraints.
fn brute_vertices(poly: &Polyhedron) -> Vec<Vec<Rational>> {
    let n = poly.dim();
    let cons = poly.constraints();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    if cons.len() < n {
        return out;
    }
    loop {
        let a: Vec<Vec<Rational>> = idx.iter().map(|&i| cons[i].coeffs.clone()).collect();
        let b: Vec<Rational> = idx.iter().map(|&i| cons[i].rhs.clone()).collect();
        if let Some(x) = gauss(a, b) {
            if poly.contains(&x) {
                out.push(x);
            }
        }
        // next combination
        let mut k = n;
        loop {
            if k == 0 {
                out.sort();
                out.dedup();
                return out;
            }
            k -= 1;
            if idx[k] < cons.len() - n + k {
                idx[k] += 1;
                for j in k + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn gauss(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in 0..n {
                    let v = &f * &a[c][k];
                    a[r][k] -= v;
                }
                let v = &f * &b[c];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn bounded_polytope(dim: usize, extra: &[(Vec<i64>, i64)]) -> Polyhedron {
    let mut p = Polyhedron::new(dim);
    for i in 0..dim {
        let mut e = vec![int(0); dim];
        e[i] = int(1);
        p.add(e.clone(), Relation::Ge, int(-3)).unwrap();
        p.add(e, Relation::Le, int(3)).unwrap();
    }
    for (a, b) in extra {
        p.add(a.iter().map(|&v| int(v)).collect(), Relation::Ge, int(*b)).unwrap();
    }
    p
}

fn extra_constraints(dim: usize) -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, dim), -4i64..=2), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn dd_matches_brute_force_2d(extra in extra_constraints(2)) {
        let p = bounded_polytope(2, &extra);
        prop_assert_eq!(enumerate_vertices(&p).unwrap(), brute_vertices(&p));
    }

    #[test]
    fn dd_matches_brute_force_3d(extra in extra_constraints(3)) {
        let p = bounded_polytope(3, &extra);
        prop_assert_eq!(enumerate_vertices(&p).unwrap(), brute_vertices(&p));
    }

    #[test]
    fn simplex_optimum_is_best_vertex(extra in extra_constraints(3), c in prop::collection::vec(-4i64..=4, 3)) {
        let p = bounded_polytope(3, &extra);
        let verts = brute_vertices(&p);
        let obj: Vec<Rational> = c.iter().map(|&v| int(v)).collect();
        let lp = LinearProgram { polyhedron: p.clone(), objective: obj.clone() };
        for rule in [PivotRule::Bland, PivotRule::Dantzig] {
            match solve_lp_with(&lp, rule).unwrap() {
                LpOutcome::Optimal { value, point } => {
                    prop_assert!(p.contains(&point));
                    let best = verts
                        .iter()
                        .map(|v| v.iter().zip(&obj).fold(int(0), |a, (x, y)| a + x * y))
                        .min()
                        .unwrap();
                    prop_assert_eq!(value, best);
                }
                LpOutcome::Infeasible => prop_assert!(verts.is_empty()),
                LpOutcome::Unbounded => prop_assert!(false, "bounded polytope reported unbounded"),
            }
        }
    }

    #[test]
    fn equality_constrained_programs(a in prop::collection::vec(-2i64..=2, 3), b in -3i64..=3, c in prop::collection::vec(-2i64..=2, 3)) {
        let mut p = bounded_polytope(3, &[]);
        p.add(a.iter().map(|&v| int(v)).collect(), Relation::Eq, int(b)).unwrap();
        let obj: Vec<Rational> = c.iter().map(|&v| int(v)).collect();
        let verts = brute_vertices(&p);
        match minimize(&p, obj.clone()).unwrap() {
            LpOutcome::Optimal { value, point } => {
                prop_assert!(p.contains(&point));
                let best = verts
                    .iter()
                    .map(|v| v.iter().zip(&obj).fold(int(0), |a, (x, y)| a + x * y))
                    .min()
                    .unwrap();
                prop_assert_eq!(value, best);
            }
            LpOutcome::Infeasible => prop_assert!(verts.is_empty()),
            LpOutcome::Unbounded => prop_assert!(false),
        }
    }
}
