//! Seeded generators for test instances.

use rand::Rng;

use crate::distance::DistanceSpace;
use crate::diversity::{diameter_diversity, l1_diversity, Diversity};
use crate::exactnum::{frac, int, Rational};
use crate::tightspan::{in_td, retract_to_td, PointFunction, TightSpanPoint};

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Arbitrary symmetric table with entries in `{0, 1/2, …, 5}`; roughly a fifth of the
/// entries are zero.
pub fn random_distance_space<R: Rng>(rng: &mut R, n: usize) -> DistanceSpace {
    DistanceSpace::from_fn(labels(n), |_, _| if rng.gen_ratio(1, 5) { int(0) } else { frac(rng.gen_range(1..=10), 2) })
        .expect("symmetric non-negative table")
}

/// Shortest-path closure of random positive weights: a metric with distinct points.
pub fn random_metric<R: Rng>(rng: &mut R, n: usize) -> DistanceSpace {
    let mut t: Vec<Vec<Rational>> = vec![vec![int(0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = frac(rng.gen_range(1..=12), 2);
            t[i][j] = w.clone();
            t[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &t[i][k] + &t[k][j];
                if via < t[i][j] {
                    t[i][j] = via;
                }
            }
        }
    }
    DistanceSpace::new(labels(n), t).expect("closure is symmetric")
}

/// A point of `P_d`: `f(x) = max_y d(x,y)` plus a random non-negative offset.
pub fn random_pd_point<R: Rng>(rng: &mut R, d: &DistanceSpace) -> PointFunction {
    PointFunction::new(
        (0..d.len())
            .map(|x| {
                let ecc = d.row(x).iter().max().cloned().unwrap_or_else(|| int(0));
                ecc + frac(rng.gen_range(0..=8), 4)
            })
            .collect(),
    )
}

/// A point of `κ(x)`: the retraction of a random `f0 ∈ P_d` with `f0(x) = 0`.
pub fn random_kappa_point<R: Rng>(rng: &mut R, d: &DistanceSpace, x: usize) -> TightSpanPoint {
    let mut f0 = random_pd_point(rng, d).into_values();
    for (y, v) in f0.iter_mut().enumerate() {
        if y == x {
            *v = int(0);
        } else {
            *v = v.clone().max(d.get(x, y).clone());
        }
    }
    let g = retract_to_td(d, &PointFunction::new(f0)).expect("f0 lies in P_d");
    debug_assert!(in_td(d, g.function()).unwrap_or(false));
    g
}

/// Diameter diversity of a random metric on `n` points.
pub fn random_diameter_diversity<R: Rng>(rng: &mut R, n: usize) -> Diversity {
    diameter_diversity(&random_metric(rng, n)).expect("random metrics are separated")
}

/// ℓ1 diversity of `n` distinct random points in the plane with small integer coordinates.
pub fn random_l1_diversity<R: Rng>(rng: &mut R, n: usize) -> Diversity {
    let mut pts: Vec<Vec<Rational>> = Vec::new();
    while pts.len() < n {
        let p = vec![int(rng.gen_range(0..6)), int(rng.gen_range(0..6))];
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    l1_diversity(labels(n), &pts).expect("distinct points")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::check_metric;
    use crate::tightspan::in_pd;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_meet_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..6 {
            let m = random_metric(&mut rng, n);
            assert!(check_metric(&m).is_ok());
            let d = random_distance_space(&mut rng, n);
            assert!(in_pd(&d, &random_pd_point(&mut rng, &d)).unwrap());
            let k = random_kappa_point(&mut rng, &d, 0);
            assert_eq!(k.function()[0], int(0));
        }
        assert_eq!(random_l1_diversity(&mut rng, 4).len(), 4);
        assert_eq!(random_diameter_diversity(&mut rng, 4).len(), 4);
    }
}
