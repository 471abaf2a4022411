//! Vertex enumeration by the double-description method.
//!
//! The polyhedron `{ x : A x ≥ b }` is homogenized to the cone
//! `{ (t, x) : t ≥ 0, A x - b t ≥ 0 }`. Extreme rays with `t > 0` are the vertices.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg::{independent_rows, rref};
use super::rational::{make_primitive, primitive_integer_vector};
use super::{LpError, Polyhedron, Rational, Relation};

pub const DEFAULT_RAY_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_subset(&self, o: &BitSet) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray {
    v: Vec<BigInt>,
    zeros: BitSet,
}

fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// All vertices of `poly`, sorted lexicographically. Empty when the polyhedron is empty or
/// contains a line.
pub fn enumerate_vertices(poly: &Polyhedron) -> Result<Vec<Vec<Rational>>, LpError> {
    enumerate_vertices_with_cap(poly, DEFAULT_RAY_CAP)
}

pub fn enumerate_vertices_with_cap(poly: &Polyhedron, cap: usize) -> Result<Vec<Vec<Rational>>, LpError> {
    let n = poly.dim();
    let dim = n + 1;
    let mut hrows: Vec<Vec<BigInt>> = Vec::new();
    let mut t_row = vec![BigInt::zero(); dim];
    t_row[0] = BigInt::from(1);
    hrows.push(t_row);
    for c in poly.constraints() {
        let mut r: Vec<Rational> = Vec::with_capacity(dim);
        r.push(-c.rhs.clone());
        r.extend(c.coeffs.iter().cloned());
        let r = primitive_integer_vector(&r);
        match c.relation {
            Relation::Ge => hrows.push(r),
            Relation::Le => hrows.push(r.into_iter().map(|v| -v).collect()),
            Relation::Eq => {
                hrows.push(r.iter().map(|v| -v).collect());
                hrows.push(r);
            }
        }
    }
    let as_rat: Vec<Vec<Rational>> =
        hrows.iter().map(|r| r.iter().map(|v| Rational::from_integer(v.clone())).collect()).collect();
    let basis_rows = independent_rows(&as_rat);
    if basis_rows.len() < dim {
        return Ok(Vec::new());
    }

    // Initial simplicial cone: columns of the inverse of the basis rows.
    let mut aug: Vec<Vec<Rational>> = basis_rows
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let mut row = as_rat[r].clone();
            for j in 0..dim {
                row.push(if i == j { Rational::from_integer(1.into()) } else { Rational::zero() });
            }
            row
        })
        .collect();
    rref(&mut aug);
    let m = hrows.len();
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vec<Rational> = (0..dim).map(|i| aug[i][dim + j].clone()).collect();
            let v = primitive_integer_vector(&col);
            let mut zeros = BitSet::new(m);
            for (k, &r) in basis_rows.iter().enumerate() {
                if k != j {
                    zeros.insert(r);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    let mut in_basis = vec![false; m];
    for &r in &basis_rows {
        in_basis[r] = true;
    }
    for h in (0..m).filter(|&h| !in_basis[h]) {
        let vals: Vec<BigInt> = rays.iter().map(|r| idot(&hrows[h], &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut new_rays: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(i, r)| i == p || i == q || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let sp = &vals[p];
                let sq = -&vals[q];
                let v: Vec<BigInt> = rays[q].v.iter().zip(&rays[p].v).map(|(a, b)| sp * a + &sq * b).collect();
                let mut zeros = common;
                zeros.insert(h);
                new_rays.push(Ray { v: make_primitive(v), zeros });
                if rays.len() + new_rays.len() > cap {
                    return Err(LpError::ResourceLimit { cap });
                }
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + new_rays.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                r.zeros.insert(h);
            }
            next.push(r);
        }
        next.extend(new_rays);
        rays = next;
    }

    let mut verts: Vec<Vec<Rational>> = rays
        .iter()
        .filter(|r| r.v[0].is_positive())
        .map(|r| r.v[1..].iter().map(|x| Rational::new(x.clone(), r.v[0].clone())).collect())
        .collect();
    verts.sort();
    verts.dedup();
    Ok(verts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::int;

    fn row(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn unit_square() {
        let mut p = Polyhedron::new(2);
        p.add(row(&[1, 0]), Relation::Ge, int(0)).unwrap();
        p.add(row(&[0, 1]), Relation::Ge, int(0)).unwrap();
        p.add(row(&[1, 0]), Relation::Le, int(1)).unwrap();
        p.add(row(&[0, 1]), Relation::Le, int(1)).unwrap();
        let v = enumerate_vertices(&p).unwrap();
        assert_eq!(v, vec![row(&[0, 0]), row(&[0, 1]), row(&[1, 0]), row(&[1, 1])]);
    }

    #[test]
    fn unbounded_region_keeps_vertices() {
        // x + y >= 1, x >= 0, y >= 0
        let mut p = Polyhedron::new(2);
        p.add(row(&[1, 1]), Relation::Ge, int(1)).unwrap();
        p.add(row(&[1, 0]), Relation::Ge, int(0)).unwrap();
        p.add(row(&[0, 1]), Relation::Ge, int(0)).unwrap();
        assert_eq!(enumerate_vertices(&p).unwrap(), vec![row(&[0, 1]), row(&[1, 0])]);
    }

    #[test]
    fn line_or_empty_gives_no_vertices() {
        let mut p = Polyhedron::new(2);
        p.add(row(&[1, 0]), Relation::Ge, int(0)).unwrap();
        assert!(enumerate_vertices(&p).unwrap().is_empty());
        let mut q = Polyhedron::new(1);
        q.add(row(&[1]), Relation::Ge, int(2)).unwrap();
        q.add(row(&[1]), Relation::Le, int(1)).unwrap();
        assert!(enumerate_vertices(&q).unwrap().is_empty());
    }

    #[test]
    fn ray_cap_is_enforced() {
        let mut p = Polyhedron::new(3);
        for i in 0..3 {
            let mut a = vec![int(0); 3];
            a[i] = int(1);
            p.add(a.clone(), Relation::Ge, int(0)).unwrap();
            p.add(a, Relation::Le, int(1)).unwrap();
        }
        assert_eq!(enumerate_vertices(&p).unwrap().len(), 8);
        assert_eq!(enumerate_vertices_with_cap(&p, 5), Err(LpError::ResourceLimit { cap: 5 }));
    }
}
