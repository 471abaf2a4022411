//! Finite distance spaces, metrics and the triangle / four-point checks.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Deref};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{common_denominator, int, Rational, Q};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistanceError {
    #[error("a distance space needs at least one point")]
    Empty,
    #[error("empty label at position {0}")]
    EmptyLabel(usize),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("row {row} has {found} entries, expected {expected}")]
    NotSquare { row: usize, expected: usize, found: usize },
    #[error("diagonal entry for {0:?} is not zero")]
    NonZeroDiagonal(String),
    #[error("table is not symmetric at ({0}, {1})")]
    Asymmetric(String, String),
    #[error("negative entry at ({0}, {1})")]
    Negative(String, String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("empty subset")]
    EmptySubset,
    #[error("not a metric: {0}")]
    NotMetric(Certificate),
}

/// Finite labelled point set with a symmetric, nonnegative table vanishing on the diagonal.
/// No triangle inequality is assumed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DistanceSpace {
    labels: Vec<String>,
    table: Vec<Vec<Rational>>,
}

impl DistanceSpace {
    pub fn new(labels: Vec<String>, table: Vec<Vec<Rational>>) -> Result<Self, DistanceError> {
        let n = labels.len();
        if n == 0 {
            return Err(DistanceError::Empty);
        }
        let mut seen = HashSet::new();
        for (i, l) in labels.iter().enumerate() {
            if l.trim().is_empty() {
                return Err(DistanceError::EmptyLabel(i));
            }
            if !seen.insert(l.as_str()) {
                return Err(DistanceError::DuplicateLabel(l.clone()));
            }
        }
        if table.len() != n {
            return Err(DistanceError::NotSquare { row: table.len(), expected: n, found: 0 });
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(DistanceError::NotSquare { row: i, expected: n, found: row.len() });
            }
        }
        for i in 0..n {
            if !table[i][i].is_zero() {
                return Err(DistanceError::NonZeroDiagonal(labels[i].clone()));
            }
            for j in 0..n {
                if table[i][j] != table[j][i] {
                    return Err(DistanceError::Asymmetric(labels[i].clone(), labels[j].clone()));
                }
                if table[i][j].is_negative() {
                    return Err(DistanceError::Negative(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Ok(DistanceSpace { labels, table })
    }

    /// Convenience constructor from integer rows.
    pub fn from_int_rows(labels: &[&str], rows: &[&[i64]]) -> Result<Self, DistanceError> {
        DistanceSpace::new(
            labels.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
        )
    }

    /// Builds the table from a pair function evaluated on `i < j`.
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> Rational) -> Result<Self, DistanceError> {
        let n = labels.len();
        let mut table = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                table[i][j] = v.clone();
                table[j][i] = v;
            }
        }
        DistanceSpace::new(labels, table)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn table(&self) -> &[Vec<Rational>] {
        &self.table
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.table[i][j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.table[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, DistanceError> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| DistanceError::UnknownLabel(label.to_string()))
    }

    pub fn dist(&self, a: &str, b: &str) -> Result<&Rational, DistanceError> {
        Ok(self.get(self.index_of(a)?, self.index_of(b)?))
    }

    /// `max d(x, y)`.
    pub fn diameter(&self) -> Rational {
        self.table.iter().flat_map(|r| r.iter()).max().cloned().unwrap_or_else(Rational::zero)
    }

    /// True when every entry is zero.
    pub fn is_null(&self) -> bool {
        self.table.iter().flatten().all(Zero::is_zero)
    }

    /// Principal submatrix on `subset` (in the given order).
    pub fn restrict<S: AsRef<str>>(&self, subset: &[S]) -> Result<DistanceSpace, DistanceError> {
        if subset.is_empty() {
            return Err(DistanceError::EmptySubset);
        }
        let idx: Vec<usize> = subset.iter().map(|s| self.index_of(s.as_ref())).collect::<Result<_, _>>()?;
        self.restrict_indices(&idx)
    }

    pub fn restrict_indices(&self, idx: &[usize]) -> Result<DistanceSpace, DistanceError> {
        DistanceSpace::new(
            idx.iter().map(|&i| self.labels[i].clone()).collect(),
            idx.iter().map(|&i| idx.iter().map(|&j| self.table[i][j].clone()).collect()).collect(),
        )
    }

    /// Unordered pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    }
}

impl fmt::Display for DistanceSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.labels.join(" "))?;
        for row in &self.table {
            let cells: Vec<String> = row.iter().map(|q| q.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// On-disk form: `{"labels": [...], "matrix": [[...]]}`.
#[derive(Serialize, Deserialize)]
pub struct DistanceSpaceJson {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<Q>>,
}

impl From<&DistanceSpace> for DistanceSpaceJson {
    fn from(d: &DistanceSpace) -> Self {
        DistanceSpaceJson {
            labels: d.labels.clone(),
            matrix: d.table.iter().map(|r| r.iter().cloned().map(Q).collect()).collect(),
        }
    }
}

impl TryFrom<DistanceSpaceJson> for DistanceSpace {
    type Error = DistanceError;
    fn try_from(j: DistanceSpaceJson) -> Result<Self, DistanceError> {
        DistanceSpace::new(j.labels, j.matrix.into_iter().map(|r| r.into_iter().map(|q| q.0).collect()).collect())
    }
}

impl Serialize for DistanceSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DistanceSpaceJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DistanceSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = DistanceSpaceJson::deserialize(d)?;
        DistanceSpace::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// A distance space satisfying the triangle inequality. Zero distances between distinct
/// points are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Metric(DistanceSpace);

impl Metric {
    pub fn new(d: DistanceSpace) -> Result<Metric, DistanceError> {
        let cert = check_metric(&d);
        if cert.is_ok() {
            Ok(Metric(d))
        } else {
            Err(DistanceError::NotMetric(cert))
        }
    }

    pub fn space(&self) -> &DistanceSpace {
        &self.0
    }

    pub fn into_space(self) -> DistanceSpace {
        self.0
    }
}

impl Deref for Metric {
    type Target = DistanceSpace;
    fn deref(&self) -> &DistanceSpace {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Ok,
    MetricViolation,
    FourpointViolation,
    ExtFourpointViolation,
    DiversityAxiomViolation,
    RepresentationMismatch,
}

/// Outcome of a condition check. For a violation, `witness` names the points (or subsets)
/// and `lhs > rhs` is the failing inequality:
///
/// * metric, witness `(a, b, c)`: `lhs = d(a,c)`, `rhs = d(a,b) + d(b,c)`.
/// * four-point, witness `(w, x, y, z)`: `lhs = d(x,y) + d(w,z)`,
///   `rhs = max{d(w,x) + d(y,z), d(x,z) + d(w,y)}`.
/// * extended four-point, witness `(w, x, y, z)`: `lhs = d(x,y) + d(z,w)`, `rhs` the
///   eight-term maximum, see [`ext_four_point_rhs`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub witness: Vec<String>,
    pub lhs: Q,
    pub rhs: Q,
}

impl Certificate {
    pub fn ok() -> Certificate {
        Certificate { kind: CertificateKind::Ok, witness: Vec::new(), lhs: Q(int(0)), rhs: Q(int(0)) }
    }

    pub fn violation(kind: CertificateKind, witness: Vec<String>, lhs: Rational, rhs: Rational) -> Self {
        Certificate { kind, witness, lhs: Q(lhs), rhs: Q(rhs) }
    }

    pub fn is_ok(&self) -> bool {
        self.kind == CertificateKind::Ok
    }

    /// Re-evaluates the cited inequality on `d` and checks that it reproduces `lhs` and `rhs`
    /// with `lhs > rhs`. Only meaningful for the three distance kinds.
    pub fn reproduces(&self, d: &DistanceSpace) -> bool {
        let idx: Option<Vec<usize>> = self.witness.iter().map(|l| d.index_of(l).ok()).collect();
        let Some(idx) = idx else {
            return false;
        };
        let g = |a: usize, b: usize| d.get(idx[a], idx[b]).clone();
        let (lhs, rhs) = match (self.kind, idx.len()) {
            (CertificateKind::MetricViolation, 3) => (g(0, 2), g(0, 1) + g(1, 2)),
            (CertificateKind::FourpointViolation, 4) => {
                let (w, x, y, z) = (0, 1, 2, 3);
                (g(x, y) + g(w, z), (g(w, x) + g(y, z)).max(g(x, z) + g(w, y)))
            }
            (CertificateKind::ExtFourpointViolation, 4) => {
                (g(1, 2) + g(3, 0), ext_four_point_rhs(d, idx[0], idx[1], idx[2], idx[3]))
            }
            _ => return false,
        };
        lhs == self.lhs.0 && rhs == self.rhs.0 && lhs > rhs
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        write!(f, "{:?} at ({}): {} > {}", self.kind, self.witness.join(", "), self.lhs, self.rhs)
    }
}

/// The right-hand side of the extended four-point inequality for the ordered quadruple
/// `(w, x, y, z)`.
pub fn ext_four_point_rhs(d: &DistanceSpace, w: usize, x: usize, y: usize, z: usize) -> Rational {
    let g = |a: usize, b: usize| d.get(a, b);
    let two = int(2);
    [
        g(x, y).clone(),
        g(w, z).clone(),
        g(w, x) + g(y, z),
        g(x, z) + g(w, y),
        (g(x, y) + g(y, z) + g(z, x)) / &two,
        (g(x, y) + g(y, w) + g(w, x)) / &two,
        (g(x, z) + g(z, w) + g(w, x)) / &two,
        (g(y, z) + g(z, w) + g(w, y)) / &two,
    ]
    .into_iter()
    .max()
    .expect("eight terms")
}

/// Integer image of the table: every entry times the common denominator. Comparisons of
/// sums with halves are done after doubling, so the scans never divide.
enum Scaled {
    Small(Vec<Vec<i128>>),
    Big(Vec<Vec<BigInt>>),
}

fn scaled(d: &DistanceSpace) -> Scaled {
    let den = common_denominator(d.table.iter().flatten());
    let big: Vec<Vec<BigInt>> = d.table.iter().map(|r| r.iter().map(|q| (q * &den).to_integer()).collect()).collect();
    // Leave head-room for sums of three doubled entries.
    let limit = BigInt::from(1u64 << 60) * BigInt::from(1u64 << 60);
    if big.iter().flatten().all(|v| v.abs() < limit) {
        Scaled::Small(big.iter().map(|r| r.iter().map(|v| v.to_i128().expect("bounded")).collect()).collect())
    } else {
        Scaled::Big(big)
    }
}

fn scan_metric<T: Clone + Ord>(t: &[Vec<T>]) -> Option<(usize, usize, usize)>
where
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    let n = t.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if t[a][c] > &t[a][b] + &t[b][c] {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

fn scan_four_point<T: Clone + Ord>(t: &[Vec<T>]) -> Option<[usize; 4]>
where
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    let n = t.len();
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = &t[x][y] + &t[w][z];
                    let r1 = &t[w][x] + &t[y][z];
                    let r2 = &t[x][z] + &t[w][y];
                    if lhs > r1 && lhs > r2 {
                        return Some([w, x, y, z]);
                    }
                }
            }
        }
    }
    None
}

fn scan_ext_four_point<T: Clone + Ord>(t: &[Vec<T>]) -> Option<[usize; 4]>
where
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    let n = t.len();
    let dbl = |v: &T| v + v;
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = &t[x][y] + &t[z][w];
                    // Quick accept on the two integral terms that most often dominate.
                    let s1 = &t[w][x] + &t[y][z];
                    let s2 = &t[x][z] + &t[w][y];
                    if lhs <= s1 || lhs <= s2 || lhs <= t[x][y] || lhs <= t[w][z] {
                        continue;
                    }
                    let lhs2 = dbl(&lhs);
                    let h1 = &(&t[x][y] + &t[y][z]) + &t[z][x];
                    let h2 = &(&t[x][y] + &t[y][w]) + &t[w][x];
                    let h3 = &(&t[x][z] + &t[z][w]) + &t[w][x];
                    let h4 = &(&t[y][z] + &t[z][w]) + &t[w][y];
                    if lhs2 > h1 && lhs2 > h2 && lhs2 > h3 && lhs2 > h4 {
                        return Some([w, x, y, z]);
                    }
                }
            }
        }
    }
    None
}

fn names(d: &DistanceSpace, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| d.labels[i].clone()).collect()
}

/// Triangle inequality `d(a,c) ≤ d(a,b) + d(b,c)` over all ordered triples, scanned
/// lexicographically; the first violation is reported.
pub fn check_metric(d: &DistanceSpace) -> Certificate {
    let hit = match scaled(d) {
        Scaled::Small(t) => scan_metric(&t),
        Scaled::Big(t) => scan_metric(&t),
    };
    match hit {
        None => Certificate::ok(),
        Some((a, b, c)) => Certificate::violation(
            CertificateKind::MetricViolation,
            names(d, &[a, b, c]),
            d.get(a, c).clone(),
            d.get(a, b) + d.get(b, c),
        ),
    }
}

/// Classical four-point condition over all ordered quadruples (with repetition).
pub fn check_four_point(d: &DistanceSpace) -> Certificate {
    let hit = match scaled(d) {
        Scaled::Small(t) => scan_four_point(&t),
        Scaled::Big(t) => scan_four_point(&t),
    };
    match hit {
        None => Certificate::ok(),
        Some([w, x, y, z]) => Certificate::violation(
            CertificateKind::FourpointViolation,
            names(d, &[w, x, y, z]),
            d.get(x, y) + d.get(w, z),
            (d.get(w, x) + d.get(y, z)).max(d.get(x, z) + d.get(w, y)),
        ),
    }
}

/// Extended four-point condition over all ordered quadruples (with repetition).
pub fn check_extended_four_point(d: &DistanceSpace) -> Certificate {
    let hit = match scaled(d) {
        Scaled::Small(t) => scan_ext_four_point(&t),
        Scaled::Big(t) => scan_ext_four_point(&t),
    };
    match hit {
        None => Certificate::ok(),
        Some([w, x, y, z]) => Certificate::violation(
            CertificateKind::ExtFourpointViolation,
            names(d, &[w, x, y, z]),
            d.get(x, y) + d.get(z, w),
            ext_four_point_rhs(d, w, x, y, z),
        ),
    }
}

/// Restriction of `d` to the distinct labels of a certificate's witness, in first-seen order.
pub fn witness_subspace(d: &DistanceSpace, cert: &Certificate) -> Result<DistanceSpace, DistanceError> {
    let mut labels: Vec<&str> = Vec::new();
    for w in &cert.witness {
        if !labels.contains(&w.as_str()) {
            labels.push(w);
        }
    }
    d.restrict(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn five_point() -> DistanceSpace {
        DistanceSpace::from_int_rows(
            &["x", "y", "z", "v", "w"],
            &[&[0, 9, 1, 6, 9], &[9, 0, 3, 1, 10], &[1, 3, 0, 0, 2], &[6, 1, 0, 0, 7], &[9, 10, 2, 7, 0]],
        )
        .unwrap()
    }

    fn octagon() -> DistanceSpace {
        DistanceSpace::from_int_rows(
            &["w", "x", "y", "z"],
            &[&[0, 1, 3, 1], &[1, 0, 1, 3], &[3, 1, 0, 1], &[1, 3, 1, 0]],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let l = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(DistanceSpace::new(vec![], vec![]), Err(DistanceError::Empty));
        assert!(matches!(
            DistanceSpace::new(l(&["a", "a"]), vec![vec![int(0); 2]; 2]),
            Err(DistanceError::DuplicateLabel(_))
        ));
        assert!(matches!(
            DistanceSpace::new(l(&["a", ""]), vec![vec![int(0); 2]; 2]),
            Err(DistanceError::EmptyLabel(1))
        ));
        assert!(matches!(
            DistanceSpace::from_int_rows(&["a", "b"], &[&[0, 1], &[2, 0]]),
            Err(DistanceError::Asymmetric(..))
        ));
        assert!(matches!(
            DistanceSpace::from_int_rows(&["a", "b"], &[&[1, 1], &[1, 0]]),
            Err(DistanceError::NonZeroDiagonal(_))
        ));
        assert!(matches!(
            DistanceSpace::from_int_rows(&["a", "b"], &[&[0, -1], &[-1, 0]]),
            Err(DistanceError::Negative(..))
        ));
    }

    #[test]
    fn five_point_triangle_violation() {
        let c = check_metric(&five_point());
        assert_eq!(c.kind, CertificateKind::MetricViolation);
        assert_eq!(c.witness, vec!["x", "z", "y"]);
        assert_eq!((c.lhs.0.clone(), c.rhs.0.clone()), (int(9), int(4)));
        assert!(c.reproduces(&five_point()));
    }

    #[test]
    fn five_point_is_ext_four_point() {
        assert!(check_extended_four_point(&five_point()).is_ok());
        assert_eq!(five_point().diameter(), int(10));
    }

    #[test]
    fn octagon_violates_ext_four_point() {
        let c = check_extended_four_point(&octagon());
        assert_eq!(c.kind, CertificateKind::ExtFourpointViolation);
        assert_eq!((c.lhs.0.clone(), c.rhs.0.clone()), (int(6), int(3)));
        assert!(c.reproduces(&octagon()));
    }

    #[test]
    fn trivial_spaces_pass() {
        let one = DistanceSpace::from_int_rows(&["a"], &[&[0]]).unwrap();
        assert!(check_metric(&one).is_ok());
        let zero = DistanceSpace::from_fn((0..5).map(|i| format!("p{i}")).collect(), |_, _| int(0)).unwrap();
        assert!(check_metric(&zero).is_ok());
        assert!(zero.is_null());
    }

    #[test]
    fn line_and_square() {
        let line =
            DistanceSpace::from_fn((0..4).map(|i| format!("p{i}")).collect(), |i, j| int((j - i) as i64)).unwrap();
        assert!(check_four_point(&line).is_ok());
        let square = DistanceSpace::from_int_rows(
            &["a", "b", "c", "d"],
            &[&[0, 1, 2, 1], &[1, 0, 1, 2], &[2, 1, 0, 1], &[1, 2, 1, 0]],
        )
        .unwrap();
        let c = check_four_point(&square);
        assert_eq!(c.kind, CertificateKind::FourpointViolation);
        assert!(c.reproduces(&square));
    }

    #[test]
    fn restriction() {
        let r = five_point().restrict(&["x", "y", "z"]).unwrap();
        assert_eq!(r.table()[0][1], int(9));
        assert_eq!(r.table()[0][2], int(1));
        assert_eq!(r.table()[1][2], int(3));
        assert_eq!(five_point().restrict(five_point().labels()).unwrap(), five_point());
        let single = five_point().restrict(&["v"]).unwrap();
        assert_eq!(single.table(), &[vec![int(0)]]);
        assert!(matches!(five_point().restrict(&["q"]), Err(DistanceError::UnknownLabel(_))));
    }

    #[test]
    fn json_roundtrip() {
        let s = serde_json::to_string(&five_point()).unwrap();
        let back: DistanceSpace = serde_json::from_str(&s).unwrap();
        assert_eq!(back, five_point());
    }
}
