use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::tree::{EdgeId, TreePoint, VertexId, WeightedTree};
use super::TreeError;
use crate::exactnum::{Rational, Q};

/// Closed piece `[from, to]` of an edge, offsets measured from the edge's `a` end.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub edge: EdgeId,
    pub from: Rational,
    pub to: Rational,
}

impl Segment {
    pub fn new(edge: EdgeId, from: Rational, to: Rational) -> Segment {
        Segment { edge, from, to }
    }
}

/// Closed connected subset of a tree: whole vertices plus closed edge segments.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Subtree {
    pub vertices: BTreeSet<VertexId>,
    pub segments: Vec<Segment>,
}

impl Subtree {
    pub fn from_vertex(v: VertexId) -> Subtree {
        Subtree { vertices: BTreeSet::from([v]), segments: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.segments.is_empty()
    }

    fn points(&self) -> Vec<TreePoint> {
        let mut pts: Vec<TreePoint> = self.vertices.iter().map(|&v| TreePoint::vertex(v)).collect();
        for s in &self.segments {
            pts.push(TreePoint::on_edge(s.edge, s.from.clone()));
            pts.push(TreePoint::on_edge(s.edge, s.to.clone()));
        }
        pts
    }

    /// Non-empty, in range and connected.
    pub fn validate(&self, tree: &WeightedTree) -> Result<(), TreeError> {
        if self.is_empty() {
            return Err(TreeError::InvalidSubtree("empty subtree".into()));
        }
        for &v in &self.vertices {
            if v >= tree.vertex_count() {
                return Err(TreeError::InvalidSubtree(format!("vertex {v} out of range")));
            }
        }
        for s in &self.segments {
            if s.edge >= tree.edges().len() {
                return Err(TreeError::InvalidSubtree(format!("edge {} out of range", s.edge)));
            }
            if s.from.is_negative() || s.from > s.to || s.to > tree.edge(s.edge).length {
                return Err(TreeError::InvalidSubtree(format!(
                    "segment [{}, {}] does not fit edge {}",
                    s.from, s.to, s.edge
                )));
            }
        }
        let r = Refinement::new(tree, &self.points())?;
        let (verts, edges) = r.members(self);
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for e in edges {
            let ed = r.tree.edge(e);
            adj.entry(ed.a).or_default().push(ed.b);
            adj.entry(ed.b).or_default().push(ed.a);
        }
        let start = *verts.iter().next().expect("non-empty");
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        if seen != verts {
            return Err(TreeError::InvalidSubtree("subtree is not connected".into()));
        }
        Ok(())
    }
}

/// A tree with extra vertices inserted at given edge points, keeping track of where each new
/// edge came from.
pub(crate) struct Refinement {
    pub tree: WeightedTree,
    /// For each refined edge: original edge and its offset interval.
    pub pieces: Vec<(EdgeId, Rational, Rational)>,
    cuts: Vec<Vec<(Rational, VertexId)>>,
    original_vertices: usize,
}

impl Refinement {
    pub fn new(tree: &WeightedTree, points: &[TreePoint]) -> Result<Refinement, TreeError> {
        let m = tree.edges().len();
        let mut offsets: Vec<BTreeSet<Rational>> = vec![BTreeSet::new(); m];
        for p in points {
            if let TreePoint::OnEdge { edge, offset } = tree.normalize_point(p)? {
                offsets[edge].insert(offset.0);
            }
        }
        let n0 = tree.vertex_count();
        let mut next = n0;
        let mut cuts: Vec<Vec<(Rational, VertexId)>> = Vec::with_capacity(m);
        for o in &offsets {
            cuts.push(
                o.iter()
                    .map(|q| {
                        next += 1;
                        (q.clone(), next - 1)
                    })
                    .collect(),
            );
        }
        let mut edges = Vec::new();
        let mut pieces = Vec::new();
        for (e, ed) in tree.edges().iter().enumerate() {
            let mut prev = (Rational::zero(), ed.a);
            for (q, v) in &cuts[e] {
                edges.push((prev.1, *v, q - &prev.0));
                pieces.push((e, prev.0.clone(), q.clone()));
                prev = (q.clone(), *v);
            }
            edges.push((prev.1, ed.b, &ed.length - &prev.0));
            pieces.push((e, prev.0, ed.length.clone()));
        }
        let refined = WeightedTree::new(next, edges)?;
        Ok(Refinement { tree: refined, pieces, cuts, original_vertices: n0 })
    }

    pub fn vertex_of(&self, original: &WeightedTree, p: &TreePoint) -> VertexId {
        match original.normalize_point(p).expect("validated point") {
            TreePoint::Vertex { vertex } => vertex,
            TreePoint::OnEdge { edge, offset } => {
                self.cuts[edge].iter().find(|(q, _)| *q == offset.0).expect("refined at every listed point").1
            }
        }
    }

    pub fn is_original(&self, v: VertexId) -> bool {
        v < self.original_vertices
    }

    /// Refined vertices and edges covered by `s`.
    pub fn members(&self, s: &Subtree) -> (BTreeSet<VertexId>, Vec<EdgeId>) {
        let mut verts: BTreeSet<VertexId> = s.vertices.iter().copied().collect();
        let mut edges = Vec::new();
        for seg in &s.segments {
            let (from_v, to_v) = (self.point_vertex(seg.edge, &seg.from), self.point_vertex(seg.edge, &seg.to));
            verts.insert(from_v);
            verts.insert(to_v);
            for (k, (e, a, b)) in self.pieces.iter().enumerate() {
                if *e == seg.edge && seg.from <= *a && *b <= seg.to {
                    let ed = self.tree.edge(k);
                    verts.insert(ed.a);
                    verts.insert(ed.b);
                    edges.push(k);
                }
            }
        }
        (verts, edges)
    }

    fn point_vertex(&self, edge: EdgeId, offset: &Rational) -> VertexId {
        let first = self.pieces.iter().position(|(e, _, _)| *e == edge).expect("edge has pieces");
        if offset.is_zero() {
            return self.tree.edge(first).a;
        }
        self.cuts[edge].iter().find(|(q, _)| q == offset).map(|&(_, v)| v).unwrap_or_else(|| {
            // The far end of the edge.
            let last = self.pieces.iter().rposition(|(e, _, _)| *e == edge).expect("edge has pieces");
            self.tree.edge(last).b
        })
    }

    /// Edges of the convex hull of `terminals` (refined vertex ids).
    pub fn hull_edges(&self, terminals: &BTreeSet<VertexId>) -> Vec<EdgeId> {
        let Some(&root) = terminals.iter().next() else {
            return Vec::new();
        };
        let n = self.tree.vertex_count();
        let mut order = Vec::with_capacity(n);
        let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            for &(w, e) in self.tree.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, e));
                    stack.push(w);
                }
            }
        }
        let mut count: Vec<usize> = (0..n).map(|v| usize::from(terminals.contains(&v))).collect();
        let mut out = Vec::new();
        for &v in order.iter().rev() {
            if let Some((p, e)) = parent[v] {
                if count[v] > 0 {
                    out.push(e);
                }
                count[p] += count[v];
            }
        }
        out.sort_unstable();
        out
    }
}

/// Minimum path length between two closed subtrees (zero when they meet).
pub fn subtree_distance(tree: &WeightedTree, s1: &Subtree, s2: &Subtree) -> Result<Rational, TreeError> {
    s1.validate(tree)?;
    s2.validate(tree)?;
    Ok(subtree_distance_unchecked(tree, s1, s2))
}

pub(crate) fn subtree_distance_unchecked(tree: &WeightedTree, s1: &Subtree, s2: &Subtree) -> Rational {
    let mut pts = s1.points();
    pts.extend(s2.points());
    let r = Refinement::new(tree, &pts).expect("validated subtrees");
    let (m1, _) = r.members(s1);
    let (m2, _) = r.members(s2);
    let sources: Vec<VertexId> = m1.into_iter().collect();
    let dist = r.tree.distances_from_set(&sources);
    m2.into_iter().map(|v| dist[v].clone()).min().expect("non-empty subtree")
}

/// Length of the union of the paths between the given points.
pub fn hull_length_of_points(tree: &WeightedTree, points: &[TreePoint]) -> Result<Rational, TreeError> {
    let r = Refinement::new(tree, points)?;
    let terminals: BTreeSet<VertexId> = points.iter().map(|p| r.vertex_of(tree, p)).collect();
    Ok(r.hull_edges(&terminals).into_iter().fold(Rational::zero(), |acc, e| acc + &r.tree.edge(e).length))
}

/// [`hull_length_of_points`] over named anchors.
pub fn hull_length(tree: &WeightedTree, anchors: &[&str]) -> Result<Rational, TreeError> {
    let pts: Vec<TreePoint> = anchors.iter().map(|a| tree.anchor(a).cloned()).collect::<Result<_, _>>()?;
    hull_length_of_points(tree, &pts)
}

pub fn total_length(tree: &WeightedTree) -> Rational {
    tree.total_length()
}

/// Convex hull of `points` as a subtree of `tree`.
pub fn hull_subtree(tree: &WeightedTree, points: &[TreePoint]) -> Result<Subtree, TreeError> {
    if points.is_empty() {
        return Err(TreeError::InvalidSubtree("hull of no points".into()));
    }
    let r = Refinement::new(tree, points)?;
    let terminals: BTreeSet<VertexId> = points.iter().map(|p| r.vertex_of(tree, p)).collect();
    let hull = r.hull_edges(&terminals);
    if hull.is_empty() {
        return Ok(match tree.normalize_point(&points[0])? {
            TreePoint::Vertex { vertex } => Subtree::from_vertex(vertex),
            TreePoint::OnEdge { edge, offset } => {
                Subtree { vertices: BTreeSet::new(), segments: vec![Segment::new(edge, offset.0.clone(), offset.0)] }
            }
        });
    }
    let mut vertices = BTreeSet::new();
    let mut by_edge: BTreeMap<EdgeId, Vec<(Rational, Rational)>> = BTreeMap::new();
    for e in hull {
        let ed = r.tree.edge(e);
        for v in [ed.a, ed.b] {
            if r.is_original(v) {
                vertices.insert(v);
            }
        }
        let (orig, a, b) = &r.pieces[e];
        by_edge.entry(*orig).or_default().push((a.clone(), b.clone()));
    }
    let mut segments = Vec::new();
    for (edge, mut ivs) in by_edge {
        ivs.sort();
        let mut cur = ivs[0].clone();
        for (a, b) in ivs.into_iter().skip(1) {
            if a == cur.1 {
                cur.1 = b;
            } else {
                segments.push(Segment::new(edge, cur.0, cur.1));
                cur = (a, b);
            }
        }
        segments.push(Segment::new(edge, cur.0, cur.1));
    }
    Ok(Subtree { vertices, segments })
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SegmentJson {
    pub edge: EdgeId,
    pub from_offset: Q,
    pub to_offset: Q,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SubtreeJson {
    pub label: String,
    pub vertices: Vec<VertexId>,
    #[serde(default)]
    pub segments: Vec<SegmentJson>,
}

impl SubtreeJson {
    pub fn new(label: &str, s: &Subtree) -> SubtreeJson {
        SubtreeJson {
            label: label.to_string(),
            vertices: s.vertices.iter().copied().collect(),
            segments: s
                .segments
                .iter()
                .map(|g| SegmentJson { edge: g.edge, from_offset: Q(g.from.clone()), to_offset: Q(g.to.clone()) })
                .collect(),
        }
    }

    pub fn into_subtree(self) -> (String, Subtree) {
        (
            self.label,
            Subtree {
                vertices: self.vertices.into_iter().collect(),
                segments: self
                    .segments
                    .into_iter()
                    .map(|g| Segment::new(g.edge, g.from_offset.0, g.to_offset.0))
                    .collect(),
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{frac, int};

    fn star() -> WeightedTree {
        let mut t = WeightedTree::new(4, vec![(0, 1, int(2)), (0, 2, int(2)), (0, 3, int(2))]).unwrap();
        for (name, v) in [("a", 1), ("b", 2), ("c", 3)] {
            t.add_anchor(name, TreePoint::vertex(v)).unwrap();
        }
        t
    }

    #[test]
    fn star_hulls() {
        let t = star();
        assert_eq!(hull_length(&t, &["a", "b", "c"]).unwrap(), int(6));
        assert_eq!(hull_length(&t, &["a", "b"]).unwrap(), t.tree_distance("a", "b").unwrap());
        assert_eq!(hull_length(&t, &["a"]).unwrap(), int(0));
        assert_eq!(hull_length(&t, &[]).unwrap(), int(0));
        assert!(matches!(hull_length(&t, &["q"]), Err(TreeError::UnknownAnchor(_))));
    }

    #[test]
    fn point_distances() {
        let t = WeightedTree::new(2, vec![(0, 1, int(3))]).unwrap();
        let mid = TreePoint::on_edge(0, int(1));
        assert_eq!(t.point_distance(&mid, &TreePoint::vertex(1)).unwrap(), int(2));
        assert_eq!(t.point_distance(&mid, &mid).unwrap(), int(0));
        assert_eq!(t.point_distance(&TreePoint::vertex(0), &TreePoint::vertex(1)).unwrap(), int(3));
    }

    #[test]
    fn segment_distances() {
        let t = star();
        let s1 = Subtree { vertices: BTreeSet::new(), segments: vec![Segment::new(0, frac(1, 2), int(1))] };
        let s2 = Subtree { vertices: BTreeSet::new(), segments: vec![Segment::new(1, int(1), int(2))] };
        assert_eq!(subtree_distance(&t, &s1, &s2).unwrap(), frac(3, 2));
        assert_eq!(subtree_distance(&t, &s1, &s1).unwrap(), int(0));
        let whole = t.whole();
        assert_eq!(subtree_distance(&t, &whole, &s2).unwrap(), int(0));
    }

    #[test]
    fn invalid_subtrees() {
        let t = star();
        let apart = Subtree { vertices: BTreeSet::from([1, 2]), segments: Vec::new() };
        assert!(matches!(apart.validate(&t), Err(TreeError::InvalidSubtree(_))));
        let long = Subtree { vertices: BTreeSet::new(), segments: vec![Segment::new(0, int(0), int(3))] };
        assert!(long.validate(&t).is_err());
        assert!(Subtree::default().validate(&t).is_err());
        let joined = Subtree {
            vertices: BTreeSet::from([1, 2]),
            segments: vec![Segment::new(0, int(0), int(2)), Segment::new(1, int(0), int(2))],
        };
        assert!(joined.validate(&t).is_ok());
    }

    #[test]
    fn hull_with_edge_points() {
        let t = star();
        let pts = [TreePoint::on_edge(0, int(1)), TreePoint::on_edge(1, frac(1, 2))];
        let h = hull_subtree(&t, &pts).unwrap();
        assert_eq!(h.vertices, BTreeSet::from([0]));
        assert_eq!(h.segments.len(), 2);
        assert_eq!(hull_length_of_points(&t, &pts).unwrap(), frac(3, 2));
    }
}
