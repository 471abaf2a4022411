use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::TreeError;
use crate::exactnum::{Rational, Q};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub length: Rational,
}

/// A point of a tree: a vertex, or an interior point of an edge at `offset` from its `a` end.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreePoint {
    Vertex { vertex: VertexId },
    OnEdge { edge: EdgeId, offset: Q },
}

impl TreePoint {
    pub fn vertex(v: VertexId) -> TreePoint {
        TreePoint::Vertex { vertex: v }
    }

    pub fn on_edge(edge: EdgeId, offset: Rational) -> TreePoint {
        TreePoint::OnEdge { edge, offset: Q(offset) }
    }
}

/// Finite tree with exact positive edge lengths and named anchor points.
#[derive(Clone, Debug)]
pub struct WeightedTree {
    vertex_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    anchors: BTreeMap<String, TreePoint>,
}

// Adjacency order depends on construction history and is not compared.
impl PartialEq for WeightedTree {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.edges == other.edges && self.anchors == other.anchors
    }
}

impl Eq for WeightedTree {}

impl WeightedTree {
    /// Single-vertex tree.
    pub fn point() -> WeightedTree {
        WeightedTree { vertex_count: 1, edges: Vec::new(), adjacency: vec![Vec::new()], anchors: BTreeMap::new() }
    }

    /// Builds a tree on vertices `0..vertex_count`. Zero-length edges are contracted, which
    /// renumbers vertices; use [`WeightedTree::with_contraction`] to get the renumbering.
    pub fn new(vertex_count: usize, edges: Vec<(VertexId, VertexId, Rational)>) -> Result<Self, TreeError> {
        Ok(Self::with_contraction(vertex_count, edges)?.0)
    }

    /// Like [`WeightedTree::new`], also returning the new id of every input vertex.
    pub fn with_contraction(
        vertex_count: usize,
        edges: Vec<(VertexId, VertexId, Rational)>,
    ) -> Result<(Self, Vec<VertexId>), TreeError> {
        if vertex_count == 0 {
            return Err(TreeError::InvalidTree("a tree needs at least one vertex".into()));
        }
        let mut parent: Vec<usize> = (0..vertex_count).collect();
        fn find(p: &mut [usize], v: usize) -> usize {
            let mut r = v;
            while p[r] != r {
                r = p[r];
            }
            p[v] = r;
            r
        }
        for (a, b, len) in &edges {
            if *a >= vertex_count || *b >= vertex_count {
                return Err(TreeError::InvalidTree(format!("edge ({a}, {b}) out of range")));
            }
            if len.is_negative() {
                return Err(TreeError::InvalidTree(format!("negative length on edge ({a}, {b})")));
            }
            if len.is_zero() {
                let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
                if ra == rb {
                    return Err(TreeError::InvalidTree("cycle of zero-length edges".into()));
                }
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut new_id = vec![usize::MAX; vertex_count];
        let mut count = 0;
        for v in 0..vertex_count {
            let r = find(&mut parent, v);
            if new_id[r] == usize::MAX {
                new_id[r] = count;
                count += 1;
            }
            new_id[v] = new_id[r];
        }
        let mut tree = WeightedTree {
            vertex_count: count,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); count],
            anchors: BTreeMap::new(),
        };
        for (a, b, len) in edges {
            if len.is_zero() {
                continue;
            }
            let (a, b) = (new_id[a], new_id[b]);
            if a == b {
                return Err(TreeError::InvalidTree("edge closes a cycle".into()));
            }
            tree.push_edge(a, b, len);
        }
        if tree.edges.len() + 1 != count || !tree.is_connected() {
            return Err(TreeError::InvalidTree("edges do not form a spanning tree".into()));
        }
        Ok((tree, new_id))
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub(crate) fn push_vertex(&mut self) -> VertexId {
        self.adjacency.push(Vec::new());
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub(crate) fn push_edge(&mut self, a: VertexId, b: VertexId, length: Rational) -> EdgeId {
        let e = self.edges.len();
        self.edges.push(Edge { a, b, length });
        self.adjacency[a].push((b, e));
        self.adjacency[b].push((a, e));
        e
    }

    /// Subdivides edge `e` at `offset` from its `a` end, returning the new vertex. Edge `e`
    /// keeps its `a` end; the new edge gets the `b` end.
    pub(crate) fn split_edge(&mut self, e: EdgeId, offset: &Rational) -> VertexId {
        let Edge { a, b, length } = self.edges[e].clone();
        let v = self.push_vertex();
        self.edges[e] = Edge { a, b: v, length: offset.clone() };
        let ne = self.edges.len();
        self.edges.push(Edge { a: v, b, length: &length - offset });
        for slot in self.adjacency[a].iter_mut() {
            if slot.1 == e {
                *slot = (v, e);
            }
        }
        for slot in self.adjacency[b].iter_mut() {
            if slot.1 == e {
                *slot = (v, ne);
            }
        }
        self.adjacency[v] = vec![(a, e), (b, ne)];
        v
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().fold(Rational::zero(), |acc, e| acc + &e.length)
    }

    /// Mutable access to an edge length, for perturbation tests. Lengths must stay positive.
    pub fn set_edge_length(&mut self, e: EdgeId, length: Rational) -> Result<(), TreeError> {
        if !length.is_positive() {
            return Err(TreeError::InvalidTree("edge lengths must be positive".into()));
        }
        self.edges[e].length = length;
        Ok(())
    }

    /// Checks a point and maps edge endpoints to vertices.
    pub fn normalize_point(&self, p: &TreePoint) -> Result<TreePoint, TreeError> {
        match p {
            TreePoint::Vertex { vertex } if *vertex < self.vertex_count => Ok(p.clone()),
            TreePoint::OnEdge { edge, offset } if *edge < self.edges.len() => {
                let e = &self.edges[*edge];
                if offset.0.is_negative() || offset.0 > e.length {
                    Err(TreeError::InvalidPoint(format!("offset {} outside edge {edge}", offset.0)))
                } else if offset.0.is_zero() {
                    Ok(TreePoint::vertex(e.a))
                } else if offset.0 == e.length {
                    Ok(TreePoint::vertex(e.b))
                } else {
                    Ok(p.clone())
                }
            }
            _ => Err(TreeError::InvalidPoint(format!("{p:?} is not in the tree"))),
        }
    }

    pub fn add_anchor(&mut self, name: &str, p: TreePoint) -> Result<(), TreeError> {
        let p = self.normalize_point(&p)?;
        self.anchors.insert(name.to_string(), p);
        Ok(())
    }

    pub fn anchors(&self) -> &BTreeMap<String, TreePoint> {
        &self.anchors
    }

    pub fn anchor(&self, name: &str) -> Result<&TreePoint, TreeError> {
        self.anchors.get(name).ok_or_else(|| TreeError::UnknownAnchor(name.to_string()))
    }

    /// Path lengths from `v` to every vertex.
    pub fn distances_from(&self, v: VertexId) -> Vec<Rational> {
        let mut dist: Vec<Option<Rational>> = vec![None; self.vertex_count];
        dist[v] = Some(Rational::zero());
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            let dx = dist[x].clone().expect("visited");
            for &(y, e) in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(&dx + &self.edges[e].length);
                    stack.push(y);
                }
            }
        }
        dist.into_iter().map(|d| d.expect("tree is connected")).collect()
    }

    /// Distance from every vertex to the nearest of `sources` (non-empty).
    pub fn distances_from_set(&self, sources: &[VertexId]) -> Vec<Rational> {
        let n = self.vertex_count;
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        let mut done = vec![false; n];
        for &s in sources {
            dist[s] = Some(Rational::zero());
        }
        loop {
            let mut best: Option<usize> = None;
            for v in 0..n {
                if let (false, Some(dv)) = (done[v], &dist[v]) {
                    if best.is_none_or(|b| *dv < *dist[b].as_ref().expect("set")) {
                        best = Some(v);
                    }
                }
            }
            let Some(v) = best else { break };
            done[v] = true;
            let dv = dist[v].clone().expect("set");
            for &(w, e) in &self.adjacency[v] {
                let nd = &dv + &self.edges[e].length;
                if dist[w].as_ref().is_none_or(|x| nd < *x) {
                    dist[w] = Some(nd);
                }
            }
        }
        dist.into_iter().map(|d| d.expect("tree is connected")).collect()
    }

    /// Vertices along the path from `u` to `v`, both included.
    pub fn path(&self, u: VertexId, v: VertexId) -> Vec<VertexId> {
        let mut prev = vec![usize::MAX; self.vertex_count];
        prev[u] = u;
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            if x == v {
                break;
            }
            for &(y, _) in &self.adjacency[x] {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    stack.push(y);
                }
            }
        }
        let mut out = vec![v];
        let mut x = v;
        while x != u {
            x = prev[x];
            out.push(x);
        }
        out.reverse();
        out
    }

    pub(crate) fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.adjacency[u].iter().find(|(w, _)| *w == v).map(|&(_, e)| e)
    }

    /// The point at distance `s` from `u` on the path to `v` (`0 ≤ s ≤ dist(u, v)`).
    pub fn point_along(&self, u: VertexId, v: VertexId, s: &Rational) -> Result<TreePoint, TreeError> {
        let path = self.path(u, v);
        let mut walked = Rational::zero();
        if s.is_negative() {
            return Err(TreeError::InvalidPoint(format!("negative position {s}")));
        }
        if s.is_zero() {
            return Ok(TreePoint::vertex(u));
        }
        for w in path.windows(2) {
            let e = self.edge_between(w[0], w[1]).expect("consecutive path vertices");
            let len = &self.edges[e].length;
            let next = &walked + len;
            if *s == next {
                return Ok(TreePoint::vertex(w[1]));
            }
            if *s < next {
                let along = s - &walked;
                let offset = if self.edges[e].a == w[0] { along } else { len - along };
                return Ok(TreePoint::on_edge(e, offset));
            }
            walked = next;
        }
        Err(TreeError::InvalidPoint(format!("position {s} beyond path length {walked}")))
    }

    /// Exact path length between two points.
    pub fn point_distance(&self, p: &TreePoint, q: &TreePoint) -> Result<Rational, TreeError> {
        let p = self.normalize_point(p)?;
        let q = self.normalize_point(q)?;
        let ends = |t: &TreePoint| -> Vec<(VertexId, Rational)> {
            match t {
                TreePoint::Vertex { vertex } => vec![(*vertex, Rational::zero())],
                TreePoint::OnEdge { edge, offset } => {
                    let e = &self.edges[*edge];
                    vec![(e.a, offset.0.clone()), (e.b, &e.length - &offset.0)]
                }
            }
        };
        if let (TreePoint::OnEdge { edge: e1, offset: o1 }, TreePoint::OnEdge { edge: e2, offset: o2 }) = (&p, &q) {
            if e1 == e2 {
                return Ok((&o1.0 - &o2.0).abs());
            }
        }
        let pe = ends(&p);
        let qe = ends(&q);
        let mut best: Option<Rational> = None;
        for (u, du) in &pe {
            let dist = self.distances_from(*u);
            for (v, dv) in &qe {
                let total = du + &dist[*v] + dv;
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                }
            }
        }
        Ok(best.expect("points have endpoints"))
    }

    /// Distance between two named anchors.
    pub fn tree_distance(&self, a: &str, b: &str) -> Result<Rational, TreeError> {
        self.point_distance(self.anchor(a)?, self.anchor(b)?)
    }

    /// Extended Newick string rooted at vertex 0; vertices are named by the anchors placed on
    /// them (joined with `|`), edge-interior anchors are not shown.
    pub fn to_newick(&self) -> String {
        let mut names: Vec<Vec<&str>> = vec![Vec::new(); self.vertex_count];
        for (name, p) in &self.anchors {
            if let TreePoint::Vertex { vertex } = p {
                names[*vertex].push(name);
            }
        }
        fn rec(t: &WeightedTree, v: VertexId, from: Option<VertexId>, names: &[Vec<&str>], out: &mut String) {
            let kids: Vec<(VertexId, EdgeId)> =
                t.adjacency[v].iter().copied().filter(|(w, _)| Some(*w) != from).collect();
            if !kids.is_empty() {
                out.push('(');
                for (k, (w, e)) in kids.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    rec(t, *w, Some(v), names, out);
                    let _ = write!(out, ":{}", t.edges[*e].length);
                }
                out.push(')');
            }
            out.push_str(&names[v].join("|"));
        }
        let mut out = String::new();
        rec(self, 0, None, &names, &mut out);
        out.push(';');
        out
    }

    /// All vertices and all edges, as a subtree.
    pub fn whole(&self) -> super::Subtree {
        super::Subtree {
            vertices: (0..self.vertex_count).collect::<BTreeSet<_>>(),
            segments: self
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| super::Segment::new(i, Rational::zero(), e.length.clone()))
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct EdgeJson {
    pub id: EdgeId,
    pub a: VertexId,
    pub b: VertexId,
    pub length: Q,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct TreeJson {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeJson>,
    #[serde(default)]
    pub anchors: BTreeMap<String, TreePoint>,
}

impl From<&WeightedTree> for TreeJson {
    fn from(t: &WeightedTree) -> Self {
        TreeJson {
            vertices: (0..t.vertex_count).collect(),
            edges: t
                .edges
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeJson { id, a: e.a, b: e.b, length: Q(e.length.clone()) })
                .collect(),
            anchors: t.anchors.clone(),
        }
    }
}

impl TryFrom<TreeJson> for WeightedTree {
    type Error = TreeError;
    fn try_from(j: TreeJson) -> Result<Self, TreeError> {
        let n = j.vertices.len();
        if j.vertices.iter().enumerate().any(|(i, &v)| i != v) {
            return Err(TreeError::InvalidTree("vertices must be 0..n in order".into()));
        }
        if j.edges.iter().enumerate().any(|(i, e)| i != e.id) {
            return Err(TreeError::InvalidTree("edge ids must be 0..m in order".into()));
        }
        if j.edges.iter().any(|e| !e.length.0.is_positive()) {
            return Err(TreeError::InvalidTree("stored edge lengths must be positive".into()));
        }
        let mut t = WeightedTree::new(n, j.edges.into_iter().map(|e| (e.a, e.b, e.length.0)).collect())?;
        for (name, p) in j.anchors {
            t.add_anchor(&name, p)?;
        }
        Ok(t)
    }
}

impl Serialize for WeightedTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TreeJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        WeightedTree::try_from(TreeJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
