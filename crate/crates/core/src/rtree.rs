//! Finite metric trees with exact rational edge lengths. End-flagged leaves
//! stand for truncated rays; other leaves are truncation boundary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Id;

pub type Length = Rational64;
pub type Vertex = usize;

/// Parses `"p/q"`, `"p"` or an integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LengthSpec {
    Int(i64),
    Str(String),
}

impl LengthSpec {
    pub fn parse(&self) -> Result<Length> {
        match self {
            LengthSpec::Int(n) => Ok(Length::from_integer(*n)),
            LengthSpec::Str(s) => {
                Length::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad rational `{s}`")))
            }
        }
    }
}

impl From<Length> for LengthSpec {
    fn from(l: Length) -> Self {
        LengthSpec::Str(l.to_string())
    }
}

pub fn parse_length(s: &str) -> Result<Length> {
    LengthSpec::Str(s.to_string()).parse()
}

/// JSON tree input: `{"vertices":[ids],"edges":[[u,v,"p/q"]],"ends":[leaf ids]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub vertices: Vec<Id>,
    pub edges: Vec<(Id, Id, LengthSpec)>,
    #[serde(default)]
    pub ends: Vec<Id>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricTree {
    names: Vec<String>,
    /// Edges `(u, v, length)` with `u < v`, sorted.
    edges: Vec<(Vertex, Vertex, Length)>,
    adj: Vec<Vec<(Vertex, usize)>>,
    ends: Vec<bool>,
    dist: Vec<Vec<Length>>,
}

/// A point of a tree: a vertex, or an interior point of an edge at `offset`
/// from the edge's smaller endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreePoint {
    Vertex(Vertex),
    Edge { edge: usize, offset: Length },
}

/// JSON form of a point: `{"vertex":"a"}` or
/// `{"edge":["a","b"],"offset":"1/2"}` (offset measured from the first
/// named vertex).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Vertex { vertex: Id },
    Edge { edge: (Id, Id), offset: LengthSpec },
}

/// An apartment `(u, v)` between two end-flagged leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeApartment {
    pub ends: (Vertex, Vertex),
    pub path: Vec<Vertex>,
}

impl TreeApartment {
    pub fn unordered_ends(&self) -> (Vertex, Vertex) {
        let (u, v) = self.ends;
        (u.min(v), u.max(v))
    }

    pub fn shares_end(&self, other: &TreeApartment) -> bool {
        let (a, b) = self.ends;
        let (c, d) = other.ends;
        a == c || a == d || b == c || b == d
    }
}

/// A geodesic as the sequence of its breakpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub points: Vec<TreePoint>,
    pub length: Length,
}

impl MetricTree {
    pub fn new(names: Vec<String>, edges: Vec<(Vertex, Vertex, Length)>, ends: Vec<Vertex>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidTree("no vertices".into()));
        }
        if edges.len() + 1 != n {
            return Err(Error::InvalidTree(format!(
                "{} edges on {n} vertices: a tree needs {}",
                edges.len(),
                n - 1
            )));
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (u, v, l) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidTree(format!("bad edge ({u}, {v})")));
            }
            if !l.is_positive() {
                return Err(Error::InvalidTree(format!("edge ({}, {}) has length {l}", names[u], names[v])));
            }
            norm.push((u.min(v), u.max(v), l));
        }
        norm.sort();
        let mut adj = vec![Vec::new(); n];
        for (k, &(u, v, _)) in norm.iter().enumerate() {
            adj[u].push((v, k));
            adj[v].push((u, k));
        }
        let mut flags = vec![false; n];
        for e in ends {
            if e >= n {
                return Err(Error::InvalidTree(format!("unknown end vertex {e}")));
            }
            if adj[e].len() != 1 {
                return Err(Error::InvalidTree(format!("end-flagged vertex {} is not a leaf", names[e])));
            }
            flags[e] = true;
        }
        let mut dist = vec![vec![Length::zero(); n]; n];
        for s in 0..n {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut stack = vec![s];
            let mut count = 1;
            while let Some(x) = stack.pop() {
                for &(y, k) in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        count += 1;
                        dist[s][y] = dist[s][x] + norm[k].2;
                        stack.push(y);
                    }
                }
            }
            if count != n {
                return Err(Error::InvalidTree("graph is disconnected or has a cycle".into()));
            }
        }
        Ok(Self { names, edges: norm, adj, ends: flags, dist })
    }

    pub fn from_spec(spec: &TreeSpec) -> Result<Self> {
        let names: Vec<String> = spec.vertices.iter().map(Id::to_string).collect();
        let index = |id: &Id| -> Result<Vertex> {
            let s = id.to_string();
            names.iter().position(|n| *n == s).ok_or_else(|| Error::Parse(format!("unknown vertex {s}")))
        };
        let edges = spec
            .edges
            .iter()
            .map(|(u, v, l)| Ok((index(u)?, index(v)?, l.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        let ends = spec.ends.iter().map(index).collect::<Result<Vec<_>>>()?;
        Self::new(names.clone(), edges, ends)
    }

    pub fn to_spec(&self) -> TreeSpec {
        TreeSpec {
            vertices: self.names.iter().map(|n| Id::Str(n.clone())).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v, l)| (Id::Str(self.names[u].clone()), Id::Str(self.names[v].clone()), l.into()))
                .collect(),
            ends: self.end_leaves().iter().map(|&e| Id::Str(self.names[e].clone())).collect(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<Vertex> {
        self.names.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[(Vertex, Vertex, Length)] {
        &self.edges
    }

    pub fn edge_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.adj[u].iter().find(|&&(w, _)| w == v).map(|&(_, k)| k)
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v].iter().map(|&(w, _)| w)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn is_end(&self, v: Vertex) -> bool {
        self.ends[v]
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        self.adj[v].len() <= 1
    }

    pub fn end_leaves(&self) -> Vec<Vertex> {
        (0..self.num_vertices()).filter(|&v| self.ends[v]).collect()
    }

    pub fn branch_points(&self) -> Vec<Vertex> {
        (0..self.num_vertices()).filter(|&v| self.degree(v) >= 3).collect()
    }

    pub fn vertex_distance(&self, u: Vertex, v: Vertex) -> Length {
        self.dist[u][v]
    }

    /// Vertex path from `u` to `v`.
    pub fn vertex_path(&self, u: Vertex, v: Vertex) -> Vec<Vertex> {
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            cur = self
                .neighbors(cur)
                .find(|&w| self.dist[w][v] < self.dist[cur][v])
                .expect("tree paths exist");
            path.push(cur);
        }
        path
    }

    /// Normalized point on edge `edge` at `offset` from its smaller endpoint.
    pub fn point_on_edge(&self, edge: usize, offset: Length) -> Result<TreePoint> {
        let (u, v, l) = *self.edges.get(edge).ok_or_else(|| Error::InvalidPoint(format!("no edge {edge}")))?;
        if offset.is_negative() || offset > l {
            return Err(Error::InvalidPoint(format!("offset {offset} outside [0, {l}]")));
        }
        Ok(if offset.is_zero() {
            TreePoint::Vertex(u)
        } else if offset == l {
            TreePoint::Vertex(v)
        } else {
            TreePoint::Edge { edge, offset }
        })
    }

    /// Point on the edge `{a, b}` at distance `t` from `a`.
    pub fn point_between(&self, a: Vertex, b: Vertex, t: Length) -> Result<TreePoint> {
        let k = self.edge_index(a, b).ok_or_else(|| Error::InvalidPoint("vertices are not adjacent".into()))?;
        let offset = if self.edges[k].0 == a { t } else { self.edges[k].2 - t };
        self.point_on_edge(k, offset)
    }

    pub fn validate_point(&self, p: TreePoint) -> Result<TreePoint> {
        match p {
            TreePoint::Vertex(v) if v < self.num_vertices() => Ok(p),
            TreePoint::Vertex(v) => Err(Error::InvalidPoint(format!("no vertex {v}"))),
            TreePoint::Edge { edge, offset } => {
                let q = self.point_on_edge(edge, offset)?;
                if q != p {
                    return Err(Error::InvalidPoint("edge offset must be strictly interior".into()));
                }
                Ok(p)
            }
        }
    }

    /// `(endpoint, distance to it)` pairs of the carrier of `p`.
    fn anchors(&self, p: TreePoint) -> Vec<(Vertex, Length)> {
        match p {
            TreePoint::Vertex(v) => vec![(v, Length::zero())],
            TreePoint::Edge { edge, offset } => {
                let (u, v, l) = self.edges[edge];
                vec![(u, offset), (v, l - offset)]
            }
        }
    }

    pub fn distance(&self, p: TreePoint, q: TreePoint) -> Length {
        if let (TreePoint::Edge { edge: e1, offset: o1 }, TreePoint::Edge { edge: e2, offset: o2 }) = (p, q) {
            if e1 == e2 {
                return (o1 - o2).abs();
            }
        }
        let mut best: Option<Length> = None;
        for (a, da) in self.anchors(p) {
            for (b, db) in self.anchors(q) {
                let d = da + self.dist[a][b] + db;
                best = Some(best.map_or(d, |x| x.min(d)));
            }
        }
        best.expect("points have anchors")
    }

    pub fn geodesic(&self, p: TreePoint, q: TreePoint) -> Segment {
        let length = self.distance(p, q);
        if p == q {
            return Segment { points: vec![p], length };
        }
        if let (TreePoint::Edge { edge: e1, .. }, TreePoint::Edge { edge: e2, .. }) = (p, q) {
            if e1 == e2 {
                return Segment { points: vec![p, q], length };
            }
        }
        let (a, b) = self
            .anchors(p)
            .into_iter()
            .flat_map(|(a, da)| self.anchors(q).into_iter().map(move |(b, db)| (a, b, da + db)))
            .find(|&(a, b, extra)| extra + self.dist[a][b] == length)
            .map(|(a, b, _)| (a, b))
            .expect("some anchor pair realizes the distance");
        let mut points = Vec::new();
        if p != TreePoint::Vertex(a) {
            points.push(p);
        }
        points.extend(self.vertex_path(a, b).into_iter().map(TreePoint::Vertex));
        if q != TreePoint::Vertex(b) {
            points.push(q);
        }
        Segment { points, length }
    }

    /// The point of `[p, q]` at distance `t` from `p`.
    pub fn point_along(&self, p: TreePoint, q: TreePoint, t: Length) -> Result<TreePoint> {
        let seg = self.geodesic(p, q);
        if t.is_negative() || t > seg.length {
            return Err(Error::InvalidPoint(format!("{t} is outside the geodesic of length {}", seg.length)));
        }
        let mut walked = Length::zero();
        for w in seg.points.windows(2) {
            let step = self.distance(w[0], w[1]);
            if walked + step >= t {
                return self.interpolate(w[0], w[1], t - walked);
            }
            walked += step;
        }
        Ok(*seg.points.last().expect("nonempty"))
    }

    /// Point at distance `t` from `x` towards `y`, both on one closed edge.
    fn interpolate(&self, x: TreePoint, y: TreePoint, t: Length) -> Result<TreePoint> {
        let edge = [x, y]
            .iter()
            .find_map(|p| match p {
                TreePoint::Edge { edge, .. } => Some(*edge),
                _ => None,
            })
            .or_else(|| match (x, y) {
                (TreePoint::Vertex(a), TreePoint::Vertex(b)) => self.edge_index(a, b),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidPoint("points are not on a common edge".into()))?;
        let (u, v, l) = self.edges[edge];
        let pos = |p: TreePoint| match p {
            TreePoint::Vertex(w) if w == u => Length::zero(),
            TreePoint::Vertex(w) if w == v => l,
            TreePoint::Edge { offset, .. } => offset,
            _ => unreachable!("point lies on the edge"),
        };
        let (px, py) = (pos(x), pos(y));
        let offset = if py >= px { px + t } else { px - t };
        self.point_on_edge(edge, offset)
    }

    /// The unique point on all three pairwise geodesics.
    pub fn median(&self, u: TreePoint, v: TreePoint, w: TreePoint) -> TreePoint {
        let t = (self.distance(u, v) + self.distance(u, w) - self.distance(v, w)) / Length::from_integer(2);
        self.point_along(u, v, t).expect("median lies on [u, v]")
    }

    pub fn lies_on(&self, z: TreePoint, p: TreePoint, q: TreePoint) -> bool {
        self.distance(p, z) + self.distance(z, q) == self.distance(p, q)
    }

    pub fn apartment(&self, u: Vertex, v: Vertex) -> Result<TreeApartment> {
        if u == v || !self.ends[u] || !self.ends[v] {
            return Err(Error::InvalidTree("apartments join two distinct end-flagged leaves".into()));
        }
        Ok(TreeApartment { ends: (u, v), path: self.vertex_path(u, v) })
    }

    /// All apartments `(u, v)` with `u < v`.
    pub fn apartments(&self) -> Vec<TreeApartment> {
        let ends = self.end_leaves();
        let mut out = Vec::new();
        for (k, &u) in ends.iter().enumerate() {
            for &v in &ends[k + 1..] {
                out.push(TreeApartment { ends: (u, v), path: self.vertex_path(u, v) });
            }
        }
        out
    }

    /// `π_A(z)`: the nearest point of `A` to `z`.
    pub fn project_to_apartment(&self, a: &TreeApartment, z: TreePoint) -> TreePoint {
        self.median(TreePoint::Vertex(a.ends.0), TreePoint::Vertex(a.ends.1), z)
    }

    pub fn distance_to_apartment(&self, a: &TreeApartment, z: TreePoint) -> Length {
        self.distance(z, self.project_to_apartment(a, z))
    }

    pub fn point_from_spec(&self, spec: &PointSpec) -> Result<TreePoint> {
        let index = |id: &Id| {
            let s = id.to_string();
            self.vertex_by_name(&s).ok_or_else(|| Error::InvalidPoint(format!("unknown vertex {s}")))
        };
        match spec {
            PointSpec::Vertex { vertex } => Ok(TreePoint::Vertex(index(vertex)?)),
            PointSpec::Edge { edge: (a, b), offset } => self.point_between(index(a)?, index(b)?, offset.parse()?),
        }
    }

    pub fn point_to_spec(&self, p: TreePoint) -> PointSpec {
        match p {
            TreePoint::Vertex(v) => PointSpec::Vertex { vertex: Id::Str(self.names[v].clone()) },
            TreePoint::Edge { edge, offset } => {
                let (u, v, _) = self.edges[edge];
                PointSpec::Edge {
                    edge: (Id::Str(self.names[u].clone()), Id::Str(self.names[v].clone())),
                    offset: offset.into(),
                }
            }
        }
    }

    pub fn format_point(&self, p: TreePoint) -> String {
        match p {
            TreePoint::Vertex(v) => self.names[v].clone(),
            TreePoint::Edge { edge, offset } => {
                let (u, v, _) = self.edges[edge];
                format!("{}+{offset}->{}", self.names[u], self.names[v])
            }
        }
    }

    /// Image of a point under a vertex automorphism.
    pub fn map_point(&self, perm: &[Vertex], p: TreePoint) -> TreePoint {
        match p {
            TreePoint::Vertex(v) => TreePoint::Vertex(perm[v]),
            TreePoint::Edge { edge, offset } => {
                let (u, v, l) = self.edges[edge];
                let (a, b) = (perm[u], perm[v]);
                let k = self.edge_index(a, b).expect("automorphisms preserve edges");
                TreePoint::Edge { edge: k, offset: if a < b { offset } else { l - offset } }
            }
        }
    }

    /// Whether a vertex permutation preserves edges, lengths and end flags.
    pub fn is_automorphism(&self, perm: &[Vertex]) -> bool {
        perm.len() == self.num_vertices()
            && crate::perm::is_permutation(perm)
            && (0..perm.len()).all(|v| self.ends[v] == self.ends[perm[v]])
            && self.edges.iter().all(|&(u, v, l)| {
                self.edge_index(perm[u], perm[v]).is_some_and(|k| self.edges[k].2 == l)
            })
    }
}

/// Star with centre `o` and one end-flagged leaf per label at distance
/// `radius`: a truncation of the Euclidean cone over a finite set.
pub fn cone_tree(labels: &[String], radius: Length) -> Result<MetricTree> {
    if labels.len() < 2 {
        return Err(Error::InvalidTree("a cone tree needs at least two ends".into()));
    }
    let mut names = vec!["o".to_string()];
    names.extend(labels.iter().cloned());
    if names[1..].iter().any(|n| n == "o") {
        return Err(Error::InvalidTree("label `o` is reserved for the centre".into()));
    }
    let edges = (1..names.len()).map(|k| (0, k, radius)).collect();
    MetricTree::new(names, edges, (1..=labels.len()).collect())
}

/// Tripod with centre `o` and end-flagged leaves `a`, `b`, `c`.
pub fn tripod(a: Length, b: Length, c: Length) -> MetricTree {
    MetricTree::new(
        ["o", "a", "b", "c"].map(String::from).to_vec(),
        vec![(0, 1, a), (0, 2, b), (0, 3, c)],
        vec![1, 2, 3],
    )
    .expect("tripod is a tree")
}

/// Ball of radius `depth` around a vertex in the `degree`-regular tree with
/// edges of length `edge`; leaves are end-flagged. Vertices are named by
/// their child-index path from the root `r`.
pub fn regular_truncation(degree: usize, depth: usize, edge: Length) -> MetricTree {
    let mut names = vec!["r".to_string()];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    for level in 0..depth {
        let mut next = Vec::new();
        for &p in &frontier {
            let children = if level == 0 { degree } else { degree - 1 };
            for k in 0..children {
                let id = names.len();
                let name = if p == 0 { format!("{k}") } else { format!("{}.{k}", names[p]) };
                names.push(name);
                edges.push((p, id, edge));
                next.push(id);
            }
        }
        frontier = next;
    }
    let ends = if depth == 0 { Vec::new() } else { frontier };
    MetricTree::new(names, edges, ends).expect("regular truncation is a tree")
}

/// Two branch points `x`, `y` at distance 1; `x` carries leaves `u`, `v` at
/// distance 1, `y` carries leaves `w`, `z` at distance 2.
pub fn h_tree() -> MetricTree {
    let one = Length::one();
    let two = Length::from_integer(2);
    MetricTree::new(
        ["x", "y", "u", "v", "w", "z"].map(String::from).to_vec(),
        vec![(0, 1, one), (0, 2, one), (0, 3, one), (1, 4, two), (1, 5, two)],
        vec![2, 3, 4, 5],
    )
    .expect("H-tree is a tree")
}

/// Classification of a faithful truncation under the 2-transitive structure
/// theory: a line, a cone over the ends, or a uniform simplicial tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TreeClass {
    Line,
    Cone,
    Simplicial { edge_length: String },
    Inconsistent { reason: String },
    Undetermined { reason: String },
}

impl fmt::Display for TreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeClass::Line => f.write_str("type 0"),
            TreeClass::Cone => f.write_str("type I"),
            TreeClass::Simplicial { edge_length } => write!(f, "type II (t = {edge_length})"),
            TreeClass::Inconsistent { reason } => write!(f, "inconsistent ({reason})"),
            TreeClass::Undetermined { reason } => write!(f, "undetermined ({reason})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub branch_points: Vec<String>,
    pub ends: Vec<String>,
    pub boundary_leaves: Vec<String>,
    /// `(vertex, valence)` for every branch point.
    pub valences: Vec<(String, usize)>,
    pub class: TreeClass,
}

pub fn structure_report(t: &MetricTree) -> StructureReport {
    let n = t.num_vertices();
    let branch = t.branch_points();
    let ends = t.end_leaves();
    let boundary: Vec<Vertex> = (0..n).filter(|&v| t.is_leaf(v) && !t.is_end(v)).collect();
    let names = |vs: &[Vertex]| vs.iter().map(|&v| t.name(v).to_string()).collect::<Vec<_>>();
    let class = if !boundary.is_empty() {
        TreeClass::Undetermined { reason: format!("{} leaves are not end-flagged", boundary.len()) }
    } else if branch.is_empty() {
        if ends.len() == 2 {
            TreeClass::Line
        } else {
            TreeClass::Undetermined { reason: format!("{} ends and no branch point", ends.len()) }
        }
    } else if branch.len() == 1 {
        TreeClass::Cone
    } else {
        classify_simplicial(t, &branch)
    };
    StructureReport {
        branch_points: names(&branch),
        ends: names(&ends),
        boundary_leaves: names(&boundary),
        valences: branch.iter().map(|&v| (t.name(v).to_string(), t.degree(v))).collect(),
        class,
    }
}

/// Walks from `start` through `first` along degree-2 vertices to the next
/// branch point or leaf; returns it with the distance travelled.
fn walk_arm(t: &MetricTree, start: Vertex, first: Vertex) -> (Vertex, Length) {
    let (mut prev, mut cur) = (start, first);
    let mut len = t.vertex_distance(start, first);
    while t.degree(cur) == 2 {
        let next = t.neighbors(cur).find(|&w| w != prev).expect("degree two");
        len += t.vertex_distance(cur, next);
        prev = cur;
        cur = next;
    }
    (cur, len)
}

fn classify_simplicial(t: &MetricTree, branch: &[Vertex]) -> TreeClass {
    let mut between = BTreeSet::new();
    let mut arms = Vec::new();
    for &b in branch {
        for w in t.neighbors(b) {
            let (end, len) = walk_arm(t, b, w);
            if t.degree(end) >= 3 {
                between.insert(len);
            } else {
                arms.push((end, len));
            }
        }
    }
    if between.len() != 1 {
        let listed: Vec<String> = between.iter().map(|l| l.to_string()).collect();
        return TreeClass::Inconsistent {
            reason: format!("consecutive branch points at distances {}", listed.join(", ")),
        };
    }
    let step = *between.first().expect("one distance");
    if let Some(&(leaf, len)) = arms.iter().find(|&&(_, len)| len > step) {
        return TreeClass::Inconsistent {
            reason: format!(
                "leaf {} lies {len} beyond its branch point, more than the branch spacing {step}",
                t.name(leaf)
            ),
        };
    }
    TreeClass::Simplicial { edge_length: step.to_string() }
}

/// Rooted canonical form: children of every vertex sorted by
/// `(subtree code, edge length)`.
struct RootedView {
    root: Vertex,
    children: Vec<Vec<(Vertex, Length)>>,
    code: Vec<usize>,
    in_view: Vec<bool>,
}

struct ViewOptions<'a> {
    blocked: Option<Vertex>,
    radius: Option<Length>,
    use_flags: bool,
    marks: &'a [bool],
}

impl RootedView {
    fn new(t: &MetricTree, root: Vertex, opts: &ViewOptions<'_>) -> Self {
        let n = t.num_vertices();
        let inside = |v: Vertex| Some(v) != opts.blocked && opts.radius.is_none_or(|r| t.vertex_distance(root, v) <= r);
        let mut order = vec![root];
        let mut parent = vec![usize::MAX; n];
        let mut in_view = vec![false; n];
        in_view[root] = true;
        let mut k = 0;
        while k < order.len() {
            let x = order[k];
            for y in t.neighbors(x) {
                if !in_view[y] && y != parent[x] && inside(y) {
                    in_view[y] = true;
                    parent[y] = x;
                    order.push(y);
                }
            }
            k += 1;
        }
        let mut children: Vec<Vec<(Vertex, Length)>> = vec![Vec::new(); n];
        let mut code = vec![usize::MAX; n];
        let mut intern: BTreeMap<(u8, Vec<(usize, Length)>), usize> = BTreeMap::new();
        for &x in order.iter().rev() {
            let mut kids: Vec<(Vertex, Length)> = t
                .neighbors(x)
                .filter(|&y| in_view[y] && parent[y] == x)
                .map(|y| (y, t.vertex_distance(x, y)))
                .collect();
            kids.sort_by(|a, b| (code[a.0], a.1).cmp(&(code[b.0], b.1)).then(a.0.cmp(&b.0)));
            let label = u8::from(opts.use_flags && t.is_end(x)) | (u8::from(opts.marks.get(x) == Some(&true)) << 1);
            let key = (label, kids.iter().map(|&(y, l)| (code[y], l)).collect());
            let next = intern.len();
            code[x] = *intern.entry(key).or_insert(next);
            children[x] = kids;
        }
        Self { root, children, code, in_view }
    }

    fn class_of(&self, child: (Vertex, Length)) -> (usize, Length) {
        (self.code[child.0], child.1)
    }

    /// Groups of interchangeable children at `x`.
    fn groups(&self, x: Vertex) -> Vec<Vec<Vertex>> {
        let mut out: Vec<Vec<Vertex>> = Vec::new();
        let mut last = None;
        for &c in &self.children[x] {
            let cls = self.class_of(c);
            if last == Some(cls) {
                out.last_mut().expect("group started").push(c.0);
            } else {
                out.push(vec![c.0]);
                last = Some(cls);
            }
        }
        out
    }

    fn order(&self) -> u128 {
        let mut total: u128 = 1;
        for x in (0..self.in_view.len()).filter(|&x| self.in_view[x]) {
            for g in self.groups(x) {
                total = total.saturating_mul((1..=g.len() as u128).product::<u128>());
            }
        }
        total
    }

    /// Canonical isomorphism between equal-code subtrees at `a` and `b`.
    fn pair(&self, a: Vertex, b: Vertex, map: &mut [Vertex]) {
        map[a] = b;
        for (ca, cb) in self.children[a].iter().zip(&self.children[b]) {
            self.pair(ca.0, cb.0, map);
        }
    }

    fn random_pair<R: Rng>(&self, a: Vertex, b: Vertex, map: &mut [Vertex], rng: &mut R) {
        map[a] = b;
        let (ga, gb) = (self.groups(a), self.groups(b));
        for (xa, xb) in ga.iter().zip(&gb) {
            let mut shuffled = xb.clone();
            shuffled.shuffle(rng);
            for (&ca, &cb) in xa.iter().zip(&shuffled) {
                self.random_pair(ca, cb, map, rng);
            }
        }
    }

    /// Vertices fixed by every automorphism of the rooted view.
    fn fixed_vertices(&self) -> Vec<Vertex> {
        let mut out = vec![self.root];
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            for g in self.groups(x) {
                if g.len() == 1 {
                    out.push(g[0]);
                    stack.push(g[0]);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Centroid(s) by vertex count.
fn centroids(t: &MetricTree) -> Vec<Vertex> {
    let n = t.num_vertices();
    let worst = |v: Vertex| -> usize {
        t.neighbors(v)
            .map(|w| {
                // size of the component of w after removing v
                let mut seen = BTreeSet::from([v, w]);
                let mut stack = vec![w];
                while let Some(x) = stack.pop() {
                    for y in t.neighbors(x) {
                        if seen.insert(y) {
                            stack.push(y);
                        }
                    }
                }
                seen.len() - 1
            })
            .max()
            .unwrap_or(0)
    };
    let scores: Vec<usize> = (0..n).map(worst).collect();
    let best = *scores.iter().min().expect("nonempty tree");
    (0..n).filter(|&v| scores[v] == best).collect()
}

/// Length- and flag-preserving automorphism group of a finite tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeAutGroup {
    pub generators: Vec<Vec<Vertex>>,
    pub order: u128,
}

pub fn tree_automorphisms(t: &MetricTree) -> TreeAutGroup {
    let n = t.num_vertices();
    let cents = centroids(t);
    let identity: Vec<Vertex> = (0..n).collect();
    let no_marks = vec![false; n];
    let mut generators = Vec::new();
    let mut order: u128 = 1;
    let views: Vec<RootedView> = if cents.len() == 2 {
        let (c1, c2) = (cents[0], cents[1]);
        let opts = |blocked| ViewOptions { blocked: Some(blocked), radius: None, use_flags: true, marks: &no_marks };
        vec![RootedView::new(t, c1, &opts(c2)), RootedView::new(t, c2, &opts(c1))]
    } else {
        let opts = ViewOptions { blocked: None, radius: None, use_flags: true, marks: &no_marks };
        vec![RootedView::new(t, cents[0], &opts)]
    };
    for view in &views {
        order = order.saturating_mul(view.order());
        for x in (0..n).filter(|&x| view.in_view[x]) {
            for g in view.groups(x) {
                for w in g.windows(2) {
                    let mut perm = identity.clone();
                    view.pair(w[0], w[1], &mut perm);
                    view.pair(w[1], w[0], &mut perm);
                    generators.push(perm);
                }
            }
        }
    }
    if views.len() == 2 && views[0].code[views[0].root] == views[1].code[views[1].root] {
        // the two halves carry different interning tables; compare structurally
        let mut perm = identity.clone();
        views[0].pair_across(&views[1], views[0].root, views[1].root, &mut perm);
        views[1].pair_across(&views[0], views[1].root, views[0].root, &mut perm);
        if t.is_automorphism(&perm) {
            order = order.saturating_mul(2);
            generators.push(perm);
        }
    }
    TreeAutGroup { generators, order }
}

impl RootedView {
    fn pair_across(&self, other: &RootedView, a: Vertex, b: Vertex, map: &mut [Vertex]) {
        map[a] = b;
        for (ca, cb) in self.children[a].iter().zip(&other.children[b]) {
            self.pair_across(other, ca.0, cb.0, map);
        }
    }
}

/// A uniformly random automorphism.
pub fn random_automorphism<R: Rng>(t: &MetricTree, rng: &mut R) -> Vec<Vertex> {
    let n = t.num_vertices();
    let cents = centroids(t);
    let no_marks = vec![false; n];
    let mut map: Vec<Vertex> = (0..n).collect();
    if cents.len() == 2 {
        let (c1, c2) = (cents[0], cents[1]);
        let opts = |blocked| ViewOptions { blocked: Some(blocked), radius: None, use_flags: true, marks: &no_marks };
        let (v1, v2) = (RootedView::new(t, c1, &opts(c2)), RootedView::new(t, c2, &opts(c1)));
        v1.random_pair(c1, c1, &mut map, rng);
        v2.random_pair(c2, c2, &mut map, rng);
        if rng.gen_bool(0.5) {
            let mut swap: Vec<Vertex> = (0..n).collect();
            v1.pair_across(&v2, c1, c2, &mut swap);
            v2.pair_across(&v1, c2, c1, &mut swap);
            if t.is_automorphism(&swap) {
                map = crate::perm::compose(&swap, &map);
            }
        }
    } else {
        let view = RootedView::new(t, cents[0], &ViewOptions { blocked: None, radius: None, use_flags: true, marks: &no_marks });
        view.random_pair(cents[0], cents[0], &mut map, rng);
    }
    map
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexIsolation {
    pub vertex: String,
    pub branch: bool,
    /// Distance to the nearest leaf: the radius of the ball on which the
    /// truncation is faithful.
    pub faithful_radius: String,
    /// Fixed set of the local stabilizer is `{x}`.
    pub isolated: bool,
    /// Fixed set of the stabilizer in the automorphism group of the whole
    /// truncation is `{x}`.
    pub globally_isolated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCriterion {
    pub x: String,
    pub y: String,
    pub adjacent: bool,
    /// The only branch points fixed by the stabilizer of `x` and `y` are `x`
    /// and `y`.
    pub criterion: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveryReport {
    pub vertices: Vec<VertexIsolation>,
    /// Branch pairs whose stabilizer can be evaluated inside a faithful ball.
    pub interior_pairs: Vec<PairCriterion>,
    pub skipped_pairs: usize,
    pub agreements: usize,
    pub disagreements: usize,
    /// Isolated vertices are exactly the branch points.
    pub isolation_matches_branch_points: bool,
    pub vacuous: bool,
    pub caveat: String,
}

/// Checks, at finite truncation, that branch points are the isolated
/// vertices and that two branch points are adjacent exactly when their joint
/// stabilizer fixes no further branch point. Stabilizers are taken in the
/// automorphism group of the largest ball around the vertex that the
/// truncation represents faithfully (radius = distance to the nearest leaf).
pub fn verify_recovery_criteria(t: &MetricTree) -> RecoveryReport {
    let n = t.num_vertices();
    let leaves: Vec<Vertex> = (0..n).filter(|&v| t.is_leaf(v)).collect();
    let rho: Vec<Length> = (0..n)
        .map(|v| leaves.iter().map(|&l| t.vertex_distance(v, l)).min().unwrap_or_else(Length::zero))
        .collect();
    let branch: Vec<bool> = (0..n).map(|v| t.degree(v) >= 3).collect();
    let no_marks = vec![false; n];
    let mut vertices = Vec::with_capacity(n);
    for x in 0..n {
        let local = RootedView::new(
            t,
            x,
            &ViewOptions { blocked: None, radius: Some(rho[x]), use_flags: false, marks: &no_marks },
        );
        let global = RootedView::new(t, x, &ViewOptions { blocked: None, radius: None, use_flags: true, marks: &no_marks });
        vertices.push(VertexIsolation {
            vertex: t.name(x).to_string(),
            branch: branch[x],
            faithful_radius: rho[x].to_string(),
            isolated: rho[x].is_positive() && local.fixed_vertices() == vec![x],
            globally_isolated: global.fixed_vertices() == vec![x],
        });
    }
    let mut interior_pairs = Vec::new();
    let mut skipped = 0;
    let bps: Vec<Vertex> = (0..n).filter(|&v| branch[v]).collect();
    for (k, &x) in bps.iter().enumerate() {
        for &y in &bps[k + 1..] {
            let (c, other) = if rho[x] >= rho[y] { (x, y) } else { (y, x) };
            if t.vertex_distance(c, other) > rho[c] {
                skipped += 1;
                continue;
            }
            let mut marks = vec![false; n];
            for v in t.vertex_path(c, other) {
                marks[v] = true;
            }
            let view = RootedView::new(
                t,
                c,
                &ViewOptions { blocked: None, radius: Some(rho[c]), use_flags: false, marks: &marks },
            );
            let fixed_branch: Vec<Vertex> = view.fixed_vertices().into_iter().filter(|&v| branch[v]).collect();
            let criterion = fixed_branch.len() == 2;
            let adjacent = t.edge_index(x, y).is_some();
            interior_pairs.push(PairCriterion {
                x: t.name(x).to_string(),
                y: t.name(y).to_string(),
                adjacent,
                criterion,
            });
        }
    }
    let agreements = interior_pairs.iter().filter(|p| p.adjacent == p.criterion).count();
    let isolation_matches_branch_points = vertices.iter().all(|v| v.isolated == v.branch);
    RecoveryReport {
        disagreements: interior_pairs.len() - agreements,
        agreements,
        skipped_pairs: skipped,
        vacuous: bps.is_empty(),
        isolation_matches_branch_points,
        interior_pairs,
        vertices,
        caveat: "stabilizers are computed in finite truncations; the criteria concern the full infinite tree".into(),
    }
}

/// Outcome of intersecting the `r`-neighbourhoods of several apartments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CommonEnd {
    /// End-flagged leaves lying in every neighbourhood.
    Ends(Vec<String>),
    /// The intersection reaches no end; `None` when it is empty.
    Bounded { diameter: Option<String> },
}

pub fn common_end(t: &MetricTree, family: &[TreeApartment], r: Length) -> Result<CommonEnd> {
    if family.is_empty() {
        return Err(Error::InvalidTree("empty apartment family".into()));
    }
    let n = t.num_vertices();
    let on_path: Vec<Vec<bool>> = family
        .iter()
        .map(|a| {
            let mut m = vec![false; n];
            for &v in &a.path {
                m[v] = true;
            }
            m
        })
        .collect();
    let vdist: Vec<Vec<Length>> = family
        .iter()
        .map(|a| (0..n).map(|v| t.distance_to_apartment(a, TreePoint::Vertex(v))).collect())
        .collect();
    let inside = |v: Vertex| vdist.iter().all(|d| d[v] <= r);
    let ends: Vec<String> = t.end_leaves().into_iter().filter(|&v| inside(v)).map(|v| t.name(v).to_string()).collect();
    if !ends.is_empty() {
        return Ok(CommonEnd::Ends(ends));
    }
    // extreme points of the intersection: vertices inside it and the
    // endpoints of its trace on each edge
    let mut candidates: Vec<TreePoint> = (0..n).filter(|&v| inside(v)).map(TreePoint::Vertex).collect();
    for (k, &(u, v, l)) in t.edges().iter().enumerate() {
        let mut lo = Length::zero();
        let mut hi = l;
        for (a, d) in on_path.iter().zip(&vdist) {
            if a[u] && a[v] {
                continue;
            }
            // distance along the edge is min(d_u + s, d_v + l - s)
            let left_hi = r - d[u];
            let right_lo = l - r + d[v];
            let (alo, ahi) = if left_hi >= right_lo {
                (Length::zero(), l)
            } else if left_hi >= Length::zero() {
                (Length::zero(), left_hi)
            } else if right_lo <= l {
                (right_lo, l)
            } else {
                (Length::one(), Length::zero())
            };
            lo = lo.max(alo);
            hi = hi.min(ahi);
        }
        if lo <= hi {
            for s in [lo, hi] {
                candidates.push(t.point_on_edge(k, s.max(Length::zero()).min(l))?);
            }
        }
    }
    let diameter = candidates
        .iter()
        .flat_map(|&p| candidates.iter().map(move |&q| (p, q)))
        .map(|(p, q)| t.distance(p, q))
        .max();
    Ok(CommonEnd::Bounded { diameter: diameter.map(|d| d.to_string()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Length {
        Length::new(n, d)
    }

    fn int(n: i64) -> Length {
        Length::from_integer(n)
    }

    #[test]
    fn spec_parsing() {
        let spec: TreeSpec = serde_json::from_str(
            r#"{"vertices":["o","a","b","c"],"edges":[["o","a","1"],["o","b",2],["o","c","3/1"]],"ends":["a","b","c"]}"#,
        )
        .unwrap();
        let t = MetricTree::from_spec(&spec).unwrap();
        assert_eq!(t.branch_points(), vec![0]);
        assert_eq!(t.end_leaves().len(), 3);
        let back = MetricTree::from_spec(&t.to_spec()).unwrap();
        assert_eq!(back, t);
        let cycle: TreeSpec = serde_json::from_str(
            r#"{"vertices":[1,2,3,4],"edges":[[1,2,"1"],[2,3,"1"],[3,4,"1"],[4,1,"1"]],"ends":[]}"#,
        )
        .unwrap();
        assert!(MetricTree::from_spec(&cycle).is_err());
        let bad: TreeSpec = serde_json::from_str(r#"{"vertices":[1,2],"edges":[[1,2,"0"]],"ends":[]}"#).unwrap();
        assert!(MetricTree::from_spec(&bad).is_err());
        let inner: TreeSpec =
            serde_json::from_str(r#"{"vertices":[1,2,3],"edges":[[1,2,"1"],[2,3,"1"]],"ends":[2]}"#).unwrap();
        assert!(MetricTree::from_spec(&inner).is_err());
    }

    #[test]
    fn geodesics_and_medians() {
        let t = tripod(int(1), int(2), int(3));
        let (a, b) = (TreePoint::Vertex(1), TreePoint::Vertex(2));
        assert_eq!(t.geodesic(a, a).length, int(0));
        let g = t.geodesic(a, b);
        assert_eq!(g.length, int(3));
        assert_eq!(g.points, vec![a, TreePoint::Vertex(0), b]);
        assert_eq!(t.median(a, b, TreePoint::Vertex(3)), TreePoint::Vertex(0));
        assert_eq!(t.median(a, a, b), a);
        let unit = tripod(int(1), int(1), int(1));
        let m1 = unit.point_between(0, 1, q(1, 2)).unwrap();
        let m2 = unit.point_between(0, 2, q(1, 2)).unwrap();
        assert_eq!(unit.distance(m1, m2), int(1));
        // three points on one path
        let x = t.point_between(0, 3, int(1)).unwrap();
        let y = t.point_between(0, 3, int(2)).unwrap();
        assert_eq!(t.median(TreePoint::Vertex(3), x, y), y);
    }

    #[test]
    fn projections() {
        let t = tripod(int(1), int(1), int(1));
        let a = t.apartment(1, 2).unwrap();
        let z = t.point_between(0, 3, q(1, 2)).unwrap();
        assert_eq!(t.project_to_apartment(&a, z), TreePoint::Vertex(0));
        assert_eq!(t.project_to_apartment(&a, TreePoint::Vertex(1)), TreePoint::Vertex(1));
        let h = h_tree();
        let uv = h.apartment(2, 3).unwrap();
        let beyond = h.point_between(1, 4, int(1)).unwrap();
        assert_eq!(h.project_to_apartment(&uv, beyond), TreePoint::Vertex(0));
    }

    #[test]
    fn classification() {
        let names: Vec<String> = (0..5).map(|k| format!("e{k}")).collect();
        assert_eq!(structure_report(&cone_tree(&names, int(1)).unwrap()).class, TreeClass::Cone);
        assert_eq!(structure_report(&cone_tree(&names[..2], int(1)).unwrap()).class, TreeClass::Line);
        assert!(cone_tree(&names[..1], int(1)).is_err());
        assert_eq!(
            structure_report(&regular_truncation(3, 3, int(1))).class,
            TreeClass::Simplicial { edge_length: "1".into() }
        );
        assert!(matches!(structure_report(&h_tree()).class, TreeClass::Inconsistent { .. }));
        let path = MetricTree::new(
            vec!["a".into(), "b".into()],
            vec![(0, 1, int(5))],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(structure_report(&path).class, TreeClass::Line);
        let partial = MetricTree::new(vec!["a".into(), "b".into()], vec![(0, 1, int(5))], vec![0]).unwrap();
        assert!(matches!(structure_report(&partial).class, TreeClass::Undetermined { .. }));
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(tree_automorphisms(&tripod(int(1), int(1), int(1))).order, 6);
        assert_eq!(tree_automorphisms(&tripod(int(1), int(2), int(3))).order, 1);
        let g = tree_automorphisms(&regular_truncation(3, 2, int(1)));
        assert_eq!(g.order, 48);
        let h = tree_automorphisms(&h_tree());
        assert_eq!(h.order, 4);
        // bicentroid: a path with three edges
        let path = MetricTree::new(
            (0..4).map(|k| k.to_string()).collect(),
            vec![(0, 1, int(1)), (1, 2, int(2)), (2, 3, int(1))],
            vec![0, 3],
        )
        .unwrap();
        let g = tree_automorphisms(&path);
        assert_eq!(g.order, 2);
        assert!(g.generators.iter().all(|p| path.is_automorphism(p)));
    }

    #[test]
    fn recovery_examples() {
        let r = verify_recovery_criteria(&tripod(int(1), int(1), int(1)));
        assert!(r.vertices[0].isolated && r.vertices[0].globally_isolated);
        let path = MetricTree::new(vec!["a".into(), "b".into()], vec![(0, 1, int(1))], vec![0, 1]).unwrap();
        assert!(verify_recovery_criteria(&path).vacuous);
        let r = verify_recovery_criteria(&regular_truncation(3, 3, int(1)));
        assert_eq!(r.disagreements, 0);
        assert!(r.agreements > 0);
        assert!(r.isolation_matches_branch_points);
    }

    #[test]
    fn common_ends() {
        let t = tripod(int(1), int(1), int(1));
        let f = vec![t.apartment(1, 2).unwrap(), t.apartment(1, 3).unwrap()];
        assert_eq!(common_end(&t, &f, q(1, 2)).unwrap(), CommonEnd::Ends(vec!["a".into()]));
        let single = vec![t.apartment(1, 2).unwrap()];
        assert_eq!(common_end(&t, &single, q(1, 2)).unwrap(), CommonEnd::Ends(vec!["a".into(), "b".into()]));
        let h = h_tree();
        let f = vec![h.apartment(2, 3).unwrap(), h.apartment(4, 5).unwrap()];
        assert_eq!(common_end(&h, &f, q(1, 4)).unwrap(), CommonEnd::Bounded { diameter: None });
        assert_eq!(common_end(&h, &f, int(1)).unwrap(), CommonEnd::Bounded { diameter: Some("1".into()) });
    }
}
