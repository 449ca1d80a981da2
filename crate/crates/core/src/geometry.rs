//! Rank-two incidence geometries (points, lines, gonality) and a few standard
//! instances used throughout the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Id {
    Num(i64),
    Str(String),
}

impl std::fmt::Display for Id {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Id::Num(n) => write!(f, "{n}"),
            Id::Str(s) => f.write_str(s),
        }
    }
}

/// JSON geometry input: `{"points":[ids],"lines":[[point ids]],"gonality":m}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub points: Vec<Id>,
    pub lines: Vec<Vec<Id>>,
    pub gonality: u32,
}

/// A point-line geometry with lines given as sorted point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceGeometry {
    pub point_names: Vec<String>,
    pub lines: Vec<Vec<usize>>,
    pub gonality: u32,
}

impl IncidenceGeometry {
    pub fn new(point_names: Vec<String>, lines: Vec<Vec<usize>>, gonality: u32) -> Result<Self> {
        let mut sorted = Vec::with_capacity(lines.len());
        for (k, line) in lines.into_iter().enumerate() {
            let mut l = line;
            l.sort_unstable();
            l.dedup();
            if let Some(&p) = l.iter().find(|&&p| p >= point_names.len()) {
                return Err(Error::Parse(format!("line {k} references unknown point {p}")));
            }
            sorted.push(l);
        }
        Ok(Self { point_names, lines: sorted, gonality })
    }

    pub fn from_spec(spec: &GeometrySpec) -> Result<Self> {
        let names: Vec<String> = spec.points.iter().map(Id::to_string).collect();
        let lines = spec
            .lines
            .iter()
            .map(|line| {
                line.iter()
                    .map(|id| {
                        let id = id.to_string();
                        names
                            .iter()
                            .position(|n| *n == id)
                            .ok_or_else(|| Error::Parse(format!("unknown point id {id}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(names, lines, spec.gonality)
    }

    pub fn to_spec(&self) -> GeometrySpec {
        GeometrySpec {
            points: self.point_names.iter().map(|n| Id::Str(n.clone())).collect(),
            lines: self
                .lines
                .iter()
                .map(|l| l.iter().map(|&p| Id::Str(self.point_names[p].clone())).collect())
                .collect(),
            gonality: self.gonality,
        }
    }

    pub fn num_points(&self) -> usize {
        self.point_names.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    /// Flags `(point, line)` sorted lexicographically.
    pub fn flags(&self) -> Vec<(usize, usize)> {
        let mut flags: Vec<(usize, usize)> = self
            .lines
            .iter()
            .enumerate()
            .flat_map(|(l, pts)| pts.iter().map(move |&p| (p, l)))
            .collect();
        flags.sort_unstable();
        flags
    }

    pub fn line_through(&self, points: &[usize]) -> Option<usize> {
        let mut key = points.to_vec();
        key.sort_unstable();
        self.lines.iter().position(|l| *l == key)
    }

    /// Flag map induced by a collineation given on points; fails unless lines
    /// go to lines.
    pub fn collineation_flags(&self, point_perm: &[usize]) -> Result<Vec<usize>> {
        if point_perm.len() != self.num_points() || !crate::perm::is_permutation(point_perm) {
            return Err(Error::InvalidMorphism("not a permutation of the points".into()));
        }
        let line_perm = self
            .lines
            .iter()
            .map(|l| {
                let image: Vec<usize> = l.iter().map(|&p| point_perm[p]).collect();
                self.line_through(&image)
                    .ok_or_else(|| Error::InvalidMorphism("a line is not mapped to a line".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        self.flag_map(|(p, l)| (point_perm[p], line_perm[l]))
    }

    /// Flag map of a correlation of a self-dual geometry: point `p` goes to
    /// line `point_to_line[p]`, line `l` to point `line_to_point[l]`.
    pub fn correlation_flags(&self, point_to_line: &[usize], line_to_point: &[usize]) -> Result<Vec<usize>> {
        if point_to_line.len() != self.num_points() || line_to_point.len() != self.num_lines() {
            return Err(Error::InvalidMorphism("correlation has the wrong size".into()));
        }
        self.flag_map(|(p, l)| (line_to_point[l], point_to_line[p]))
    }

    fn flag_map(&self, f: impl Fn((usize, usize)) -> (usize, usize)) -> Result<Vec<usize>> {
        let flags = self.flags();
        let map = flags
            .iter()
            .map(|&flag| {
                flags
                    .binary_search(&f(flag))
                    .map_err(|_| Error::InvalidMorphism("incidence is not preserved".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        if !crate::perm::is_permutation(&map) {
            return Err(Error::InvalidMorphism("flag map is not a bijection".into()));
        }
        Ok(map)
    }

    /// Incidence graph adjacency: points `0..p`, lines `p..p+l`.
    pub fn incidence_graph(&self) -> Vec<Vec<usize>> {
        let p = self.num_points();
        let mut adj = vec![Vec::new(); p + self.num_lines()];
        for (l, pts) in self.lines.iter().enumerate() {
            for &q in pts {
                adj[q].push(p + l);
                adj[p + l].push(q);
            }
        }
        adj
    }

    /// Girth and diameter of the incidence graph (`None` girth when acyclic,
    /// `None` diameter when disconnected).
    pub fn girth_and_diameter(&self) -> (Option<usize>, Option<usize>) {
        let adj = self.incidence_graph();
        let n = adj.len();
        let mut girth: Option<usize> = None;
        let mut diameter = Some(0);
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let cycle = dist[u] + dist[v] + 1;
                        girth = Some(girth.map_or(cycle, |g| g.min(cycle)));
                    }
                }
            }
            match dist.iter().max() {
                Some(&usize::MAX) => diameter = None,
                Some(&d) => diameter = diameter.map(|x: usize| x.max(d)),
                None => {}
            }
        }
        (girth, diameter)
    }

    /// Generalized `m`-gon test: incidence graph of girth `2m` and diameter
    /// `m`, every element incident with at least two others.
    pub fn check_generalized_polygon(&self) -> Result<()> {
        let m = self.gonality;
        let fail = |reason: String| Error::NotGeneralizedPolygon { gonality: m, reason };
        if m < 2 {
            return Err(fail("gonality must be at least 2".into()));
        }
        let adj = self.incidence_graph();
        if let Some(v) = adj.iter().position(|a| a.len() < 2) {
            return Err(fail(format!("incidence vertex {v} has fewer than two neighbours")));
        }
        let (girth, diameter) = self.girth_and_diameter();
        if diameter != Some(m as usize) {
            return Err(fail(format!("incidence graph diameter {diameter:?}, expected {m}")));
        }
        if girth != Some(2 * m as usize) {
            return Err(fail(format!("incidence graph girth {girth:?}, expected {}", 2 * m)));
        }
        Ok(())
    }
}

/// The Fano plane PG(2,2): lines `{i, i+1, i+3} mod 7`.
pub fn fano_plane() -> IncidenceGeometry {
    let names = (0..7).map(|i| i.to_string()).collect();
    let lines = (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7]).collect();
    IncidenceGeometry::new(names, lines, 3).expect("Fano plane is valid")
}

/// A polarity of [`fano_plane`]: point `p` goes to line `-p`, line `i` to
/// point `-i`. Returns `(point_to_line, line_to_point)`.
pub fn fano_polarity() -> (Vec<usize>, Vec<usize>) {
    let neg: Vec<usize> = (0..7).map(|i| (7 - i) % 7).collect();
    (neg.clone(), neg)
}

/// The generalized quadrangle W(2) = GQ(2,2): points are the 15 two-subsets of
/// a six-set, lines the 15 partitions into three two-subsets.
pub fn gq22() -> IncidenceGeometry {
    let mut pairs = Vec::new();
    for a in 0..6 {
        for b in a + 1..6 {
            pairs.push((a, b));
        }
    }
    let index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let mut lines = Vec::new();
    for b in 1..6 {
        let rest: Vec<usize> = (1..6).filter(|&x| x != b).collect();
        // partitions of `rest` (4 elements) into two pairs
        for &c in &rest[1..] {
            let others: Vec<usize> = rest.iter().copied().filter(|&x| x != rest[0] && x != c).collect();
            lines.push(vec![index(0, b), index(rest[0], c), index(others[0], others[1])]);
        }
    }
    let names = pairs.iter().map(|(a, b)| format!("{a}{b}")).collect();
    IncidenceGeometry::new(names, lines, 4).expect("GQ(2,2) is valid")
}

/// Generalized digon: every point on every line.
pub fn digon(points: usize, lines: usize) -> IncidenceGeometry {
    let names = (0..points).map(|i| i.to_string()).collect();
    IncidenceGeometry::new(names, vec![(0..points).collect(); lines], 2).expect("valid digon")
}

/// The ordinary `m`-gon; its flag complex is the thin Coxeter complex of `I2(m)`.
pub fn ordinary_polygon(m: usize) -> IncidenceGeometry {
    let names = (0..m).map(|i| i.to_string()).collect();
    let lines = (0..m).map(|i| vec![i, (i + 1) % m]).collect();
    IncidenceGeometry::new(names, lines, m as u32).expect("valid polygon")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_geometries_are_polygons() {
        fano_plane().check_generalized_polygon().unwrap();
        gq22().check_generalized_polygon().unwrap();
        digon(3, 3).check_generalized_polygon().unwrap();
        ordinary_polygon(3).check_generalized_polygon().unwrap();
        ordinary_polygon(5).check_generalized_polygon().unwrap();
    }

    #[test]
    fn fano_symmetries() {
        let f = fano_plane();
        let shift: Vec<usize> = (0..7).map(|i| (i + 1) % 7).collect();
        let doubling: Vec<usize> = (0..7).map(|i| (2 * i) % 7).collect();
        assert_eq!(f.collineation_flags(&shift).unwrap().len(), 21);
        assert!(f.collineation_flags(&doubling).is_ok());
        assert!(f.collineation_flags(&[1, 0, 2, 3, 4, 5, 6]).is_err());
        let (pl, lp) = fano_polarity();
        assert!(f.correlation_flags(&pl, &lp).is_ok());
        assert!(f.correlation_flags(&pl, &shift).is_err());
    }

    #[test]
    fn counts() {
        let gq = gq22();
        assert_eq!(gq.num_points(), 15);
        assert_eq!(gq.num_lines(), 15);
        assert_eq!(gq.flags().len(), 45);
        assert_eq!(fano_plane().flags().len(), 21);
    }

    #[test]
    fn rejects_wrong_gonality() {
        let mut f = fano_plane();
        f.gonality = 4;
        assert!(f.check_generalized_polygon().is_err());
        let mut g = gq22();
        g.gonality = 3;
        assert!(g.check_generalized_polygon().is_err());
    }

    #[test]
    fn spec_round_trip() {
        let f = fano_plane();
        let json = serde_json::to_string(&f.to_spec()).unwrap();
        let spec: GeometrySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(IncidenceGeometry::from_spec(&spec).unwrap(), f);
        let numeric: GeometrySpec =
            serde_json::from_str(r#"{"points":[1,2],"lines":[[1,2],[2,1]],"gonality":2}"#).unwrap();
        assert_eq!(IncidenceGeometry::from_spec(&numeric).unwrap().lines, vec![vec![0, 1]; 2]);
    }
}
