//! The apartment complex of a building (the nerve of its covering by
//! apartments) and reconstruction of a thick building from it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::building::{Apartment, Building, SimplexRef, DEFAULT_APARTMENT_CAP};
use crate::coxeter::CoxeterSystem;
use crate::error::{Error, Result};

/// Candidate-test cap for [`search_maximal_simplices`].
pub const SEARCH_CAP: usize = 1_000_000;

/// Fixed-width bitset over apartment labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(Vec<u64>);

impl LabelSet {
    pub fn empty(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }

    pub fn from_indices(n: usize, items: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in items {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.0.len() * 64).filter(|&i| self.contains(i)).collect()
    }
}

/// The nerve, stored through its maximal simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nerve {
    labels: Vec<String>,
    families: Vec<LabelSet>,
}

/// JSON form: apartment labels and the maximal intersecting families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerveSpec {
    pub labels: Vec<String>,
    pub families: Vec<Vec<String>>,
}

impl Nerve {
    /// Builds a nerve from arbitrary generating families; only the distinct
    /// inclusion-maximal ones are kept, sorted.
    pub fn from_families(labels: Vec<String>, families: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        let mut sets = BTreeSet::new();
        for f in families {
            if let Some(&i) = f.iter().find(|&&i| i >= n) {
                return Err(Error::Parse(format!("family references unknown label index {i}")));
            }
            sets.insert(LabelSet::from_indices(n, f));
        }
        let sets: Vec<LabelSet> = sets.into_iter().collect();
        let families: Vec<LabelSet> = sets
            .iter()
            .filter(|s| !sets.iter().any(|t| t != *s && s.is_subset(t)))
            .cloned()
            .collect();
        let covered = families.iter().fold(LabelSet::empty(n), |acc, f| {
            LabelSet(acc.0.iter().zip(&f.0).map(|(a, b)| a | b).collect())
        });
        if covered.len() != n {
            return Err(Error::Parse("some label lies in no family".into()));
        }
        Ok(Self { labels, families })
    }

    pub fn from_spec(spec: &NerveSpec) -> Result<Self> {
        let index: BTreeMap<&str, usize> = spec.labels.iter().enumerate().map(|(k, l)| (l.as_str(), k)).collect();
        let families = spec
            .families
            .iter()
            .map(|f| {
                f.iter()
                    .map(|l| index.get(l.as_str()).copied().ok_or_else(|| Error::Parse(format!("unknown label {l}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_families(spec.labels.clone(), families)
    }

    pub fn to_spec(&self) -> NerveSpec {
        NerveSpec {
            labels: self.labels.clone(),
            families: self
                .families
                .iter()
                .map(|f| f.indices().into_iter().map(|i| self.labels[i].clone()).collect())
                .collect(),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn maximal_families(&self) -> &[LabelSet] {
        &self.families
    }

    /// Whether the apartments listed have a common vertex.
    pub fn is_simplex(&self, family: &[usize]) -> bool {
        if family.iter().any(|&i| i >= self.labels.len()) {
            return false;
        }
        let s = LabelSet::from_indices(self.labels.len(), family.iter().copied());
        self.families.iter().any(|f| s.is_subset(f))
    }
}

/// The apartment complex together with the apartments and, for every vertex
/// `v` of the source, the family `S_v` of apartments through `v`.
#[derive(Clone, Debug)]
pub struct ApartmentComplex {
    pub nerve: Nerve,
    pub apartments: Vec<Apartment>,
    pub vertex_families: Vec<(SimplexRef, LabelSet)>,
}

pub fn apartment_complex(b: &Building) -> Result<ApartmentComplex> {
    let apartments = b.enumerate_apartments(DEFAULT_APARTMENT_CAP)?;
    let n = apartments.len();
    let labels: Vec<String> = (0..n).map(|k| format!("A{k}")).collect();
    let vertex_families: Vec<(SimplexRef, LabelSet)> = b
        .vertices()
        .into_iter()
        .map(|v| {
            let members = (0..n).filter(|&k| apartments[k].contains_simplex(b, v));
            (v, LabelSet::from_indices(n, members))
        })
        .collect();
    let nerve = Nerve::from_families(labels, vertex_families.iter().map(|(_, s)| s.indices()).collect())?;
    Ok(ApartmentComplex { nerve, apartments, vertex_families })
}

/// All maximal simplices of a simplicial complex on `0..n` given only by a
/// membership oracle, by exhaustive depth-first extension. Candidates are
/// pruned by the pairwise edges first (simplicial complexes are downward
/// closed). Used to check the stored families independently of how they were
/// produced.
pub fn search_maximal_simplices(
    n: usize,
    is_simplex: impl Fn(&[usize]) -> bool,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    let mut tests = 0usize;
    let mut test = |s: &[usize]| -> Result<bool> {
        tests += 1;
        if tests > cap {
            return Err(Error::SearchCap(cap));
        }
        Ok(is_simplex(s))
    };
    let mut edge = vec![vec![false; n]; n];
    for u in 0..n {
        for v in u + 1..n {
            let e = test(&[u, v])?;
            edge[u][v] = e;
            edge[v][u] = e;
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n).filter(|&x| test(&[x]).unwrap_or(false)).map(|x| vec![x]).collect();
    while let Some(s) = stack.pop() {
        let compatible = |x: usize| !s.contains(&x) && s.iter().all(|&y| edge[x][y]);
        let last = *s.last().expect("nonempty");
        let mut maximal = true;
        for x in (last + 1..n).filter(|&x| compatible(x)) {
            let mut t = s.clone();
            t.push(x);
            if s.len() == 1 || test(&t)? {
                maximal = false;
                stack.push(t);
            }
        }
        if maximal {
            for x in (0..last).filter(|&x| compatible(x)) {
                let mut t = s.clone();
                t.push(x);
                t.sort_unstable();
                if test(&t)? {
                    maximal = false;
                    break;
                }
            }
        }
        if maximal {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

/// A building rebuilt from a nerve: vertex `k` corresponds to maximal
/// family `k` of the nerve.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub building: Building,
    /// Vertex families, indexed by reconstructed vertex.
    pub families: Vec<LabelSet>,
    /// Type assigned to each reconstructed vertex.
    pub vertex_types: Vec<usize>,
    /// Vertex sets of the chambers, indexed like the building's chambers.
    pub chambers: Vec<Vec<usize>>,
}

impl Reconstruction {
    /// Reconstructed vertex of a chamber of the given type.
    pub fn vertex_of(&self, chamber: usize, t: usize) -> usize {
        *self.chambers[chamber].iter().find(|&&v| self.vertex_types[v] == t).expect("chambers carry all types")
    }
}

/// Vertices are the maximal families; `u ≠ v` are joined when the only
/// families containing `S_u ∩ S_v` are `S_u` and `S_v`, and every family
/// meets `S_u ∩ S_v`; chambers are the maximal cliques.
pub fn reconstruct_building(nerve: &Nerve) -> Result<Reconstruction> {
    let fam = &nerve.families;
    let nv = fam.len();
    if nv < 2 {
        return Err(Error::Reconstruction(format!("{nv} maximal family; the building is not thick")));
    }
    let mut adj = vec![vec![false; nv]; nv];
    for u in 0..nv {
        for v in u + 1..nv {
            let common = fam[u].intersection(&fam[v]);
            if common.is_empty() {
                continue;
            }
            let hull_ok = (0..nv).all(|w| w == u || w == v || !common.is_subset(&fam[w]));
            let covers = fam.iter().all(|f| !f.intersection(&common).is_empty());
            if hull_ok && covers {
                adj[u][v] = true;
                adj[v][u] = true;
            }
        }
    }
    let cliques = maximal_cliques(&adj);
    let rank = cliques.first().map_or(0, Vec::len);
    if rank == 0 || cliques.iter().any(|c| c.len() != rank) {
        let sizes: BTreeSet<usize> = cliques.iter().map(Vec::len).collect();
        return Err(Error::Reconstruction(format!("maximal cliques have sizes {sizes:?}")));
    }
    let types = infer_types(&cliques, nv, rank)?;
    let chambers: Vec<Vec<usize>> = cliques;
    // panels: chambers agreeing off one type
    let mut panels = Vec::with_capacity(rank);
    for t in 0..rank {
        let mut blocks: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (k, ch) in chambers.iter().enumerate() {
            let key: Vec<usize> = ch.iter().copied().filter(|&v| types[v] != t).collect();
            blocks.entry(key).or_default().push(k);
        }
        panels.push(blocks.into_values().collect::<Vec<_>>());
    }
    let system = infer_coxeter(&chambers, &types, rank)?;
    let names = chambers
        .iter()
        .map(|ch| ch.iter().map(|v| format!("v{v}")).collect::<Vec<_>>().join("-"))
        .collect();
    let building = Building::from_panels(system, names, panels)
        .map_err(|e| Error::Reconstruction(format!("reconstructed chamber system is not a building: {e}")))?;
    Ok(Reconstruction { building, families: fam.clone(), vertex_types: types, chambers })
}

fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    fn bron_kerbosch(adj: &[Vec<bool>], r: &mut Vec<usize>, p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() && x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        let pivot = p.iter().chain(&x).copied().max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count());
        let pivot = pivot.expect("p or x nonempty");
        let mut p_left = p.clone();
        for &v in p.iter().filter(|&&v| !adj[pivot][v]) {
            r.push(v);
            let np = p_left.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            bron_kerbosch(adj, r, np, nx, out);
            r.pop();
            p_left.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut out = Vec::new();
    bron_kerbosch(adj, &mut Vec::new(), (0..adj.len()).collect(), Vec::new(), &mut out);
    out.sort();
    out
}

/// Colours vertices so that every chamber carries each type once, propagating
/// from the first chamber through chambers sharing all but one vertex.
fn infer_types(chambers: &[Vec<usize>], nv: usize, rank: usize) -> Result<Vec<usize>> {
    let mut types = vec![usize::MAX; nv];
    let mut by_face: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (k, ch) in chambers.iter().enumerate() {
        for skip in 0..rank {
            let face: Vec<usize> = ch.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            by_face.entry(face).or_default().push(k);
        }
    }
    let mut done = vec![false; chambers.len()];
    for (t, &v) in chambers[0].iter().enumerate() {
        types[v] = t;
    }
    done[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(k) = queue.pop_front() {
        let ch = &chambers[k];
        for skip in 0..rank {
            let face: Vec<usize> = ch.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            for &other in &by_face[&face] {
                if done[other] {
                    continue;
                }
                let new_vertex = *chambers[other].iter().find(|v| !face.contains(v)).expect("distinct chamber");
                let t = types[ch[skip]];
                if types[new_vertex] == usize::MAX {
                    types[new_vertex] = t;
                } else if types[new_vertex] != t {
                    return Err(Error::Reconstruction("vertices admit no consistent typing".into()));
                }
                done[other] = true;
                queue.push_back(other);
            }
        }
    }
    if types.contains(&usize::MAX) || done.contains(&false) {
        return Err(Error::Reconstruction("chamber graph is disconnected".into()));
    }
    for ch in chambers {
        let seen: BTreeSet<usize> = ch.iter().map(|&v| types[v]).collect();
        if seen.len() != rank {
            return Err(Error::Reconstruction("a chamber repeats a type".into()));
        }
    }
    Ok(types)
}

/// `m_ij` is the diameter of the chamber graph of an `{i, j}`-residue.
fn infer_coxeter(chambers: &[Vec<usize>], types: &[usize], rank: usize) -> Result<CoxeterSystem> {
    let mut m = vec![vec![1u32; rank]; rank];
    for i in 0..rank {
        for j in i + 1..rank {
            let fixed: Vec<usize> = chambers[0].iter().copied().filter(|&v| types[v] != i && types[v] != j).collect();
            let res: Vec<usize> = (0..chambers.len())
                .filter(|&k| fixed.iter().all(|v| chambers[k].contains(v)))
                .collect();
            let adjacent = |x: usize, y: usize| {
                chambers[x].iter().filter(|v| chambers[y].contains(v)).count() == rank - 1
            };
            let mut diameter = 0;
            for &s in &res {
                let mut dist: BTreeMap<usize, usize> = BTreeMap::from([(s, 0)]);
                let mut queue = VecDeque::from([s]);
                while let Some(x) = queue.pop_front() {
                    for &y in &res {
                        if !dist.contains_key(&y) && adjacent(x, y) {
                            dist.insert(y, dist[&x] + 1);
                            queue.push_back(y);
                        }
                    }
                }
                diameter = diameter.max(*dist.values().max().expect("nonempty"));
            }
            if diameter < 2 {
                return Err(Error::Reconstruction(format!("residue of types {{{i}, {j}}} is degenerate")));
            }
            m[i][j] = diameter as u32;
            m[j][i] = diameter as u32;
        }
    }
    CoxeterSystem::with_labels((0..rank).map(|t| format!("t{t}")).collect(), m)
}

/// Outcome of rebuilding a building from its apartment complex.
#[derive(Clone, Debug, Serialize)]
pub struct RoundTripReport {
    pub source_vertices: usize,
    pub reconstructed_vertices: usize,
    pub source_chambers: usize,
    pub reconstructed_chambers: usize,
    /// `Φ(v)` for each source vertex (in [`Building::vertices`] order).
    pub vertex_map: Vec<usize>,
    /// `Φ` preserves and reflects adjacency.
    pub dictionary_is_isomorphism: bool,
    /// Every apartment `A` goes to the apartment with the same label.
    pub apartment_labels_match: bool,
    /// An isomorphism of 1-skeleta found by independent backtracking search.
    pub search_isomorphism: Option<Vec<usize>>,
    /// Type correspondence induced by `Φ`, when consistent.
    pub type_map: Option<Vec<usize>>,
    pub type_preserving: bool,
}

impl RoundTripReport {
    pub fn is_success(&self) -> bool {
        self.dictionary_is_isomorphism && self.apartment_labels_match && self.search_isomorphism.is_some()
    }
}

pub fn verify_round_trip(b: &Building) -> Result<RoundTripReport> {
    let ac = apartment_complex(b)?;
    let rec = reconstruct_building(&ac.nerve)?;
    let vertices: Vec<SimplexRef> = ac.vertex_families.iter().map(|(v, _)| *v).collect();
    let nv = vertices.len();
    let mut vertex_map = Vec::with_capacity(nv);
    for (_, fam) in &ac.vertex_families {
        let target = rec
            .families
            .iter()
            .position(|f| f == fam)
            .ok_or_else(|| Error::Reconstruction("a vertex family is not maximal".into()))?;
        vertex_map.push(target);
    }
    let source_adj: Vec<Vec<bool>> = (0..nv)
        .map(|u| (0..nv).map(|v| u != v && vertices_adjacent(b, vertices[u], vertices[v])).collect())
        .collect();
    let mut target_adj = vec![vec![false; rec.families.len()]; rec.families.len()];
    for ch in &rec.chambers {
        for &x in ch {
            for &y in ch {
                target_adj[x][y] = x != y;
            }
        }
    }
    let bijective = rec.families.len() == nv && vertex_map.iter().collect::<BTreeSet<_>>().len() == nv;
    let dictionary_is_isomorphism =
        bijective && (0..nv).all(|u| (0..nv).all(|v| source_adj[u][v] == target_adj[vertex_map[u]][vertex_map[v]]));
    let apartment_labels_match = (0..ac.apartments.len()).all(|k| {
        (0..nv).all(|v| ac.vertex_families[v].1.contains(k) == rec.families[vertex_map[v]].contains(k))
    });
    let search_isomorphism = find_graph_isomorphism(&source_adj, &target_adj);
    let type_of = |v: SimplexRef| b.vertex_types(v).iter().next().expect("vertices have one type");
    let mut type_map = vec![usize::MAX; b.rank()];
    let mut consistent = true;
    for (k, &v) in vertices.iter().enumerate() {
        let (s, t) = (type_of(v), rec.vertex_types[vertex_map[k]]);
        if type_map[s] == usize::MAX {
            type_map[s] = t;
        } else if type_map[s] != t {
            consistent = false;
        }
    }
    let type_map = consistent.then_some(type_map);
    let type_preserving = type_map.as_ref().is_some_and(|m| m.iter().enumerate().all(|(i, &t)| i == t));
    Ok(RoundTripReport {
        source_vertices: nv,
        reconstructed_vertices: rec.families.len(),
        source_chambers: b.num_chambers(),
        reconstructed_chambers: rec.building.num_chambers(),
        vertex_map,
        dictionary_is_isomorphism,
        apartment_labels_match,
        search_isomorphism,
        type_map,
        type_preserving,
    })
}

/// Distinct vertices are adjacent when they lie in a common chamber.
pub fn vertices_adjacent(b: &Building, u: SimplexRef, v: SimplexRef) -> bool {
    b.residue_of(u).into_iter().any(|c| b.in_residue(v, c))
}

/// Backtracking graph isomorphism with degree pruning.
pub fn find_graph_isomorphism(g1: &[Vec<bool>], g2: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = g1.len();
    if g2.len() != n {
        return None;
    }
    let deg = |g: &[Vec<bool>], v: usize| g[v].iter().filter(|&&e| e).count();
    let d1: Vec<usize> = (0..n).map(|v| deg(g1, v)).collect();
    let d2: Vec<usize> = (0..n).map(|v| deg(g2, v)).collect();
    let mut s1 = d1.clone();
    let mut s2 = d2.clone();
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return None;
    }
    // visit vertices in BFS order so each new vertex has mapped neighbours
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for v in 0..n {
                if g1[u][v] && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    fn extend(
        k: usize,
        order: &[usize],
        g1: &[Vec<bool>],
        g2: &[Vec<bool>],
        d1: &[usize],
        d2: &[usize],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let u = order[k];
        for cand in 0..g2.len() {
            if used[cand] || d1[u] != d2[cand] {
                continue;
            }
            let ok = order[..k].iter().all(|&w| g1[u][w] == g2[cand][map[w]]);
            if ok {
                map[u] = cand;
                used[cand] = true;
                if extend(k + 1, order, g1, g2, d1, d2, map, used) {
                    return true;
                }
                used[cand] = false;
            }
        }
        false
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(0, &order, g1, g2, &d1, &d2, &mut map, &mut used).then_some(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{digon, fano_plane, gq22, ordinary_polygon};

    #[test]
    fn fano_nerve() {
        let b = Building::from_incidence(&fano_plane()).unwrap();
        let ac = apartment_complex(&b).unwrap();
        assert_eq!(ac.nerve.num_vertices(), 28);
        assert_eq!(ac.nerve.maximal_families().len(), 14);
        assert!(ac.nerve.maximal_families().iter().all(|f| f.len() == 12));
        let rec = reconstruct_building(&ac.nerve).unwrap();
        assert_eq!(rec.building.num_chambers(), 21);
        assert_eq!(rec.building.system().matrix()[0][1], 3);
    }

    #[test]
    fn nerve_is_monotone() {
        let b = Building::from_incidence(&digon(3, 3)).unwrap();
        let ac = apartment_complex(&b).unwrap();
        assert_eq!(ac.nerve.num_vertices(), 9);
        for f in ac.nerve.maximal_families() {
            let idx = f.indices();
            assert!(ac.nerve.is_simplex(&idx));
            for k in 0..idx.len() {
                let mut sub = idx.clone();
                sub.remove(k);
                assert!(ac.nerve.is_simplex(&sub));
            }
        }
        assert!(ac.nerve.is_simplex(&[0]));
    }

    #[test]
    fn thin_input_is_rejected() {
        let hex = Building::from_incidence(&ordinary_polygon(3)).unwrap();
        let ac = apartment_complex(&hex).unwrap();
        assert_eq!(ac.nerve.num_vertices(), 1);
        assert!(matches!(reconstruct_building(&ac.nerve), Err(Error::Reconstruction(_))));
    }

    #[test]
    fn exhaustive_search_matches_families() {
        let b = Building::from_incidence(&fano_plane()).unwrap();
        let ac = apartment_complex(&b).unwrap();
        let found = search_maximal_simplices(28, |s| ac.nerve.is_simplex(s), SEARCH_CAP).unwrap();
        let stored: Vec<Vec<usize>> = {
            let mut v: Vec<Vec<usize>> = ac.nerve.maximal_families().iter().map(LabelSet::indices).collect();
            v.sort();
            v
        };
        assert_eq!(found, stored);
        assert!(matches!(
            search_maximal_simplices(28, |s| ac.nerve.is_simplex(s), 100),
            Err(Error::SearchCap(100))
        ));
    }

    #[test]
    fn spec_round_trip() {
        let b = Building::from_incidence(&gq22()).unwrap();
        let ac = apartment_complex(&b).unwrap();
        let json = serde_json::to_string(&ac.nerve.to_spec()).unwrap();
        let back = Nerve::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, ac.nerve);
    }

    #[test]
    fn graph_isomorphism_search() {
        let cycle = |n: usize, step: usize| -> Vec<Vec<bool>> {
            (0..n).map(|u| (0..n).map(|v| (u + step) % n == v || (v + step) % n == u).collect()).collect()
        };
        assert!(find_graph_isomorphism(&cycle(7, 1), &cycle(7, 3)).is_some());
        let mut two_triangles = vec![vec![false; 6]; 6];
        for (u, v) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            two_triangles[u][v] = true;
            two_triangles[v][u] = true;
        }
        assert!(find_graph_isomorphism(&cycle(6, 1), &two_triangles).is_none());
    }
}
