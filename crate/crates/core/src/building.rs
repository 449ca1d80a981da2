//! Finite spherical buildings stored as chamber systems.
//!
//! A [`Building`] is a set of chambers together with, for every type `i`, a
//! partition of the chambers into `i`-panels. Simplices are residues: the
//! simplex of cotype `J` containing a chamber `c` is the `J`-residue of `c`,
//! referenced through [`SimplexRef`]. The Weyl distance `δ(c, d)` is computed
//! once for all pairs at construction and the chamber-system axioms are checked
//! against it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coxeter::{CoxeterSystem, Element, ElementTable, TypeSet, DEFAULT_ELEMENT_CAP};
use crate::error::{Error, Result};
use crate::geometry::IncidenceGeometry;

pub type Chamber = usize;

/// Largest chamber count accepted (the Weyl-distance table is quadratic).
pub const MAX_CHAMBERS: usize = 4_000;

/// Pairs checked exhaustively by the axiom validation; beyond this a seeded
/// random sample of the same size is used.
pub const AXIOM_CHECK_PAIRS: usize = 10_000;

/// Default cap for [`Building::enumerate_apartments`].
pub const DEFAULT_APARTMENT_CAP: usize = 100_000;

/// A simplex given as the `cotype`-residue of `chamber`. Values built through
/// [`Building::simplex`] are canonical: `chamber` is the least chamber of the
/// residue, so equal simplices compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SimplexRef {
    pub chamber: Chamber,
    pub cotype: TypeSet,
}

/// `δ(c, d)` together with one minimal gallery from `c` to `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WDistance {
    pub element: Element,
    pub word: Vec<usize>,
    pub gallery: Vec<Chamber>,
}

#[derive(Clone, Debug)]
pub struct Building {
    system: CoxeterSystem,
    table: Arc<ElementTable>,
    names: Vec<String>,
    panel_of: Vec<Vec<usize>>,
    panels: Vec<Vec<Vec<Chamber>>>,
    delta: Vec<u32>,
    opposition: Vec<usize>,
}

impl Building {
    /// Builds and validates a chamber system. `panels[i]` lists the
    /// `i`-panels, each as a set of chamber indices.
    pub fn from_panels(
        system: CoxeterSystem,
        names: Vec<String>,
        panels: Vec<Vec<Vec<Chamber>>>,
    ) -> Result<Self> {
        let n = names.len();
        let rank = system.rank();
        if n == 0 {
            return Err(Error::InvalidBuilding("no chambers".into()));
        }
        if n > MAX_CHAMBERS {
            return Err(Error::InvalidBuilding(format!("{n} chambers exceed the cap of {MAX_CHAMBERS}")));
        }
        if panels.len() != rank {
            return Err(Error::InvalidBuilding(format!(
                "{} panel partitions for rank {rank}",
                panels.len()
            )));
        }
        let table = Arc::new(ElementTable::enumerate(&system, DEFAULT_ELEMENT_CAP)?);
        let mut panel_of = vec![vec![usize::MAX; n]; rank];
        let mut sorted_panels = Vec::with_capacity(rank);
        for (i, blocks) in panels.into_iter().enumerate() {
            let mut blocks: Vec<Vec<Chamber>> = blocks
                .into_iter()
                .map(|mut b| {
                    b.sort_unstable();
                    b
                })
                .collect();
            blocks.sort();
            for (p, block) in blocks.iter().enumerate() {
                if block.len() < 2 {
                    return Err(Error::InvalidBuilding(format!(
                        "{i}-panel {p} has {} chamber(s)",
                        block.len()
                    )));
                }
                for &c in block {
                    if c >= n {
                        return Err(Error::UnknownChamber(c));
                    }
                    if panel_of[i][c] != usize::MAX {
                        return Err(Error::InvalidBuilding(format!("chamber {c} lies in two {i}-panels")));
                    }
                    panel_of[i][c] = p;
                }
            }
            if let Some(c) = panel_of[i].iter().position(|&p| p == usize::MAX) {
                return Err(Error::InvalidBuilding(format!("chamber {c} lies in no {i}-panel")));
            }
            sorted_panels.push(blocks);
        }
        let opposition = table.opposition_involution();
        let mut b = Building {
            system,
            table,
            names,
            panel_of,
            panels: sorted_panels,
            delta: vec![0; n * n],
            opposition,
        };
        b.compute_delta()?;
        b.check_axioms()?;
        Ok(b)
    }

    fn compute_delta(&mut self) -> Result<()> {
        let n = self.num_chambers();
        let mut dist = vec![usize::MAX; n];
        for c in 0..n {
            dist.fill(usize::MAX);
            dist[c] = 0;
            self.delta[c * n + c] = self.table.identity() as u32;
            let mut queue = VecDeque::from([c]);
            while let Some(x) = queue.pop_front() {
                let wx = self.delta[c * n + x] as Element;
                for s in 0..self.rank() {
                    let ws = self.table.mul_gen(wx, s);
                    let block = self.panel_of[s][x];
                    for k in 0..self.panels[s][block].len() {
                        let y = self.panels[s][block][k];
                        if y == x {
                            continue;
                        }
                        if dist[y] == usize::MAX {
                            dist[y] = dist[x] + 1;
                            if self.table.length(ws) != dist[y] {
                                return Err(Error::InvalidBuilding(format!(
                                    "gallery distance {} from {c} to {y} disagrees with word length {}",
                                    dist[y],
                                    self.table.length(ws)
                                )));
                            }
                            self.delta[c * n + y] = ws as u32;
                            queue.push_back(y);
                        } else if dist[y] == dist[x] + 1 && self.delta[c * n + y] as Element != ws {
                            return Err(Error::InvalidBuilding(format!(
                                "Weyl distance from {c} to {y} depends on the minimal gallery"
                            )));
                        }
                    }
                }
            }
            if let Some(y) = dist.iter().position(|&d| d == usize::MAX) {
                return Err(Error::InvalidBuilding(format!("chamber graph disconnected ({c} cannot reach {y})")));
            }
        }
        Ok(())
    }

    /// Weyl-distance axioms: for `δ(c,d) = w` and every type `s`, the
    /// `s`-panel of `d` contains only chambers at `ws` when `ℓ(ws) > ℓ(w)`,
    /// and exactly one chamber at `ws` otherwise.
    fn check_axioms(&self) -> Result<()> {
        let n = self.num_chambers();
        let check = |c: Chamber, d: Chamber| -> Result<()> {
            let w = self.delta(c, d);
            for s in 0..self.rank() {
                let ws = self.table.mul_gen(w, s);
                let up = self.table.length(ws) > self.table.length(w);
                let mut at_ws = 0;
                for &x in self.panel(s, d) {
                    let wx = self.delta(c, x);
                    if wx == ws {
                        at_ws += 1;
                    } else if wx != w {
                        return Err(Error::InvalidBuilding(format!(
                            "panel of {d} contains a chamber at an unexpected Weyl distance from {c}"
                        )));
                    }
                }
                let panel_len = self.panel(s, d).len();
                let ok = if up { at_ws == panel_len - 1 } else { at_ws == 1 };
                if !ok {
                    return Err(Error::InvalidBuilding(format!(
                        "Weyl-distance axiom fails for chambers {c}, {d} and type {s}"
                    )));
                }
            }
            Ok(())
        };
        if n * n <= AXIOM_CHECK_PAIRS {
            for c in 0..n {
                for d in 0..n {
                    check(c, d)?;
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..AXIOM_CHECK_PAIRS {
                check(rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        Ok(())
    }

    /// The thin building `Σ(W, I)`.
    pub fn coxeter_complex(system: &CoxeterSystem) -> Result<Self> {
        let table = ElementTable::enumerate(system, DEFAULT_ELEMENT_CAP)?;
        let names = (0..table.len())
            .map(|w| {
                let word = table.word(w);
                if word.is_empty() {
                    "e".to_string()
                } else {
                    word.iter().map(|&s| system.labels()[s as usize].as_str()).collect::<Vec<_>>().join(".")
                }
            })
            .collect();
        let panels = (0..system.rank())
            .map(|s| {
                (0..table.len())
                    .filter(|&w| table.length(table.mul_gen(w, s)) > table.length(w))
                    .map(|w| vec![w, table.mul_gen(w, s)])
                    .collect()
            })
            .collect();
        Self::from_panels(system.clone(), names, panels)
    }

    /// Flag complex of a generalized polygon. Type 0 changes the point of a
    /// flag, type 1 changes the line; chambers are flags sorted by
    /// `(point, line)`.
    pub fn from_incidence(geometry: &IncidenceGeometry) -> Result<Self> {
        geometry.check_generalized_polygon()?;
        let system = CoxeterSystem::with_labels(
            vec!["point".into(), "line".into()],
            vec![vec![1, geometry.gonality], vec![geometry.gonality, 1]],
        )?;
        let flags = geometry.flags();
        let names = flags
            .iter()
            .map(|&(p, l)| format!("({},L{l})", geometry.point_names[p]))
            .collect();
        let mut by_line: BTreeMap<usize, Vec<Chamber>> = BTreeMap::new();
        let mut by_point: BTreeMap<usize, Vec<Chamber>> = BTreeMap::new();
        for (c, &(p, l)) in flags.iter().enumerate() {
            by_line.entry(l).or_default().push(c);
            by_point.entry(p).or_default().push(c);
        }
        let panels = vec![by_line.into_values().collect(), by_point.into_values().collect()];
        Self::from_panels(system, names, panels)
    }

    /// Join over the disjoint union of the type sets; chamber `(a, b)` has
    /// index `a * |B2| + b`.
    pub fn join(&self, other: &Building) -> Result<Self> {
        let (n1, n2) = (self.num_chambers(), other.num_chambers());
        let system = self.system.product(&other.system);
        let mut names = Vec::with_capacity(n1 * n2);
        for a in 0..n1 {
            for b in 0..n2 {
                names.push(format!("{}*{}", self.names[a], other.names[b]));
            }
        }
        let mut panels = Vec::with_capacity(system.rank());
        for i in 0..self.rank() {
            let mut blocks = Vec::new();
            for p in &self.panels[i] {
                for b in 0..n2 {
                    blocks.push(p.iter().map(|&a| a * n2 + b).collect());
                }
            }
            panels.push(blocks);
        }
        for j in 0..other.rank() {
            let mut blocks = Vec::new();
            for a in 0..n1 {
                for q in &other.panels[j] {
                    blocks.push(q.iter().map(|&b| a * n2 + b).collect());
                }
            }
            panels.push(blocks);
        }
        Self::from_panels(system, names, panels)
    }

    /// The residue of a simplex, as a building over its cotype.
    pub fn residue_building(&self, simplex: SimplexRef) -> Result<Self> {
        let chambers = self.residue_of(simplex);
        let types: Vec<usize> = simplex.cotype.iter().filter(|&i| i < self.rank()).collect();
        if types.is_empty() {
            return Err(Error::Precondition("residue of a chamber has rank 0".into()));
        }
        let local: BTreeMap<Chamber, usize> = chambers.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let names = chambers.iter().map(|&c| self.names[c].clone()).collect();
        let panels = types
            .iter()
            .map(|&i| {
                let mut seen = BTreeSet::new();
                chambers
                    .iter()
                    .filter(|&&c| seen.insert(self.panel_of[i][c]))
                    .map(|&c| self.panel(i, c).iter().map(|x| local[x]).collect())
                    .collect()
            })
            .collect();
        Self::from_panels(self.system.restrict(simplex.cotype), names, panels)
    }

    pub fn system(&self) -> &CoxeterSystem {
        &self.system
    }

    pub fn table(&self) -> &ElementTable {
        &self.table
    }

    pub fn rank(&self) -> usize {
        self.system.rank()
    }

    pub fn all_types(&self) -> TypeSet {
        TypeSet::full(self.rank())
    }

    pub fn num_chambers(&self) -> usize {
        self.names.len()
    }

    pub fn chambers(&self) -> std::ops::Range<Chamber> {
        0..self.num_chambers()
    }

    pub fn chamber_name(&self, c: Chamber) -> &str {
        &self.names[c]
    }

    pub fn chamber_names(&self) -> &[String] {
        &self.names
    }

    /// The opposition involution on types.
    pub fn opposition(&self) -> &[usize] {
        &self.opposition
    }

    /// The `i`-panel containing `c`.
    pub fn panel(&self, i: usize, c: Chamber) -> &[Chamber] {
        &self.panels[i][self.panel_of[i][c]]
    }

    pub fn panel_index(&self, i: usize, c: Chamber) -> usize {
        self.panel_of[i][c]
    }

    pub fn panels_of_type(&self, i: usize) -> &[Vec<Chamber>] {
        &self.panels[i]
    }

    /// Type of the adjacency between distinct chambers, if any.
    pub fn adjacency_type(&self, c: Chamber, d: Chamber) -> Option<usize> {
        (c != d).then(|| (0..self.rank()).find(|&i| self.panel_of[i][c] == self.panel_of[i][d]))?
    }

    pub fn delta(&self, c: Chamber, d: Chamber) -> Element {
        self.delta[c * self.num_chambers() + d] as Element
    }

    /// Gallery distance in the chamber graph.
    pub fn distance(&self, c: Chamber, d: Chamber) -> usize {
        self.table.length(self.delta(c, d))
    }

    pub fn is_opposite_chambers(&self, c: Chamber, d: Chamber) -> bool {
        self.delta(c, d) == self.table.longest()
    }

    /// Chambers opposite `c`, in increasing order.
    pub fn opposite_chambers(&self, c: Chamber) -> Vec<Chamber> {
        self.chambers().filter(|&d| self.is_opposite_chambers(c, d)).collect()
    }

    pub fn w_distance(&self, c: Chamber, d: Chamber) -> WDistance {
        let element = self.delta(c, d);
        let word: Vec<usize> = self.table.word(element).iter().map(|&s| s as usize).collect();
        let mut gallery = vec![c];
        let mut cur = c;
        for &s in &word {
            let next = self
                .panel(s, cur)
                .iter()
                .copied()
                .find(|&x| x != cur && self.distance(x, d) + 1 == self.distance(cur, d))
                .expect("minimal gallery step exists in a building");
            gallery.push(next);
            cur = next;
        }
        WDistance { element, word, gallery }
    }

    /// Canonical reference to the `cotype`-residue containing `c`.
    pub fn simplex(&self, c: Chamber, cotype: TypeSet) -> SimplexRef {
        let cotype = cotype.intersection(self.all_types());
        let least = self
            .chambers()
            .find(|&x| self.table.support(self.delta(c, x)).is_subset(cotype))
            .expect("c lies in its own residue");
        SimplexRef { chamber: least, cotype }
    }

    pub fn canonical(&self, s: SimplexRef) -> SimplexRef {
        self.simplex(s.chamber, s.cotype)
    }

    pub fn in_residue(&self, s: SimplexRef, x: Chamber) -> bool {
        self.table.support(self.delta(s.chamber, x)).is_subset(s.cotype)
    }

    /// Chambers of the residue, sorted.
    pub fn residue_of(&self, s: SimplexRef) -> Vec<Chamber> {
        self.chambers().filter(|&x| self.in_residue(s, x)).collect()
    }

    pub fn residue(&self, c: Chamber, cotype: TypeSet) -> Vec<Chamber> {
        self.residue_of(SimplexRef { chamber: c, cotype })
    }

    /// Vertex types of a simplex (the complement of its cotype).
    pub fn vertex_types(&self, s: SimplexRef) -> TypeSet {
        s.cotype.complement(self.rank())
    }

    /// The type-`i` vertex of chamber `c`.
    pub fn vertex_of(&self, c: Chamber, i: usize) -> SimplexRef {
        self.simplex(c, TypeSet::single(i).complement(self.rank()))
    }

    /// All vertices of type `i`, ordered by their least chamber.
    pub fn vertices_of_type(&self, i: usize) -> Vec<SimplexRef> {
        let cotype = TypeSet::single(i).complement(self.rank());
        let mut seen = vec![false; self.num_chambers()];
        let mut out = Vec::new();
        for c in self.chambers() {
            if seen[c] {
                continue;
            }
            let v = SimplexRef { chamber: c, cotype };
            for x in self.residue_of(v) {
                seen[x] = true;
            }
            out.push(v);
        }
        out
    }

    /// All vertices, grouped by type.
    pub fn vertices(&self) -> Vec<SimplexRef> {
        (0..self.rank()).flat_map(|i| self.vertices_of_type(i)).collect()
    }

    /// All panels (cotype `{i}`) as canonical simplices, grouped by type.
    pub fn all_panels(&self) -> Vec<SimplexRef> {
        (0..self.rank())
            .flat_map(|i| {
                self.panels[i].iter().map(move |p| SimplexRef { chamber: p[0], cotype: TypeSet::single(i) })
            })
            .collect()
    }

    /// The gate `proj_a(c)`: the unique chamber of `Res(a)` nearest to `c`.
    pub fn project_chamber(&self, a: SimplexRef, c: Chamber) -> Result<Chamber> {
        let mut best: Option<(usize, Chamber)> = None;
        let mut tie = false;
        for x in self.residue_of(a) {
            let d = self.distance(c, x);
            match best {
                Some((bd, _)) if d > bd => {}
                Some((bd, _)) if d == bd => tie = true,
                _ => {
                    best = Some((d, x));
                    tie = false;
                }
            }
        }
        if tie {
            return Err(Error::AmbiguousProjection(format!("chamber {c} onto {a:?}")));
        }
        Ok(best.expect("residues are nonempty").1)
    }

    /// `proj_a(b)`: the largest common face of the gates `proj_a(c)`, `c ⊇ b`.
    pub fn project_simplex(&self, a: SimplexRef, b: SimplexRef) -> Result<SimplexRef> {
        let gates = self
            .residue_of(b)
            .into_iter()
            .map(|c| self.project_chamber(a, c))
            .collect::<Result<BTreeSet<_>>>()?;
        let first = *gates.first().expect("residues are nonempty");
        let spread = gates
            .iter()
            .fold(TypeSet::EMPTY, |acc, &g| acc.union(self.table.support(self.delta(first, g))));
        Ok(self.simplex(first, spread))
    }

    /// The apartment spanned by two opposite chambers.
    pub fn hull_apartment(&self, c: Chamber, d: Chamber) -> Result<Apartment> {
        let w0 = self.table.longest();
        if self.delta(c, d) != w0 {
            return Err(Error::NotOppositeChambers(c, d));
        }
        let l0 = self.table.length(w0);
        let chambers: Vec<Chamber> = self
            .chambers()
            .filter(|&x| {
                let (a, b) = (self.delta(c, x), self.delta(x, d));
                self.table.length(a) + self.table.length(b) == l0 && self.table.mul(a, b) == w0
            })
            .collect();
        Apartment::new(self, chambers)
    }

    /// An apartment containing `c` and `d`: extend `d` away from `c` along a
    /// reduced word of `δ(c,d)⁻¹ w0`, always stepping to the least chamber that
    /// increases the distance from `c`, then take the hull.
    pub fn apartment_containing(&self, c: Chamber, d: Chamber) -> Result<Apartment> {
        let t = &self.table;
        let rest = t.mul(t.inverse(self.delta(c, d)), t.longest());
        let mut cur = d;
        for &s in t.word(rest) {
            let s = s as usize;
            let here = self.distance(c, cur);
            cur = self
                .panel(s, cur)
                .iter()
                .copied()
                .find(|&x| self.distance(c, x) == here + 1)
                .ok_or_else(|| Error::InvalidBuilding(format!("no distance-increasing step from {cur}")))?;
        }
        self.hull_apartment(c, cur)
    }

    /// All apartments, sorted by chamber set. Every apartment is the hull of
    /// its least chamber and that chamber's antipode, so each is built once.
    pub fn enumerate_apartments(&self, cap: usize) -> Result<Vec<Apartment>> {
        let mut out = Vec::new();
        for c in self.chambers() {
            for d in self.opposite_chambers(c) {
                let a = self.hull_apartment(c, d)?;
                if a.chambers[0] == c {
                    if out.len() == cap {
                        return Err(Error::ApartmentCap(cap));
                    }
                    out.push(a);
                }
            }
        }
        out.sort_by(|a, b| a.chambers.cmp(&b.chambers));
        Ok(out)
    }

    /// Opposition of simplices, decided inside an apartment containing both:
    /// `b` must be the image of `a` under that apartment's antipodal map.
    pub fn are_opposite(&self, a: SimplexRef, b: SimplexRef) -> bool {
        if b.cotype != a.cotype.map(&self.opposition) {
            return false;
        }
        let apt = self
            .apartment_containing(a.chamber, b.chamber)
            .expect("validated buildings admit apartments through any two chambers");
        self.in_residue(b, apt.antipode(self, a.chamber))
    }

    pub fn thickness_report(&self, mode: ThicknessMode<'_>) -> Result<ThicknessReport> {
        let panels: Vec<(usize, usize)> = match mode {
            ThicknessMode::Direct => (0..self.rank())
                .flat_map(|i| (0..self.panels[i].len()).map(move |p| (i, p)))
                .collect(),
            ThicknessMode::SingleApartment(apt) => {
                let checked = Apartment::new(self, apt.chambers.clone())?;
                let mut set = BTreeSet::new();
                for &c in checked.chambers() {
                    for i in 0..self.rank() {
                        set.insert((i, self.panel_of[i][c]));
                    }
                }
                set.into_iter().collect()
            }
        };
        let sizes = panels.iter().map(|&(i, p)| self.panels[i][p].len());
        let min_panel = sizes.clone().min().unwrap_or(0);
        let max_panel = sizes.max().unwrap_or(0);
        Ok(ThicknessReport {
            min_panel,
            max_panel,
            panels_checked: panels.len(),
            is_thick: min_panel >= 3,
        })
    }

    /// Checks a chamber map `self → target` with type correspondence
    /// `type_map` (identity when `None`).
    pub fn check_morphism(
        &self,
        target: &Building,
        map: &[Chamber],
        type_map: Option<&[usize]>,
    ) -> Result<MorphismReport> {
        let rank = self.rank();
        if map.len() != self.num_chambers() {
            return Err(Error::InvalidMorphism(format!(
                "map defined on {} of {} chambers",
                map.len(),
                self.num_chambers()
            )));
        }
        if let Some(&c) = map.iter().find(|&&c| c >= target.num_chambers()) {
            return Err(Error::UnknownChamber(c));
        }
        let identity: Vec<usize> = (0..rank).collect();
        let sigma = type_map.unwrap_or(&identity);
        if target.rank() != rank
            || sigma.len() != rank
            || (0..rank).any(|i| (0..rank).any(|j| target.system.matrix()[sigma[i]][sigma[j]] != self.system.matrix()[i][j]))
        {
            return Err(Error::InvalidMorphism("buildings are not of the same type".into()));
        }
        let mut is_morphism = true;
        let mut injective_on_panels = true;
        let mut panel_surjective = true;
        for i in 0..rank {
            let ti = sigma[i];
            for p in &self.panels[i] {
                let target_panel = target.panel_of[ti][map[p[0]]];
                if p.iter().any(|&c| target.panel_of[ti][map[c]] != target_panel) {
                    is_morphism = false;
                }
                let image: BTreeSet<Chamber> = p.iter().map(|&c| map[c]).collect();
                injective_on_panels &= image.len() == p.len();
                panel_surjective &= image.len() == target.panels[ti][target_panel].len()
                    && image.iter().all(|&x| target.panel_of[ti][x] == target_panel);
            }
        }
        let image: BTreeSet<Chamber> = map.iter().copied().collect();
        let surjective = image.len() == target.num_chambers();
        Ok(MorphismReport {
            is_morphism,
            is_nondegenerate: is_morphism && injective_on_panels,
            is_epimorphism: is_morphism && panel_surjective,
            panel_surjective,
            surjective,
        })
    }

    /// Whether a chamber bijection with a type permutation is an automorphism.
    pub fn is_automorphism(&self, map: &[Chamber], type_map: Option<&[usize]>) -> bool {
        let bijective = map.len() == self.num_chambers()
            && map.iter().copied().collect::<BTreeSet<_>>().len() == map.len();
        bijective
            && self
                .check_morphism(self, map, type_map)
                .map(|r| r.is_morphism && r.is_nondegenerate)
                .unwrap_or(false)
    }

    /// Join factors read off the Coxeter diagram.
    pub fn diagram_factorization(&self) -> Vec<Factor> {
        let labels = self.system.classify();
        labels
            .components
            .into_iter()
            .map(|comp| {
                let sizes: Vec<usize> = comp
                    .types
                    .iter()
                    .flat_map(|&i| self.panels[i].iter().map(Vec::len))
                    .collect();
                let thin = sizes.iter().all(|&s| s == 2);
                let thick = sizes.iter().all(|&s| s >= 3);
                Factor {
                    sphere_factor: thin && comp.types.len() == 1,
                    types: comp.types,
                    label: comp.label,
                    thin,
                    thick,
                }
            })
            .collect()
    }

    pub fn dump(&self) -> BuildingDump {
        BuildingDump {
            types: self.system.labels().to_vec(),
            coxeter: self.system.matrix().to_vec(),
            chambers: Some(self.names.clone()),
            panels: Some(self.panels.clone()),
        }
    }

    pub fn from_dump(dump: &BuildingDump) -> Result<Self> {
        let types = if dump.types.is_empty() {
            (0..dump.coxeter.len()).map(|i| format!("s{i}")).collect()
        } else {
            dump.types.clone()
        };
        let system = CoxeterSystem::with_labels(types, dump.coxeter.clone())?;
        match (&dump.chambers, &dump.panels) {
            (Some(names), Some(panels)) => Self::from_panels(system, names.clone(), panels.clone()),
            (None, None) => {
                if !system.is_spherical() {
                    return Err(Error::NotSpherical);
                }
                Self::coxeter_complex(&system)
            }
            _ => Err(Error::Parse("building dump needs both `chambers` and `panels`".into())),
        }
    }
}

/// JSON building dump: Coxeter data, chamber names and panels by type. Without
/// chambers and panels it denotes the Coxeter complex of the matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildingDump {
    #[serde(default)]
    pub types: Vec<String>,
    pub coxeter: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chambers: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub panels: Option<Vec<Vec<Vec<Chamber>>>>,
}

/// A thin sub-chamber-system isomorphic to `Σ(W, I)`. Chambers are sorted;
/// the isomorphism is `x ↦ δ(base, x)` with `base` the least chamber.
#[derive(Clone, Debug)]
pub struct Apartment {
    chambers: Vec<Chamber>,
    base: Chamber,
    by_element: Vec<Chamber>,
}

impl PartialEq for Apartment {
    fn eq(&self, other: &Self) -> bool {
        self.chambers == other.chambers
    }
}

impl Eq for Apartment {}

impl Apartment {
    /// Validates that `chambers` is an apartment of `b`.
    pub fn new(b: &Building, mut chambers: Vec<Chamber>) -> Result<Self> {
        chambers.sort_unstable();
        chambers.dedup();
        let t = b.table();
        if chambers.len() != t.len() {
            return Err(Error::NotApartment(format!("{} chambers, |W| = {}", chambers.len(), t.len())));
        }
        if let Some(&c) = chambers.iter().find(|&&c| c >= b.num_chambers()) {
            return Err(Error::UnknownChamber(c));
        }
        let base = chambers[0];
        let mut by_element = vec![usize::MAX; t.len()];
        for &x in &chambers {
            let w = b.delta(base, x);
            if by_element[w] != usize::MAX {
                return Err(Error::NotApartment("two chambers share a Weyl coordinate".into()));
            }
            by_element[w] = x;
        }
        for &x in &chambers {
            let w = b.delta(base, x);
            for s in 0..b.rank() {
                let y = by_element[t.mul_gen(w, s)];
                if b.adjacency_type(x, y) != Some(s) {
                    return Err(Error::NotApartment(format!("chambers {x} and {y} should be {s}-adjacent")));
                }
            }
        }
        Ok(Self { chambers, base, by_element })
    }

    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn base(&self) -> Chamber {
        self.base
    }

    pub fn contains(&self, c: Chamber) -> bool {
        self.chambers.binary_search(&c).is_ok()
    }

    /// Chamber with Weyl coordinate `w` relative to the base.
    pub fn chamber_at(&self, w: Element) -> Chamber {
        self.by_element[w]
    }

    /// Weyl coordinate of a chamber of the apartment.
    pub fn coordinate(&self, b: &Building, c: Chamber) -> Option<Element> {
        self.contains(c).then(|| b.delta(self.base, c))
    }

    /// The chamber of the apartment opposite `c`.
    pub fn antipode(&self, b: &Building, c: Chamber) -> Chamber {
        let t = b.table();
        self.by_element[t.mul(b.delta(self.base, c), t.longest())]
    }

    pub fn contains_simplex(&self, b: &Building, s: SimplexRef) -> bool {
        self.chambers.iter().any(|&c| b.in_residue(s, c))
    }
}

pub enum ThicknessMode<'a> {
    Direct,
    SingleApartment(&'a Apartment),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThicknessReport {
    pub min_panel: usize,
    pub max_panel: usize,
    pub panels_checked: usize,
    /// In single-apartment mode: every panel meeting the apartment lies in at
    /// least three chambers, which forces the whole building to be thick.
    pub is_thick: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    /// Adjacent chambers go to adjacent-or-equal chambers of the matching type.
    pub is_morphism: bool,
    /// Morphism that never collapses two adjacent chambers.
    pub is_nondegenerate: bool,
    /// Morphism whose restriction to every panel is onto a panel.
    pub is_epimorphism: bool,
    pub panel_surjective: bool,
    /// Direct check that every target chamber is hit.
    pub surjective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub types: Vec<usize>,
    pub label: String,
    pub thin: bool,
    pub thick: bool,
    /// Thin rank-one factor, i.e. an `S⁰` in the join.
    pub sphere_factor: bool,
}

pub fn building_from_incidence(geometry: &IncidenceGeometry) -> Result<Building> {
    Building::from_incidence(geometry)
}

pub fn join(b1: &Building, b2: &Building) -> Result<Building> {
    b1.join(b2)
}

/// The rank-one building with `n` chambers (a set of size `n ≥ 2`).
pub fn rank_one(n: usize) -> Result<Building> {
    Building::from_panels(
        CoxeterSystem::a1(),
        (0..n).map(|c| c.to_string()).collect(),
        vec![vec![(0..n).collect()]],
    )
}
