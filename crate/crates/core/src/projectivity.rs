//! Perspectivities and projectivities between residues of opposite simplices,
//! the projectivity groups of a panel, and the sub-buildings `B(a, b)` with
//! their slide isomorphisms.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;

use crate::building::{Apartment, Building, Chamber, SimplexRef};
use crate::coxeter::TypeSet;
use crate::error::{Error, Result};
use crate::perm::{self, Perm};

/// Cap on the number of distinct group elements in a closure.
pub const GROUP_CAP: usize = 200_000;

/// The bijection `Res(a₀) → Res(a_k)` induced by a path of pairwise
/// consecutive opposite simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projectivity {
    path: Vec<SimplexRef>,
    source: Vec<Chamber>,
    images: Vec<Chamber>,
}

impl Projectivity {
    pub fn identity(b: &Building, a: SimplexRef) -> Self {
        let a = b.canonical(a);
        let source = b.residue_of(a);
        Self { path: vec![a], images: source.clone(), source }
    }

    pub fn path(&self) -> &[SimplexRef] {
        &self.path
    }

    pub fn start(&self) -> SimplexRef {
        self.path[0]
    }

    pub fn end(&self) -> SimplexRef {
        *self.path.last().expect("paths are nonempty")
    }

    pub fn len(&self) -> usize {
        self.path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of perspectivities mod 2.
    pub fn parity(&self) -> usize {
        self.len() % 2
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 0
    }

    /// Chambers of `Res(a₀)`, sorted.
    pub fn source(&self) -> &[Chamber] {
        &self.source
    }

    /// Images of [`Self::source`], position by position.
    pub fn images(&self) -> &[Chamber] {
        &self.images
    }

    pub fn apply(&self, c: Chamber) -> Option<Chamber> {
        self.source.binary_search(&c).ok().map(|k| self.images[k])
    }

    /// Extends by one perspectivity onto `next`.
    pub fn then(&self, b: &Building, next: SimplexRef) -> Result<Self> {
        let next = b.canonical(next);
        if !b.are_opposite(self.end(), next) {
            return Err(Error::NotOpposite);
        }
        let images = self
            .images
            .iter()
            .map(|&c| b.project_chamber(next, c))
            .collect::<Result<Vec<_>>>()?;
        let mut path = self.path.clone();
        path.push(next);
        Ok(Self { path, source: self.source.clone(), images })
    }

    pub fn inverse(&self) -> Self {
        let mut pairs: Vec<(Chamber, Chamber)> =
            self.images.iter().copied().zip(self.source.iter().copied()).collect();
        pairs.sort_unstable();
        let mut path = self.path.clone();
        path.reverse();
        Self {
            path,
            source: pairs.iter().map(|p| p.0).collect(),
            images: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// For a closed path, the induced permutation of the residue in one-line
    /// notation over the sorted chambers.
    pub fn as_permutation(&self) -> Option<Perm> {
        if self.start() != self.end() {
            return None;
        }
        Some(self.images.iter().map(|c| self.source.binary_search(c).expect("closed path")).collect())
    }
}

/// The perspectivity `[b; a]: Res(a) → Res(b)`, `c ↦ proj_b(c)`.
pub fn perspectivity(b: &Building, a: SimplexRef, target: SimplexRef) -> Result<Projectivity> {
    Projectivity::identity(b, a).then(b, target)
}

/// Composes the perspectivities along `path` (first entry is the source).
pub fn compose_path(b: &Building, path: &[SimplexRef]) -> Result<Projectivity> {
    let (&first, rest) = path
        .split_first()
        .ok_or_else(|| Error::Precondition("empty projectivity path".into()))?;
    rest.iter().try_fold(Projectivity::identity(b, first), |p, &s| p.then(b, s))
}

/// Resolves the choice points of the Knarr construction. `pick` returns an
/// index into a nonempty candidate list sorted by identifier.
pub trait Chooser {
    fn pick(&mut self, n: usize) -> usize;
}

/// Always takes the least candidate.
pub struct LeastChoice;

impl Chooser for LeastChoice {
    fn pick(&mut self, _n: usize) -> usize {
        0
    }
}

/// Uniformly random choices.
pub struct RandomChoice<R: Rng>(pub R);

impl<R: Rng> Chooser for RandomChoice<R> {
    fn pick(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }
}

/// An even projectivity of `Res(r)` fixing `a` and sending `b1` to `b2`,
/// built as `[r; t'; q; t; r]` from galleries `b1 – a – c – d` and
/// `b2 – a – c – d`.
pub fn knarr_projectivity(
    b: &Building,
    r: SimplexRef,
    a: Chamber,
    b1: Chamber,
    b2: Chamber,
) -> Result<Projectivity> {
    knarr_projectivity_with(b, r, a, b1, b2, &mut LeastChoice)
}

pub fn knarr_projectivity_with(
    b: &Building,
    r: SimplexRef,
    a: Chamber,
    b1: Chamber,
    b2: Chamber,
    chooser: &mut dyn Chooser,
) -> Result<Projectivity> {
    let r = b.canonical(r);
    if r.cotype.len() != 1 {
        return Err(Error::Precondition("r must be a panel".into()));
    }
    let i = r.cotype.iter().next().expect("panel has one type");
    let residue = b.residue_of(r);
    for x in [a, b1, b2] {
        if !residue.contains(&x) {
            return Err(Error::Precondition(format!("chamber {x} is not in the residue of r")));
        }
    }
    if a == b1 || a == b2 || b1 == b2 {
        return Err(Error::Precondition("a, b, b' must be distinct".into()));
    }
    let neighbours = b.system().neighbors(i);
    if neighbours.is_empty() {
        return Err(Error::IsolatedType(i));
    }
    let j = neighbours[chooser.pick(neighbours.len())];
    let pick_other = |chooser: &mut dyn Chooser, t: usize, x: Chamber| -> Chamber {
        let others: Vec<Chamber> = b.panel(t, x).iter().copied().filter(|&y| y != x).collect();
        others[chooser.pick(others.len())]
    };
    let c = pick_other(chooser, j, a);
    let d = pick_other(chooser, i, c);
    let q = b.simplex(c, TypeSet::single(i));
    let opp = b.opposition();
    let leg = |start: Chamber, chooser: &mut dyn Chooser| -> Result<SimplexRef> {
        let apt = b.apartment_containing(start, d)?;
        let s = b.simplex(apt.antipode(b, a), TypeSet::single(opp[j]));
        let outside: Vec<Chamber> = b.residue_of(s).into_iter().filter(|&x| !apt.contains(x)).collect();
        if outside.is_empty() {
            return Err(Error::NotThick(format!("residue of panel {s:?} lies inside an apartment")));
        }
        let e = outside[chooser.pick(outside.len())];
        Ok(b.simplex(e, TypeSet::single(opp[i])))
    };
    let t = leg(b1, chooser)?;
    let t2 = leg(b2, chooser)?;
    compose_path(b, &[r, t, q, t2, r])
}

/// One group element of `Π(r)`: a permutation of the sorted residue with the
/// parity of a path realizing it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ParityPerm {
    pub perm: Perm,
    pub parity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PanelGroupReport {
    pub panel: SimplexRef,
    /// Residue chambers; permutations act on positions in this list.
    pub residue: Vec<Chamber>,
    pub path_bound: usize,
    /// Path lengths that contributed at least one new closed projectivity.
    pub productive_lengths: Vec<usize>,
    pub knarr_seeds: usize,
    pub generators: Vec<ParityPerm>,
    pub order: usize,
    pub even_order: usize,
    /// 0 intransitive, 1 transitive, 2 two-transitive.
    pub transitivity: usize,
    pub even_transitivity: usize,
    pub elements: Vec<Perm>,
    pub even_elements: Vec<Perm>,
}

impl PanelGroupReport {
    pub fn is_two_transitive(&self) -> bool {
        self.transitivity == 2
    }

    pub fn even_is_two_transitive(&self) -> bool {
        self.even_transitivity == 2
    }
}

/// The group of projectivities of `Res(r)` realized by closed paths of
/// length at most `bound`, closed under composition with parities tracked.
/// Knarr elements are added as seeds when the construction applies.
pub fn projectivity_group(b: &Building, r: SimplexRef, bound: usize) -> Result<PanelGroupReport> {
    if bound < 2 || bound % 2 != 0 {
        return Err(Error::Precondition("path bound must be even and at least 2".into()));
    }
    let r = b.canonical(r);
    let residue = b.residue_of(r);
    let n = residue.len();
    let index = |c: Chamber| residue.binary_search(&c).expect("chamber of the residue");

    // Breadth-first over (endpoint, induced map) states; distinct paths with
    // the same state induce the same projectivities later on.
    let candidates: Vec<SimplexRef> = {
        let target_types = [r.cotype, r.cotype.map(b.opposition())];
        let mut set = BTreeSet::new();
        for t in target_types {
            for c in b.chambers() {
                set.insert(b.simplex(c, t));
            }
        }
        set.into_iter().collect()
    };
    let mut opposite: BTreeMap<SimplexRef, Vec<SimplexRef>> = BTreeMap::new();
    for &x in &candidates {
        opposite.insert(x, candidates.iter().copied().filter(|&y| b.are_opposite(x, y)).collect());
    }
    let mut seeds: BTreeSet<ParityPerm> = BTreeSet::new();
    let mut productive_lengths = Vec::new();
    let mut level: BTreeSet<(SimplexRef, Vec<Chamber>)> = BTreeSet::from([(r, residue.clone())]);
    for len in 1..=bound {
        let mut next = BTreeSet::new();
        for (x, images) in &level {
            for &y in &opposite[x] {
                let moved = images.iter().map(|&c| b.project_chamber(y, c)).collect::<Result<Vec<_>>>()?;
                next.insert((y, moved));
            }
        }
        let mut grew = false;
        for (x, images) in &next {
            if *x == r {
                let p = ParityPerm { perm: images.iter().map(|&c| index(c)).collect(), parity: len % 2 };
                grew |= seeds.insert(p);
            }
        }
        if grew {
            productive_lengths.push(len);
        }
        level = next;
    }

    let mut knarr_seeds = 0;
    let i = r.cotype.iter().next();
    if let (Some(i), true) = (i, r.cotype.len() == 1) {
        if !b.system().is_isolated(i) && n >= 3 {
            for &a in &residue {
                for &b1 in &residue {
                    for &b2 in &residue {
                        if a != b1 && a != b2 && b1 != b2 {
                            if let Ok(p) = knarr_projectivity(b, r, a, b1, b2) {
                                knarr_seeds += 1;
                                seeds.insert(ParityPerm {
                                    perm: p.as_permutation().expect("closed path"),
                                    parity: 0,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    // Closure in Sym(n) × Z/2, encoded as permutations of 2n points.
    let lift = |p: &ParityPerm| -> Perm {
        (0..2 * n).map(|x| p.perm[x % n] + n * ((x / n + p.parity) % 2)).collect()
    };
    let generators: Vec<ParityPerm> = seeds.into_iter().collect();
    let lifted: Vec<Perm> = generators.iter().map(lift).collect();
    let group = perm::closure(2 * n, &lifted, GROUP_CAP)?;
    let mut elements = BTreeSet::new();
    let mut even_elements = BTreeSet::new();
    for g in &group {
        let p: Perm = g[..n].iter().map(|&x| x % n).collect();
        if g[0] < n {
            even_elements.insert(p.clone());
        }
        elements.insert(p);
    }
    let elements: Vec<Perm> = elements.into_iter().collect();
    let even_elements: Vec<Perm> = even_elements.into_iter().collect();
    Ok(PanelGroupReport {
        panel: r,
        residue: residue.clone(),
        path_bound: bound,
        productive_lengths,
        knarr_seeds,
        order: elements.len(),
        even_order: even_elements.len(),
        transitivity: perm::transitivity_degree(n, &elements),
        even_transitivity: perm::transitivity_degree(n, &even_elements),
        generators,
        elements,
        even_elements,
    })
}

/// `B(a, b)`: the union of the apartments through opposite panels `a`, `b`.
#[derive(Clone, Debug)]
pub struct BetweenBuilding {
    pub a: SimplexRef,
    pub b: SimplexRef,
    pub chambers: Vec<Chamber>,
    /// `(c, d, A)`: `A` is the apartment through `a`, `b` meeting `Res(a)` in
    /// `{c, d}`, with `c < d`.
    pub apartments: Vec<(Chamber, Chamber, Apartment)>,
}

impl BetweenBuilding {
    pub fn contains(&self, c: Chamber) -> bool {
        self.chambers.binary_search(&c).is_ok()
    }
}

pub fn between_building(bld: &Building, a: SimplexRef, b: SimplexRef) -> Result<BetweenBuilding> {
    let (a, b) = (bld.canonical(a), bld.canonical(b));
    if !bld.are_opposite(a, b) {
        return Err(Error::NotOpposite);
    }
    let res = bld.residue_of(a);
    let mut chambers = BTreeSet::new();
    let mut apartments = Vec::new();
    for (k, &c) in res.iter().enumerate() {
        for &d in &res[k + 1..] {
            let apt = bld.hull_apartment(c, bld.project_chamber(b, d)?)?;
            chambers.extend(apt.chambers().iter().copied());
            apartments.push((c, d, apt));
        }
    }
    Ok(BetweenBuilding { a, b, chambers: chambers.into_iter().collect(), apartments })
}

/// A chamber map `B(a, b) → B(a, b')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlideMap {
    pub source: Vec<Chamber>,
    pub images: Vec<Chamber>,
}

impl SlideMap {
    pub fn apply(&self, c: Chamber) -> Option<Chamber> {
        self.source.binary_search(&c).ok().map(|k| self.images[k])
    }
}

/// The isomorphism `B(a, b) → B(a, b')` fixing `B(a, b) ∩ B(a, b')`: `x` goes
/// to the chamber with the same Weyl distances from `x_a` and
/// `proj_{b'}(x_a)` as `x` has from `x_a` and `proj_b(x_a)`.
pub fn slide_isomorphism(bld: &Building, a: SimplexRef, b: SimplexRef, b2: SimplexRef) -> Result<SlideMap> {
    let from = between_building(bld, a, b)?;
    let to = between_building(bld, a, b2)?;
    let mut images = Vec::with_capacity(from.chambers.len());
    for &x in &from.chambers {
        let xa = bld.project_chamber(from.a, x)?;
        let (pb, pb2) = (bld.project_chamber(from.b, xa)?, bld.project_chamber(to.b, xa)?);
        let (w1, w2) = (bld.delta(xa, x), bld.delta(pb, x));
        let mut hits = to.chambers.iter().copied().filter(|&z| bld.delta(xa, z) == w1 && bld.delta(pb2, z) == w2);
        match (hits.next(), hits.next()) {
            (Some(z), None) => images.push(z),
            _ => return Err(Error::SlideNotUnique(x)),
        }
    }
    Ok(SlideMap { source: from.chambers, images })
}

/// Composite of the slides `B(a₀,a₁) → B(a₁,a₂) → … → B(a_{k-1},a_k)` along
/// a path of opposite panels.
pub fn slide_chain(bld: &Building, path: &[SimplexRef]) -> Result<SlideMap> {
    if path.len() < 2 {
        return Err(Error::Precondition("slide chains need at least one step".into()));
    }
    let start = between_building(bld, path[0], path[1])?;
    let mut map = SlideMap { source: start.chambers.clone(), images: start.chambers };
    for m in 1..path.len() - 1 {
        let step = slide_isomorphism(bld, path[m], path[m - 1], path[m + 1])?;
        map.images = map
            .images
            .iter()
            .map(|&c| step.apply(c).ok_or(Error::UnknownChamber(c)))
            .collect::<Result<_>>()?;
    }
    Ok(map)
}
