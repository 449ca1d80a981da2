//! Finite-sample coarse geometry: Hausdorff distance, domination, control
//! constants of sampled maps, apartment matching and induced end maps.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::building::Building;
use crate::cone::{cone_distance, ConePoint};
use crate::coxeter::SphericalChart;
use crate::error::{Error, Result};
use crate::rtree::{Length, MetricTree, PointSpec, TreeApartment, TreePoint, Vertex};

/// Slack when checking fitted control constants.
pub const FIT_TOLERANCE: f64 = 1e-9;

pub trait MetricSpace {
    type Point: Clone;
    type Dist: Copy + PartialOrd + ToPrimitive + Zero + std::fmt::Debug;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Self::Dist;
}

impl MetricSpace for MetricTree {
    type Point = TreePoint;
    type Dist = Length;

    fn distance(&self, a: &TreePoint, b: &TreePoint) -> Length {
        MetricTree::distance(self, *a, *b)
    }
}

/// The Euclidean cone over a building.
pub struct ConeSpace<'a> {
    pub building: &'a Building,
    pub chart: &'a SphericalChart,
}

impl MetricSpace for ConeSpace<'_> {
    type Point = ConePoint;
    type Dist = f64;

    fn distance(&self, a: &ConePoint, b: &ConePoint) -> f64 {
        cone_distance(self.building, self.chart, a, b)
    }
}

fn max_of<D: PartialOrd + Copy>(it: impl IntoIterator<Item = D>) -> Option<D> {
    it.into_iter().fold(None, |acc, x| match acc {
        Some(m) if m >= x => Some(m),
        _ => Some(x),
    })
}

fn min_of<D: PartialOrd + Copy>(it: impl IntoIterator<Item = D>) -> Option<D> {
    it.into_iter().fold(None, |acc, x| match acc {
        Some(m) if m <= x => Some(m),
        _ => Some(x),
    })
}

/// `sup_{u ∈ U} d(u, V)`.
pub fn directed_distance<S: MetricSpace>(s: &S, u: &[S::Point], v: &[S::Point]) -> Result<S::Dist> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::Precondition("Hausdorff distance of an empty set".into()));
    }
    Ok(max_of(u.iter().map(|x| min_of(v.iter().map(|y| s.distance(x, y))).expect("nonempty")))
        .expect("nonempty"))
}

pub fn hausdorff_distance<S: MetricSpace>(s: &S, u: &[S::Point], v: &[S::Point]) -> Result<S::Dist> {
    let a = directed_distance(s, u, v)?;
    let b = directed_distance(s, v, u)?;
    Ok(if a >= b { a } else { b })
}

/// Every point of `u` lies within `r` of `v`.
pub fn dominates<S: MetricSpace>(s: &S, u: &[S::Point], v: &[S::Point], r: S::Dist) -> bool {
    directed_distance(s, u, v).is_ok_and(|d| d <= r)
}

/// Sample pairs `(x, f(x))` of a map between two metric spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledMap<P, Q> {
    pairs: Vec<(P, Q)>,
}

impl<P, Q> SampledMap<P, Q> {
    pub fn pairs(&self) -> &[(P, Q)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl<P: Clone + PartialEq, Q: Clone> SampledMap<P, Q> {
    pub fn new(pairs: Vec<(P, Q)>) -> Result<Self> {
        for (k, (p, _)) in pairs.iter().enumerate() {
            if pairs[..k].iter().any(|(q, _)| q == p) {
                return Err(Error::InvalidMap(format!("sample {k} repeats a source point")));
            }
        }
        Ok(Self { pairs })
    }

    pub fn image_of(&self, p: &P) -> Option<&Q> {
        self.pairs.iter().find(|(x, _)| x == p).map(|(_, y)| y)
    }

    /// `g ∘ f` on the samples of `f` whose images are sampled by `g`.
    pub fn then<R: Clone>(&self, g: &SampledMap<Q, R>) -> Result<SampledMap<P, R>>
    where
        Q: PartialEq,
    {
        SampledMap::new(
            self.pairs
                .iter()
                .filter_map(|(x, y)| g.image_of(y).map(|z| (x.clone(), z.clone())))
                .collect(),
        )
    }
}

/// Control `d_Y(f x, f y) ≤ c·d_X(x, y) + d` fitted on all sample pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ControlledFit {
    pub c: f64,
    pub d: f64,
    pub pairs: usize,
    pub violations: Vec<(usize, usize)>,
}

/// `c` is the smallest sampled slope, raised to 1; `d` is then the least
/// additive constant covering every pair.
pub fn controlled_fit<X: MetricSpace, Y: MetricSpace>(
    x: &X,
    y: &Y,
    f: &SampledMap<X::Point, Y::Point>,
) -> Result<ControlledFit> {
    if f.len() < 2 {
        return Err(Error::InvalidMap("need at least two samples".into()));
    }
    let mut dists = Vec::new();
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            let (a, fa) = &f.pairs[i];
            let (b, fb) = &f.pairs[j];
            let dx = x.distance(a, b).to_f64().unwrap_or(f64::NAN);
            let dy = y.distance(fa, fb).to_f64().unwrap_or(f64::NAN);
            dists.push((i, j, dx, dy));
        }
    }
    let slope = dists
        .iter()
        .filter(|t| t.2 > 0.0)
        .map(|t| t.3 / t.2)
        .fold(f64::INFINITY, f64::min);
    let c = if slope.is_finite() { slope.max(1.0) } else { 1.0 };
    let d = dists.iter().map(|t| t.3 - c * t.2).fold(0.0, f64::max);
    let violations = dists
        .iter()
        .filter(|t| t.3 > c * t.2 + d + FIT_TOLERANCE)
        .map(|t| (t.0, t.1))
        .collect();
    Ok(ControlledFit { c, d, pairs: dists.len(), violations })
}

/// Nearest apartments of the target to the image of an apartment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchReport {
    /// All apartments attaining the minimum, sorted.
    pub best: Vec<TreeApartment>,
    pub distance: Length,
    /// Least distance among the other apartments; `None` when every
    /// apartment is a minimizer.
    pub runner_up: Option<Length>,
}

impl MatchReport {
    /// `runner_up − distance`; `None` stands for an infinite margin.
    pub fn margin(&self) -> Option<Length> {
        self.runner_up.map(|r| r - self.distance)
    }

    pub fn is_unique(&self) -> bool {
        self.best.len() == 1
    }
}

/// Compares the images of the vertices of `a` with the vertex sets of every
/// apartment of `t2`.
pub fn morse_match(
    t1: &MetricTree,
    t2: &MetricTree,
    f: &SampledMap<TreePoint, TreePoint>,
    a: &TreeApartment,
) -> Result<MatchReport> {
    let image = a
        .path
        .iter()
        .map(|&v| {
            f.image_of(&TreePoint::Vertex(v))
                .copied()
                .ok_or_else(|| Error::InvalidMap(format!("vertex {} of the apartment is not sampled", t1.name(v))))
        })
        .collect::<Result<Vec<_>>>()?;
    let apartments = t2.apartments();
    if apartments.is_empty() {
        return Err(Error::InvalidMap("target tree has no apartments".into()));
    }
    // distances from image points to target vertices, over a common denominator
    let table: Vec<Vec<Length>> = image
        .iter()
        .map(|&p| (0..t2.num_vertices()).map(|v| t2.distance(p, TreePoint::Vertex(v))).collect())
        .collect();
    let denom = table.iter().flatten().fold(1i64, |acc, d| num_integer::lcm(acc, *d.denom()));
    let scaled: Vec<Vec<i64>> =
        table.iter().map(|row| row.iter().map(|d| d.numer() * (denom / d.denom())).collect()).collect();
    let scored: Vec<(Length, TreeApartment)> = apartments
        .into_iter()
        .map(|b| {
            let forward = scaled.iter().map(|row| b.path.iter().map(|&v| row[v]).min().unwrap_or(0)).max();
            let backward = b.path.iter().map(|&v| scaled.iter().map(|row| row[v]).min().unwrap_or(0)).max();
            let h = forward.unwrap_or(0).max(backward.unwrap_or(0));
            (Length::new(h, denom), b)
        })
        .collect();
    let distance = scored.iter().map(|s| s.0).min().expect("nonempty");
    let best = scored.iter().filter(|s| s.0 == distance).map(|s| s.1.clone()).collect();
    let runner_up = scored.iter().filter(|s| s.0 > distance).map(|s| s.0).min();
    Ok(MatchReport { best, distance, runner_up })
}

/// Samples every vertex of `t1` under a vertex map into `t2`.
pub fn vertex_map_samples(perm: &[Vertex]) -> SampledMap<TreePoint, TreePoint> {
    SampledMap { pairs: perm.iter().enumerate().map(|(v, &w)| (TreePoint::Vertex(v), TreePoint::Vertex(w))).collect() }
}

/// A point within `eps` of `p`, moved towards a random vertex by a random
/// multiple of `eps / 8`.
pub fn perturb<R: Rng>(t: &MetricTree, p: TreePoint, eps: Length, rng: &mut R) -> TreePoint {
    let towards = TreePoint::Vertex(rng.gen_range(0..t.num_vertices()));
    let step = eps * Length::new(rng.gen_range(0..=8), 8);
    let room = t.distance(p, towards);
    t.point_along(p, towards, if step < room { step } else { room }).expect("step lies on the geodesic")
}

pub fn perturbed_samples<R: Rng>(
    t: &MetricTree,
    f: &SampledMap<TreePoint, TreePoint>,
    eps: Length,
    rng: &mut R,
) -> SampledMap<TreePoint, TreePoint> {
    SampledMap { pairs: f.pairs.iter().map(|&(x, y)| (x, perturb(t, y, eps, rng))).collect() }
}

/// Apartments identified by their unordered end pair.
pub type ApartmentMap = BTreeMap<(Vertex, Vertex), (Vertex, Vertex)>;

fn key(a: (Vertex, Vertex)) -> (Vertex, Vertex) {
    (a.0.min(a.1), a.0.max(a.1))
}

pub fn apartment_map_from_pairs(pairs: &[(TreeApartment, TreeApartment)]) -> ApartmentMap {
    pairs.iter().map(|(a, b)| (key(a.ends), b.ends)).collect()
}

/// Apartment map induced by a vertex map sending ends to ends.
pub fn apartment_map_from_isometry(t1: &MetricTree, perm: &[Vertex]) -> ApartmentMap {
    t1.apartments().into_iter().map(|a| (a.ends, (perm[a.ends.0], perm[a.ends.1]))).collect()
}

/// Why an apartment map induces no end map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EndMapCertificate {
    /// The two apartments share an end exactly when their images do not.
    SharedEnd { first: (String, String), second: (String, String), share_before: bool },
    /// No assignment of ends is compatible with this apartment's image.
    Inconsistent { apartment: (String, String) },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EndMapOutcome {
    /// `(end of T1, end of T2)` pairs.
    Bijection(Vec<(String, String)>),
    Failure(EndMapCertificate),
}

/// The map on ends induced by an apartment map, with `f(u, v) = (f u, f v)`.
/// Returns indices alongside the named outcome.
pub fn induced_end_map(
    t1: &MetricTree,
    t2: &MetricTree,
    map: &ApartmentMap,
) -> Result<(EndMapOutcome, Option<BTreeMap<Vertex, Vertex>>)> {
    let sources: Vec<(Vertex, Vertex)> = t1.apartments().iter().map(|a| a.ends).collect();
    let targets: BTreeSet<(Vertex, Vertex)> = t2.apartments().iter().map(|a| a.ends).collect();
    if map.len() != sources.len() || sources.iter().any(|s| !map.contains_key(s)) {
        return Err(Error::InvalidMap("apartment map is not defined on every apartment".into()));
    }
    let images: BTreeSet<(Vertex, Vertex)> = map.values().map(|&v| key(v)).collect();
    if images.len() != map.len() || images != targets {
        return Err(Error::InvalidMap("apartment map is not a bijection".into()));
    }
    let n1 = |a: (Vertex, Vertex)| (t1.name(a.0).to_string(), t1.name(a.1).to_string());
    let share = |a: (Vertex, Vertex), b: (Vertex, Vertex)| a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
    for (k, &a) in sources.iter().enumerate() {
        for &b in &sources[k + 1..] {
            let before = share(a, b);
            if before != share(map[&a], map[&b]) {
                let cert = EndMapCertificate::SharedEnd { first: n1(a), second: n1(b), share_before: before };
                return Ok((EndMapOutcome::Failure(cert), None));
            }
        }
    }
    let ends = t1.end_leaves();
    let mut end_map: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    if ends.len() == 2 {
        let a = (ends[0], ends[1]);
        let (x, y) = map[&a];
        end_map.insert(ends[0], x);
        end_map.insert(ends[1], y);
    } else {
        for &u in &ends {
            let through: Vec<(Vertex, Vertex)> = sources.iter().copied().filter(|a| a.0 == u || a.1 == u).collect();
            let (p, q) = (map[&through[0]], map[&through[1]]);
            let common = [p.0, p.1].into_iter().find(|&e| e == q.0 || e == q.1).expect("images share an end");
            end_map.insert(u, common);
        }
    }
    for &a in &sources {
        let expected = key((end_map[&a.0], end_map[&a.1]));
        if expected != key(map[&a]) {
            return Ok((EndMapOutcome::Failure(EndMapCertificate::Inconsistent { apartment: n1(a) }), None));
        }
    }
    let named = end_map.iter().map(|(&u, &v)| (t1.name(u).to_string(), t2.name(v).to_string())).collect();
    Ok((EndMapOutcome::Bijection(named), Some(end_map)))
}

/// A random bijection of the apartments of `t` (used to probe failures).
pub fn shuffled_apartment_map<R: Rng>(t: &MetricTree, rng: &mut R) -> ApartmentMap {
    let apts: Vec<(Vertex, Vertex)> = t.apartments().iter().map(|a| a.ends).collect();
    let mut images = apts.clone();
    images.shuffle(rng);
    apts.into_iter().zip(images).collect()
}

/// JSON sampled map between two trees: file references plus point pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeMapSpec {
    pub source: String,
    pub target: String,
    pub pairs: Vec<(PointSpec, PointSpec)>,
}

impl TreeMapSpec {
    pub fn resolve(&self, t1: &MetricTree, t2: &MetricTree) -> Result<SampledMap<TreePoint, TreePoint>> {
        SampledMap::new(
            self.pairs
                .iter()
                .map(|(p, q)| Ok((t1.point_from_spec(p)?, t2.point_from_spec(q)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn from_map(source: &str, target: &str, t1: &MetricTree, t2: &MetricTree, f: &SampledMap<TreePoint, TreePoint>) -> Self {
        Self {
            source: source.to_string(),
            target: target.to_string(),
            pairs: f.pairs.iter().map(|&(p, q)| (t1.point_to_spec(p), t2.point_to_spec(q))).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::rtree::{h_tree, random_automorphism, regular_truncation, tripod};

    fn int(n: i64) -> Length {
        Length::from_integer(n)
    }

    fn path(n: usize) -> MetricTree {
        MetricTree::new(
            (0..=n).map(|k| k.to_string()).collect(),
            (0..n).map(|k| (k, k + 1, int(1))).collect(),
            vec![0, n],
        )
        .unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let t = path(3);
        let v = |k| TreePoint::Vertex(k);
        assert_eq!(hausdorff_distance(&t, &[v(0), v(1)], &[v(0), v(1)]).unwrap(), int(0));
        assert_eq!(hausdorff_distance(&t, &[v(0)], &[v(3)]).unwrap(), int(3));
        assert_eq!(hausdorff_distance(&t, &[v(0), v(1)], &[v(2), v(3)]).unwrap(), int(2));
        assert!(hausdorff_distance(&t, &[], &[v(0)]).is_err());
        assert!(dominates(&t, &[v(1)], &[v(0), v(1)], Length::new(1, 2)));
        assert!(!dominates(&t, &[v(3)], &[v(0)], int(1)));
        assert!(dominates(&t, &[v(3)], &[v(3)], int(0)));
    }

    #[test]
    fn fits() {
        let t = path(4);
        let id = vertex_map_samples(&[0, 1, 2, 3, 4]);
        let fit = controlled_fit(&t, &t, &id).unwrap();
        assert_eq!((fit.c, fit.d), (1.0, 0.0));
        assert!(fit.violations.is_empty());
        let long = path(8);
        let double = vertex_map_samples(&[0, 2, 4, 6, 8]);
        let fit = controlled_fit(&t, &long, &double).unwrap();
        assert_eq!((fit.c, fit.d), (2.0, 0.0));
        assert!(controlled_fit(&t, &t, &vertex_map_samples(&[0])).is_err());
        assert!(SampledMap::new(vec![(TreePoint::Vertex(0), 0), (TreePoint::Vertex(0), 1)]).is_err());
    }

    #[test]
    fn matching() {
        let t = regular_truncation(3, 2, int(1));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_automorphism(&t, &mut rng);
        let f = vertex_map_samples(&g);
        for a in t.apartments() {
            let r = morse_match(&t, &t, &f, &a).unwrap();
            assert_eq!(r.distance, int(0));
            assert!(r.is_unique());
            let image = key((g[a.ends.0], g[a.ends.1]));
            assert_eq!(r.best[0].ends, image);
            assert!(r.margin().unwrap() > int(0));
        }
        let p = path(3);
        let r = morse_match(&p, &p, &vertex_map_samples(&[0, 1, 2, 3]), &p.apartments()[0]).unwrap();
        assert_eq!(r.margin(), None);
    }

    #[test]
    fn end_maps() {
        let t = tripod(int(1), int(1), int(1));
        let (outcome, map) = induced_end_map(&t, &t, &apartment_map_from_isometry(&t, &[0, 1, 2, 3])).unwrap();
        assert!(matches!(outcome, EndMapOutcome::Bijection(_)));
        assert_eq!(map.unwrap(), BTreeMap::from([(1, 1), (2, 2), (3, 3)]));
        let rot = [0, 2, 3, 1];
        let (_, map) = induced_end_map(&t, &t, &apartment_map_from_isometry(&t, &rot)).unwrap();
        assert_eq!(map.unwrap(), BTreeMap::from([(1, 2), (2, 3), (3, 1)]));

        // H-tree ends u=2, v=3, w=4, z=5: (u,w) and (u,z) share u but their
        // images (u,v) and (w,z) do not
        let h = h_tree();
        let mut m: ApartmentMap = apartment_map_from_isometry(&h, &[0, 1, 2, 3, 4, 5]);
        m.insert((2, 4), (2, 3));
        m.insert((2, 3), (2, 4));
        m.insert((2, 5), (4, 5));
        m.insert((4, 5), (2, 5));
        let (outcome, map) = induced_end_map(&h, &h, &m).unwrap();
        assert!(matches!(outcome, EndMapOutcome::Failure(EndMapCertificate::SharedEnd { .. })));
        assert!(map.is_none());
        m.remove(&(4, 5));
        assert!(induced_end_map(&h, &h, &m).is_err());
    }
}
