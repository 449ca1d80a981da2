//! Euclidean cones over spherical buildings: points of the geometric
//! realization, the angular metric, the law-of-cosines cone metric and the
//! isometries induced by building automorphisms.

use nalgebra::DVector;
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::building::{Apartment, Building, Chamber, SimplexRef};
use crate::coxeter::{SphericalChart, TypeSet};
use crate::error::{Error, Result};
use crate::geometry::Id;
use crate::rtree::{cone_tree, MetricTree};

/// Tolerance on barycentric sums.
pub const COORD_TOLERANCE: f64 = 1e-12;

/// A point of the geometric realization: a carrier simplex and positive
/// barycentric coordinates over its vertices, listed by ascending type.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizedPoint {
    carrier: SimplexRef,
    coords: Vec<f64>,
}

impl RealizedPoint {
    /// Zero coordinates shrink the carrier; the rest are renormalized.
    pub fn new(b: &Building, carrier: SimplexRef, coords: Vec<f64>) -> Result<Self> {
        if carrier.chamber >= b.num_chambers() {
            return Err(Error::UnknownChamber(carrier.chamber));
        }
        let types: Vec<usize> = b.vertex_types(carrier).iter().collect();
        if types.len() != coords.len() {
            return Err(Error::InvalidPoint(format!(
                "carrier has {} vertices, got {} coordinates",
                types.len(),
                coords.len()
            )));
        }
        if coords.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidPoint("coordinates must be finite and nonnegative".into()));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > COORD_TOLERANCE {
            return Err(Error::InvalidPoint(format!("coordinates sum to {sum}, not 1")));
        }
        let mut cotype = carrier.cotype;
        let mut kept = Vec::with_capacity(coords.len());
        for (&i, &x) in types.iter().zip(&coords) {
            if x > 0.0 {
                kept.push(x);
            } else {
                cotype.insert(i);
            }
        }
        let total: f64 = kept.iter().sum();
        Ok(Self {
            carrier: b.simplex(carrier.chamber, cotype),
            coords: kept.into_iter().map(|x| x / total).collect(),
        })
    }

    /// Barycentre of a simplex.
    pub fn barycentre(b: &Building, carrier: SimplexRef) -> Result<Self> {
        let k = b.vertex_types(carrier).len();
        Self::new(b, carrier, vec![1.0 / k as f64; k])
    }

    pub fn vertex(b: &Building, v: SimplexRef) -> Result<Self> {
        if b.vertex_types(v).len() != 1 {
            return Err(Error::InvalidPoint("not a vertex".into()));
        }
        Self::new(b, v, vec![1.0])
    }

    pub fn carrier(&self) -> SimplexRef {
        self.carrier
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Unit vector of the point in the model sphere of `apt`, or `None` when
    /// the carrier is not in the apartment.
    pub fn embed(&self, b: &Building, chart: &SphericalChart, apt: &Apartment) -> Option<DVector<f64>> {
        let c = *apt.chambers().iter().find(|&&c| b.in_residue(self.carrier, c))?;
        let w = apt.coordinate(b, c)?;
        let m = chart.element_matrix(b.table(), w);
        let mut v = DVector::zeros(chart.rank());
        for (i, &x) in b.vertex_types(self.carrier).iter().zip(&self.coords) {
            v += x * (&m * &chart.chamber_vertices()[i]);
        }
        let norm = v.norm();
        Some(v / norm)
    }
}

/// A point of the cone: the apex, or a point of the realization at a positive
/// radius.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePoint {
    point: Option<RealizedPoint>,
    radius: f64,
}

impl ConePoint {
    pub fn apex() -> Self {
        Self { point: None, radius: 0.0 }
    }

    pub fn new(point: RealizedPoint, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidPoint(format!("radius {radius} must be finite and nonnegative")));
        }
        Ok(if radius == 0.0 { Self::apex() } else { Self { point: Some(point), radius } })
    }

    pub fn is_apex(&self) -> bool {
        self.point.is_none()
    }

    pub fn point(&self) -> Option<&RealizedPoint> {
        self.point.as_ref()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Position in the flat model of the apartment cone over `apt`.
    pub fn embed(&self, b: &Building, chart: &SphericalChart, apt: &Apartment) -> Option<DVector<f64>> {
        match &self.point {
            None => Some(DVector::zeros(chart.rank())),
            Some(p) => p.embed(b, chart, apt).map(|v| v * self.radius),
        }
    }
}

fn angle(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    u.dot(v).clamp(-1.0, 1.0).acos()
}

/// Angular distance, computed in an apartment through both carriers.
pub fn spherical_distance(b: &Building, chart: &SphericalChart, p: &RealizedPoint, q: &RealizedPoint) -> f64 {
    if p == q {
        return 0.0;
    }
    let apt = b
        .apartment_containing(p.carrier.chamber, q.carrier.chamber)
        .expect("any two chambers lie in an apartment");
    spherical_distance_in(b, chart, &apt, p, q).expect("apartment contains both carriers")
}

/// Angular distance measured in a given apartment.
pub fn spherical_distance_in(
    b: &Building,
    chart: &SphericalChart,
    apt: &Apartment,
    p: &RealizedPoint,
    q: &RealizedPoint,
) -> Result<f64> {
    let missing = || Error::InvalidPoint("apartment does not contain the carrier".into());
    let u = p.embed(b, chart, apt).ok_or_else(missing)?;
    let v = q.embed(b, chart, apt).ok_or_else(missing)?;
    Ok(angle(&u, &v))
}

/// `d² = s² + t² − 2st·cos θ`, evaluated as `(s − t)² + 4st·sin²(θ/2)`.
pub fn cone_distance(b: &Building, chart: &SphericalChart, p: &ConePoint, q: &ConePoint) -> f64 {
    match (&p.point, &q.point) {
        (None, _) => q.radius,
        (_, None) => p.radius,
        (Some(x), Some(y)) => {
            let theta = spherical_distance(b, chart, x, y);
            law_of_cosines(p.radius, q.radius, theta)
        }
    }
}

pub fn law_of_cosines(s: f64, t: f64, theta: f64) -> f64 {
    let h = (theta / 2.0).sin();
    ((s - t).powi(2) + 4.0 * s * t * h * h).sqrt()
}

/// A uniformly chosen carrier (random chamber, random nonempty vertex set)
/// with random positive coordinates.
pub fn random_point<R: Rng>(b: &Building, rng: &mut R) -> RealizedPoint {
    let c = rng.gen_range(0..b.num_chambers());
    random_point_at(b, c, rng)
}

/// Random point whose carrier is a face of chamber `c`.
pub fn random_point_at<R: Rng>(b: &Building, c: Chamber, rng: &mut R) -> RealizedPoint {
    let rank = b.rank();
    let mut types = TypeSet::EMPTY;
    while types.is_empty() {
        types = TypeSet::from_types((0..rank).filter(|_| rng.gen_bool(0.5)));
    }
    let raw: Vec<f64> = types.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let coords: Vec<f64> = raw.iter().map(|x| x / sum).collect();
    let carrier = b.simplex(c, types.complement(rank));
    RealizedPoint::new(b, carrier, coords).expect("random coordinates are valid")
}

pub fn random_cone_point<R: Rng>(b: &Building, max_radius: f64, rng: &mut R) -> ConePoint {
    ConePoint::new(random_point(b, rng), rng.gen_range(0.0..max_radius)).expect("radius is valid")
}

/// The isometry of the cone induced by a building automorphism (a chamber
/// permutation together with a diagram permutation of the types).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeIsometry {
    pub chamber_map: Vec<Chamber>,
    pub type_map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsometryReport {
    pub pairs_checked: usize,
    pub max_distortion: f64,
}

impl ConeIsometry {
    pub fn new(b: &Building, chamber_map: Vec<Chamber>, type_map: Option<Vec<usize>>) -> Result<Self> {
        let type_map = type_map.unwrap_or_else(|| (0..b.rank()).collect());
        if !b.is_automorphism(&chamber_map, Some(&type_map)) {
            return Err(Error::InvalidMorphism("chamber map is not an automorphism".into()));
        }
        Ok(Self { chamber_map, type_map })
    }

    pub fn apply_point(&self, b: &Building, p: &RealizedPoint) -> RealizedPoint {
        let carrier = b.simplex(self.chamber_map[p.carrier.chamber], p.carrier.cotype.map(&self.type_map));
        let mut pairs: Vec<(usize, f64)> = b
            .vertex_types(p.carrier)
            .iter()
            .zip(&p.coords)
            .map(|(i, &x)| (self.type_map[i], x))
            .collect();
        pairs.sort_by_key(|&(i, _)| i);
        RealizedPoint { carrier, coords: pairs.into_iter().map(|(_, x)| x).collect() }
    }

    pub fn apply(&self, b: &Building, p: &ConePoint) -> ConePoint {
        ConePoint { point: p.point.as_ref().map(|x| self.apply_point(b, x)), radius: p.radius }
    }

    /// Largest `|d(φP, φQ) − d(P, Q)|` over `pairs` random pairs.
    pub fn verify<R: Rng>(&self, b: &Building, chart: &SphericalChart, pairs: usize, rng: &mut R) -> IsometryReport {
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let p = random_cone_point(b, 3.0, rng);
            let q = random_cone_point(b, 3.0, rng);
            let before = cone_distance(b, chart, &p, &q);
            let after = cone_distance(b, chart, &self.apply(b, &p), &self.apply(b, &q));
            worst = worst.max((before - after).abs());
        }
        IsometryReport { pairs_checked: pairs, max_distortion: worst }
    }
}

/// Cone isometry from a building automorphism with its sampled distortion.
pub fn cone_isometry<R: Rng>(
    b: &Building,
    chart: &SphericalChart,
    chamber_map: Vec<Chamber>,
    type_map: Option<Vec<usize>>,
    pairs: usize,
    rng: &mut R,
) -> Result<(ConeIsometry, IsometryReport)> {
    let iso = ConeIsometry::new(b, chamber_map, type_map)?;
    let report = iso.verify(b, chart, pairs, rng);
    Ok((iso, report))
}

/// Wall tree of the cone through opposite panels `a` and `b2`: a star with one
/// end per chamber of `Res(a)`, truncated at `radius`.
pub fn cone_wall_tree(b: &Building, a: SimplexRef, b2: SimplexRef, radius: Rational64) -> Result<MetricTree> {
    if a.cotype.len() != 1 || b2.cotype.len() != 1 {
        return Err(Error::Precondition("wall trees are spanned by two panels".into()));
    }
    if !b.are_opposite(a, b2) {
        return Err(Error::NotOpposite);
    }
    let labels: Vec<String> = b.residue_of(a).into_iter().map(|c| b.chamber_name(c).to_string()).collect();
    cone_tree(&labels, radius)
}

/// Residue structure at a non-apex cone point: the radial direction is a thin
/// factor, so the point is never thick.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResidue {
    pub carrier_vertex_types: Vec<usize>,
    pub radial_factor_chambers: usize,
    /// Chambers of the link factor `Res(carrier)` of the direction space.
    pub link_chambers: usize,
    pub is_thick: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApexReport {
    pub apex_residue_chambers: usize,
    pub apex_thick: bool,
    pub samples: Vec<PointResidue>,
    pub unique_thick_point: bool,
}

/// The apex residue is the whole building; at any other point the space of
/// directions splits off the thin radial sphere.
pub fn apex_is_unique_thick_point<R: Rng>(b: &Building, samples: usize, rng: &mut R) -> Result<ApexReport> {
    if b.system().classify().components.len() != 1 {
        return Err(Error::Precondition("building is reducible".into()));
    }
    let apex_thick = b.thickness_report(crate::building::ThicknessMode::Direct)?.is_thick;
    let mut out = Vec::with_capacity(samples);
    let mut chambers: Vec<Chamber> = b.chambers().collect();
    for k in 0..samples {
        chambers.shuffle(rng);
        let p = if k == 0 {
            RealizedPoint::barycentre(b, b.simplex(chambers[0], TypeSet::EMPTY))?
        } else {
            random_point_at(b, chambers[0], rng)
        };
        out.push(PointResidue {
            carrier_vertex_types: b.vertex_types(p.carrier).iter().collect(),
            radial_factor_chambers: 2,
            link_chambers: b.residue_of(p.carrier).len(),
            is_thick: false,
        });
    }
    let unique_thick_point = apex_thick && out.iter().all(|s| !s.is_thick);
    Ok(ApexReport { apex_residue_chambers: b.num_chambers(), apex_thick, samples: out, unique_thick_point })
}

/// JSON form: `{"carrier":{"chamber":id,"cotype":[i]},"coords":[..],"radius":s}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePointSpec {
    pub carrier: CarrierSpec,
    pub coords: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarrierSpec {
    pub chamber: Id,
    pub cotype: Vec<usize>,
}

impl ConePointSpec {
    pub fn resolve(&self, b: &Building) -> Result<ConePoint> {
        let chamber = match &self.carrier.chamber {
            Id::Num(n) if *n >= 0 && (*n as usize) < b.num_chambers() => *n as usize,
            id => {
                let name = id.to_string();
                b.chamber_names()
                    .iter()
                    .position(|c| *c == name)
                    .ok_or_else(|| Error::InvalidPoint(format!("unknown chamber {name}")))?
            }
        };
        if let Some(&i) = self.carrier.cotype.iter().find(|&&i| i >= b.rank()) {
            return Err(Error::InvalidPoint(format!("unknown type {i}")));
        }
        let carrier = b.simplex(chamber, TypeSet::from_types(self.carrier.cotype.iter().copied()));
        ConePoint::new(RealizedPoint::new(b, carrier, self.coords.clone())?, self.radius)
    }

    pub fn from_point(b: &Building, p: &ConePoint) -> Self {
        match &p.point {
            None => {
                let carrier = b.simplex(0, TypeSet::single(0).complement(b.rank()));
                ConePointSpec {
                    carrier: CarrierSpec { chamber: Id::Num(carrier.chamber as i64), cotype: carrier.cotype.iter().collect() },
                    coords: vec![1.0],
                    radius: 0.0,
                }
            }
            Some(x) => ConePointSpec {
                carrier: CarrierSpec {
                    chamber: Id::Num(x.carrier.chamber as i64),
                    cotype: x.carrier.cotype.iter().collect(),
                },
                coords: x.coords.clone(),
                radius: p.radius,
            },
        }
    }
}
