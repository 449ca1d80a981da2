//! Spherical buildings, projectivity groups, metric trees and Euclidean cones
//! at desk scale.

pub mod building;
pub mod cli;
pub mod coarse;
pub mod cone;
pub mod coxeter;
pub mod error;
pub mod geometry;
pub mod nerve;
pub mod perm;
pub mod projectivity;
pub mod rtree;

pub use building::{Apartment, Building, Chamber, SimplexRef};
pub use coxeter::{CoxeterSystem, Element, ElementTable, SphericalChart, TypeSet};
pub use error::{Error, Result};
pub use geometry::IncidenceGeometry;
