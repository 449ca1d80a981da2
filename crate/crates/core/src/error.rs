use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Coxeter matrix: {0}")]
    CoxeterMatrix(String),
    #[error("Coxeter group is not spherical")]
    NotSpherical,
    #[error("element enumeration exceeded cap of {0}")]
    EnumerationCap(usize),
    #[error("not a generalized {gonality}-gon: {reason}")]
    NotGeneralizedPolygon { gonality: u32, reason: String },
    #[error("invalid building: {0}")]
    InvalidBuilding(String),
    #[error("unknown chamber {0}")]
    UnknownChamber(usize),
    #[error("projection is not unique: {0}")]
    AmbiguousProjection(String),
    #[error("chambers {0} and {1} are not opposite")]
    NotOppositeChambers(usize, usize),
    #[error("simplices are not opposite")]
    NotOpposite,
    #[error("not an apartment: {0}")]
    NotApartment(String),
    #[error("apartment enumeration exceeded cap of {0}")]
    ApartmentCap(usize),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("building is not thick: {0}")]
    NotThick(String),
    #[error("type {0} is isolated in the Coxeter diagram")]
    IsolatedType(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("group closure exceeded cap of {0}")]
    GroupCap(usize),
    #[error("slide target is not unique for chamber {0}")]
    SlideNotUnique(usize),
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),
    #[error("search cap of {0} candidate tests exceeded")]
    SearchCap(usize),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid sampled map: {0}")]
    InvalidMap(String),
    #[error("parse error: {0}")]
    Parse(String),
}
