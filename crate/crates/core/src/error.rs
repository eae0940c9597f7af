use thiserror::Error;

use crate::linalg::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("marked points z_{i} and z_{j} coincide (|z_i - z_j| = {distance:e})")]
    CoincidingPoints { i: usize, j: usize, distance: f64 },
    #[error("evaluation at singular point t = {0}")]
    Singularity(C64),
    #[error("unsupported weight {0}")]
    UnsupportedWeight(String),
    #[error("operation not available for {0}")]
    UnsupportedAlgebra(&'static str),
    #[error("random combination stayed degenerate after {attempts} attempts")]
    DegenerateCombination { attempts: usize },
    #[error("sector {0} contains no singular vectors")]
    EmptySector(String),
    #[error("root collision: {0}")]
    Collision(String),
    #[error("vector vanishes identically")]
    ZeroVector,
    #[error("residues must sum to zero (sum = {0})")]
    ResidueSum(C64),
    #[error("connection is not traceless (max coefficient {0:e})")]
    NotTraceless(f64),
    #[error("Riccati recursion obstructed at resonance m = {m}: obstruction value {value}")]
    ResonanceObstruction { m: usize, value: C64 },
    #[error("unsupported root color {0}; only simple reflections 1, 2 are supported")]
    UnsupportedColor(usize),
    #[error("lattice point {index} hits a zero or pole of Lambda")]
    LatticeSingularity { index: i64 },
    #[error("contour passes within {distance:e} of singularity {index}")]
    ContourTooClose { index: usize, distance: f64 },
    #[error("integration step underflow near t = {0}")]
    StepUnderflow(C64),
    #[error("integration exceeded {0} steps")]
    StepLimit(usize),
    #[error("no singularity-avoiding path found: {0}")]
    BranchCut(String),
    #[error("degenerate leading coefficient (sum of residues {0:e})")]
    DegenerateLeadingCoefficient(f64),
    #[error("truncation overflow: degree {needed} exceeds cutoff {cutoff}")]
    TruncationOverflow { needed: usize, cutoff: usize },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;
