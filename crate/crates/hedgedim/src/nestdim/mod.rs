//! Nested box families, densities, the dimension lower bound
//! `2 - limsup(sum_k |log delta_k|)/|log d_n|`, the martingale measure that
//! proves it, and a grid-based nest extractor / box-counting estimator for
//! planar point clouds.
//!
//! Area arithmetic is exact: box coordinates are `f64` (hence dyadic
//! rationals) and all intersection areas, densities and masses are computed
//! in `rug::Rational` before any rounding.

mod extract;
mod family;
mod mcmullen;

pub use extract::{
    box_count_dimension, extract_nest, four_corner_family, points_from_csv, points_to_csv,
    BoxCountEstimate,
};
pub use family::{
    density, validate_nesting, Generation, GridBox, NestedFamily, NestingReport,
    NestingViolation,
};
pub use mcmullen::{
    frostman_check, martingale_measure, mcmullen_bound, mcmullen_bound_from_bounds,
    DimensionBound, FrostmanReport, MartingaleMeasure, SumConvention,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NestError {
    #[error("no input points")]
    EmptyInput,
    #[error("point {index} lies outside the root box")]
    PointOutsideRoot { index: usize },
    #[error("scale {level} does not divide its predecessor by an integer factor")]
    ScaleNotNested { level: usize },
    #[error("diameter bound d_{level} >= 1: quotient |log d| degenerate")]
    DegenerateDiameter { level: usize },
    #[error("box {index} of generation {generation} has no child")]
    ChildlessParent { generation: usize, index: usize },
    #[error("box counting requires at least two scales")]
    FewerThanTwoScales,
    #[error("family fails nesting validation: {0}")]
    InvalidFamily(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
}
