pub mod banded;
mod descent;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod interp;
pub mod minimizer;
pub mod operator;
pub mod params;
pub mod scalar;
pub mod symmetrization;
pub mod thresholds;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{make_grid, RadialField, RadialGrid, StatePair};
pub use operator::{lp_norm_p, RadialOperator};
pub use params::{validate_params, ProblemParams, ValidationResult};
