//! Estimators, fits and bookkeeping for the absolute frequency measurement.

mod budget;
mod chain;
mod comparison;
mod fit;
mod ramsey;
pub mod synthetic;
mod zeeman;

pub use budget::*;
pub use chain::*;
pub use comparison::*;
pub use fit::*;
pub use ramsey::*;
pub use zeeman::*;
