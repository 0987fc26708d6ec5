//! Unit-aware genetic programming for symbolic regression.
//!
//! Constants carry an unknown ("joker") unit that is propagated through the
//! expression tree; unit violations are counted and handled by culling,
//! repair, or as an extra objective of an NSGA-II search.

pub mod benchmarks;
pub mod dim_analysis;
pub mod error;
pub mod evolution;
pub mod expr;
pub mod fitting;
pub mod units;

pub use benchmarks::{Benchmark, BenchmarkSpec, Dataset, DatasetUnits};
pub use dim_analysis::{analyze, repair, DimReport};
pub use error::{ConfigError, DataError, ParseError};
pub use evolution::{run, Budget, Individual, Mode, RunConfig, RunResult};
pub use expr::{ExprNode, ExprTree};
pub use fitting::{fit_constants, FitResult};
pub use units::{OpKind, UnitVector};
