//! Exact real-root isolation for integer polynomials with the Descartes
//! subdivision solver, instrumented to report subdivision-tree size, together
//! with the quantities that govern that size: condition numbers, root counts in
//! a dyadic disk cover of `[-1, 1]`, Obreshkoff regions, and random
//! bit-polynomial models for Monte Carlo experiments.

pub mod condition;
pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod poly;
pub mod random;
pub mod regions;
pub mod solver;
mod sqfree;

pub use condition::{global_cond_bracket, local_cond, separation_lower_bound, CondBracket};
pub use dyadic::{Dyadic, DyadicInterval};
pub use error::{Error, Result};
pub use oracle::{numeric_roots, ComplexRootSet};
pub use poly::{parse_polynomials, IntPolynomial};
pub use random::RandomModel;
pub use solver::{isolate_all, isolate_unit, IsolationResult, SubdivisionTrace};
