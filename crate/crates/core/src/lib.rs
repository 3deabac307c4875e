//! Certified computational toolkit for effective Diophantine methods.
//!
//! * [`numeric`]: exact arithmetic and certified real intervals
//! * [`contfrac`]: continued fractions, Dirichlet approximation, Pell equations
//! * [`logforms`]: explicit linear-forms-in-logarithms bound formulas (log10 scale)
//! * [`reduction`]: the Baker–Davenport reduction engine with replayable certificates
//! * [`solvers`]: Mordell, cubic Thue, exponential gaps and the {1,3,8,120} quadruple
//! * [`pade`]: hypergeometric Padé approximants to the cube root of two
//! * [`classfield`]: imaginary quadratic class numbers and idoneal numbers
//! * [`abcwaring`]: abc triples and the Waring `g(k)` check
//! * [`cli`]: command-line dispatch, reports and certificate persistence

pub mod abcwaring;
pub mod classfield;
pub mod cli;
pub mod contfrac;
pub mod error;
pub mod logforms;
pub mod numeric;
pub mod pade;
pub mod reduction;
pub mod solvers;

pub use error::{Error, Result};
