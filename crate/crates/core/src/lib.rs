//! Verification engine for the (q+1)-arc `{(1, t, t^(2^h), t^(2^h+1))} ∪ {U4}`
//! of PG(3, q), q = 2^n, and its stabilizer PGL(2, q).

pub mod arc;
pub mod cli;
pub mod error;
pub mod expected;
pub mod geom;
pub mod gf;
pub mod group;
pub mod incidence;
pub mod klein;
pub mod pointplane;

pub use error::{Error, Result};
