//! Decision procedures for finite-by-Presburger pre-ordered abelian groups and
//! exhaustive constructions on the higher residue rings and multiplicative
//! congruence groups of finite extensions of `Q_p`.

pub mod error;
pub mod fingroup;
pub mod formula;
pub mod padic;
pub mod presburger;
pub mod report;
pub mod testing;
pub mod thdecide;

pub use error::{Error, Result};
