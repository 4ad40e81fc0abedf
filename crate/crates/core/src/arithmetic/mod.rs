//! Exact arithmetic in the base real quadratic field and in multiquadratic
//! coefficient fields.

mod base;
mod boxes;
mod coeff;
mod ideal;
pub mod interval;
mod residue;

pub use base::{BaseField, FieldElement};
pub(crate) use base::is_squarefree;
pub use boxes::TruncationBound;
pub use coeff::{CoeffElement, CoeffField, CoeffFieldRef};
pub use ideal::{PrincipalIdeal, Splitting};
pub(crate) use ideal::{factor_u64, is_prime_u64};
#[cfg(test)]
pub(crate) use ideal::legendre;
pub use residue::{ResidueRing, RESIDUE_LIMIT};
