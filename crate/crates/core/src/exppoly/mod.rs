//! Exponential polynomials in `x_1..x_n, E(x_1)..E(x_n)` with coefficients in
//! `Z[E(1), E(-1)]`, and the algebraic transforms used by the decision procedure.

mod combination;
mod jacobian;
mod poly;
mod transform;

pub use combination::ExpCombination;
pub use jacobian::{det_padic, jacobian, jacobian_matrix, jacobian_polys};
pub use poly::{ExpPoly, ExpSystem, Monomial};
pub use transform::{content, unit_shift_weight, LinearRelation};
pub(crate) use transform::LaurentExpPoly;
