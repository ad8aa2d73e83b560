//! Truncated arithmetic in `Z_p` and its finite extensions.
//!
//! Every value carries its prime and working precision `N`; results are exact
//! modulo `p^N`. Binary operations on mixed precisions coerce to the smaller one.

mod exp;
mod ext;
mod int;

pub use exp::{ep_exp, exp_scale, factorial_valuation, truncation_bound, ExpBase};
pub use ext::{decompose, eval_at_root, ext_exp, vandermonde_check, ExtElem, ExtModulus};
pub use int::{int_valuation, mod_inverse, prime_power, split_prime_part, PadicInt, Valuation};
