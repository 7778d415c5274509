//! Exact integer and rational linear algebra.

mod group;
mod matrix;
mod normal_form;
pub mod rational;

use num_bigint::BigInt;
use num_traits::Zero;

pub use group::{FinAbGroup, QuotientMap};
pub use matrix::IntMatrix;
pub use normal_form::{
    canonical_lattice_basis, cokernel, hermite_normal_form, kernel_basis, smith_normal_form, solve_integral,
    SmithDecomposition,
};

use crate::error::{Error, Result};

/// Integer vector.
pub type IntVec = Vec<BigInt>;

pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Divides a nonzero integer vector by the gcd of its entries.
pub fn primitive(v: &[BigInt]) -> Result<IntVec> {
    if v.iter().all(Zero::is_zero) {
        return Err(Error::Degenerate("no primitive direction".into()));
    }
    Ok(rational::divide_by_gcd(v.to_vec()))
}
