use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::IntMatrix;
use super::normal_form::smith_normal_form;
use crate::error::{Error, Result};

/// A finitely generated abelian group `Z^free_rank ⊕ Z/d_1 ⊕ … ⊕ Z/d_t`
/// with `2 ≤ d_1 | d_2 | … | d_t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl FinAbGroup {
    pub fn new(free_rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self> {
        let two = BigInt::from(2);
        for (i, d) in invariant_factors.iter().enumerate() {
            if d < &two {
                return Err(Error::InvalidInput(format!(
                    "invariant factor {d} must be at least 2"
                )));
            }
            if i > 0 && !d.is_multiple_of(&invariant_factors[i - 1]) {
                return Err(Error::InvalidInput(format!(
                    "invariant factors must form a divisibility chain ({} does not divide {d})",
                    invariant_factors[i - 1]
                )));
            }
        }
        Ok(FinAbGroup {
            free_rank,
            invariant_factors,
        })
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn torsion_rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn is_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors
            .iter()
            .fold(BigInt::one(), |acc, d| acc * d)
    }

    /// Reduces torsion residues into `[0, d_i)`.
    pub fn reduce_torsion(&self, residues: &[BigInt]) -> Vec<BigInt> {
        residues
            .iter()
            .zip(&self.invariant_factors)
            .map(|(r, d)| r.mod_floor(d))
            .collect()
    }
}

/// A surjection `Z^m → G` onto a group in invariant-factor form, given by a
/// matrix whose first `free_rank` rows are the free coordinates and whose
/// remaining rows are read modulo the invariant factors.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub target: FinAbGroup,
    pub matrix: IntMatrix,
}

impl QuotientMap {
    /// The map `Z^rows(a) → Z^rows(a) / a·Z^cols(a)`.
    pub fn cokernel_of(a: &IntMatrix) -> Self {
        let snf = smith_normal_form(a);
        let diag = snf.diagonal();
        let m = a.rows();
        let mut free_rows = Vec::new();
        let mut torsion_rows = Vec::new();
        let mut factors = Vec::new();
        for i in 0..m {
            let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if d.is_zero() {
                free_rows.push(snf.u.row(i));
            } else if !d.is_one() {
                torsion_rows.push(snf.u.row(i));
                factors.push(d);
            }
        }
        let target = FinAbGroup::new(free_rows.len(), factors)
            .expect("Smith diagonal forms a divisibility chain");
        free_rows.extend(torsion_rows);
        let matrix = IntMatrix::from_rows(m, &free_rows);
        QuotientMap { target, matrix }
    }

    /// Image of `x`, returned as (free part, reduced torsion residues).
    pub fn apply(&self, x: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
        let y = if self.matrix.rows() == 0 {
            Vec::new()
        } else {
            self.matrix.mul_vec(x)
        };
        let f = self.target.free_rank();
        let free = y[..f].to_vec();
        let torsion = self.target.reduce_torsion(&y[f..]);
        (free, torsion)
    }
}
