use num_traits::{Signed, Zero};

use super::cone::RationalCone;
use crate::error::{Error, Result};
use crate::lattice::rational::{dot_mixed, primitive_integer, rank, solve, Rational};
use crate::lattice::IntVec;

/// Outcome of an exact cone-membership test, with a checkable certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `θ = Σ coefficients[i] · S[i]` with all coefficients ≥ 0.
    Member { coefficients: Vec<Rational> },
    /// A functional nonnegative on every `S[i]` and negative on `θ`.
    NonMember { separating: IntVec },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }

    /// Re-checks the certificate against the input.
    pub fn verify(&self, theta: &[Rational], s: &[Vec<Rational>]) -> bool {
        match self {
            Membership::Member { coefficients } => {
                if coefficients.len() != s.len() || coefficients.iter().any(|c| c.is_negative()) {
                    return false;
                }
                let mut sum = vec![Rational::zero(); theta.len()];
                for (c, v) in coefficients.iter().zip(s) {
                    for (a, b) in sum.iter_mut().zip(v) {
                        *a += c * b;
                    }
                }
                sum == theta
            }
            Membership::NonMember { separating } => {
                s.iter().all(|v| !dot_mixed(separating, v).is_negative())
                    && dot_mixed(separating, theta).is_negative()
            }
        }
    }
}

/// Exact test of `θ ∈ Cone(S)`.
///
/// Membership is certified by a Carathéodory decomposition found by
/// enumerating linearly independent subsets in a fixed order; non-membership
/// by an equation or facet of `Cone(S)` that `θ` violates.
pub fn cone_membership(theta: &[Rational], s: &[Vec<Rational>]) -> Result<Membership> {
    let dim = theta.len();
    if dim == 0 {
        return Err(Error::InvalidInput("empty ambient space".into()));
    }
    for v in s {
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against θ of length {dim}",
                v.len()
            )));
        }
    }
    if theta.iter().all(Zero::is_zero) {
        return Ok(Membership::Member {
            coefficients: vec![Rational::zero(); s.len()],
        });
    }
    let nonzero: Vec<usize> = (0..s.len())
        .filter(|&i| s[i].iter().any(|x| !x.is_zero()))
        .collect();
    let max_size = rank(s, dim);
    for size in 1..=max_size {
        let mut found = None;
        for_each_subset(&nonzero, size, &mut |subset| {
            let cols: Vec<Vec<Rational>> = subset.iter().map(|&i| s[i].clone()).collect();
            if rank(&cols, dim) != size {
                return false;
            }
            if let Some(x) = solve(&cols, theta) {
                if x.iter().all(|c| !c.is_negative()) {
                    let mut coefficients = vec![Rational::zero(); s.len()];
                    for (&i, c) in subset.iter().zip(x) {
                        coefficients[i] = c;
                    }
                    found = Some(coefficients);
                    return true;
                }
            }
            false
        });
        if let Some(coefficients) = found {
            return Ok(Membership::Member { coefficients });
        }
    }

    let gens: Vec<IntVec> = s.iter().map(|v| primitive_integer(v)).collect();
    let cone = RationalCone::from_generators(dim, &gens)?;
    for e in cone.equations() {
        let v = dot_mixed(e, theta);
        if !v.is_zero() {
            let separating = if v.is_positive() {
                e.iter().map(|x| -x).collect()
            } else {
                e.clone()
            };
            return Ok(Membership::NonMember { separating });
        }
    }
    for f in cone.facets() {
        if dot_mixed(f, theta).is_negative() {
            return Ok(Membership::NonMember {
                separating: f.clone(),
            });
        }
    }
    Err(Error::Internal(
        "cone membership: no decomposition and no separating functional".into(),
    ))
}

/// Visits the `size`-subsets of `items` in lexicographic order until `f` returns true.
pub(super) fn for_each_subset(items: &[usize], size: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        items: &[usize],
        size: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == size {
            return f(cur);
        }
        let need = size - cur.len();
        for i in start..items.len() {
            if items.len() - i < need {
                break;
            }
            cur.push(items[i]);
            if rec(items, size, i + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(items, size, 0, &mut Vec::with_capacity(size), f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_vec;
    use crate::lattice::rational::q;

    fn qv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn member_in_quadrant() {
        let s = vec![qv(&[1, 0]), qv(&[0, 1])];
        let m = cone_membership(&qv(&[1, 1]), &s).unwrap();
        assert_eq!(m, Membership::Member { coefficients: qv(&[1, 1]) });
        assert!(m.verify(&qv(&[1, 1]), &s));
    }

    #[test]
    fn separated_from_quadrant() {
        let s = vec![qv(&[1, 0]), qv(&[0, 1])];
        let theta = qv(&[-1, 0]);
        let m = cone_membership(&theta, &s).unwrap();
        assert_eq!(m, Membership::NonMember { separating: int_vec(&[1, 0]) });
        assert!(m.verify(&theta, &s));
    }

    #[test]
    fn fractional_coefficients() {
        let s = vec![qv(&[2, 1]), qv(&[1, 2])];
        let m = cone_membership(&qv(&[1, 1]), &s).unwrap();
        let third = Rational::new(1.into(), 3.into());
        assert_eq!(m, Membership::Member { coefficients: vec![third.clone(), third] });
    }

    #[test]
    fn off_the_span() {
        let s = vec![qv(&[1, 0, 0]), qv(&[0, 1, 0])];
        let theta = qv(&[1, 1, 1]);
        let m = cone_membership(&theta, &s).unwrap();
        assert!(!m.is_member());
        assert!(m.verify(&theta, &s));
    }

    #[test]
    fn subsets_in_order() {
        let mut seen = Vec::new();
        for_each_subset(&[0, 1, 2], 2, &mut |s| {
            seen.push(s.to_vec());
            false
        });
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }
}
