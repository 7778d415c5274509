//! Checks shared by the property suites and the acceptance target.
#![allow(dead_code)]

use chamberlain::git::{irrelevant_data, rank_k0, secondary_fan, stacky_fan_at, GitProblem};
use chamberlain::lattice::rational::Rational;
use chamberlain::lattice::{cokernel, kernel_basis, smith_normal_form, IntMatrix};
use chamberlain::polyhedral::{cone_membership, RationalCone};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn rq(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

// ---- strategies

/// `(dim, generators)` with dim ≤ 4 and at most 8 generators.
pub fn cone_input() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=4).prop_flat_map(|d| (Just(d), prop::collection::vec(prop::collection::vec(-3i64..=3, d), 0..=8)))
}

pub fn matrix_input() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

/// Weight systems with free rank k ≤ 2 and n ≤ 7 coordinates.
pub fn weight_system() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=2).prop_flat_map(|k| prop::collection::vec(prop::collection::vec(-2i64..=3, k), (k + 1)..=7))
}

// ---- checks

/// V → H → V gives the same cone.
pub fn dd_round_trip(dim: usize, gens: &[Vec<i64>]) -> Result<(), String> {
    let gens: Vec<Vec<BigInt>> = gens.iter().map(|g| big(g)).collect();
    let c = RationalCone::from_generators(dim, &gens).map_err(|e| e.to_string())?;
    for g in &gens {
        if !c.contains_int(g) {
            return Err(format!("generator {g:?} not in its own cone"));
        }
    }
    let h = RationalCone::from_inequalities(dim, c.facets(), c.equations()).map_err(|e| e.to_string())?;
    for g in &gens {
        if !h.contains_int(g) {
            return Err(format!("generator {g:?} lost by the H-description"));
        }
    }
    for g in h.rays().iter().chain(h.lineality()) {
        if !c.contains_int(g) {
            return Err(format!("H-description produced {g:?} outside the cone"));
        }
    }
    for l in h.lineality() {
        let neg: Vec<BigInt> = l.iter().map(|x| -x).collect();
        if !c.contains_int(&neg) {
            return Err(format!("lineality {l:?} is one-sided"));
        }
    }
    // every facet is tight on some generator set spanning a hyperplane of the cone
    for f in c.facets() {
        if gens.iter().any(|g| g.iter().zip(f).map(|(a, b)| a * b).sum::<BigInt>().is_negative()) {
            return Err(format!("facet {f:?} negative on a generator"));
        }
    }
    if c != h {
        return Err("round trip changed the canonical description".into());
    }
    Ok(())
}

fn mat(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows[0].len(), rows)
}

fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = IntMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut s = BigInt::zero();
            for k in 0..a.cols() {
                s += &a[(i, k)] * &b[(k, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

fn unimodular(m: &IntMatrix) -> bool {
    m.rows() == m.cols() && m.determinant().abs().is_one()
}

/// Smith form contract, kernel saturation and cokernel presentation invariance.
pub fn snf_contracts(rows: &[Vec<i64>]) -> Result<(), String> {
    let a = mat(rows);
    let d = smith_normal_form(&a);
    if mul(&mul(&d.u, &a), &d.v) != d.s {
        return Err("U·A·V ≠ S".into());
    }
    if !unimodular(&d.u) || !unimodular(&d.v) {
        return Err("U or V not unimodular".into());
    }
    for i in 0..d.s.rows() {
        for j in 0..d.s.cols() {
            if i != j && !d.s[(i, j)].is_zero() {
                return Err("S not diagonal".into());
            }
        }
    }
    let diag = d.diagonal();
    for w in diag.windows(2) {
        if w[0].is_negative() || w[1].is_negative() {
            return Err("negative invariant factor".into());
        }
        if w[0].is_zero() && !w[1].is_zero() {
            return Err("zero before nonzero on the diagonal".into());
        }
        if !w[0].is_zero() && !w[1].is_multiple_of(&w[0]) {
            return Err(format!("divisibility chain broken: {} ∤ {}", w[0], w[1]));
        }
    }
    let k = kernel_basis(&a);
    if k.cols() != a.cols() - d.rank() {
        return Err(format!("kernel has {} vectors, expected {}", k.cols(), a.cols() - d.rank()));
    }
    if k.cols() > 0 {
        if !mul(&a, &k).is_zero() {
            return Err("A·K ≠ 0".into());
        }
        if smith_normal_form(&k).diagonal().iter().any(|x| !x.is_one()) {
            return Err("kernel basis not saturated".into());
        }
    }
    // conjugate by unimodular matrices taken from an unrelated Smith form
    let twist = smith_normal_form(&IntMatrix::from_rows(
        a.cols(),
        &(0..a.cols()).map(|i| (0..a.cols()).map(|j| rows[i % rows.len()][j] + (i == j) as i64 * 7).collect::<Vec<_>>()).collect::<Vec<_>>(),
    ));
    let left = smith_normal_form(&IntMatrix::from_rows(
        a.rows(),
        &(0..a.rows()).map(|i| (0..a.rows()).map(|j| (i * 3 + j * 5) as i64 % 4 - 1 + (i == j) as i64 * 5).collect::<Vec<_>>()).collect::<Vec<_>>(),
    ));
    let conj = mul(&mul(&left.u, &a), &twist.v);
    if cokernel(&a) != cokernel(&conj) {
        return Err("cokernel depends on the presentation".into());
    }
    Ok(())
}

/// Membership certificates re-verify.
pub fn membership_certificate(theta: &[i64], s: &[Vec<i64>]) -> Result<(), String> {
    let t = rq(&big(theta));
    let s: Vec<Vec<Rational>> = s.iter().map(|v| rq(&big(v))).collect();
    let m = cone_membership(&t, &s).map_err(|e| e.to_string())?;
    if m.verify(&t, &s) {
        Ok(())
    } else {
        Err(format!("certificate {m:?} fails"))
    }
}

/// `rank K₀(P(a)) = Σ a_i`.
pub fn weighted_projective_rank(a: &[i64]) -> Result<(), String> {
    let weights: Vec<Vec<i64>> = a.iter().map(|&x| vec![x]).collect();
    let git = GitProblem::from_weights(&weights).map_err(|e| e.to_string())?;
    let sf = stacky_fan_at(&git, &[Rational::one()]).map_err(|e| e.to_string())?;
    let r = rank_k0(&sf).map_err(|e| e.to_string())?;
    let expected: i64 = a.iter().sum();
    if r == BigInt::from(expected) {
        Ok(())
    } else {
        Err(format!("P{a:?}: rank {r}, expected {expected}"))
    }
}

/// Every tuple of positive integers with at least two entries and sum ≤ `max`.
pub fn weight_tuples(max: i64) -> Vec<Vec<i64>> {
    fn go(prefix: &mut Vec<i64>, left: i64, out: &mut Vec<Vec<i64>>) {
        if prefix.len() >= 2 {
            out.push(prefix.clone());
        }
        for a in 1..=left {
            prefix.push(a);
            go(prefix, left - a, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), max, &mut out);
    out
}

/// Fan axioms, covering, and irrelevant data constant on chamber interiors.
/// Systems without free weights or with an empty fan are skipped (`Ok(false)`).
pub fn chamber_coherence(weights: &[Vec<i64>]) -> Result<bool, String> {
    let git = GitProblem::from_weights(weights).map_err(|e| e.to_string())?;
    let fan = match secondary_fan(&git) {
        Ok(f) => f,
        Err(chamberlain::Error::NoFreeWeights) => return Ok(false),
        Err(e) => return Err(e.to_string()),
    };
    fan.arrangement.fan.check_axioms()?;
    fan.arrangement.check_covering()?;
    for (i, ch) in fan.chambers().iter().enumerate() {
        if !ch.cone.in_relative_interior(&ch.interior_point) {
            return Err(format!("chamber {i}: canonical point not interior"));
        }
        // interior + cone stays interior
        let mut other = ch.interior_point.clone();
        for r in ch.cone.rays() {
            for (o, x) in other.iter_mut().zip(r) {
                *o += Rational::new(x.clone(), BigInt::from(3));
            }
        }
        let a = irrelevant_data(&git, &ch.interior_point).map_err(|e| e.to_string())?;
        let b = irrelevant_data(&git, &other).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("chamber {i}: irrelevant data differs inside the chamber"));
        }
        let mut recorded = ch.semistable.clone();
        recorded.sort();
        let mut direct = a.supports.clone();
        direct.sort();
        if recorded != direct {
            return Err(format!("chamber {i}: recorded semistable data disagrees with recomputation"));
        }
        if fan.chamber_of(&other) != Some(i) {
            return Err(format!("chamber {i}: lookup of an interior point failed"));
        }
    }
    Ok(true)
}
