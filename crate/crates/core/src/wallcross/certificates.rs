use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::CrossingEvent;
use crate::git::Character;
use crate::glsm::{CiProblem, Glsm, Potential};
use crate::lattice::rational::{dot_int, Rational};
use crate::lattice::{solve_integral, FinAbGroup, IntMatrix, IntVec};
use crate::polyhedral::RationalCone;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub passed: bool,
    pub detail: String,
}

impl Certificate {
    fn pass(detail: impl Into<String>) -> Self {
        Certificate {
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Certificate {
            passed: false,
            detail: detail.into(),
        }
    }
}

/// The three hypotheses that make a crossing's blocks exceptional objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallCertificates {
    /// The cone of fixed base weights misses the ample cone of the base.
    pub ample_disjoint: Certificate,
    /// The cone of all fixed weights is strongly convex.
    pub strongly_convex: Certificate,
    /// The potential vanishes on the fixed locus.
    pub potential_vanishes: Certificate,
}

impl WallCertificates {
    pub fn all_passed(&self) -> bool {
        self.ample_disjoint.passed && self.strongly_convex.passed && self.potential_vanishes.passed
    }

    pub fn failures(&self) -> Vec<String> {
        [
            ("ample-disjoint", &self.ample_disjoint),
            ("strongly-convex", &self.strongly_convex),
            ("potential-vanishes", &self.potential_vanishes),
        ]
        .into_iter()
        .filter(|(_, c)| !c.passed)
        .map(|(n, c)| format!("{n}: {}", c.detail))
        .collect()
    }
}

fn combined(c: &Character) -> IntVec {
    let mut v = c.free.clone();
    v.extend(c.torsion.iter().cloned());
    v
}

/// Whether `target` is a nonnegative integer combination of `gens` (torsion included).
pub fn in_semigroup(target: &Character, gens: &[Character], group: &FinAbGroup) -> bool {
    let k = group.free_rank();
    let t = group.torsion_rank();
    if gens.is_empty() {
        return target.free.iter().all(Zero::is_zero)
            && group.reduce_torsion(&target.torsion).iter().all(Zero::is_zero);
    }
    let free: Vec<IntVec> = gens.iter().map(|g| g.free.clone()).collect();
    let Ok(cone) = RationalCone::from_generators(k, &free) else {
        return false;
    };
    if !cone.contains_int(&target.free) {
        return false;
    }
    // h vanishes on the lineality space and is positive on every other generator
    let mut h = vec![BigInt::zero(); k];
    for f in cone.facets() {
        for (hi, fi) in h.iter_mut().zip(f) {
            *hi += fi;
        }
    }
    let (pointed, group_part): (Vec<usize>, Vec<usize>) =
        (0..gens.len()).partition(|&i| dot_int(&h, &gens[i].free).is_positive());
    let heights: Vec<BigInt> = pointed.iter().map(|&i| dot_int(&h, &gens[i].free)).collect();
    let budget = dot_int(&h, &target.free);

    // the generators in the lineality space generate a group
    let mut cols: Vec<IntVec> = group_part.iter().map(|&i| combined(&gens[i])).collect();
    for (j, a) in group.invariant_factors().iter().enumerate() {
        let mut e = vec![BigInt::zero(); k + t];
        e[k + j] = a.clone();
        cols.push(e);
    }
    let lattice = IntMatrix::from_cols(k + t, &cols);
    let in_group = |v: &IntVec| -> bool {
        if cols.is_empty() {
            v.iter().all(Zero::is_zero)
        } else {
            solve_integral(&lattice, v).is_some()
        }
    };

    fn search(
        idx: usize,
        remaining: &BigInt,
        current: &mut IntVec,
        pointed: &[usize],
        heights: &[BigInt],
        gens: &[Character],
        check: &dyn Fn(&IntVec) -> bool,
    ) -> bool {
        if idx == pointed.len() {
            return remaining.is_zero() && check(current);
        }
        let g = combined(&gens[pointed[idx]]);
        let h = &heights[idx];
        let mut used = BigInt::zero();
        let mut rem = remaining.clone();
        loop {
            if search(idx + 1, &rem, current, pointed, heights, gens, check) {
                for (c, x) in current.iter_mut().zip(&g) {
                    *c += x * &used;
                }
                return true;
            }
            if &rem < h {
                break;
            }
            rem -= h;
            used += 1;
            for (c, x) in current.iter_mut().zip(&g) {
                *c -= x;
            }
        }
        for (c, x) in current.iter_mut().zip(&g) {
            *c += x * &used;
        }
        false
    }

    let mut residual = combined(target);
    search(0, &budget, &mut residual, &pointed, &heights, gens, &in_group)
}

fn cone_of(k: usize, chars: &[&Character]) -> RationalCone {
    let free: Vec<IntVec> = chars.iter().map(|c| c.free.clone()).collect();
    if free.is_empty() {
        RationalCone::zero(k)
    } else {
        RationalCone::from_generators(k, &free).unwrap_or_else(|_| RationalCone::zero(k))
    }
}

pub fn wall_certificates(glsm: &Glsm, event: &CrossingEvent) -> WallCertificates {
    let kr = match glsm.kernel_restriction() {
        Ok(kr) => kr,
        Err(e) => {
            let c = Certificate::fail(e.to_string());
            return WallCertificates {
                ample_disjoint: c.clone(),
                strongly_convex: c.clone(),
                potential_vanishes: c,
            };
        }
    };
    let kernel = &kr.kernel;
    let k = kernel.k();
    let base = kr.base_coordinates();
    let bundle = kr.bundle_coordinates();
    let fixed_base: Vec<usize> = base.iter().copied().filter(|i| event.fixed.contains(i)).collect();
    let fixed_bundle: Vec<usize> = bundle.iter().copied().filter(|i| event.fixed.contains(i)).collect();

    let ample_disjoint = match CiProblem::from_glsm(glsm).and_then(|ci| ci.base_nef_ample()) {
        Err(e) => Certificate::fail(format!("base ample cone unavailable: {e}")),
        Ok(na) => {
            let cx = cone_of(k, &fixed_base.iter().map(|&i| &kernel.weights()[i]).collect::<Vec<_>>());
            let p = cx.intersection(&na.nef);
            let point = if p.is_zero() {
                vec![Rational::zero(); k]
            } else {
                p.relative_interior_point().unwrap_or_else(|_| vec![Rational::zero(); k])
            };
            if na.is_ample(&point) {
                Certificate::fail("the fixed base weights meet the ample cone")
            } else {
                Certificate::pass(format!(
                    "intersection with the nef cone has dimension {} and avoids its interior",
                    p.dim()
                ))
            }
        }
    };

    let ce = cone_of(k, &event.fixed.iter().map(|&i| &kernel.weights()[i]).collect::<Vec<_>>());
    let strongly_convex = if ce.is_strongly_convex() {
        Certificate::pass("no lines in the cone of fixed weights")
    } else {
        Certificate::fail(format!(
            "the cone of fixed weights contains a linear space of dimension {}",
            ce.lineality().len()
        ))
    };

    let potential_vanishes = match &glsm.potential {
        Potential::Zero => Certificate::pass("zero potential"),
        Potential::Monomials(ms) => {
            match ms
                .iter()
                .position(|m| m.iter().enumerate().all(|(i, &e)| e == 0 || event.fixed.contains(&i)))
            {
                Some(j) => Certificate::fail(format!("monomial {} is supported on fixed coordinates", j + 1)),
                None => Certificate::pass("every monomial involves a moving coordinate"),
            }
        }
        Potential::GenericPairing => {
            let group = kernel.group();
            let gens: Vec<Character> = fixed_base.iter().map(|&i| kernel.weights()[i].clone()).collect();
            match fixed_bundle.iter().find(|&&u| {
                let class = kernel.weights()[u].neg(group);
                in_semigroup(&class, &gens, group)
            }) {
                Some(&u) => Certificate::fail(format!(
                    "the section paired with {} has a monomial on fixed coordinates",
                    kernel.names()[u]
                )),
                None => Certificate::pass("no invariant monomial lives on the fixed locus"),
            }
        }
    };

    WallCertificates {
        ample_disjoint,
        strongly_convex,
        potential_vanishes,
    }
}
