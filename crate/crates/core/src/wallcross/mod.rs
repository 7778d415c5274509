//! Paths through the secondary fan, wall crossings and semiorthogonal ledgers.

mod certificates;
mod ledger;

pub use certificates::{in_semigroup, wall_certificates, Certificate, WallCertificates};
pub use ledger::{
    assemble_sod, assemble_sod_with, independence_audit, AuditReport, Block, CrossingRecord,
    PathComparison, Residual, Side, SodLedger, SodOptions,
};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::git::{
    completeness_and_properness, rank_k0, secondary_fan, stacky_fan_at, Character, CompletenessReport,
    GitProblem, SecondaryFan, StackyFan,
};
use crate::lattice::rational::{dot_mixed, project_off, solve, to_rational, Rational};
use crate::lattice::{kernel_basis, solve_integral, FinAbGroup, IntMatrix, IntVec};

const MAX_ATTEMPTS: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlannedCrossing {
    pub wall: usize,
    /// Segment parameter in `(0, 1)`.
    pub t: Rational,
    pub from: usize,
    pub to: usize,
}

/// A straight segment `start + t (target - start)` certified to cross walls one at a time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPlan {
    pub source: usize,
    pub target_chamber: usize,
    pub start: Vec<Rational>,
    pub target: Vec<Rational>,
    /// Retry index of the dither that produced `start` (0 = undithered).
    pub attempt: u32,
    pub seed: u64,
    pub crossings: Vec<PlannedCrossing>,
}

impl PathPlan {
    pub fn point_at(&self, t: &Rational) -> Vec<Rational> {
        self.start
            .iter()
            .zip(&self.target)
            .map(|(s, e)| s + (e - s) * t)
            .collect()
    }
}

/// Deterministic dither numerators in `[-8, 8]`.
fn dither(seed: u64, attempt: u32, dim: usize) -> Vec<i64> {
    (0..dim as u64)
        .map(|i| {
            let h = (seed.wrapping_add(attempt as u64))
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add((i + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
            let h = (h ^ (h >> 31)).wrapping_mul(0x94D0_49BB_1331_11EB);
            ((h >> 33) % 17) as i64 - 8
        })
        .collect()
}

fn start_point(fan: &SecondaryFan, source: usize, seed: u64, attempt: u32) -> Vec<Rational> {
    let c = &fan.chambers()[source];
    let base = c.interior_point.clone();
    if attempt == 0 {
        return base;
    }
    let raw = to_rational(&dither(seed, attempt, base.len()).into_iter().map(BigInt::from).collect::<Vec<_>>());
    let eqs: Vec<Vec<Rational>> = c.cone.equations().iter().map(|e| to_rational(e)).collect();
    let d = project_off(&raw, &eqs);
    let mut scale = Rational::new(BigInt::one(), BigInt::from(2).pow(attempt + 2));
    loop {
        let cand: Vec<Rational> = base.iter().zip(&d).map(|(b, x)| b + x * &scale).collect();
        if c.cone.in_relative_interior(&cand) {
            return cand;
        }
        scale /= Rational::from_integer(BigInt::from(2));
    }
}

/// Parameters `t ∈ [0,1]` where the segment lies in `cone`, as a closed interval.
fn segment_interval(
    cone: &crate::polyhedral::RationalCone,
    start: &[Rational],
    dir: &[Rational],
) -> Option<(Rational, Rational)> {
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    for e in cone.equations() {
        let a = dot_mixed(e, start);
        let b = dot_mixed(e, dir);
        if b.is_zero() {
            if !a.is_zero() {
                return None;
            }
        } else {
            let t = -a / b;
            if t < lo || t > hi {
                return None;
            }
            lo = t.clone();
            hi = t;
        }
    }
    for f in cone.facets() {
        let a = dot_mixed(f, start);
        let b = dot_mixed(f, dir);
        if b.is_zero() {
            if a.is_negative() {
                return None;
            }
        } else if b.is_positive() {
            let t = -a / b;
            if t > lo {
                lo = t;
            }
        } else {
            let t = -a / b;
            if t < hi {
                hi = t;
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

fn try_plan(
    fan: &SecondaryFan,
    source: usize,
    target_chamber: usize,
    start: Vec<Rational>,
    target: &[Rational],
) -> std::result::Result<Vec<PlannedCrossing>, String> {
    let dir: Vec<Rational> = target.iter().zip(&start).map(|(e, s)| e - s).collect();
    let mut hits: Vec<(Rational, usize)> = Vec::new();
    for (w, wall) in fan.walls().iter().enumerate() {
        let Some((lo, hi)) = segment_interval(&wall.cone, &start, &dir) else {
            continue;
        };
        if lo != hi {
            return Err(format!("segment runs inside wall {w}"));
        }
        if lo.is_zero() || lo.is_one() {
            return Err(format!("segment endpoint lies on wall {w}"));
        }
        let p: Vec<Rational> = start.iter().zip(&dir).map(|(s, d)| s + d * &lo).collect();
        if !wall.cone.in_relative_interior(&p) {
            return Err(format!(
                "segment meets a cone of codimension at least 2 on the boundary of wall {w}"
            ));
        }
        hits.push((lo, w));
    }
    hits.sort();
    if hits.windows(2).any(|h| h[0].0 == h[1].0) {
        return Err("two walls are crossed at the same parameter".into());
    }
    let mut current = source;
    let mut out = Vec::new();
    for (t, w) in hits {
        let (a, b) = fan.walls()[w].chambers;
        let next = if a == current {
            b
        } else if b == current {
            a
        } else {
            return Err(format!("wall {w} is not adjacent to chamber {current}"));
        };
        out.push(PlannedCrossing {
            wall: w,
            t,
            from: current,
            to: next,
        });
        current = next;
    }
    if current != target_chamber {
        return Err(format!("path ends in chamber {current}, expected {target_chamber}"));
    }
    Ok(out)
}

/// Certified generic segment from a dithered interior point of `source` to `target`.
pub fn plan_path(fan: &SecondaryFan, source: usize, target: &[Rational], seed: u64) -> Result<PathPlan> {
    if source >= fan.chambers().len() {
        return Err(Error::NotAChamber(format!("no chamber with id {source}")));
    }
    let target_chamber = fan.chamber_of(target).ok_or_else(|| {
        Error::PathPlanning("target is not in the interior of a chamber".into())
    })?;
    let mut last = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let start = start_point(fan, source, seed, attempt);
        match try_plan(fan, source, target_chamber, start.clone(), target) {
            Ok(crossings) => {
                return Ok(PathPlan {
                    source,
                    target_chamber,
                    start,
                    target: target.to_vec(),
                    attempt,
                    seed,
                    crossings,
                })
            }
            Err(e) => last = e,
        }
    }
    Err(Error::PathPlanning(format!("retries exhausted: {last}")))
}

/// Re-checks a plan with exact arithmetic.
pub fn verify_plan(fan: &SecondaryFan, plan: &PathPlan) -> std::result::Result<(), String> {
    if !fan.chambers()[plan.source].cone.in_relative_interior(&plan.start) {
        return Err("start is not interior to the source chamber".into());
    }
    let again = try_plan(fan, plan.source, plan.target_chamber, plan.start.clone(), &plan.target)?;
    if again != plan.crossings {
        return Err("recorded crossings disagree with the segment".into());
    }
    if plan.crossings.windows(2).any(|c| c[0].t >= c[1].t) {
        return Err("crossing parameters are not increasing".into());
    }
    Ok(())
}

/// The analysis of one wall crossing.
#[derive(Clone, Debug)]
pub struct CrossingEvent {
    pub wall: usize,
    pub from: usize,
    pub to: usize,
    /// Primitive cocharacter normal to the wall, positive on the destination chamber.
    pub lambda: IntVec,
    /// Pairing of the destination chamber's interior point with λ.
    pub l: Rational,
    /// `⟨θ_K, λ⟩`.
    pub r: BigInt,
    /// Coordinates whose weight pairs to zero with λ.
    pub fixed: Vec<usize>,
    /// Basis of the λ-orthogonal character sublattice (columns of the wall problem's free part).
    pub wall_basis: Vec<IntVec>,
    pub wall_git: Option<GitProblem>,
    /// Wall stability character in `wall_basis` coordinates.
    pub theta_w: Vec<Rational>,
    pub wall_stack: std::result::Result<StackyFan, String>,
    pub wall_completeness: Option<CompletenessReport>,
    pub wall_rank: Option<BigInt>,
}

impl CrossingEvent {
    /// Number of exceptional objects this crossing would contribute, `|r| · rank K_0`.
    pub fn object_count(&self) -> Option<BigInt> {
        self.wall_rank.as_ref().map(|k| self.r.abs() * k)
    }
}

fn coordinates_in(basis: &[IntVec], k: usize, v: &[BigInt]) -> Result<IntVec> {
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    solve_integral(&IntMatrix::from_cols(k, basis), v)
        .ok_or_else(|| Error::Internal("fixed weight outside the λ-orthogonal lattice".into()))
}

/// Wall stability character, moved off lower-dimensional cones of the wall problem if needed.
fn generic_wall_character(git: &GitProblem, theta: Vec<Rational>) -> Vec<Rational> {
    let Ok(fan) = secondary_fan(git) else {
        return theta;
    };
    if fan.chamber_of(&theta).is_some() {
        return theta;
    }
    match fan.chambers_containing(&theta).first() {
        Some(&c) => crate::glsm::perturb_into(&fan, c, &theta),
        None => theta,
    }
}

pub fn crossing_event(
    kernel: &GitProblem,
    fan: &SecondaryFan,
    wall: usize,
    from: usize,
    theta_k: &[BigInt],
) -> Result<CrossingEvent> {
    let w = fan
        .walls()
        .get(wall)
        .ok_or_else(|| Error::InvalidInput(format!("no wall with id {wall}")))?;
    let to = if w.chambers.0 == from {
        w.chambers.1
    } else if w.chambers.1 == from {
        w.chambers.0
    } else {
        return Err(Error::InvalidInput(format!("wall {wall} does not bound chamber {from}")));
    };
    let lambda: IntVec = if w.chambers.0 == to {
        w.normal.clone()
    } else {
        w.normal.iter().map(|x| -x).collect()
    };
    let l = dot_mixed(&lambda, &fan.chambers()[to].interior_point);
    let r: BigInt = lambda.iter().zip(theta_k).map(|(a, b)| a * b).sum();
    let k = kernel.k();
    let fixed: Vec<usize> = (0..kernel.n())
        .filter(|&i| {
            kernel.weights()[i]
                .free
                .iter()
                .zip(&lambda)
                .map(|(a, b)| a * b)
                .sum::<BigInt>()
                .is_zero()
        })
        .collect();
    let kb = kernel_basis(&IntMatrix::from_rows(k, std::slice::from_ref(&lambda)));
    let wall_basis: Vec<IntVec> = kb.col_vecs();
    let theta_full = w.cone.relative_interior_point().unwrap_or_else(|_| vec![Rational::zero(); k]);
    let theta_w = if wall_basis.is_empty() {
        Vec::new()
    } else {
        let cols: Vec<Vec<Rational>> = wall_basis.iter().map(|b| to_rational(b)).collect();
        solve(&cols, &theta_full)
            .ok_or_else(|| Error::Internal("wall point outside the λ-orthogonal space".into()))?
    };
    let group = FinAbGroup::new(wall_basis.len(), kernel.group().invariant_factors().to_vec())?;

    let (wall_git, theta_w, wall_stack) = if fixed.is_empty() {
        let mut sf = StackyFan::new(0, vec![], vec![], vec![vec![]])?;
        sf.generic_stabilizer = group.torsion_order();
        (None, theta_w, Ok(sf))
    } else {
        let coords = fixed
            .iter()
            .map(|&i| {
                let wt = &kernel.weights()[i];
                Ok((
                    kernel.names()[i].clone(),
                    Character::new(coordinates_in(&wall_basis, k, &wt.free)?, wt.torsion.clone()),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let git = GitProblem::new(group, coords)?;
        let theta_w = generic_wall_character(&git, theta_w);
        let sf = stacky_fan_at(&git, &theta_w).map_err(|e| e.to_string());
        (Some(git), theta_w, sf)
    };
    let wall_completeness = wall_stack.as_ref().ok().map(completeness_and_properness);
    let wall_rank = wall_stack.as_ref().ok().and_then(|sf| rank_k0(sf).ok());
    Ok(CrossingEvent {
        wall,
        from,
        to,
        lambda,
        l,
        r,
        fixed,
        wall_basis,
        wall_git,
        theta_w,
        wall_stack,
        wall_completeness,
        wall_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_vec;
    use crate::lattice::rational::q;

    fn standard_kernel(n: usize, d: i64) -> GitProblem {
        let mut w = vec![vec![1]; n + 1];
        w.push(vec![-d]);
        GitProblem::from_weights(&w).unwrap()
    }

    fn conic_kernel() -> GitProblem {
        GitProblem::from_weights(&[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![-1, -1]]).unwrap()
    }

    #[test]
    fn standard_path_crosses_origin() {
        let fan = secondary_fan(&standard_kernel(5, 3)).unwrap();
        let src = fan.chamber_of(&[q(1)]).unwrap();
        let plan = plan_path(&fan, src, &[q(-5)], 0).unwrap();
        assert_eq!(plan.crossings.len(), 1);
        verify_plan(&fan, &plan).unwrap();
        let ev = crossing_event(&standard_kernel(5, 3), &fan, plan.crossings[0].wall, src, &int_vec(&[-3]))
            .unwrap();
        assert_eq!(ev.lambda, int_vec(&[-1]));
        assert_eq!(ev.r, BigInt::from(3));
        assert!(ev.fixed.is_empty());
        assert_eq!(ev.object_count(), Some(BigInt::from(3)));
    }

    #[test]
    fn target_in_source() {
        let fan = secondary_fan(&standard_kernel(5, 3)).unwrap();
        let src = fan.chamber_of(&[q(1)]).unwrap();
        let plan = plan_path(&fan, src, &[q(7)], 3).unwrap();
        assert!(plan.crossings.is_empty());
    }

    #[test]
    fn opposite_direction_negates_r() {
        let g = standard_kernel(5, 3);
        let fan = secondary_fan(&g).unwrap();
        let a = fan.chamber_of(&[q(1)]).unwrap();
        let b = fan.chamber_of(&[q(-1)]).unwrap();
        let tk = int_vec(&[-3]);
        let e1 = crossing_event(&g, &fan, 0, a, &tk).unwrap();
        let e2 = crossing_event(&g, &fan, 0, b, &tk).unwrap();
        assert_eq!(e1.r, -e2.r);
    }

    #[test]
    fn conic_path_has_one_crossing_with_projective_line_wall() {
        let g = conic_kernel();
        let fan = secondary_fan(&g).unwrap();
        let src = fan.chamber_of(&[q(1), q(1)]).unwrap();
        for target in [[q(-1), q(-2)], [q(-2), q(-1)]] {
            let plan = plan_path(&fan, src, &target, 0).unwrap();
            assert_eq!(plan.crossings.len(), 1);
            let c = &plan.crossings[0];
            let ev = crossing_event(&g, &fan, c.wall, c.from, &int_vec(&[-1, -1])).unwrap();
            assert_eq!(ev.r, BigInt::one());
            assert_eq!(ev.fixed.len(), 2);
            assert_eq!(ev.wall_rank, Some(BigInt::from(2)));
        }
    }

    #[test]
    fn degenerate_start_is_reperturbed() {
        // from the first quadrant straight through the origin to the third
        let g = GitProblem::from_weights(&[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]]).unwrap();
        let fan = secondary_fan(&g).unwrap();
        let src = fan.chamber_of(&[q(1), q(1)]).unwrap();
        let target = fan.chambers()[src].interior_point.iter().map(|x| -x).collect::<Vec<_>>();
        let plan = plan_path(&fan, src, &target, 0).unwrap();
        assert!(plan.attempt > 0);
        assert_eq!(plan.crossings.len(), 2);
        verify_plan(&fan, &plan).unwrap();
    }
}
