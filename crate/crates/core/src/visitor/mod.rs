//! Projective-bundle GLSMs hosting complete intersections as Fano visitors.
//!
//! Sign convention: `w_weights` are the G-weights of the coordinates of `W`.
//! The sections cut out by the potential have the dual classes `D_i = -w_i`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::git::{
    irrelevant_data, nef_ample, rank_k0, secondary_fan, stacky_fan_at, Character, GitProblem,
    IrrelevantData, NefAmple, StackyFan,
};
use crate::glsm::{canonical_character, CiProblem, Glsm, Potential};
use crate::lattice::rational::{q, Rational};
use crate::lattice::{FinAbGroup, IntVec};
use crate::polyhedral::minimal_supports;
use crate::wallcross::in_semigroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisitorInput {
    pub base: GitProblem,
    /// Generic stability character of the base quotient X.
    pub theta: Vec<Rational>,
    pub w_weights: Vec<Character>,
}

impl VisitorInput {
    pub fn new(base: GitProblem, theta: Vec<Rational>, w_weights: Vec<Character>) -> Result<Self> {
        if theta.len() != base.k() {
            return Err(Error::DimensionMismatch("θ does not match the base group".into()));
        }
        let group = base.group();
        let w_weights = w_weights
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                if w.free.len() != group.free_rank() {
                    return Err(Error::DimensionMismatch(format!("W-weight {} has the wrong length", i + 1)));
                }
                let t = if w.torsion.is_empty() {
                    vec![BigInt::zero(); group.torsion_rank()]
                } else {
                    w.torsion
                };
                if t.len() != group.torsion_rank() {
                    return Err(Error::DimensionMismatch(format!("W-weight {} has the wrong torsion", i + 1)));
                }
                Ok(Character::new(w.free, group.reduce_torsion(&t)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VisitorInput {
            base,
            theta,
            w_weights,
        })
    }

    pub fn dim_w(&self) -> usize {
        self.w_weights.len()
    }

    /// Section classes `D_i = -w_i`.
    pub fn dual_weights(&self) -> Vec<Character> {
        self.w_weights.iter().map(|w| w.neg(self.base.group())).collect()
    }

    pub fn base_nef_ample(&self) -> Result<NefAmple> {
        let fan = secondary_fan(&self.base)?;
        let c = fan
            .chamber_of(&self.theta)
            .ok_or_else(|| Error::NotAChamber("θ is not in the interior of a base chamber".into()))?;
        nef_ample(&fan, c)
    }

    /// Whether `det V` is ample on X.
    pub fn is_fano(&self) -> bool {
        self.base_nef_ample()
            .map(|na| na.is_ample(&self.base.det_character().free_q()))
            .unwrap_or(false)
    }
}

/// Γ = G × G_m × G_m on `V × W × C` with χ the last projection.
#[derive(Clone, Debug)]
pub struct VisitorGlsm {
    pub input: VisitorInput,
    pub glsm: Glsm,
    /// Indices of the `V`, `W` and `C` coordinates.
    pub v_coords: Vec<usize>,
    pub w_coords: Vec<usize>,
    pub p_coord: usize,
    /// The middle `G_m`, oriented from the + phase to the − phase (ker χ coordinates).
    pub lambda: IntVec,
    /// Stability characters of the two phases on ker χ.
    pub theta_plus: Vec<Rational>,
    pub theta_minus: Vec<Rational>,
    pub plus: IrrelevantData,
    pub minus: IrrelevantData,
}

fn fresh_name(taken: &[String], stem: &str) -> String {
    let mut name = stem.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

fn lifted(w: &Character, middle: i64) -> Character {
    let mut free = w.free.clone();
    free.push(BigInt::from(middle));
    Character::new(free, w.torsion.clone())
}

/// Smallest `2^-j` making `(θ, ±ε)` generic in the ker χ problem.
fn phase_character(kernel: &GitProblem, theta: &[Rational], sign: i64) -> Result<Vec<Rational>> {
    let fan = secondary_fan(kernel)?;
    let mut eps = q(1);
    for _ in 0..64 {
        let mut x = theta.to_vec();
        x.push(&eps * Rational::from_integer(BigInt::from(sign)));
        if fan.chamber_of(&x).is_some() {
            return Ok(x);
        }
        eps /= q(2);
    }
    Err(Error::NotAChamber("no generic phase character near the base character".into()))
}

pub fn build_visitor_glsm(input: &VisitorInput) -> Result<VisitorGlsm> {
    let base = &input.base;
    let group = base.group();
    let gens: Vec<Character> = base.weights().to_vec();
    for (i, d) in input.dual_weights().iter().enumerate() {
        if !in_semigroup(d, &gens, group) {
            return Err(Error::InconsistentWeights(format!(
                "w{}: no section of the dual weight makes the potential invariant",
                i + 1
            )));
        }
    }
    let mut names: Vec<String> = base.names().to_vec();
    let mut coords: Vec<(String, Character)> = base
        .names()
        .iter()
        .zip(base.weights())
        .map(|(n, w)| (n.clone(), lifted(w, 0)))
        .collect();
    let mut w_coords = Vec::new();
    for (i, w) in input.w_weights.iter().enumerate() {
        let name = fresh_name(&names, &format!("y{}", i + 1));
        names.push(name.clone());
        w_coords.push(coords.len());
        coords.push((name, lifted(w, 1)));
    }
    let p_name = fresh_name(&names, "p");
    let p_coord = coords.len();
    coords.push((p_name, lifted(&Character::zero(group), -1)));

    let kernel_group = FinAbGroup::new(group.free_rank() + 1, group.invariant_factors().to_vec())?;
    let kernel = GitProblem::new(kernel_group, coords)?;
    let mut chi_weights = vec![BigInt::zero(); kernel.n()];
    chi_weights[p_coord] = BigInt::one();

    let theta_plus = phase_character(&kernel, &input.theta, 1)?;
    let theta_minus = phase_character(&kernel, &input.theta, -1)?;
    let potential = if w_coords.is_empty() {
        Potential::Zero
    } else {
        Potential::GenericPairing
    };
    let glsm = Glsm::split(&kernel, &chi_weights, theta_plus.clone(), potential)?;
    let plus = irrelevant_data(&kernel, &theta_plus)?;
    let minus = irrelevant_data(&kernel, &theta_minus)?;
    let mut lambda = vec![BigInt::zero(); group.free_rank() + 1];
    lambda[group.free_rank()] = BigInt::from(-1);
    Ok(VisitorGlsm {
        input: input.clone(),
        glsm,
        v_coords: (0..base.n()).collect(),
        w_coords,
        p_coord,
        lambda,
        theta_plus,
        theta_minus,
        plus,
        minus,
    })
}

impl VisitorGlsm {
    pub fn kernel(&self) -> Result<GitProblem> {
        Ok(self.glsm.kernel_restriction()?.kernel)
    }

    /// Coordinates fixed by λ.
    pub fn fixed_coordinates(&self) -> Result<Vec<usize>> {
        let kernel = self.kernel()?;
        Ok((0..kernel.n())
            .filter(|&i| {
                kernel.weights()[i]
                    .free
                    .iter()
                    .zip(&self.lambda)
                    .map(|(a, b)| a * b)
                    .sum::<BigInt>()
                    .is_zero()
            })
            .collect())
    }

    /// `⟨θ_K, λ⟩`.
    pub fn r(&self) -> Result<BigInt> {
        let theta_k = canonical_character(&self.glsm)?.theta_k;
        Ok(theta_k.free.iter().zip(&self.lambda).map(|(a, b)| a * b).sum())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleMethod {
    Sufficient,
    Exact,
}

impl TripleMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            TripleMethod::Sufficient => "sufficient",
            TripleMethod::Exact => "exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleVerdict {
    pub verdict: bool,
    pub method: TripleMethod,
    /// `Some(true)` when the ampleness criterion fires; `None` otherwise.
    pub sufficient: Option<bool>,
    pub exact: bool,
    /// A minimal semistable support using a W-coordinate, when one exists (indices into V ++ W).
    pub witness: Option<Vec<usize>>,
}

/// Positivity of `(V, W, θ)`: the cheap ampleness criterion, then exact support enumeration.
pub fn positive_triple(base: &GitProblem, w_weights: &[Character], theta: &[Rational]) -> Result<TripleVerdict> {
    let input = VisitorInput::new(base.clone(), theta.to_vec(), w_weights.to_vec())?;
    let sufficient = match input.base_nef_ample() {
        Ok(na) => {
            let fires = input.dual_weights().iter().all(|d| na.is_ample(&d.free_q()))
                && na.is_ample(theta);
            fires.then_some(true)
        }
        Err(_) => None,
    };
    let mut vectors = base.free_weights_q();
    vectors.extend(input.w_weights.iter().map(|w| w.free_q()));
    let n = base.n();
    let witness = minimal_supports(theta, &vectors)
        .into_iter()
        .find(|s| s.iter().any(|&i| i >= n));
    let exact = witness.is_none();
    Ok(TripleVerdict {
        verdict: sufficient.unwrap_or(exact),
        method: if sufficient.is_some() {
            TripleMethod::Sufficient
        } else {
            TripleMethod::Exact
        },
        sufficient,
        exact,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VisitorBlock {
    /// `D^b(X) ⊗ O_rel(twist)`, expanded into exceptional objects when the rank is known.
    BaseCopy { twist: usize, exceptional: Option<BigInt> },
    Residual { label: String, euler_characteristic: Option<Rational> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanoHostReport {
    /// `det W^∨ + det V` is nef on X.
    pub det_nef: bool,
    pub dim_w_at_least_two: bool,
    pub o_rel_ample: bool,
    /// Base Fano with ample dual weights.
    pub fast_path: bool,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct HostReport {
    pub r: BigInt,
    pub base_rank: Option<BigInt>,
    pub wall_stack: StackyFan,
    /// Copies of the base first, the visitor last.
    pub blocks: Vec<VisitorBlock>,
    pub total_exceptional: BigInt,
    pub lower_bound: bool,
    pub fano_host: FanoHostReport,
    pub positive_triple: TripleVerdict,
}

pub fn fano_host_check(vg: &VisitorGlsm) -> Result<FanoHostReport> {
    let input = &vg.input;
    let group = input.base.group();
    let na = input.base_nef_ample()?;
    let duals = input.dual_weights();
    let det = duals
        .iter()
        .fold(input.base.det_character(), |acc, d| acc.add(d, group));
    let fast_path = input.is_fano() && duals.iter().all(|d| na.is_ample(&d.free_q()));
    let det_nef = fast_path || na.is_nef(&det.free_q());
    let dim_w_at_least_two = input.dim_w() >= 2;

    // O_rel(1) is the middle-G_m character on the projective bundle V × (W \ 0) / (G × G_m)
    let coords = input
        .base
        .names()
        .iter()
        .zip(input.base.weights())
        .map(|(n, w)| (n.clone(), lifted(w, 0)))
        .chain(
            input
                .w_weights
                .iter()
                .enumerate()
                .map(|(i, w)| (format!("y{}", i + 1), lifted(w, 1))),
        )
        .collect::<Vec<_>>();
    let o_rel_ample = if input.w_weights.is_empty() {
        false
    } else {
        let bundle = GitProblem::new(
            FinAbGroup::new(group.free_rank() + 1, group.invariant_factors().to_vec())?,
            coords,
        )?;
        let fan = secondary_fan(&bundle)?;
        let mut o_rel = vec![Rational::zero(); group.free_rank() + 1];
        o_rel[group.free_rank()] = q(1);
        match phase_character(&bundle, &input.theta, 1).ok().and_then(|x| fan.chamber_of(&x)) {
            Some(c) => fan.chambers()[c].cone.in_relative_interior(&o_rel),
            None => false,
        }
    };
    Ok(FanoHostReport {
        det_nef,
        dim_w_at_least_two,
        o_rel_ample,
        fast_path,
        passed: det_nef && dim_w_at_least_two && o_rel_ample,
    })
}

pub fn visitor_sod(vg: &VisitorGlsm) -> Result<HostReport> {
    let input = &vg.input;
    let r = vg.r()?;
    let expected = BigInt::from(input.dim_w()) - 1;
    if input.dim_w() > 0 && r != expected {
        return Err(Error::Internal(format!("λ pairs θ_K to {r}, expected {expected}")));
    }
    let wall_stack = stacky_fan_at(&input.base, &input.theta)?;
    let base_rank = rank_k0(&wall_stack).ok();
    let copies = input.dim_w().saturating_sub(1);
    let mut blocks: Vec<VisitorBlock> = (0..copies)
        .map(|twist| VisitorBlock::BaseCopy {
            twist,
            exceptional: base_rank.clone(),
        })
        .collect();
    let euler = CiProblem::from_classes(input.base.clone(), input.theta.clone(), &input.dual_weights())
        .and_then(|ci| ci.euler_characteristic())
        .ok();
    blocks.push(VisitorBlock::Residual {
        label: "D^b(Z)".into(),
        euler_characteristic: euler,
    });
    let lower_bound = copies > 0 && base_rank.is_none();
    let total_exceptional = base_rank.clone().map_or(BigInt::zero(), |k| k * BigInt::from(copies));
    Ok(HostReport {
        r,
        base_rank,
        wall_stack,
        blocks,
        total_exceptional,
        lower_bound,
        fano_host: fano_host_check(vg)?,
        positive_triple: positive_triple(&input.base, &input.w_weights, &input.theta)?,
    })
}
