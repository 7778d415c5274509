use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{irrelevant_data, GitProblem, SecondaryFan};
use crate::error::{Error, Result};
use crate::lattice::rational::{dot_int, rank_int, solve, to_rational, Rational};
use crate::lattice::{cokernel, kernel_basis, smith_normal_form, IntMatrix, IntVec};
use crate::polyhedral::RationalCone;

/// A simplicial (when generic) fan with possibly non-primitive ray markings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyFan {
    pub lattice_rank: usize,
    /// Label of each ray, usually the coordinate name it comes from.
    pub ray_names: Vec<String>,
    /// β-images of the rays.
    pub rays: Vec<IntVec>,
    /// Maximal cones as sorted lists of ray indices, in sorted order.
    pub cones: Vec<Vec<usize>>,
    pub multiplicities: Vec<BigInt>,
    /// Order of the finite group acting trivially (gerbe factor), kept out of `rank_k0`.
    pub generic_stabilizer: BigInt,
    /// Whether the weight cone of the defining GIT problem is strongly convex, when known.
    pub weight_cone_pointed: Option<bool>,
}

/// Index of the lattice spanned by `vectors` inside its saturation.
fn lattice_index(dim: usize, vectors: &[IntVec]) -> BigInt {
    if vectors.is_empty() {
        return BigInt::one();
    }
    smith_normal_form(&IntMatrix::from_rows(dim, vectors))
        .diagonal()
        .into_iter()
        .filter(|d| !d.is_zero())
        .fold(BigInt::one(), |acc, d| acc * d)
}

impl StackyFan {
    pub fn new(
        lattice_rank: usize,
        ray_names: Vec<String>,
        rays: Vec<IntVec>,
        cones: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if ray_names.len() != rays.len() {
            return Err(Error::DimensionMismatch("one name per ray required".into()));
        }
        if rays.iter().any(|r| r.len() != lattice_rank) {
            return Err(Error::DimensionMismatch("ray outside the lattice".into()));
        }
        let mut cones: Vec<Vec<usize>> = cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        cones.sort();
        cones.dedup();
        let multiplicities = cones
            .iter()
            .map(|c| {
                let vs: Vec<IntVec> = c.iter().map(|&i| rays[i].clone()).collect();
                lattice_index(lattice_rank, &vs)
            })
            .collect();
        Ok(StackyFan {
            lattice_rank,
            ray_names,
            rays,
            cones,
            multiplicities,
            generic_stabilizer: BigInt::one(),
            weight_cone_pointed: None,
        })
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| {
            let vs: Vec<IntVec> = c.iter().map(|&i| self.rays[i].clone()).collect();
            rank_int(&vs, self.lattice_rank) == c.len()
        })
    }

    pub fn ray_index(&self, name: &str) -> Option<usize> {
        self.ray_names.iter().position(|n| n == name)
    }

    /// Compares with another fan whose rays carry the same names: the cones
    /// must agree as name sets and a unimodular change of lattice basis must
    /// carry one set of β-images onto the other.
    pub fn isomorphic_to(&self, other: &StackyFan) -> std::result::Result<(), String> {
        if self.lattice_rank != other.lattice_rank {
            return Err(format!(
                "lattice ranks differ: {} vs {}",
                self.lattice_rank, other.lattice_rank
            ));
        }
        let mine: BTreeSet<&String> = self.ray_names.iter().collect();
        let theirs: BTreeSet<&String> = other.ray_names.iter().collect();
        if mine != theirs || mine.len() != self.ray_names.len() {
            return Err(format!("ray labels differ: {mine:?} vs {theirs:?}"));
        }
        let perm: Vec<usize> = self
            .ray_names
            .iter()
            .map(|n| other.ray_index(n).expect("labels agree"))
            .collect();
        let my_cones: BTreeSet<BTreeSet<&String>> = self
            .cones
            .iter()
            .map(|c| c.iter().map(|&i| &self.ray_names[i]).collect())
            .collect();
        let their_cones: BTreeSet<BTreeSet<&String>> = other
            .cones
            .iter()
            .map(|c| c.iter().map(|&i| &other.ray_names[i]).collect())
            .collect();
        if my_cones != their_cones {
            return Err("maximal cones differ".into());
        }
        let d = self.lattice_rank;
        if d == 0 {
            return Ok(());
        }
        if rank_int(&self.rays, d) != d {
            return Err("rays do not span the lattice".into());
        }
        // columns of B (one per lattice coordinate), and target columns from `other`
        let b_cols: Vec<Vec<Rational>> = (0..d)
            .map(|j| self.rays.iter().map(|r| Rational::from_integer(r[j].clone())).collect())
            .collect();
        let mut g = Vec::new();
        for j in 0..d {
            let target: Vec<Rational> = perm
                .iter()
                .map(|&p| Rational::from_integer(other.rays[p][j].clone()))
                .collect();
            let x = solve(&b_cols, &target).ok_or("no linear map between the ray sets")?;
            if x.iter().any(|v| !v.is_integer()) {
                return Err("change of basis is not integral".into());
            }
            g.push(x.iter().map(|v| v.to_integer()).collect::<Vec<_>>());
        }
        let det = IntMatrix::from_cols(d, &g).determinant();
        if det.abs() != BigInt::one() {
            return Err(format!("change of basis has determinant {det}"));
        }
        Ok(())
    }
}

/// Gale-dual β-images: rows of a basis of `M = ker(Z^n → Ĝ)`.
pub(crate) fn gale_dual_rays(git: &GitProblem) -> (usize, Vec<IntVec>) {
    let n = git.n();
    let k = git.k();
    let factors = git.group().invariant_factors();
    let t = factors.len();
    let mut rows: Vec<IntVec> = Vec::new();
    for i in 0..k {
        let mut r: IntVec = git.weights().iter().map(|w| w.free[i].clone()).collect();
        r.extend(std::iter::repeat_n(BigInt::zero(), t));
        rows.push(r);
    }
    for (j, a) in factors.iter().enumerate() {
        let mut r: IntVec = git.weights().iter().map(|w| w.torsion[j].clone()).collect();
        let mut tail = vec![BigInt::zero(); t];
        tail[j] = a.clone();
        r.extend(tail);
        rows.push(r);
    }
    let kernel = if rows.is_empty() {
        IntMatrix::identity(n + t)
    } else {
        kernel_basis(&IntMatrix::from_rows(n + t, &rows))
    };
    let m_rank = kernel.cols();
    let rays = (0..n)
        .map(|i| (0..m_rank).map(|j| kernel[(i, j)].clone()).collect())
        .collect();
    (m_rank, rays)
}

/// Order of the subgroup of `G` acting trivially on all coordinates.
fn generic_stabilizer(git: &GitProblem) -> BigInt {
    let n = git.n();
    let factors = git.group().invariant_factors();
    let t = factors.len();
    let mut rows: Vec<IntVec> = Vec::new();
    for i in 0..git.k() {
        let mut r: IntVec = git.weights().iter().map(|w| w.free[i].clone()).collect();
        r.extend(std::iter::repeat_n(BigInt::zero(), t));
        rows.push(r);
    }
    for (j, a) in factors.iter().enumerate() {
        let mut r: IntVec = git.weights().iter().map(|w| w.torsion[j].clone()).collect();
        let mut tail = vec![BigInt::zero(); t];
        tail[j] = a.clone();
        r.extend(tail);
        rows.push(r);
    }
    if rows.is_empty() {
        return BigInt::one();
    }
    cokernel(&IntMatrix::from_rows(n + t, &rows)).torsion_order()
}

/// Stacky fan of the quotient at a stability character θ.
pub fn stacky_fan_at(git: &GitProblem, theta: &[Rational]) -> Result<StackyFan> {
    let irr = irrelevant_data(git, theta)?;
    let n = git.n();
    let fixed = irr.always_nonzero(n);
    let ray_coords: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
    let (m_rank, beta) = gale_dual_rays(git);
    let index_of: BTreeMap<usize, usize> =
        ray_coords.iter().enumerate().map(|(r, &c)| (c, r)).collect();
    let cones: Vec<Vec<usize>> = irr
        .supports
        .iter()
        .map(|s| {
            (0..n)
                .filter(|i| !s.contains(i))
                .map(|i| index_of[&i])
                .collect()
        })
        .collect();
    let mut sf = StackyFan::new(
        m_rank,
        ray_coords.iter().map(|&i| git.names()[i].clone()).collect(),
        ray_coords.iter().map(|&i| beta[i].clone()).collect(),
        cones,
    )?;
    sf.generic_stabilizer = generic_stabilizer(git);
    sf.weight_cone_pointed = Some(git.weight_cone()?.is_strongly_convex());
    Ok(sf)
}

/// Stacky fan of the phase attached to a chamber of the secondary fan.
pub fn quotient_stacky_fan(
    git: &GitProblem,
    fan: &SecondaryFan,
    chamber: &RationalCone,
) -> Result<StackyFan> {
    let id = fan.find_chamber(chamber)?;
    stacky_fan_at(git, &fan.chambers()[id].interior_point)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessReport {
    pub complete: bool,
    pub simplicial: bool,
    /// Strong convexity of the weight cone, the projective-GIT certificate of completeness.
    pub weight_cone_pointed: Option<bool>,
    pub reason: Option<String>,
}

pub fn completeness_and_properness(sf: &StackyFan) -> CompletenessReport {
    let simplicial = sf.is_simplicial();
    let d = sf.lattice_rank;
    let mut reason = None;
    if d == 0 {
        let complete = !sf.cones.is_empty();
        return CompletenessReport {
            complete,
            simplicial,
            weight_cone_pointed: sf.weight_cone_pointed,
            reason: (!complete).then(|| "no cones".to_string()),
        };
    }
    let mut facet_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for c in &sf.cones {
        let vs: Vec<IntVec> = c.iter().map(|&i| sf.rays[i].clone()).collect();
        let cone = match RationalCone::from_generators(d, &vs) {
            Ok(c) => c,
            Err(e) => {
                reason = Some(e.to_string());
                break;
            }
        };
        if !cone.is_full_dimensional() {
            reason = Some(format!("maximal cone {c:?} is not full-dimensional"));
            break;
        }
        for f in cone.facets() {
            let face: Vec<usize> = c
                .iter()
                .copied()
                .filter(|&i| dot_int(f, &sf.rays[i]).is_zero())
                .collect();
            *facet_count.entry(face).or_default() += 1;
        }
    }
    if reason.is_none() {
        if let Some((face, count)) = facet_count.iter().find(|(_, &c)| c != 2) {
            reason = Some(format!("codimension-one cone {face:?} lies in {count} maximal cones"));
        }
    }
    CompletenessReport {
        complete: reason.is_none(),
        simplicial,
        weight_cone_pointed: sf.weight_cone_pointed,
        reason,
    }
}

/// Rank of `K_0`: the sum of the maximal-cone multiplicities, times the
/// order of the generic stabilizer (a gerbe splits by characters of its band).
pub fn rank_k0(sf: &StackyFan) -> Result<BigInt> {
    let report = completeness_and_properness(sf);
    if !report.complete || !report.simplicial {
        return Err(Error::RankFormulaUnavailable);
    }
    Ok(sf.multiplicities.iter().sum::<BigInt>() * &sf.generic_stabilizer)
}

/// Whether the torus-invariant divisor `Σ a_ρ D_ρ` is Cartier on every maximal cone.
pub fn is_cartier(coefficients: &[BigInt], sf: &StackyFan) -> Result<bool> {
    if coefficients.len() != sf.rays.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for {} rays",
            coefficients.len(),
            sf.rays.len()
        )));
    }
    for c in &sf.cones {
        if c.is_empty() || sf.lattice_rank == 0 {
            continue;
        }
        let rows: Vec<IntVec> = c.iter().map(|&i| sf.rays[i].clone()).collect();
        let b: IntVec = c.iter().map(|&i| -&coefficients[i]).collect();
        let snf = smith_normal_form(&IntMatrix::from_rows(sf.lattice_rank, &rows));
        let ub = snf.u.mul_vec(&b);
        let diag = snf.diagonal();
        for (i, v) in ub.iter().enumerate() {
            let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            let ok = if d.is_zero() { v.is_zero() } else { v.is_multiple_of(&d) };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rational coordinates of the ray β-images, for intersection computations.
pub(crate) fn rays_q(sf: &StackyFan) -> Vec<Vec<Rational>> {
    sf.rays.iter().map(|r| to_rational(r)).collect()
}
