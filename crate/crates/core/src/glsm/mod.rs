//! GLSM data, canonical characters, Kuznetsov chambers and complete intersections.

mod ci;

pub use ci::{
    build_ci_glsm, cy_classification, projection_check, q_ratio, total_space_fan, CiProblem,
    CyClassification, CyLabel, ProjectionReport,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::git::{irrelevant_data, secondary_fan, Character, GitProblem, SecondaryFan};
use crate::lattice::rational::{dot_mixed, Rational};
use crate::lattice::{smith_normal_form, FinAbGroup, IntMatrix, IntVec, QuotientMap};

/// The superpotential, kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Potential {
    /// `Σ u_i f_i`: one term per χ-weight-1 coordinate `u_i`, with `f_i` a
    /// generic section of the class `-w(u_i)` in the remaining coordinates.
    GenericPairing,
    Zero,
    /// Explicit monomials, one exponent vector per monomial.
    Monomials(Vec<Vec<u32>>),
}

#[derive(Clone, Debug)]
pub struct Glsm {
    /// Γ acting on the coordinates.
    pub gamma: GitProblem,
    /// The distinguished character of Γ.
    pub chi: Character,
    /// Stability character of `ker χ` (free part, kernel coordinates).
    pub theta: Vec<Rational>,
    pub potential: Potential,
}

#[derive(Clone, Debug)]
enum RestrictionMap {
    /// χ is a coordinate projection of a torsion-free part: forget that coordinate.
    Drop(usize),
    Quotient(QuotientMap),
}

/// The `ker χ` GIT problem with a splitting of χ.
#[derive(Clone, Debug)]
pub struct KernelRestriction {
    pub kernel: GitProblem,
    /// Cocharacter `u` of Γ with `⟨χ, u⟩ = 1`.
    pub splitting: IntVec,
    /// `⟨w_i, u⟩` per coordinate.
    pub chi_weights: Vec<BigInt>,
    map: RestrictionMap,
}

impl KernelRestriction {
    /// Restriction of a Γ-character to `ker χ`.
    pub fn restrict(&self, c: &Character) -> Character {
        match &self.map {
            RestrictionMap::Drop(j) => {
                let mut free = c.free.clone();
                free.remove(*j);
                Character::new(free, c.torsion.clone())
            }
            RestrictionMap::Quotient(q) => {
                let mut lift = c.free.clone();
                lift.extend(c.torsion.iter().cloned());
                let (free, torsion) = q.apply(&lift);
                Character::new(free, torsion)
            }
        }
    }

    /// Coordinates whose χ-weight is 1.
    pub fn bundle_coordinates(&self) -> Vec<usize> {
        (0..self.chi_weights.len())
            .filter(|&i| self.chi_weights[i].is_one())
            .collect()
    }

    pub fn base_coordinates(&self) -> Vec<usize> {
        (0..self.chi_weights.len())
            .filter(|&i| self.chi_weights[i].is_zero())
            .collect()
    }
}

fn kernel_restriction_of(gamma: &GitProblem, chi: &Character) -> Result<KernelRestriction> {
    let group = gamma.group();
    let k = group.free_rank();
    if chi.free.len() != k || chi.torsion.len() != group.torsion_rank() {
        return Err(Error::DimensionMismatch("χ does not match the group of Γ".into()));
    }
    let g = chi.free.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_one() {
        return Err(Error::ChiNotSurjective);
    }
    let coordinate = (chi.torsion.iter().all(Zero::is_zero)
        && chi.free.iter().filter(|x| !x.is_zero()).count() == 1)
        .then(|| chi.free.iter().position(|x| !x.is_zero()).expect("one nonzero entry"));

    let (map, kernel_group, splitting) = if let Some(j) = coordinate {
        let mut u = vec![BigInt::zero(); k];
        u[j] = chi.free[j].clone();
        let kg = FinAbGroup::new(k - 1, group.invariant_factors().to_vec())?;
        (RestrictionMap::Drop(j), kg, u)
    } else {
        let t = group.torsion_rank();
        let mut cols: Vec<IntVec> = Vec::new();
        let mut lift = chi.free.clone();
        lift.extend(chi.torsion.iter().cloned());
        cols.push(lift);
        for (j, a) in group.invariant_factors().iter().enumerate() {
            let mut e = vec![BigInt::zero(); k + t];
            e[k + j] = a.clone();
            cols.push(e);
        }
        let q = QuotientMap::cokernel_of(&IntMatrix::from_cols(k + t, &cols));
        let kg = q.target.clone();
        // u = ±(first column of V) from the Smith form of χ as a 1×k matrix
        let snf = smith_normal_form(&IntMatrix::from_rows(k, std::slice::from_ref(&chi.free)));
        let sign = snf.u[(0, 0)].clone();
        let u: IntVec = snf.v.col(0).iter().map(|x| x * &sign).collect();
        (RestrictionMap::Quotient(q), kg, u)
    };
    let chi_weights: Vec<BigInt> = gamma
        .weights()
        .iter()
        .map(|w| w.free.iter().zip(&splitting).map(|(a, b)| a * b).sum())
        .collect();
    let mut kr = KernelRestriction {
        kernel: gamma.clone(),
        splitting,
        chi_weights,
        map,
    };
    let coords = gamma
        .names()
        .iter()
        .zip(gamma.weights())
        .map(|(n, w)| (n.clone(), kr.restrict(w)))
        .collect();
    kr.kernel = GitProblem::new(kernel_group, coords)?;
    Ok(kr)
}

impl Glsm {
    pub fn new(gamma: GitProblem, chi: Character, theta: Vec<Rational>, potential: Potential) -> Result<Self> {
        let kr = kernel_restriction_of(&gamma, &chi)?;
        if theta.len() != kr.kernel.k() {
            return Err(Error::DimensionMismatch(format!(
                "θ has length {}, ker χ has free rank {}",
                theta.len(),
                kr.kernel.k()
            )));
        }
        if let Potential::Monomials(ms) = &potential {
            for m in ms {
                if m.len() != gamma.n() {
                    return Err(Error::DimensionMismatch("monomial exponent vector length".into()));
                }
                let mut w = Character::zero(gamma.group());
                for (e, wt) in m.iter().zip(gamma.weights()) {
                    for _ in 0..*e {
                        w = w.add(wt, gamma.group());
                    }
                }
                if w != chi {
                    return Err(Error::InvalidInput(format!(
                        "potential monomial {m:?} is not χ-semi-invariant"
                    )));
                }
            }
        }
        Ok(Glsm {
            gamma,
            chi,
            theta,
            potential,
        })
    }

    /// Γ = ker χ × G_m from kernel weights and χ-weights; χ is the last projection.
    pub fn split(
        kernel: &GitProblem,
        chi_weights: &[BigInt],
        theta: Vec<Rational>,
        potential: Potential,
    ) -> Result<Self> {
        if chi_weights.len() != kernel.n() {
            return Err(Error::DimensionMismatch("one χ-weight per coordinate".into()));
        }
        let k = kernel.k();
        let group = FinAbGroup::new(k + 1, kernel.group().invariant_factors().to_vec())?;
        let coords = kernel
            .names()
            .iter()
            .zip(kernel.weights())
            .zip(chi_weights)
            .map(|((n, w), c)| {
                let mut free = w.free.clone();
                free.push(c.clone());
                (n.clone(), Character::new(free, w.torsion.clone()))
            })
            .collect();
        let mut chi = vec![BigInt::zero(); k + 1];
        chi[k] = BigInt::one();
        let torsion = vec![BigInt::zero(); group.torsion_rank()];
        Glsm::new(
            GitProblem::new(group, coords)?,
            Character::new(chi, torsion),
            theta,
            potential,
        )
    }

    pub fn kernel_restriction(&self) -> Result<KernelRestriction> {
        kernel_restriction_of(&self.gamma, &self.chi)
    }
}

pub fn kernel_restriction(glsm: &Glsm) -> Result<KernelRestriction> {
    glsm.kernel_restriction()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalCharacters {
    pub theta_k: Character,
    pub theta_anti_k: Character,
}

/// `θ_K = -Σ w_i` on `ker χ`, and its inverse.
pub fn canonical_character(glsm: &Glsm) -> Result<CanonicalCharacters> {
    let kr = glsm.kernel_restriction()?;
    let det = kr.kernel.det_character();
    Ok(CanonicalCharacters {
        theta_k: det.neg(kr.kernel.group()),
        theta_anti_k: det,
    })
}

/// Chambers whose closure contains a canonical character, with perturbed interior characters.
#[derive(Clone, Debug, Default)]
pub struct Placement {
    pub chambers: Vec<usize>,
    /// `θ_{±K+ε}` per entry of `chambers`.
    pub perturbed: Vec<Vec<Rational>>,
}

impl Placement {
    pub fn is_defined(&self) -> bool {
        !self.chambers.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct KuznetsovData {
    pub kernel: KernelRestriction,
    pub fan: SecondaryFan,
    pub canonical: CanonicalCharacters,
    pub k: Placement,
    pub anti_k: Placement,
    /// Chamber whose interior contains θ, if θ is generic.
    pub geometric_chamber: Option<usize>,
}

/// `θ + p/N` for the smallest power of two `N` that keeps every chamber-facet
/// sign of `θ` and lands in the relative interior of the chamber.
pub fn perturb_into(fan: &SecondaryFan, chamber: usize, theta: &[Rational]) -> Vec<Rational> {
    let c = &fan.chambers()[chamber];
    let hyperplanes: Vec<&IntVec> = fan
        .chambers()
        .iter()
        .flat_map(|ch| ch.cone.facets())
        .collect();
    let mut n = Rational::one();
    loop {
        let cand: Vec<Rational> = theta
            .iter()
            .zip(&c.interior_point)
            .map(|(t, p)| t + p / &n)
            .collect();
        let keeps = hyperplanes.iter().all(|h| {
            let before = dot_mixed(h, theta);
            before.is_zero() || before.signum() == dot_mixed(h, &cand).signum()
        });
        if keeps && c.cone.in_relative_interior(&cand) {
            return cand;
        }
        n *= Rational::from_integer(BigInt::from(2));
    }
}

fn placement(fan: &SecondaryFan, theta: &[Rational]) -> Placement {
    let chambers = fan.chambers_containing(theta);
    let perturbed = chambers.iter().map(|&c| perturb_into(fan, c, theta)).collect();
    Placement {
        chambers,
        perturbed,
    }
}

pub fn kuznetsov_chambers(glsm: &Glsm) -> Result<KuznetsovData> {
    let kernel = glsm.kernel_restriction()?;
    let fan = secondary_fan(&kernel.kernel)?;
    let canonical = canonical_character(glsm)?;
    let k = placement(&fan, &canonical.theta_k.free_q());
    let anti_k = placement(&fan, &canonical.theta_anti_k.free_q());
    let geometric_chamber = fan.chamber_of(&glsm.theta);
    Ok(KuznetsovData {
        kernel,
        fan,
        canonical,
        k,
        anti_k,
        geometric_chamber,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricReport {
    /// χ-weight-1 coordinates never needed for semistability: the quotient is a bundle.
    pub bundle_fibration: bool,
    /// Every potential monomial is linear in exactly one χ-weight-1 coordinate.
    pub pairing_potential: bool,
    /// The split `G_m` acts with weight 1 on bundle coordinates and 0 elsewhere.
    pub dilation_splitting: bool,
    pub failures: Vec<String>,
}

impl GeometricReport {
    pub fn is_geometric(&self) -> bool {
        self.bundle_fibration && self.pairing_potential && self.dilation_splitting
    }
}

pub fn is_geometric(glsm: &Glsm) -> Result<GeometricReport> {
    let kr = glsm.kernel_restriction()?;
    let bundle = kr.bundle_coordinates();
    let mut failures = Vec::new();

    let dilation_splitting = kr.chi_weights.iter().all(|c| c.is_zero() || c.is_one());
    if !dilation_splitting {
        failures.push("split G_m has weights other than 0 and 1".to_string());
    }

    let bundle_fibration = match irrelevant_data(&kr.kernel, &glsm.theta) {
        Ok(irr) => {
            let ok = irr.supports.iter().all(|s| s.iter().all(|i| !bundle.contains(i)));
            if !ok {
                failures.push("a bundle coordinate appears in the irrelevant data".to_string());
            }
            ok
        }
        Err(e) => {
            failures.push(e.to_string());
            false
        }
    };

    let pairing_potential = match &glsm.potential {
        Potential::GenericPairing => true,
        Potential::Zero => bundle.is_empty(),
        Potential::Monomials(ms) => {
            let linear = ms.iter().all(|m| {
                let degs: Vec<u32> = bundle.iter().map(|&i| m[i]).collect();
                degs.iter().sum::<u32>() == 1
            });
            let covered = bundle.iter().all(|&i| ms.iter().any(|m| m[i] == 1));
            linear && covered
        }
    };
    if !pairing_potential {
        failures.push("potential does not pair the bundle with a regular section".to_string());
    }
    Ok(GeometricReport {
        bundle_fibration,
        pairing_potential,
        dilation_splitting,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational::q;

    pub(crate) fn standard(n: usize, d: i64, theta: i64) -> Glsm {
        let mut w = vec![vec![1]; n + 1];
        w.push(vec![-d]);
        let kernel = GitProblem::from_weights(&w).unwrap();
        let mut chi = vec![BigInt::zero(); n + 1];
        chi.push(BigInt::one());
        Glsm::split(&kernel, &chi, vec![q(theta)], Potential::GenericPairing).unwrap()
    }

    #[test]
    fn restriction_of_standard_example() {
        let g = standard(5, 3, 1);
        let kr = g.kernel_restriction().unwrap();
        assert_eq!(kr.kernel.free_weights(), GitProblem::from_weights(&[
            vec![1], vec![1], vec![1], vec![1], vec![1], vec![1], vec![-3]
        ]).unwrap().free_weights());
        assert_eq!(kr.bundle_coordinates(), vec![6]);
    }

    #[test]
    fn restriction_of_identity_character() {
        let gamma = GitProblem::from_weights(&[vec![1], vec![1]]).unwrap();
        let g = Glsm::new(gamma, Character::from_i64(&[1]), vec![], Potential::Zero).unwrap();
        let kr = g.kernel_restriction().unwrap();
        assert_eq!(kr.kernel.k(), 0);
    }

    #[test]
    fn non_primitive_chi_rejected() {
        let gamma = GitProblem::from_weights(&[vec![1, 0], vec![0, 1]]).unwrap();
        let e = Glsm::new(gamma, Character::from_i64(&[2, 0]), vec![q(1)], Potential::Zero);
        assert_eq!(e.unwrap_err(), Error::ChiNotSurjective);
    }

    #[test]
    fn general_chi_uses_quotient() {
        // χ = (1,1): ker χ = {(t, t^-1)}
        let gamma = GitProblem::from_weights(&[vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let g = Glsm::new(gamma, Character::from_i64(&[1, 1]), vec![q(1)], Potential::Zero).unwrap();
        let kr = g.kernel_restriction().unwrap();
        let w = kr.kernel.free_weights();
        assert_eq!(w[2], vec![BigInt::zero()]);
        assert_eq!(w[0].iter().cloned().sum::<BigInt>(), -w[1][0].clone());
        assert!(kr.chi_weights.iter().any(|c| c.is_one()));
    }

    #[test]
    fn canonical_characters() {
        let c = canonical_character(&standard(5, 3, 1)).unwrap();
        assert_eq!(c.theta_k, Character::from_i64(&[-3]));
        let cy = Glsm::split(
            &GitProblem::from_weights(&[vec![1], vec![1], vec![-2]]).unwrap(),
            &[BigInt::zero(), BigInt::zero(), BigInt::one()],
            vec![q(1)],
            Potential::GenericPairing,
        )
        .unwrap();
        assert_eq!(canonical_character(&cy).unwrap().theta_k, Character::from_i64(&[0]));
    }

    #[test]
    fn kuznetsov_chambers_of_the_family() {
        let cubic = kuznetsov_chambers(&standard(5, 3, 1)).unwrap();
        assert_eq!(cubic.k.chambers.len(), 1);
        let neg = cubic.fan.chamber_of(&[q(-1)]).unwrap();
        assert_eq!(cubic.k.chambers, vec![neg]);
        assert_eq!(cubic.anti_k.chambers, vec![cubic.geometric_chamber.unwrap()]);
        assert!(cubic.k.perturbed[0][0] < q(-3));
        let quintic = kuznetsov_chambers(&standard(4, 5, 1)).unwrap();
        assert_eq!(quintic.k.chambers.len(), 2);
    }

    #[test]
    fn geometric_predicate() {
        assert!(is_geometric(&standard(5, 3, 1)).unwrap().is_geometric());
        let lg = is_geometric(&standard(5, 3, -1)).unwrap();
        assert!(!lg.bundle_fibration);
        let mut zero = standard(5, 3, 1);
        zero.potential = Potential::Zero;
        assert!(!is_geometric(&zero).unwrap().pairing_potential);
    }
}
