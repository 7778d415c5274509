//! Abelian GIT problems, secondary fans and quotient stacky fans.

mod chow;
mod stacky;

pub use chow::{ci_euler_characteristic, integrate, Polynomial};
pub(crate) use stacky::gale_dual_rays;
pub use stacky::{
    completeness_and_properness, is_cartier, quotient_stacky_fan, rank_k0, stacky_fan_at,
    CompletenessReport, StackyFan,
};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::rational::{to_rational, Rational};
use crate::lattice::{FinAbGroup, IntVec};
use crate::polyhedral::{
    chamber_arrangement, minimal_supports, Chamber, ChamberArrangement, RationalCone, Wall,
};

/// A character: free coordinates plus torsion residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub free: IntVec,
    pub torsion: IntVec,
}

impl Character {
    pub fn new(free: IntVec, torsion: IntVec) -> Self {
        Character { free, torsion }
    }

    pub fn free(free: IntVec) -> Self {
        Character {
            free,
            torsion: Vec::new(),
        }
    }

    pub fn from_i64(free: &[i64]) -> Self {
        Character::free(crate::lattice::int_vec(free))
    }

    pub fn zero(group: &FinAbGroup) -> Self {
        Character {
            free: vec![BigInt::zero(); group.free_rank()],
            torsion: vec![BigInt::zero(); group.torsion_rank()],
        }
    }

    pub fn add(&self, other: &Character, group: &FinAbGroup) -> Character {
        let free = self.free.iter().zip(&other.free).map(|(a, b)| a + b).collect();
        let t: Vec<BigInt> = self.torsion.iter().zip(&other.torsion).map(|(a, b)| a + b).collect();
        Character {
            free,
            torsion: group.reduce_torsion(&t),
        }
    }

    pub fn neg(&self, group: &FinAbGroup) -> Character {
        let free = self.free.iter().map(|a| -a).collect();
        let t: Vec<BigInt> = self.torsion.iter().map(|a| -a).collect();
        Character {
            free,
            torsion: group.reduce_torsion(&t),
        }
    }

    pub fn free_q(&self) -> Vec<Rational> {
        to_rational(&self.free)
    }
}

/// An abelian group acting diagonally on named coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GitProblem {
    group: FinAbGroup,
    names: Vec<String>,
    weights: Vec<Character>,
}

impl GitProblem {
    pub fn new(group: FinAbGroup, coordinates: Vec<(String, Character)>) -> Result<Self> {
        if coordinates.is_empty() {
            return Err(Error::InvalidInput("a GIT problem needs at least one coordinate".into()));
        }
        let mut names = Vec::new();
        let mut weights = Vec::new();
        for (name, w) in coordinates {
            if w.free.len() != group.free_rank() {
                return Err(Error::DimensionMismatch(format!(
                    "coordinate {name}: weight has length {}, group has free rank {}",
                    w.free.len(),
                    group.free_rank()
                )));
            }
            let torsion = if w.torsion.is_empty() {
                vec![BigInt::zero(); group.torsion_rank()]
            } else {
                w.torsion.clone()
            };
            if torsion.len() != group.torsion_rank() {
                return Err(Error::DimensionMismatch(format!(
                    "coordinate {name}: {} torsion residues for {} invariant factors",
                    torsion.len(),
                    group.torsion_rank()
                )));
            }
            if names.contains(&name) {
                return Err(Error::InvalidInput(format!("duplicate coordinate name {name}")));
            }
            names.push(name);
            weights.push(Character {
                free: w.free,
                torsion: group.reduce_torsion(&torsion),
            });
        }
        Ok(GitProblem {
            group,
            names,
            weights,
        })
    }

    /// Torsion-free problem with coordinates named `x0, x1, …`.
    pub fn from_weights(weights: &[Vec<i64>]) -> Result<Self> {
        let k = weights.first().map_or(0, Vec::len);
        let coords = weights
            .iter()
            .enumerate()
            .map(|(i, w)| (format!("x{i}"), Character::from_i64(w)))
            .collect();
        GitProblem::new(FinAbGroup::free(k), coords)
    }

    pub fn with_names(weights: &[(&str, Vec<i64>)]) -> Result<Self> {
        let k = weights.first().map_or(0, |(_, w)| w.len());
        let coords = weights
            .iter()
            .map(|(n, w)| (n.to_string(), Character::from_i64(w)))
            .collect();
        GitProblem::new(FinAbGroup::free(k), coords)
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn k(&self) -> usize {
        self.group.free_rank()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[Character] {
        &self.weights
    }

    pub fn free_weights(&self) -> Vec<IntVec> {
        self.weights.iter().map(|w| w.free.clone()).collect()
    }

    pub fn free_weights_q(&self) -> Vec<Vec<Rational>> {
        self.weights.iter().map(|w| w.free_q()).collect()
    }

    /// Cone generated by the free parts of the weights.
    pub fn weight_cone(&self) -> Result<RationalCone> {
        RationalCone::from_generators(self.k(), &self.free_weights())
    }

    /// Sum of all weights: the character of `det V`.
    pub fn det_character(&self) -> Character {
        self.weights
            .iter()
            .fold(Character::zero(&self.group), |acc, w| acc.add(w, &self.group))
    }

    /// Sub-problem on the given coordinates, same group.
    pub fn restrict(&self, coords: &[usize]) -> Result<GitProblem> {
        GitProblem::new(
            self.group.clone(),
            coords
                .iter()
                .map(|&i| (self.names[i].clone(), self.weights[i].clone()))
                .collect(),
        )
    }
}

/// Minimal coordinate subsets whose weights span a cone containing θ;
/// the monomials over these subsets generate the irrelevant ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrelevantData {
    pub supports: Vec<Vec<usize>>,
}

impl IrrelevantData {
    /// Coordinates appearing in every support: they never vanish on the semistable locus.
    pub fn always_nonzero(&self, n: usize) -> Vec<usize> {
        (0..n)
            .filter(|i| self.supports.iter().all(|s| s.contains(i)))
            .collect()
    }

    /// Whether a point with the given nonvanishing coordinates is semistable.
    pub fn is_semistable(&self, nonzero: &[usize]) -> bool {
        self.supports
            .iter()
            .any(|s| s.iter().all(|i| nonzero.contains(i)))
    }
}

pub fn irrelevant_data(git: &GitProblem, theta: &[Rational]) -> Result<IrrelevantData> {
    if theta.len() != git.k() {
        return Err(Error::DimensionMismatch(format!(
            "θ has length {}, group has free rank {}",
            theta.len(),
            git.k()
        )));
    }
    let supports = minimal_supports(theta, &git.free_weights_q());
    if supports.is_empty() {
        return Err(Error::EmptySemistableLocus);
    }
    Ok(IrrelevantData { supports })
}

/// The GIT (secondary) fan; chamber ids are indices into `chambers()`,
/// ordered by canonical facet keys.
#[derive(Clone, Debug)]
pub struct SecondaryFan {
    pub arrangement: ChamberArrangement,
}

impl SecondaryFan {
    pub fn chambers(&self) -> &[Chamber] {
        &self.arrangement.chambers
    }

    pub fn walls(&self) -> &[Wall] {
        &self.arrangement.walls
    }

    pub fn support(&self) -> &RationalCone {
        &self.arrangement.support
    }

    pub fn chamber_of(&self, theta: &[Rational]) -> Option<usize> {
        self.arrangement.chamber_with_interior(theta)
    }

    pub fn chambers_containing(&self, theta: &[Rational]) -> Vec<usize> {
        self.arrangement.chambers_containing(theta)
    }

    /// Index of the chamber equal to `cone`.
    pub fn find_chamber(&self, cone: &RationalCone) -> Result<usize> {
        self.chambers()
            .iter()
            .position(|c| &c.cone == cone)
            .ok_or_else(|| Error::NotAChamber("cone is not a chamber of the secondary fan".into()))
    }
}

pub fn secondary_fan(git: &GitProblem) -> Result<SecondaryFan> {
    let weights = git.free_weights();
    if git.k() == 0 || weights.iter().all(|w| w.iter().all(Zero::is_zero)) {
        return Err(Error::NoFreeWeights);
    }
    let support = git.weight_cone()?;
    Ok(SecondaryFan {
        arrangement: chamber_arrangement(&weights, &support)?,
    })
}

/// Nef cone of a chamber's quotient (the closed chamber) with ampleness = relative interior.
#[derive(Clone, Debug)]
pub struct NefAmple {
    pub nef: RationalCone,
}

impl NefAmple {
    pub fn is_nef(&self, x: &[Rational]) -> bool {
        self.nef.contains(x)
    }

    pub fn is_ample(&self, x: &[Rational]) -> bool {
        self.nef.in_relative_interior(x)
    }
}

pub fn nef_ample(fan: &SecondaryFan, chamber: usize) -> Result<NefAmple> {
    let c = fan
        .chambers()
        .get(chamber)
        .ok_or_else(|| Error::NotAChamber(format!("no chamber with id {chamber}")))?;
    Ok(NefAmple {
        nef: c.cone.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational::q;

    fn standard(n: usize, d: i64) -> GitProblem {
        let mut w = vec![vec![1]; n + 1];
        w.push(vec![-d]);
        GitProblem::from_weights(&w).unwrap()
    }

    #[test]
    fn standard_example_fan() {
        let f = secondary_fan(&standard(5, 3)).unwrap();
        assert_eq!(f.chambers().len(), 2);
        assert_eq!(f.walls().len(), 1);
    }

    #[test]
    fn p1xp1_bundle_fan() {
        let g = GitProblem::from_weights(&[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1], vec![-1, -1]])
            .unwrap();
        let f = secondary_fan(&g).unwrap();
        assert_eq!(f.chambers().len(), 3);
        let geo = f.chamber_of(&[q(1), q(1)]).unwrap();
        let na = nef_ample(&f, geo).unwrap();
        assert!(na.is_nef(&[q(1), q(0)]));
        assert!(!na.is_ample(&[q(1), q(0)]));
        assert!(!na.is_nef(&[q(1), q(-1)]));
    }

    #[test]
    fn single_weight_fan() {
        let f = secondary_fan(&GitProblem::from_weights(&[vec![1]]).unwrap()).unwrap();
        assert_eq!(f.chambers().len(), 1);
    }

    #[test]
    fn torsion_only_weights_rejected() {
        let g = GitProblem::new(
            FinAbGroup::new(0, vec![BigInt::from(2)]).unwrap(),
            vec![("x".into(), Character::new(vec![], vec![BigInt::from(1)]))],
        )
        .unwrap();
        assert_eq!(secondary_fan(&g).unwrap_err(), Error::NoFreeWeights);
    }

    #[test]
    fn irrelevant_data_examples() {
        let g = standard(5, 3);
        let pos = irrelevant_data(&g, &[q(1)]).unwrap();
        assert_eq!(pos.supports, (0..6).map(|i| vec![i]).collect::<Vec<_>>());
        let neg = irrelevant_data(&g, &[q(-1)]).unwrap();
        assert_eq!(neg.supports, vec![vec![6]]);
        let pn = GitProblem::from_weights(&[vec![1], vec![1]]).unwrap();
        assert_eq!(irrelevant_data(&pn, &[q(-1)]).unwrap_err(), Error::EmptySemistableLocus);
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(GitProblem::with_names(&[("x", vec![1]), ("x", vec![1])]).is_err());
    }
}
