use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Glsm, Potential};
use crate::error::{Error, Result};
use crate::git::{
    ci_euler_characteristic, gale_dual_rays, is_cartier, nef_ample, secondary_fan, stacky_fan_at, Character, GitProblem,
    NefAmple, StackyFan,
};
use crate::lattice::rational::Rational;
use crate::lattice::{canonical_lattice_basis, solve_integral, FinAbGroup, IntMatrix, IntVec};

/// Complete intersection of divisors `D_i = Σ a_iρ D_ρ` in the GIT quotient of `base` at `theta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CiProblem {
    pub base: GitProblem,
    pub theta: Vec<Rational>,
    /// Coefficients per base coordinate, one vector per divisor.
    pub divisors: Vec<IntVec>,
    /// Names of the bundle coordinates, one per divisor.
    pub bundle_names: Vec<String>,
}

impl CiProblem {
    pub fn new(base: GitProblem, theta: Vec<Rational>, divisors: Vec<IntVec>) -> Result<Self> {
        for (i, d) in divisors.iter().enumerate() {
            if d.len() != base.n() {
                return Err(Error::DimensionMismatch(format!(
                    "divisor {} has {} coefficients for {} coordinates",
                    i + 1,
                    d.len(),
                    base.n()
                )));
            }
        }
        if theta.len() != base.k() {
            return Err(Error::DimensionMismatch("θ does not match the base group".into()));
        }
        let bundle_names = (1..=divisors.len())
            .map(|i| {
                let mut name = format!("u{i}");
                while base.names().contains(&name) {
                    name.push('\'');
                }
                name
            })
            .collect();
        Ok(CiProblem {
            base,
            theta,
            divisors,
            bundle_names,
        })
    }

    /// Divisors given by classes; a torus-invariant representative is chosen.
    pub fn from_classes(base: GitProblem, theta: Vec<Rational>, classes: &[Character]) -> Result<Self> {
        let divisors = classes
            .iter()
            .map(|c| representative(&base, c))
            .collect::<Result<Vec<_>>>()?;
        CiProblem::new(base, theta, divisors)
    }

    /// Reads the CI structure off a GLSM whose χ-weights are 0 and 1.
    pub fn from_glsm(glsm: &Glsm) -> Result<Self> {
        let kr = glsm.kernel_restriction()?;
        let base_idx = kr.base_coordinates();
        let bundle_idx = kr.bundle_coordinates();
        if base_idx.len() + bundle_idx.len() != kr.kernel.n() {
            return Err(Error::InvalidInput("χ-weights must be 0 or 1".into()));
        }
        let base = kr.kernel.restrict(&base_idx)?;
        let group = base.group().clone();
        let classes: Vec<Character> = bundle_idx
            .iter()
            .map(|&i| kr.kernel.weights()[i].neg(&group))
            .collect();
        let mut ci = CiProblem::from_classes(base, glsm.theta.clone(), &classes)?;
        ci.bundle_names = bundle_idx.iter().map(|&i| kr.kernel.names()[i].clone()).collect();
        Ok(ci)
    }

    pub fn r(&self) -> usize {
        self.divisors.len()
    }

    pub fn class(&self, i: usize) -> Character {
        let group = self.base.group();
        self.divisors[i]
            .iter()
            .zip(self.base.weights())
            .fold(Character::zero(group), |acc, (a, w)| {
                let scaled = Character::new(
                    w.free.iter().map(|x| x * a).collect(),
                    w.torsion.iter().map(|x| x * a).collect(),
                );
                acc.add(&Character::new(scaled.free, group.reduce_torsion(&scaled.torsion)), group)
            })
    }

    /// Nef and ample cones of the base at θ.
    pub fn base_nef_ample(&self) -> Result<NefAmple> {
        let fan = secondary_fan(&self.base)?;
        let c = fan.chamber_of(&self.theta).ok_or_else(|| {
            Error::NotAChamber("θ is not in the interior of a base chamber".into())
        })?;
        nef_ample(&fan, c)
    }

    pub fn base_fan(&self) -> Result<StackyFan> {
        stacky_fan_at(&self.base, &self.theta)
    }

    /// Topological Euler characteristic of the complete intersection.
    pub fn euler_characteristic(&self) -> Result<Rational> {
        let sf = self.base_fan()?;
        let divisors: Vec<Vec<Rational>> = self
            .divisors
            .iter()
            .map(|d| {
                sf.ray_names
                    .iter()
                    .map(|n| {
                        let i = self.base.names().iter().position(|m| m == n).expect("ray is a coordinate");
                        Rational::from_integer(d[i].clone())
                    })
                    .collect()
            })
            .collect();
        ci_euler_characteristic(&sf, &divisors)
    }

    /// `-K_X`: the sum of the classes of the ray coordinates.
    pub fn anti_canonical(&self) -> Result<Character> {
        let sf = self.base_fan()?;
        let group = self.base.group();
        Ok(self
            .base
            .names()
            .iter()
            .zip(self.base.weights())
            .filter(|(n, _)| sf.ray_index(n).is_some())
            .fold(Character::zero(group), |acc, (_, w)| acc.add(w, group)))
    }
}

/// Integer coefficients `a` with `Σ a_ρ w_ρ = c`.
fn representative(base: &GitProblem, c: &Character) -> Result<IntVec> {
    let n = base.n();
    let factors = base.group().invariant_factors();
    let t = factors.len();
    let mut rows: Vec<IntVec> = Vec::new();
    for i in 0..base.k() {
        let mut r: IntVec = base.weights().iter().map(|w| w.free[i].clone()).collect();
        r.extend(std::iter::repeat_n(BigInt::zero(), t));
        rows.push(r);
    }
    for (j, a) in factors.iter().enumerate() {
        let mut r: IntVec = base.weights().iter().map(|w| w.torsion[j].clone()).collect();
        let mut tail = vec![BigInt::zero(); t];
        tail[j] = a.clone();
        r.extend(tail);
        rows.push(r);
    }
    let mut target = c.free.clone();
    target.extend(c.torsion.iter().cloned());
    let x = solve_integral(&IntMatrix::from_rows(n + t, &rows), &target).ok_or_else(|| {
        Error::InvalidInput("divisor class is not in the span of the coordinate weights".into())
    })?;
    Ok(x[..n].to_vec())
}

/// Γ = G × G_m on `V × C^r`: bundle coordinate `i` has G-weight `-D_i` and dilation weight 1.
pub fn build_ci_glsm(ci: &CiProblem) -> Result<Glsm> {
    let na = ci.base_nef_ample()?;
    for i in 0..ci.r() {
        if !na.is_nef(&ci.class(i).free_q()) {
            return Err(Error::NonNefDivisor(i + 1));
        }
    }
    let group = ci.base.group();
    let mut coords: Vec<(String, Character)> = ci
        .base
        .names()
        .iter()
        .cloned()
        .zip(ci.base.weights().iter().cloned())
        .collect();
    for i in 0..ci.r() {
        coords.push((ci.bundle_names[i].clone(), ci.class(i).neg(group)));
    }
    let kernel = GitProblem::new(group.clone(), coords)?;
    let mut chi = vec![BigInt::zero(); ci.base.n()];
    chi.extend(std::iter::repeat_n(BigInt::one(), ci.r()));
    let potential = if ci.r() == 0 {
        Potential::Zero
    } else {
        Potential::GenericPairing
    };
    Glsm::split(&kernel, &chi, ci.theta.clone(), potential)
}

/// The fan of the total space of `⊕ O(-D_i)`: rays `(u_ρ, a_·ρ)` and `e_i`,
/// cones `σ ∪ {e_i}`.
pub fn total_space_fan(ci: &CiProblem) -> Result<StackyFan> {
    build_ci_glsm(ci)?;
    let base = ci.base_fan()?;
    let d = base.lattice_rank;
    let r = ci.r();
    let mut names = base.ray_names.clone();
    let mut rays = Vec::new();
    for (name, u) in base.ray_names.iter().zip(&base.rays) {
        let rho = ci
            .base
            .names()
            .iter()
            .position(|n| n == name)
            .expect("ray names are coordinate names");
        let mut v = u.clone();
        v.extend((0..r).map(|i| ci.divisors[i][rho].clone()));
        rays.push(v);
    }
    for i in 0..r {
        let mut v = vec![BigInt::zero(); d + r];
        v[d + i] = BigInt::one();
        rays.push(v);
        names.push(ci.bundle_names[i].clone());
    }
    let m = base.rays.len();
    let cones = base
        .cones
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.extend(m..m + r);
            c
        })
        .collect();
    let mut sf = StackyFan::new(d + r, names, rays, cones)?;
    sf.generic_stabilizer = base.generic_stabilizer.clone();
    Ok(sf)
}

/// Verification of the two exact sequences relating the base and the total space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionReport {
    pub rows_exact: bool,
    pub commutes: bool,
    /// `ι̂(e_i) = -Σ a_iρ D_ρ` per bundle coordinate.
    pub bundle_classes: Vec<Character>,
    pub failures: Vec<String>,
}

fn apply_weights(git: &GitProblem, x: &[BigInt]) -> Character {
    let group = git.group();
    x.iter()
        .zip(git.weights())
        .fold(Character::zero(group), |acc, (a, w)| {
            let t: Vec<BigInt> = w.torsion.iter().map(|v| v * a).collect();
            acc.add(
                &Character::new(w.free.iter().map(|v| v * a).collect(), group.reduce_torsion(&t)),
                group,
            )
        })
}

fn surjective(git: &GitProblem) -> bool {
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
        return true;
    }
    let c = crate::lattice::cokernel(&IntMatrix::from_rows(n + t, &rows));
    c.free_rank() == 0 && c.is_free()
}

pub fn projection_check(ci: &CiProblem) -> Result<ProjectionReport> {
    let glsm = build_ci_glsm(ci)?;
    let extended = glsm.kernel_restriction()?.kernel;
    let n = ci.base.n();
    let r = ci.r();
    let group: &FinAbGroup = ci.base.group();
    let (m, nu) = gale_dual_rays(&ci.base);
    let mut failures = Vec::new();

    // ν' : M ⊕ Z^r → Z^{n+r}, columns indexed by (M basis, e_i)
    let nu_prime_cols: Vec<IntVec> = (0..m + r)
        .map(|j| {
            let mut col = vec![BigInt::zero(); n + r];
            if j < m {
                for rho in 0..n {
                    col[rho] = nu[rho][j].clone();
                }
            } else {
                let i = j - m;
                for rho in 0..n {
                    col[rho] = ci.divisors[i][rho].clone();
                }
                col[n + i] = BigInt::one();
            }
            col
        })
        .collect();
    // g : Z^{n+r} → Z^n
    let g_cols: Vec<IntVec> = (0..n + r)
        .map(|j| {
            if j < n {
                let mut e = vec![BigInt::zero(); n];
                e[j] = BigInt::one();
                e
            } else {
                ci.divisors[j - n].iter().map(|a| -a).collect()
            }
        })
        .collect();
    let g_matrix = IntMatrix::from_cols(n, &g_cols);

    let zero = Character::zero(group);
    let mut rows_exact = true;
    for j in 0..m {
        let col: IntVec = (0..n).map(|rho| nu[rho][j].clone()).collect();
        if apply_weights(&ci.base, &col) != zero {
            rows_exact = false;
            failures.push("ι̂ ∘ ν ≠ 0".into());
            break;
        }
    }
    for col in &nu_prime_cols {
        if apply_weights(&extended, col) != zero {
            rows_exact = false;
            failures.push("ι̂' ∘ ν' ≠ 0".into());
            break;
        }
    }
    // image of ν' equals ker ι̂' (compare canonical lattice bases)
    let (m2, nu2) = gale_dual_rays(&extended);
    let kernel_cols: Vec<IntVec> = (0..m2).map(|j| (0..n + r).map(|i| nu2[i][j].clone()).collect()).collect();
    if canonical_lattice_basis(n + r, &kernel_cols) != canonical_lattice_basis(n + r, &nu_prime_cols) {
        rows_exact = false;
        failures.push("image of ν' differs from ker ι̂'".into());
    }
    if m2 != m + r {
        rows_exact = false;
        failures.push("ν' is not injective".into());
    }
    if !surjective(&ci.base) || !surjective(&extended) {
        rows_exact = false;
        failures.push("weights do not generate the character group".into());
    }

    let mut commutes = true;
    for j in 0..n + r {
        if apply_weights(&ci.base, &g_matrix.col(j)) != extended.weights()[j] {
            commutes = false;
            failures.push(format!("ι̂ ∘ g ≠ ι̂' on coordinate {j}"));
        }
    }
    for (j, col) in nu_prime_cols.iter().enumerate() {
        let lhs = g_matrix.mul_vec(col);
        let rhs: IntVec = if j < m {
            (0..n).map(|rho| nu[rho][j].clone()).collect()
        } else {
            vec![BigInt::zero(); n]
        };
        if lhs != rhs {
            commutes = false;
            failures.push(format!("g ∘ ν' ≠ ν ∘ proj on basis vector {j}"));
        }
    }
    let bundle_classes = (0..r)
        .map(|i| apply_weights(&ci.base, &g_matrix.col(n + i)))
        .collect();
    Ok(ProjectionReport {
        rows_exact,
        commutes,
        bundle_classes,
        failures,
    })
}

/// The `q > 0` with `D = q·(-K)`, torsion included.
pub fn q_ratio(d: &Character, anti_canonical: &Character, group: &FinAbGroup) -> Option<Rational> {
    let mut q: Option<Rational> = None;
    for (a, b) in d.free.iter().zip(&anti_canonical.free) {
        if b.is_zero() {
            if !a.is_zero() {
                return None;
            }
            continue;
        }
        let ratio = Rational::new(a.clone(), b.clone());
        match &q {
            Some(existing) if existing != &ratio => return None,
            _ => q = Some(ratio),
        }
    }
    let q = q?;
    if !q.is_positive() {
        return None;
    }
    // torsion: denom·D = numer·(-K)
    let lhs: Vec<BigInt> = d.torsion.iter().map(|t| t * q.denom()).collect();
    let rhs: Vec<BigInt> = anti_canonical.torsion.iter().map(|t| t * q.numer()).collect();
    (group.reduce_torsion(&lhs) == group.reduce_torsion(&rhs)).then_some(q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CyLabel {
    /// `q ≤ 1`: the Kuznetsov component is fractional Calabi-Yau.
    KFractionalCy,
    /// `q ≥ 1`: the anti-Kuznetsov category is fractional Calabi-Yau.
    AntiKFractionalCy,
    /// `q = 1/r` with `D` Cartier: the Kuznetsov component is Calabi-Yau.
    KCalabiYau,
}

impl CyLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CyLabel::KFractionalCy => "K-fractional-CY",
            CyLabel::AntiKFractionalCy => "antiK-fractional-CY",
            CyLabel::KCalabiYau => "K-CY",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyClassification {
    pub q: Option<Rational>,
    pub cartier: bool,
    pub labels: Vec<CyLabel>,
}

pub fn cy_classification(ci: &CiProblem) -> Result<CyClassification> {
    if ci.r() != 1 {
        return Err(Error::InvalidInput(
            "Calabi-Yau classification needs exactly one divisor".into(),
        ));
    }
    let na = ci.base_nef_ample()?;
    let anti = ci.anti_canonical()?;
    if !na.is_ample(&anti.free_q()) {
        return Err(Error::NotFano);
    }
    let sf = ci.base_fan()?;
    let coefficients: Vec<BigInt> = sf
        .ray_names
        .iter()
        .map(|n| {
            let i = ci.base.names().iter().position(|m| m == n).expect("ray is a coordinate");
            ci.divisors[0][i].clone()
        })
        .collect();
    let cartier = is_cartier(&coefficients, &sf)?;
    let q = q_ratio(&ci.class(0), &anti, ci.base.group());
    let mut labels = Vec::new();
    if let Some(q) = &q {
        if q <= &Rational::one() {
            labels.push(CyLabel::KFractionalCy);
        }
        if q >= &Rational::one() {
            labels.push(CyLabel::AntiKFractionalCy);
        }
        if q.numer().is_one() && cartier {
            labels.push(CyLabel::KCalabiYau);
        }
    }
    Ok(CyClassification { q, cartier, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::git::rank_k0;
    use crate::lattice::int_vec;
    use crate::lattice::rational::q;

    fn projective(n: usize) -> GitProblem {
        GitProblem::from_weights(&vec![vec![1]; n + 1]).unwrap()
    }

    fn hypersurface(n: usize, d: i64) -> CiProblem {
        let mut a = vec![0; n + 1];
        a[0] = d;
        CiProblem::new(projective(n), vec![q(1)], vec![int_vec(&a)]).unwrap()
    }

    fn p1xp1() -> GitProblem {
        GitProblem::from_weights(&[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]]).unwrap()
    }

    #[test]
    fn two_quadrics_weights() {
        let ci = CiProblem::from_classes(
            projective(5),
            vec![q(1)],
            &[Character::from_i64(&[2]), Character::from_i64(&[2])],
        )
        .unwrap();
        let g = build_ci_glsm(&ci).unwrap();
        let w = g.kernel_restriction().unwrap().kernel.free_weights();
        let expected: Vec<IntVec> = [1, 1, 1, 1, 1, 1, -2, -2].iter().map(|&x| int_vec(&[x])).collect();
        assert_eq!(w, expected);
    }

    #[test]
    fn conic_weights() {
        let ci = CiProblem::new(p1xp1(), vec![q(1), q(1)], vec![int_vec(&[1, 0, 1, 0])]).unwrap();
        let g = build_ci_glsm(&ci).unwrap();
        let w = g.kernel_restriction().unwrap().kernel.free_weights();
        assert_eq!(w[4], int_vec(&[-1, -1]));
    }

    #[test]
    fn no_divisors_gives_the_base() {
        let ci = CiProblem::new(projective(2), vec![q(1)], vec![]).unwrap();
        let g = build_ci_glsm(&ci).unwrap();
        assert_eq!(g.potential, Potential::Zero);
        let tsf = total_space_fan(&ci).unwrap();
        assert_eq!(rank_k0(&tsf).unwrap(), BigInt::from(3));
    }

    #[test]
    fn non_nef_rejected() {
        let ci = CiProblem::new(p1xp1(), vec![q(1), q(1)], vec![int_vec(&[1, 0, -1, 0])]).unwrap();
        assert_eq!(build_ci_glsm(&ci).unwrap_err(), Error::NonNefDivisor(1));
    }

    #[test]
    fn total_space_matches_quotient() {
        for ci in [
            hypersurface(3, 3),
            CiProblem::new(p1xp1(), vec![q(1), q(1)], vec![int_vec(&[1, 0, 1, 0])]).unwrap(),
        ] {
            let tsf = total_space_fan(&ci).unwrap();
            let g = build_ci_glsm(&ci).unwrap();
            let kernel = g.kernel_restriction().unwrap().kernel;
            let qsf = stacky_fan_at(&kernel, &ci.theta).unwrap();
            tsf.isomorphic_to(&qsf).unwrap();
        }
        let conic =
            CiProblem::new(p1xp1(), vec![q(1), q(1)], vec![int_vec(&[1, 0, 1, 0])]).unwrap();
        let tsf = total_space_fan(&conic).unwrap();
        assert_eq!(tsf.rays.len(), 5);
        assert_eq!(tsf.cones.len(), 4);
    }

    #[test]
    fn projection_diagram() {
        let r = projection_check(&hypersurface(5, 3)).unwrap();
        assert!(r.rows_exact && r.commutes, "{:?}", r.failures);
        assert_eq!(r.bundle_classes, vec![Character::from_i64(&[-3])]);
        let ci = CiProblem::new(p1xp1(), vec![q(1), q(1)], vec![int_vec(&[1, 0, 2, 0])]).unwrap();
        let r = projection_check(&ci).unwrap();
        assert!(r.rows_exact && r.commutes, "{:?}", r.failures);
        assert_eq!(r.bundle_classes, vec![Character::from_i64(&[-1, -2])]);
        let r0 = projection_check(&CiProblem::new(projective(2), vec![q(1)], vec![]).unwrap()).unwrap();
        assert!(r0.rows_exact && r0.commutes);
    }

    #[test]
    fn q_ratios() {
        let g = FinAbGroup::free(1);
        let k = Character::from_i64(&[6]);
        assert_eq!(q_ratio(&Character::from_i64(&[3]), &k, &g), Some(Rational::new(1.into(), 2.into())));
        assert_eq!(q_ratio(&k, &k, &g), Some(q(1)));
        assert_eq!(q_ratio(&Character::from_i64(&[0]), &k, &g), None);
        let g2 = FinAbGroup::free(2);
        assert_eq!(
            q_ratio(&Character::from_i64(&[1, 2]), &Character::from_i64(&[2, 2]), &g2),
            None
        );
    }

    #[test]
    fn cy_labels() {
        let cubic = cy_classification(&hypersurface(5, 3)).unwrap();
        assert!(cubic.labels.contains(&CyLabel::KCalabiYau));
        assert!(cubic.labels.contains(&CyLabel::KFractionalCy));
        let quintic = cy_classification(&hypersurface(4, 5)).unwrap();
        assert!(quintic.labels.contains(&CyLabel::KFractionalCy));
        assert!(quintic.labels.contains(&CyLabel::AntiKFractionalCy));
        let septic = cy_classification(&hypersurface(4, 7)).unwrap();
        assert_eq!(septic.labels, vec![CyLabel::AntiKFractionalCy]);
        assert_eq!(septic.q, Some(Rational::new(7.into(), 5.into())));
    }

    #[test]
    fn non_fano_base_rejected() {
        let base = GitProblem::from_weights(&[vec![1], vec![1], vec![-5]]).unwrap();
        // the quotient at θ = 1 is tot O(-5) over P^1; -K = -3 is not ample
        let ci = CiProblem::new(base, vec![q(1)], vec![int_vec(&[1, 0, 0])]).unwrap();
        assert_eq!(cy_classification(&ci).unwrap_err(), Error::NotFano);
    }
}
