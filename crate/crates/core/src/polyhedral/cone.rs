use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::rational::{
    self, divide_by_gcd, dot_int, dot_mixed, primitive_integer, project_off, rank_int, rref,
    to_rational, Rational,
};
use crate::lattice::IntVec;

/// A rational polyhedral cone carrying both its V- and H-representation.
///
/// All four lists are canonical: rays are primitive and reduced modulo the
/// lineality space, facets are primitive and reduced modulo the equations,
/// and the two subspace bases are in reduced echelon form. Two cones are equal
/// exactly when their canonical data agree.
#[derive(Clone, Debug)]
pub struct RationalCone {
    ambient_dim: usize,
    rays: Vec<IntVec>,
    lineality: Vec<IntVec>,
    facets: Vec<IntVec>,
    equations: Vec<IntVec>,
}

/// Double description iteration: converts `{x : a·x ≥ 0, e·x = 0}` into a
/// lineality basis plus extreme rays (not yet canonicalised).
fn double_description(
    dim: usize,
    inequalities: &[IntVec],
    equations: &[IntVec],
) -> (Vec<IntVec>, Vec<IntVec>) {
    let mut lineality: Vec<IntVec> = (0..dim)
        .map(|i| {
            let mut e = vec![BigInt::zero(); dim];
            e[i] = BigInt::from(1);
            e
        })
        .collect();
    let mut rays: Vec<IntVec> = Vec::new();
    let mut processed: Vec<IntVec> = Vec::new();

    let constraints = equations
        .iter()
        .flat_map(|e| [e.clone(), e.iter().map(|x| -x).collect::<IntVec>()])
        .chain(inequalities.iter().cloned());

    for a in constraints {
        if a.iter().all(Zero::is_zero) {
            continue;
        }
        if let Some(pos) = lineality.iter().position(|l| !dot_int(&a, l).is_zero()) {
            let mut p = lineality.remove(pos);
            if dot_int(&a, &p).is_negative() {
                p = p.iter().map(|x| -x).collect();
            }
            let ap = dot_int(&a, &p);
            let reduce = |v: &IntVec| -> IntVec {
                let av = dot_int(&a, v);
                if av.is_zero() {
                    return v.clone();
                }
                let w: IntVec = v.iter().zip(&p).map(|(x, y)| &ap * x - &av * y).collect();
                divide_by_gcd(w)
            };
            lineality = lineality.iter().map(reduce).collect();
            rays = rays.iter().map(reduce).collect();
            rays.push(p);
            processed.push(a);
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|r| dot_int(&a, r)).collect();
        let mut next: Vec<IntVec> = Vec::new();
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (i, v) in values.iter().enumerate() {
            if v.is_positive() {
                positive.push(i);
                next.push(rays[i].clone());
            } else if v.is_zero() {
                next.push(rays[i].clone());
            } else {
                negative.push(i);
            }
        }
        if !negative.is_empty() && !positive.is_empty() {
            let target_rank = dim - lineality.len();
            let tight: Vec<BTreeSet<usize>> = rays
                .iter()
                .map(|r| {
                    processed
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| dot_int(c, r).is_zero())
                        .map(|(i, _)| i)
                        .collect()
                })
                .collect();
            for &ip in &positive {
                for &in_ in &negative {
                    let common: Vec<IntVec> = tight[ip]
                        .intersection(&tight[in_])
                        .map(|&i| processed[i].clone())
                        .collect();
                    if target_rank < 2 || rank_int(&common, dim) != target_rank - 2 {
                        continue;
                    }
                    let vp = &values[ip];
                    let vn = -&values[in_];
                    let w: IntVec = rays[ip]
                        .iter()
                        .zip(&rays[in_])
                        .map(|(x, y)| &vn * x + vp * y)
                        .collect();
                    next.push(divide_by_gcd(w));
                }
            }
        }
        rays = next;
        processed.push(a);
    }
    (lineality, rays)
}

fn canonical_subspace(dim: usize, basis: &[IntVec]) -> Vec<IntVec> {
    let qs: Vec<Vec<Rational>> = basis.iter().map(|v| to_rational(v)).collect();
    let (red, _) = rref(&qs, dim);
    red.iter().map(|r| primitive_integer(r)).collect()
}

fn reduce_modulo(dim: usize, vectors: &[IntVec], subspace: &[IntVec]) -> Vec<IntVec> {
    let basis: Vec<Vec<Rational>> = subspace.iter().map(|v| to_rational(v)).collect();
    let mut out: BTreeSet<IntVec> = BTreeSet::new();
    for v in vectors {
        let p = project_off(&to_rational(v), &basis);
        if rational::is_zero_vec(&p) {
            continue;
        }
        let w = primitive_integer(&p);
        debug_assert_eq!(w.len(), dim);
        out.insert(w);
    }
    out.into_iter().collect()
}

impl RationalCone {
    /// Cone generated by `generators` (zero vectors are ignored).
    pub fn from_generators(ambient_dim: usize, generators: &[IntVec]) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("ambient dimension must be at least 1".into()));
        }
        for g in generators {
            if g.len() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "generator of length {} in dimension {ambient_dim}",
                    g.len()
                )));
            }
        }
        let gens: Vec<IntVec> = generators
            .iter()
            .filter(|g| g.iter().any(|x| !x.is_zero()))
            .cloned()
            .collect();
        // dual cone {y : g·y ≥ 0}: its rays are our facets, its lineality our equations
        let (dual_lin, dual_rays) = double_description(ambient_dim, &gens, &[]);
        let (lin, rays) = double_description(ambient_dim, &dual_rays, &dual_lin);
        Ok(Self::assemble(ambient_dim, rays, lin, dual_rays, dual_lin))
    }

    /// Rational generators are scaled to primitive integer vectors first.
    pub fn from_rational_generators(ambient_dim: usize, generators: &[Vec<Rational>]) -> Result<Self> {
        let ints: Vec<IntVec> = generators.iter().map(|g| primitive_integer(g)).collect();
        Self::from_generators(ambient_dim, &ints)
    }

    /// Cone `{x : f·x ≥ 0 for f in inequalities, e·x = 0 for e in equations}`.
    pub fn from_inequalities(
        ambient_dim: usize,
        inequalities: &[IntVec],
        equations: &[IntVec],
    ) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("ambient dimension must be at least 1".into()));
        }
        for f in inequalities.iter().chain(equations) {
            if f.len() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "functional of length {} in dimension {ambient_dim}",
                    f.len()
                )));
            }
        }
        let (lin, rays) = double_description(ambient_dim, inequalities, equations);
        let mut gens = rays;
        for l in &lin {
            gens.push(l.clone());
            gens.push(l.iter().map(|x| -x).collect());
        }
        Self::from_generators(ambient_dim, &gens)
    }

    /// The zero cone `{0}`.
    pub fn zero(ambient_dim: usize) -> Self {
        Self::from_generators(ambient_dim, &[]).expect("valid dimension")
    }

    /// The whole space.
    pub fn full(ambient_dim: usize) -> Self {
        Self::from_inequalities(ambient_dim, &[], &[]).expect("valid dimension")
    }

    fn assemble(
        ambient_dim: usize,
        rays: Vec<IntVec>,
        lineality: Vec<IntVec>,
        facets: Vec<IntVec>,
        equations: Vec<IntVec>,
    ) -> Self {
        let lineality = canonical_subspace(ambient_dim, &lineality);
        let equations = canonical_subspace(ambient_dim, &equations);
        let rays = reduce_modulo(ambient_dim, &rays, &lineality);
        let facets = reduce_modulo(ambient_dim, &facets, &equations);
        RationalCone {
            ambient_dim,
            rays,
            lineality,
            facets,
            equations,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Extreme rays modulo the lineality space.
    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn lineality(&self) -> &[IntVec] {
        &self.lineality
    }

    /// Facet functionals `f` with `f·x ≥ 0` on the cone.
    pub fn facets(&self) -> &[IntVec] {
        &self.facets
    }

    /// Linear equations cutting out the span of the cone.
    pub fn equations(&self) -> &[IntVec] {
        &self.equations
    }

    /// All generators: rays plus both signs of the lineality basis.
    pub fn generators(&self) -> Vec<IntVec> {
        let mut g = self.rays.clone();
        for l in &self.lineality {
            g.push(l.clone());
            g.push(l.iter().map(|x| -x).collect());
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim - self.equations.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equations.iter().all(|e| dot_mixed(e, x).is_zero())
            && self.facets.iter().all(|f| !dot_mixed(f, x).is_negative())
    }

    pub fn contains_int(&self, x: &[BigInt]) -> bool {
        self.contains(&to_rational(x))
    }

    pub fn in_relative_interior(&self, x: &[Rational]) -> bool {
        self.equations.iter().all(|e| dot_mixed(e, x).is_zero())
            && self.facets.iter().all(|f| dot_mixed(f, x).is_positive())
    }

    pub fn in_interior(&self, x: &[Rational]) -> bool {
        self.is_full_dimensional() && self.in_relative_interior(x)
    }

    /// Deterministic relative interior point: the sum of the extreme rays.
    pub fn relative_interior_point(&self) -> Result<Vec<Rational>> {
        if self.rays.is_empty() && self.lineality.is_empty() {
            return Err(Error::Degenerate("no relative interior direction".into()));
        }
        let mut p = vec![Rational::zero(); self.ambient_dim];
        for r in &self.rays {
            for (pi, ri) in p.iter_mut().zip(r) {
                *pi += Rational::from_integer(ri.clone());
            }
        }
        Ok(p)
    }

    pub fn contains_cone(&self, other: &RationalCone) -> bool {
        other.generators().iter().all(|g| self.contains_int(g))
    }

    pub fn intersection(&self, other: &RationalCone) -> RationalCone {
        let mut ineq = self.facets.clone();
        ineq.extend(other.facets.iter().cloned());
        let mut eq = self.equations.clone();
        eq.extend(other.equations.iter().cloned());
        RationalCone::from_inequalities(self.ambient_dim, &ineq, &eq)
            .expect("dimensions agree")
    }

    /// The face cut out by the facets that vanish on `inner`, assuming
    /// `inner ⊆ self`.
    pub fn smallest_face_containing(&self, inner: &RationalCone) -> RationalCone {
        let gens = inner.generators();
        let mut eq = self.equations.clone();
        for f in &self.facets {
            if gens.iter().all(|g| dot_int(f, g).is_zero()) {
                eq.push(f.clone());
            }
        }
        RationalCone::from_inequalities(self.ambient_dim, &self.facets, &eq)
            .expect("dimensions agree")
    }

    pub fn is_face_of(&self, other: &RationalCone) -> bool {
        other.contains_cone(self) && &other.smallest_face_containing(self) == self
    }

    /// Every face, including the cone itself and its minimal face (the lineality space).
    pub fn faces(&self) -> Vec<RationalCone> {
        let mut seen: BTreeSet<(Vec<IntVec>, Vec<IntVec>)> = BTreeSet::new();
        let mut out = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(c) = stack.pop() {
            if !seen.insert(c.key()) {
                continue;
            }
            for f in &c.facets {
                let mut eq = c.equations.clone();
                eq.push(f.clone());
                let face = RationalCone::from_inequalities(c.ambient_dim, &c.facets, &eq)
                    .expect("dimensions agree");
                stack.push(face);
            }
            out.push(c);
        }
        out.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.key().cmp(&b.key())));
        out
    }

    /// Canonical identity key (equations, facets).
    pub fn key(&self) -> (Vec<IntVec>, Vec<IntVec>) {
        (self.equations.clone(), self.facets.clone())
    }
}

impl PartialEq for RationalCone {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.equations == other.equations
            && self.facets == other.facets
    }
}

impl Eq for RationalCone {}

impl Hash for RationalCone {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient_dim.hash(state);
        self.equations.hash(state);
        self.facets.hash(state);
    }
}

impl PartialOrd for RationalCone {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalCone {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ambient_dim, &self.equations, &self.facets).cmp(&(
            other.ambient_dim,
            &other.equations,
            &other.facets,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_vec;
    use crate::lattice::rational::q;

    fn cone(dim: usize, gens: &[&[i64]]) -> RationalCone {
        let g: Vec<IntVec> = gens.iter().map(|v| int_vec(v)).collect();
        RationalCone::from_generators(dim, &g).unwrap()
    }

    #[test]
    fn first_quadrant() {
        let c = cone(2, &[&[1, 0], &[0, 1]]);
        assert_eq!(c.facets(), &[int_vec(&[0, 1]), int_vec(&[1, 0])]);
        assert!(c.is_strongly_convex());
        assert_eq!(c.relative_interior_point().unwrap(), vec![q(1), q(1)]);
    }

    #[test]
    fn opposite_rays_make_a_line() {
        let c = cone(2, &[&[1, 0], &[-1, 0]]);
        assert_eq!(c.lineality(), &[int_vec(&[1, 0])]);
        assert!(c.facets().is_empty());
        assert_eq!(c.dim(), 1);
        assert!(!c.is_strongly_convex());
    }

    #[test]
    fn redundant_generator_removed() {
        let c = cone(2, &[&[1, 0], &[1, 1], &[0, 1]]);
        assert_eq!(c.rays(), &[int_vec(&[0, 1]), int_vec(&[1, 0])]);
    }

    #[test]
    fn strong_convexity() {
        assert!(cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).is_strongly_convex());
        let half = RationalCone::from_inequalities(2, &[int_vec(&[0, 1])], &[]).unwrap();
        assert!(!half.is_strongly_convex());
        let plane = cone(2, &[&[1, 0], &[0, 1], &[-1, -1]]);
        assert!(!plane.is_strongly_convex());
        assert_eq!(plane, RationalCone::full(2));
    }

    #[test]
    fn relative_interior_points() {
        let ray = cone(2, &[&[2, 4]]);
        assert_eq!(ray.relative_interior_point().unwrap(), vec![q(1), q(2)]);
        let c = cone(3, &[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(c.relative_interior_point().unwrap(), vec![q(1), q(1), q(0)]);
        assert!(RationalCone::zero(2).relative_interior_point().is_err());
    }

    #[test]
    fn faces_of_a_square_cone() {
        let c = cone(3, &[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        assert_eq!(c.facets().len(), 4);
        // itself, 4 facets, 4 rays, the origin
        assert_eq!(c.faces().len(), 10);
        for f in c.faces() {
            assert!(f.is_face_of(&c));
        }
        let not_face = cone(3, &[&[1, 0, 1], &[-1, 0, 1]]);
        assert!(!not_face.is_face_of(&c));
    }

    #[test]
    fn h_to_v_round_trip() {
        let c = cone(3, &[&[1, 2, 3], &[-1, 0, 2], &[0, 1, -1], &[2, 2, 2]]);
        let back = RationalCone::from_inequalities(3, c.facets(), c.equations()).unwrap();
        assert_eq!(c, back);
        assert_eq!(c.rays(), back.rays());
    }
}
