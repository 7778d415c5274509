use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::cone::RationalCone;
use super::membership::for_each_subset;
use crate::error::{Error, Result};
use crate::lattice::rational::{
    dot_int, dot_mixed, nullspace_int, primitive_integer, project_off, rank, rank_int, solve,
    to_rational, Rational,
};
use crate::lattice::IntVec;

/// A linear hyperplane through the origin with a primitive normal whose
/// first nonzero entry is positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hyperplane {
    normal: IntVec,
}

impl Hyperplane {
    pub fn new(normal: &[num_bigint::BigInt]) -> Result<Self> {
        let mut n = crate::lattice::primitive(normal)?;
        if n.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            n = n.iter().map(|x| -x).collect();
        }
        Ok(Hyperplane { normal: n })
    }

    pub fn normal(&self) -> &[num_bigint::BigInt] {
        &self.normal
    }
}

/// A fan: a face-closed collection of cones.
#[derive(Clone, Debug)]
pub struct Fan {
    ambient_dim: usize,
    cones: Vec<RationalCone>,
    maximal: Vec<usize>,
}

impl Fan {
    /// Builds the fan generated by `maximal` cones together with all their faces.
    pub fn from_maximal(ambient_dim: usize, maximal: &[RationalCone]) -> Self {
        let mut all: BTreeMap<(std::cmp::Reverse<usize>, RationalCone), ()> = BTreeMap::new();
        for c in maximal {
            for f in c.faces() {
                all.insert((std::cmp::Reverse(f.dim()), f), ());
            }
        }
        let cones: Vec<RationalCone> = all.into_keys().map(|(_, c)| c).collect();
        let maximal_idx = maximal
            .iter()
            .map(|m| cones.iter().position(|c| c == m).expect("inserted above"))
            .collect();
        Fan {
            ambient_dim,
            cones,
            maximal: maximal_idx,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Every cone, ordered by decreasing dimension then canonical key.
    pub fn cones(&self) -> &[RationalCone] {
        &self.cones
    }

    pub fn maximal_cones(&self) -> Vec<&RationalCone> {
        self.maximal.iter().map(|&i| &self.cones[i]).collect()
    }

    /// Indices of cones that are faces of cone `i` (including `i`).
    pub fn faces_of(&self, i: usize) -> Vec<usize> {
        let c = &self.cones[i];
        (0..self.cones.len())
            .filter(|&j| self.cones[j].is_face_of(c))
            .collect()
    }

    /// Checks the fan axioms: faces are present and pairwise intersections
    /// of maximal cones are faces of both.
    pub fn check_axioms(&self) -> std::result::Result<(), String> {
        for &i in &self.maximal {
            for f in self.cones[i].faces() {
                if !self.cones.contains(&f) {
                    return Err(format!("face of cone {i} missing from the fan"));
                }
            }
        }
        for (a, &i) in self.maximal.iter().enumerate() {
            for &j in &self.maximal[a + 1..] {
                let (ci, cj) = (&self.cones[i], &self.cones[j]);
                let meet = ci.intersection(cj);
                if !meet.is_face_of(ci) || !meet.is_face_of(cj) {
                    return Err(format!("cones {i} and {j} meet in a non-face"));
                }
            }
        }
        Ok(())
    }
}

/// Minimal subsets `S` of `vectors` with `θ ∈ Cone(S)`.
///
/// These are exactly the linearly independent subsets over which `θ` has
/// strictly positive coordinates. Subsets are index lists in lexicographic order.
pub fn minimal_supports(theta: &[Rational], vectors: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    let dim = theta.len();
    if theta.iter().all(Zero::is_zero) {
        return vec![Vec::new()];
    }
    let nonzero: Vec<usize> = (0..vectors.len())
        .filter(|&i| vectors[i].iter().any(|x| !x.is_zero()))
        .collect();
    let mut out = Vec::new();
    let max_size = rank(vectors, dim);
    for size in 1..=max_size {
        for_each_subset(&nonzero, size, &mut |subset| {
            let cols: Vec<Vec<Rational>> = subset.iter().map(|&i| vectors[i].clone()).collect();
            if rank(&cols, dim) == size {
                if let Some(x) = solve(&cols, theta) {
                    if x.iter().all(|c| c.is_positive()) {
                        out.push(subset.to_vec());
                    }
                }
            }
            false
        });
    }
    out.sort();
    out
}

#[derive(Clone, Debug)]
pub struct Chamber {
    pub cone: RationalCone,
    pub interior_point: Vec<Rational>,
    /// Minimal vector subsets whose cone contains the chamber.
    pub semistable: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Wall {
    pub cone: RationalCone,
    /// Primitive normal inside the span of the support, positive on `chambers.0`.
    pub normal: IntVec,
    pub chambers: (usize, usize),
}

/// Chamber decomposition of a support cone by the hyperplane arrangement of a vector configuration.
#[derive(Clone, Debug)]
pub struct ChamberArrangement {
    pub ambient_dim: usize,
    pub support: RationalCone,
    pub chambers: Vec<Chamber>,
    pub walls: Vec<Wall>,
    pub fan: Fan,
}

impl ChamberArrangement {
    /// Chambers whose closure contains `x`.
    pub fn chambers_containing(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.chambers.len())
            .filter(|&i| self.chambers[i].cone.contains(x))
            .collect()
    }

    /// The chamber whose relative interior contains `x`, if any.
    pub fn chamber_with_interior(&self, x: &[Rational]) -> Option<usize> {
        (0..self.chambers.len()).find(|&i| self.chambers[i].cone.in_relative_interior(x))
    }

    pub fn neighbours(&self, i: usize) -> Vec<(usize, usize)> {
        self.walls
            .iter()
            .enumerate()
            .filter_map(|(w, wall)| {
                if wall.chambers.0 == i {
                    Some((w, wall.chambers.1))
                } else if wall.chambers.1 == i {
                    Some((w, wall.chambers.0))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Checks that chamber facets not on the support boundary are each shared
    /// by exactly two chambers, so the chambers cover the support.
    pub fn check_covering(&self) -> std::result::Result<(), String> {
        let span_dim = self.support.dim();
        for (i, ch) in self.chambers.iter().enumerate() {
            for f in ch.cone.faces() {
                if f.dim() + 1 != span_dim {
                    continue;
                }
                let on_boundary = self.support.facets().iter().any(|s| {
                    f.generators().iter().all(|g| dot_int(s, g).is_zero())
                });
                let sharing = self
                    .chambers
                    .iter()
                    .filter(|c| c.cone.faces().contains(&f))
                    .count();
                let expected = if on_boundary { 1 } else { 2 };
                if sharing != expected {
                    return Err(format!(
                        "facet of chamber {i} lies in {sharing} chambers, expected {expected}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Normals (inside the span of `support`) of hyperplanes spanned by
/// `(s-1)`-subsets of `vectors`, where `s` is the dimension of the span.
fn candidate_hyperplanes(dim: usize, vectors: &[IntVec], support: &RationalCone) -> Vec<Hyperplane> {
    let s = support.dim();
    let perp: Vec<Vec<Rational>> = support.equations().iter().map(|e| to_rational(e)).collect();
    let idx: Vec<usize> = (0..vectors.len())
        .filter(|&i| vectors[i].iter().any(|x| !x.is_zero()))
        .collect();
    let mut out = std::collections::BTreeSet::new();
    if s == 0 {
        return Vec::new();
    }
    for_each_subset(&idx, s - 1, &mut |subset| {
        let rows: Vec<IntVec> = subset.iter().map(|&i| vectors[i].clone()).collect();
        if rank_int(&rows, dim) != s - 1 {
            return false;
        }
        for n in nullspace_int(&rows, dim) {
            let p = project_off(&to_rational(&n), &perp);
            if p.iter().any(|x| !x.is_zero()) {
                out.insert(Hyperplane::new(&primitive_integer(&p)).expect("nonzero"));
                break;
            }
        }
        false
    });
    out.into_iter().collect()
}

/// Refines `support` by the hyperplanes spanned by the vectors, then merges
/// cells carrying identical semistable data into chambers.
pub fn chamber_arrangement(vectors: &[IntVec], support: &RationalCone) -> Result<ChamberArrangement> {
    if vectors.is_empty() {
        return Err(Error::InvalidInput("empty vector list".into()));
    }
    let dim = support.ambient_dim();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch("vector length differs from the support".into()));
    }
    if support.is_zero() {
        return Err(Error::Degenerate("support cone is the origin".into()));
    }
    let hyperplanes = candidate_hyperplanes(dim, vectors, support);

    let mut cells = vec![support.clone()];
    for h in &hyperplanes {
        let mut next = Vec::new();
        for c in cells {
            let values: Vec<_> = c.generators().iter().map(|g| dot_int(h.normal(), g)).collect();
            let pos = values.iter().any(|v| v.is_positive());
            let neg = values.iter().any(|v| v.is_negative());
            if pos && neg {
                let minus: IntVec = h.normal().iter().map(|x| -x).collect();
                for f in [h.normal.clone(), minus] {
                    let mut ineq = c.facets().to_vec();
                    ineq.push(f);
                    next.push(RationalCone::from_inequalities(dim, &ineq, c.equations())?);
                }
            } else {
                next.push(c);
            }
        }
        cells = next;
    }

    let qvecs: Vec<Vec<Rational>> = vectors.iter().map(|v| to_rational(v)).collect();
    let mut groups: BTreeMap<Vec<Vec<usize>>, Vec<RationalCone>> = BTreeMap::new();
    for c in cells {
        let p = c.relative_interior_point()?;
        groups.entry(minimal_supports(&p, &qvecs)).or_default().push(c);
    }
    let mut chambers: Vec<Chamber> = Vec::new();
    for (semistable, cs) in groups {
        let gens: Vec<IntVec> = cs.iter().flat_map(|c| c.generators()).collect();
        let cone = RationalCone::from_generators(dim, &gens)?;
        let interior_point = cone.relative_interior_point()?;
        chambers.push(Chamber {
            cone,
            interior_point,
            semistable,
        });
    }
    chambers.sort_by_cached_key(|c| c.cone.key());

    let span_dim = support.dim();
    let perp: Vec<Vec<Rational>> = support.equations().iter().map(|e| to_rational(e)).collect();
    let mut walls = Vec::new();
    for i in 0..chambers.len() {
        for j in i + 1..chambers.len() {
            let meet = chambers[i].cone.intersection(&chambers[j].cone);
            if meet.dim() + 1 != span_dim {
                continue;
            }
            let normal = meet
                .equations()
                .iter()
                .map(|e| project_off(&to_rational(e), &perp))
                .find(|p| p.iter().any(|x| !x.is_zero()))
                .map(|p| primitive_integer(&p))
                .ok_or_else(|| Error::Internal("wall without a normal".into()))?;
            let normal = if dot_mixed(&normal, &chambers[i].interior_point).is_negative() {
                normal.iter().map(|x| -x).collect()
            } else {
                normal
            };
            walls.push(Wall {
                cone: meet,
                normal,
                chambers: (i, j),
            });
        }
    }
    let maximal: Vec<RationalCone> = chambers.iter().map(|c| c.cone.clone()).collect();
    let fan = Fan::from_maximal(dim, &maximal);
    Ok(ChamberArrangement {
        ambient_dim: dim,
        support: support.clone(),
        chambers,
        walls,
        fan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_vec;
    use crate::lattice::rational::q;

    fn arrangement(vs: &[&[i64]]) -> ChamberArrangement {
        let v: Vec<IntVec> = vs.iter().map(|x| int_vec(x)).collect();
        let support = RationalCone::from_generators(v[0].len(), &v).unwrap();
        chamber_arrangement(&v, &support).unwrap()
    }

    #[test]
    fn standard_example_line() {
        let a = arrangement(&[&[1], &[1], &[1], &[1], &[1], &[1], &[-3]]);
        assert_eq!(a.chambers.len(), 2);
        assert_eq!(a.walls.len(), 1);
        assert_eq!(a.fan.cones().len(), 3);
        assert!(a.walls[0].cone.is_zero());
        a.fan.check_axioms().unwrap();
        a.check_covering().unwrap();
        let neg = a.chamber_with_interior(&[q(-1)]).unwrap();
        assert_eq!(a.chambers[neg].semistable, vec![vec![6]]);
    }

    #[test]
    fn p1xp1_with_bundle() {
        let a = arrangement(&[&[1, 0], &[1, 0], &[0, 1], &[0, 1], &[-1, -1]]);
        assert_eq!(a.chambers.len(), 3);
        assert_eq!(a.walls.len(), 3);
        a.fan.check_axioms().unwrap();
        a.check_covering().unwrap();
        let geo = a.chamber_with_interior(&[q(1), q(1)]).unwrap();
        assert_eq!(
            a.chambers[geo].cone,
            RationalCone::from_generators(2, &[int_vec(&[1, 0]), int_vec(&[0, 1])]).unwrap()
        );
        assert_eq!(a.chambers[geo].semistable.len(), 4);
    }

    #[test]
    fn single_vector() {
        let a = arrangement(&[&[1]]);
        assert_eq!(a.chambers.len(), 1);
        assert!(a.walls.is_empty());
    }

    #[test]
    fn lower_dimensional_support() {
        let a = arrangement(&[&[1, 1, 0], &[2, 2, 0], &[-1, -1, 0]]);
        assert_eq!(a.chambers.len(), 2);
        assert_eq!(a.walls.len(), 1);
        a.check_covering().unwrap();
    }

    #[test]
    fn supports_of_a_point() {
        let v = vec![vec![q(1)], vec![q(1)], vec![q(-2)]];
        assert_eq!(minimal_supports(&[q(3)], &v), vec![vec![0], vec![1]]);
        assert_eq!(minimal_supports(&[q(0)], &v), vec![Vec::<usize>::new()]);
    }
}
