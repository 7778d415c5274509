//! Intersection numbers on complete simplicial toric stacks.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::stacky::{completeness_and_properness, rays_q, StackyFan};
use crate::error::{Error, Result};
use crate::lattice::rational::{dot, solve, Rational};

/// Polynomial in the toric divisor classes `x_ρ`, keyed by exponent vector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polynomial {
    pub terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn constant(vars: usize, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars], c);
        }
        Polynomial { terms }
    }

    pub fn linear(coefficients: &[Rational]) -> Self {
        let vars = coefficients.len();
        let mut terms = BTreeMap::new();
        for (i, c) in coefficients.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; vars];
                e[i] = 1;
                terms.insert(e, c.clone());
            }
        }
        Polynomial { terms }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Polynomial { terms }
    }

    /// Product with all terms of degree above `max_degree` dropped.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: u32) -> Polynomial {
        let mut out = Polynomial::default();
        for (e1, c1) in &self.terms {
            let d1: u32 = e1.iter().sum();
            for (e2, c2) in &other.terms {
                let d2: u32 = e2.iter().sum();
                if d1 + d2 > max_degree {
                    continue;
                }
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out = out.add(&Polynomial {
                    terms: BTreeMap::from([(e, c1 * c2)]),
                });
            }
        }
        out
    }
}

struct Integrator<'a> {
    sf: &'a StackyFan,
    rays: Vec<Vec<Rational>>,
    memo: HashMap<Vec<u32>, Rational>,
}

impl Integrator<'_> {
    fn cone_containing(&self, support: &[usize]) -> Option<usize> {
        self.sf
            .cones
            .iter()
            .position(|c| support.iter().all(|i| c.contains(i)))
    }

    fn monomial(&mut self, e: &[u32]) -> Rational {
        if let Some(v) = self.memo.get(e) {
            return v.clone();
        }
        let support: Vec<usize> = (0..e.len()).filter(|&i| e[i] > 0).collect();
        let value = match self.cone_containing(&support) {
            None => Rational::zero(),
            Some(ci) => match support.iter().find(|&&i| e[i] > 1) {
                None => {
                    Rational::one() / Rational::from_integer(self.sf.multiplicities[ci].clone())
                }
                Some(&rho) => {
                    // m dual to rho on the cone: <m,u_rho> = 1, <m,u_tau> = 0 for the other rays
                    let cone = self.sf.cones[ci].clone();
                    let d = self.sf.lattice_rank;
                    let cols: Vec<Vec<Rational>> = (0..d)
                        .map(|j| cone.iter().map(|&t| self.rays[t][j].clone()).collect())
                        .collect();
                    let target: Vec<Rational> = cone
                        .iter()
                        .map(|&t| if t == rho { Rational::one() } else { Rational::zero() })
                        .collect();
                    let m = solve(&cols, &target).expect("simplicial maximal cone");
                    let mut total = Rational::zero();
                    for tau in 0..self.rays.len() {
                        if cone.contains(&tau) {
                            continue;
                        }
                        let c = dot(&m, &self.rays[tau]);
                        if c.is_zero() {
                            continue;
                        }
                        let mut e2 = e.to_vec();
                        e2[rho] -= 1;
                        e2[tau] += 1;
                        total -= c * self.monomial(&e2);
                    }
                    total
                }
            },
        };
        self.memo.insert(e.to_vec(), value.clone());
        value
    }
}

/// Degree of the top-dimensional part of `p` on a complete simplicial stacky fan.
pub fn integrate(sf: &StackyFan, p: &Polynomial) -> Result<Rational> {
    let report = completeness_and_properness(sf);
    if !report.complete || !report.simplicial {
        return Err(Error::RankFormulaUnavailable);
    }
    let d = sf.lattice_rank as u32;
    let mut it = Integrator {
        sf,
        rays: rays_q(sf),
        memo: HashMap::new(),
    };
    let mut total = Rational::zero();
    for (e, c) in &p.terms {
        if e.iter().sum::<u32>() == d {
            total += c * it.monomial(e);
        }
    }
    Ok(total)
}

/// Topological Euler characteristic of a complete intersection of the given
/// divisors (coefficients per ray): `∫ c(T) · Π D_i / (1 + D_i)`.
pub fn ci_euler_characteristic(sf: &StackyFan, divisors: &[Vec<Rational>]) -> Result<Rational> {
    let vars = sf.rays.len();
    let d = sf.lattice_rank as u32;
    let one = Polynomial::constant(vars, Rational::one());
    let mut total = one.clone();
    for i in 0..vars {
        let mut e = vec![Rational::zero(); vars];
        e[i] = Rational::one();
        total = total.mul_truncated(&one.add(&Polynomial::linear(&e)), d);
    }
    for div in divisors {
        if div.len() != vars {
            return Err(Error::DimensionMismatch(format!(
                "divisor with {} coefficients on {vars} rays",
                div.len()
            )));
        }
        let dpoly = Polynomial::linear(div);
        let minus: Vec<Rational> = div.iter().map(|x| -x).collect();
        let mpoly = Polynomial::linear(&minus);
        // 1 - D + D^2 - …
        let mut series = one.clone();
        let mut power = one.clone();
        for _ in 0..d {
            power = power.mul_truncated(&mpoly, d);
            series = series.add(&power);
        }
        total = total.mul_truncated(&dpoly.mul_truncated(&series, d), d);
    }
    integrate(sf, &total)
}
