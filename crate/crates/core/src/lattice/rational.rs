//! Exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Pairing of an integer covector with a rational vector.
pub fn dot_mixed(a: &[BigInt], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + y * x)
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * s).collect()
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Clears denominators and divides by the gcd. The zero vector maps to itself.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    divide_by_gcd(ints)
}

pub fn divide_by_gcd(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

/// Reduced row echelon form; returns the nonzero rows and pivot columns.
pub fn rref(rows: &[Vec<Rational>], dim: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..dim {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(vectors: &[Vec<Rational>], dim: usize) -> usize {
    rref(vectors, dim).1.len()
}

pub fn rank_int(vectors: &[Vec<BigInt>], dim: usize) -> usize {
    let qs: Vec<Vec<Rational>> = vectors.iter().map(|v| to_rational(v)).collect();
    rank(&qs, dim)
}

/// Basis of `{x : ⟨row, x⟩ = 0 for every row}` as primitive integer vectors,
/// in a canonical (reduced echelon) form.
pub fn nullspace(rows: &[Vec<Rational>], dim: usize) -> Vec<Vec<BigInt>> {
    let (red, pivots) = rref(rows, dim);
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); dim];
            x[f] = Rational::one();
            for (row, &p) in red.iter().zip(&pivots) {
                x[p] = -row[f].clone();
            }
            primitive_integer(&x)
        })
        .collect()
}

pub fn nullspace_int(rows: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    let qs: Vec<Vec<Rational>> = rows.iter().map(|v| to_rational(v)).collect();
    nullspace(&qs, dim)
}

/// Solves `Σ x_j · columns[j] = target`, returning one solution if any exists.
pub fn solve(columns: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let dim = target.len();
    let n = columns.len();
    // augmented matrix rows: dim rows, n+1 columns
    let rows: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            let mut r: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            r.push(target[i].clone());
            r
        })
        .collect();
    let (red, pivots) = rref(&rows, n + 1);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (row, &p) in red.iter().zip(&pivots) {
        x[p] = row[n].clone();
    }
    Some(x)
}

/// Orthogonal projection of `v` onto the orthogonal complement of `span(basis)`.
pub fn project_off(v: &[Rational], basis: &[Vec<Rational>]) -> Vec<Rational> {
    if basis.is_empty() {
        return v.to_vec();
    }
    // Gram system G c = B^T v
    let k = basis.len();
    let gram_cols: Vec<Vec<Rational>> = (0..k)
        .map(|j| (0..k).map(|i| dot(&basis[i], &basis[j])).collect())
        .collect();
    let rhs: Vec<Rational> = basis.iter().map(|b| dot(b, v)).collect();
    let c = solve(&gram_cols, &rhs).expect("Gram matrix of a basis is invertible");
    let mut out = v.to_vec();
    for (cj, b) in c.iter().zip(basis) {
        for (o, bi) in out.iter_mut().zip(b) {
            *o -= cj * bi;
        }
    }
    out
}

pub fn sign(x: &Rational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn solve_two_by_two() {
        let cols = vec![qv(&[2, 1]), qv(&[1, 2])];
        let x = solve(&cols, &qv(&[1, 1])).unwrap();
        assert_eq!(x, vec![Rational::new(1.into(), 3.into()); 2]);
        assert!(solve(&[qv(&[1, 0])], &qv(&[0, 1])).is_none());
    }

    #[test]
    fn nullspace_is_orthogonal() {
        let rows = vec![qv(&[1, 1, 1])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot_int(v, &[1.into(), 1.into(), 1.into()]).is_zero());
        }
    }

    #[test]
    fn projection_removes_component() {
        let p = project_off(&qv(&[3, 4]), &[qv(&[1, 0])]);
        assert_eq!(p, qv(&[0, 4]));
    }

    #[test]
    fn primitive_of_rationals() {
        let v = vec![Rational::new(1.into(), 2.into()), Rational::new(3.into(), 4.into())];
        assert_eq!(primitive_integer(&v), vec![BigInt::from(2), BigInt::from(3)]);
    }
}
