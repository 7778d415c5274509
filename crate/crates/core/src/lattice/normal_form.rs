//! Smith and Hermite normal forms over the integers, and the kernel and
//! cokernel computations built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::group::FinAbGroup;
use super::matrix::IntMatrix;

/// `U·A·V = S` with `U`, `V` unimodular and `S` diagonal with a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries of `S` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s[(i, i)].clone()).collect()
    }

    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Pivot search: smallest nonzero magnitude in the trailing block, ties broken
/// lexicographically by (row, col).
fn find_pivot(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let v = &s[(i, j)];
            if v.is_zero() {
                continue;
            }
            let a = v.abs();
            match &best {
                Some((_, _, b)) if &a >= b => {}
                _ => best = Some((i, j, a)),
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let m = a.rows();
    let n = a.cols();
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = find_pivot(&s, t) else {
                return SmithDecomposition { u, s, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&s[(i, t)] / &s[(t, t)]);
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&s[(t, j)] / &s[(t, t)]);
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: pivot must divide the whole trailing block
            let mut offender = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !s[(i, j)].is_multiple_of(&s[(t, t)]) {
                        offender = Some(i);
                        break 'outer;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { u, s, v }
}

/// Row-style Hermite normal form: returns `H = T·A` in echelon form with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
/// Zero rows are kept at the bottom.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let m = h.rows();
    let n = h.cols();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            // smallest nonzero entry in column c among rows r..
            let mut best: Option<(usize, BigInt)> = None;
            for i in r..m {
                let v = &h[(i, c)];
                if v.is_zero() {
                    continue;
                }
                let a = v.abs();
                match &best {
                    Some((_, b)) if &a >= b => {}
                    _ => best = Some((i, a)),
                }
            }
            let Some((p, _)) = best else { break };
            h.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = -(&h[(i, c)] / &h[(r, c)]);
                h.add_row_multiple(i, r, &q);
                if !h[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
        }
        for i in 0..r {
            let q = h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                h.add_row_multiple(i, r, &(-q));
            }
        }
        r += 1;
    }
    h
}

/// Canonical basis of the lattice spanned by `vectors` (Hermite form, zero rows dropped).
pub fn canonical_lattice_basis(dim: usize, vectors: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let h = hermite_normal_form(&IntMatrix::from_rows(dim, vectors));
    h.row_vecs()
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect()
}

/// Saturated basis of the integer kernel of `a`, returned as the columns of a
/// `cols(a) × k` matrix. The basis is normalised by Hermite form so repeated
/// calls agree.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let n = a.cols();
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    let vecs: Vec<Vec<BigInt>> = (rank..n).map(|j| snf.v.col(j)).collect();
    let basis = canonical_lattice_basis(n, &vecs);
    IntMatrix::from_cols(n, &basis)
}

/// The cokernel `Z^rows / A·Z^cols`.
pub fn cokernel(a: &IntMatrix) -> FinAbGroup {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let invariant_factors = diag
        .into_iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .collect();
    FinAbGroup::new(a.rows() - rank, invariant_factors)
        .expect("Smith diagonal always forms a divisibility chain")
}

/// An integer solution of `A·x = b`, if one exists.
pub fn solve_integral(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    if a.cols() == 0 {
        return b.iter().all(Zero::is_zero).then(Vec::new);
    }
    if a.rows() == 0 {
        return Some(vec![BigInt::zero(); a.cols()]);
    }
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, v) in ub.iter().enumerate() {
        match diag.get(i) {
            Some(d) if !d.is_zero() => {
                if !v.is_multiple_of(d) {
                    return None;
                }
                y[i] = v / d;
            }
            _ => {
                if !v.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(snf.v.mul_vec(&y))
}
