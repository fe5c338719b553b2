//! Exact linear algebra over the rationals: echelon forms, rank, kernels.
//!
//! Integer inputs are lifted to `BigRational`, so no result here depends on
//! a tolerance.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<BigRational>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn rational_matrix(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect()
}

pub fn rref(mut rows: Vec<Vec<BigRational>>, cols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..cols {
                    let v = &rows[r][j] * &f;
                    rows[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Echelon { rows, pivots, cols }
}

pub fn rank(rows: &[Vec<i64>], cols: usize) -> usize {
    rref(rational_matrix(rows), cols).rank()
}

/// Basis of the right kernel `{x : M x = 0}`, one vector per free column.
pub fn nullspace(rows: Vec<Vec<BigRational>>, cols: usize) -> Vec<Vec<BigRational>> {
    let ech = rref(rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !ech.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Scales a rational vector to a primitive integer vector (gcd 1) whose
/// first non-zero entry is positive.
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in ints.iter_mut() {
            *x = -&*x;
        }
    }
    ints
}

pub(crate) fn to_i64_vec(v: &[BigInt]) -> Vec<i64> {
    v.iter()
        .map(|x| x.to_i64().expect("lattice entry exceeds i64"))
        .collect()
}

/// Kernel basis of an integer matrix as primitive integer vectors, each with a
/// positive leading entry, sorted lexicographically. The vectors span a
/// finite-index sublattice of the integer kernel.
pub fn integer_kernel(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let mut basis: Vec<Vec<i64>> = nullspace(rational_matrix(rows), cols)
        .iter()
        .map(|v| to_i64_vec(&primitive_integer(v)))
        .collect();
    basis.sort();
    basis
}

/// Primitive integer basis of the row space of `vectors` (each of length `dim`).
pub fn row_space_basis(vectors: &[Vec<i64>], dim: usize) -> Vec<Vec<i64>> {
    rref(rational_matrix(vectors), dim)
        .rows
        .iter()
        .map(|r| to_i64_vec(&primitive_integer(r)))
        .collect()
}

pub fn mat_vec(rows: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    rows.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}
