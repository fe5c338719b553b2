//! Field abstraction shared by the exact (rational) and floating code paths.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// A field the Laplacian machinery can run over.
///
/// `BigRational` gives exact answers; `f64` is the fast path used by
/// the dynamics and optimization code.
pub trait Scalar: Clone + Debug + PartialEq + Num + Signed {
    /// Determinant of a square matrix given as rows.
    fn determinant(rows: Vec<Vec<Self>>) -> Self;

    fn to_f64(&self) -> f64;
}

impl Scalar for BigRational {
    fn determinant(rows: Vec<Vec<Self>>) -> Self {
        let mut scale = BigInt::one();
        let ints = rows
            .into_iter()
            .map(|row| {
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let out = row
                    .iter()
                    .map(|x| x.numer() * (&lcm / x.denom()))
                    .collect::<Vec<_>>();
                scale *= lcm;
                out
            })
            .collect();
        BigRational::new(bareiss_determinant(ints), scale)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn determinant(rows: Vec<Vec<Self>>) -> Self {
        lu_determinant(rows)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Fraction-free (Bareiss) elimination; every division is exact.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

fn lu_determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs()))
            .unwrap();
        if m[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k + 1..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}
