//! Saturated integer kernels via unimodular column reduction (Hermite-style).
//!
//! [`crate::exact::integer_kernel`] returns primitive vectors that may span a
//! proper sublattice of `ker_Z`. The routines here compute a genuine
//! `Z`-basis of `ker(A) ∩ Z^n`, which is used to cross-check decisions made
//! on the sublattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::{nullspace, rref};

/// `Z`-basis of the full integer kernel of `rows` (an `m × cols` matrix).
pub fn saturated_kernel(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    // columns of `u` track the unimodular transform: a_original · u = a
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();

    let swap_cols = |m: &mut Vec<Vec<BigInt>>, x: usize, y: usize| {
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };
    let axpy_col = |m: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let v = &row[src] * q;
            row[dst] -= v;
        }
    };

    let mut p = 0;
    for r in 0..a.len() {
        if p == cols {
            break;
        }
        loop {
            let best = (p..cols)
                .filter(|&c| !a[r][c].is_zero())
                .min_by_key(|&c| a[r][c].abs());
            let Some(best) = best else { break };
            swap_cols(&mut a, p, best);
            swap_cols(&mut u, p, best);
            let mut done = true;
            for c in p + 1..cols {
                if a[r][c].is_zero() {
                    continue;
                }
                let q = a[r][c].div_floor(&a[r][p]);
                axpy_col(&mut a, c, p, &q);
                axpy_col(&mut u, c, p, &q);
                if !a[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                p += 1;
                break;
            }
        }
    }
    (p..cols)
        .map(|c| (0..cols).map(|i| u[i][c].clone()).collect())
        .collect()
}

/// Rational coordinates of `v` in the span of `basis`, or `None` if `v` is
/// outside the span.
pub fn coordinates(basis: &[Vec<BigInt>], v: &[BigInt]) -> Option<Vec<BigRational>> {
    let k = basis.len();
    let n = v.len();
    // Solve basis^T x = v through the kernel of [basis^T | -v].
    let rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = basis
                .iter()
                .map(|b| BigRational::from_integer(b[i].clone()))
                .collect();
            row.push(BigRational::from_integer(-v[i].clone()));
            row
        })
        .collect();
    if rref(rows.clone(), k + 1).pivots.contains(&k) {
        return None;
    }
    nullspace(rows, k + 1)
        .into_iter()
        .find(|w| !w[k].is_zero())
        .map(|w| {
            let s = w[k].clone();
            w[..k].iter().map(|x| x / &s).collect()
        })
}

/// Whether `v` is an integer combination of `basis`.
pub fn contains(basis: &[Vec<BigInt>], v: &[BigInt]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    coordinates(basis, v).is_some_and(|c| c.iter().all(|x| x.is_integer()))
}
