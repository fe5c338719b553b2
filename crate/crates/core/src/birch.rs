//! Birch point: the unique positive steady state in `(c0 + S) ∩ R^s_{>0}`.
//!
//! Computed as the minimizer of
//! `g(c) = Σ c_i log(c_i / ĉ_i) - c_i + ĉ_i` over `c0 + S`, where `ĉ` is any
//! positive complex-balancing steady state. Stationarity means
//! `log(c / ĉ) ⊥ S`, which together with `c ∈ c0 + S` characterizes `c*`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::balancing::{particular_steady_state, STEADY_STATE_TOL};
use crate::error::{Error, Result};
use crate::network::ReactionNetwork;
use crate::rates::{laplacian, RateAssignment};

#[derive(Debug, Clone, PartialEq)]
pub struct BirchConfig {
    pub max_iterations: usize,
    /// Stop when the gradient in S-coordinates is at most this.
    pub gradient_tol: f64,
    /// Every residual of the result must be at most this.
    pub residual_tol: f64,
    /// Tolerance passed to the particular steady-state solve and to floating
    /// balancing decisions.
    pub balance_tol: f64,
}

impl Default for BirchConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-10,
            residual_tol: 1e-8,
            balance_tol: STEADY_STATE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BirchResiduals {
    /// `‖(c* - c0)` off `S‖`, relative to `max(1, ‖c0‖)`.
    pub affine: f64,
    /// `‖projection of log(c*/ĉ) onto S‖`.
    pub orthogonality: f64,
    /// `max |Ψ(c*)·A_κ|`, relative to `max(1, max Ψ · max |A|)`.
    pub steady: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BirchPoint {
    pub c_star: Vec<f64>,
    pub residuals: BirchResiduals,
    pub iterations: usize,
    /// Objective value after each accepted step, starting with `g(c0)`.
    pub objective_trace: Vec<f64>,
}

/// Transformed entropy `E(c) = Σ c_i log c_i - c_i log c*_i - c_i + c*_i`,
/// continuous at the boundary (`0 · log 0 = 0`).
pub fn transformed_entropy(c: &[f64], c_star: &[f64]) -> Result<f64> {
    if c.len() != c_star.len() {
        return Err(Error::LengthMismatch {
            expected: c_star.len(),
            got: c.len(),
        });
    }
    if c.iter().any(|&x| x < 0.0) || c_star.iter().any(|&x| x <= 0.0) {
        return Err(Error::NegativeConcentration);
    }
    Ok(c.iter()
        .zip(c_star)
        .map(|(&x, &xs)| {
            let xlogx = if x == 0.0 { 0.0 } else { x * (x / xs).ln() };
            xlogx - x + xs
        })
        .sum())
}

/// Orthonormal basis of the stoichiometric subspace as columns (`s × σ`).
pub fn orthonormal_stoichiometric_basis(net: &ReactionNetwork) -> DMatrix<f64> {
    let basis = net.stoichiometric_subspace().basis;
    let s = net.s();
    if basis.is_empty() {
        return DMatrix::zeros(s, 0);
    }
    let m = DMatrix::from_fn(s, basis.len(), |r, c| basis[c][r] as f64);
    m.qr().q()
}

fn objective(c: &DVector<f64>, c_hat: &DVector<f64>) -> f64 {
    c.iter()
        .zip(c_hat.iter())
        .map(|(&x, &h)| x * (x / h).ln() - x + h)
        .sum()
}

fn log_ratio(c: &DVector<f64>, c_hat: &DVector<f64>) -> DVector<f64> {
    c.zip_map(c_hat, |x, h| (x / h).ln())
}

fn steady_residual(net: &ReactionNetwork, rates: &RateAssignment, c: &[f64]) -> Result<f64> {
    let a = laplacian(net, &rates.float_values())?;
    let psi: Vec<f64> = net.complexes().iter().map(|y| y.monomial(c)).collect();
    let n = net.n();
    let worst = (0..n)
        .map(|j| (0..n).map(|i| psi[i] * a[i][j]).sum::<f64>().abs())
        .fold(0.0, f64::max);
    let amax = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let pmax = psi.iter().fold(0.0f64, |m, x| m.max(*x));
    Ok(worst / (amax * pmax).max(1.0))
}

pub fn birch_point(
    net: &ReactionNetwork,
    rates: &RateAssignment,
    c0: &[f64],
    config: &BirchConfig,
) -> Result<BirchPoint> {
    if c0.len() != net.s() {
        return Err(Error::LengthMismatch {
            expected: net.s(),
            got: c0.len(),
        });
    }
    if c0.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::NonPositiveInitial);
    }
    let c_hat = DVector::from_vec(particular_steady_state(net, rates, config.balance_tol)?);
    let q = orthonormal_stoichiometric_basis(net);
    let c0v = DVector::from_column_slice(c0);

    let mut c = c0v.clone();
    let mut g = objective(&c, &c_hat);
    let mut trace = vec![g];
    let mut iterations = 0;
    let mut grad = q.transpose() * log_ratio(&c, &c_hat);

    while grad.norm() > config.gradient_tol {
        if iterations == config.max_iterations {
            return Err(Error::MaxIterations {
                iterations,
                gradient_norm: grad.norm(),
                best: c.iter().copied().collect(),
            });
        }
        let inv_c = c.map(|x| 1.0 / x);
        let hess = q.transpose() * DMatrix::from_diagonal(&inv_c) * &q;
        let newton = hess
            .cholesky()
            .map(|ch| ch.solve(&(-&grad)))
            .unwrap_or_else(|| -&grad);

        let mut accepted = None;
        for dir in [newton, -&grad] {
            let slope = grad.dot(&dir);
            let step = &q * &dir;
            let mut alpha = 1.0;
            while alpha > 1e-30 {
                let trial = &c + alpha * &step;
                if trial.iter().all(|&x| x > 0.0) {
                    let gt = objective(&trial, &c_hat);
                    if gt <= g + 1e-4 * alpha * slope + 1e-15 * g.abs().max(1.0) {
                        accepted = Some((trial, gt));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if accepted.is_some() {
                break;
            }
        }
        let Some((next, gn)) = accepted else {
            return Err(Error::MaxIterations {
                iterations,
                gradient_norm: grad.norm(),
                best: c.iter().copied().collect(),
            });
        };
        c = next;
        g = gn;
        trace.push(g);
        iterations += 1;
        grad = q.transpose() * log_ratio(&c, &c_hat);
    }

    let c_star: Vec<f64> = c.iter().copied().collect();
    let diff = &c - &c0v;
    let off_s = &diff - &q * (q.transpose() * &diff);
    let residuals = BirchResiduals {
        affine: off_s.norm() / c0v.norm().max(1.0),
        orthogonality: grad.norm(),
        steady: steady_residual(net, rates, &c_star)?,
    };
    if residuals.steady > config.residual_tol || residuals.affine > config.residual_tol {
        return Err(Error::NotComplexBalancing {
            residual: residuals.steady.max(residuals.affine),
        });
    }
    Ok(BirchPoint {
        c_star,
        residuals,
        iterations,
        objective_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_network;

    const TRIANGLE: &str = "2 c1 <-> c1 + c2\n2 c1 <-> 2 c2\nc1 + c2 <-> 2 c2\n";

    #[test]
    fn entropy_values() {
        assert_eq!(transformed_entropy(&[1.5, 2.0], &[1.5, 2.0]).unwrap(), 0.0);
        assert!((transformed_entropy(&[0.0, 0.0], &[1.5, 2.0]).unwrap() - 3.5).abs() < 1e-15);
        let e = transformed_entropy(&[2.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!((e - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!((e - 0.386294).abs() < 1e-6);
        assert_eq!(
            transformed_entropy(&[-1.0, 1.0], &[1.0, 1.0]),
            Err(Error::NegativeConcentration)
        );
    }

    #[test]
    fn triangle_birch_point_from_asymmetric_start() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let r = RateAssignment::uniform(&net, 1);
        let bp = birch_point(&net, &r, &[2.0, 0.5], &BirchConfig::default()).unwrap();
        assert!((bp.c_star[0] - 1.25).abs() < 1e-10);
        assert!((bp.c_star[1] - 1.25).abs() < 1e-10);
    }

    #[test]
    fn fixed_point_needs_no_steps() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let r = RateAssignment::uniform(&net, 1);
        let bp = birch_point(&net, &r, &[0.7, 0.7], &BirchConfig::default()).unwrap();
        assert_eq!(bp.iterations, 0);
        assert_eq!(bp.c_star, vec![0.7, 0.7]);
    }

    #[test]
    fn rejects_non_positive_start() {
        let net = parse_network(TRIANGLE).unwrap().network;
        let r = RateAssignment::uniform(&net, 1);
        assert_eq!(
            birch_point(&net, &r, &[0.0, 1.0], &BirchConfig::default()),
            Err(Error::NonPositiveInitial)
        );
    }
}
