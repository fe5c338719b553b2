//! Rate constants and the (negative) Laplacian `A_κ`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::network::ReactionNetwork;
use crate::scalar::Scalar;

/// A single rate constant. The kind is tracked so exact decision procedures
/// know whether they may run.
#[derive(Debug, Clone, PartialEq)]
pub enum Rate {
    Exact(BigRational),
    Float(f64),
}

impl Rate {
    pub fn to_f64(&self) -> f64 {
        match self {
            Rate::Exact(q) => Scalar::to_f64(q),
            Rate::Float(x) => *x,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Rate::Exact(q) => q.is_positive(),
            Rate::Float(x) => *x > 0.0 && x.is_finite(),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Exact(q) => write!(f, "{q}"),
            Rate::Float(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for Rate {
    type Err = ();

    /// Integers, `p/q`, decimals and scientific notation all parse to exact
    /// rationals (a decimal literal is an exact rational number).
    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        parse_rational(s).map(Rate::Exact).ok_or(())
    }
}

pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(&all).ok()?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        BigRational::from_integer(num * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(num, Pow::pow(&ten, (-scale) as u32))
    };
    Some(q)
}

/// One positive rate per edge of the network, aligned with
/// [`ReactionNetwork::edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct RateAssignment {
    values: Vec<Rate>,
}

impl RateAssignment {
    pub fn new(net: &ReactionNetwork, values: Vec<Rate>) -> Result<Self> {
        if values.len() != net.edges().len() {
            return Err(Error::RateDomainMismatch {
                expected: net.edges().len(),
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|r| !r.is_positive()) {
            return Err(Error::NonPositiveRate {
                line: 0,
                value: bad.to_string(),
            });
        }
        Ok(Self { values })
    }

    pub fn exact(net: &ReactionNetwork, values: Vec<BigRational>) -> Result<Self> {
        Self::new(net, values.into_iter().map(Rate::Exact).collect())
    }

    pub fn floats(net: &ReactionNetwork, values: Vec<f64>) -> Result<Self> {
        Self::new(net, values.into_iter().map(Rate::Float).collect())
    }

    pub fn uniform(net: &ReactionNetwork, value: i64) -> Self {
        Self {
            values: vec![Rate::Exact(BigRational::from_integer(value.into())); net.edges().len()],
        }
    }

    pub fn values(&self) -> &[Rate] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(|r| matches!(r, Rate::Exact(_)))
    }

    pub fn exact_values(&self) -> Option<Vec<BigRational>> {
        self.values
            .iter()
            .map(|r| match r {
                Rate::Exact(q) => Some(q.clone()),
                Rate::Float(_) => None,
            })
            .collect()
    }

    pub fn float_values(&self) -> Vec<f64> {
        self.values.iter().map(Rate::to_f64).collect()
    }

    pub fn set(&mut self, edge: usize, rate: Rate) -> Result<()> {
        if !rate.is_positive() {
            return Err(Error::NonPositiveRate {
                line: 0,
                value: rate.to_string(),
            });
        }
        self.values[edge] = rate;
        Ok(())
    }
}

pub(crate) fn check_domain<T>(net: &ReactionNetwork, rates: &[T]) -> Result<()> {
    if rates.len() != net.edges().len() {
        return Err(Error::RateDomainMismatch {
            expected: net.edges().len(),
            got: rates.len(),
        });
    }
    Ok(())
}

/// `A_κ`: off-diagonal `(i, j)` is `κ_ij` on edges, rows sum to zero.
pub fn laplacian<T: Scalar>(net: &ReactionNetwork, rates: &[T]) -> Result<Vec<Vec<T>>> {
    check_domain(net, rates)?;
    let n = net.n();
    let mut a = vec![vec![T::zero(); n]; n];
    for (e, k) in net.edges().iter().zip(rates) {
        a[e.source][e.target] = a[e.source][e.target].clone() + k.clone();
        a[e.source][e.source] = a[e.source][e.source].clone() - k.clone();
    }
    Ok(a)
}
