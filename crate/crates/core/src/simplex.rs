//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Sized for certificate problems with a handful of variables and
//! constraints; no attempt is made at sparsity or numerical pivoting.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<BigRational>, value: BigRational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    /// Reduced costs, with `-objective` in the last slot.
    obj: Vec<BigRational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for x in self.rows[r].iter_mut() {
            *x = &*x / &p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<BigRational>| {
            let f = row[col].clone();
            if !f.is_zero() {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * p;
                }
            }
        };
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = col;
    }

    /// Runs simplex iterations over the columns in `allowed`. Returns `false`
    /// when the objective is unbounded below.
    fn optimize(&mut self, allowed: usize) -> bool {
        let rhs = self.width();
        loop {
            let Some(col) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[col].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[col];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }
}

/// Minimizes `objective · x` subject to `constraints` and `x >= 0`.
pub fn minimize(num_vars: usize, constraints: &[Constraint], objective: &[BigRational]) -> LpOutcome {
    assert_eq!(objective.len(), num_vars, "objective length");
    let zero = BigRational::zero;
    let one = BigRational::one;

    // Flip rows so every right-hand side is non-negative.
    let rows: Vec<(Vec<BigRational>, Relation, BigRational)> = constraints
        .iter()
        .map(|c| {
            assert_eq!(c.coeffs.len(), num_vars, "constraint length");
            if c.rhs.is_negative() {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|x| -x).collect(), rel, -&c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs.clone())
            }
        })
        .collect();

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let first_art = num_vars + n_slack;
    let width = first_art + n_art;

    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        obj: vec![zero(); width + 1],
        basis: Vec::with_capacity(m),
    };
    let (mut slack, mut art) = (num_vars, first_art);
    for (coeffs, rel, rhs) in &rows {
        let mut row = vec![zero(); width + 1];
        row[..num_vars].clone_from_slice(coeffs);
        row[width] = rhs.clone();
        match rel {
            Relation::Le => {
                row[slack] = one();
                tab.basis.push(slack);
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -one();
                slack += 1;
                row[art] = one();
                tab.basis.push(art);
                art += 1;
            }
            Relation::Eq => {
                row[art] = one();
                tab.basis.push(art);
                art += 1;
            }
        }
        tab.rows.push(row);
    }

    // Phase 1: minimize the sum of artificials.
    for j in first_art..width {
        tab.obj[j] = one();
    }
    for r in 0..m {
        if tab.basis[r] >= first_art {
            for j in 0..=width {
                let v = &tab.obj[j] - &tab.rows[r][j];
                tab.obj[j] = v;
            }
        }
    }
    tab.optimize(width);
    if !tab.obj[width].is_zero() {
        return LpOutcome::Infeasible;
    }

    // Drive remaining (zero-valued) artificials out of the basis; rows where
    // that is impossible are redundant.
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= first_art {
            if let Some(col) = (0..first_art).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, col);
            } else {
                tab.rows.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase 2 on the original objective, artificial columns excluded.
    let mut obj = vec![zero(); width + 1];
    obj[..num_vars].clone_from_slice(objective);
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < num_vars && !objective[b].is_zero() {
            for j in 0..=width {
                obj[j] = &obj[j] - &objective[b] * &tab.rows[r][j];
            }
        }
    }
    tab.obj = obj;
    if !tab.optimize(first_art) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![zero(); num_vars];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < num_vars {
            x[b] = tab.rows[r][width].clone();
        }
    }
    LpOutcome::Optimal {
        value: -tab.obj[width].clone(),
        x,
    }
}
