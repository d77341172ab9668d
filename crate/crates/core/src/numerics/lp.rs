//! Exact two-phase simplex for standard-form LPs, Bland's anti-cycling rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::RatMat;
use super::NumericsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<BigRational>, value: BigRational },
    /// Feasible point plus a direction d ≥ 0, Ad = 0 along which the objective improves.
    Unbounded { x: Vec<BigRational>, ray: Vec<BigRational> },
    Infeasible,
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let inv = BigRational::one() / self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        self.rhs[r] = self.rhs[r].clone() * inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (v, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v = v.clone() - f.clone() * p.clone();
                }
            }
            self.rhs[i] = self.rhs[i].clone() - f * prhs.clone();
        }
        self.basis[r] = col;
    }

    /// Maximize cost·x over the columns allowed by `allowed`.
    fn run(&mut self, cost: &[BigRational], allowed: &dyn Fn(usize) -> bool) -> Phase {
        let ncols = cost.len();
        loop {
            // reduced costs r_j = c_j − c_Bᵀ T_j; Bland: first improving column
            let entering = (0..ncols).filter(|&j| allowed(j) && !self.basis.contains(&j)).find(|&j| {
                let mut r = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !cost[bi].is_zero() && !self.rows[i][j].is_zero() {
                        r -= cost[bi].clone() * self.rows[i][j].clone();
                    }
                }
                r.is_positive()
            });
            let Some(col) = entering else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Phase::Unbounded(col),
                Some((r, _)) => self.pivot(r, col),
            }
        }
    }

    fn point(&self, n: usize) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); n];
        for (i, &bi) in self.basis.iter().enumerate() {
            if bi < n {
                x[bi] = self.rhs[i].clone();
            }
        }
        x
    }
}

/// Solve `opt cᵀx s.t. Ax = b, x ≥ 0` exactly.
pub fn rational_lp(
    c: &[BigRational],
    a: &RatMat,
    b: &[BigRational],
    sense: Sense,
) -> Result<LpOutcome, NumericsError> {
    let (m, n) = a.shape();
    if c.len() != n || b.len() != m {
        return Err(NumericsError::Shape(format!(
            "LP with A {m}x{n}, c of length {}, b of length {}",
            c.len(),
            b.len()
        )));
    }
    let cost: Vec<BigRational> = match sense {
        Sense::Max => c.to_vec(),
        Sense::Min => c.iter().map(|v| -v.clone()).collect(),
    };

    // phase 1: artificial column per row, rows sign-normalized so b ≥ 0
    let total = n + m;
    let mut tab = Tableau { rows: Vec::with_capacity(m), rhs: Vec::with_capacity(m), basis: (n..total).collect() };
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<BigRational> =
            (0..n).map(|j| if flip { -a[(i, j)].clone() } else { a[(i, j)].clone() }).collect();
        row.extend((0..m).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
        tab.rows.push(row);
        tab.rhs.push(if flip { -b[i].clone() } else { b[i].clone() });
    }
    let mut phase1 = vec![BigRational::zero(); total];
    for v in &mut phase1[n..] {
        *v = -BigRational::one();
    }
    if let Phase::Unbounded(_) = tab.run(&phase1, &|_| true) {
        unreachable!("phase-one objective is bounded by zero");
    }
    let infeas: BigRational = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bi)| bi >= n)
        .map(|(i, _)| tab.rhs[i].clone())
        .sum();
    if infeas.is_positive() {
        return Ok(LpOutcome::Infeasible);
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.rows.remove(i);
                    tab.rhs.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut cost2 = cost.clone();
    cost2.resize(total, BigRational::zero());
    match tab.run(&cost2, &|j| j < n) {
        Phase::Optimal => {
            let x = tab.point(n);
            let value: BigRational = x.iter().zip(c).map(|(xi, ci)| xi.clone() * ci.clone()).sum();
            Ok(LpOutcome::Optimal { x, value })
        }
        Phase::Unbounded(col) => {
            let x = tab.point(n);
            let mut ray = vec![BigRational::zero(); n];
            ray[col] = BigRational::one();
            for (r, &bi) in tab.basis.iter().enumerate() {
                if bi < n {
                    ray[bi] = -tab.rows[r][col].clone();
                }
            }
            Ok(LpOutcome::Unbounded { x, ray })
        }
    }
}
