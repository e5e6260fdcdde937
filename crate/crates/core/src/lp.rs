//! Exact rational linear programming.
//!
//! A dense two-phase simplex over arbitrary-precision rationals with the
//! smallest-index (Bland) pivot rule, so it always terminates. Problems are
//! stated in maximisation form with every variable bounded below by zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cube::Vertex;
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// `maximize c.x  s.t.  A x (<=|=|>=) b,  x >= 0`.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    pub senses: Vec<Sense>,
}

impl LpProblem {
    pub fn new(objective: Vec<Rational>) -> Self {
        Self { objective, rows: Vec::new(), rhs: Vec::new(), senses: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraint(mut self, row: Vec<Rational>, sense: Sense, rhs: Rational) -> Self {
        self.add_constraint(row, sense, rhs);
        self
    }

    pub fn add_constraint(&mut self, row: Vec<Rational>, sense: Sense, rhs: Rational) {
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.rows.len() != self.rhs.len() || self.rows.len() != self.senses.len() {
            return Err(Error::MalformedLp(format!(
                "{} rows, {} right-hand sides, {} senses",
                self.rows.len(),
                self.rhs.len(),
                self.senses.len()
            )));
        }
        if let Some((i, r)) = self.rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::MalformedLp(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        Ok(())
    }

    /// Exact residual check of a candidate point.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.rows.iter().zip(&self.rhs).zip(&self.senses).all(|((row, b), s)| {
            let lhs: Rational = row.iter().zip(x).map(|(a, v)| a * v).sum();
            match s {
                Sense::Le => lhs <= *b,
                Sense::Eq => lhs == *b,
                Sense::Ge => lhs >= *b,
            }
        })
    }

    pub fn value_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Present when `status` is optimal.
    pub value: Option<Rational>,
    /// Present when `status` is optimal.
    pub solution: Vec<Rational>,
    pub pivots: usize,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

struct Tableau {
    /// rows x (cols + 1); last entry of a row is its right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.t[i][self.cols]
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let inv = self.t[p][q].recip();
        let nz: Vec<usize> = (0..=self.cols).filter(|&j| !self.t[p][j].is_zero()).collect();
        for &j in &nz {
            self.t[p][j] *= &inv;
        }
        let prow = std::mem::take(&mut self.t[p]);
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == p || row[q].is_zero() {
                continue;
            }
            let f = row[q].clone();
            for &j in &nz {
                row[j] -= &f * &prow[j];
            }
        }
        self.t[p] = prow;
        self.basis[p] = q;
        self.pivots += 1;
    }

    /// Reduced costs `c_j - c_B B^-1 A_j`, with the tableau already in
    /// canonical form for the current basis.
    fn reduced_costs(&self, c: &[Rational]) -> Vec<Rational> {
        let mut r: Vec<Rational> = c.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (j, rj) in r.iter_mut().enumerate() {
                let a = &self.t[i][j];
                if !a.is_zero() {
                    *rj -= cb * a;
                }
            }
        }
        r
    }

    /// Runs Bland's rule to optimality. Returns false when unbounded.
    fn optimize(&mut self, c: &[Rational]) -> bool {
        let mut r = self.reduced_costs(c);
        loop {
            let Some(q) = (0..self.cols).find(|&j| self.allowed[j] && r[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((p, _)) = best else {
                return false;
            };
            self.pivot(p, q);
            // update reduced costs against the new pivot row
            let f = r[q].clone();
            if !f.is_zero() {
                for (j, rj) in r.iter_mut().enumerate() {
                    let a = &self.t[p][j];
                    if !a.is_zero() {
                        *rj -= &f * a;
                    }
                }
            }
        }
    }
}

/// Solves the problem exactly. Anti-cycling follows from Bland's rule.
pub fn simplex_solve(problem: &LpProblem) -> Result<LpOutcome> {
    problem.validate()?;
    let n = problem.num_vars();
    let m = problem.rows.len();

    // normalise to nonnegative right-hand sides
    let mut rows: Vec<Vec<Rational>> = problem.rows.clone();
    let mut rhs = problem.rhs.clone();
    let mut senses = problem.senses.clone();
    for i in 0..m {
        if rhs[i].is_negative() {
            rows[i].iter_mut().for_each(|a| *a = -a.clone());
            rhs[i] = -rhs[i].clone();
            senses[i] = match senses[i] {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    let n_slack = senses.iter().filter(|s| **s != Sense::Eq).count();
    let n_art = senses.iter().filter(|s| **s != Sense::Le).count();
    let cols = n + n_slack + n_art;
    let art_start = n + n_slack;

    let mut t = vec![vec![Rational::zero(); cols + 1]; m];
    let mut basis = vec![0usize; m];
    let (mut s_idx, mut a_idx) = (n, art_start);
    for i in 0..m {
        t[i][..n].clone_from_slice(&rows[i]);
        t[i][cols] = rhs[i].clone();
        match senses[i] {
            Sense::Le => {
                t[i][s_idx] = Rational::one();
                basis[i] = s_idx;
                s_idx += 1;
            }
            Sense::Ge => {
                t[i][s_idx] = -Rational::one();
                s_idx += 1;
                t[i][a_idx] = Rational::one();
                basis[i] = a_idx;
                a_idx += 1;
            }
            Sense::Eq => {
                t[i][a_idx] = Rational::one();
                basis[i] = a_idx;
                a_idx += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, cols, allowed: vec![true; cols], pivots: 0 };

    if n_art > 0 {
        let mut c1 = vec![Rational::zero(); cols];
        c1[art_start..].iter_mut().for_each(|c| *c = -Rational::one());
        // phase one is bounded above by zero
        tab.optimize(&c1);
        let infeas: Rational = (0..m).filter(|&i| tab.basis[i] >= art_start).map(|i| tab.rhs(i).clone()).sum();
        if infeas.is_positive() {
            return Ok(LpOutcome { status: LpStatus::Infeasible, value: None, solution: Vec::new(), pivots: tab.pivots });
        }
        // drive zero-level artificials out of the basis; drop redundant rows
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= art_start {
                if let Some(q) = (0..art_start).find(|&j| !tab.t[i][j].is_zero()) {
                    tab.pivot(i, q);
                    i += 1;
                } else {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }
        tab.allowed[art_start..].iter_mut().for_each(|a| *a = false);
    }

    let mut c2 = vec![Rational::zero(); cols];
    c2[..n].clone_from_slice(&problem.objective);
    if !tab.optimize(&c2) {
        return Ok(LpOutcome { status: LpStatus::Unbounded, value: None, solution: Vec::new(), pivots: tab.pivots });
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(i).clone();
        }
    }
    let value = problem.value_at(&x);
    Ok(LpOutcome { status: LpStatus::Optimal, value: Some(value), solution: x, pivots: tab.pivots })
}

/// Decides `point in conv(generators)` by exact feasibility of
/// `sum_w l_w w = point, sum_w l_w = 1, l >= 0`.
pub fn convex_membership(point: &[Rational], generators: &[Vertex]) -> Result<bool> {
    let Some(first) = generators.first() else {
        return Err(Error::EmptyGenerators);
    };
    let n = first.dim();
    if let Some(g) = generators.iter().find(|g| g.dim() != n) {
        return Err(Error::DimensionMismatch { left: n, right: g.dim() });
    }
    if point.len() != n as usize {
        return Err(Error::DimensionMismatch { left: n, right: point.len() as u32 });
    }
    let k = generators.len();
    let mut lp = LpProblem::new(vec![Rational::zero(); k]);
    for i in 1..=n {
        let row = generators.iter().map(|g| if g.coord(i) { Rational::one() } else { Rational::zero() }).collect();
        lp.add_constraint(row, Sense::Eq, point[(i - 1) as usize].clone());
    }
    lp.add_constraint(vec![Rational::one(); k], Sense::Eq, Rational::one());
    Ok(simplex_solve(&lp)?.is_optimal())
}
