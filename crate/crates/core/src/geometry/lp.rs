//! Dense two-phase simplex with Bland's anti-cycling rule.

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `minimize c.x  s.t.  rows_i . x (sense_i) rhs_i,  lower <= x <= upper`.
/// Bounds may be infinite.
#[derive(Debug, Clone)]
pub struct Lp {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
}

impl Lp {
    /// Variables default to `x >= 0`.
    pub fn new(nvars: usize) -> Self {
        Lp {
            objective: vec![0.0; nvars],
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; nvars],
            upper: vec![f64::INFINITY; nvars],
        }
    }

    pub fn nvars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        for r in &mut self.rows {
            r.push(0.0);
        }
        self.objective.len() - 1
    }

    pub fn free(&mut self, j: usize) {
        self.lower[j] = f64::NEG_INFINITY;
        self.upper[j] = f64::INFINITY;
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.nvars());
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    /// Sparse variant of [`Lp::add_row`].
    pub fn add_sparse_row(&mut self, entries: &[(usize, f64)], sense: Sense, rhs: f64) {
        let mut coeffs = vec![0.0; self.nvars()];
        for &(j, v) in entries {
            coeffs[j] += v;
        }
        self.add_row(coeffs, sense, rhs);
    }

    pub fn solve(&self) -> Result<LpSolution> {
        solve(self)
    }
}

enum VarMap {
    /// x = lo + y
    Shift(usize, f64),
    /// x = hi - y
    Flip(usize, f64),
    /// x = y+ - y-
    Split(usize, usize),
}

struct Tableau {
    /// m rows of (ncols) coefficients followed by rhs
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule on `cost` restricted to `allowed` columns.
    /// Returns false when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool], max_iter: usize) -> Result<bool> {
        let m = self.t.len();
        for _ in 0..max_iter {
            // reduced costs
            let mut enter = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j];
                for i in 0..m {
                    rc -= cost[self.basis[i]] * self.t[i][j];
                }
                if rc < -tol::PIVOT {
                    enter = Some(j);
                    break;
                }
            }
            let Some(c) = enter else { return Ok(true) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][c];
                if a > tol::PIVOT {
                    let ratio = self.t[i][self.ncols] / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, _)) = leave else { return Ok(false) };
            self.pivot(r, c);
        }
        Err(Error::numerical("simplex iteration cap reached"))
    }
}

fn solve(lp: &Lp) -> Result<LpSolution> {
    let n = lp.nvars();
    for r in &lp.rows {
        if r.len() != n {
            return Err(Error::invalid("LP row length differs from variable count"));
        }
    }
    // map original variables to nonnegative internal variables
    let mut maps = Vec::with_capacity(n);
    let mut ny = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        if lo > hi {
            return Ok(LpSolution { status: LpStatus::Infeasible, x: vec![], value: f64::NAN });
        }
        if lo.is_finite() {
            maps.push(VarMap::Shift(ny, lo));
            if hi.is_finite() {
                bound_rows.push((ny, hi - lo));
            }
            ny += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Flip(ny, hi));
            ny += 1;
        } else {
            maps.push(VarMap::Split(ny, ny + 1));
            ny += 2;
        }
    }
    // rows in y-space: a_y . y (sense) b_y
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for ((r, &s), &b) in lp.rows.iter().zip(&lp.senses).zip(&lp.rhs) {
        let mut a = vec![0.0; ny];
        let mut rhs = b;
        for (j, &v) in r.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift(k, lo) => {
                    a[k] += v;
                    rhs -= v * lo;
                }
                VarMap::Flip(k, hi) => {
                    a[k] -= v;
                    rhs -= v * hi;
                }
                VarMap::Split(p, q) => {
                    a[p] += v;
                    a[q] -= v;
                }
            }
        }
        rows.push((a, s, rhs));
    }
    for (k, u) in bound_rows {
        let mut a = vec![0.0; ny];
        a[k] = 1.0;
        rows.push((a, Sense::Le, u));
    }
    let mut cost_y = vec![0.0; ny];
    for (j, &c) in lp.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Shift(k, _) => cost_y[k] += c,
            VarMap::Flip(k, _) => cost_y[k] -= c,
            VarMap::Split(p, q) => {
                cost_y[p] += c;
                cost_y[q] -= c;
            }
        }
    }
    // normalize rhs >= 0
    for (a, s, b) in rows.iter_mut() {
        if *b < 0.0 {
            for v in a.iter_mut() {
                *v = -*v;
            }
            *b = -*b;
            *s = match *s {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let ncols = ny + n_slack + n_art;
    let mut t = vec![vec![0.0; ncols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut slack = ny;
    let mut art = ny + n_slack;
    for (i, (a, s, b)) in rows.iter().enumerate() {
        t[i][..ny].copy_from_slice(a);
        t[i][ncols] = *b;
        match s {
            Sense::Le => {
                t[i][slack] = 1.0;
                basis[i] = slack;
                slack += 1;
            }
            Sense::Ge => {
                t[i][slack] = -1.0;
                slack += 1;
                t[i][art] = 1.0;
                basis[i] = art;
                art += 1;
            }
            Sense::Eq => {
                t[i][art] = 1.0;
                basis[i] = art;
                art += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, ncols };
    let max_iter = 200 * (m + ncols + 10);
    let art_start = ny + n_slack;
    if n_art > 0 {
        let mut c1 = vec![0.0; ncols];
        for c in c1.iter_mut().skip(art_start) {
            *c = 1.0;
        }
        let allowed = vec![true; ncols];
        tab.optimize(&c1, &allowed, max_iter)?;
        let infeas: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= art_start)
            .map(|i| tab.t[i][ncols])
            .sum();
        let bscale = rows.iter().map(|r| r.2.abs()).fold(1.0, f64::max);
        if infeas > tol::FEAS * bscale {
            return Ok(LpSolution { status: LpStatus::Infeasible, x: vec![], value: f64::NAN });
        }
        // drive artificials out of the basis
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= art_start {
                let col = (0..art_start).find(|&j| tab.t[i][j].abs() > 1e-9);
                match col {
                    Some(c) => tab.pivot(i, c),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
    let mut c2 = vec![0.0; ncols];
    c2[..ny].copy_from_slice(&cost_y);
    let mut allowed = vec![true; ncols];
    for a in allowed.iter_mut().skip(art_start) {
        *a = false;
    }
    let bounded = tab.optimize(&c2, &allowed, max_iter)?;
    if !bounded {
        return Ok(LpSolution { status: LpStatus::Unbounded, x: vec![], value: f64::NEG_INFINITY });
    }
    let mut y = vec![0.0; ncols];
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.t[i][ncols].max(0.0);
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|mp| match *mp {
            VarMap::Shift(k, lo) => lo + y[k],
            VarMap::Flip(k, hi) => hi - y[k],
            VarMap::Split(p, q) => y[p] - y[q],
        })
        .collect();
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>();
    check_feasible(lp, &x)?;
    Ok(LpSolution { status: LpStatus::Optimal, x, value })
}

fn check_feasible(lp: &Lp, x: &[f64]) -> Result<()> {
    for ((r, &s), &b) in lp.rows.iter().zip(&lp.senses).zip(&lp.rhs) {
        let lhs: f64 = r.iter().zip(x).map(|(a, v)| a * v).sum();
        let scale = r.iter().zip(x).map(|(a, v)| (a * v).abs()).fold(b.abs(), f64::max).max(1.0);
        let viol = match s {
            Sense::Le => lhs - b,
            Sense::Ge => b - lhs,
            Sense::Eq => (lhs - b).abs(),
        };
        if viol > 1e-6 * scale {
            return Err(Error::numerical(format!("LP solution violates a row by {viol:e}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_max_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = Lp::new(2);
        lp.objective = vec![-3.0, -5.0];
        lp.add_row(vec![1.0, 0.0], Sense::Le, 4.0);
        lp.add_row(vec![0.0, 2.0], Sense::Le, 12.0);
        lp.add_row(vec![3.0, 2.0], Sense::Le, 18.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.add_row(vec![1.0], Sense::Ge, 2.0);
        lp.add_row(vec![1.0], Sense::Le, 1.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);

        let mut lp = Lp::new(1);
        lp.objective = vec![-1.0];
        lp.add_row(vec![1.0], Sense::Ge, 0.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_bounded_variables() {
        // min |x - 3| over x in [-inf, 1] written with t >= +-(x - 3)
        let mut lp = Lp::new(2);
        lp.free(0);
        lp.upper[0] = 1.0;
        lp.objective = vec![0.0, 1.0];
        lp.add_row(vec![-1.0, 1.0], Sense::Ge, -3.0);
        lp.add_row(vec![1.0, 1.0], Sense::Ge, 3.0);
        let s = lp.solve().unwrap();
        assert!((s.value - 2.0).abs() < 1e-9);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_with_redundant_row() {
        let mut lp = Lp::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add_row(vec![1.0, 1.0], Sense::Eq, 2.0);
        lp.add_row(vec![2.0, 2.0], Sense::Eq, 4.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 2.0).abs() < 1e-9);
    }
}
