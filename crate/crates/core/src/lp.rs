//! Dense two-phase primal simplex for small linear programs.
//!
//! Programs are stated as maximization with `<=`, `=`, `>=` rows and
//! per-variable bounds. Bounds are handled natively (variables at their
//! upper bound are complemented) so box constraints do not add rows.
//!
//! Pricing is Dantzig's rule; after a run of degenerate pivots the solver
//! falls back to Bland's rule until the objective moves again, which rules
//! out cycling. The result is a basic (vertex) solution and is fully
//! determined by the input.

use alloc::vec;
use alloc::vec::Vec;

use crate::num::abs;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Sparse coefficients `(variable, value)`; repeated indices add up.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective . x` subject to the constraints and
/// `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// A program over `vars` variables with zero objective and bounds
    /// `0 <= x < inf`.
    pub fn new(vars: usize) -> Self {
        Self {
            objective: vec![0.0; vars],
            constraints: Vec::new(),
            lower: vec![0.0; vars],
            upper: vec![f64::INFINITY; vars],
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn add_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] += coeff;
    }

    /// Sets bounds of one variable; `lower` may be `-inf`, `upper` `+inf`.
    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("objective has a non-finite coefficient".into()));
        }
        for (j, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY || l > u {
                return Err(Error::InvalidArgument(alloc::format!(
                    "variable {j} has invalid bounds [{l}, {u}]"
                )));
            }
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(Error::InvalidArgument(alloc::format!("constraint {r} has non-finite rhs")));
            }
            for &(j, v) in &c.coeffs {
                if j >= n {
                    return Err(Error::DimensionMismatch {
                        axis: "constraint variable index",
                        expected: n,
                        found: j,
                    });
                }
                if !v.is_finite() {
                    return Err(Error::InvalidArgument(alloc::format!(
                        "constraint {r} has a non-finite coefficient"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest violation of constraints and bounds at `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
            let viol = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => abs(lhs - c.rhs),
            };
            worst = worst.max(viol);
        }
        for j in 0..x.len() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        worst
    }

    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The pivot sequence lost accuracy or hit the iteration cap; no
    /// solution is reported.
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Objective value; meaningful only when optimal.
    pub value: f64,
    /// Optimal point; empty unless optimal.
    pub point: Vec<f64>,
    /// One multiplier per constraint when optimal.
    pub duals: Option<Vec<f64>>,
    pub iterations: usize,
}

impl LpOutcome {
    fn failed(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            value: f64::NAN,
            point: Vec::new(),
            duals: None,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// The optimal point, or an error carrying the status.
    pub fn into_optimal(self, context: &'static str) -> Result<(f64, Vec<f64>)> {
        match self.status {
            LpStatus::Optimal => Ok((self.value, self.point)),
            s => Err(Error::lp(s, context)),
        }
    }
}

/// Seam for substituting another LP backend behind the same contract.
pub trait LpSolver {
    fn solve(&self, lp: &LinearProgram) -> Result<LpOutcome>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub pivot_tol: f64,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_limit: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-10,
            feasibility_tol: 1e-8,
            optimality_tol: 1e-10,
            degenerate_limit: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DenseSimplex {
    pub options: SimplexOptions,
}

impl LpSolver for DenseSimplex {
    fn solve(&self, lp: &LinearProgram) -> Result<LpOutcome> {
        lp.validate()?;
        Ok(Tableau::build(lp, self.options).run(lp))
    }
}

/// Solves with the default dense simplex.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    DenseSimplex::default().solve(lp)
}

/// How an original variable maps onto internal nonnegative columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + col
    Shift { col: usize, offset: f64 },
    /// x = offset - col
    Mirror { col: usize, offset: f64 },
    /// x = pos - neg
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    opts: SimplexOptions,
    rows: usize,
    cols: usize,
    /// rows x (cols + 1), last column is the basic solution value.
    a: Vec<f64>,
    /// Reduced costs for the current phase.
    d: Vec<f64>,
    /// Phase-2 costs per column in the original orientation.
    cost: Vec<f64>,
    upper: Vec<f64>,
    flipped: Vec<bool>,
    kind: Vec<ColKind>,
    basis: Vec<usize>,
    /// Column holding the initial identity entry of each row, and the sign
    /// that row was multiplied by.
    row_unit: Vec<(usize, f64)>,
    row_sign: Vec<f64>,
    var_map: Vec<VarMap>,
    iterations: usize,
}

enum StepResult {
    Optimal,
    Unbounded,
    Stalled,
}

impl Tableau {
    fn build(lp: &LinearProgram, opts: SimplexOptions) -> Self {
        let mut var_map = Vec::with_capacity(lp.vars());
        let mut upper = Vec::new();
        let mut cost = Vec::new();
        for j in 0..lp.vars() {
            let (l, u, c) = (lp.lower[j], lp.upper[j], lp.objective[j]);
            if l.is_finite() {
                var_map.push(VarMap::Shift { col: upper.len(), offset: l });
                upper.push(u - l);
                cost.push(c);
            } else if u.is_finite() {
                var_map.push(VarMap::Mirror { col: upper.len(), offset: u });
                upper.push(f64::INFINITY);
                cost.push(-c);
            } else {
                var_map.push(VarMap::Split {
                    pos: upper.len(),
                    neg: upper.len() + 1,
                });
                upper.extend([f64::INFINITY, f64::INFINITY]);
                cost.extend([c, -c]);
            }
        }
        let structural = upper.len();
        let rows = lp.constraints.len();

        // Dense rows over structural columns with rhs adjusted for offsets.
        let mut dense: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(rows);
        let mut row_sign = Vec::with_capacity(rows);
        for c in &lp.constraints {
            let mut row = vec![0.0; structural];
            let mut rhs = c.rhs;
            for &(j, v) in &c.coeffs {
                match var_map[j] {
                    VarMap::Shift { col, offset } => {
                        row[col] += v;
                        rhs -= v * offset;
                    }
                    VarMap::Mirror { col, offset } => {
                        row[col] -= v;
                        rhs -= v * offset;
                    }
                    VarMap::Split { pos, neg } => {
                        row[pos] += v;
                        row[neg] -= v;
                    }
                }
            }
            let mut rel = c.relation;
            let mut sign = 1.0;
            if rhs < 0.0 {
                sign = -1.0;
                rhs = -rhs;
                row.iter_mut().for_each(|v| *v = -*v);
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            dense.push((row, rel, rhs));
            row_sign.push(sign);
        }

        let slacks = dense.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificials = dense.iter().filter(|r| r.1 != Relation::Le).count();
        let cols = structural + slacks + artificials;
        let width = cols + 1;
        let mut a = vec![0.0; rows * width];
        let mut kind = vec![ColKind::Structural; structural];
        kind.extend(core::iter::repeat_n(ColKind::Slack, slacks));
        kind.extend(core::iter::repeat_n(ColKind::Artificial, artificials));
        upper.extend(core::iter::repeat_n(f64::INFINITY, slacks + artificials));
        cost.extend(core::iter::repeat_n(0.0, slacks + artificials));

        let mut basis = vec![0; rows];
        let mut row_unit = vec![(0, 1.0); rows];
        let mut next_slack = structural;
        let mut next_art = structural + slacks;
        for (r, (row, rel, rhs)) in dense.into_iter().enumerate() {
            let base = r * width;
            a[base..base + structural].copy_from_slice(&row);
            a[base + cols] = rhs;
            match rel {
                Relation::Le => {
                    a[base + next_slack] = 1.0;
                    basis[r] = next_slack;
                    row_unit[r] = (next_slack, 1.0);
                    next_slack += 1;
                }
                Relation::Ge => {
                    a[base + next_slack] = -1.0;
                    a[base + next_art] = 1.0;
                    basis[r] = next_art;
                    row_unit[r] = (next_art, 1.0);
                    next_slack += 1;
                    next_art += 1;
                }
                Relation::Eq => {
                    a[base + next_art] = 1.0;
                    basis[r] = next_art;
                    row_unit[r] = (next_art, 1.0);
                    next_art += 1;
                }
            }
        }

        Self {
            opts,
            rows,
            cols,
            a,
            d: vec![0.0; cols],
            cost,
            upper,
            flipped: vec![false; cols],
            kind,
            basis,
            row_unit,
            row_sign,
            var_map,
            iterations: 0,
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.a[r * (self.cols + 1) + self.cols]
    }

    /// Column cost in the current orientation.
    fn oriented_cost(&self, phase1: bool, c: usize) -> f64 {
        let raw = if phase1 {
            if self.kind[c] == ColKind::Artificial {
                -1.0
            } else {
                0.0
            }
        } else {
            self.cost[c]
        };
        if self.flipped[c] {
            -raw
        } else {
            raw
        }
    }

    fn price(&mut self, phase1: bool) {
        let mut d: Vec<f64> = (0..self.cols).map(|c| self.oriented_cost(phase1, c)).collect();
        for r in 0..self.rows {
            let cb = self.oriented_cost(phase1, self.basis[r]);
            if cb == 0.0 {
                continue;
            }
            let base = r * (self.cols + 1);
            for (c, dc) in d.iter_mut().enumerate() {
                *dc -= cb * self.a[base + c];
            }
        }
        self.d = d;
    }

    /// Artificials never re-enter once they leave the basis.
    fn eligible(&self, c: usize) -> bool {
        self.kind[c] != ColKind::Artificial && self.upper[c] > 0.0
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let width = self.cols + 1;
        let piv = self.a[pr * width + pc];
        let prow_start = pr * width;
        for v in &mut self.a[prow_start..prow_start + width] {
            *v /= piv;
        }
        let prow: Vec<f64> = self.a[prow_start..prow_start + width].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.a[r * width + pc];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.a[r * width..(r + 1) * width];
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= f * p;
            }
            row[pc] = 0.0;
        }
        let f = self.d[pc];
        if f != 0.0 {
            for (dc, p) in self.d.iter_mut().zip(&prow) {
                *dc -= f * p;
            }
            self.d[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Complements nonbasic column `c` (moves it between its bounds).
    fn complement(&mut self, c: usize) {
        let u = self.upper[c];
        let width = self.cols + 1;
        for r in 0..self.rows {
            let v = self.a[r * width + c];
            if v != 0.0 {
                self.a[r * width + self.cols] -= v * u;
                self.a[r * width + c] = -v;
            }
        }
        self.d[c] = -self.d[c];
        self.flipped[c] = !self.flipped[c];
    }

    fn iterate(&mut self, max_iter: usize) -> StepResult {
        let tol = self.opts.optimality_tol;
        let ptol = self.opts.pivot_tol;
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= max_iter {
                return StepResult::Stalled;
            }
            let bland = degenerate_run >= self.opts.degenerate_limit;
            let mut enter = None;
            let mut best = tol;
            for c in 0..self.cols {
                if self.d[c] > tol && self.eligible(c) {
                    if bland {
                        enter = Some(c);
                        break;
                    }
                    if self.d[c] > best {
                        best = self.d[c];
                        enter = Some(c);
                    }
                }
            }
            let Some(q) = enter else {
                return StepResult::Optimal;
            };

            // Ratio test.
            let mut step = self.upper[q];
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_piv = 0.0;
            for r in 0..self.rows {
                let alpha = self.at(r, q);
                let beta = self.rhs(r).max(0.0);
                let (limit, to_upper) = if alpha > ptol {
                    (beta / alpha, false)
                } else if alpha < -ptol && self.upper[self.basis[r]].is_finite() {
                    let ub = self.upper[self.basis[r]];
                    (((ub - beta) / -alpha).max(0.0), true)
                } else {
                    continue;
                };
                let take = match leave {
                    None => limit <= step,
                    Some((lr, _)) => {
                        if limit < step - 1e-12 {
                            true
                        } else if limit <= step + 1e-12 {
                            // Ties: Bland picks the smallest basic index,
                            // otherwise the largest pivot for stability.
                            if bland {
                                self.basis[r] < self.basis[lr]
                            } else {
                                abs(alpha) > abs(leave_piv)
                            }
                        } else {
                            false
                        }
                    }
                };
                if take {
                    step = step.min(limit);
                    leave = Some((r, to_upper));
                    leave_piv = alpha;
                }
            }
            self.iterations += 1;
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            match leave {
                Some((r, to_upper)) => {
                    let leaving = self.basis[r];
                    self.pivot(r, q);
                    if to_upper {
                        self.complement(leaving);
                    }
                }
                None if step.is_infinite() => return StepResult::Unbounded,
                // Entering column reaches its own bound first.
                None => self.complement(q),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let max_iter = 50 * (self.rows + self.cols) + 1000;
        let has_artificial = self.kind.contains(&ColKind::Artificial);
        if has_artificial {
            self.price(true);
            match self.iterate(max_iter) {
                StepResult::Optimal => {}
                StepResult::Unbounded | StepResult::Stalled => {
                    return LpOutcome::failed(LpStatus::NumericalFailure, self.iterations)
                }
            }
            let infeas: f64 = (0..self.rows)
                .filter(|&r| self.kind[self.basis[r]] == ColKind::Artificial)
                .map(|r| self.rhs(r))
                .sum();
            if infeas > self.opts.feasibility_tol {
                return LpOutcome::failed(LpStatus::Infeasible, self.iterations);
            }
            self.drive_out_artificials();
        }
        self.price(false);
        match self.iterate(max_iter) {
            StepResult::Optimal => {}
            StepResult::Unbounded => return LpOutcome::failed(LpStatus::Unbounded, self.iterations),
            StepResult::Stalled => return LpOutcome::failed(LpStatus::NumericalFailure, self.iterations),
        }
        self.extract(lp)
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if self.kind[self.basis[r]] != ColKind::Artificial {
                continue;
            }
            let mut best = None;
            let mut best_abs = 1e-9;
            for c in 0..self.cols {
                if self.kind[c] == ColKind::Artificial {
                    continue;
                }
                let v = abs(self.at(r, c));
                if v > best_abs {
                    best_abs = v;
                    best = Some(c);
                }
            }
            if let Some(c) = best {
                self.pivot(r, c);
            }
        }
    }

    fn column_value(&self, c: usize, basic: &[Option<usize>]) -> f64 {
        let raw = match basic[c] {
            Some(r) => self.rhs(r),
            None => 0.0,
        };
        if self.flipped[c] {
            self.upper[c] - raw
        } else {
            raw
        }
    }

    fn extract(&self, lp: &LinearProgram) -> LpOutcome {
        let mut basic = vec![None; self.cols];
        for (r, &c) in self.basis.iter().enumerate() {
            basic[c] = Some(r);
        }
        let mut x = Vec::with_capacity(lp.vars());
        for (j, m) in self.var_map.iter().enumerate() {
            let v = match *m {
                VarMap::Shift { col, offset } => offset + self.column_value(col, &basic),
                VarMap::Mirror { col, offset } => offset - self.column_value(col, &basic),
                VarMap::Split { pos, neg } => self.column_value(pos, &basic) - self.column_value(neg, &basic),
            };
            // Snap round-off just outside a bound.
            let v = v.max(lp.lower[j]).min(lp.upper[j]);
            x.push(v);
        }
        if lp.residual(&x) > self.opts.feasibility_tol {
            return LpOutcome::failed(LpStatus::NumericalFailure, self.iterations);
        }
        // Row multipliers: y = c_B B^-1 read off the identity columns.
        let duals = (0..self.rows)
            .map(|r| {
                let (c, coef) = self.row_unit[r];
                let d = if self.flipped[c] { -self.d[c] } else { self.d[c] };
                -d / coef * self.row_sign[r]
            })
            .collect();
        LpOutcome {
            status: LpStatus::Optimal,
            value: lp.value_at(&x),
            point: x,
            duals: Some(duals),
            iterations: self.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        abs(a - b) <= tol
    }

    #[test]
    fn single_upper_constraint() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1.0);
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, 3.0);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!(close(out.value, 3.0, 1e-12));
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1.0);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn two_dimensional_polygon() {
        // vertices (0,0), (2,0), (8/5, 6/5), (0,2): best is 14/5
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 1.0);
        lp.add_constraint(vec![(0, 1.0), (1, 2.0)], Relation::Le, 4.0);
        lp.add_constraint(vec![(0, 3.0), (1, 1.0)], Relation::Le, 6.0);
        let out = solve(&lp).unwrap();
        assert!(close(out.value, 14.0 / 5.0, 1e-12));
        assert!(close(out.point[0], 8.0 / 5.0, 1e-12));
        assert!(close(out.point[1], 6.0 / 5.0, 1e-12));
        let y = out.duals.unwrap();
        assert!(close(4.0 * y[0] + 6.0 * y[1], out.value, 1e-9));
    }

    #[test]
    fn infeasible_system() {
        let mut lp = LinearProgram::new(2);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Ge, 3.0);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Le, 2.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max -x - y  s.t. x + y = 2, x >= 0.5, y >= 0.25 -> -2
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, -1.0);
        lp.set_objective(1, -3.0);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 2.0);
        lp.add_constraint(vec![(0, 1.0)], Relation::Ge, 0.5);
        lp.add_constraint(vec![(1, 1.0)], Relation::Ge, 0.25);
        let out = solve(&lp).unwrap();
        assert!(close(out.value, -1.75 - 0.75, 1e-12), "{}", out.value);
        assert!(close(out.point[1], 0.25, 1e-12));
    }

    #[test]
    fn native_bounds() {
        // max x + 2y, 0 <= x <= 1, -1 <= y <= 0.5, x + y <= 1.2
        let mut lp = LinearProgram::new(2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 2.0);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, -1.0, 0.5);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.2);
        let out = solve(&lp).unwrap();
        assert!(close(out.value, 0.7 + 1.0, 1e-12), "{:?}", out);
        assert!(close(out.point[1], 0.5, 1e-12));
    }

    #[test]
    fn free_and_mirrored_variables() {
        // max -|x - 3| style: max t s.t. t <= x - 3, t <= 3 - x, x free, t <= 10 upper only
        let mut lp = LinearProgram::new(2);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, f64::NEG_INFINITY, 10.0);
        lp.set_objective(1, 1.0);
        lp.set_objective(0, 0.1);
        lp.add_constraint(vec![(1, 1.0), (0, -1.0)], Relation::Le, -3.0);
        lp.add_constraint(vec![(1, 1.0), (0, 1.0)], Relation::Le, 3.0);
        let out = solve(&lp).unwrap();
        // objective t + 0.1 x is maximized at x = 3, t = 0 -> 0.3
        assert!(close(out.value, 0.3, 1e-12), "{:?}", out);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(3);
        lp.set_objective(2, 1.0);
        lp.add_constraint(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint(vec![(0, 2.0), (1, 2.0), (2, 2.0)], Relation::Eq, 2.0);
        lp.add_constraint(vec![(2, 1.0)], Relation::Le, 0.4);
        let out = solve(&lp).unwrap();
        assert!(close(out.value, 0.4, 1e-12));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example; cycles under naive Dantzig pricing.
        let mut lp = LinearProgram::new(4);
        for (j, c) in [0.75, -150.0, 0.02, -6.0].into_iter().enumerate() {
            lp.set_objective(j, c);
        }
        lp.add_constraint(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Relation::Le, 0.0);
        lp.add_constraint(vec![(2, 1.0)], Relation::Le, 1.0);
        let out = solve(&lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!(close(out.value, 0.05, 1e-9), "{}", out.value);
    }

    #[test]
    fn malformed_input_rejected() {
        let mut lp = LinearProgram::new(1);
        lp.add_constraint(vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(solve(&lp).is_err());
        let mut lp = LinearProgram::new(1);
        lp.add_constraint(vec![(0, 1.0)], Relation::Le, f64::INFINITY);
        assert!(solve(&lp).is_err());
        let mut lp = LinearProgram::new(1);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(solve(&lp).is_err());
    }

    #[test]
    fn negative_rhs_rows() {
        // max x s.t. -x >= -2  (x <= 2)
        let mut lp = LinearProgram::new(1);
        lp.set_objective(0, 1.0);
        lp.add_constraint(vec![(0, -1.0)], Relation::Ge, -2.0);
        let out = solve(&lp).unwrap();
        assert!(close(out.value, 2.0, 1e-12));
        let y = out.duals.unwrap();
        assert!(close(-2.0 * y[0], 2.0, 1e-12), "{y:?}");
    }
}
