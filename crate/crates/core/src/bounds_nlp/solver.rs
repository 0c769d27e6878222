//! Multi-start augmented Lagrangian solver.
//!
//! The max-min objective is handled through an epigraph variable `t`:
//! maximize `t` subject to `t ≤ branch_k(z)` plus the model constraints.
//! Each start runs a PHR augmented Lagrangian outer loop around a projected
//! gradient inner loop (Barzilai–Borwein steps, Armijo backtracking on the
//! merit, so the merit never increases within an inner solve). Square roots
//! use a floored argument while solving; final values are exact.
//!
//! Starts are independent and run in parallel. Start 0 is the uniform
//! point, start 1 a structured product point, the rest Dirichlet(1) draws
//! from `seed` on a random face: each base set is dropped with probability
//! 1/4, zeroing every region inside it. All starts also zero the regions
//! that linear zero constraints force to 0. The best feasible start wins,
//! lowest index on ties.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::expr::{Expr, SqrtMode};
use super::model::{ModelKind, NlpModel, Rel};
use super::NlpError;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Largest constraint residual for a start to count as feasible.
    pub feas_tol: f64,
    pub sqrt_floor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 200,
            seed: 0,
            max_outer: 40,
            max_inner: 3000,
            feas_tol: 1e-8,
            sqrt_floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub index: usize,
    pub objective: f64,
    pub violation: f64,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub kind: Option<ModelKind>,
    pub best_point: Vec<f64>,
    pub best_objective: f64,
    pub constraint_violation: f64,
    pub best_start: usize,
    pub starts: usize,
    /// Starts that ended within `feas_tol`.
    pub converged_starts: usize,
    pub elapsed: Duration,
}

pub fn solve(model: &NlpModel, config: &SolverConfig) -> Result<SolveReport, NlpError> {
    if config.starts == 0 {
        return Err(NlpError::NoStarts);
    }
    let clock = Instant::now();
    let outcomes = run_starts(model, config);

    let feasible = |o: &StartOutcome| o.violation <= config.feas_tol;
    let converged_starts = outcomes.iter().filter(|o| feasible(o)).count();
    let mut best: Option<&StartOutcome> = None;
    for o in &outcomes {
        let better = match best {
            None => true,
            Some(b) => match (feasible(o), feasible(b)) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => o.objective > b.objective,
                (false, false) => o.violation < b.violation,
            },
        };
        if better {
            best = Some(o);
        }
    }
    let best = best.expect("at least one start");
    Ok(SolveReport {
        kind: model.kind,
        best_point: best.point.clone(),
        best_objective: best.objective,
        constraint_violation: best.violation,
        best_start: best.index,
        starts: config.starts,
        converged_starts,
        elapsed: clock.elapsed(),
    })
}

/// Every start's local result, in start order.
pub fn run_starts(model: &NlpModel, config: &SolverConfig) -> Vec<StartOutcome> {
    let problem = Problem::new(model, config);
    (0..config.starts)
        .into_par_iter()
        .map(|k| problem.run_start(k, start_point(model, config.seed, k)))
        .collect()
}

/// Variables forced to zero by a constraint `Σ cᵢ·zᵢ = 0` with all
/// `cᵢ > 0` and `z ≥ 0`.
fn forced_zero(model: &NlpModel) -> Vec<bool> {
    let mut zero = vec![false; model.dim()];
    for c in &model.constraints {
        if let (Rel::Eq, Expr::Lin(l), Expr::Num(r)) = (c.rel, &c.lhs, &c.rhs) {
            let nonneg = l.terms.iter().all(|&(i, w)| w > 0.0 && model.vars[i].lo >= 0.0);
            if nonneg && l.constant == 0.0 && *r == 0.0 {
                l.terms.iter().for_each(|&(i, _)| zero[i] = true);
            }
        }
    }
    zero
}

/// Start `k` for `seed`: a point of the simplex that already satisfies the
/// model's linear zero constraints.
pub fn start_point(model: &NlpModel, seed: u64, k: usize) -> Vec<f64> {
    let d = model.dim();
    let zero = forced_zero(model);
    let raw: Vec<f64> = match k {
        0 => vec![1.0; d],
        1 => {
            // Every base set independently with probability 1/4.
            let sets = d.trailing_zeros();
            (0..d)
                .map(|f| {
                    let inside = (f as u32).count_ones() as i32;
                    0.25f64.powi(inside) * 0.75f64.powi(sets as i32 - inside)
                })
                .collect()
        }
        _ => {
            let mut rng = SplitMix64::new(seed).fork(k as u64);
            let sets = d.trailing_zeros();
            let dropped = (0..sets).filter(|_| rng.below(4) == 0).fold(0usize, |m, b| m | 1 << b);
            (0..d)
                .map(|f| {
                    let e = -(1.0 - rng.next_f64()).ln();
                    if f & dropped == 0 {
                        e
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    };
    let raw: Vec<f64> = raw.into_iter().zip(&zero).map(|(v, &z)| if z { 0.0 } else { v }).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

struct Problem<'a> {
    model: &'a NlpModel,
    config: &'a SolverConfig,
    mode: SqrtMode,
    /// Index of `t`; also the number of model variables.
    t: usize,
}

impl<'a> Problem<'a> {
    fn new(model: &'a NlpModel, config: &'a SolverConfig) -> Self {
        Problem {
            model,
            config,
            mode: SqrtMode::Floored(config.sqrt_floor),
            t: model.dim(),
        }
    }

    fn rows(&self) -> usize {
        self.model.constraints.len() + self.model.objective.len()
    }

    fn is_eq(&self, r: usize) -> bool {
        r < self.model.constraints.len() && self.model.constraints[r].rel == Rel::Eq
    }

    /// Constraint gaps: model constraints as `lhs − rhs`, then `t − branch`.
    fn gap(&self, r: usize, x: &[f64]) -> f64 {
        let nc = self.model.constraints.len();
        if r < nc {
            self.model.constraints[r].gap(x, self.mode)
        } else {
            x[self.t] - self.model.objective[r - nc].eval(x, self.mode)
        }
    }

    fn gap_grad(&self, r: usize, x: &[f64], seed: f64, grad: &mut [f64]) {
        let nc = self.model.constraints.len();
        if r < nc {
            let c = &self.model.constraints[r];
            c.lhs.eval_grad(x, self.mode, seed, grad);
            c.rhs.eval_grad(x, self.mode, -seed, grad);
        } else {
            grad[self.t] += seed;
            self.model.objective[r - nc].eval_grad(x, self.mode, -seed, grad);
        }
    }

    /// Shifted violation that the penalty acts on.
    fn shifted(&self, r: usize, gap: f64, lam: f64, rho: f64) -> f64 {
        let v = gap + lam / rho;
        if self.is_eq(r) {
            v
        } else {
            v.max(0.0)
        }
    }

    /// PHR augmented Lagrangian of `−t` (constant terms dropped).
    fn merit(&self, x: &[f64], lam: &[f64], rho: f64) -> f64 {
        let mut f = -x[self.t];
        for (r, &lam_r) in lam.iter().enumerate().take(self.rows()) {
            let v = self.shifted(r, self.gap(r, x), lam_r, rho);
            f += 0.5 * rho * v * v;
        }
        f
    }

    fn merit_grad(&self, x: &[f64], lam: &[f64], rho: f64, grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        grad[self.t] = -1.0;
        let mut f = -x[self.t];
        for (r, &lam_r) in lam.iter().enumerate().take(self.rows()) {
            let v = self.shifted(r, self.gap(r, x), lam_r, rho);
            f += 0.5 * rho * v * v;
            if v != 0.0 {
                self.gap_grad(r, x, rho * v, grad);
            }
        }
        f
    }

    fn project(&self, x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            let (lo, hi) = match self.model.vars.get(i) {
                Some(v) => (v.lo, v.hi),
                None => (-1.0, 1.0),
            };
            *xi = xi.clamp(lo, hi);
        }
    }

    /// Projected gradient descent on the merit. Returns the merit after
    /// each accepted step.
    fn inner(&self, x: &mut [f64], lam: &[f64], rho: f64, tol: f64) -> Vec<f64> {
        let n = x.len();
        let mut g = vec![0.0; n];
        let mut f = self.merit_grad(x, lam, rho, &mut g);
        let mut trace = vec![f];
        let mut alpha = 1.0 / g.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let mut xn = vec![0.0; n];
        let mut gn = vec![0.0; n];
        for _ in 0..self.config.max_inner {
            let mut probe = x.to_vec();
            probe.iter_mut().zip(&g).for_each(|(p, gi)| *p -= gi);
            self.project(&mut probe);
            let stationarity = probe.iter().zip(x.iter()).fold(0.0f64, |a, (p, xi)| a.max((p - xi).abs()));
            if stationarity < tol {
                break;
            }
            let mut accepted = false;
            for _ in 0..60 {
                xn.iter_mut().zip(x.iter().zip(&g)).for_each(|(y, (xi, gi))| *y = xi - alpha * gi);
                self.project(&mut xn);
                let decrease: f64 = xn.iter().zip(x.iter().zip(&g)).map(|(y, (xi, gi))| gi * (y - xi)).sum();
                let fnew = self.merit(&xn, lam, rho);
                if fnew <= f + 1e-4 * decrease {
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
            let fnew = self.merit_grad(&xn, lam, rho, &mut gn);
            let (mut ss, mut sy) = (0.0, 0.0);
            for i in 0..n {
                let s = xn[i] - x[i];
                ss += s * s;
                sy += s * (gn[i] - g[i]);
            }
            alpha = if sy > 0.0 { (ss / sy).clamp(1e-14, 1e6) } else { (alpha * 4.0).min(1e6) };
            x.copy_from_slice(&xn);
            std::mem::swap(&mut g, &mut gn);
            f = fnew;
            trace.push(f);
            if ss == 0.0 {
                break;
            }
        }
        trace
    }

    fn violation(&self, x: &[f64]) -> f64 {
        (0..self.rows())
            .map(|r| {
                let gap = self.gap(r, x);
                if self.is_eq(r) {
                    gap.abs()
                } else {
                    gap.max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }

    fn run_start(&self, index: usize, z: Vec<f64>) -> StartOutcome {
        let mut x = z;
        let t0 = self
            .model
            .objective
            .iter()
            .map(|b| b.eval(&x, self.mode))
            .fold(f64::INFINITY, f64::min);
        x.push(t0);
        let mut lam = vec![0.0; self.rows()];
        let mut rho = 10.0;
        let mut prev = f64::INFINITY;
        let mut tol = 1e-3;
        for _ in 0..self.config.max_outer {
            self.inner(&mut x, &lam, rho, tol);
            for (r, l) in lam.iter_mut().enumerate() {
                let next = *l + rho * self.gap(r, &x);
                *l = if self.is_eq(r) { next } else { next.max(0.0) };
            }
            let viol = self.violation(&x);
            if viol < 0.01 * self.config.feas_tol && tol <= 1e-11 {
                break;
            }
            if viol > 0.25 * prev {
                rho = (rho * 10.0).min(1e9);
            }
            prev = viol;
            tol = (tol * 0.1).max(1e-11);
        }
        x.truncate(self.t);
        let e = self.model.evaluate(&x).expect("solver keeps the dimension");
        StartOutcome {
            index,
            objective: e.objective,
            violation: e.max_violation(),
            point: x,
        }
    }
}
