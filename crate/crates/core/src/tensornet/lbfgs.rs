//! Limited-memory BFGS with a strong-Wolfe line search (cubic interpolation
//! and zoom), minimizing a smooth function of a real vector.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Stop when the objective or every parameter moves less than this.
    pub tol_change: f64,
    /// Stop when the largest gradient component falls below this.
    pub tol_grad: f64,
    pub max_iter: usize,
    pub history: usize,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            tol_change: 1e-2,
            tol_grad: 1e-7,
            max_iter: 500,
            history: 10,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 25,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.tol_change > 0.0
            && self.tol_grad > 0.0
            && self.max_iter > 0
            && self.history > 0
            && 0.0 < self.c1
            && self.c1 < self.c2
            && self.c2 < 1.0;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::InvalidParameter(format!("bad optimizer config {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LbfgsStatus {
    GradientTolerance,
    ChangeTolerance,
    MaxIterations,
    /// No step satisfying sufficient decrease was found; the best iterate is
    /// returned.
    LineSearchFailed,
    NonFinite,
}

#[derive(Clone, Debug)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub status: LbfgsStatus,
    /// Objective after each accepted step, starting with the initial value.
    pub trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn axpy(x: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

/// Minimizer of the cubic through `(x1, f1, g1)` and `(x2, f2, g2)`, clamped
/// to `bounds` (default: the interval between the points).
fn cubic_interpolate(x1: f64, f1: f64, g1: f64, x2: f64, f2: f64, g2: f64, bounds: Option<(f64, f64)>) -> f64 {
    let (lo, hi) = bounds.unwrap_or(if x1 <= x2 { (x1, x2) } else { (x2, x1) });
    let d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
    let d2_sq = d1 * d1 - g1 * g2;
    if d2_sq >= 0.0 {
        let d2 = d2_sq.sqrt();
        let pos = if x1 <= x2 {
            x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2))
        } else {
            x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2))
        };
        if pos.is_finite() {
            return pos.clamp(lo, hi);
        }
    }
    (lo + hi) / 2.0
}

struct Point {
    t: f64,
    f: f64,
    g: Vec<f64>,
    gtd: f64,
}

struct LineSearch {
    t: f64,
    f: f64,
    g: Vec<f64>,
    evals: usize,
}

fn strong_wolfe<F>(obj: &mut F, x: &[f64], t0: f64, d: &[f64], f0: f64, g0: &[f64], gtd0: f64, cfg: &OptimizerConfig) -> LineSearch
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let d_norm = max_abs(d);
    let mut t = t0;
    let (mut f_new, mut g_new) = obj(&axpy(x, t, d));
    let mut evals = 1;
    let mut gtd_new = dot(&g_new, d);
    let mut prev = Point {
        t: 0.0,
        f: f0,
        g: g0.to_vec(),
        gtd: gtd0,
    };
    let mut done = false;
    let mut iter = 0;
    let mut bracket: Vec<Point> = Vec::new();

    while iter < cfg.max_line_search {
        if !f_new.is_finite() {
            // shrink back towards the start
            bracket = vec![
                prev,
                Point {
                    t,
                    f: f64::INFINITY,
                    g: g_new.clone(),
                    gtd: f64::INFINITY,
                },
            ];
            break;
        }
        if f_new > f0 + cfg.c1 * t * gtd0 || (iter > 1 && f_new >= prev.f) {
            bracket = vec![prev, Point { t, f: f_new, g: g_new.clone(), gtd: gtd_new }];
            break;
        }
        if gtd_new.abs() <= -cfg.c2 * gtd0 {
            bracket = vec![Point { t, f: f_new, g: g_new.clone(), gtd: gtd_new }];
            done = true;
            break;
        }
        if gtd_new >= 0.0 {
            bracket = vec![prev, Point { t, f: f_new, g: g_new.clone(), gtd: gtd_new }];
            break;
        }
        let min_step = t + 0.01 * (t - prev.t);
        let max_step = t * 10.0;
        let next_t = cubic_interpolate(prev.t, prev.f, prev.gtd, t, f_new, gtd_new, Some((min_step, max_step)));
        prev = Point { t, f: f_new, g: g_new.clone(), gtd: gtd_new };
        t = next_t;
        let (f, g) = obj(&axpy(x, t, d));
        f_new = f;
        g_new = g;
        evals += 1;
        gtd_new = dot(&g_new, d);
        iter += 1;
    }
    if iter == cfg.max_line_search {
        bracket = vec![
            Point { t: 0.0, f: f0, g: g0.to_vec(), gtd: gtd0 },
            Point { t, f: f_new, g: g_new.clone(), gtd: gtd_new },
        ];
    }

    if done {
        let p = bracket.pop().unwrap();
        return LineSearch { t: p.t, f: p.f, g: p.g, evals };
    }

    // zoom
    let mut insufficient = false;
    let (mut low, mut high) = if bracket[0].f <= bracket[1].f { (0, 1) } else { (1, 0) };
    while !done && iter < cfg.max_line_search {
        let (b0, b1) = (&bracket[0], &bracket[1]);
        if (b1.t - b0.t).abs() * d_norm < 1e-9 {
            break;
        }
        let mut t = if b0.f.is_finite() && b1.f.is_finite() {
            cubic_interpolate(b0.t, b0.f, b0.gtd, b1.t, b1.f, b1.gtd, None)
        } else {
            (b0.t + b1.t) / 2.0
        };
        let (bmin, bmax) = (b0.t.min(b1.t), b0.t.max(b1.t));
        let eps = 0.1 * (bmax - bmin);
        if (bmax - t).min(t - bmin) < eps {
            if insufficient || t >= bmax || t <= bmin {
                t = if (t - bmax).abs() < (t - bmin).abs() { bmax - eps } else { bmin + eps };
                insufficient = false;
            } else {
                insufficient = true;
            }
        } else {
            insufficient = false;
        }
        let (f, g) = obj(&axpy(x, t, d));
        evals += 1;
        iter += 1;
        let gtd = dot(&g, d);
        let point = Point { t, f, g, gtd };
        if !f.is_finite() || f > f0 + cfg.c1 * t * gtd0 || f >= bracket[low].f {
            bracket[high] = point;
            (low, high) = if bracket[0].f <= bracket[1].f { (0, 1) } else { (1, 0) };
        } else {
            if gtd.abs() <= -cfg.c2 * gtd0 {
                done = true;
            } else if gtd * (bracket[high].t - bracket[low].t) >= 0.0 {
                bracket.swap(high, low);
            }
            bracket[low] = point;
        }
    }
    let p = bracket.swap_remove(low);
    LineSearch { t: p.t, f: p.f, g: p.g, evals }
}

/// Minimizes `obj`, which returns the value and gradient at a point.
pub fn minimize<F>(mut obj: F, x0: Vec<f64>, cfg: &OptimizerConfig) -> LbfgsResult
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut x = x0;
    let (mut f, mut g) = obj(&x);
    let mut evals = 1;
    let mut trace = vec![f];
    let finish = |x, f, it, ev, status, trace| LbfgsResult {
        x,
        f,
        iterations: it,
        evaluations: ev,
        status,
        trace,
    };
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return finish(x, f, 0, evals, LbfgsStatus::NonFinite, trace);
    }
    if max_abs(&g) <= cfg.tol_grad {
        return finish(x, f, 0, evals, LbfgsStatus::GradientTolerance, trace);
    }

    let mut s_hist: VecDeque<Vec<f64>> = VecDeque::with_capacity(cfg.history);
    let mut y_hist: VecDeque<Vec<f64>> = VecDeque::with_capacity(cfg.history);
    let mut rho_hist: VecDeque<f64> = VecDeque::with_capacity(cfg.history);
    let mut h_diag = 1.0;
    let mut prev_g: Option<Vec<f64>> = None;
    let mut prev_step: Option<Vec<f64>> = None;

    for it in 1..=cfg.max_iter {
        if let (Some(pg), Some(step)) = (prev_g.take(), prev_step.take()) {
            let y: Vec<f64> = g.iter().zip(&pg).map(|(a, b)| a - b).collect();
            let ys = dot(&y, &step);
            if ys > 1e-10 {
                if s_hist.len() == cfg.history {
                    s_hist.pop_front();
                    y_hist.pop_front();
                    rho_hist.pop_front();
                }
                h_diag = ys / dot(&y, &y);
                s_hist.push_back(step);
                y_hist.push_back(y);
                rho_hist.push_back(1.0 / ys);
            }
        }

        // two-loop recursion
        let mut q: Vec<f64> = g.iter().map(|v| -v).collect();
        let k = s_hist.len();
        let mut alpha = vec![0.0; k];
        for i in (0..k).rev() {
            alpha[i] = rho_hist[i] * dot(&s_hist[i], &q);
            for (qv, yv) in q.iter_mut().zip(&y_hist[i]) {
                *qv -= alpha[i] * yv;
            }
        }
        for v in &mut q {
            *v *= h_diag;
        }
        for i in 0..k {
            let beta = rho_hist[i] * dot(&y_hist[i], &q);
            for (qv, sv) in q.iter_mut().zip(&s_hist[i]) {
                *qv += (alpha[i] - beta) * sv;
            }
        }
        let d = q;

        let t0 = if it == 1 {
            (1.0 / g.iter().map(|v| v.abs()).sum::<f64>()).min(1.0)
        } else {
            1.0
        };
        let gtd = dot(&g, &d);
        if gtd > -cfg.tol_change {
            return finish(x, f, it - 1, evals, LbfgsStatus::ChangeTolerance, trace);
        }

        let ls = strong_wolfe(&mut obj, &x, t0, &d, f, &g, gtd, cfg);
        evals += ls.evals;
        if !(ls.f.is_finite() && ls.t > 0.0 && ls.f <= f + cfg.c1 * ls.t * gtd) {
            return finish(x, f, it - 1, evals, LbfgsStatus::LineSearchFailed, trace);
        }
        if ls.g.iter().any(|v| !v.is_finite()) {
            return finish(x, f, it - 1, evals, LbfgsStatus::NonFinite, trace);
        }
        let step: Vec<f64> = d.iter().map(|v| v * ls.t).collect();
        for (xv, sv) in x.iter_mut().zip(&step) {
            *xv += sv;
        }
        let f_old = f;
        prev_g = Some(std::mem::replace(&mut g, ls.g));
        f = ls.f;
        trace.push(f);

        if max_abs(&g) <= cfg.tol_grad {
            return finish(x, f, it, evals, LbfgsStatus::GradientTolerance, trace);
        }
        if max_abs(&step) <= cfg.tol_change || (f - f_old).abs() < cfg.tol_change {
            return finish(x, f, it, evals, LbfgsStatus::ChangeTolerance, trace);
        }
        prev_step = Some(step);
    }
    let it = cfg.max_iter;
    finish(x, f, it, evals, LbfgsStatus::MaxIterations, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        (f, g)
    }

    #[test]
    fn solves_rosenbrock() {
        let cfg = OptimizerConfig {
            tol_change: 1e-12,
            tol_grad: 1e-9,
            ..Default::default()
        };
        let r = minimize(rosenbrock, vec![-1.2, 1.0], &cfg);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{r:?}");
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn quadratic_converges_quickly() {
        let diag = [1.0, 10.0, 100.0];
        let obj = |x: &[f64]| {
            let f = x.iter().zip(diag).map(|(v, d)| 0.5 * d * v * v).sum();
            (f, x.iter().zip(diag).map(|(v, d)| d * v).collect())
        };
        let cfg = OptimizerConfig {
            tol_change: 1e-14,
            tol_grad: 1e-10,
            ..Default::default()
        };
        let r = minimize(obj, vec![1.0, 1.0, 1.0], &cfg);
        assert!(r.f < 1e-14, "{r:?}");
        assert!(r.iterations < 30);
    }

    #[test]
    fn starts_at_minimum() {
        let r = minimize(|x: &[f64]| (x[0] * x[0], vec![2.0 * x[0]]), vec![0.0], &OptimizerConfig::default());
        assert_eq!(r.status, LbfgsStatus::GradientTolerance);
        assert_eq!(r.iterations, 0);
    }
}
