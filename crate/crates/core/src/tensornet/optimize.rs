use super::lbfgs::{minimize, LbfgsStatus, OptimizerConfig};
use super::{evaluate, Mpo, Mps};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct Optimized {
    /// Final state, normalized.
    pub psi: Mps,
    pub value: f64,
    pub initial_value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub status: LbfgsStatus,
    /// Expectation after each accepted step.
    pub trace: Vec<f64>,
}

impl Optimized {
    /// True when the run ended without a usable ascent history.
    pub fn failed(&self) -> bool {
        self.status == LbfgsStatus::NonFinite || !self.value.is_finite()
    }
}

/// Maximizes `<psi|H|psi> / <psi|psi>` over the raw tensor entries.
pub fn optimize(psi: &Mps, h: &Mpo, cfg: &OptimizerConfig) -> Result<Optimized> {
    cfg.validate()?;
    let initial_value = evaluate(psi, h, false)?.value;
    let mut work = psi.clone();
    let objective = |x: &[f64]| {
        work.set_params(x);
        match evaluate(&work, h, true) {
            Ok(ev) => {
                let g = ev.flat_grad().unwrap();
                (-ev.value, g.into_iter().map(|v| -v).collect())
            }
            Err(e) => {
                log::debug!("objective evaluation failed: {e}");
                (f64::NAN, vec![f64::NAN; x.len()])
            }
        }
    };
    let r = minimize(objective, psi.to_params(), cfg);
    let mut out = psi.clone();
    out.set_params(&r.x);
    if r.status != LbfgsStatus::NonFinite {
        out.normalize()?;
    }
    if r.status == LbfgsStatus::LineSearchFailed {
        log::debug!("line search failed after {} iterations; keeping best iterate", r.iterations);
    }
    Ok(Optimized {
        psi: out,
        value: -r.f,
        initial_value,
        iterations: r.iterations,
        evaluations: r.evaluations,
        status: r.status,
        trace: r.trace.into_iter().map(|f| -f).collect(),
    })
}
