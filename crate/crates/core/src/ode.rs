//! Classical RK4 with a positivity guard, shared by the simplex and sphere
//! flows.

use crate::error::{Error, Result};

const MAX_HALVINGS: u32 = 40;

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

pub(crate) fn rk4_step<F>(y: &[f64], h: f64, field: &F) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let k1 = field(y);
    let k2 = field(&axpy(y, 0.5 * h, &k1));
    let k3 = field(&axpy(y, 0.5 * h, &k2));
    let k4 = field(&axpy(y, h, &k3));
    y.iter()
        .enumerate()
        .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Integrates `ẏ = field(y)` on `[0, t_end]` with nominal step `step`,
/// projecting with `renormalize` after every accepted step.
///
/// A step that leaves the positive orthant is retried with half the step,
/// at most 40 times. `record` sees every accepted `(t, y)`, starting with
/// `(0, y0)`.
pub(crate) fn integrate_positive<F, P, R>(
    y0: Vec<f64>,
    t_end: f64,
    step: f64,
    field: F,
    renormalize: P,
    mut record: R,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&mut [f64]),
    R: FnMut(f64, &[f64]) -> Result<()>,
{
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step {step} must be positive"
        )));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_end {t_end} must be non-negative"
        )));
    }
    let mut y = y0;
    let mut t = 0.0;
    record(t, &y)?;
    let steps = (t_end / step).ceil() as u64;
    for i in 1..=steps {
        let target = if i == steps { t_end } else { i as f64 * step };
        // sub-steps only appear after a rejected step
        while t < target {
            let mut h = target - t;
            let mut halvings = 0;
            let next = loop {
                let mut cand = rk4_step(&y, h, &field);
                if cand.iter().all(|v| *v > 0.0 && v.is_finite()) {
                    renormalize(&mut cand);
                    break cand;
                }
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::StepTooLarge { t });
                }
                h *= 0.5;
            };
            y = next;
            t = if t + h >= target { target } else { t + h };
            record(t, &y)?;
        }
    }
    Ok(y)
}
