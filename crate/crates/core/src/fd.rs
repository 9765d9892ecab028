//! Central finite differences and Fornberg stencil weights.
//!
//! The base step can be overridden with the `OSTRO_FD_STEP` environment
//! variable; the override replaces the machine-epsilon power for every
//! derivative order and is still scaled by `max(1, |x|)`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const STEP_ENV: &str = "OSTRO_FD_STEP";

fn step_override() -> Option<f64> {
    static OVERRIDE: OnceLock<Option<f64>> = OnceLock::new();
    *OVERRIDE.get_or_init(|| {
        std::env::var(STEP_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|h| h.is_finite() && *h > 0.0)
    })
}

/// The override from `OSTRO_FD_STEP`, rejecting values that are set but not
/// a positive finite number. Unset means no override.
pub fn step_env() -> Result<Option<f64>> {
    match std::env::var(STEP_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::arg(format!("{STEP_ENV}: {e}"))),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(h) if h.is_finite() && h > 0.0 => Ok(Some(h)),
            _ => Err(Error::arg(format!("{STEP_ENV} must be a positive number, got '{s}'"))),
        },
    }
}

/// Relative base step for a central difference of the given derivative order:
/// `eps^(1/3)` for first derivatives, `eps^(1/4)` for second, `eps^(1/(m+2))`
/// beyond.
pub fn base_step(order: usize) -> f64 {
    if let Some(h) = step_override() {
        return h;
    }
    f64::EPSILON.powf(1.0 / (order.max(1) as f64 + 2.0))
}

/// Absolute step around coordinate value `x`.
pub fn step(order: usize, x: f64) -> f64 {
    base_step(order) * x.abs().max(1.0)
}

/// Fornberg's algorithm: weights `w[d][j]` such that
/// `f^(d)(z) ≈ sum_j w[d][j] f(nodes[j])` for `d = 0..=max_order`.
pub fn fornberg_weights(z: f64, nodes: &[f64], max_order: usize) -> Result<Vec<Vec<f64>>> {
    let n = nodes.len();
    if n == 0 || max_order >= n {
        return Err(Error::Stencil(format!(
            "{n} nodes cannot resolve derivative order {max_order}"
        )));
    }
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            if c3 == 0.0 {
                return Err(Error::Stencil("repeated stencil node".into()));
            }
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    Ok(c)
}

/// Weights of the centred `2r+1` point stencil on the unit grid `-r..=r`.
pub fn central_weights(order: usize, half_width: usize) -> Result<Vec<f64>> {
    let nodes: Vec<f64> = (-(half_width as i64)..=half_width as i64).map(|j| j as f64).collect();
    let mut w = fornberg_weights(0.0, &nodes, order)?;
    Ok(w.swap_remove(order))
}

/// Smallest centred half-width that resolves a derivative of this order at
/// second-order accuracy.
pub fn minimal_half_width(order: usize) -> usize {
    order.div_ceil(2).max(1)
}

/// `d^order/ds^order g(s)` at `s = 0` by a centred stencil with spacing `h`.
pub fn derivative_1d(g: impl Fn(f64) -> f64, order: usize, h: f64) -> Result<f64> {
    if order == 0 {
        return Ok(g(0.0));
    }
    let r = minimal_half_width(order);
    let w = central_weights(order, r)?;
    let mut acc = 0.0;
    for (j, wj) in w.iter().enumerate() {
        if *wj != 0.0 {
            acc += wj * g((j as f64 - r as f64) * h);
        }
    }
    Ok(acc / h.powi(order as i32))
}

/// Vector-valued version of [`derivative_1d`].
pub fn derivative_1d_vec(
    g: impl Fn(f64) -> Result<Vec<f64>>,
    order: usize,
    h: f64,
    half_width: usize,
) -> Result<Vec<f64>> {
    let r = half_width.max(minimal_half_width(order));
    let w = central_weights(order, r)?;
    let mut acc: Option<Vec<f64>> = None;
    for (j, wj) in w.iter().enumerate() {
        if *wj == 0.0 && order > 0 {
            continue;
        }
        let v = g((j as f64 - r as f64) * h)?;
        let a = acc.get_or_insert_with(|| vec![0.0; v.len()]);
        for (ai, vi) in a.iter_mut().zip(&v) {
            *ai += wj * vi;
        }
    }
    let scale = h.powi(order as i32);
    Ok(acc.unwrap_or_default().into_iter().map(|v| v / scale).collect())
}
