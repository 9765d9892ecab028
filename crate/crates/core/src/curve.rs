//! Curves `t ↦ x(t)` with derivative oracles.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fd;
use crate::taylor::Taylor;

/// A curve in `R^m` that can report its derivatives.
pub trait Curve: Send + Sync {
    fn dim(&self) -> usize;

    /// `[x(t), x'(t), .., x^(order)(t)]`.
    fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vec<f64>>>;

    /// Spacing and half-width for centred stencils in `t` applied to
    /// quantities derived from the curve.
    fn time_stencil(&self) -> (f64, usize);
}

/// `d^order/dt^order g(t)` by a centred stencil using the curve's time grid.
pub fn time_derivative(
    curve: &dyn Curve,
    t: f64,
    order: usize,
    g: impl Fn(f64) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    if order == 0 {
        return g(t);
    }
    let (h, r) = curve.time_stencil();
    fd::derivative_1d_vec(|s| g(t + s), order, h, r)
}

pub type TaylorPath = dyn Fn(&Taylor) -> Vec<Taylor> + Send + Sync;

/// A curve given by a closure over Taylor series; derivatives are exact.
#[derive(Clone)]
pub struct AnalyticCurve {
    dim: usize,
    f: Arc<TaylorPath>,
    spacing: f64,
    half_width: usize,
}

impl AnalyticCurve {
    pub fn new(dim: usize, f: impl Fn(&Taylor) -> Vec<Taylor> + Send + Sync + 'static) -> Self {
        AnalyticCurve {
            dim,
            f: Arc::new(f),
            spacing: 0.02,
            half_width: 5,
        }
    }

    pub fn with_time_stencil(mut self, spacing: f64, half_width: usize) -> Self {
        self.spacing = spacing;
        self.half_width = half_width;
        self
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        (self.f)(&Taylor::constant(t, 0)).iter().map(Taylor::value).collect()
    }

    pub fn eval_taylor(&self, t: &Taylor) -> Vec<Taylor> {
        (self.f)(t)
    }
}

impl Curve for AnalyticCurve {
    fn dim(&self) -> usize {
        self.dim
    }

    fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vec<f64>>> {
        let series = (self.f)(&Taylor::variable(t, 1.0, order));
        if series.len() != self.dim {
            return Err(Error::arg("curve closure returned the wrong dimension"));
        }
        Ok((0..=order)
            .map(|j| series.iter().map(|c| c.derivative(j)).collect())
            .collect())
    }

    fn time_stencil(&self) -> (f64, usize) {
        (self.spacing, self.half_width)
    }
}

/// A curve given by a plain closure, differentiated by central differences.
#[derive(Clone)]
pub struct FnCurve {
    dim: usize,
    f: Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
}

impl FnCurve {
    pub fn new(dim: usize, f: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Self {
        FnCurve { dim, f: Arc::new(f) }
    }
}

impl Curve for FnCurve {
    fn dim(&self) -> usize {
        self.dim
    }

    fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vec<f64>>> {
        (0..=order)
            .map(|j| {
                let h = fd::step(j, t);
                fd::derivative_1d_vec(|s| Ok((self.f)(t + s)), j, h, fd::minimal_half_width(j) + 1)
            })
            .collect()
    }

    fn time_stencil(&self) -> (f64, usize) {
        (1e-2, 4)
    }
}

/// A curve known at sample times, differentiated by Fornberg stencils over
/// every `stride`-th sample around the query time.
#[derive(Clone, Debug)]
pub struct SampledCurve {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
    stride: usize,
    half_width: usize,
}

impl SampledCurve {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>, stride: usize, half_width: usize) -> Result<Self> {
        if times.len() != values.len() || times.is_empty() {
            return Err(Error::arg("sample times and values must have equal, nonzero length"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("sample times must be strictly increasing"));
        }
        let m = values[0].len();
        if values.iter().any(|v| v.len() != m) {
            return Err(Error::arg("samples have inconsistent dimension"));
        }
        if stride == 0 || half_width == 0 {
            return Err(Error::arg("stride and half-width must be positive"));
        }
        Ok(SampledCurve {
            times,
            values,
            stride,
            half_width,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    fn nearest(&self, t: f64) -> usize {
        match self.times.binary_search_by(|s| s.total_cmp(&t)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.times.len() => self.times.len() - 1,
            Err(i) => {
                if t - self.times[i - 1] <= self.times[i] - t {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Whether a stencil centred at `t` fits inside the samples.
    pub fn supports(&self, t: f64) -> bool {
        let i = self.nearest(t);
        let reach = self.stride * self.half_width;
        i >= reach && i + reach < self.times.len()
    }
}

impl Curve for SampledCurve {
    fn dim(&self) -> usize {
        self.values[0].len()
    }

    fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vec<f64>>> {
        if 2 * self.half_width < order {
            return Err(Error::Stencil(format!(
                "half-width {} cannot resolve derivative order {order}",
                self.half_width
            )));
        }
        if !self.supports(t) {
            return Err(Error::Stencil(format!(
                "not enough samples around t = {t} for a {}-point stencil with stride {}",
                2 * self.half_width + 1,
                self.stride
            )));
        }
        let i0 = self.nearest(t);
        let idx: Vec<usize> = (0..=2 * self.half_width)
            .map(|j| i0 + j * self.stride - self.half_width * self.stride)
            .collect();
        let nodes: Vec<f64> = idx.iter().map(|&i| self.times[i]).collect();
        let w = fd::fornberg_weights(t, &nodes, order)?;
        let m = self.dim();
        Ok(w.iter()
            .map(|wd| {
                let mut acc = vec![0.0; m];
                for (wj, &i) in wd.iter().zip(&idx) {
                    for (a, v) in acc.iter_mut().zip(&self.values[i]) {
                        *a += wj * v;
                    }
                }
                acc
            })
            .collect())
    }

    fn time_stencil(&self) -> (f64, usize) {
        let n = self.times.len();
        let dt = (self.times[n - 1] - self.times[0]) / (n - 1).max(1) as f64;
        (dt * self.stride as f64, self.half_width)
    }
}

pub type Reparametrization = dyn Fn(&Taylor) -> Taylor + Send + Sync;

/// `t ↦ inner(φ(t))`, differentiated by composing Taylor expansions.
#[derive(Clone)]
pub struct ReparametrizedCurve {
    inner: Arc<dyn Curve>,
    phi: Arc<Reparametrization>,
}

impl ReparametrizedCurve {
    pub fn new(inner: Arc<dyn Curve>, phi: Arc<Reparametrization>) -> Self {
        ReparametrizedCurve { inner, phi }
    }
}

impl Curve for ReparametrizedCurve {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vec<f64>>> {
        let phi = (self.phi)(&Taylor::variable(t, 1.0, order));
        let d = self.inner.derivatives(phi.value(), order)?;
        let comps: Vec<Taylor> = (0..self.dim())
            .map(|i| {
                let coeffs = (0..=order).map(|j| d[j][i] / crate::taylor::factorial(j)).collect();
                Taylor::from_coeffs(coeffs).compose_shifted(&phi)
            })
            .collect();
        Ok((0..=order)
            .map(|j| comps.iter().map(|c| c.derivative(j)).collect())
            .collect())
    }

    fn time_stencil(&self) -> (f64, usize) {
        self.inner.time_stencil()
    }
}
