use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::flow::hamilton_rhs;
use crate::curve::SampledCurve;
use crate::duality::AffineHamiltonianModel;
use crate::error::{Error, Result};
use crate::jetspace::PhasePoint;

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    /// Classical fixed-step fourth-order Runge-Kutta.
    Rk4,
    /// RK4 with step doubling; `tolerance` bounds the local error estimate.
    Rk4Adaptive { tolerance: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub dt: f64,
    pub t0: f64,
    pub t1: f64,
    /// Keep every `stride`-th step.
    pub stride: usize,
}

impl IntegratorConfig {
    pub fn rk4(t0: f64, t1: f64, dt: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            dt,
            t0,
            t1,
            stride: 1,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::arg("dt must be positive"));
        }
        if !(self.t1 > self.t0) {
            return Err(Error::arg("t1 must exceed t0"));
        }
        if self.stride == 0 {
            return Err(Error::arg("stride must be at least 1"));
        }
        if let Method::Rk4Adaptive { tolerance } = self.method {
            if !(tolerance > 0.0) {
                return Err(Error::arg("adaptive tolerance must be positive"));
            }
        }
        Ok(())
    }

    /// Number of fixed steps covering `[t0, t1]`.
    pub fn steps(&self) -> usize {
        (((self.t1 - self.t0) / self.dt).round() as usize).max(1)
    }
}

/// Time-stamped phase points with the vector field evaluated at each.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<PhasePoint>,
    rates: Vec<PhasePoint>,
    method: String,
    dt: f64,
    order: usize,
    dim: usize,
}

impl Trajectory {
    pub fn new(method: &str, dt: f64, order: usize, dim: usize) -> Self {
        Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            rates: Vec::new(),
            method: method.to_string(),
            dt,
            order,
            dim,
        }
    }

    pub fn push(&mut self, t: f64, state: PhasePoint, rate: PhasePoint) -> Result<()> {
        if self.times.last().is_some_and(|last| t <= *last) {
            return Err(Error::arg("trajectory times must increase"));
        }
        if state.order() != self.order || state.dim() != self.dim || rate.order() != self.order {
            return Err(Error::arg("state shape does not match the trajectory"));
        }
        self.times.push(t);
        self.states.push(state);
        self.rates.push(rate);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[PhasePoint] {
        &self.states
    }

    pub fn rates(&self) -> &[PhasePoint] {
        &self.rates
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &PhasePoint)> {
        self.times
            .last()
            .map(|t| (*t, self.states.last().expect("same length")))
    }

    /// The jet level `a` (0 is `x`) as a sampled curve.
    pub fn level_curve(&self, a: usize, stride: usize, half_width: usize) -> Result<SampledCurve> {
        let values = self.states.iter().map(|s| s.jet().level(a).to_vec()).collect();
        SampledCurve::new(self.times.clone(), values, stride, half_width)
    }

    /// The momentum level `p_(a)` as a sampled curve.
    pub fn momentum_curve(&self, a: usize, stride: usize, half_width: usize) -> Result<SampledCurve> {
        let values = self.states.iter().map(|s| s.momentum(a).to_vec()).collect();
        SampledCurve::new(self.times.clone(), values, stride, half_width)
    }

    pub fn csv_header(&self) -> String {
        let m = self.dim;
        let mut cols = vec!["t".to_string()];
        cols.extend((1..=m).map(|i| format!("x{i}")));
        for a in 1..self.order {
            cols.extend((1..=m).map(|i| format!("y{a}_{i}")));
        }
        for a in 0..self.order {
            cols.extend((1..=m).map(|i| format!("p{a}_{i}")));
        }
        cols.join(",")
    }

    /// CSV with one row per state, 17 significant digits, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t:.16e}");
            for v in s.to_flat() {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

struct System<'a> {
    h: &'a AffineHamiltonianModel,
    order: usize,
    dim: usize,
}

impl System<'_> {
    fn rate(&self, z: &[f64]) -> Result<Vec<f64>> {
        let pt = PhasePoint::from_flat(self.order, self.dim, z)?;
        let r = hamilton_rhs(self.h, &pt)?.to_flat();
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite vector field".into()));
        }
        Ok(r)
    }

    fn rk4_step(&self, z: &[f64], k1: &[f64], dt: f64) -> Result<Vec<f64>> {
        let k2 = self.rate(&axpy(z, 0.5 * dt, k1))?;
        let k3 = self.rate(&axpy(z, 0.5 * dt, &k2))?;
        let k4 = self.rate(&axpy(z, dt, &k3))?;
        Ok(z.iter()
            .enumerate()
            .map(|(i, zi)| zi + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }
}

fn record(traj: &mut Trajectory, sys: &System, t: f64, z: &[f64], rate: &[f64]) -> Result<()> {
    traj.push(
        t,
        PhasePoint::from_flat(sys.order, sys.dim, z)?,
        PhasePoint::from_flat(sys.order, sys.dim, rate)?,
    )
}

fn fail(traj: Trajectory, t: f64, e: Error) -> Error {
    Error::Integration {
        time: t,
        reason: e.to_string(),
        partial: Box::new(traj),
    }
}

/// Integrates the Hamilton equations of `h` from `init`.
pub fn integrate(h: &AffineHamiltonianModel, init: &PhasePoint, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let sys = System {
        h,
        order: h.order(),
        dim: h.dim(),
    };
    if init.order() != sys.order || init.dim() != sys.dim {
        return Err(Error::arg("initial point does not match the model"));
    }
    let name = match cfg.method {
        Method::Rk4 => "rk4",
        Method::Rk4Adaptive { .. } => "rk4-step-doubling",
    };
    let mut traj = Trajectory::new(name, cfg.dt, sys.order, sys.dim);
    let mut z = init.to_flat();
    let mut rate = match sys.rate(&z) {
        Ok(r) => r,
        Err(e) => return Err(fail(traj, cfg.t0, e)),
    };
    record(&mut traj, &sys, cfg.t0, &z, &rate)?;
    match cfg.method {
        Method::Rk4 => {
            let n = cfg.steps();
            let dt = (cfg.t1 - cfg.t0) / n as f64;
            for i in 1..=n {
                let t = cfg.t0 + i as f64 * dt;
                let step = sys.rk4_step(&z, &rate, dt).and_then(|zn| {
                    let rn = sys.rate(&zn)?;
                    Ok((zn, rn))
                });
                match step {
                    Ok((zn, rn)) => {
                        z = zn;
                        rate = rn;
                    }
                    Err(e) => return Err(fail(traj, t - dt, e)),
                }
                if i % cfg.stride == 0 {
                    record(&mut traj, &sys, t, &z, &rate)?;
                }
            }
        }
        Method::Rk4Adaptive { tolerance } => {
            let mut t = cfg.t0;
            let mut dt = cfg.dt;
            let mut accepted = 0usize;
            let span = cfg.t1 - cfg.t0;
            while t < cfg.t1 - 1e-12 * span {
                dt = dt.min(cfg.t1 - t);
                let attempt = (|| -> Result<(Vec<f64>, f64)> {
                    let full = sys.rk4_step(&z, &rate, dt)?;
                    let half = sys.rk4_step(&z, &rate, 0.5 * dt)?;
                    let rh = sys.rate(&half)?;
                    let two = sys.rk4_step(&half, &rh, 0.5 * dt)?;
                    let err = two.iter().zip(&full).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / 15.0;
                    Ok((two, err))
                })();
                let (zn, err) = match attempt {
                    Ok(v) => v,
                    Err(e) => return Err(fail(traj, t, e)),
                };
                let factor = if err == 0.0 {
                    2.0
                } else {
                    (0.9 * (tolerance / err).powf(0.2)).clamp(0.2, 2.0)
                };
                if err <= tolerance {
                    let rn = match sys.rate(&zn) {
                        Ok(r) => r,
                        Err(e) => return Err(fail(traj, t, e)),
                    };
                    t += dt;
                    z = zn;
                    rate = rn;
                    accepted += 1;
                    if accepted % cfg.stride == 0 || t >= cfg.t1 - 1e-12 * span {
                        record(&mut traj, &sys, t, &z, &rate)?;
                    }
                } else if dt < 1e-14 * span {
                    return Err(fail(traj, t, Error::Domain("step size underflow".into())));
                }
                dt *= factor;
            }
        }
    }
    Ok(traj)
}
