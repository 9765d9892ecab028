//! Scalar fields and vector maps on flat coordinate vectors, with derivative
//! oracles.
//!
//! `Analytic` variants are closures over [`Taylor`] series and give exact
//! directional derivatives of any order; `Numeric` variants are plain `f64`
//! closures differentiated by central finite differences.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::fd;
use crate::taylor::{factorial, Taylor};

pub type TaylorScalarFn = dyn Fn(&[Taylor]) -> Taylor + Send + Sync;
pub type RealScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
pub type TaylorVectorFn = dyn Fn(&[Taylor]) -> Vec<Taylor> + Send + Sync;
pub type RealVectorFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

fn seeded(z: &[f64], v: &[f64], degree: usize) -> Vec<Taylor> {
    z.iter()
        .zip(v)
        .map(|(zi, vi)| Taylor::variable(*zi, *vi, degree))
        .collect()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Signed subset sums used by the polarization identity
/// `D^m F[v1..vm] = (1/m!) sum_S (-1)^(m-|S|) d^m/ds^m F(z + s sum_{i in S} v_i)`.
fn polarization_terms(vs: &[&[f64]]) -> Vec<(f64, Vec<f64>)> {
    let m = vs.len();
    let n = vs.first().map(|v| v.len()).unwrap_or(0);
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << m) {
        let size = mask.count_ones() as usize;
        let sign = if (m - size) % 2 == 0 { 1.0 } else { -1.0 };
        let mut w = vec![0.0; n];
        for (i, v) in vs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (wj, vj) in w.iter_mut().zip(v.iter()) {
                    *wj += vj;
                }
            }
        }
        out.push((sign, w));
    }
    out
}

#[derive(Clone)]
pub enum ScalarField {
    Analytic { arity: usize, f: Arc<TaylorScalarFn> },
    Numeric { arity: usize, f: Arc<RealScalarFn> },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Analytic { arity, .. } => write!(f, "ScalarField::Analytic({arity})"),
            ScalarField::Numeric { arity, .. } => write!(f, "ScalarField::Numeric({arity})"),
        }
    }
}

impl ScalarField {
    pub fn analytic(arity: usize, f: impl Fn(&[Taylor]) -> Taylor + Send + Sync + 'static) -> Self {
        ScalarField::Analytic { arity, f: Arc::new(f) }
    }

    pub fn numeric(arity: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Numeric { arity, f: Arc::new(f) }
    }

    pub fn arity(&self) -> usize {
        match self {
            ScalarField::Analytic { arity, .. } | ScalarField::Numeric { arity, .. } => *arity,
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, ScalarField::Analytic { .. })
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        match self {
            ScalarField::Analytic { f, .. } => {
                let t: Vec<Taylor> = z.iter().map(|v| Taylor::constant(*v, 0)).collect();
                f(&t).value()
            }
            ScalarField::Numeric { f, .. } => f(z),
        }
    }

    /// Evaluates on series inputs; `None` for numeric fields.
    pub fn eval_taylor(&self, z: &[Taylor]) -> Option<Taylor> {
        match self {
            ScalarField::Analytic { f, .. } => Some(f(z)),
            ScalarField::Numeric { .. } => None,
        }
    }

    /// `d^order/ds^order f(z + s v)` at `s = 0`.
    pub fn directional(&self, z: &[f64], v: &[f64], order: usize) -> f64 {
        match self {
            ScalarField::Analytic { f, .. } => f(&seeded(z, v, order)).derivative(order),
            ScalarField::Numeric { f, .. } => {
                let vn = sup_norm(v);
                if order > 0 && vn == 0.0 {
                    return 0.0;
                }
                if order == 0 {
                    return f(z);
                }
                let h = fd::step(order, sup_norm(z)) / vn;
                let g = |s: f64| {
                    let p: Vec<f64> = z.iter().zip(v).map(|(a, b)| a + s * b).collect();
                    f(&p)
                };
                fd::derivative_1d(g, order, h).unwrap_or(f64::NAN)
            }
        }
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let n = z.len();
        match self {
            ScalarField::Analytic { .. } => (0..n).map(|i| self.directional(z, &unit(n, i), 1)).collect(),
            ScalarField::Numeric { f, .. } => {
                let mut p = z.to_vec();
                (0..n)
                    .map(|i| {
                        let h = fd::step(1, z[i]);
                        p[i] = z[i] + h;
                        let fp = f(&p);
                        p[i] = z[i] - h;
                        let fm = f(&p);
                        p[i] = z[i];
                        (fp - fm) / (2.0 * h)
                    })
                    .collect()
            }
        }
    }

    /// Block `d^2 f / dz_i dz_j` for `i` in `rows`, `j` in `cols`.
    pub fn hessian_block(&self, z: &[f64], rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> DMatrix<f64> {
        let n = z.len();
        let mut out = DMatrix::zeros(rows.len(), cols.len());
        match self {
            ScalarField::Analytic { .. } => {
                let diag: Vec<f64> = (0..n)
                    .map(|i| {
                        if rows.contains(&i) || cols.contains(&i) {
                            self.directional(z, &unit(n, i), 2)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                for (a, i) in rows.clone().enumerate() {
                    for (b, j) in cols.clone().enumerate() {
                        out[(a, b)] = if i == j {
                            diag[i]
                        } else {
                            let mut w = unit(n, i);
                            w[j] = 1.0;
                            0.5 * (self.directional(z, &w, 2) - diag[i] - diag[j])
                        };
                    }
                }
            }
            ScalarField::Numeric { f, .. } => {
                let f0 = f(z);
                let mut p = z.to_vec();
                for (a, i) in rows.clone().enumerate() {
                    for (b, j) in cols.clone().enumerate() {
                        let hi = fd::step(2, z[i]);
                        out[(a, b)] = if i == j {
                            p[i] = z[i] + hi;
                            let fp = f(&p);
                            p[i] = z[i] - hi;
                            let fm = f(&p);
                            p[i] = z[i];
                            (fp - 2.0 * f0 + fm) / (hi * hi)
                        } else {
                            let hj = fd::step(2, z[j]);
                            let mut corner = |si: f64, sj: f64| {
                                p[i] = z[i] + si * hi;
                                p[j] = z[j] + sj * hj;
                                let v = f(&p);
                                p[i] = z[i];
                                p[j] = z[j];
                                v
                            };
                            (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                                / (4.0 * hi * hj)
                        };
                    }
                }
            }
        }
        out
    }

    pub fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        self.hessian_block(z, 0..z.len(), 0..z.len())
    }

    /// Symmetric multilinear derivative `D^m f(z)[v1, .., vm]`.
    pub fn multilinear(&self, z: &[f64], vs: &[&[f64]]) -> f64 {
        let m = vs.len();
        if m == 0 {
            return self.value(z);
        }
        let acc: f64 = polarization_terms(vs)
            .into_iter()
            .map(|(sign, w)| sign * self.directional(z, &w, m))
            .sum();
        acc / factorial(m)
    }
}

#[derive(Clone)]
pub enum VectorMap {
    Analytic {
        arity: usize,
        out: usize,
        f: Arc<TaylorVectorFn>,
    },
    Numeric {
        arity: usize,
        out: usize,
        f: Arc<RealVectorFn>,
    },
}

impl fmt::Debug for VectorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "VectorMap::{}({} -> {})",
            if self.is_analytic() { "Analytic" } else { "Numeric" },
            self.arity(),
            self.out_dim()
        )
    }
}

impl VectorMap {
    pub fn analytic(arity: usize, out: usize, f: impl Fn(&[Taylor]) -> Vec<Taylor> + Send + Sync + 'static) -> Self {
        VectorMap::Analytic {
            arity,
            out,
            f: Arc::new(f),
        }
    }

    pub fn numeric(arity: usize, out: usize, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        VectorMap::Numeric {
            arity,
            out,
            f: Arc::new(f),
        }
    }

    /// The identity map on `R^n`.
    pub fn identity(n: usize) -> Self {
        VectorMap::analytic(n, n, |z| z.to_vec())
    }

    pub fn arity(&self) -> usize {
        match self {
            VectorMap::Analytic { arity, .. } | VectorMap::Numeric { arity, .. } => *arity,
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            VectorMap::Analytic { out, .. } | VectorMap::Numeric { out, .. } => *out,
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, VectorMap::Analytic { .. })
    }

    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        match self {
            VectorMap::Analytic { f, .. } => {
                let t: Vec<Taylor> = z.iter().map(|v| Taylor::constant(*v, 0)).collect();
                f(&t).iter().map(Taylor::value).collect()
            }
            VectorMap::Numeric { f, .. } => f(z),
        }
    }

    pub fn eval_taylor(&self, z: &[Taylor]) -> Option<Vec<Taylor>> {
        match self {
            VectorMap::Analytic { f, .. } => Some(f(z)),
            VectorMap::Numeric { .. } => None,
        }
    }

    /// `d^order/ds^order F(z + s v)` at `s = 0`, componentwise.
    pub fn directional(&self, z: &[f64], v: &[f64], order: usize) -> Vec<f64> {
        match self {
            VectorMap::Analytic { f, .. } => f(&seeded(z, v, order)).iter().map(|t| t.derivative(order)).collect(),
            VectorMap::Numeric { f, out, .. } => {
                if order == 0 {
                    return f(z);
                }
                let vn = sup_norm(v);
                if vn == 0.0 {
                    return vec![0.0; *out];
                }
                let h = fd::step(order, sup_norm(z)) / vn;
                let g = |s: f64| -> crate::error::Result<Vec<f64>> {
                    let p: Vec<f64> = z.iter().zip(v).map(|(a, b)| a + s * b).collect();
                    Ok(f(&p))
                };
                fd::derivative_1d_vec(g, order, h, fd::minimal_half_width(order))
                    .unwrap_or_else(|_| vec![f64::NAN; *out])
            }
        }
    }

    /// Jacobian, `out x arity`.
    pub fn jacobian(&self, z: &[f64]) -> DMatrix<f64> {
        let n = z.len();
        let mut jac = DMatrix::zeros(self.out_dim(), n);
        for j in 0..n {
            let col = match self {
                VectorMap::Analytic { .. } => self.directional(z, &unit(n, j), 1),
                VectorMap::Numeric { f, .. } => {
                    let h = fd::step(1, z[j]);
                    let mut p = z.to_vec();
                    p[j] = z[j] + h;
                    let fp = f(&p);
                    p[j] = z[j] - h;
                    let fm = f(&p);
                    fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
                }
            };
            for (i, c) in col.into_iter().enumerate() {
                jac[(i, j)] = c;
            }
        }
        jac
    }

    /// Symmetric multilinear derivative `D^m F(z)[v1, .., vm]`.
    pub fn multilinear(&self, z: &[f64], vs: &[&[f64]]) -> Vec<f64> {
        let m = vs.len();
        if m == 0 {
            return self.eval(z);
        }
        let mut acc = vec![0.0; self.out_dim()];
        for (sign, w) in polarization_terms(vs) {
            if sup_norm(&w) == 0.0 {
                continue;
            }
            for (a, d) in acc.iter_mut().zip(self.directional(z, &w, m)) {
                *a += sign * d;
            }
        }
        let scale = factorial(m);
        acc.into_iter().map(|a| a / scale).collect()
    }
}
