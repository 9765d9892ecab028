use nalgebra::{DMatrix, DVector};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::taylor::Taylor;

/// Initial jets `x(0), ẋ(0), ẍ(0), x'''(0)`, one vector per order.
#[derive(Clone, Debug, PartialEq)]
pub struct JetIcs {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub j: Vec<f64>,
}

impl JetIcs {
    pub fn new(x: Vec<f64>, v: Vec<f64>, a: Vec<f64>, j: Vec<f64>) -> Result<Self> {
        let m = x.len();
        if m == 0 || v.len() != m || a.len() != m || j.len() != m {
            return Err(Error::arg("initial jets must be nonempty and share one dimension"));
        }
        Ok(JetIcs { x, v, a, j })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn orders(&self) -> [&[f64]; 4] {
        [&self.x, &self.v, &self.a, &self.j]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisFn {
    Power(u32),
    Cos(f64),
    Sin(f64),
    Cosh(f64),
    Sinh(f64),
}

impl BasisFn {
    pub fn eval(&self, t: &Taylor) -> Taylor {
        match *self {
            BasisFn::Power(0) => t.lift(1.0),
            BasisFn::Power(n) => t.powi(n as i32),
            BasisFn::Cos(w) => (t * w).cos(),
            BasisFn::Sin(w) => (t * w).sin(),
            BasisFn::Cosh(w) => (t * w).cosh(),
            BasisFn::Sinh(w) => (t * w).sinh(),
        }
    }

    /// Even/odd pair solving `z'' = γ z`.
    fn oscillator_pair(gamma: f64) -> [BasisFn; 2] {
        if gamma < 0.0 {
            let w = (-gamma).sqrt();
            [BasisFn::Cos(w), BasisFn::Sin(w)]
        } else if gamma > 0.0 {
            let w = gamma.sqrt();
            [BasisFn::Cosh(w), BasisFn::Sinh(w)]
        } else {
            [BasisFn::Power(0), BasisFn::Power(1)]
        }
    }
}

/// `sum_c coeffs[i][c] · basis[c](t)` per component.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub basis: Vec<BasisFn>,
    pub coeffs: Vec<Vec<f64>>,
}

impl Expansion {
    /// Fits coefficients to `derivs[r][i] = d^r x_i/dt^r (0)`, one order per
    /// basis function.
    pub fn fit(basis: Vec<BasisFn>, derivs: &[&[f64]]) -> Result<Self> {
        let n = basis.len();
        if derivs.len() != n {
            return Err(Error::arg(format!("{n} basis functions need {n} initial derivatives")));
        }
        let t = Taylor::variable(0.0, 1.0, n - 1);
        let cols: Vec<Taylor> = basis.iter().map(|b| b.eval(&t)).collect();
        let a = DMatrix::from_fn(n, n, |r, c| cols[c].derivative(r));
        let lu = a.lu();
        let m = derivs[0].len();
        let mut coeffs = vec![vec![0.0; n]; m];
        for i in 0..m {
            let rhs = DVector::from_fn(n, |r, _| derivs[r][i]);
            let sol = lu
                .solve(&rhs)
                .ok_or_else(|| Error::Regularity("initial-condition system is singular".into()))?;
            coeffs[i] = sol.iter().copied().collect();
        }
        Ok(Expansion { basis, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval_taylor(&self, t: &Taylor) -> Vec<Taylor> {
        let cols: Vec<Taylor> = self.basis.iter().map(|b| b.eval(t)).collect();
        self.coeffs
            .iter()
            .map(|row| row.iter().zip(&cols).fold(t.lift(0.0), |acc, (c, b)| acc + b * *c))
            .collect()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.eval_taylor(&Taylor::constant(t, 0))
            .iter()
            .map(Taylor::value)
            .collect()
    }

    fn concat(self, other: Expansion, wa: f64, wb: f64) -> Expansion {
        let mut basis = self.basis;
        basis.extend(other.basis);
        let coeffs = self
            .coeffs
            .into_iter()
            .zip(other.coeffs)
            .map(|(a, b)| a.iter().map(|v| wa * v).chain(b.iter().map(|v| wb * v)).collect())
            .collect();
        Expansion { basis, coeffs }
    }
}

impl Curve for Expansion {
    fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vec<f64>>> {
        let series = self.eval_taylor(&Taylor::variable(t, 1.0, order));
        Ok((0..=order)
            .map(|j| series.iter().map(|s| s.derivative(j)).collect())
            .collect())
    }

    fn time_stencil(&self) -> (f64, usize) {
        (0.02, 5)
    }
}

/// The defining ODE of an [`AnalyticSolution`].
#[derive(Clone, Debug, PartialEq)]
pub enum Ode {
    /// `x'''' + α x'' = 0`.
    Fourth { alpha: f64 },
    /// `x'' = −2(ε₀+ε₁) x − p` and `p'' = −x + ε₁ p`.
    CoupledPair { eps0: f64, eps1: f64 },
    /// `x'' = c`.
    ConstantAcceleration { accel: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticSolution {
    pub regime: String,
    pub ode: Ode,
    pub x: Expansion,
    pub p: Option<Expansion>,
}

impl AnalyticSolution {
    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.x.eval(t)
    }

    pub fn momentum(&self, t: f64) -> Option<Vec<f64>> {
        self.p.as_ref().map(|p| p.eval(t))
    }

    /// Residual of the defining ODE at `t`, per component (and per momentum
    /// component for coupled systems).
    pub fn ode_residual(&self, t: f64) -> Result<Vec<f64>> {
        let x = self.x.derivatives(t, 4)?;
        Ok(match &self.ode {
            Ode::Fourth { alpha } => (0..self.dim()).map(|i| x[4][i] + alpha * x[2][i]).collect(),
            Ode::ConstantAcceleration { accel } => (0..self.dim()).map(|i| x[2][i] - accel[i]).collect(),
            Ode::CoupledPair { eps0, eps1 } => {
                let p = self
                    .p
                    .as_ref()
                    .ok_or_else(|| Error::arg("coupled solution without momentum"))?
                    .derivatives(t, 2)?;
                let first = (0..self.dim()).map(|i| x[2][i] + 2.0 * (eps0 + eps1) * x[0][i] + p[0][i]);
                let second = (0..self.dim()).map(|i| p[2][i] + x[0][i] - eps1 * p[0][i]);
                first.chain(second).collect()
            }
        })
    }
}

impl Curve for AnalyticSolution {
    fn dim(&self) -> usize {
        self.x.dim()
    }

    fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vec<f64>>> {
        self.x.derivatives(t, order)
    }

    fn time_stencil(&self) -> (f64, usize) {
        self.x.time_stencil()
    }
}

fn check_eps1(eps1: f64) -> Result<()> {
    if eps1 == 0.0 || !eps1.is_finite() {
        return Err(Error::arg("eps1 must be finite and nonzero"));
    }
    Ok(())
}

/// Solutions of `x'''' + α x'' = 0` with `α = −ε₀/ε₁`, the basis picked from
/// the characteristic roots of `r⁴ + α r² = 0`.
pub fn example1_solution(eps0: f64, eps1: f64, ics: &JetIcs) -> Result<AnalyticSolution> {
    check_eps1(eps1)?;
    let alpha = -eps0 / eps1;
    let (regime, tail) = if alpha == 0.0 {
        ("polynomial", [BasisFn::Power(2), BasisFn::Power(3)])
    } else if alpha > 0.0 {
        (
            "trigonometric",
            [BasisFn::Cos(alpha.sqrt()), BasisFn::Sin(alpha.sqrt())],
        )
    } else {
        (
            "hyperbolic",
            [BasisFn::Cosh((-alpha).sqrt()), BasisFn::Sinh((-alpha).sqrt())],
        )
    };
    let mut basis = vec![BasisFn::Power(0), BasisFn::Power(1)];
    basis.extend(tail);
    Ok(AnalyticSolution {
        regime: regime.into(),
        ode: Ode::Fourth { alpha },
        x: Expansion::fit(basis, &ics.orders())?,
        p: None,
    })
}

/// Roots `β₁ < β₂` of `β² + (2ε₀+3ε₁) β − 1 = 0` and `γ = −2(ε₀+ε₁) − β`.
pub fn coupled_pair_constants(eps0: f64, eps1: f64) -> ([f64; 2], [f64; 2]) {
    let b = 2.0 * eps0 + 3.0 * eps1;
    let disc = (b * b + 4.0).sqrt();
    let beta = [(-b - disc) / 2.0, (-b + disc) / 2.0];
    let gamma = beta.map(|bt| -2.0 * (eps0 + eps1) - bt);
    (beta, gamma)
}

/// Solutions of the coupled system `x'' = −2(ε₀+ε₁) x − p`,
/// `p'' = −x + ε₁ p` obtained through `z = x + β p`, `z'' = γ z`. The
/// momentum and its rate at `t = 0` are read off the jets through the first
/// equation.
pub fn example3_spherical_solution(eps0: f64, eps1: f64, ics: &JetIcs) -> Result<AnalyticSolution> {
    check_eps1(eps1)?;
    let c = 2.0 * (eps0 + eps1);
    let p0: Vec<f64> = ics.a.iter().zip(&ics.x).map(|(a, x)| -a - c * x).collect();
    let p1: Vec<f64> = ics.j.iter().zip(&ics.v).map(|(j, v)| -j - c * v).collect();
    let ([b1, b2], [g1, g2]) = coupled_pair_constants(eps0, eps1);
    let mix = |b: f64| -> (Vec<f64>, Vec<f64>) {
        (
            ics.x.iter().zip(&p0).map(|(x, p)| x + b * p).collect(),
            ics.v.iter().zip(&p1).map(|(v, p)| v + b * p).collect(),
        )
    };
    let (f0, f1) = mix(b1);
    let (h0, h1) = mix(b2);
    let f = Expansion::fit(BasisFn::oscillator_pair(g1).to_vec(), &[&f0, &f1])?;
    let g = Expansion::fit(BasisFn::oscillator_pair(g2).to_vec(), &[&h0, &h1])?;
    let d = b2 - b1;
    let x = f.clone().concat(g.clone(), b2 / d, -b1 / d);
    let p = f.concat(g, -1.0 / d, 1.0 / d);
    Ok(AnalyticSolution {
        regime: format!("gamma = ({g1:.6}, {g2:.6})"),
        ode: Ode::CoupledPair { eps0, eps1 },
        x,
        p: Some(p),
    })
}

/// `x_i(t) = −¼ α_i (ε₀+ε₁) t² + v_i t + x_i`.
pub fn example3_linear_solution(
    eps0: f64,
    eps1: f64,
    alpha: &[f64],
    x0: &[f64],
    v0: &[f64],
) -> Result<AnalyticSolution> {
    let m = alpha.len();
    if m == 0 || x0.len() != m || v0.len() != m {
        return Err(Error::arg("coefficients and initial data must share one dimension"));
    }
    if alpha.iter().all(|a| *a == 0.0) {
        return Err(Error::arg("linear potential needs a nonzero coefficient"));
    }
    let accel: Vec<f64> = alpha.iter().map(|a| -0.5 * a * (eps0 + eps1)).collect();
    let basis = vec![BasisFn::Power(0), BasisFn::Power(1), BasisFn::Power(2)];
    let coeffs = (0..m).map(|i| vec![x0[i], v0[i], 0.5 * accel[i]]).collect();
    let regime = if eps0 + eps1 == 0.0 { "line" } else { "parabola" };
    Ok(AnalyticSolution {
        regime: regime.into(),
        ode: Ode::ConstantAcceleration { accel },
        x: Expansion { basis, coeffs },
        p: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ics() -> JetIcs {
        JetIcs::new(vec![0.1, -0.2], vec![0.5, 0.3], vec![-0.4, 0.2], vec![0.3, 0.1]).unwrap()
    }

    #[test]
    fn example1_fits_initial_jets_in_every_regime() {
        for (e0, e1) in [(0.0, 1.0), (1.0, 1.0), (-1.0, 1.0)] {
            let s = example1_solution(e0, e1, &ics()).unwrap();
            let d = s.derivatives(0.0, 3).unwrap();
            for (r, want) in ics().orders().iter().enumerate() {
                for i in 0..2 {
                    assert!((d[r][i] - want[i]).abs() < 1e-13);
                }
            }
            for n in 0..=100 {
                let r = s.ode_residual(n as f64 / 100.0).unwrap();
                assert!(r.iter().all(|v| v.abs() < 1e-10), "{r:?}");
            }
        }
    }

    #[test]
    fn coupled_pair_substitution() {
        let s = example3_spherical_solution(1.0, 1.0, &ics()).unwrap();
        for n in 0..=20 {
            let r = s.ode_residual(n as f64 / 20.0).unwrap();
            assert!(r.iter().all(|v| v.abs() < 1e-9), "{r:?}");
        }
    }

    #[test]
    fn straight_line_when_coefficients_cancel() {
        let s = example3_linear_solution(1.0, -1.0, &[1.0, 2.0], &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(s.regime, "line");
        assert!(s.ode_residual(0.5).unwrap().iter().all(|v| v.abs() < 1e-12));
    }
}
