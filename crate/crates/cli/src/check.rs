//! Residual check suites over an integrated scenario.
//!
//! Every suite integrates the configured scenario with fixed-step RK4 and
//! stride 1, samples a handful of states, and reports one line per check.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use ostro::duality::{
    affine_change_of_chart, dual_affine_hamiltonian, legendre_map, legendre_star_map, pullback_lagrangian, NewtonConfig,
};
use ostro::dynamics::{
    energy, euler_lagrange_residual, hamilton_residual_condensed, hamilton_rhs, integrate, lagrangian_energy,
    lagrangian_rhs, CotangentCurve, IntegratorConfig, Method, Trajectory, TrajectoryStencil,
};
use ostro::field::VectorMap;
use ostro::jetspace::{
    project_pi_prime, transform_jet, transform_momenta, ChartTransition, DualJetPoint, ExtendedJetPoint, JetPoint,
    PhasePoint,
};
use ostro::scenarios::Scenario;
use ostro::taylor::Taylor;
use ostro::zermelo::{zermelo_conditions, zermelo_curve_condition};

use crate::config::ScenarioConfig;
use crate::error::{numerical, CliError};
use crate::run::build;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Duality,
    EulerLagrange,
    Hamilton,
    Zermelo,
    Transform,
    Energy,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Duality,
        Suite::EulerLagrange,
        Suite::Hamilton,
        Suite::Zermelo,
        Suite::Transform,
        Suite::Energy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Duality => "duality",
            Suite::EulerLagrange => "euler-lagrange",
            Suite::Hamilton => "hamilton",
            Suite::Zermelo => "zermelo",
            Suite::Transform => "transform",
            Suite::Energy => "energy",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        Suite::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|v| v.name()).collect();
            CliError::Usage(format!("unknown suite '{s}', expected one of {}", names.join(", ")))
        })
    }
}

/// One report line. With `expect_nonzero` the check passes when the
/// residual exceeds the tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub expect_nonzero: bool,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        if self.expect_nonzero {
            self.residual > self.tol
        } else {
            self.residual <= self.tol
        }
    }
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} residual={:.3e} tol={:.1e} {}",
            self.name,
            self.residual,
            self.tol,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// States used for pointwise checks.
const SAMPLES: usize = 11;

struct Context<'a> {
    cfg: &'a ScenarioConfig,
    scenario: Scenario,
    init: PhasePoint,
    traj: Trajectory,
    newton: NewtonConfig,
}

impl Context<'_> {
    fn line(&self, name: &str, residual: f64, default_tol: f64) -> CheckLine {
        CheckLine {
            name: name.into(),
            residual,
            tol: self.cfg.tolerance(name, default_tol),
            expect_nonzero: false,
        }
    }

    fn nonzero(&self, name: &str, residual: f64, default_tol: f64) -> CheckLine {
        CheckLine {
            expect_nonzero: true,
            ..self.line(name, residual, default_tol)
        }
    }

    fn samples(&self) -> Vec<&PhasePoint> {
        let states = self.traj.states();
        let n = states.len();
        let count = SAMPLES.min(n);
        (0..count)
            .map(|i| &states[if count == 1 { 0 } else { i * (n - 1) / (count - 1) }])
            .collect()
    }
}

fn sup(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m: f64, v| {
        if m.is_nan() || v.is_nan() {
            f64::NAN
        } else {
            m.max(v.abs())
        }
    })
}

/// Runs a suite and writes its report. Any failed line makes the result a
/// numerical error; the full report is written first.
pub fn check(cfg: &ScenarioConfig, suite: Suite, out: &mut dyn Write) -> Result<(), CliError> {
    let (scenario, init) = build(cfg)?;
    let icfg = IntegratorConfig {
        method: Method::Rk4,
        stride: 1,
        ..cfg.integrator.clone()
    };
    let traj = integrate(&scenario.hamiltonian, &init, &icfg).map_err(numerical)?;
    let ctx = Context {
        cfg,
        scenario,
        init,
        traj,
        newton: NewtonConfig::default(),
    };
    let lines = match suite {
        Suite::Duality => duality(&ctx),
        Suite::EulerLagrange => euler_lagrange(&ctx),
        Suite::Hamilton => hamilton(&ctx),
        Suite::Zermelo => zermelo(&ctx),
        Suite::Transform => transform(&ctx),
        Suite::Energy => energy_suite(&ctx),
    }
    .map_err(numerical)?;
    for l in &lines {
        writeln!(out, "{l}")?;
    }
    let failed = lines.iter().filter(|l| !l.passed()).count();
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} of {} checks failed",
            lines.len()
        )));
    }
    Ok(())
}

fn duality(ctx: &Context) -> ostro::Result<Vec<CheckLine>> {
    let (l, h) = (&ctx.scenario.lagrangian, &ctx.scenario.hamiltonian);
    let (mut energy_gap, mut field_gap, mut round_trip) = (0.0f64, 0.0f64, 0.0f64);
    for pt in ctx.samples() {
        energy_gap = sup([energy_gap, lagrangian_energy(l, pt, &ctx.newton)? - energy(h, pt)?]);
        let a = lagrangian_rhs(l, pt, &ctx.newton)?.to_flat();
        let b = hamilton_rhs(h, pt)?.to_flat();
        field_gap = sup([field_gap, sup(a.iter().zip(&b).map(|(u, v)| u - v))]);
        // Legendre* then Legendre returns the momentum.
        let d = project_pi_prime(pt);
        let back = legendre_map(l, &legendre_star_map(h, &d)?)?;
        round_trip = sup([round_trip, sup(back.pk().iter().zip(d.pk()).map(|(u, v)| u - v))]);
    }
    Ok(vec![
        ctx.line("energy_gap", energy_gap, 1e-7),
        ctx.line("vector_field_gap", field_gap, 1e-7),
        ctx.line("legendre_round_trip", round_trip, 1e-7),
    ])
}

fn euler_lagrange(ctx: &Context) -> ostro::Result<Vec<CheckLine>> {
    let l = &ctx.scenario.lagrangian;
    let (curve, ts) = TrajectoryStencil::default().base_curve(&ctx.traj, 2)?;
    let r = euler_lagrange_residual(l, &curve, &ts)?;
    let mut lines = vec![ctx.line("euler_lagrange_trajectory", sup(r.into_iter().flatten()), 1e-5)];
    if let Some(sol) = ctx.scenario.analytic_solution(&ctx.cfg.initial)? {
        let r = euler_lagrange_residual(l, &sol, &ts)?;
        lines.push(ctx.line("euler_lagrange_closed_form", sup(r.into_iter().flatten()), 1e-6));
    }
    Ok(lines)
}

fn hamilton(ctx: &Context) -> ostro::Result<Vec<CheckLine>> {
    let stencil = TrajectoryStencil::default();
    let traj = &ctx.traj;
    let k = traj.order();
    let (x, ts) = stencil.base_curve(traj, 2)?;
    let times = traj.times();
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let stride = ((stencil.spacing / dt).round() as usize).max(1);
    let p = traj.momentum_curve(k - 1, stride, stencil.half_width)?;
    let gamma = CotangentCurve::new(Arc::new(x), Arc::new(p))?;
    let res = hamilton_residual_condensed(&ctx.scenario.hamiltonian, &gamma, &ts)?;
    let mut lines = vec![
        ctx.line(
            "hamilton_momentum",
            sup(res.iter().flat_map(|r| r.momentum.clone())),
            1e-5,
        ),
        ctx.line(
            "hamilton_velocity",
            sup(res.iter().flat_map(|r| r.velocity.clone())),
            1e-5,
        ),
    ];
    if let Some(sol) = ctx.scenario.analytic_solution(&ctx.cfg.initial)? {
        let err = sup(times.iter().zip(traj.states()).flat_map(|(t, s)| {
            let exact = sol.eval(*t);
            s.x().iter().zip(exact).map(|(a, b)| a - b).collect::<Vec<_>>()
        }));
        lines.push(ctx.line("closed_form_error", err, 1e-6));
    }
    Ok(lines)
}

fn zermelo(ctx: &Context) -> ostro::Result<Vec<CheckLine>> {
    let h = &ctx.scenario.hamiltonian;
    let k = h.order();
    let mut primary = 0.0f64;
    let mut alpha = vec![0.0f64; k.saturating_sub(2)];
    let mut curve = 0.0f64;
    for pt in ctx.samples() {
        let d = project_pi_prime(pt);
        let c = zermelo_conditions(h, &d)?;
        primary = sup([primary, c.primary]);
        for (a, r) in c.alpha {
            alpha[a - 2] = sup([alpha[a - 2], r]);
        }
        curve = sup([curve, zermelo_curve_condition(pt.jet().level(1), d.pk())]);
    }
    let mut lines = vec![ctx.nonzero("zermelo_primary_nonzero", primary, 1e-6)];
    for (i, r) in alpha.into_iter().enumerate() {
        lines.push(ctx.nonzero(&format!("zermelo_alpha{}_nonzero", i + 2), r, 1e-6));
    }
    lines.push(ctx.nonzero("zermelo_curve_nonzero", curve, 1e-6));
    Ok(lines)
}

fn energy_suite(ctx: &Context) -> ostro::Result<Vec<CheckLine>> {
    let h = &ctx.scenario.hamiltonian;
    let e0 = energy(h, &ctx.init)?;
    let mut drift = 0.0f64;
    for s in ctx.traj.states() {
        drift = sup([drift, energy(h, s)? - e0]);
    }
    Ok(vec![ctx.line("energy_drift", drift, 1e-8)])
}

/// `x1 += c x2²` in dimension two or more; `x ↦ sinh x` on the line.
fn nonlinear_chart(m: usize, c: f64, first: usize) -> ostro::Result<ChartTransition> {
    if m == 1 {
        let fwd = VectorMap::analytic(1, 1, |z: &[Taylor]| vec![z[0].sinh()]);
        let inv = VectorMap::analytic(1, 1, |z: &[Taylor]| vec![z[0].asinh()]);
        return ChartTransition::new(fwd, inv);
    }
    let (i, j) = (first, 1 - first);
    let shear = move |sign: f64| {
        move |z: &[Taylor]| -> Vec<Taylor> {
            let mut out = z.to_vec();
            out[i] = &z[i] + &(&z[j] * &z[j]) * (sign * c);
            out
        }
    };
    ChartTransition::new(
        VectorMap::analytic(m, m, shear(1.0)),
        VectorMap::analytic(m, m, shear(-1.0)),
    )
}

fn transform(ctx: &Context) -> ostro::Result<Vec<CheckLine>> {
    let m = ctx.scenario.dim();
    let c = ctx.cfg.shear;
    let t = nonlinear_chart(m, c, 0)?;
    let t2 = if m == 1 {
        ChartTransition::linear(DMatrix::from_element(1, 1, 2.0))?
    } else {
        nonlinear_chart(m, -c, 1)?
    };
    let (l, h) = (&ctx.scenario.lagrangian, &ctx.scenario.hamiltonian);
    let k = h.order();
    let moved = affine_change_of_chart(h, &t)?;
    let pulled = dual_affine_hamiltonian(&pullback_lagrangian(l, &t)?, &ctx.newton)?;

    let (mut cocycle, mut glue, mut pairing, mut contra, mut rule) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for pt in ctx.samples() {
        let primed = transform_momenta(&t, pt)?;
        glue = sup([glue, energy(&moved, &primed)? - energy(h, pt)?]);

        let rate = hamilton_rhs(h, pt)?;
        // d/dt y^(k-1) = k y^(k).
        let top = rate.jet().level(k - 1).iter().map(|v| v / k as f64).collect();
        let e = ExtendedJetPoint::new(pt.jet().clone(), top)?;
        let stepwise = transform_jet(&t2, &transform_jet(&t, &e)?)?;
        let direct = transform_jet(&t.then(&t2)?, &e)?;
        cocycle = sup([
            cocycle,
            sup(stepwise.to_flat().iter().zip(direct.to_flat()).map(|(a, b)| a - b)),
        ]);

        // p'·δy' = p·δy along the flow direction.
        let jet = pt.jet().to_flat();
        let dir = rate.jet().to_flat();
        let push = |s: f64| -> ostro::Result<Vec<f64>> {
            let w: Vec<f64> = jet.iter().zip(&dir).map(|(j, v)| j + s * v).collect();
            Ok(transform_jet(&t, &JetPoint::from_flat(k, m, &w)?)?.to_flat())
        };
        let tangent = ostro::fd::derivative_1d_vec(push, 1, 1e-3, 4)?;
        let lhs: f64 = primed.momenta().concat().iter().zip(&tangent).map(|(a, b)| a * b).sum();
        let rhs: f64 = pt.momenta().concat().iter().zip(&dir).map(|(a, b)| a * b).sum();
        pairing = sup([pairing, lhs - rhs]);

        let d = project_pi_prime(&primed);
        let j = t.jacobian(pt.x())?;
        let p = (j.transpose() * DVector::from_column_slice(d.pk())).as_slice().to_vec();
        let want = &j * h.p_hessian(&DualJetPoint::new(pt.jet().clone(), p)?)? * j.transpose();
        contra = sup([contra, (moved.p_hessian(&d)? - want).abs().max()]);

        rule = sup([rule, moved.value(&d)? - pulled.value(&d)?]);
    }

    // Integrate in both charts over a short window and compare through the
    // transition.
    let icfg = IntegratorConfig {
        method: Method::Rk4,
        stride: 1,
        t1: ctx.cfg.integrator.t1.min(ctx.cfg.integrator.t0 + 1.0),
        ..ctx.cfg.integrator.clone()
    };
    let a = integrate(h, &ctx.init, &icfg)?;
    let b = integrate(&moved, &transform_momenta(&t, &ctx.init)?, &icfg)?;
    let mut flow = 0.0f64;
    for (sa, sb) in a.states().iter().zip(b.states()) {
        let ta = transform_momenta(&t, sa)?.to_flat();
        flow = sup([flow, sup(ta.iter().zip(sb.to_flat()).map(|(u, v)| u - v))]);
    }
    Ok(vec![
        ctx.line("transform_cocycle", cocycle, 1e-6),
        ctx.line("transform_energy", glue, 1e-6),
        ctx.line("transform_pairing", pairing, 1e-6),
        ctx.line("transform_hessian", contra, 1e-6),
        ctx.line("transform_affine_rule", rule, 1e-6),
        ctx.line("transform_flow", flow, 1e-6),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
        }
        assert_eq!(Suite::parse("nope").unwrap_err().code(), 2);
    }

    #[test]
    fn line_format() {
        let l = CheckLine {
            name: "energy_gap".into(),
            residual: 1.25e-9,
            tol: 1e-7,
            expect_nonzero: false,
        };
        assert_eq!(l.to_string(), "energy_gap residual=1.250e-9 tol=1.0e-7 PASS");
        let z = CheckLine {
            expect_nonzero: true,
            ..l
        };
        assert!(z.to_string().ends_with("FAIL"));
        let nan = CheckLine {
            residual: f64::NAN,
            ..z.clone()
        };
        assert!(!nan.passed());
        assert!(!CheckLine {
            expect_nonzero: false,
            ..nan
        }
        .passed());
    }
}
