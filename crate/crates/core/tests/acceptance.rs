//! Acceptance suite: one line per criterion. Runs without the libtest
//! harness so that each criterion reports its measured numbers.
//!
//! Criteria listed in `KNOWN_FAILURES` are expected to fail; the binary exits
//! nonzero if any other criterion fails or if a known failure passes.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::{convex_quartic, cosh_family, max_abs_diff, quadratic_chart, shared};
use nalgebra::{DMatrix, DVector, Matrix2};
use ostro::curve::{Curve, Reparametrization};
use ostro::duality::*;
use ostro::dynamics::*;
use ostro::jetspace::*;
use ostro::scenarios::*;
use ostro::taylor::{norm_sq, Taylor};
use ostro::zermelo::{reparametrization_gap, zermelo_residual_primary, zermelo_sensitivities};
use ostro::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: [usize; 3] = [2, 3, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(r: &mut ChaCha8Rng, n: usize, half: f64) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-half..half)).collect()
}

fn scenario(name: &str, eps0: f64, eps1: f64, potential: Potential) -> Result<Scenario> {
    let mut p = ScenarioParams::new(eps0, eps1, 2);
    p.potential = potential;
    Scenario::from_registry(name, &p)
}

fn ics() -> JetIcs {
    JetIcs::new(vec![0.3, -0.1], vec![0.2, 0.5], vec![-0.4, 0.1], vec![0.05, -0.2]).unwrap()
}

fn sup_error(traj: &Trajectory, exact: impl Fn(f64) -> Vec<f64>) -> f64 {
    traj.times()
        .iter()
        .zip(traj.states())
        .fold(0.0, |m, (t, s)| m.max(max_abs_diff(s.x(), &exact(*t))))
}

fn max_drift(h: &AffineHamiltonianModel, traj: &Trajectory) -> Result<f64> {
    let e0 = energy(h, &traj.states()[0])?;
    traj.states()
        .iter()
        .try_fold(0.0f64, |m, s| Ok(m.max((energy(h, s)? - e0).abs())))
}

/// Example 1 against the closed form in all three regimes.
fn criterion_1() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    for (e0, e1) in [(0.0, 1.0), (1.0, 1.0), (-1.0, 1.0)] {
        let start = Instant::now();
        let s = scenario("example1", e0, e1, Potential::Zero)?;
        let sol = example1_solution(e0, e1, &ics())?;
        let traj = integrate(
            &s.hamiltonian,
            &s.initial_state(&ics())?,
            &IntegratorConfig::rk4(0.0, 1.0, 1e-3),
        )?;
        worst = worst.max(sup_error(&traj, |t| sol.eval(t)));
        slowest = slowest.max(start.elapsed().as_secs_f64());
    }
    outcome(
        worst <= 1e-6 && slowest < 1.0,
        format!("sup error {worst:.2e} (tol 1e-6), slowest case {slowest:.3} s (limit 1 s)"),
    )
}

/// Example 3 with a linear potential: parabolas, and lines when ε₀+ε₁ = 0.
fn criterion_2() -> Result<Outcome> {
    let alpha = vec![1.0, -0.5];
    let (x0, v0) = (vec![0.0, 1.0], vec![1.0, 0.0]);
    let mut parts = Vec::new();
    let mut pass = true;
    for (e0, e1) in [(1.0, 1.0), (-2.0, 1.0)] {
        let s = scenario("example3-linear", e0, e1, Potential::Linear(alpha.clone()))?;
        let sol = example3_linear_solution(e0, e1, &alpha, &x0, &v0)?;
        let d = sol.derivatives(0.0, 3)?;
        let start = JetIcs::new(d[0].clone(), d[1].clone(), d[2].clone(), d[3].clone())?;
        let traj = integrate(
            &s.hamiltonian,
            &s.initial_state(&start)?,
            &IntegratorConfig::rk4(0.0, 1.0, 1e-3),
        )?;
        let err = sup_error(&traj, |t| sol.eval(t));
        pass &= err <= 1e-8;
        parts.push(format!("({e0},{e1}) parabola error {err:.2e}"));
    }
    let s = scenario("example3-linear", 1.0, -1.0, Potential::Linear(alpha.clone()))?;
    let start = JetIcs::new(x0.clone(), v0.clone(), vec![0.0; 2], vec![0.0; 2])?;
    let dt = 1e-2;
    let traj = integrate(
        &s.hamiltonian,
        &s.initial_state(&start)?,
        &IntegratorConfig::rk4(0.0, 1.0, dt),
    )?;
    let xs: Vec<&[f64]> = traj.states().iter().map(|s| s.x()).collect();
    let second = xs
        .windows(3)
        .flat_map(|w| (0..2).map(move |i| ((w[2][i] - 2.0 * w[1][i] + w[0][i]) / (dt * dt)).abs()))
        .fold(0.0f64, f64::max);
    pass &= second < 1e-10;
    parts.push(format!("(1,-1) line second difference {second:.2e}"));
    outcome(pass, format!("{} (tol 1e-8, 1e-10)", parts.join(", ")))
}

/// Example 3 with the spherical potential against the β/γ closed form.
fn criterion_3() -> Result<Outcome> {
    let (e0, e1) = (1.0, 1.0);
    let (beta, gamma) = coupled_pair_constants(e0, e1);
    let m = Matrix2::new(-2.0 * (e0 + e1), -1.0, -1.0, e1);
    let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let mut g = gamma.to_vec();
    g.sort_by(f64::total_cmp);
    let eig_err = max_abs_diff(&g, &eig).max(
        beta.iter()
            .zip(&gamma)
            .fold(0.0, |a, (b, gm)| f64::max(a, (-1.0 + b * e1 - gm * b).abs())),
    );
    let s = scenario("example3-spherical", e0, e1, Potential::Spherical)?;
    let sol = example3_spherical_solution(e0, e1, &ics())?;
    let traj = integrate(
        &s.hamiltonian,
        &s.initial_state(&ics())?,
        &IntegratorConfig::rk4(0.0, 1.0, 1e-3),
    )?;
    let err = sup_error(&traj, |t| sol.eval(t));
    outcome(
        err <= 1e-6 && eig_err <= 1e-12,
        format!("trajectory error {err:.2e} (tol 1e-6), eigen-decomposition gap {eig_err:.2e} (tol 1e-12)"),
    )
}

fn energy_gap_at_random_points(l: &LagrangianModel, h: &AffineHamiltonianModel, seed: u64, n: usize) -> Result<f64> {
    let mut r = rng(seed);
    let cfg = NewtonConfig::default();
    (0..n).try_fold(0.0f64, |m, _| {
        let pt = PhasePoint::from_flat(2, 2, &uniform(&mut r, 8, 1.0))?;
        Ok(m.max((lagrangian_energy(l, &pt, &cfg)? - energy(h, &pt)?).abs()))
    })
}

/// Lagrangian and Hamiltonian pictures agree: energies and Euler-Lagrange
/// residuals of projected flows.
fn criterion_4() -> Result<Outcome> {
    let cfg = NewtonConfig::default();
    let s = scenario("example3-spherical", 0.7, 1.3, Potential::Spherical)?;
    let gap_q = energy_gap_at_random_points(&s.lagrangian, &s.hamiltonian, 4, 500)?;
    let traj = integrate(
        &s.hamiltonian,
        &s.initial_state(&ics())?,
        &IntegratorConfig::rk4(0.0, 2.0, 2e-3),
    )?;
    let rep = verify_duality(
        &s.lagrangian,
        &s.hamiltonian,
        &[],
        &traj,
        &cfg,
        &TrajectoryStencil::default(),
    )?;
    let el_q = rep.euler_lagrange;

    // Closed-form conjugate of the cosh family; the Lagrangian side goes
    // through Newton.
    let c = 0.4;
    let l = cosh_family(2, 2, c);
    let h = AffineHamiltonianModel::analytic(2, 2, move |z: &[Taylor]| {
        let conj = z[4..6]
            .iter()
            .fold(z[0].lift(0.0), |acc, p| acc + p * &p.asinh() - (p * p + 1.0).sqrt());
        conj - norm_sq(&z[2..4]) * c - &z[0] * &z[0] * 0.1
    })?;
    let gap_c = energy_gap_at_random_points(&l, &h, 5, 500)?;
    let init = PhasePoint::from_flat(2, 2, &[0.2, -0.1, 0.3, 0.1, 0.5, -0.2, 0.4, 0.3])?;
    let traj = integrate(&h, &init, &IntegratorConfig::rk4(0.0, 1.5, 2e-3))?;
    let rep = verify_duality(&l, &h, &[], &traj, &cfg, &TrajectoryStencil::default())?;
    let el_c = rep.euler_lagrange;
    outcome(
        gap_q < 1e-7 && gap_c < 1e-7 && el_q < 1e-5 && el_c < 1e-5,
        format!(
            "energy gap {gap_q:.2e} / {gap_c:.2e} (tol 1e-7), EL residual {el_q:.2e} / {el_c:.2e} (tol 1e-5) [quadratic / cosh]"
        ),
    )
}

/// `dual_lagrangian ∘ dual_affine_hamiltonian` and the hessian isometry.
fn criterion_5() -> Result<Outcome> {
    let cfg = NewtonConfig::default();
    let mut r = rng(5);
    let (mut round, mut iso) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let c = [r.gen_range(0.0..1.0), r.gen_range(0.0..1.0), r.gen_range(-0.3..0.3)];
        let l = convex_quartic(2, 2, c);
        let h = dual_affine_hamiltonian(&l, &cfg)?;
        let l2 = dual_lagrangian(&h, &cfg)?;
        let e = ExtendedJetPoint::from_flat(2, 2, &uniform(&mut r, 6, 1.5))?;
        round = round.max((l2.value(&e)? - l.value(&e)?).abs());
        for (a, b) in l.gradient(&e)?.iter().zip(&l2.gradient(&e)?) {
            round = round.max(max_abs_diff(a, b));
        }
        let prod = l.vertical_hessian(&e)? * h.p_hessian(&legendre_map(&l, &e)?)?;
        iso = iso.max((prod - DMatrix::identity(2, 2)).abs().max());
    }
    outcome(
        round <= 1e-9 && iso <= 1e-8,
        format!("round trip {round:.2e} (tol 1e-9), isometry {iso:.2e} (tol 1e-8) over 200 points"),
    )
}

/// Grid-search conjugate against the Newton dual.
fn criterion_6() -> Result<Outcome> {
    let cfg = NewtonConfig::default();
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let c = [r.gen_range(0.0..1.0), r.gen_range(0.0..1.0), r.gen_range(-0.3..0.3)];
        let l = convex_quartic(2, 2, c);
        let h = dual_affine_hamiltonian(&l, &cfg)?;
        let d = DualJetPoint::from_flat(2, 2, &uniform(&mut r, 6, 1.0))?;
        let f = fenchel_h0(&l, &d, &SearchBox::cube(2, 4.0, 41))?;
        worst = worst.max((f.value - h.value(&d)?).abs());
    }
    outcome(
        worst <= 1e-6,
        format!("max gap {worst:.2e} over 50 instances (tol 1e-6)"),
    )
}

fn chart_hamiltonian() -> AffineHamiltonianModel {
    AffineHamiltonianModel::analytic(2, 2, |z: &[Taylor]| {
        let r = norm_sq(&z[4..6]);
        &r * 0.5 + &(&r * &r) * 0.05 + &z[4] * &z[2].sin() + norm_sq(&z[..4]) * 0.2
    })
    .unwrap()
}

/// Chart covariance under a quadratic diffeomorphism of the plane.
fn criterion_7() -> Result<Outcome> {
    let t = quadratic_chart();
    let t2 = common::shear_chart(-0.1, 0.25);
    let cfg = NewtonConfig::default();
    let l = convex_quartic(2, 2, [0.3, 0.5, 0.1]);
    let h_l = dual_affine_hamiltonian(&l, &cfg)?;
    let moved_l = affine_change_of_chart(&h_l, &t)?;
    let pulled = dual_affine_hamiltonian(&pullback_lagrangian(&l, &t)?, &cfg)?;
    let h = chart_hamiltonian();
    let moved = affine_change_of_chart(&h, &t)?;
    let mut r = rng(7);
    let (mut rule, mut glue, mut cocycle, mut pairing, mut contra) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let d = DualJetPoint::from_flat(2, 2, &uniform(&mut r, 6, 1.0))?;
        rule = rule.max((moved_l.value(&d)? - pulled.value(&d)?).abs());

        let pt = PhasePoint::from_flat(2, 2, &uniform(&mut r, 8, 1.0))?;
        let primed = transform_momenta(&t, &pt)?;
        glue = glue.max((energy(&moved, &primed)? - energy(&h, &pt)?).abs());

        let e = ExtendedJetPoint::from_flat(2, 2, &uniform(&mut r, 6, 1.0))?;
        let stepwise = transform_jet(&t2, &transform_jet(&t, &e)?)?;
        cocycle = cocycle.max(max_abs_diff(
            &stepwise.to_flat(),
            &transform_jet(&t.then(&t2)?, &e)?.to_flat(),
        ));

        // p'·δy' = p·δy for a tangent δ of the jet space.
        let dir = uniform(&mut r, 4, 1.0);
        let jet = pt.jet().to_flat();
        let push = |s: f64| -> Result<Vec<f64>> {
            let w: Vec<f64> = jet.iter().zip(&dir).map(|(j, v)| j + s * v).collect();
            Ok(transform_jet(&t, &JetPoint::from_flat(2, 2, &w)?)?.to_flat())
        };
        let tangent = ostro::fd::derivative_1d_vec(push, 1, 1e-3, 4)?;
        let lhs: f64 = primed.momenta().concat().iter().zip(&tangent).map(|(a, b)| a * b).sum();
        let rhs: f64 = pt.momenta().concat().iter().zip(&dir).map(|(a, b)| a * b).sum();
        pairing = pairing.max((lhs - rhs).abs());

        let unprimed_jet = transform_jet(&t.inverted(), d.jet())?;
        let j = t.jacobian(unprimed_jet.x())?;
        let p = (j.transpose() * DVector::from_column_slice(d.pk())).as_slice().to_vec();
        let want = &j * h.p_hessian(&DualJetPoint::new(unprimed_jet, p)?)? * j.transpose();
        contra = contra.max((moved.p_hessian(&d)? - want).abs().max());
    }

    // Integrate in both charts and compare through the transition.
    let init = PhasePoint::from_flat(2, 2, &[0.2, -0.3, 0.4, 0.1, 0.3, -0.2, -0.5, 0.6])?;
    let icfg = IntegratorConfig::rk4(0.0, 1.0, 1e-2);
    let a = integrate(&h, &init, &icfg)?;
    let b = integrate(&moved, &transform_momenta(&t, &init)?, &icfg)?;
    let mut flow = 0.0f64;
    for (sa, sb) in a.states().iter().zip(b.states()) {
        flow = flow.max(max_abs_diff(&transform_momenta(&t, sa)?.to_flat(), &sb.to_flat()));
    }
    let worst = rule.max(glue).max(cocycle).max(pairing).max(contra);
    outcome(
        worst <= 1e-8 && flow <= 1e-6,
        format!(
            "affine rule {rule:.1e}, gluing {glue:.1e}, cocycle {cocycle:.1e}, pairing {pairing:.1e}, \
             contravariance {contra:.1e} (tol 1e-8); integration {flow:.1e} (tol 1e-6)"
        ),
    )
}

/// RK4 energy drift ratio when halving the step.
fn criterion_8() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, potential) in [
        ("example1", Potential::Zero),
        ("example3-spherical", Potential::Spherical),
    ] {
        let s = scenario(name, 1.0, 1.0, potential)?;
        let init = s.initial_state(&ics())?;
        let drift = |dt: f64| -> Result<f64> {
            max_drift(
                &s.hamiltonian,
                &integrate(&s.hamiltonian, &init, &IntegratorConfig::rk4(0.0, 10.0, dt))?,
            )
        };
        let ratio = drift(0.1)? / drift(0.05)?;
        pass &= (12.0..=20.0).contains(&ratio);
        parts.push(format!("{name} {ratio:.1}"));
    }
    outcome(pass, format!("drift ratio {} (want 16 ± 25%)", parts.join(", ")))
}

/// `(1 − 2u, −2)`, the first two derivatives of the bump `w = u(1 − u)`.
fn bump_derivatives(u: f64) -> [f64; 2] {
    [1.0 - 2.0 * u, -2.0]
}

/// Closed-form reparametrization sensitivities against differences of the
/// integrated gap, and the Example 1 test point.
fn criterion_9() -> Result<Outcome> {
    let mut r = rng(9);
    let quad = Quadrature::unit(400);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let c = uniform(&mut r, 3, 1.0);
        let h = AffineHamiltonianModel::analytic(2, 2, move |z: &[Taylor]| {
            let p = &z[4..6];
            let y = &z[2..4];
            norm_sq(p) * (0.5 + c[0].abs())
                + &norm_sq(y) * &p[0] * c[1]
                + norm_sq(y).powi(2) * 0.1
                + &y[0] * &z[0].sin() * c[2]
        })?;
        let xc: Vec<Vec<f64>> = (0..2).map(|_| uniform(&mut r, 4, 1.0)).collect();
        let pc: Vec<Vec<f64>> = (0..2).map(|_| uniform(&mut r, 3, 1.0)).collect();
        let gamma = CotangentCurve::new(shared(common::poly_curve(xc)), shared(common::poly_curve(pc)))?;
        let gap = |eps: f64| -> Result<f64> {
            let phi: Arc<Reparametrization> = Arc::new(move |u: &Taylor| u + &(u * &(u * -1.0 + 1.0)) * eps);
            reparametrization_gap(&h, &gamma, phi, &quad)
        };
        let eps = 1e-3;
        let fd = (gap(eps)? - gap(-eps)?) / (2.0 * eps);
        let predicted = quad.integrate(|u| {
            let pt = prolong_curve(gamma.x.as_ref(), 2, u)?;
            let s = zermelo_sensitivities(&h, &pt, &gamma.momentum(u)?)?;
            let w = bump_derivatives(u);
            Ok(s[0] * w[0] + s[1] * w[1])
        })?;
        worst = worst.max((fd - predicted).abs() / (1.0 + predicted.abs()));
    }
    let ex1 = scenario("example1", 1.0, 1.0, Potential::Zero)?;
    let d = DualJetPoint::from_flat(2, 2, &[0.0, 0.0, 0.0, 0.0, 2.0, 0.0])?;
    let residual = zermelo_residual_primary(&ex1.hamiltonian, &d)?;
    outcome(
        worst <= 1e-4 && residual.abs() > 0.1,
        format!("sensitivity mismatch {worst:.2e} over 20 triples (tol 1e-4), Example 1 residual {residual:.3} (want > 0.1)"),
    )
}

/// Root of the cubic Hermite interpolant on `[t0, t1]`.
fn hermite_root(t0: f64, t1: f64, x0: f64, x1: f64, v0: f64, v1: f64) -> f64 {
    let h = t1 - t0;
    let eval = |s: f64| {
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * x0
            + (s3 - 2.0 * s2 + s) * h * v0
            + (-2.0 * s3 + 3.0 * s2) * x1
            + (s3 - s2) * h * v1
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (eval(lo) <= 0.0) == (eval(mid) <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    t0 + 0.5 * (lo + hi) * h
}

/// Order one reduces to classical mechanics: the oscillator period.
fn criterion_10() -> Result<Outcome> {
    let h = AffineHamiltonianModel::analytic(1, 1, |z: &[Taylor]| (&z[1] * &z[1] + &z[0] * &z[0]) * 0.5)?;
    let init = PhasePoint::from_flat(1, 1, &[0.0, 1.0])?;
    let traj = integrate(&h, &init, &IntegratorConfig::rk4(0.0, 13.0, 1e-3))?;
    let (ts, xs, vs): (Vec<f64>, Vec<f64>, Vec<f64>) = (
        traj.times().to_vec(),
        traj.states().iter().map(|s| s.x()[0]).collect(),
        traj.rates().iter().map(|r| r.x()[0]).collect(),
    );
    let crossings: Vec<f64> = (1..ts.len())
        .filter(|&i| xs[i - 1] < 0.0 && xs[i] >= 0.0)
        .map(|i| hermite_root(ts[i - 1], ts[i], xs[i - 1], xs[i], vs[i - 1], vs[i]))
        .collect();
    if crossings.len() < 2 {
        return outcome(false, format!("only {} upward crossings", crossings.len()));
    }
    let period = crossings[1] - crossings[0];
    let err = (period - 2.0 * std::f64::consts::PI).abs();
    outcome(err <= 1e-6, format!("period {period:.10}, error {err:.2e} (tol 1e-6)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("example 1 reproduction", criterion_1),
        ("example 3 linear potential", criterion_2),
        ("example 3 spherical potential", criterion_3),
        ("lagrangian/hamiltonian equivalence", criterion_4),
        ("duality round trip", criterion_5),
        ("fenchel oracle", criterion_6),
        ("chart covariance", criterion_7),
        ("rk4 energy drift order", criterion_8),
        ("reparametrization audit", criterion_9),
        ("order-one regression", criterion_10),
    ];
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let known = KNOWN_FAILURES.contains(&n);
        let start = Instant::now();
        let out = run().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        let status = match (out.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
            (true, true) => {
                unexpected += 1;
                "PASS (listed as known failure)"
            }
        };
        println!(
            "criterion {n:>2} {name:<36} {status:<14} {} [{:.2} s]",
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if unexpected == 0 {
        println!("acceptance: ok ({} known failures)", KNOWN_FAILURES.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} unexpected result(s)");
        ExitCode::FAILURE
    }
}
