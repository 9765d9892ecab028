//! Browser bindings for three small demos: an Example 1 trajectory against
//! its closed form, one-dimensional convex conjugates computed by Newton,
//! and the reparametrization gap of the affine action.
//!
//! The plain Rust functions carry the logic and are tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use std::sync::Arc;

use ostro::curve::{Curve, Reparametrization};
use ostro::duality::{dual_affine_hamiltonian, LagrangianModel, NewtonConfig};
use ostro::dynamics::{energy, integrate, CotangentCurve, IntegratorConfig, Quadrature};
use ostro::jetspace::DualJetPoint;
use ostro::scenarios::{Expansion, JetIcs, Scenario, ScenarioParams};
use ostro::taylor::Taylor;
use ostro::zermelo::reparametrization_gap;
use wasm_bindgen::prelude::*;

/// An integrated one-dimensional Example 1 orbit.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct Orbit {
    times: Vec<f64>,
    x: Vec<f64>,
    exact: Vec<f64>,
    energy_drift: f64,
}

#[wasm_bindgen]
impl Orbit {
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }

    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    /// The closed-form critical curve at the same times.
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn energy_drift(&self) -> f64 {
        self.energy_drift
    }

    #[wasm_bindgen(getter)]
    pub fn max_error(&self) -> f64 {
        self.x
            .iter()
            .zip(&self.exact)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

fn example1(eps0: f64, eps1: f64) -> Result<Scenario, String> {
    if eps1 == 0.0 {
        return Err("eps1 must be nonzero".into());
    }
    Scenario::from_registry("example1", &ScenarioParams::new(eps0, eps1, 1)).map_err(|e| e.to_string())
}

/// Integrates `ε₁ x'''' = ε₀ x''` from the jets `(x, v, a, j)` at `t = 0`.
pub fn example1_orbit(eps0: f64, eps1: f64, jets: [f64; 4], t1: f64, dt: f64) -> Result<Orbit, String> {
    let s = example1(eps0, eps1)?;
    let ics = JetIcs::new(vec![jets[0]], vec![jets[1]], vec![jets[2]], vec![jets[3]]).map_err(|e| e.to_string())?;
    let init = s.initial_state(&ics).map_err(|e| e.to_string())?;
    let traj = integrate(&s.hamiltonian, &init, &IntegratorConfig::rk4(0.0, t1, dt)).map_err(|e| e.to_string())?;
    let sol = s
        .analytic_solution(&ics)
        .map_err(|e| e.to_string())?
        .ok_or("no closed form")?;
    let e0 = energy(&s.hamiltonian, &init).map_err(|e| e.to_string())?;
    let mut drift = 0.0f64;
    for st in traj.states() {
        drift = drift.max((energy(&s.hamiltonian, st).map_err(|e| e.to_string())? - e0).abs());
    }
    Ok(Orbit {
        times: traj.times().to_vec(),
        x: traj.states().iter().map(|st| st.x()[0]).collect(),
        exact: traj.times().iter().map(|t| sol.eval(*t)[0]).collect(),
        energy_drift: drift,
    })
}

/// `L(y)` of the conjugate demo.
pub fn family(name: &str) -> Result<LagrangianModel, String> {
    let model = match name {
        "quadratic" => LagrangianModel::analytic(1, 1, |z: &[Taylor]| &z[1] * &z[1] * 0.5),
        "quartic" => LagrangianModel::analytic(1, 1, |z: &[Taylor]| {
            let r = &z[1] * &z[1];
            &r * 0.5 + &r * &r * 0.25
        }),
        "cosh" => LagrangianModel::analytic(1, 1, |z: &[Taylor]| z[1].cosh()),
        other => return Err(format!("unknown family '{other}'")),
    };
    Ok(model.map_err(|e| e.to_string())?.with_hyperregular(true))
}

/// `H(p) = sup_y (p y − L(y))` on `n` evenly spaced momenta, by Newton.
/// Failed points come back as NaN.
pub fn conjugate(name: &str, p_min: f64, p_max: f64, n: usize) -> Result<Vec<f64>, String> {
    if n < 2 || !(p_max > p_min) {
        return Err("need at least two samples on a nonempty range".into());
    }
    let h = dual_affine_hamiltonian(&family(name)?, &NewtonConfig::default()).map_err(|e| e.to_string())?;
    Ok((0..n)
        .map(|i| {
            let p = p_min + (p_max - p_min) * i as f64 / (n - 1) as f64;
            DualJetPoint::from_flat(1, 1, &[0.0, p])
                .and_then(|d| h.value(&d))
                .unwrap_or(f64::NAN)
        })
        .collect())
}

/// Gap between the affine actions of an Example 1 critical curve on `[0,1]`
/// before and after `t = u + bend·u(1−u)`. The momentum is `p = ε₁ ẍ`.
pub fn zermelo_gap(eps0: f64, eps1: f64, bend: f64, jets: [f64; 4]) -> Result<f64, String> {
    if !(bend.abs() < 1.0) {
        return Err("bend must lie in (-1, 1) to keep the map increasing".into());
    }
    let s = example1(eps0, eps1)?;
    let ics = JetIcs::new(vec![jets[0]], vec![jets[1]], vec![jets[2]], vec![jets[3]]).map_err(|e| e.to_string())?;
    let sol = s
        .analytic_solution(&ics)
        .map_err(|e| e.to_string())?
        .ok_or("no closed form")?;
    // ε₁ẍ solves the same linear ODE, so it lives in the same basis.
    let d = sol.x.derivatives(0.0, 5).map_err(|e| e.to_string())?;
    let p0: Vec<Vec<f64>> = d[2..6].iter().map(|v| vec![eps1 * v[0]]).collect();
    let rows: Vec<&[f64]> = p0.iter().map(Vec::as_slice).collect();
    let p = Expansion::fit(sol.x.basis.clone(), &rows).map_err(|e| e.to_string())?;
    let gamma = CotangentCurve::new(Arc::new(sol.x.clone()), Arc::new(p)).map_err(|e| e.to_string())?;
    let phi: Arc<Reparametrization> = Arc::new(move |u: &Taylor| u + &(u * &(u * -1.0 + 1.0)) * bend);
    reparametrization_gap(&s.hamiltonian, &gamma, phi, &Quadrature::unit(200)).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = example1Orbit)]
#[allow(clippy::too_many_arguments)]
pub fn example1_orbit_js(
    eps0: f64,
    eps1: f64,
    x: f64,
    v: f64,
    a: f64,
    j: f64,
    t1: f64,
    dt: f64,
) -> Result<Orbit, JsValue> {
    example1_orbit(eps0, eps1, [x, v, a, j], t1, dt).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = conjugate)]
pub fn conjugate_js(name: &str, p_min: f64, p_max: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    conjugate(name, p_min, p_max, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = zermeloGap)]
pub fn zermelo_gap_js(eps0: f64, eps1: f64, bend: f64, x: f64, v: f64, a: f64, j: f64) -> Result<f64, JsValue> {
    zermelo_gap(eps0, eps1, bend, [x, v, a, j]).map_err(|e| JsValue::from_str(&e))
}
