//! Lifted second-order Lagrangians built from order-1 Lagrangians and their
//! semisprays, plus the built-in examples with closed-form solutions.

mod lifted;
mod solutions;

use std::sync::Arc;

pub use lifted::{
    from_raw_derivatives, lift_lagrangian, semispray, standard_base_lagrangian, standard_lifted_hamiltonian,
    standard_semispray, LiftedLagrangianSpec, Potential,
};
pub use solutions::{
    coupled_pair_constants, example1_solution, example3_linear_solution, example3_spherical_solution, AnalyticSolution,
    BasisFn, Expansion, JetIcs, Ode,
};

use crate::curve::AnalyticCurve;
use crate::duality::{dual_affine_hamiltonian, AffineHamiltonianModel, LagrangianModel, NewtonConfig};
use crate::dynamics::ostrogradski_momenta;
use crate::error::{Error, Result};
use crate::jetspace::PhasePoint;

pub const SCENARIO_NAMES: [&str; 5] = [
    "example1",
    "example2",
    "example3-linear",
    "example3-spherical",
    "lifted-custom",
];

/// Builds the lifted model of Example 2: `L₁ = ½|y|² + a·y`.
pub fn example2_model(a: &[f64], eps0: f64, eps1: f64) -> Result<LiftedLagrangianSpec> {
    let base = standard_base_lagrangian(a, &Potential::Zero)?;
    Ok(LiftedLagrangianSpec::new(base, eps0, eps1).with_semispray(standard_semispray(a.len(), &Potential::Zero)))
}

/// Parameters shared by the registry entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioParams {
    pub eps0: f64,
    pub eps1: f64,
    /// Coefficients of the `a·y` term.
    pub a: Vec<f64>,
    pub potential: Potential,
}

impl ScenarioParams {
    pub fn new(eps0: f64, eps1: f64, dim: usize) -> Self {
        ScenarioParams {
            eps0,
            eps1,
            a: vec![0.0; dim],
            potential: Potential::Zero,
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }
}

/// A built-in second-order model: `L₁ = ½|y|² + a·y + V(x)` lifted with
/// `ε₀, ε₁` and written in jet coordinates.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub params: ScenarioParams,
    /// The lifted Lagrangian in plain derivatives, `L^(2)(x, ẋ, ẍ)`.
    pub spec: LiftedLagrangianSpec,
    /// `from_raw_derivatives(lift_lagrangian(spec))`.
    pub lagrangian: LagrangianModel,
    pub hamiltonian: AffineHamiltonianModel,
}

impl Scenario {
    /// Looks up a registry entry. `example1` ignores `a` and the potential,
    /// `example2` ignores the potential, the `example3-*` entries ignore `a`
    /// and use a linear (resp. spherical) potential; `lifted-custom` takes
    /// everything as given and dualizes numerically.
    pub fn from_registry(name: &str, params: &ScenarioParams) -> Result<Self> {
        let m = params.dim();
        if m == 0 {
            return Err(Error::arg("scenario dimension must be positive"));
        }
        let mut p = params.clone();
        match name {
            "example1" => {
                p.a = vec![0.0; m];
                p.potential = Potential::Zero;
            }
            "example2" => p.potential = Potential::Zero,
            "example3-linear" => {
                p.a = vec![0.0; m];
                match &p.potential {
                    Potential::Linear(al) if al.iter().any(|v| *v != 0.0) => {}
                    _ => return Err(Error::arg("example3-linear needs a nonzero linear potential")),
                }
            }
            "example3-spherical" => {
                p.a = vec![0.0; m];
                p.potential = Potential::Spherical;
            }
            "lifted-custom" => return Self::numeric(name, p),
            other => {
                return Err(Error::arg(format!(
                    "unknown scenario '{other}', expected one of {}",
                    SCENARIO_NAMES.join(", ")
                )))
            }
        }
        Self::closed_form(name, p)
    }

    fn closed_form(name: &str, p: ScenarioParams) -> Result<Self> {
        let m = p.dim();
        let base = standard_base_lagrangian(&p.a, &p.potential)?;
        let spec = LiftedLagrangianSpec::new(base, p.eps0, p.eps1).with_semispray(standard_semispray(m, &p.potential));
        let lagrangian = from_raw_derivatives(&lift_lagrangian(&spec)?)?;
        let hamiltonian = standard_lifted_hamiltonian(p.eps0, p.eps1, &p.a, &p.potential)?;
        Ok(Scenario {
            name: name.into(),
            params: p,
            spec,
            lagrangian,
            hamiltonian,
        })
    }

    /// Semispray from the hessian of `L₁` and `H₀` by Newton duality.
    fn numeric(name: &str, p: ScenarioParams) -> Result<Self> {
        let base = standard_base_lagrangian(&p.a, &p.potential)?;
        let spec = LiftedLagrangianSpec::new(base, p.eps0, p.eps1);
        let lagrangian = from_raw_derivatives(&lift_lagrangian(&spec)?)?;
        let hamiltonian = dual_affine_hamiltonian(&lagrangian, &NewtonConfig::default())?;
        Ok(Scenario {
            name: name.into(),
            params: p,
            spec,
            lagrangian,
            hamiltonian,
        })
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    /// Phase point over the initial jets with the Jacobi-Ostrogradski momenta
    /// of the scenario Lagrangian.
    pub fn initial_state(&self, ics: &JetIcs) -> Result<PhasePoint> {
        if ics.dim() != self.dim() {
            return Err(Error::arg("initial jets have the wrong dimension"));
        }
        let ics = ics.clone();
        let curve = AnalyticCurve::new(self.dim(), move |t| {
            (0..ics.dim())
                .map(|i| {
                    let t2 = t * t;
                    let t3 = &t2 * t;
                    t * ics.v[i] + t2 * (ics.a[i] / 2.0) + t3 * (ics.j[i] / 6.0) + ics.x[i]
                })
                .collect()
        });
        ostrogradski_momenta(&self.lagrangian, &curve, 0.0)
    }

    /// Closed-form critical curve through the initial jets, where one is
    /// known.
    pub fn analytic_solution(&self, ics: &JetIcs) -> Result<Option<AnalyticSolution>> {
        let (e0, e1) = (self.params.eps0, self.params.eps1);
        Ok(match (self.name.as_str(), &self.params.potential) {
            ("example1" | "example2", _) => Some(example1_solution(e0, e1, ics)?),
            ("example3-linear", Potential::Linear(al)) => Some(example3_linear_solution(e0, e1, al, &ics.x, &ics.v)?),
            ("example3-spherical", _) => Some(example3_spherical_solution(e0, e1, ics)?),
            _ => None,
        })
    }
}

/// Shared handle used by front-ends.
pub type SharedScenario = Arc<Scenario>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetspace::DualJetPoint;

    #[test]
    fn registry_rejects_unknown_names() {
        assert!(Scenario::from_registry("example9", &ScenarioParams::new(1.0, 1.0, 2)).is_err());
        assert!(Scenario::from_registry("example3-linear", &ScenarioParams::new(1.0, 1.0, 2)).is_err());
    }

    #[test]
    fn example1_closed_form_hamiltonian() {
        let s = Scenario::from_registry("example1", &ScenarioParams::new(0.5, 2.0, 2)).unwrap();
        let pt = DualJetPoint::from_flat(2, 2, &[0.1, 0.2, 1.0, -1.0, 2.0, 0.5]).unwrap();
        let want = (4.0 + 0.25) / 8.0 - 0.125 * 2.0;
        assert!((s.hamiltonian.value(&pt).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn example1_initial_momenta() {
        let s = Scenario::from_registry("example1", &ScenarioParams::new(1.0, 2.0, 1)).unwrap();
        let ics = JetIcs::new(vec![0.0], vec![0.5], vec![0.25], vec![-1.0]).unwrap();
        let st = s.initial_state(&ics).unwrap();
        assert!((st.momentum(1)[0] - 2.0 * 0.25).abs() < 1e-10);
        assert!((st.momentum(0)[0] - (0.5 + 2.0)).abs() < 1e-9);
    }
}
