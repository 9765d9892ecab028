use std::io::Write;
use std::path::Path;

use ostro::dynamics::{energy, integrate, Trajectory};
use ostro::jetspace::PhasePoint;
use ostro::scenarios::Scenario;

use crate::config::ScenarioConfig;
use crate::error::{numerical, setup, CliError};

/// The scenario model and its initial phase point.
pub fn build(cfg: &ScenarioConfig) -> Result<(Scenario, PhasePoint), CliError> {
    let s = Scenario::from_registry(&cfg.scenario, &cfg.params).map_err(setup)?;
    let init = s.initial_state(&cfg.initial).map_err(numerical)?;
    Ok((s, init))
}

pub struct Summary {
    pub rows: usize,
    pub final_time: f64,
    pub final_x: Vec<f64>,
    pub energy: f64,
    pub energy_drift: f64,
    /// Sup-norm distance to the closed-form solution, where there is one.
    pub closed_form_error: Option<f64>,
}

impl Summary {
    pub fn of(s: &Scenario, cfg: &ScenarioConfig, traj: &Trajectory) -> Result<Self, CliError> {
        let states = traj.states();
        let e0 = energy(&s.hamiltonian, &states[0]).map_err(numerical)?;
        let mut drift = 0.0f64;
        for st in states {
            drift = drift.max((energy(&s.hamiltonian, st).map_err(numerical)? - e0).abs());
        }
        let closed_form_error = s.analytic_solution(&cfg.initial).map_err(numerical)?.map(|sol| {
            traj.times().iter().zip(states).fold(0.0f64, |m, (t, st)| {
                st.x()
                    .iter()
                    .zip(sol.eval(*t))
                    .fold(m, |m, (a, b)| m.max((a - b).abs()))
            })
        });
        let (t, last) = traj.last().expect("trajectories start with the initial state");
        Ok(Summary {
            rows: traj.len(),
            final_time: t,
            final_x: last.x().to_vec(),
            energy: e0,
            energy_drift: drift,
            closed_form_error,
        })
    }

    pub fn write(&self, scenario: &str, out: &mut dyn Write) -> std::io::Result<()> {
        let x: Vec<String> = self.final_x.iter().map(|v| format!("{v:.10e}")).collect();
        writeln!(out, "scenario {scenario}")?;
        writeln!(out, "rows {}", self.rows)?;
        writeln!(out, "final_t {:.10e}", self.final_time)?;
        writeln!(out, "final_x {}", x.join(","))?;
        writeln!(out, "energy {:.10e}", self.energy)?;
        writeln!(out, "energy_drift {:.3e}", self.energy_drift)?;
        if let Some(e) = self.closed_form_error {
            writeln!(out, "closed_form_error {e:.3e}")?;
        }
        Ok(())
    }
}

/// Integrates the scenario and writes the CSV to `out_path` (or
/// `output.path`, or `stdout`). The summary goes to `stdout` when the CSV
/// is written to a file and to `stderr` otherwise.
///
/// If the flow leaves the domain the partial trajectory is still written and
/// the error is numerical.
pub fn run(
    cfg: &ScenarioConfig,
    out_path: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let (s, init) = build(cfg)?;
    let path = out_path
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.as_ref().map(Into::into));
    let (traj, failure) = match integrate(&s.hamiltonian, &init, &cfg.integrator) {
        Ok(t) => (t, None),
        Err(ostro::Error::Integration { time, reason, partial }) => {
            (*partial, Some(format!("integration stopped at t = {time}: {reason}")))
        }
        Err(e) => return Err(numerical(e)),
    };
    let csv = traj.to_csv();
    match &path {
        Some(p) => std::fs::write(p, csv).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
        None => stdout.write_all(csv.as_bytes())?,
    }
    let log: &mut dyn Write = if path.is_some() { stdout } else { stderr };
    if let Some(msg) = failure {
        writeln!(log, "partial trajectory with {} rows", traj.len())?;
        return Err(CliError::Numerical(msg));
    }
    Summary::of(&s, cfg, &traj)?.write(&cfg.scenario, log)?;
    Ok(())
}
