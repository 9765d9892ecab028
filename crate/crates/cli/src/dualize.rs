//! Numerical dualization tables: `H₀` and the spectrum of `∂²H₀/∂p∂p` at
//! sample points of `T^(k-1)M × T*M`.

use std::fmt::Write as _;
use std::io::Write;

use ostro::duality::{analyse_hessian, dual_affine_hamiltonian, AffineHamiltonianModel, LagrangianModel, NewtonConfig};
use ostro::jetspace::DualJetPoint;
use ostro::taylor::{norm_sq, Taylor};

use crate::config::{DualizeConfig, Family};
use crate::error::{setup, CliError};
use crate::fmt_f64;

/// The top-level Lagrangian of a family.
pub fn family_lagrangian(family: &Family, k: usize, m: usize) -> Result<LagrangianModel, CliError> {
    let top = move |z: &[Taylor]| z[k * m..].to_vec();
    let model = match family {
        Family::Quadratic => LagrangianModel::analytic(k, m, move |z: &[Taylor]| norm_sq(&top(z)) * 0.5),
        Family::Quartic => LagrangianModel::analytic(k, m, move |z: &[Taylor]| {
            let r = norm_sq(&top(z));
            &r * 0.5 + &r * &r * 0.25
        }),
        Family::Cosh => LagrangianModel::analytic(k, m, move |z: &[Taylor]| {
            top(z).iter().fold(z[0].lift(0.0), |acc, v| acc + v.cosh())
        }),
        Family::Indefinite => LagrangianModel::analytic(k, m, move |z: &[Taylor]| {
            let y = top(z);
            (&y[0] * &y[0] - norm_sq(&y[1..])) * 0.5
        }),
    }
    .map_err(setup)?;
    Ok(model.with_hyperregular(*family != Family::Indefinite))
}

/// Row status: `ok` for a positive definite momentum hessian, otherwise the
/// reason the point is not hyperregular.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub label: String,
    pub point: Vec<f64>,
    pub h0: f64,
    pub spectrum: Vec<f64>,
    pub status: &'static str,
}

pub fn evaluate(h: &AffineHamiltonianModel, label: &str, flat: &[f64]) -> Result<Row, CliError> {
    let pt = DualJetPoint::from_flat(h.order(), h.dim(), flat).map_err(setup)?;
    let failed = || Row {
        label: label.into(),
        point: flat.to_vec(),
        h0: f64::NAN,
        spectrum: vec![f64::NAN; h.dim()],
        status: "newton-failed",
    };
    let (Ok(h0), Ok(hess)) = (h.value(&pt), h.p_hessian(&pt)) else {
        return Ok(failed());
    };
    let reg = analyse_hessian(&hess);
    let status = if reg.positive_definite {
        "ok"
    } else if reg.nondegenerate {
        "indefinite"
    } else {
        "degenerate"
    };
    Ok(Row {
        label: label.into(),
        point: flat.to_vec(),
        h0,
        spectrum: reg.eigenvalues,
        status,
    })
}

pub fn header(k: usize, m: usize) -> String {
    let mut cols = vec!["label".to_string()];
    cols.extend((1..=m).map(|i| format!("x{i}")));
    for a in 1..k {
        cols.extend((1..=m).map(|i| format!("y{a}_{i}")));
    }
    cols.extend((1..=m).map(|i| format!("p_{i}")));
    cols.push("h0".into());
    cols.extend((1..=m).map(|i| format!("h_eig{i}")));
    cols.push("status".into());
    cols.join(",")
}

/// Writes the table; any Newton failure makes the result numerical after the
/// whole table is written.
pub fn dualize(cfg: &DualizeConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let l = family_lagrangian(&cfg.family, cfg.order, cfg.dim)?;
    let h = dual_affine_hamiltonian(&l, &NewtonConfig::default()).map_err(setup)?;
    let mut csv = header(cfg.order, cfg.dim);
    csv.push('\n');
    let mut failures = 0;
    for (label, flat) in &cfg.points {
        let row = evaluate(&h, label, flat)?;
        failures += usize::from(row.status == "newton-failed");
        csv.push_str(&row.label);
        for v in row.point.iter().chain([&row.h0]).chain(&row.spectrum) {
            let _ = write!(csv, ",{}", fmt_f64(*v));
        }
        let _ = writeln!(csv, ",{}", row.status);
    }
    out.write_all(csv.as_bytes())?;
    if failures > 0 {
        return Err(CliError::Numerical(format!("Newton failed at {failures} point(s)")));
    }
    Ok(())
}
