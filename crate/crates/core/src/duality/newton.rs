use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// An axis-aligned box sampled on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Grid points per axis, at least 3.
    pub resolution: usize,
}

impl SearchBox {
    pub fn cube(dim: usize, half_width: f64, resolution: usize) -> Self {
        SearchBox {
            lower: vec![-half_width; dim],
            upper: vec![half_width; dim],
            resolution,
        }
    }

    pub fn centered(center: &[f64], half_width: f64, resolution: usize) -> Self {
        SearchBox {
            lower: center.iter().map(|c| c - half_width).collect(),
            upper: center.iter().map(|c| c + half_width).collect(),
            resolution,
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() || self.lower.is_empty() {
            return Err(Error::arg("search box bounds have mismatched dimension"));
        }
        if self.resolution < 3 {
            return Err(Error::arg("search box needs at least 3 points per axis"));
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| !(l < u)) {
            return Err(Error::arg("search box has an empty side"));
        }
        Ok(())
    }

    fn coordinate(&self, axis: usize, i: usize) -> f64 {
        let f = i as f64 / (self.resolution - 1) as f64;
        self.lower[axis] + f * (self.upper[axis] - self.lower[axis])
    }

    /// Visits every grid point; the flag says whether it lies on the boundary.
    pub(crate) fn for_each(&self, mut visit: impl FnMut(&[f64], bool)) {
        let m = self.dim();
        let r = self.resolution;
        let mut idx = vec![0usize; m];
        let mut point = vec![0.0; m];
        loop {
            let mut on_boundary = false;
            for a in 0..m {
                point[a] = self.coordinate(a, idx[a]);
                on_boundary |= idx[a] == 0 || idx[a] == r - 1;
            }
            visit(&point, on_boundary);
            let mut a = 0;
            loop {
                if a == m {
                    return;
                }
                idx[a] += 1;
                if idx[a] < r {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }
}

/// Where Newton starts.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialGuess {
    Zero,
    Given(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonConfig {
    pub max_iterations: usize,
    /// Absolute tolerance on `|F|_inf`.
    pub tolerance: f64,
    /// Backtracking halvings allowed per step.
    pub max_halvings: usize,
    pub initial_guess: InitialGuess,
    /// Grid used to reseed when the first attempt fails.
    pub fallback: Option<SearchBox>,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            max_iterations: 50,
            tolerance: 1e-12,
            max_halvings: 30,
            initial_guess: InitialGuess::Zero,
            fallback: None,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::arg(
                "newton tolerance must be positive and iterations at least 1",
            ));
        }
        Ok(())
    }

    pub fn with_fallback(mut self, grid: SearchBox) -> Self {
        self.fallback = Some(grid);
        self
    }
}

/// Sup norm that propagates NaN, so an overflowed residual never reads as zero.
fn sup(v: &[f64]) -> f64 {
    if v.iter().any(|x| x.is_nan()) {
        return f64::NAN;
    }
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton on `F(y) = 0`; `system` returns `(F(y), DF(y))`.
fn newton_from(
    system: &dyn Fn(&[f64]) -> Result<(Vec<f64>, DMatrix<f64>)>,
    start: Vec<f64>,
    cfg: &NewtonConfig,
) -> Result<Vec<f64>> {
    let mut y = start;
    let (mut f, mut jac) = system(&y)?;
    let mut norm = sup(&f);
    if !norm.is_finite() {
        return Err(Error::Domain(
            "newton residual is not finite at the initial guess".into(),
        ));
    }
    for _ in 0..cfg.max_iterations {
        if norm <= cfg.tolerance {
            return Ok(y);
        }
        let step = jac
            .clone()
            .lu()
            .solve(&DVector::from_column_slice(&f))
            .ok_or_else(|| Error::Regularity("singular jacobian in newton iteration".into()))?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=cfg.max_halvings {
            let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(a, d)| a - lambda * d).collect();
            if let Ok((ft, jt)) = system(&trial) {
                let nt = sup(&ft);
                if nt.is_finite() && (nt < norm || nt <= cfg.tolerance) {
                    y = trial;
                    f = ft;
                    jac = jt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm <= cfg.tolerance {
        Ok(y)
    } else {
        Err(Error::Convergence {
            iterations: cfg.max_iterations,
            last_residual: norm,
        })
    }
}

/// Solves `F(y) = 0` starting from the configured guess, reseeding from the
/// grid minimiser of `|F|_inf` when that fails.
pub fn newton_solve(
    system: &dyn Fn(&[f64]) -> Result<(Vec<f64>, DMatrix<f64>)>,
    dim: usize,
    cfg: &NewtonConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let start = match &cfg.initial_guess {
        InitialGuess::Zero => vec![0.0; dim],
        InitialGuess::Given(v) => v.clone(),
    };
    let first = newton_from(system, start, cfg);
    match (first, &cfg.fallback) {
        (Ok(y), _) => Ok(y),
        (Err(e @ Error::Convergence { .. }), Some(grid)) | (Err(e @ Error::Regularity(_)), Some(grid)) => {
            grid.validate()?;
            let mut best: Option<(f64, Vec<f64>)> = None;
            grid.for_each(|pt, _| {
                if let Ok((f, _)) = system(pt) {
                    let n = sup(&f);
                    if n.is_finite() && best.as_ref().is_none_or(|(b, _)| n < *b) {
                        best = Some((n, pt.to_vec()));
                    }
                }
            });
            match best {
                Some((_, seed)) => newton_from(system, seed, cfg),
                None => Err(e),
            }
        }
        (Err(e), _) => Err(e),
    }
}
