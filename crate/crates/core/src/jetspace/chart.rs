use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::points::{ExtendedJetPoint, JetCoordinates, JetPoint, PhasePoint};
use crate::error::{Error, Result};
use crate::field::VectorMap;
use crate::taylor::Taylor;

/// An explicit change of coordinates `x' = forward(x)` with its inverse.
#[derive(Clone, Debug)]
pub struct ChartTransition {
    forward: VectorMap,
    inverse: VectorMap,
}

impl ChartTransition {
    pub fn new(forward: VectorMap, inverse: VectorMap) -> Result<Self> {
        let m = forward.arity();
        if forward.out_dim() != m || inverse.arity() != m || inverse.out_dim() != m {
            return Err(Error::Transition("forward and inverse must both map R^m to R^m".into()));
        }
        Ok(ChartTransition { forward, inverse })
    }

    pub fn identity(m: usize) -> Self {
        ChartTransition {
            forward: VectorMap::identity(m),
            inverse: VectorMap::identity(m),
        }
    }

    /// `x' = A x`.
    pub fn linear(a: DMatrix<f64>) -> Result<Self> {
        let m = a.nrows();
        if a.ncols() != m {
            return Err(Error::Transition("linear transition needs a square matrix".into()));
        }
        let inv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Transition("singular linear transition".into()))?;
        let apply = |mat: DMatrix<f64>| {
            move |z: &[Taylor]| -> Vec<Taylor> {
                (0..m)
                    .map(|i| {
                        let mut acc = z[0].lift(0.0);
                        for (j, zj) in z.iter().enumerate() {
                            acc += zj * mat[(i, j)];
                        }
                        acc
                    })
                    .collect()
            }
        };
        Ok(ChartTransition {
            forward: VectorMap::analytic(m, m, apply(a)),
            inverse: VectorMap::analytic(m, m, apply(inv)),
        })
    }

    pub fn dim(&self) -> usize {
        self.forward.arity()
    }

    pub fn forward(&self) -> &VectorMap {
        &self.forward
    }

    pub fn inverse(&self) -> &VectorMap {
        &self.inverse
    }

    /// The transition in the opposite direction.
    pub fn inverted(&self) -> Self {
        ChartTransition {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ChartTransition) -> Result<Self> {
        if next.dim() != self.dim() {
            return Err(Error::Transition("dimension mismatch in composition".into()));
        }
        Ok(ChartTransition {
            forward: compose_maps(&self.forward, &next.forward),
            inverse: compose_maps(&next.inverse, &self.inverse),
        })
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.forward.eval(x)
    }

    /// `dx'/dx` at `x`, checked for singularity.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let j = self.forward.jacobian(x);
        check_nonsingular(&j)?;
        Ok(j)
    }

    /// `|inverse(forward(x)) - x|_inf`.
    pub fn round_trip_error(&self, x: &[f64]) -> f64 {
        let back = self.inverse.eval(&self.forward.eval(x));
        back.iter().zip(x).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

fn compose_maps(first: &VectorMap, second: &VectorMap) -> VectorMap {
    let m = first.arity();
    let out = second.out_dim();
    if first.is_analytic() && second.is_analytic() {
        let (f, g) = (first.clone(), second.clone());
        VectorMap::analytic(m, out, move |z| {
            let mid = f.eval_taylor(z).expect("analytic");
            g.eval_taylor(&mid).expect("analytic")
        })
    } else {
        let (f, g) = (first.clone(), second.clone());
        VectorMap::numeric(m, out, move |z| g.eval(&f.eval(z)))
    }
}

fn check_nonsingular(j: &DMatrix<f64>) -> Result<()> {
    let sv = j.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(min.is_finite() && max.is_finite()) || min <= 1e-13 * max.max(1e-300) {
        return Err(Error::Transition(format!(
            "singular Jacobian (singular values {min:e} .. {max:e})"
        )));
    }
    Ok(())
}

/// `c · D^m T(x)[y^(l1), .., y^(lm)]`, keyed by the sorted level list.
type Terms = BTreeMap<Vec<usize>, f64>;

/// Symbolic form of the transformed levels `y'^(1..=n)` obtained from the
/// recursion `(a+1) y'^(a+1) = (a+1) J y^(a+1) + Γ^(a)(y'^(a))`.
fn level_terms(n: usize) -> Vec<Terms> {
    let mut out: Vec<Terms> = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(BTreeMap::from([(vec![1], 1.0)]));
    for a in 1..n {
        let mut next = Terms::new();
        for (levels, c) in &out[a - 1] {
            // y^(1) d/dx raises the derivative order of T.
            let mut raised = levels.clone();
            raised.push(1);
            raised.sort_unstable();
            *next.entry(raised).or_default() += c;
            // (b+1) y^(b+1) d/dy^(b) on each slot of level b <= a-1.
            for (slot, &b) in levels.iter().enumerate() {
                if b < a {
                    let mut shifted = levels.clone();
                    shifted[slot] = b + 1;
                    shifted.sort_unstable();
                    *next.entry(shifted).or_default() += c * (b + 1) as f64;
                }
            }
        }
        *next.entry(vec![a + 1]).or_default() += (a + 1) as f64;
        let scale = 1.0 / (a + 1) as f64;
        next.values_mut().for_each(|c| *c *= scale);
        out.push(next);
    }
    out
}

fn eval_term(t: &ChartTransition, x: &[f64], vectors: &[&[f64]]) -> Vec<f64> {
    t.forward.multilinear(x, vectors)
}

/// Transformed levels `[x', y'^(1), ..]` of `levels = [x, y^(1), ..]`.
pub fn transform_levels(t: &ChartTransition, levels: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    let m = t.dim();
    if levels.is_empty() || levels.iter().any(|l| l.len() != m) {
        return Err(Error::arg("jet levels do not match the transition dimension"));
    }
    let x = levels[0];
    t.jacobian(x)?;
    let n = levels.len() - 1;
    let mut out = vec![t.apply(x)];
    for terms in level_terms(n) {
        let mut acc = vec![0.0; m];
        for (lv, c) in &terms {
            let vs: Vec<&[f64]> = lv.iter().map(|&l| levels[l]).collect();
            for (a, v) in acc.iter_mut().zip(eval_term(t, x, &vs)) {
                *a += c * v;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Pushes a jet (or extended jet) forward through the transition, level by
/// level.
pub fn transform_jet<P: JetCoordinates>(t: &ChartTransition, pt: &P) -> Result<P> {
    let out = transform_levels(t, &pt.jet_levels())?;
    pt.with_jet_levels(out)
}

/// `(1/k) Γ^(k-1)(y'^(k-1))`: the part of `y'^(k)` that does not depend on
/// `y^(k)`. Zero for `k = 1`.
pub fn inhomogeneous_top(t: &ChartTransition, jet: &JetPoint) -> Result<Vec<f64>> {
    let ext = ExtendedJetPoint::new(jet.clone(), vec![0.0; jet.dim()])?;
    let out = transform_jet(t, &ext)?;
    Ok(out.top().to_vec())
}

/// Blocks `B[b][a] = ∂y'^(b)/∂y^(a)` of the prolonged Jacobian for
/// `a, b = 0..=n`, where `n + 1 = levels.len()`. Lower block triangular with
/// the base Jacobian on the diagonal.
pub fn prolonged_jacobian_blocks(t: &ChartTransition, levels: &[&[f64]]) -> Result<Vec<Vec<DMatrix<f64>>>> {
    let m = t.dim();
    let x = levels[0];
    let jac = t.jacobian(x)?;
    let n = levels.len() - 1;
    let mut blocks = vec![vec![DMatrix::zeros(m, m); n + 1]; n + 1];
    blocks[0][0] = jac;
    let units: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            e
        })
        .collect();
    for (bi, terms) in level_terms(n).iter().enumerate() {
        let b = bi + 1;
        for (lv, c) in terms {
            let base: Vec<&[f64]> = lv.iter().map(|&l| levels[l]).collect();
            for (j, e) in units.iter().enumerate() {
                // Derivative in x adds a slot.
                let mut with_x = base.clone();
                with_x.insert(0, e.as_slice());
                for (i, v) in eval_term(t, x, &with_x).into_iter().enumerate() {
                    blocks[b][0][(i, j)] += c * v;
                }
                for (slot, &l) in lv.iter().enumerate() {
                    let mut sub = base.clone();
                    sub[slot] = e.as_slice();
                    for (i, v) in eval_term(t, x, &sub).into_iter().enumerate() {
                        blocks[b][l][(i, j)] += c * v;
                    }
                }
            }
        }
    }
    Ok(blocks)
}

fn solve_transposed(jac: &DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
    jac.transpose()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Transition("singular Jacobian block".into()))
}

/// Cotangent push-forward of the momenta: solves `Bᵀ p' = p` from the top
/// level down, the diagonal blocks being the base Jacobian.
pub fn transform_momenta(t: &ChartTransition, pt: &PhasePoint) -> Result<PhasePoint> {
    let levels = pt.jet().levels();
    let blocks = prolonged_jacobian_blocks(t, &levels)?;
    let k = pt.order();
    let jac = &blocks[0][0];
    let mut primed: Vec<DVector<f64>> = vec![DVector::zeros(t.dim()); k];
    for a in (0..k).rev() {
        let mut rhs = DVector::from_column_slice(pt.momentum(a));
        for (b, pb) in primed.iter().enumerate().skip(a + 1) {
            rhs -= blocks[b][a].transpose() * pb;
        }
        primed[a] = solve_transposed(jac, rhs)?;
    }
    let jet = transform_jet(t, pt.jet())?;
    PhasePoint::new(jet, primed.into_iter().map(|v| v.as_slice().to_vec()).collect())
}

/// The law in its stated direction: `p_(a) = sum_b (∂y'^(b)/∂y^(a))ᵀ p'_(b)`,
/// with the blocks evaluated at the unprimed jet.
pub fn pull_back_momenta(t: &ChartTransition, jet: &JetPoint, primed: &[Vec<f64>]) -> Result<PhasePoint> {
    let k = jet.order();
    if primed.len() != k {
        return Err(Error::arg("momentum level count does not match the order"));
    }
    let blocks = prolonged_jacobian_blocks(t, &jet.levels())?;
    let mut p = Vec::with_capacity(k);
    for a in 0..k {
        let mut acc = DVector::zeros(t.dim());
        for (b, pb) in primed.iter().enumerate().skip(a) {
            acc += blocks[b][a].transpose() * DVector::from_column_slice(pb);
        }
        p.push(acc.as_slice().to_vec());
    }
    PhasePoint::new(jet.clone(), p)
}
