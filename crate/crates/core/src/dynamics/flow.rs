use crate::duality::{legendre_inverse, AffineHamiltonianModel, LagrangianModel, NewtonConfig};
use crate::error::{Error, Result};
use crate::jetspace::{project_pi_prime, JetPoint, PhasePoint};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_shape(order: usize, dim: usize, pt: &PhasePoint) -> Result<()> {
    if pt.order() != order || pt.dim() != dim {
        return Err(Error::arg(format!(
            "phase point of order {} / dim {} does not match the model ({order} / {dim})",
            pt.order(),
            pt.dim()
        )));
    }
    Ok(())
}

/// `sum_{a=1}^{k-1} a p_(a-1)·y^(a)`, the kinematic part shared by both
/// energies.
fn kinematic(pt: &PhasePoint) -> f64 {
    (1..pt.order())
        .map(|a| a as f64 * dot(pt.momentum(a - 1), pt.jet().level(a)))
        .sum()
}

/// `E = sum_{a=1}^{k-1} a p_(a-1)·y^(a) + k H₀(x, y, p_(k-1))`.
pub fn energy(h: &AffineHamiltonianModel, pt: &PhasePoint) -> Result<f64> {
    check_shape(h.order(), h.dim(), pt)?;
    let k = pt.order() as f64;
    Ok(kinematic(pt) + k * h.value(&project_pi_prime(pt))?)
}

/// Energy of a Lagrangian: `sum a p_(a-1)·y^(a) + k p_(k-1)·H − k L(.., H)`
/// with `H` from the inverse Legendre map.
pub fn lagrangian_energy(l: &LagrangianModel, pt: &PhasePoint, cfg: &NewtonConfig) -> Result<f64> {
    check_shape(l.order(), l.dim(), pt)?;
    let k = pt.order();
    let e = legendre_inverse(l, &project_pi_prime(pt), cfg)?;
    Ok(kinematic(pt) + k as f64 * (dot(pt.momentum(k - 1), e.top()) - l.value(&e)?))
}

fn assemble(pt: &PhasePoint, top_rate: Vec<f64>, forces: Vec<Vec<f64>>) -> Result<PhasePoint> {
    let k = pt.order();
    let mut levels: Vec<Vec<f64>> = (0..k - 1)
        .map(|a| pt.jet().level(a + 1).iter().map(|v| (a + 1) as f64 * v).collect())
        .collect();
    levels.push(top_rate);
    let rates: Vec<Vec<f64>> = forces
        .into_iter()
        .enumerate()
        .map(|(a, f)| {
            if a == 0 {
                f
            } else {
                f.iter()
                    .zip(pt.momentum(a - 1))
                    .map(|(fi, pi)| fi - a as f64 * pi)
                    .collect()
            }
        })
        .collect();
    PhasePoint::new(JetPoint::from_levels(levels)?, rates)
}

/// Right-hand side of the Hamilton equations of `E`, shaped as a phase point:
/// levels `x, y1, ..` move along the kinematic chain, the top jet level moves
/// by `k ∂H₀/∂p`, and `p_(a)` by `−k ∂H₀/∂y^(a) − a p_(a-1)`.
pub fn hamilton_rhs(h: &AffineHamiltonianModel, pt: &PhasePoint) -> Result<PhasePoint> {
    check_shape(h.order(), h.dim(), pt)?;
    let k = pt.order();
    let kf = k as f64;
    let g = h.gradient(&project_pi_prime(pt))?;
    let top = g[k].iter().map(|v| kf * v).collect();
    let forces = g[..k].iter().map(|l| l.iter().map(|v| -kf * v).collect()).collect();
    assemble(pt, top, forces)
}

/// Flow of the Lagrangian energy: the top jet level moves by `k H` and
/// `p_(a)` by `k ∂L/∂y^(a) − a p_(a-1)`.
pub fn lagrangian_rhs(l: &LagrangianModel, pt: &PhasePoint, cfg: &NewtonConfig) -> Result<PhasePoint> {
    check_shape(l.order(), l.dim(), pt)?;
    let k = pt.order();
    let kf = k as f64;
    let e = legendre_inverse(l, &project_pi_prime(pt), cfg)?;
    let g = l.gradient(&e)?;
    let top = e.top().iter().map(|v| kf * v).collect();
    let forces = g[..k].iter().map(|lv| lv.iter().map(|v| kf * v).collect()).collect();
    assemble(pt, top, forces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taylor::{norm_sq, Taylor};

    #[test]
    fn constant_hamiltonian_leaves_only_the_kinematic_chain() {
        let h = AffineHamiltonianModel::analytic(3, 1, |z: &[Taylor]| z[0].lift(2.0)).unwrap();
        let pt = PhasePoint::from_flat(3, 1, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let r = hamilton_rhs(&h, &pt).unwrap();
        assert_eq!(r.jet().level(0), &[2.0]);
        assert_eq!(r.jet().level(1), &[6.0]);
        assert_eq!(r.jet().level(2), &[0.0]);
        assert_eq!(r.momentum(0), &[0.0]);
        assert_eq!(r.momentum(1), &[-4.0]);
        assert_eq!(r.momentum(2), &[-10.0]);
        assert!((energy(&h, &pt).unwrap() - (1.0 * 4.0 * 2.0 + 2.0 * 5.0 * 3.0 + 6.0)).abs() < 1e-14);
    }

    #[test]
    fn order_one_is_classical() {
        let h = AffineHamiltonianModel::analytic(1, 1, |z: &[Taylor]| norm_sq(z) * 0.5).unwrap();
        let pt = PhasePoint::from_flat(1, 1, &[0.3, -0.7]).unwrap();
        let r = hamilton_rhs(&h, &pt).unwrap();
        assert!((r.jet().level(0)[0] + 0.7).abs() < 1e-15);
        assert!((r.momentum(0)[0] + 0.3).abs() < 1e-15);
        assert!((energy(&h, &pt).unwrap() - 0.5 * (0.09 + 0.49)).abs() < 1e-15);
    }
}
