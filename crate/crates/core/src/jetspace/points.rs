use crate::error::{Error, Result};

fn check_len(name: &str, v: &[f64], m: usize) -> Result<()> {
    if v.len() != m {
        return Err(Error::arg(format!(
            "{name} has length {} but the dimension is {m}",
            v.len()
        )));
    }
    Ok(())
}

fn split_flat(flat: &[f64], m: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    if m == 0 || flat.len() != m * count {
        return Err(Error::arg(format!(
            "flat vector of length {} does not hold {count} blocks of size {m}",
            flat.len()
        )));
    }
    Ok(flat.chunks(m).map(<[f64]>::to_vec).collect())
}

/// A point of `T^(k-1)M`: base coordinates `x` and jet levels `y^(1..k-1)`,
/// where `y^(a) = (1/a!) d^a x / dt^a` along a curve.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    x: Vec<f64>,
    y: Vec<Vec<f64>>,
}

impl JetPoint {
    pub fn new(x: Vec<f64>, y: Vec<Vec<f64>>) -> Result<Self> {
        let m = x.len();
        if m == 0 {
            return Err(Error::arg("dimension must be positive"));
        }
        for (a, level) in y.iter().enumerate() {
            check_len(&format!("jet level {}", a + 1), level, m)?;
        }
        Ok(JetPoint { x, y })
    }

    /// Order-1 point (no jet levels).
    pub fn base(x: Vec<f64>) -> Result<Self> {
        Self::new(x, Vec::new())
    }

    /// The zero point of order `k` in dimension `m`.
    pub fn zero(k: usize, m: usize) -> Self {
        JetPoint {
            x: vec![0.0; m],
            y: vec![vec![0.0; m]; k.saturating_sub(1)],
        }
    }

    /// Builds from levels `[x, y1, .., y^(k-1)]`.
    pub fn from_levels(mut levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::arg("at least the base level is required"));
        }
        let x = levels.remove(0);
        Self::new(x, levels)
    }

    /// The order `k`; the point carries `k - 1` jet levels.
    pub fn order(&self) -> usize {
        self.y.len() + 1
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Level `a` with level 0 the base point.
    pub fn level(&self, a: usize) -> &[f64] {
        if a == 0 {
            &self.x
        } else {
            &self.y[a - 1]
        }
    }

    pub fn levels(&self) -> Vec<&[f64]> {
        (0..self.order()).map(|a| self.level(a)).collect()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.levels().concat()
    }

    pub fn from_flat(order: usize, dim: usize, flat: &[f64]) -> Result<Self> {
        if order == 0 {
            return Err(Error::arg("order must be at least 1"));
        }
        Self::from_levels(split_flat(flat, dim, order)?)
    }

    pub fn with_top(self, top: Vec<f64>) -> Result<ExtendedJetPoint> {
        ExtendedJetPoint::new(self, top)
    }

    pub fn with_momentum(self, pk: Vec<f64>) -> Result<DualJetPoint> {
        DualJetPoint::new(self, pk)
    }

    pub fn with_momenta(self, p: Vec<Vec<f64>>) -> Result<PhasePoint> {
        PhasePoint::new(self, p)
    }
}

/// A point of `T^kM`: a [`JetPoint`] of order `k` plus the top level `y^(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedJetPoint {
    jet: JetPoint,
    top: Vec<f64>,
}

impl ExtendedJetPoint {
    pub fn new(jet: JetPoint, top: Vec<f64>) -> Result<Self> {
        check_len("top level", &top, jet.dim())?;
        Ok(ExtendedJetPoint { jet, top })
    }

    /// Builds from levels `[x, y1, .., y^(k)]`.
    pub fn from_levels(mut levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::arg("an extended point needs the base and a top level"));
        }
        let top = levels.pop().expect("checked length");
        Self::new(JetPoint::from_levels(levels)?, top)
    }

    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn dim(&self) -> usize {
        self.jet.dim()
    }

    pub fn jet(&self) -> &JetPoint {
        &self.jet
    }

    pub fn top(&self) -> &[f64] {
        &self.top
    }

    pub fn x(&self) -> &[f64] {
        self.jet.x()
    }

    /// Level `a` for `a = 0..=k`.
    pub fn level(&self, a: usize) -> &[f64] {
        if a == self.order() {
            &self.top
        } else {
            self.jet.level(a)
        }
    }

    pub fn levels(&self) -> Vec<&[f64]> {
        (0..=self.order()).map(|a| self.level(a)).collect()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.levels().concat()
    }

    pub fn from_flat(order: usize, dim: usize, flat: &[f64]) -> Result<Self> {
        Self::from_levels(split_flat(flat, dim, order + 1)?)
    }

    pub fn into_parts(self) -> (JetPoint, Vec<f64>) {
        (self.jet, self.top)
    }
}

/// A point of `T*T^(k-1)M`: jet coordinates plus momenta `p_(0..k-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    jet: JetPoint,
    p: Vec<Vec<f64>>,
}

impl PhasePoint {
    pub fn new(jet: JetPoint, p: Vec<Vec<f64>>) -> Result<Self> {
        if p.len() != jet.order() {
            return Err(Error::arg(format!(
                "order {} needs {} momentum levels, got {}",
                jet.order(),
                jet.order(),
                p.len()
            )));
        }
        for (a, level) in p.iter().enumerate() {
            check_len(&format!("momentum level {a}"), level, jet.dim())?;
        }
        Ok(PhasePoint { jet, p })
    }

    pub fn zero(k: usize, m: usize) -> Self {
        PhasePoint {
            jet: JetPoint::zero(k, m),
            p: vec![vec![0.0; m]; k],
        }
    }

    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn dim(&self) -> usize {
        self.jet.dim()
    }

    pub fn jet(&self) -> &JetPoint {
        &self.jet
    }

    pub fn x(&self) -> &[f64] {
        self.jet.x()
    }

    /// Momentum level `p_(a)`, `a = 0..k-1`.
    pub fn momentum(&self, a: usize) -> &[f64] {
        &self.p[a]
    }

    pub fn momenta(&self) -> &[Vec<f64>] {
        &self.p
    }

    /// Layout `[x, y1, .., y^(k-1), p0, .., p_(k-1)]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.jet.to_flat();
        for level in &self.p {
            v.extend_from_slice(level);
        }
        v
    }

    pub fn from_flat(order: usize, dim: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != 2 * order * dim {
            return Err(Error::arg(format!(
                "flat phase vector has length {}, expected {}",
                flat.len(),
                2 * order * dim
            )));
        }
        let (q, p) = flat.split_at(order * dim);
        Self::new(JetPoint::from_flat(order, dim, q)?, split_flat(p, dim, order)?)
    }

    pub fn into_parts(self) -> (JetPoint, Vec<Vec<f64>>) {
        (self.jet, self.p)
    }
}

/// A point of `T^(k*)M`: jet coordinates plus the single momentum `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualJetPoint {
    jet: JetPoint,
    pk: Vec<f64>,
}

impl DualJetPoint {
    pub fn new(jet: JetPoint, pk: Vec<f64>) -> Result<Self> {
        check_len("momentum", &pk, jet.dim())?;
        Ok(DualJetPoint { jet, pk })
    }

    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn dim(&self) -> usize {
        self.jet.dim()
    }

    pub fn jet(&self) -> &JetPoint {
        &self.jet
    }

    pub fn x(&self) -> &[f64] {
        self.jet.x()
    }

    pub fn pk(&self) -> &[f64] {
        &self.pk
    }

    /// Layout `[x, y1, .., y^(k-1), p]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.jet.to_flat();
        v.extend_from_slice(&self.pk);
        v
    }

    pub fn from_flat(order: usize, dim: usize, flat: &[f64]) -> Result<Self> {
        let mut blocks = split_flat(flat, dim, order + 1)?;
        let pk = blocks.pop().expect("non-empty");
        Self::new(JetPoint::from_levels(blocks)?, pk)
    }

    pub fn with_momentum(&self, pk: Vec<f64>) -> Result<Self> {
        Self::new(self.jet.clone(), pk)
    }

    pub fn into_parts(self) -> (JetPoint, Vec<f64>) {
        (self.jet, self.pk)
    }
}

/// Drops `p_(0..k-2)` and keeps `p_(k-1)` as the momentum of `T^(k*)M`.
pub fn project_pi_prime(pt: &PhasePoint) -> DualJetPoint {
    DualJetPoint {
        jet: pt.jet.clone(),
        pk: pt.p[pt.order() - 1].clone(),
    }
}

/// Types that carry jet levels `[x, y1, ..]` and can be rebuilt from them.
pub trait JetCoordinates: Sized {
    fn jet_levels(&self) -> Vec<&[f64]>;
    fn with_jet_levels(&self, levels: Vec<Vec<f64>>) -> Result<Self>;
}

impl JetCoordinates for JetPoint {
    fn jet_levels(&self) -> Vec<&[f64]> {
        self.levels()
    }
    fn with_jet_levels(&self, levels: Vec<Vec<f64>>) -> Result<Self> {
        JetPoint::from_levels(levels)
    }
}

impl JetCoordinates for ExtendedJetPoint {
    fn jet_levels(&self) -> Vec<&[f64]> {
        self.levels()
    }
    fn with_jet_levels(&self, levels: Vec<Vec<f64>>) -> Result<Self> {
        ExtendedJetPoint::from_levels(levels)
    }
}
