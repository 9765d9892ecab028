//! Truncated univariate Taylor series.
//!
//! A [`Taylor`] value holds the coefficients `c[0] + c[1] s + ... + c[n] s^n`
//! of a function of one variable `s`, truncated at a fixed degree. Evaluating
//! a map written against `Taylor` on the input `x + s v` yields all
//! directional derivatives along `v` up to that degree, exactly up to
//! round-off. Models and charts use this as their analytic derivative oracle.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Debug, PartialEq)]
pub struct Taylor {
    c: Vec<f64>,
}

impl Taylor {
    /// A constant series of the given degree.
    pub fn constant(value: f64, degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        c[0] = value;
        Taylor { c }
    }

    /// The series `value + slope * s`.
    pub fn variable(value: f64, slope: f64, degree: usize) -> Self {
        let mut t = Self::constant(value, degree);
        if degree >= 1 {
            t.c[1] = slope;
        }
        t
    }

    pub fn from_coeffs(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "a series needs at least one coefficient");
        Taylor { c }
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn coeff(&self, j: usize) -> f64 {
        self.c.get(j).copied().unwrap_or(0.0)
    }

    /// `d^j/ds^j` at `s = 0`, i.e. `j! c[j]`.
    pub fn derivative(&self, j: usize) -> f64 {
        self.coeff(j) * factorial(j)
    }

    /// A constant series of the same degree as `self`.
    pub fn lift(&self, value: f64) -> Self {
        Self::constant(value, self.degree())
    }

    fn zip_with(&self, other: &Taylor, f: impl Fn(f64, f64) -> f64) -> Taylor {
        let n = self.c.len().max(other.c.len());
        let c = (0..n).map(|j| f(self.coeff(j), other.coeff(j))).collect();
        Taylor { c }
    }

    fn map_tail(&self, head: f64, deriv: &Taylor) -> Taylor {
        // f(u(s)) with f' o u = deriv: integrate u' * deriv term by term.
        let n = self.c.len();
        let mut out = vec![0.0; n];
        out[0] = head;
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * deriv.coeff(k - j);
            }
            out[k] = acc / k as f64;
        }
        Taylor { c: out }
    }

    pub fn recip(&self) -> Taylor {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut out = vec![0.0; n];
        out[0] = 1.0 / a0;
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.c[j] * out[k - j];
            }
            out[k] = -acc / a0;
        }
        Taylor { c: out }
    }

    pub fn exp(&self) -> Taylor {
        let n = self.c.len();
        let mut out = vec![0.0; n];
        out[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * out[k - j];
            }
            out[k] = acc / k as f64;
        }
        Taylor { c: out }
    }

    pub fn ln(&self) -> Taylor {
        let d = self.recip();
        self.map_tail(self.c[0].ln(), &d)
    }

    /// Returns `(sin, cos)` of the series.
    pub fn sin_cos(&self) -> (Taylor, Taylor) {
        let n = self.c.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..n {
            let mut acc_s = 0.0;
            let mut acc_c = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                acc_s += w * c[k - j];
                acc_c -= w * s[k - j];
            }
            s[k] = acc_s / k as f64;
            c[k] = acc_c / k as f64;
        }
        (Taylor { c: s }, Taylor { c })
    }

    pub fn sin(&self) -> Taylor {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Taylor {
        self.sin_cos().1
    }

    /// Returns `(sinh, cosh)` of the series.
    pub fn sinh_cosh(&self) -> (Taylor, Taylor) {
        let n = self.c.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = self.c[0].sinh();
        c[0] = self.c[0].cosh();
        for k in 1..n {
            let mut acc_s = 0.0;
            let mut acc_c = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                acc_s += w * c[k - j];
                acc_c += w * s[k - j];
            }
            s[k] = acc_s / k as f64;
            c[k] = acc_c / k as f64;
        }
        (Taylor { c: s }, Taylor { c })
    }

    pub fn sinh(&self) -> Taylor {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Taylor {
        self.sinh_cosh().1
    }

    pub fn sqrt(&self) -> Taylor {
        let n = self.c.len();
        let mut out = vec![0.0; n];
        out[0] = self.c[0].sqrt();
        for k in 1..n {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= out[j] * out[k - j];
            }
            out[k] = acc / (2.0 * out[0]);
        }
        Taylor { c: out }
    }

    pub fn powi(&self, n: i32) -> Taylor {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = self.lift(1.0);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// Real power, requires a positive constant term.
    pub fn powf(&self, a: f64) -> Taylor {
        (&self.ln() * a).exp()
    }

    pub fn atan(&self) -> Taylor {
        let d = (&(self * self) + 1.0).recip();
        self.map_tail(self.c[0].atan(), &d)
    }

    pub fn asinh(&self) -> Taylor {
        let d = (&(self * self) + 1.0).sqrt().recip();
        self.map_tail(self.c[0].asinh(), &d)
    }

    /// Composition `self(inner(s) - inner(0))`: treats `self` as the Taylor
    /// expansion of some function around `inner(0)`.
    pub fn compose_shifted(&self, inner: &Taylor) -> Taylor {
        let mut delta = inner.clone();
        delta.c[0] = 0.0;
        // Horner in the shifted variable.
        let mut acc = inner.lift(*self.c.last().unwrap());
        for j in (0..self.c.len() - 1).rev() {
            acc = &(&acc * &delta) + self.c[j];
        }
        acc
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * j as f64)
}

impl<'a> Add<&'a Taylor> for &'a Taylor {
    type Output = Taylor;
    fn add(self, rhs: &Taylor) -> Taylor {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Taylor> for &'a Taylor {
    type Output = Taylor;
    fn sub(self, rhs: &Taylor) -> Taylor {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a Taylor> for &'a Taylor {
    type Output = Taylor;
    fn mul(self, rhs: &Taylor) -> Taylor {
        let n = self.c.len().max(rhs.c.len());
        let mut out = vec![0.0; n];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.c.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        Taylor { c: out }
    }
}

impl<'a> Div<&'a Taylor> for &'a Taylor {
    type Output = Taylor;
    fn div(self, rhs: &Taylor) -> Taylor {
        self * &rhs.recip()
    }
}

impl Neg for &Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        Taylor {
            c: self.c.iter().map(|v| -v).collect(),
        }
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        -&self
    }
}

macro_rules! owned_binops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Taylor> for Taylor {
            type Output = Taylor;
            fn $m(self, rhs: Taylor) -> Taylor { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Taylor> for Taylor {
            type Output = Taylor;
            fn $m(self, rhs: &Taylor) -> Taylor { (&self).$m(rhs) }
        }
        impl<'a> $tr<Taylor> for &'a Taylor {
            type Output = Taylor;
            fn $m(self, rhs: Taylor) -> Taylor { self.$m(&rhs) }
        }
    )*};
}
owned_binops!(Add add, Sub sub, Mul mul, Div div);

macro_rules! scalar_binops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for &Taylor {
            type Output = Taylor;
            fn $m(self, rhs: f64) -> Taylor { self.$m(&self.lift(rhs)) }
        }
        impl $tr<f64> for Taylor {
            type Output = Taylor;
            fn $m(self, rhs: f64) -> Taylor { (&self).$m(rhs) }
        }
        impl $tr<&Taylor> for f64 {
            type Output = Taylor;
            fn $m(self, rhs: &Taylor) -> Taylor { rhs.lift(self).$m(rhs) }
        }
        impl $tr<Taylor> for f64 {
            type Output = Taylor;
            fn $m(self, rhs: Taylor) -> Taylor { self.$m(&rhs) }
        }
    )*};
}
scalar_binops!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Taylor> for Taylor {
    fn add_assign(&mut self, rhs: &Taylor) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Taylor> for Taylor {
    fn add_assign(&mut self, rhs: Taylor) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Taylor> for Taylor {
    fn sub_assign(&mut self, rhs: &Taylor) {
        *self = &*self - rhs;
    }
}

impl MulAssign<f64> for Taylor {
    fn mul_assign(&mut self, rhs: f64) {
        for c in &mut self.c {
            *c *= rhs;
        }
    }
}

/// Sum of a list of series of the same degree; `degree` is used when empty.
pub fn sum(terms: impl IntoIterator<Item = Taylor>, degree: usize) -> Taylor {
    terms.into_iter().fold(Taylor::constant(0.0, degree), |acc, t| acc + t)
}

/// `sum_i a_i b_i` for two slices of series.
pub fn dot(a: &[Taylor], b: &[Taylor]) -> Taylor {
    let degree = a.first().map(Taylor::degree).unwrap_or(0);
    sum(a.iter().zip(b).map(|(x, y)| x * y), degree)
}

/// `sum_i a_i^2`.
pub fn norm_sq(a: &[Taylor]) -> Taylor {
    dot(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn exp_derivatives_are_all_exp() {
        let x = Taylor::variable(0.3, 1.0, 5);
        let e = x.exp();
        for j in 0..=5 {
            assert!(close(e.derivative(j), 0.3f64.exp()));
        }
    }

    #[test]
    fn sin_cos_derivative_cycle() {
        let x = Taylor::variable(0.7, 1.0, 4);
        let s = x.sin();
        let expect = [0.7f64.sin(), 0.7f64.cos(), -0.7f64.sin(), -0.7f64.cos(), 0.7f64.sin()];
        for (j, v) in expect.iter().enumerate() {
            assert!(close(s.derivative(j), *v), "j={j}");
        }
    }

    #[test]
    fn product_rule_on_polynomial() {
        // (1 + s)^3 = 1 + 3s + 3s^2 + s^3
        let x = Taylor::variable(1.0, 1.0, 3);
        let c = x.powi(3);
        assert_eq!(c.coeffs(), &[1.0, 3.0, 3.0, 1.0]);
    }

    #[test]
    fn sqrt_and_recip_invert_squaring() {
        let x = Taylor::variable(2.0, 0.5, 4);
        let y = (&x * &x).sqrt();
        for j in 0..=4 {
            assert!(close(y.coeff(j), x.coeff(j)));
        }
        let r = &x.recip() * &x;
        assert!(close(r.coeff(0), 1.0));
        for j in 1..=4 {
            assert!(r.coeff(j).abs() < 1e-14);
        }
    }

    #[test]
    fn ln_exp_and_asinh() {
        let x = Taylor::variable(0.4, 1.0, 4);
        let y = x.exp().ln();
        for j in 0..=4 {
            assert!(close(y.coeff(j), x.coeff(j)));
        }
        let a = x.sinh().asinh();
        for j in 0..=4 {
            assert!(close(a.coeff(j), x.coeff(j)));
        }
    }

    #[test]
    fn composition_matches_chain_rule() {
        // expansion of exp around 0 composed with u(s) = s + s^2
        let expo = Taylor::variable(0.0, 1.0, 4).exp();
        let inner = Taylor::from_coeffs(vec![0.0, 1.0, 1.0, 0.0, 0.0]);
        let direct = inner.exp();
        let composed = expo.compose_shifted(&inner);
        for j in 0..=4 {
            assert!(close(composed.coeff(j), direct.coeff(j)));
        }
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(5), 120.0);
    }
}
