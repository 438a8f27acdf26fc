//! Truncated formal power series in the deformation parameter ħ.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::{join_signed, signed_term, Poly, Ring};

/// Payload of an ħ-series.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &BigRational) -> Self;
}

impl Coefficient for Poly {
    fn zero_like(&self) -> Self {
        Poly::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        Poly::one(self.ring())
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &BigRational) -> Self {
        Poly::scale(self, c)
    }
}

impl Coefficient for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &BigRational) -> Self {
        self * c
    }
}

/// `c_0 + c_1 ħ + … + c_N ħ^N  (mod ħ^{N+1})`.
///
/// Always holds exactly `order + 1` coefficients. Binary operations truncate
/// to the smaller of the two orders.
#[derive(Clone, PartialEq)]
pub struct HSeries<T> {
    coeffs: Vec<T>,
}

/// ħ-series of polynomials, the workhorse scalar type.
pub type HPoly = HSeries<Poly>;

impl<T: Coefficient> HSeries<T> {
    /// Builds a series of the given order; missing coefficients are zero and
    /// extra ones are dropped.
    pub fn from_coeffs(proto: &T, mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.truncate(order + 1);
        while coeffs.len() < order + 1 {
            coeffs.push(proto.zero_like());
        }
        HSeries { coeffs }
    }

    pub fn constant(c: T, order: usize) -> Self {
        let proto = c.clone();
        Self::from_coeffs(&proto, vec![c], order)
    }

    pub fn zero_like(proto: &T, order: usize) -> Self {
        Self::from_coeffs(proto, vec![], order)
    }

    /// `c · ħ^k`.
    pub fn monomial(c: T, k: usize, order: usize) -> Self {
        let zero = c.zero_like();
        let mut v = vec![zero; k];
        v.push(c);
        Self::from_coeffs(&v[0].clone(), v, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    /// Coefficient of ħ^k, zero beyond the truncation order.
    pub fn coeff_or_zero(&self, k: usize) -> T {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.coeffs[0].zero_like())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_zero)
    }

    /// Lowest ħ-power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let proto = self.coeffs[0].clone();
        Self::from_coeffs(&proto, self.coeffs.clone(), order)
    }

    pub fn map<F: Fn(&T) -> T>(&self, f: F) -> Self {
        HSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        HSeries {
            coeffs: (0..=n)
                .map(|k| self.coeffs[k].add(&other.coeffs[k]))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        HSeries {
            coeffs: (0..=n)
                .map(|k| self.coeffs[k].sub(&other.coeffs[k]))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.map(|x| x.scale(c))
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut coeffs: Vec<T> = (0..=n).map(|_| self.coeffs[0].zero_like()).collect();
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        HSeries { coeffs }
    }

    /// Multiplies by ħ^k, dropping what falls past the truncation order.
    pub fn shift_hbar(&self, k: usize) -> Self {
        let n = self.order();
        let zero = self.coeffs[0].zero_like();
        let mut coeffs = vec![zero; k.min(n + 1)];
        coeffs.extend(self.coeffs.iter().take((n + 1).saturating_sub(k)).cloned());
        HSeries { coeffs }
    }

    pub fn set_coeff(&mut self, k: usize, c: T) {
        self.coeffs[k] = c;
    }

    /// `exp(g)` for `g` with vanishing ħ^0 coefficient.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let one = Self::constant(self.coeffs[0].one_like(), self.order());
        let mut acc = one.clone();
        let mut term = one;
        for k in 1..=self.order() {
            term = term
                .mul(self)
                .scale(&BigRational::new(1.into(), (k as i64).into()));
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

impl HSeries<Poly> {
    pub fn ring(&self) -> &Ring {
        self.coeffs[0].ring()
    }

    pub fn from_poly(p: Poly, order: usize) -> Self {
        Self::constant(p, order)
    }

    pub fn zero(ring: &Ring, order: usize) -> Self {
        Self::zero_like(&Poly::zero(ring), order)
    }

    pub fn one(ring: &Ring, order: usize) -> Self {
        Self::constant(Poly::one(ring), order)
    }

    /// The formal parameter ħ itself.
    pub fn hbar(ring: &Ring, order: usize) -> Self {
        Self::monomial(Poly::one(ring), 1, order)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check(self, other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check(self, other)?;
        Ok(self.mul(other))
    }

    pub fn derivative(&self, var: usize) -> Self {
        self.map(|c| c.derivative(var))
    }

    pub fn derivative_named(&self, name: &str) -> Result<Self> {
        Ok(self.derivative(self.ring().index_of(name)?))
    }

    pub fn derivative_multi(&self, alpha: &[u32]) -> Self {
        self.map(|c| c.derivative_multi(alpha))
    }

    /// Inverse of a unit series `f = f_0 + ħ f_1 + …` with `f_0 = c·x^m`.
    ///
    /// Solved order by order: `g_0 = f_0^{-1}` and
    /// `g_k = -f_0^{-1} Σ_{j≥1} f_j g_{k-j}`.
    pub fn unit_inverse(&self) -> Result<Self> {
        let f0_inv = self.coeffs[0].unit_inverse()?;
        let n = self.order();
        let mut g: Vec<Poly> = vec![f0_inv.clone()];
        for k in 1..=n {
            let mut acc = Poly::zero(self.ring());
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = &acc + &(&self.coeffs[j] * &g[k - j]);
                }
            }
            g.push(-(&f0_inv * &acc));
        }
        Ok(HSeries { coeffs: g })
    }

    /// Integer power; negative exponents require a unit.
    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 {
            self.unit_inverse()?
        } else {
            self.clone()
        };
        let mut acc = Self::one(self.ring(), self.order());
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Substitutes ħ = 0 after dividing out ħ^k; used for semiclassical limits.
    pub fn leading(&self, k: usize) -> Poly {
        self.coeff_or_zero(k)
    }
}

fn check(a: &HPoly, b: &HPoly) -> Result<()> {
    if crate::ring::same_ring(a.ring(), b.ring()) {
        Ok(())
    } else {
        Err(Error::RingMismatch)
    }
}

impl<T: Coefficient> fmt::Debug for HSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

/// Renders `Σ_k c_k h^k` with `h` standing for ħ, each term followed by `suffix`.
pub(crate) fn hpoly_signed_terms(s: &HPoly, suffix: &str) -> Vec<(bool, String)> {
    let mut parts = Vec::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        let hpart = match k {
            0 => String::new(),
            1 => "h".to_string(),
            _ => format!("h^{k}"),
        };
        for (coef, mono) in c.display_terms() {
            parts.push(signed_term(
                coef,
                &[hpart.clone(), mono, suffix.to_string()],
            ));
        }
    }
    parts
}

impl fmt::Display for HSeries<Poly> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_signed(&hpoly_signed_terms(self, "")))
    }
}
