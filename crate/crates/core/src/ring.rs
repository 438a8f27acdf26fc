//! Exact multivariate Laurent polynomials over the rationals.
//!
//! A [`CoordinateRing`] fixes an ordered list of variables and marks some of
//! them invertible. Elements are stored as sparse maps from dense exponent
//! vectors to nonzero [`BigRational`] coefficients, so two equal polynomials
//! always have identical term maps.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Shared handle to a coordinate ring.
pub type Ring = Arc<CoordinateRing>;

/// Rational number helper.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Variables of a (Laurent) polynomial ring over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoordinateRing {
    names: Vec<String>,
    invertible: Vec<bool>,
}

impl CoordinateRing {
    /// Declares a ring. Names must be distinct identifiers; `invertible`
    /// lists the variables allowed negative exponents.
    pub fn new<S: AsRef<str>>(names: &[S], invertible: &[S]) -> Result<Ring> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::InvalidRing(format!(
                    "`{n}` is not a valid variable name"
                )));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidRing(format!("variable `{n}` declared twice")));
            }
        }
        let mut flags = vec![false; names.len()];
        for inv in invertible {
            let inv = inv.as_ref();
            let idx = names
                .iter()
                .position(|n| n == inv)
                .ok_or_else(|| Error::UnknownVariable(inv.to_string()))?;
            flags[idx] = true;
        }
        Ok(Arc::new(CoordinateRing {
            names,
            invertible: flags,
        }))
    }

    /// Polynomial ring without invertible variables.
    pub fn polynomial<S: AsRef<str>>(names: &[S]) -> Result<Ring> {
        Self::new::<S>(names, &[])
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.invertible[i]
    }

    pub fn has_invertible(&self) -> bool {
        self.invertible.iter().any(|&b| b)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// The same ring with one extra invertible variable appended.
    pub fn with_invertible_var(&self, name: &str) -> Result<Ring> {
        let mut names = self.names.clone();
        names.push(name.to_string());
        let inv: Vec<String> = self
            .names
            .iter()
            .zip(&self.invertible)
            .filter(|(_, &b)| b)
            .map(|(n, _)| n.clone())
            .chain(std::iter::once(name.to_string()))
            .collect();
        CoordinateRing::new(&names, &inv)
    }
}

pub(crate) fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Dense exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    /// Total degree, with inverse variables counting negatively.
    pub fn weight(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|e| -e).collect())
    }

    /// True if every nonzero exponent sits on an invertible variable.
    pub fn is_unit_in(&self, ring: &CoordinateRing) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, &e)| e == 0 || ring.is_invertible(i))
    }

    fn render(&self, ring: &CoordinateRing) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| {
                if e == 1 {
                    ring.name(i).to_string()
                } else {
                    format!("{}^{}", ring.name(i), e)
                }
            })
            .collect();
        parts.join("*")
    }
}

/// Ordering used for display: higher weight first, then lexicographically larger.
fn display_order(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    b.weight().cmp(&a.weight()).then_with(|| b.cmp(a))
}

/// A Laurent polynomial with rational coefficients in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    ring: Ring,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(ring: &Ring) -> Self {
        Poly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, BigRational::one())
    }

    pub fn constant(ring: &Ring, c: BigRational) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.nvars()), c);
        }
        p
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        let mut p = Self::zero(ring);
        p.terms
            .insert(Monomial::var(ring.nvars(), i), BigRational::one());
        p
    }

    pub fn var_named(ring: &Ring, name: &str) -> Result<Self> {
        Ok(Self::var(ring, ring.index_of(name)?))
    }

    /// `c * x^exps`; negative exponents must sit on invertible variables.
    pub fn monomial(ring: &Ring, exps: &[i32], c: BigRational) -> Result<Self> {
        if exps.len() != ring.nvars() {
            return Err(Error::InvalidRing(format!(
                "exponent vector of length {} in a ring with {} variables",
                exps.len(),
                ring.nvars()
            )));
        }
        for (i, &e) in exps.iter().enumerate() {
            if e < 0 && !ring.is_invertible(i) {
                return Err(Error::NegativeExponent(ring.name(i).to_string()));
            }
        }
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial(exps.to_vec()), c);
        }
        Ok(p)
    }

    pub(crate) fn from_map(ring: &Ring, terms: BTreeMap<Monomial, BigRational>) -> Self {
        let mut p = Poly {
            ring: ring.clone(),
            terms,
        };
        p.terms.retain(|_, c| !c.is_zero());
        p
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&Monomial::one(self.ring.nvars()))
    }

    fn check_ring(&self, other: &Poly) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        Ok(self.add_unchecked(other, true))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Poly, negate: bool) -> Poly {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert_with(BigRational::zero);
            if negate {
                *entry -= c;
            } else {
                *entry += c;
            }
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        Poly {
            ring: self.ring.clone(),
            terms,
        }
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        let mut terms: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *terms.entry(m1.mul(m2)).or_insert_with(BigRational::zero) += c1 * c2;
            }
        }
        Self::from_map(&self.ring, terms)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by a monomial `x^m`.
    pub fn shift(&self, m: &Monomial) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            terms.insert(m2, c * BigRational::from_integer(BigInt::from(e)));
        }
        Poly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn derivative_named(&self, name: &str) -> Result<Poly> {
        Ok(self.derivative(self.ring.index_of(name)?))
    }

    /// Applies `∂^alpha`.
    pub fn derivative_multi(&self, alpha: &[u32]) -> Poly {
        let mut p = self.clone();
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                if p.is_zero() {
                    return p;
                }
                p = p.derivative(i);
            }
        }
        p
    }

    /// Returns `(c, m)` when `self = c * x^m` is a unit of the ring.
    pub fn as_unit(&self) -> Option<(BigRational, Monomial)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        m.is_unit_in(&self.ring).then(|| (c.clone(), m.clone()))
    }

    /// Inverse of a unit `c * x^m`.
    pub fn unit_inverse(&self) -> Result<Poly> {
        let (c, m) = self
            .as_unit()
            .ok_or_else(|| Error::NotAUnit(self.leading_term_text()))?;
        let mut p = Poly::zero(&self.ring);
        p.terms.insert(m.inverse(), c.recip());
        Ok(p)
    }

    /// Text of the first displayed term, used in diagnostics.
    pub fn leading_term_text(&self) -> String {
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| display_order(a, b));
        match keys.first() {
            None => "0".to_string(),
            Some(m) => {
                let single = Poly {
                    ring: self.ring.clone(),
                    terms: std::iter::once(((*m).clone(), self.terms[*m].clone())).collect(),
                };
                single.to_string()
            }
        }
    }

    /// Splits into homogeneous pieces of fixed total weight.
    pub fn weight_components(&self) -> BTreeMap<i64, Poly> {
        let mut out: BTreeMap<i64, BTreeMap<Monomial, BigRational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight())
                .or_default()
                .insert(m.clone(), c.clone());
        }
        out.into_iter()
            .map(|(w, t)| (w, Poly::from_map(&self.ring, t)))
            .collect()
    }

    /// Re-embeds into a ring whose first variables coincide with this one's.
    pub fn embed(&self, target: &Ring) -> Result<Poly> {
        let n = self.ring.nvars();
        if target.nvars() < n || target.names()[..n] != self.ring.names()[..] {
            return Err(Error::RingMismatch);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e.resize(target.nvars(), 0);
                (Monomial(e), c.clone())
            })
            .collect();
        Ok(Poly {
            ring: target.clone(),
            terms,
        })
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    /// Panics on ring mismatch; use [`Poly::try_add`] at API boundaries.
    fn add(self, rhs: &'a Poly) -> Poly {
        self.try_add(rhs).expect("ring mismatch")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.try_sub(rhs).expect("ring mismatch")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.try_mul(rhs).expect("ring mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Renders `coeff * f1 * f2 * …` as a signed term: returns (is_negative, text).
pub(crate) fn signed_term(c: &BigRational, factors: &[String]) -> (bool, String) {
    let neg = c.is_negative();
    let a = c.abs();
    let factors: Vec<&str> = factors
        .iter()
        .map(String::as_str)
        .filter(|f| !f.is_empty())
        .collect();
    let text = if factors.is_empty() {
        fmt_rational(&a)
    } else if a.is_one() {
        factors.join("*")
    } else {
        format!("{}*{}", fmt_rational(&a), factors.join("*"))
    };
    (neg, text)
}

pub(crate) fn join_signed(parts: &[(bool, String)]) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (neg, t)) in parts.iter().enumerate() {
        match (k, neg) {
            (0, true) => {
                out.push('-');
                out.push_str(t);
            }
            (0, false) => out.push_str(t),
            (_, true) => {
                out.push_str(" - ");
                out.push_str(t);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
    }
    out
}

impl Poly {
    /// Terms in display order as (coefficient, monomial text).
    pub(crate) fn display_terms(&self) -> Vec<(&BigRational, String)> {
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| display_order(a, b));
        keys.into_iter()
            .map(|m| (&self.terms[m], m.render(&self.ring)))
            .collect()
    }

    pub(crate) fn signed_terms(&self) -> Vec<(bool, String)> {
        self.display_terms()
            .into_iter()
            .map(|(c, m)| signed_term(c, &[m]))
            .collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_signed(&self.signed_terms()))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}
