//! The crossed product `A_ħ[t, t⁻¹]` twisted by `φ = exp(D_w)`, with
//! `(a tⁿ)(b tᵐ) = a ⋆ φⁿ(b) t^{n+m}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::derivation::QuantDerivation;
use super::star::{sample_poly, seeded_rng, StarProvider};
use crate::calculus::PolyVector;
use crate::error::{Error, Result};
use crate::ring::{Poly, Ring};
use crate::series::{hpoly_signed_terms, HPoly};

#[derive(Debug)]
struct CrossedInner {
    derivation: QuantDerivation,
}

/// The algebra `A_ħ[t, t⁻¹]` determined by a quantized derivation.
#[derive(Debug, Clone)]
pub struct CrossedAlgebra {
    inner: Arc<CrossedInner>,
}

impl PartialEq for CrossedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.derivation == other.inner.derivation
    }
}

impl CrossedAlgebra {
    pub fn new(derivation: QuantDerivation) -> Self {
        CrossedAlgebra {
            inner: Arc::new(CrossedInner { derivation }),
        }
    }

    pub fn derivation(&self) -> &QuantDerivation {
        &self.inner.derivation
    }

    pub fn provider(&self) -> &StarProvider {
        self.inner.derivation.provider()
    }

    pub fn ring(&self) -> &Ring {
        self.provider().ring()
    }

    pub fn order(&self) -> usize {
        self.provider().order()
    }

    /// `φⁿ(a)`.
    pub fn phi(&self, n: i64, a: &HPoly) -> Result<HPoly> {
        self.inner.derivation.exp_power(n, a)
    }

    pub fn zero(&self) -> CrossedElement {
        CrossedElement {
            algebra: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> CrossedElement {
        self.monomial(HPoly::one(self.ring(), self.order()), 0)
    }

    /// `a tⁿ`.
    pub fn monomial(&self, a: HPoly, n: i64) -> CrossedElement {
        self.element([(n, a)])
    }

    /// `tⁿ`.
    pub fn t_power(&self, n: i64) -> CrossedElement {
        self.monomial(HPoly::one(self.ring(), self.order()), n)
    }

    pub fn element(&self, terms: impl IntoIterator<Item = (i64, HPoly)>) -> CrossedElement {
        let mut e = self.zero();
        for (n, a) in terms {
            e.insert(n, a.truncate(self.order()));
        }
        e
    }

    pub fn multiply(&self, a: &CrossedElement, b: &CrossedElement) -> Result<CrossedElement> {
        if a.algebra != *self || b.algebra != *self {
            return Err(Error::ProviderMismatch);
        }
        let star = self.provider();
        let mut out = self.zero();
        for (&n, an) in &a.terms {
            for (&m, bm) in &b.terms {
                out.insert(n + m, star.star(an, &self.phi(n, bm)?)?);
            }
        }
        Ok(out)
    }

    /// The Euler field `t ∂_t`.
    pub fn euler(&self, e: &CrossedElement) -> CrossedElement {
        let mut out = self.zero();
        for (&n, a) in &e.terms {
            out.insert(n, a.scale(&crate::ring::int(n)));
        }
        out
    }

    /// A random element with `t`-exponents in `-1..=1`.
    pub fn sample(&self, rng: &mut impl Rng) -> CrossedElement {
        let ring = self.ring().clone();
        let mut e = self.zero();
        for n in -1..=1 {
            if rng.gen_bool(0.7) {
                let p = sample_poly(&ring, rng, 2, 2);
                e.insert(n, HPoly::from_poly(p, self.order()));
            }
        }
        e
    }
}

/// A finite sum `Σ aₙ tⁿ` with `aₙ ∈ A[[ħ]]`.
#[derive(Debug, Clone)]
pub struct CrossedElement {
    algebra: CrossedAlgebra,
    terms: BTreeMap<i64, HPoly>,
}

impl PartialEq for CrossedElement {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.terms == other.terms
    }
}

impl CrossedElement {
    fn insert(&mut self, n: i64, a: HPoly) {
        let sum = match self.terms.remove(&n) {
            Some(b) => b.add(&a),
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(n, sum);
        }
    }

    pub fn algebra(&self) -> &CrossedAlgebra {
        &self.algebra
    }

    pub fn terms(&self) -> &BTreeMap<i64, HPoly> {
        &self.terms
    }

    pub fn coefficient(&self, n: i64) -> HPoly {
        self.terms
            .get(&n)
            .cloned()
            .unwrap_or_else(|| HPoly::zero(self.algebra.ring(), self.algebra.order()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::ProviderMismatch);
        }
        let mut out = self.clone();
        for (&n, a) in &other.terms {
            out.insert(n, a.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        CrossedElement {
            algebra: self.algebra.clone(),
            terms: self.terms.iter().map(|(&n, a)| (n, a.neg())).collect(),
        }
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.algebra.multiply(self, other)
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.try_sub(&other.mul(self)?)
    }
}

impl fmt::Display for CrossedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (&n, a) in &self.terms {
            let suffix = match n {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{n}"),
            };
            parts.extend(hpoly_signed_terms(a, &suffix));
        }
        f.write_str(&crate::ring::join_signed(&parts))
    }
}

/// Outcome of checking `Eu(ab) = Eu(a) b + a Eu(b)` on random pairs.
#[derive(Debug, Clone, Serialize)]
pub struct EulerReport {
    pub samples: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

pub fn euler_check(algebra: &CrossedAlgebra, seed: u64, samples: usize) -> Result<EulerReport> {
    let mut rng = seeded_rng(seed);
    for _ in 0..samples {
        let a = algebra.sample(&mut rng);
        let b = algebra.sample(&mut rng);
        let lhs = algebra.euler(&a.mul(&b)?);
        let rhs = algebra
            .euler(&a)
            .mul(&b)?
            .try_add(&a.mul(&algebra.euler(&b))?)?;
        if lhs != rhs {
            return Ok(EulerReport {
                samples,
                passed: false,
                counterexample: Some(format!("a = {a}, b = {b}")),
            });
        }
    }
    Ok(EulerReport {
        samples,
        passed: true,
        counterexample: None,
    })
}

/// One generator pair in a semiclassical bracket comparison.
#[derive(Debug, Clone, Serialize)]
pub struct BracketEntry {
    pub left: String,
    pub right: String,
    pub computed: String,
    pub expected: String,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemiclassicalReport {
    pub structure: String,
    pub pairs: Vec<BracketEntry>,
    pub passed: bool,
}

/// `⟨P, da ⊗ db⟩` for the ħ-coefficient `P` of a bivector.
fn pair(p: &PolyVector, k: usize, a: &Poly, b: &Poly) -> Poly {
    let mut acc = Poly::zero(p.ring());
    for (idx, c) in p.components() {
        let (i, j) = (idx[0], idx[1]);
        let term = &(&a.derivative(i) * &b.derivative(j)) - &(&a.derivative(j) * &b.derivative(i));
        acc = acc + &c.coeff_or_zero(k) * &term;
    }
    acc
}

/// Compares `(XY - YX)/ħ` at `ħ = 0` with the bracket of
/// `π₁ + t∂_t ∧ w₁` on all pairs of generators `x_i` and `t`.
pub fn semiclassical_bracket_check(
    algebra: &CrossedAlgebra,
    t_name: &str,
) -> Result<SemiclassicalReport> {
    let ring = algebra.ring().clone();
    let order = algebra.order();
    let ext = ring.with_invertible_var(t_name)?;
    let t = ext.nvars() - 1;
    let t_poly = Poly::var(&ext, t);
    let pi = algebra.provider().poisson().pi().embed(&ext)?;
    let w = algebra.derivation().classical_field().embed(&ext)?;
    let euler = PolyVector::term(HPoly::from_poly(t_poly.clone(), w.order()), &[t])?;
    let pi_w = pi.truncate(1).add(&euler.wedge(&w)?.truncate(1));

    let mut gens: Vec<(String, CrossedElement, Poly)> = (0..ring.nvars())
        .map(|i| {
            let a = HPoly::from_poly(Poly::var(&ring, i), order);
            (
                ring.name(i).to_string(),
                algebra.monomial(a, 0),
                Poly::var(&ext, i),
            )
        })
        .collect();
    gens.push((t_name.to_string(), algebra.t_power(1), t_poly.clone()));

    let mut pairs = Vec::new();
    for (i, (ln, le, lp)) in gens.iter().enumerate() {
        for (rn, re, rp) in &gens[i + 1..] {
            let c = le.commutator(re)?;
            let mut computed = Poly::zero(&ext);
            for (&n, a) in c.terms() {
                let tn = Poly::monomial(&ext, &t_exps(ext.nvars(), t, n), crate::ring::int(1))?;
                computed = computed + &a.coeff_or_zero(1).embed(&ext)? * &tn;
            }
            let expected = pair(&pi_w, 1, lp, rp);
            let leading_ok = c.terms().values().all(|a| a.coeff_or_zero(0).is_zero());
            pairs.push(BracketEntry {
                left: ln.clone(),
                right: rn.clone(),
                computed: computed.to_string(),
                expected: expected.to_string(),
                agrees: leading_ok && computed == expected,
            });
        }
    }
    let passed = pairs.iter().all(|p| p.agrees);
    Ok(SemiclassicalReport {
        structure: pi_w.to_string(),
        pairs,
        passed,
    })
}

fn t_exps(n: usize, t: usize, e: i64) -> Vec<i32> {
    let mut v = vec![0; n];
    v[t] = e as i32;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{PoissonStructure, SearchConfig};
    use crate::quantize::derivation::quantized_derivation;
    use crate::ring::CoordinateRing;

    fn moyal_with_dx(order: usize) -> CrossedAlgebra {
        let r = CoordinateRing::polynomial(&["x", "y"]).unwrap();
        let pi = PolyVector::term(HPoly::hbar(&r, order), &[0, 1]).unwrap();
        let s = StarProvider::moyal(&PoissonStructure::certified(pi).unwrap(), order).unwrap();
        let w = PolyVector::term(HPoly::hbar(&r, order), &[0]).unwrap();
        let d = quantized_derivation(&w, &s, &SearchConfig::default()).unwrap();
        CrossedAlgebra::new(d.into_found().unwrap())
    }

    #[test]
    fn t_relations() {
        let alg = moyal_with_dx(2);
        let r = alg.ring().clone();
        let x = alg.monomial(HPoly::from_poly(Poly::var(&r, 0), 2), 0);
        assert_eq!(alg.t_power(1).mul(&alg.t_power(-1)).unwrap(), alg.one());
        let tx = alg.t_power(1).mul(&x).unwrap();
        let phi_x = alg.phi(1, &x.coefficient(0)).unwrap();
        assert_eq!(tx, alg.monomial(phi_x.clone(), 1));
        let conj = tx.mul(&alg.t_power(-1)).unwrap();
        assert_eq!(conj, alg.monomial(phi_x, 0));
        assert_eq!(tx.to_string(), "x*t + h*t");
    }

    #[test]
    fn euler_counts_t_degree() {
        let alg = moyal_with_dx(2);
        let a = HPoly::from_poly(Poly::var(alg.ring(), 1), 2);
        assert!(alg.euler(&alg.monomial(a.clone(), 0)).is_zero());
        assert_eq!(
            alg.euler(&alg.monomial(a.clone(), 2)),
            alg.monomial(a.scale(&crate::ring::int(2)), 2)
        );
        assert!(euler_check(&alg, 3, 10).unwrap().passed);
    }

    #[test]
    fn bracket_gains_euler_term() {
        let alg = moyal_with_dx(2);
        let report = semiclassical_bracket_check(&alg, "t").unwrap();
        assert!(report.passed, "{report:?}");
        let xt = report
            .pairs
            .iter()
            .find(|p| p.left == "x" && p.right == "t")
            .unwrap();
        assert_eq!(xt.expected, "-t");
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let a = moyal_with_dx(2);
        let b = moyal_with_dx(1);
        assert!(matches!(
            a.one().mul(&b.one()),
            Err(Error::ProviderMismatch)
        ));
    }
}
