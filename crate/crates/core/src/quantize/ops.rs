//! Differential and bidifferential operators with ħ-series coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::calculus::PolyVector;
use crate::error::{Error, Result};
use crate::ring::{join_signed, same_ring, Ring};
use crate::series::{hpoly_signed_terms, HPoly};

/// Exponent vector of a partial derivative `∂^γ`.
pub type MultiIndex = Vec<u32>;

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `γ! / (γ1! γ2! …)` for a decomposition of `γ` into parts.
fn multinomial(gamma: &[u32], parts: &[&[u32]]) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (i, &g) in gamma.iter().enumerate() {
        num *= factorial(g);
        for p in parts {
            den *= factorial(p[i]);
        }
    }
    BigRational::new(num, den)
}

/// All sub-multi-indices `β ≤ γ`.
pub(crate) fn sub_indices(gamma: &[u32]) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for &g in gamma {
        let mut next = Vec::with_capacity(out.len() * (g as usize + 1));
        for base in &out {
            for k in 0..=g {
                let mut v = base.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

fn add_idx(a: &[u32], b: &[u32]) -> MultiIndex {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_idx(a: &[u32], b: &[u32]) -> MultiIndex {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn unit_index(n: usize, i: usize) -> MultiIndex {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

pub(crate) fn index_size(a: &[u32]) -> u32 {
    a.iter().sum()
}

fn render_derivative(ring: &Ring, gamma: &[u32]) -> String {
    let parts: Vec<String> = gamma
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > 0)
        .map(|(i, &g)| {
            if g == 1 {
                format!("D{}", ring.name(i))
            } else {
                format!("D{}^{g}", ring.name(i))
            }
        })
        .collect();
    parts.join("*")
}

fn insert_term<K: Ord>(map: &mut BTreeMap<K, HPoly>, key: K, c: HPoly) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(existing) => {
            let sum = existing.add(&c);
            if sum.is_zero() {
                map.remove(&key);
            } else {
                *existing = sum;
            }
        }
        None => {
            map.insert(key, c);
        }
    }
}

/// Linear differential operator `Σ_γ c_γ ∂^γ`.
#[derive(Clone, PartialEq)]
pub struct DiffOp {
    ring: Ring,
    order: usize,
    terms: BTreeMap<MultiIndex, HPoly>,
}

impl DiffOp {
    pub fn zero(ring: &Ring, order: usize) -> Self {
        DiffOp {
            ring: ring.clone(),
            order,
            terms: BTreeMap::new(),
        }
    }

    /// The derivation `Σ w^i ∂_i` of a vector field.
    pub fn from_vector_field(w: &PolyVector) -> Result<Self> {
        if w.degree() != 1 && !w.is_zero() {
            return Err(Error::WrongDegree {
                expected: "vector field",
                found: w.degree(),
            });
        }
        let n = w.ring().nvars();
        let mut op = DiffOp::zero(w.ring(), w.order());
        for (idx, c) in w.components() {
            op.insert(unit_index(n, idx[0]), c.clone());
        }
        Ok(op)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, HPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert(&mut self, gamma: MultiIndex, c: HPoly) {
        insert_term(&mut self.terms, gamma, c.truncate(self.order));
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero(&self.ring, self.order.min(other.order));
        for (g, c) in self.terms.iter().chain(&other.terms) {
            out.insert(g.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> DiffOp {
        let mut out = DiffOp::zero(&self.ring, self.order);
        if s.is_zero() {
            return out;
        }
        for (g, c) in &self.terms {
            out.insert(g.clone(), c.scale(s));
        }
        out
    }

    /// Lowest ħ-power among the coefficients.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(HPoly::valuation).min()
    }

    /// Highest derivative order present.
    pub fn max_derivative(&self) -> u32 {
        self.terms.keys().map(|g| index_size(g)).max().unwrap_or(0)
    }

    /// Applies the operator to a function.
    pub fn apply(&self, f: &HPoly) -> Result<HPoly> {
        if !same_ring(&self.ring, f.ring()) {
            return Err(Error::RingMismatch);
        }
        let order = self.order.min(f.order());
        let mut acc = HPoly::zero(&self.ring, order);
        for (g, c) in &self.terms {
            let d = f.derivative_multi(g);
            if !d.is_zero() {
                acc = acc.add(&c.mul(&d));
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (g, c) in &self.terms {
            parts.extend(hpoly_signed_terms(c, &render_derivative(&self.ring, g)));
        }
        f.write_str(&join_signed(&parts))
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp({self})")
    }
}

/// Bidifferential operator `(f, g) ↦ Σ c_{α,β} ∂^α f ∂^β g`.
#[derive(Clone, PartialEq)]
pub struct BiDiffOp {
    ring: Ring,
    order: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), HPoly>,
}

impl BiDiffOp {
    pub fn zero(ring: &Ring, order: usize) -> Self {
        BiDiffOp {
            ring: ring.clone(),
            order,
            terms: BTreeMap::new(),
        }
    }

    /// The commutative product `(f, g) ↦ fg`.
    pub fn product(ring: &Ring, order: usize) -> Self {
        let mut op = BiDiffOp::zero(ring, order);
        let z = vec![0; ring.nvars()];
        op.insert(z.clone(), z, HPoly::one(ring, order));
        op
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<(MultiIndex, MultiIndex), HPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert(&mut self, alpha: MultiIndex, beta: MultiIndex, c: HPoly) {
        insert_term(&mut self.terms, (alpha, beta), c.truncate(self.order));
    }

    pub fn add(&self, other: &BiDiffOp) -> BiDiffOp {
        let mut out = BiDiffOp::zero(&self.ring, self.order.min(other.order));
        for ((a, b), c) in self.terms.iter().chain(&other.terms) {
            out.insert(a.clone(), b.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BiDiffOp) -> BiDiffOp {
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        for ((a, b), c) in &other.terms {
            out.insert(a.clone(), b.clone(), c.neg());
        }
        out
    }

    pub fn valuation(&self) -> Option<usize> {
        self.terms.values().filter_map(HPoly::valuation).min()
    }

    /// Applies the operator to a pair of functions.
    pub fn apply(&self, f: &HPoly, g: &HPoly) -> Result<HPoly> {
        if !same_ring(&self.ring, f.ring()) || !same_ring(&self.ring, g.ring()) {
            return Err(Error::RingMismatch);
        }
        let order = self.order.min(f.order()).min(g.order());
        let mut df: BTreeMap<&MultiIndex, HPoly> = BTreeMap::new();
        let mut dg: BTreeMap<&MultiIndex, HPoly> = BTreeMap::new();
        let mut acc = HPoly::zero(&self.ring, order);
        for ((a, b), c) in &self.terms {
            let fa = df
                .entry(a)
                .or_insert_with(|| f.derivative_multi(a).truncate(order));
            if fa.is_zero() {
                continue;
            }
            let gb = dg
                .entry(b)
                .or_insert_with(|| g.derivative_multi(b).truncate(order));
            if gb.is_zero() {
                continue;
            }
            acc = acc.add(&c.mul(fa).mul(gb));
        }
        Ok(acc)
    }

    /// `D ∘ B`: `(f, g) ↦ D(B(f, g))`, expanded by the Leibniz rule.
    pub fn after(&self, d: &DiffOp) -> BiDiffOp {
        let order = self.order.min(d.order);
        let mut out = BiDiffOp::zero(&self.ring, order);
        for ((a, b), c) in &self.terms {
            for (gamma, dc) in d.terms() {
                for g1 in sub_indices(gamma) {
                    let rest = sub_idx(gamma, &g1);
                    let dc1 = c.derivative_multi(&g1);
                    if dc1.is_zero() {
                        continue;
                    }
                    let coeff_base = dc.mul(&dc1);
                    for g2 in sub_indices(&rest) {
                        let g3 = sub_idx(&rest, &g2);
                        let m = multinomial(gamma, &[&g1, &g2, &g3]);
                        out.insert(add_idx(a, &g2), add_idx(b, &g3), coeff_base.scale(&m));
                    }
                }
            }
        }
        out
    }

    /// `B ∘ (D ⊗ 1)` when `left`, else `B ∘ (1 ⊗ D)`.
    pub fn before(&self, d: &DiffOp, left: bool) -> BiDiffOp {
        let order = self.order.min(d.order);
        let mut out = BiDiffOp::zero(&self.ring, order);
        for ((a, b), c) in &self.terms {
            let inner = if left { a } else { b };
            for (gamma, dc) in d.terms() {
                for a1 in sub_indices(inner) {
                    let ddc = dc.derivative_multi(&a1);
                    if ddc.is_zero() {
                        continue;
                    }
                    let a2 = sub_idx(inner, &a1);
                    let m = multinomial(inner, &[&a1, &a2]);
                    let coeff = c.mul(&ddc).scale(&m);
                    let moved = add_idx(&a2, gamma);
                    if left {
                        out.insert(moved, b.clone(), coeff);
                    } else {
                        out.insert(a.clone(), moved, coeff);
                    }
                }
            }
        }
        out
    }

    /// Composition `B1 ∘ B2` of constant-coefficient operators, used for
    /// exponential series: `(α1, β1)·(α2, β2) = (α1 + α2, β1 + β2)`.
    pub(crate) fn compose_constant(&self, other: &BiDiffOp) -> BiDiffOp {
        let order = self.order.min(other.order);
        let mut out = BiDiffOp::zero(&self.ring, order);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                out.insert(add_idx(a1, a2), add_idx(b1, b2), c1.mul(c2));
            }
        }
        out
    }

    pub(crate) fn scale(&self, s: &BigRational) -> BiDiffOp {
        let mut out = BiDiffOp::zero(&self.ring, self.order);
        for ((a, b), c) in &self.terms {
            out.insert(a.clone(), b.clone(), c.scale(s));
        }
        out
    }
}

impl fmt::Display for BiDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for ((a, b), c) in &self.terms {
            let da = render_derivative(&self.ring, a);
            let db = render_derivative(&self.ring, b);
            let suffix = format!(
                "({}|{})",
                if da.is_empty() { "1" } else { &da },
                if db.is_empty() { "1" } else { &db }
            );
            parts.extend(hpoly_signed_terms(c, &suffix));
        }
        f.write_str(&join_signed(&parts))
    }
}

impl fmt::Debug for BiDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiDiffOp({self})")
    }
}
