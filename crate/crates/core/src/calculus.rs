//! Cartan calculus on multivector fields and differential forms.
//!
//! Sign conventions, fixed once for the whole crate:
//!
//! * a k-vector field has shifted degree `k - 1` (functions sit in degree -1);
//! * the interior product of a vector field inserts into the first slot, and
//!   `i_{a ∧ b} = i_a ∘ i_b` (left factor outermost);
//! * `L_γ = [d, i_γ] = d ∘ i_γ - (-1)^{k} i_γ ∘ d` for a k-vector `γ`;
//! * the Schouten bracket is the graded Lie bracket in the shifted grading
//!   with `[w, a] = w(a)` for a vector field `w` and a function `a`, and the
//!   graded Leibniz rule in its second argument.
//!
//! These are the conventions under which
//! `[i_{γ1}, [d, i_{γ2}]] = i_{[γ1, γ2]}` and `[L_{γ1}, L_{γ2}] = L_{[γ1, γ2]}`
//! hold identically; the test suite checks both.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::rc::Rc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::{join_signed, same_ring, Monomial, Poly, Ring};
use crate::series::{hpoly_signed_terms, HPoly};

/// Marker distinguishing multivector fields from differential forms.
pub trait Kind: Clone + fmt::Debug + PartialEq + 'static {
    /// Prefix of a basis element in text, `D` for `∂/∂x`, `d` for `dx`.
    const PREFIX: &'static str;
    /// Contribution of one basis element to the weight.
    const WEIGHT_SIGN: i64;
    const NAME: &'static str;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vectors;

#[derive(Clone, Debug, PartialEq)]
pub struct Forms;

impl Kind for Vectors {
    const PREFIX: &'static str = "D";
    const WEIGHT_SIGN: i64 = -1;
    const NAME: &'static str = "multivector";
}

impl Kind for Forms {
    const PREFIX: &'static str = "d";
    const WEIGHT_SIGN: i64 = 1;
    const NAME: &'static str = "form";
}

/// Index tuple of a basis element; always strictly increasing.
pub type Indices = Vec<usize>;

/// Sorts an index list, returning the permutation sign, or `None` when an
/// index repeats.
pub fn sort_indices(idx: &[usize]) -> Option<(i64, Indices)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// A homogeneous element `Σ_I c_I e_I` with ħ-series coefficients, where
/// `e_I` is a wedge of basis vectors (`∂_I`) or basis forms (`dx_I`).
#[derive(Clone, PartialEq)]
pub struct Graded<K: Kind> {
    ring: Ring,
    degree: usize,
    order: usize,
    comps: BTreeMap<Indices, HPoly>,
    _kind: PhantomData<K>,
}

/// Multivector field. A k-vector has shifted degree `k - 1`.
pub type PolyVector = Graded<Vectors>;
/// Differential form.
pub type DiffForm = Graded<Forms>;

impl<K: Kind> Graded<K> {
    /// Zero element of the given wedge degree. Zero results keep their
    /// degree tag.
    pub fn zero(ring: &Ring, degree: usize, order: usize) -> Self {
        Graded {
            ring: ring.clone(),
            degree,
            order,
            comps: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    /// Degree-0 element: a function.
    pub fn function(f: HPoly) -> Self {
        let mut g = Self::zero(f.ring(), 0, f.order());
        g.insert(vec![], f);
        g
    }

    /// `coef · e_{i1} ∧ … ∧ e_ik`, normalizing the index order.
    pub fn term(coef: HPoly, indices: &[usize]) -> Result<Self> {
        let n = coef.ring().nvars();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::UnknownVariable(format!("index {bad}")));
        }
        let mut g = Self::zero(coef.ring(), indices.len(), coef.order());
        if let Some((sign, sorted)) = sort_indices(indices) {
            g.insert(sorted, coef.scale(&BigRational::from_integer(sign.into())));
        }
        Ok(g)
    }

    /// Wedge of basis elements with coefficient 1.
    pub fn basis(ring: &Ring, indices: &[usize], order: usize) -> Result<Self> {
        Self::term(HPoly::one(ring, order), indices)
    }

    /// Basis element by variable names.
    pub fn basis_named(ring: &Ring, names: &[&str], order: usize) -> Result<Self> {
        let idx = names
            .iter()
            .map(|n| ring.index_of(n))
            .collect::<Result<Vec<_>>>()?;
        Self::basis(ring, &idx, order)
    }

    /// Top-degree element `coef · e_0 ∧ … ∧ e_{n-1}`.
    pub fn top(coef: HPoly) -> Self {
        let n = coef.ring().nvars();
        Self::term(coef, &(0..n).collect::<Vec<_>>()).expect("indices in range")
    }

    fn insert(&mut self, idx: Indices, c: HPoly) {
        if c.is_zero() {
            return;
        }
        match self.comps.get_mut(&idx) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.is_zero() {
                    self.comps.remove(&idx);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.comps.insert(idx, c);
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Number of wedge factors.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn components(&self) -> &BTreeMap<Indices, HPoly> {
        &self.comps
    }

    pub fn component(&self, idx: &[usize]) -> HPoly {
        self.comps
            .get(idx)
            .cloned()
            .unwrap_or_else(|| HPoly::zero(&self.ring, self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    fn check_degree(&self, other: &Self) -> Result<()> {
        self.check(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::WrongDegree {
                expected: K::NAME,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_degree(other)?;
        let degree = if self.is_zero() {
            other.degree
        } else {
            self.degree
        };
        let order = self.order.min(other.order);
        let mut out = Self::zero(&self.ring, degree, order);
        for (i, c) in self.comps.iter().chain(&other.comps) {
            out.insert(i.clone(), c.truncate(order));
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Addition of elements known to share ring and degree.
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("ring or degree mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("ring or degree mismatch")
    }

    pub fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(&self.ring, self.degree, self.order);
        if c.is_zero() {
            return out;
        }
        for (i, v) in &self.comps {
            out.insert(i.clone(), v.scale(c));
        }
        out
    }

    /// Multiplies every component by a function.
    pub fn mul_fn(&self, f: &HPoly) -> Self {
        let order = self.order.min(f.order());
        let mut out = Self::zero(&self.ring, self.degree, order);
        for (i, v) in &self.comps {
            out.insert(i.clone(), v.mul(f));
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut out = Self::zero(&self.ring, self.degree, order);
        for (i, v) in &self.comps {
            out.insert(i.clone(), v.truncate(order));
        }
        out
    }

    /// Multiplies by ħ^k.
    pub fn shift_hbar(&self, k: usize) -> Self {
        let mut out = Self::zero(&self.ring, self.degree, self.order);
        for (i, v) in &self.comps {
            out.insert(i.clone(), v.shift_hbar(k));
        }
        out
    }

    /// The ħ^k coefficient as an order-0 element.
    pub fn hbar_coeff(&self, k: usize) -> Self {
        let mut out = Self::zero(&self.ring, self.degree, 0);
        for (i, v) in &self.comps {
            out.insert(i.clone(), HPoly::from_poly(v.coeff_or_zero(k), 0));
        }
        out
    }

    /// Reassembles `Σ_k ħ^k parts[k]` from order-0 pieces.
    pub fn from_hbar_coeffs(ring: &Ring, degree: usize, parts: &[Self], order: usize) -> Self {
        let mut out = Self::zero(ring, degree, order);
        for (k, p) in parts.iter().enumerate().take(order + 1) {
            for (i, v) in &p.comps {
                out.insert(i.clone(), HPoly::monomial(v.coeff(0).clone(), k, order));
            }
        }
        out
    }

    /// Changes the truncation order, zero-padding or truncating the ħ-expansion.
    pub fn with_order(&self, order: usize) -> Self {
        let mut out = Self::zero(&self.ring, self.degree, order);
        for (i, v) in &self.comps {
            out.insert(
                i.clone(),
                HPoly::from_coeffs(v.coeff(0), v.coeffs().to_vec(), order),
            );
        }
        out
    }

    /// Lowest ħ-power carrying a nonzero component.
    pub fn valuation(&self) -> Option<usize> {
        self.comps.values().filter_map(HPoly::valuation).min()
    }

    /// Graded wedge product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let order = self.order.min(other.order);
        let degree = self.degree + other.degree;
        let mut out = Self::zero(&self.ring, degree, order);
        if degree > self.ring.nvars() {
            return Ok(out);
        }
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                let joined: Vec<usize> = i.iter().chain(j).copied().collect();
                if let Some((sign, sorted)) = sort_indices(&joined) {
                    out.insert(
                        sorted,
                        a.mul(b).scale(&BigRational::from_integer(sign.into())),
                    );
                }
            }
        }
        Ok(out)
    }

    /// Exact coordinates of the ħ^k coefficient, keyed by (indices, monomial).
    pub fn coordinates_at(&self, k: usize) -> BTreeMap<(Indices, Monomial), BigRational> {
        let mut out = BTreeMap::new();
        for (i, v) in &self.comps {
            for (m, c) in v.coeff_or_zero(k).terms() {
                out.insert((i.clone(), m.clone()), c.clone());
            }
        }
        out
    }

    /// Weight of a basis term `x^m e_I`.
    pub fn term_weight(indices: &[usize], m: &Monomial) -> i64 {
        m.weight() + K::WEIGHT_SIGN * indices.len() as i64
    }

    /// The common weight of all terms at ħ^k, if homogeneous. `None` for
    /// zero or inhomogeneous coefficients.
    pub fn homogeneous_weight_at(&self, k: usize) -> Option<i64> {
        let mut weight = None;
        for (i, m) in self.coordinates_at(k).keys() {
            let w = Self::term_weight(i, m);
            match weight {
                None => weight = Some(w),
                Some(w0) if w0 != w => return None,
                _ => {}
            }
        }
        weight
    }

    /// Splits the ħ^k coefficient into weight-homogeneous order-0 pieces.
    pub fn weight_components_at(&self, k: usize) -> BTreeMap<i64, Self> {
        let mut out: BTreeMap<i64, Self> = BTreeMap::new();
        for ((i, m), c) in self.coordinates_at(k) {
            let w = Self::term_weight(&i, &m);
            let p = Poly::monomial(&self.ring, m.exps(), c).expect("valid exponents");
            out.entry(w)
                .or_insert_with(|| Self::zero(&self.ring, self.degree, 0))
                .insert(i, HPoly::from_poly(p, 0));
        }
        out
    }

    /// Builds an order-0 element from coordinates.
    pub fn from_coordinates(
        ring: &Ring,
        degree: usize,
        coords: &BTreeMap<(Indices, Monomial), BigRational>,
    ) -> Self {
        let mut out = Self::zero(ring, degree, 0);
        for ((i, m), c) in coords {
            let p = Poly::monomial(ring, m.exps(), c.clone()).expect("valid exponents");
            out.insert(i.clone(), HPoly::from_poly(p, 0));
        }
        out
    }

    /// Re-embeds into a ring extending this one by trailing variables.
    pub fn embed(&self, target: &Ring) -> Result<Self> {
        let mut out = Self::zero(target, self.degree, self.order);
        for (i, v) in &self.comps {
            let coeffs = v
                .coeffs()
                .iter()
                .map(|p| p.embed(target))
                .collect::<Result<Vec<_>>>()?;
            out.insert(
                i.clone(),
                HPoly::from_coeffs(&coeffs[0], coeffs.clone(), self.order),
            );
        }
        Ok(out)
    }

    fn basis_text(&self, idx: &[usize]) -> String {
        idx.iter()
            .map(|&i| format!("{}{}", K::PREFIX, self.ring.name(i)))
            .collect::<Vec<_>>()
            .join("^^")
    }
}

impl PolyVector {
    /// Shifted degree: functions -1, vector fields 0, bivectors 1.
    pub fn shifted_degree(&self) -> i64 {
        self.degree as i64 - 1
    }

    /// Vector field `Σ coeffs[i] ∂_i`.
    pub fn vector_field(coeffs: &[HPoly]) -> Result<Self> {
        let ring = coeffs
            .first()
            .map(|c| c.ring().clone())
            .ok_or_else(|| Error::InvalidRing("empty vector field".into()))?;
        let order = coeffs.iter().map(HPoly::order).min().unwrap_or(0);
        let mut out = Self::zero(&ring, 1, order);
        for (i, c) in coeffs.iter().enumerate() {
            out.insert(vec![i], c.truncate(order));
        }
        Ok(out)
    }

    /// Applies a vector field to a function: `w(f) = Σ w^i ∂_i f`.
    pub fn apply(&self, f: &HPoly) -> Result<HPoly> {
        if self.degree != 1 {
            return Err(Error::WrongDegree {
                expected: "vector field",
                found: self.degree,
            });
        }
        if !same_ring(&self.ring, f.ring()) {
            return Err(Error::RingMismatch);
        }
        let order = self.order.min(f.order());
        let mut acc = HPoly::zero(&self.ring, order);
        for (i, c) in &self.comps {
            acc = acc.add(&c.mul(&f.derivative(i[0])));
        }
        Ok(acc)
    }
}

impl<K: Kind> fmt::Display for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in &self.comps {
            parts.extend(hpoly_signed_terms(c, &self.basis_text(i)));
        }
        f.write_str(&join_signed(&parts))
    }
}

impl<K: Kind> fmt::Debug for Graded<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[deg {}]({})", K::NAME, self.degree, self)
    }
}

fn rational(sign: i64) -> BigRational {
    BigRational::from_integer(sign.into())
}

/// `i_{∂_i}(dx_J)`: first-slot insertion.
fn contract_basis(i: usize, form: &[usize]) -> Option<(i64, Indices)> {
    let pos = form.iter().position(|&j| j == i)?;
    let sign = if pos % 2 == 0 { 1 } else { -1 };
    let mut rest = form.to_vec();
    rest.remove(pos);
    Some((sign, rest))
}

/// Interior product `i_γ α`, with `i_{∂_{i1} ∧ … ∧ ∂_{ik}} = i_{∂_{i1}} ∘ … ∘ i_{∂_{ik}}`.
pub fn contract(gamma: &PolyVector, alpha: &DiffForm) -> Result<DiffForm> {
    if !same_ring(&gamma.ring, &alpha.ring) {
        return Err(Error::RingMismatch);
    }
    let order = gamma.order.min(alpha.order);
    let degree = alpha.degree.saturating_sub(gamma.degree);
    let mut out = DiffForm::zero(&alpha.ring, degree, order);
    if gamma.degree > alpha.degree {
        return Ok(out);
    }
    for (gi, gc) in &gamma.comps {
        for (ai, ac) in &alpha.comps {
            let mut sign = 1;
            let mut cur = ai.clone();
            let mut alive = true;
            for &i in gi.iter().rev() {
                match contract_basis(i, &cur) {
                    Some((s, rest)) => {
                        sign *= s;
                        cur = rest;
                    }
                    None => {
                        alive = false;
                        break;
                    }
                }
            }
            if alive {
                out.insert(cur, gc.mul(ac).scale(&rational(sign)));
            }
        }
    }
    Ok(out)
}

/// Exterior derivative.
pub fn de_rham(alpha: &DiffForm) -> DiffForm {
    let n = alpha.ring.nvars();
    let mut out = DiffForm::zero(&alpha.ring, alpha.degree + 1, alpha.order);
    if alpha.degree >= n {
        return out;
    }
    for (idx, c) in &alpha.comps {
        for i in 0..n {
            if idx.contains(&i) {
                continue;
            }
            let dc = c.derivative(i);
            if dc.is_zero() {
                continue;
            }
            let below = idx.iter().filter(|&&j| j < i).count();
            let sign = if below % 2 == 0 { 1 } else { -1 };
            let mut new_idx = idx.clone();
            new_idx.insert(below, i);
            out.insert(new_idx, dc.scale(&rational(sign)));
        }
    }
    out
}

/// Lie derivative `L_γ = [d, i_γ]`, the graded commutator with `i_γ` of
/// degree `-k` for a k-vector `γ`.
pub fn lie_derivative(gamma: &PolyVector, alpha: &DiffForm) -> Result<DiffForm> {
    let first = de_rham(&contract(gamma, alpha)?);
    let second = contract(gamma, &de_rham(alpha))?;
    let sign = if gamma.degree.is_multiple_of(2) { 1 } else { -1 };
    Ok(lie_combine(
        first,
        second.scale(&rational(-sign)),
        gamma,
        alpha,
    ))
}

fn lie_combine(a: DiffForm, b: DiffForm, gamma: &PolyVector, alpha: &DiffForm) -> DiffForm {
    // Both summands have degree deg α - k + 1; either may be an empty zero
    // carrying a clamped degree tag.
    let degree = (alpha.degree + 1).saturating_sub(gamma.degree);
    let order = gamma.order.min(alpha.order);
    let mut out = DiffForm::zero(&alpha.ring, degree, order);
    if alpha.degree + 1 < gamma.degree {
        return out;
    }
    for (i, c) in a.comps.into_iter().chain(b.comps) {
        out.insert(i, c.truncate(order));
    }
    out
}

/// Structural piece of `[∂_I, g]`: `sign · (∂_var g) · ∂_rest`.
#[derive(Debug, Clone)]
struct SkeletonTerm {
    sign: i64,
    var: usize,
    rest: Indices,
}

type Skeleton = Rc<Vec<SkeletonTerm>>;

/// Expands `[g, ∂_I]` for a function `g` by the Leibniz rule in the second
/// slot: `[g, ∂_i ∧ ∂_J] = [g, ∂_i] ∧ ∂_J - ∂_i ∧ [g, ∂_J]` with
/// `[g, ∂_i] = -∂_i g`.
fn function_left_skeleton(idx: &[usize], memo: &mut HashMap<Indices, Skeleton>) -> Skeleton {
    if let Some(s) = memo.get(idx) {
        return s.clone();
    }
    let result = if idx.is_empty() {
        Vec::new()
    } else {
        let head = idx[0];
        let tail = &idx[1..];
        let mut out = vec![SkeletonTerm {
            sign: -1,
            var: head,
            rest: tail.to_vec(),
        }];
        for t in function_left_skeleton(tail, memo).iter() {
            let mut rest = Vec::with_capacity(t.rest.len() + 1);
            rest.push(head);
            rest.extend_from_slice(&t.rest);
            out.push(SkeletonTerm {
                sign: -t.sign,
                var: t.var,
                rest,
            });
        }
        out
    };
    let rc = Rc::new(result);
    memo.insert(idx.to_vec(), rc.clone());
    rc
}

/// `[∂_I, g] = -(-1)^{|I|-1} [g, ∂_I]` by graded antisymmetry.
fn vector_left_skeleton(idx: &[usize], memo: &mut HashMap<Indices, Skeleton>) -> Vec<SkeletonTerm> {
    let flip = if idx.len().is_multiple_of(2) { 1 } else { -1 };
    function_left_skeleton(idx, memo)
        .iter()
        .map(|t| SkeletonTerm {
            sign: t.sign * flip,
            var: t.var,
            rest: t.rest.clone(),
        })
        .collect()
}

/// Schouten–Nijenhuis bracket.
///
/// For basis terms, the Leibniz rule in the second slot and graded
/// antisymmetry reduce `[f ∂_I, g ∂_J]` to
/// `f [∂_I, g] ∧ ∂_J - (-1)^{|I'||J'|} g [∂_J, f] ∧ ∂_I` (shifted degrees
/// `|I'| = |I| - 1`), where `[∂_I, g]` is expanded structurally and memoized
/// per index tuple.
pub fn schouten(a: &PolyVector, b: &PolyVector) -> Result<PolyVector> {
    if !same_ring(&a.ring, &b.ring) {
        return Err(Error::RingMismatch);
    }
    let order = a.order.min(b.order);
    let degree = (a.degree + b.degree).saturating_sub(1);
    let mut out = PolyVector::zero(&a.ring, degree, order);
    if a.degree + b.degree == 0 || degree > a.ring.nvars() {
        return Ok(out);
    }
    let mut memo = HashMap::new();
    let swap_parity = ((a.degree as i64 - 1) * (b.degree as i64 - 1)).rem_euclid(2);
    let swap_sign = if swap_parity == 0 { -1 } else { 1 };
    for (ia, fa) in &a.comps {
        let skel_a = vector_left_skeleton(ia, &mut memo);
        for (ib, gb) in &b.comps {
            // f [∂_I, g] ∧ ∂_J
            for t in &skel_a {
                let dg = gb.derivative(t.var);
                if dg.is_zero() {
                    continue;
                }
                let joined: Vec<usize> = t.rest.iter().chain(ib).copied().collect();
                if let Some((s, sorted)) = sort_indices(&joined) {
                    out.insert(sorted, fa.mul(&dg).scale(&rational(s * t.sign)));
                }
            }
            // -(-1)^{|I'||J'|} g [∂_J, f] ∧ ∂_I
            for t in vector_left_skeleton(ib, &mut memo) {
                let df = fa.derivative(t.var);
                if df.is_zero() {
                    continue;
                }
                let joined: Vec<usize> = t.rest.iter().chain(ia).copied().collect();
                if let Some((s, sorted)) = sort_indices(&joined) {
                    out.insert(sorted, gb.mul(&df).scale(&rational(s * t.sign * swap_sign)));
                }
            }
        }
    }
    Ok(out.truncate(order))
}
