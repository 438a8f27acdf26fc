//! Derivations of the star algebra lifting Poisson vector fields.
//!
//! `D` starts as the vector field `w`. The Leibniz defect
//! `Λ(a, b) = D(a ⋆ b) - D(a) ⋆ b - a ⋆ D(b)` is computed symbolically;
//! its lowest nonvanishing ħ-coefficient is a Hochschild cocycle of the
//! commutative product, hence a symmetric coboundary plus an antisymmetric
//! biderivation. The coboundary part is cancelled by a higher-order
//! operator at the same order, the biderivation part by a vector field one
//! order lower. Repeating this order by order yields a derivation modulo
//! ħ^{N+1}, or an obstruction.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::ops::{index_size, unit_index, BiDiffOp, DiffOp, MultiIndex};
use super::star::StarProvider;
use crate::calculus::{schouten, PolyVector, Vectors};
use crate::error::{Error, Result};
use crate::poisson::{Obstruction, PoissonStructure, SearchConfig, Solve};
use crate::ring::{rat, same_ring, Poly};
use crate::series::HPoly;
use crate::slices::{SliceBounds, SliceMap};

/// A correction term added while solving the Leibniz constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Correction {
    /// ħ-power carrying the correction.
    pub order: usize,
    /// `"vector field"` or `"higher order"`.
    pub kind: &'static str,
    pub operator: String,
}

/// A derivation of `(A[[ħ]], ⋆)` reducing to a Poisson vector field mod ħ.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantDerivation {
    provider: StarProvider,
    classical: PolyVector,
    op: DiffOp,
    corrections: Vec<Correction>,
}

impl QuantDerivation {
    pub fn provider(&self) -> &StarProvider {
        &self.provider
    }

    /// The vector field `w` this derivation lifts.
    pub fn classical_field(&self) -> &PolyVector {
        &self.classical
    }

    pub fn operator(&self) -> &DiffOp {
        &self.op
    }

    pub fn corrections(&self) -> &[Correction] {
        &self.corrections
    }

    pub fn apply(&self, a: &HPoly) -> Result<HPoly> {
        self.op.apply(a)
    }

    /// `exp(n D)(a)`; negative `n` gives the inverse automorphism.
    pub fn exp_power(&self, n: i64, a: &HPoly) -> Result<HPoly> {
        if n == 0 {
            return Ok(a.truncate(self.op.order()));
        }
        exp_operator(&self.op.scale(&BigRational::from_integer(n.into())), a)
    }

    /// `D(a ⋆ b) - D(a) ⋆ b - a ⋆ D(b)`.
    pub fn leibniz_defect(&self, a: &HPoly, b: &HPoly) -> Result<HPoly> {
        let s = &self.provider;
        let lhs = self.apply(&s.star(a, b)?)?;
        let r1 = s.star(&self.apply(a)?, b)?;
        let r2 = s.star(a, &self.apply(b)?)?;
        Ok(lhs.sub(&r1).sub(&r2))
    }
}

impl fmt::Display for QuantDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.op.fmt(f)
    }
}

fn exp_operator(op: &DiffOp, a: &HPoly) -> Result<HPoly> {
    if op.valuation() == Some(0) {
        return Err(Error::NonzeroConstantTerm);
    }
    let order = op.order().min(a.order());
    let mut term = a.truncate(order);
    let mut acc = term.clone();
    for k in 1..=order {
        term = op.apply(&term)?.scale(&rat(1, k as i64));
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// `φ = exp(D)` applied to `a`. Requires `D ≡ 0 mod ħ`.
pub fn exp_derivation(d: &QuantDerivation, a: &HPoly) -> Result<HPoly> {
    exp_operator(&d.op, a)
}

/// Symbolic Leibniz defect of `D` with respect to the star operator `S`.
fn defect(star: &BiDiffOp, d: &DiffOp) -> BiDiffOp {
    star.after(d)
        .sub(&star.before(d, true))
        .sub(&star.before(d, false))
}

fn binomial(a: &[u32], b: &[u32]) -> BigRational {
    let fact = |n: u32| (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (&x, &y) in a.iter().zip(b) {
        num *= fact(x + y);
        den *= fact(x) * fact(y);
    }
    BigRational::new(num, den)
}

/// Lifts a Poisson vector field `w` to a derivation of the star algebra.
pub fn quantized_derivation(
    w: &PolyVector,
    provider: &StarProvider,
    cfg: &SearchConfig,
) -> Result<Solve<QuantDerivation>> {
    if !same_ring(w.ring(), provider.ring()) {
        return Err(Error::RingMismatch);
    }
    let order = provider.order();
    let w = w.with_order(order);
    let pi = provider.poisson();
    if let Some(k) = schouten(pi.pi(), &w)?.valuation() {
        return Err(Error::NotPoisson { order: k });
    }
    let ring = provider.ring().clone();
    let n = ring.nvars();
    let star = provider.operator();
    let mut op = DiffOp::from_vector_field(&w)?;
    let mut corrections = Vec::new();
    // Each pass clears the lowest defect order, which then stays clear.
    for _ in 0..=order + 1 {
        let lam = defect(star, &op);
        let Some(m) = lam.valuation() else {
            return Ok(Solve::Found(QuantDerivation {
                provider: provider.clone(),
                classical: w,
                op,
                corrections,
            }));
        };
        let at_m: BTreeMap<&(MultiIndex, MultiIndex), Poly> = lam
            .terms()
            .iter()
            .map(|(k, c)| (k, c.coeff_or_zero(m)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let get = |a: &MultiIndex, b: &MultiIndex| {
            at_m.get(&(a.clone(), b.clone()))
                .cloned()
                .unwrap_or_else(|| Poly::zero(&ring))
        };
        let mut pairs: Vec<(MultiIndex, MultiIndex)> = at_m
            .keys()
            .map(|(a, b)| {
                if a <= b {
                    (a.clone(), b.clone())
                } else {
                    (b.clone(), a.clone())
                }
            })
            .collect();
        pairs.sort();
        pairs.dedup();
        let mut higher: BTreeMap<MultiIndex, Poly> = BTreeMap::new();
        let mut bivector = PolyVector::zero(&ring, 2, 0);
        for (a, b) in pairs {
            let (sa, sb) = (index_size(&a), index_size(&b));
            if sa == 0 || sb == 0 {
                return Ok(Solve::Obstructed(obstruction(
                    m,
                    &lam,
                    "defect is not normalized",
                )));
            }
            let (l_ab, l_ba) = (get(&a, &b), get(&b, &a));
            // Symmetric part: a coboundary of E = Σ e_γ ∂^γ has
            // λ_{α,β} = λ_{β,α} = binom(α+β, α) e_{α+β}.
            let sym = if a == b {
                l_ab.clone()
            } else {
                (&l_ab + &l_ba).scale(&rat(1, 2))
            };
            let gamma: MultiIndex = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let e = sym.scale(&(-binomial(&a, &b).recip()));
            higher.entry(gamma).or_insert(e);
            // Antisymmetric biderivation part ⟨B, da ⊗ db⟩.
            if sa == 1 && sb == 1 && a != b {
                let anti = (&l_ab - &l_ba).scale(&rat(1, 2));
                if !anti.is_zero() {
                    let i = a.iter().position(|&v| v == 1).expect("unit index");
                    let j = b.iter().position(|&v| v == 1).expect("unit index");
                    bivector = bivector.add(&PolyVector::term(HPoly::from_poly(anti, 0), &[i, j])?);
                }
            }
        }
        for (gamma, e) in higher {
            if e.is_zero() {
                continue;
            }
            let mut piece = DiffOp::zero(&ring, order);
            piece.insert(gamma, HPoly::monomial(e, m, order));
            corrections.push(Correction {
                order: m,
                kind: "higher order",
                operator: piece.to_string(),
            });
            op = op.add(&piece);
        }
        if !bivector.is_zero() {
            if m < 2 {
                return Ok(Solve::Obstructed(obstruction(
                    m,
                    &lam,
                    "the leading defect cannot be changed without changing D mod hbar",
                )));
            }
            let target = bivector.scale(&BigRational::from_integer(2.into()));
            let Some(u) = solve_lichnerowicz_vector(pi, &target, cfg)? else {
                return Ok(Solve::Obstructed(Obstruction {
                    order: m,
                    weight: None,
                    residual: bivector.to_string(),
                    exhaustive: false,
                    detail:
                        "antisymmetric defect is not [pi_1, u] for a vector field u within bounds"
                            .into(),
                }));
            };
            let mut piece = DiffOp::zero(&ring, order);
            for (idx, c) in u.components() {
                piece.insert(
                    unit_index(n, idx[0]),
                    HPoly::monomial(c.coeff(0).clone(), m - 1, order),
                );
            }
            corrections.push(Correction {
                order: m - 1,
                kind: "vector field",
                operator: piece.to_string(),
            });
            op = op.add(&piece);
        }
        if let Some(m2) = defect(star, &op).valuation() {
            if m2 <= m {
                return Ok(Solve::Obstructed(obstruction(
                    m,
                    &defect(star, &op),
                    "defect is not a Hochschild cocycle of the expected shape",
                )));
            }
        }
    }
    Ok(Solve::Obstructed(obstruction(
        order,
        &defect(star, &op),
        "correction loop did not converge",
    )))
}

fn obstruction(order: usize, lam: &BiDiffOp, detail: &str) -> Obstruction {
    Obstruction {
        order,
        weight: None,
        residual: lam.to_string(),
        exhaustive: false,
        detail: detail.into(),
    }
}

/// Solves `[π₁, u] = target` for a vector field `u`, weight slice by slice.
fn solve_lichnerowicz_vector(
    pi: &PoissonStructure,
    target: &PolyVector,
    cfg: &SearchConfig,
) -> Result<Option<PolyVector>> {
    let ring = pi.ring().clone();
    let w_pi = pi.leading_weight()?;
    let pi1 = pi.coefficient(1);
    let bounds = SliceBounds {
        exponent_box: cfg.exponent_box,
    };
    let mut u = PolyVector::zero(&ring, 1, 0);
    for (weight, comp) in target.weight_components_at(0) {
        let domain_weight = weight - w_pi;
        if domain_weight > cfg.weight_bound {
            return Ok(None);
        }
        let map = SliceMap::build::<Vectors, Vectors>(&ring, 1, domain_weight, bounds, |e| {
            schouten(&pi1, e)
        })?;
        match map.solve(&comp.coordinates_at(0)) {
            Some(x) => u = u.add(&PolyVector::from_coordinates(&ring, 1, &x)),
            None => return Ok(None),
        }
    }
    Ok(Some(u))
}

/// Searches for `g` with `Δ(x_i) = (g ⋆ x_i - x_i ⋆ g)/ħ` at the leading
/// order of `Δ` on every generator, i.e. `Δ` is inner to that order.
/// Returns `g` (with `Δ ≡ 0` giving `g = 0`).
pub fn inner_derivation_witness(
    provider: &StarProvider,
    delta: impl Fn(&HPoly) -> Result<HPoly>,
    cfg: &SearchConfig,
) -> Result<Solve<HPoly>> {
    let ring = provider.ring().clone();
    let n = ring.nvars();
    let order = provider.order();
    let images = (0..n)
        .map(|i| delta(&provider.lift(&Poly::var(&ring, i))?))
        .collect::<Result<Vec<_>>>()?;
    let Some(v) = images.iter().filter_map(HPoly::valuation).min() else {
        return Ok(Solve::Found(HPoly::zero(&ring, order)));
    };
    // Leading order: Δ_v(x_i) = {g_v, x_i} = -[π₁, g_v](x_i).
    let comps: Vec<HPoly> = images
        .iter()
        .map(|im| HPoly::monomial(-im.coeff_or_zero(v), 1, 1))
        .collect();
    let target = PolyVector::vector_field(&comps)?;
    let leading = PoissonStructure::certified(PolyVector::from_hbar_coeffs(
        &ring,
        2,
        &[
            PolyVector::zero(&ring, 2, 0),
            provider.poisson().coefficient(1),
        ],
        1,
    ))?;
    match crate::poisson::solve_hamiltonian(&leading, &target, cfg)? {
        Solve::Found(g) => Ok(Solve::Found(HPoly::monomial(g.coeff(0).clone(), v, order))),
        Solve::Obstructed(mut o) => {
            o.order = v;
            o.detail = format!("not an inner derivation at hbar^{v}: {}", o.detail);
            Ok(Solve::Obstructed(o))
        }
    }
}

/// `(g ⋆ a - a ⋆ g)/ħ`, truncated one order lower.
pub fn inner_derivation(provider: &StarProvider, g: &HPoly, a: &HPoly) -> Result<HPoly> {
    let c = provider.commutator(g, a)?;
    let order = c.order();
    if order == 0 {
        return Ok(c);
    }
    debug_assert!(c.coeff(0).is_zero());
    Ok(HPoly::from_coeffs(
        c.coeff(0),
        c.coeffs()[1..].to_vec(),
        order - 1,
    ))
}
