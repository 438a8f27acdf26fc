//! Star products given by bidifferential operators.
//!
//! Normalization: `a ⋆ b = ab + (ħ/2){a, b} + O(ħ²)` where
//! `{a, b} = ⟨π₁, da ⊗ db⟩` and `⟨X ∧ Y, α ⊗ β⟩ = α(X)β(Y) - α(Y)β(X)`.
//! With `P^{ij}` the antisymmetric matrix of `π` (ħ included), the first
//! order term is `½ P^{ij} ∂_i ⊗ ∂_j`.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ops::{unit_index, BiDiffOp, MultiIndex};
use crate::calculus::PolyVector;
use crate::error::{Error, Result};
use crate::poisson::PoissonStructure;
use crate::ring::{rat, same_ring, Poly, Ring};
use crate::series::HPoly;

/// Default truncation orders.
pub const MOYAL_DEFAULT_ORDER: usize = 4;
pub const UNIVERSAL2_DEFAULT_ORDER: usize = 2;
/// Random triples checked when a second-order provider is built.
pub const CONSTRUCTION_SAMPLES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Moyal,
    Universal2,
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProviderKind::Moyal => "moyal",
            ProviderKind::Universal2 => "universal2",
        })
    }
}

/// Outcome of one randomized law check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub law: String,
    pub samples: usize,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail {
        order: usize,
        counterexample: String,
    },
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Serializable certification record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificationReport {
    pub provider: ProviderKind,
    pub order: usize,
    pub checks: Vec<Check>,
    pub witnesses: Vec<String>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[derive(Debug)]
struct ProviderInner {
    kind: ProviderKind,
    pi: PoissonStructure,
    order: usize,
    op: BiDiffOp,
}

/// An associative star product on `A[[ħ]]` truncated at a fixed order.
#[derive(Debug, Clone)]
pub struct StarProvider {
    inner: Arc<ProviderInner>,
}

impl PartialEq for StarProvider {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.kind == other.inner.kind
                && self.inner.order == other.inner.order
                && self.inner.pi == other.inner.pi)
    }
}

/// Antisymmetric coefficient matrix of a bivector under the natural pairing.
fn pairing_matrix(pi: &PolyVector) -> Vec<Vec<HPoly>> {
    let n = pi.ring().nvars();
    let order = pi.order();
    let mut m = vec![vec![HPoly::zero(pi.ring(), order); n]; n];
    for (idx, c) in pi.components() {
        m[idx[0]][idx[1]] = c.clone();
        m[idx[1]][idx[0]] = c.neg();
    }
    m
}

fn add_idx(a: &[u32], b: &[u32]) -> MultiIndex {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `½ P^{ij} ∂_i ⊗ ∂_j`.
fn first_order(ring: &Ring, p: &[Vec<HPoly>], order: usize) -> BiDiffOp {
    let n = ring.nvars();
    let mut b = BiDiffOp::zero(ring, order);
    for i in 0..n {
        for j in 0..n {
            b.insert(
                unit_index(n, i),
                unit_index(n, j),
                p[i][j].scale(&rat(1, 2)),
            );
        }
    }
    b
}

/// `exp(½ P^{ij} ∂_i ⊗ ∂_j)` for constant `P`, via `T_k = B·T_{k-1}/k`.
fn moyal_operator(pi: &PolyVector, order: usize) -> BiDiffOp {
    let ring = pi.ring();
    let b = first_order(ring, &pairing_matrix(pi), order);
    let mut total = BiDiffOp::product(ring, order);
    let mut term = total.clone();
    for k in 1..=order {
        term = b.compose_constant(&term).scale(&rat(1, k as i64));
        if term.is_zero() {
            break;
        }
        total = total.add(&term);
    }
    total
}

/// Second-order universal formula:
/// `ab + ½P^{ij}∂_i a ∂_j b + ⅛P^{ij}P^{kl}∂_{ik}a ∂_{jl}b
///  + (1/12)P^{ij}∂_jP^{kl}(∂_{ik}a ∂_l b - ∂_k a ∂_{il}b)
///  - (1/24)∂_lP^{ij}∂_jP^{kl}∂_i a ∂_k b`.
fn universal2_operator(pi: &PolyVector, order: usize) -> BiDiffOp {
    let ring = pi.ring();
    let n = ring.nvars();
    let p = pairing_matrix(pi);
    let e = |i: usize| unit_index(n, i);
    let mut op = BiDiffOp::product(ring, order).add(&first_order(ring, &p, order));
    let dp: Vec<Vec<Vec<HPoly>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|l| p[i][j].derivative(l)).collect())
                .collect()
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            if p[i][j].is_zero() {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    let pp = p[i][j].mul(&p[k][l]);
                    op.insert(
                        add_idx(&e(i), &e(k)),
                        add_idx(&e(j), &e(l)),
                        pp.scale(&rat(1, 8)),
                    );
                    let c = p[i][j].mul(&dp[k][l][j]).scale(&rat(1, 12));
                    op.insert(add_idx(&e(i), &e(k)), e(l), c.clone());
                    op.insert(e(k), add_idx(&e(i), &e(l)), c.neg());
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let c = dp[i][j][l].mul(&dp[k][l][j]).scale(&rat(-1, 24));
                    op.insert(e(i), e(k), c);
                }
            }
        }
    }
    op
}

impl StarProvider {
    /// Moyal product for a constant-coefficient structure.
    pub fn moyal(pi: &PoissonStructure, order: usize) -> Result<Self> {
        if !pi.is_constant() {
            return Err(Error::WrongProvider(
                "the Moyal product needs constant coefficients".into(),
            ));
        }
        let pi = PoissonStructure::certified(pi.pi().with_order(order))?;
        let op = moyal_operator(pi.pi(), order);
        Ok(StarProvider {
            inner: Arc::new(ProviderInner {
                kind: ProviderKind::Moyal,
                pi,
                order,
                op,
            }),
        })
    }

    /// Second-order universal product, certified on random triples drawn
    /// from `seed`. Constant structures fall back to the Moyal series
    /// beyond order 2, where the two formulas agree.
    pub fn universal2(pi: &PoissonStructure, order: usize, seed: u64) -> Result<Self> {
        if order > UNIVERSAL2_DEFAULT_ORDER && !pi.is_constant() {
            return Err(Error::UnsupportedOrder {
                order,
                max: UNIVERSAL2_DEFAULT_ORDER,
            });
        }
        let pi = PoissonStructure::certified(pi.pi().with_order(order))?;
        let op = if order > UNIVERSAL2_DEFAULT_ORDER {
            moyal_operator(pi.pi(), order)
        } else {
            universal2_operator(pi.pi(), order)
        };
        let provider = StarProvider {
            inner: Arc::new(ProviderInner {
                kind: ProviderKind::Universal2,
                pi,
                order,
                op,
            }),
        };
        let report = provider.certify(seed, CONSTRUCTION_SAMPLES);
        for check in &report.checks {
            if let CheckStatus::Fail { order, .. } = check.status {
                return Err(Error::CertificationFailed { order });
            }
        }
        Ok(provider)
    }

    pub fn kind(&self) -> ProviderKind {
        self.inner.kind
    }

    pub fn poisson(&self) -> &PoissonStructure {
        &self.inner.pi
    }

    pub fn ring(&self) -> &Ring {
        self.inner.pi.ring()
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    pub fn operator(&self) -> &BiDiffOp {
        &self.inner.op
    }

    /// `a ⋆ b` modulo ħ^{N+1}.
    pub fn star(&self, a: &HPoly, b: &HPoly) -> Result<HPoly> {
        self.inner.op.apply(a, b)
    }

    /// Lifts a classical function to the provider's order.
    pub fn lift(&self, p: &Poly) -> Result<HPoly> {
        if !same_ring(p.ring(), self.ring()) {
            return Err(Error::RingMismatch);
        }
        Ok(HPoly::from_poly(p.clone(), self.order()))
    }

    /// `a ⋆ b - b ⋆ a`.
    pub fn commutator(&self, a: &HPoly, b: &HPoly) -> Result<HPoly> {
        Ok(self.star(a, b)?.sub(&self.star(b, a)?))
    }

    /// Leading bracket `{a, b} = ⟨π₁, da ⊗ db⟩` of classical functions.
    pub fn bracket(&self, a: &Poly, b: &Poly) -> Poly {
        let pi1 = self.inner.pi.coefficient(1);
        let mut acc = Poly::zero(self.ring());
        for (idx, c) in pi1.components() {
            let (i, j) = (idx[0], idx[1]);
            let term =
                &(&a.derivative(i) * &b.derivative(j)) - &(&a.derivative(j) * &b.derivative(i));
            acc = acc + c.coeff(0) * &term;
        }
        acc
    }

    /// `f ⋆ g = 1` solved order by order: `g_k = -f₀⁻¹ (f ⋆ g_{<k})_k`.
    pub fn unit_inverse(&self, f: &HPoly) -> Result<HPoly> {
        let order = self.order().min(f.order());
        let f = f.truncate(order);
        let f0_inv = f.coeff(0).unit_inverse()?;
        let mut g = HPoly::from_poly(f0_inv.clone(), order);
        for k in 1..=order {
            let r = self.star(&f, &g)?.coeff_or_zero(k);
            if r.is_zero() {
                continue;
            }
            let gk = -(&f0_inv * &r);
            g = g.add(&HPoly::monomial(gk, k, order));
        }
        debug_assert!(self
            .star(&g, &f)?
            .sub(&HPoly::one(self.ring(), order))
            .is_zero());
        Ok(g)
    }

    /// Randomized associativity, unit and semiclassical checks.
    pub fn certify(&self, seed: u64, samples: usize) -> CertificationReport {
        let mut rng = seeded_rng(seed);
        let order = self.order();
        let ring = self.ring().clone();
        let mut assoc = CheckStatus::Pass;
        let mut unit = CheckStatus::Pass;
        let mut semi = CheckStatus::Pass;
        let one = HPoly::one(&ring, order);
        for _ in 0..samples {
            let a = self
                .lift(&sample_poly(&ring, &mut rng, 3, 4))
                .expect("same ring");
            let b = self
                .lift(&sample_poly(&ring, &mut rng, 3, 4))
                .expect("same ring");
            let c = self
                .lift(&sample_poly(&ring, &mut rng, 3, 4))
                .expect("same ring");
            if assoc == CheckStatus::Pass {
                let lhs = self
                    .star(&self.star(&a, &b).expect("ring"), &c)
                    .expect("ring");
                let rhs = self
                    .star(&a, &self.star(&b, &c).expect("ring"))
                    .expect("ring");
                let diff = lhs.sub(&rhs);
                if let Some(k) = diff.valuation() {
                    assoc = CheckStatus::Fail {
                        order: k,
                        counterexample: format!("a = {a}, b = {b}, c = {c}"),
                    };
                }
            }
            if unit == CheckStatus::Pass {
                let l = self.star(&one, &a).expect("ring");
                let r = self.star(&a, &one).expect("ring");
                if l != a || r != a {
                    unit = CheckStatus::Fail {
                        order: 0,
                        counterexample: format!("a = {a}"),
                    };
                }
            }
            if semi == CheckStatus::Pass && order >= 1 {
                let comm = self.commutator(&a, &b).expect("ring");
                let expected = self.bracket(a.coeff(0), b.coeff(0));
                if !comm.coeff(0).is_zero() || comm.coeff(1) != &expected {
                    semi = CheckStatus::Fail {
                        order: 1,
                        counterexample: format!("a = {a}, b = {b}"),
                    };
                }
            }
        }
        let law = |name: &str, status| Check {
            law: name.into(),
            samples,
            status,
        };
        CertificationReport {
            provider: self.kind(),
            order,
            checks: vec![
                law("associativity", assoc),
                law("unit", unit),
                law("semiclassical commutator", semi),
            ],
            witnesses: Vec::new(),
        }
    }
}

/// Deterministic generator for randomized checks.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial with at most `terms` terms of total degree ≤ `degree`
/// and small integer coefficients. Invertible variables may carry exponent -1.
pub fn sample_poly(ring: &Ring, rng: &mut impl Rng, degree: u32, terms: usize) -> Poly {
    let n = ring.nvars();
    let mut p = Poly::zero(ring);
    for _ in 0..rng.gen_range(1..=terms) {
        let mut exps = vec![0i32; n];
        let mut left = rng.gen_range(0..=degree) as i32;
        while left > 0 {
            let i = rng.gen_range(0..n);
            exps[i] += 1;
            left -= 1;
        }
        for (i, e) in exps.iter_mut().enumerate() {
            if ring.is_invertible(i) && *e == 0 && rng.gen_bool(0.2) {
                *e = -1;
            }
        }
        let c = loop {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                break c;
            }
        };
        p = p + Poly::monomial(ring, &exps, BigRational::from_integer(c.into()))
            .expect("valid exponents");
    }
    p
}
