//! Poisson structures `π = ħπ₁ + ħ²π₂ + …` and their invariants: Jacobi
//! certification, the Lichnerowicz and Koszul differentials, modular vector
//! fields, (log-)Hamiltonian solvers, unimodularity witnesses and leading-order
//! Poisson (co)homology.
//!
//! All solvers work order by order in ħ. At each order the unknown enters
//! only through `π₁`, so the problem is a linear system on weight slices
//! (`deg x_i = 1`), solved exactly. Free variables are set to zero.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::calculus::{contract, lie_derivative, schouten, DiffForm, Forms, PolyVector, Vectors};
use crate::error::{Error, Result};
use crate::linalg;
use crate::ring::{Monomial, Poly, Ring};
use crate::series::HPoly;
use crate::slices::{vector_to_coords, SliceBounds, SliceMap};

/// Bounds for slice-based searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct SearchConfig {
    /// Largest weight of an unknown that will be searched.
    pub weight_bound: i64,
    /// Exponent box `|α_i| ≤ B` for unit candidates and Laurent slices.
    pub exponent_box: i32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            weight_bound: 6,
            exponent_box: 3,
        }
    }
}

impl SearchConfig {
    fn bounds(&self) -> SliceBounds {
        SliceBounds {
            exponent_box: self.exponent_box,
        }
    }
}

/// Why a solver returned no solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    /// ħ-order at which the linear system first failed.
    pub order: usize,
    /// Weight of the offending residual component, when meaningful.
    pub weight: Option<i64>,
    /// Rendered residual that could not be matched.
    pub residual: String,
    /// `true` when the failure is a proof of non-existence rather than a
    /// bounded search coming up empty.
    pub exhaustive: bool,
    pub detail: String,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.exhaustive {
            "no solution"
        } else {
            "not found within bounds"
        };
        write!(f, "{verdict} at hbar^{}", self.order)?;
        if let Some(w) = self.weight {
            write!(f, ", weight {w}")?;
        }
        write!(f, ": residual {} ({})", self.residual, self.detail)
    }
}

/// Result of a solver: a solution or an obstruction report.
#[derive(Debug, Clone, PartialEq)]
pub enum Solve<T> {
    Found(T),
    Obstructed(Obstruction),
}

impl<T> Solve<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Solve::Found(t) => Some(t),
            Solve::Obstructed(_) => None,
        }
    }

    pub fn obstruction(&self) -> Option<&Obstruction> {
        match self {
            Solve::Found(_) => None,
            Solve::Obstructed(o) => Some(o),
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Solve::Found(_))
    }

    pub fn into_found(self) -> Option<T> {
        match self {
            Solve::Found(t) => Some(t),
            Solve::Obstructed(_) => None,
        }
    }
}

/// A formal Poisson bivector with vanishing ħ⁰ term.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonStructure {
    pi: PolyVector,
    certified: bool,
}

/// Outcome of [`jacobi_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum JacobiOutcome {
    Certified(PoissonStructure),
    /// First nonzero ħ-coefficient of `[π, π]`.
    Violation {
        order: usize,
        trivector: PolyVector,
    },
}

impl PoissonStructure {
    /// Wraps a bivector without checking the Jacobi identity.
    pub fn new(pi: PolyVector) -> Result<Self> {
        if pi.degree() != 2 && !pi.is_zero() {
            return Err(Error::WrongDegree {
                expected: "bivector",
                found: pi.degree(),
            });
        }
        if !pi.hbar_coeff(0).is_zero() {
            return Err(Error::MalformedDeformation);
        }
        Ok(PoissonStructure {
            pi,
            certified: false,
        })
    }

    /// Wraps and certifies; a Jacobi violation becomes an error.
    pub fn certified(pi: PolyVector) -> Result<Self> {
        match jacobi_check(&pi)? {
            JacobiOutcome::Certified(p) => Ok(p),
            JacobiOutcome::Violation { order, .. } => Err(Error::JacobiViolation { order }),
        }
    }

    pub fn pi(&self) -> &PolyVector {
        &self.pi
    }

    pub fn ring(&self) -> &Ring {
        self.pi.ring()
    }

    pub fn order(&self) -> usize {
        self.pi.order()
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// The ħ^k coefficient `π_k` as an order-0 bivector.
    pub fn coefficient(&self, k: usize) -> PolyVector {
        let c = self.pi.hbar_coeff(k);
        if c.is_zero() {
            PolyVector::zero(self.ring(), 2, 0)
        } else {
            c
        }
    }

    /// Whether every coefficient of `π` is a constant.
    pub fn is_constant(&self) -> bool {
        self.pi
            .components()
            .values()
            .all(|c| c.coeffs().iter().all(Poly::is_constant))
    }

    /// Whether `π` has terms beyond ħ¹.
    pub fn has_higher_terms(&self) -> bool {
        (2..=self.order()).any(|k| !self.coefficient(k).is_zero())
    }

    /// Weight of `π₁`; the slice solvers require it to be homogeneous.
    pub fn leading_weight(&self) -> Result<i64> {
        if self.order() == 0 || self.coefficient(1).is_zero() {
            return Err(Error::UnsupportedStructure(
                "the hbar^1 coefficient vanishes".into(),
            ));
        }
        self.pi.homogeneous_weight_at(1).ok_or_else(|| {
            Error::UnsupportedStructure(format!(
                "leading bivector {} is not weight-homogeneous",
                self.coefficient(1)
            ))
        })
    }

    fn require_certified(&self) -> Result<()> {
        if self.certified {
            Ok(())
        } else {
            Err(Error::Uncertified)
        }
    }

    /// Truncates to a lower ħ-order, keeping the certificate.
    pub fn truncate(&self, order: usize) -> Self {
        PoissonStructure {
            pi: self.pi.truncate(order),
            certified: self.certified,
        }
    }
}

impl fmt::Display for PoissonStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.pi.fmt(f)
    }
}

/// Computes `[π, π]` modulo ħ^{N+1} and certifies `π` if it vanishes.
pub fn jacobi_check(pi: &PolyVector) -> Result<JacobiOutcome> {
    let mut p = PoissonStructure::new(pi.clone())?;
    let sq = schouten(pi, pi)?;
    match sq.valuation() {
        None => {
            p.certified = true;
            Ok(JacobiOutcome::Certified(p))
        }
        Some(order) => Ok(JacobiOutcome::Violation {
            order,
            trivector: sq.hbar_coeff(order),
        }),
    }
}

/// Lichnerowicz differential `∂_π γ = [π, γ]`.
pub fn lichnerowicz(pi: &PoissonStructure, gamma: &PolyVector) -> Result<PolyVector> {
    pi.require_certified()?;
    schouten(&pi.pi, gamma)
}

/// Koszul differential `L_π α`.
pub fn koszul_differential(pi: &PoissonStructure, alpha: &DiffForm) -> Result<DiffForm> {
    pi.require_certified()?;
    lie_derivative(&pi.pi, alpha)
}

/// Hamiltonian field `[π, f]`.
pub fn hamiltonian_field(pi: &PoissonStructure, f: &HPoly) -> Result<PolyVector> {
    pi.require_certified()?;
    schouten(&pi.pi, &PolyVector::function(f.clone()))
}

/// Log-Hamiltonian field `f⁻¹[π, f]` of a unit `f`.
pub fn log_hamiltonian_field(pi: &PoissonStructure, f: &HPoly) -> Result<PolyVector> {
    let inv = f.unit_inverse()?;
    Ok(hamiltonian_field(pi, f)?.mul_fn(&inv))
}

/// Checks that `ω` is a top-degree form whose leading coefficient is a unit.
pub fn check_volume(omega: &DiffForm) -> Result<HPoly> {
    let n = omega.ring().nvars();
    if omega.degree() != n {
        return Err(Error::NotAVolume(format!(
            "degree {} but the ring has {n} variables",
            omega.degree()
        )));
    }
    let coef = omega.component(&(0..n).collect::<Vec<_>>());
    if coef.coeff(0).as_unit().is_none() {
        return Err(Error::NotAVolume(format!(
            "coefficient `{}` is not a unit",
            coef.coeff(0)
        )));
    }
    Ok(coef)
}

/// The modular vector field `v` defined by `i_v ω = L_π ω`.
pub fn modular_vector_field(pi: &PoissonStructure, omega: &DiffForm) -> Result<PolyVector> {
    pi.require_certified()?;
    let u = check_volume(omega)?;
    let n = omega.ring().nvars();
    let order = pi.order().min(omega.order());
    let u_inv = u.truncate(order).unit_inverse()?;
    let l = lie_derivative(&pi.pi, omega)?;
    let mut v = PolyVector::zero(omega.ring(), 1, order);
    for i in 0..n {
        let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let c = l.component(&rest);
        if c.is_zero() {
            continue;
        }
        let sign = BigRational::from_integer(if i % 2 == 0 { 1 } else { -1 }.into());
        v = v.add(&PolyVector::term(c.mul(&u_inv).scale(&sign), &[i])?);
    }
    debug_assert!(contract(&v, omega)?.sub(&l.truncate(order)).is_zero());
    Ok(v)
}

fn display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn display_opt<T: fmt::Display, S: Serializer>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

/// Modular vector field together with a decomposition attempt.
#[derive(Debug, Clone, Serialize)]
pub struct ModularClassReport {
    #[serde(serialize_with = "display")]
    pub structure: PolyVector,
    #[serde(rename = "volume", serialize_with = "display")]
    pub volume_used: DiffForm,
    #[serde(serialize_with = "display")]
    pub modular_field: PolyVector,
    /// `[π, v] = 0` at every computed order.
    pub poisson_field: bool,
    pub class_trivial: bool,
    #[serde(rename = "witness", serialize_with = "display_opt")]
    pub log_ham_witness: Option<HPoly>,
    pub obstruction: Option<Obstruction>,
    pub orders_checked: usize,
}

/// Computes the modular field of `(π, ω)` and searches for a unit `f` with
/// `v = f⁻¹[π, f]`.
pub fn modular_class(
    pi: &PoissonStructure,
    omega: &DiffForm,
    cfg: &SearchConfig,
) -> Result<ModularClassReport> {
    let v = modular_vector_field(pi, omega)?;
    let poisson_field = schouten(&pi.pi, &v)?.is_zero();
    let decomposition = log_hamiltonian_decompose(pi, &v, cfg)?;
    let (witness, obstruction) = match decomposition {
        Solve::Found(f) => (Some(f), None),
        Solve::Obstructed(o) => (None, Some(o)),
    };
    Ok(ModularClassReport {
        structure: pi.pi.clone(),
        volume_used: omega.clone(),
        orders_checked: v.order(),
        modular_field: v,
        poisson_field,
        class_trivial: witness.is_some(),
        log_ham_witness: witness,
        obstruction,
    })
}

/// Units `x^α` with `α` supported on invertible variables and `|α_i| ≤ B`,
/// ordered by total size then lexicographically.
pub fn unit_candidates(ring: &Ring, exponent_box: i32) -> Vec<Monomial> {
    let n = ring.nvars();
    let mut out = vec![vec![0i32; n]];
    for i in 0..n {
        if !ring.is_invertible(i) {
            continue;
        }
        let mut next = Vec::new();
        for base in &out {
            for e in -exponent_box..=exponent_box {
                let mut m = base.clone();
                m[i] = e;
                next.push(m);
            }
        }
        out = next;
    }
    out.sort_by_key(|a| (a.iter().map(|e| e.unsigned_abs()).sum::<u32>(), a.clone()));
    out.into_iter().map(Monomial).collect()
}

fn monomial_unit(ring: &Ring, m: &Monomial, order: usize) -> HPoly {
    let p = Poly::monomial(ring, m.exps(), BigRational::from_integer(1.into()))
        .expect("unit exponents");
    HPoly::from_poly(p, order)
}

/// Solves `[π, f] = w` modulo ħ^{N+1}.
pub fn solve_hamiltonian(
    pi: &PoissonStructure,
    w: &PolyVector,
    cfg: &SearchConfig,
) -> Result<Solve<HPoly>> {
    solve_hamiltonian_inner(pi, w, cfg, false)
}

/// Order-by-order Hamiltonian solver. With `pinned_leading`, the ħ⁰ term
/// of the unknown is forced to vanish.
fn solve_hamiltonian_inner(
    pi: &PoissonStructure,
    w: &PolyVector,
    cfg: &SearchConfig,
    pinned_leading: bool,
) -> Result<Solve<HPoly>> {
    pi.require_certified()?;
    if w.degree() != 1 && !w.is_zero() {
        return Err(Error::WrongDegree {
            expected: "vector field",
            found: w.degree(),
        });
    }
    let ring = pi.ring().clone();
    let order = pi.order().min(w.order());
    let exhaustive = cfg.bounds().exhaustive(&ring) && !pi.has_higher_terms();
    let w0 = w.hbar_coeff(0);
    if !w0.is_zero() {
        return Ok(Solve::Obstructed(Obstruction {
            order: 0,
            weight: None,
            residual: w0.to_string(),
            exhaustive: true,
            detail: "Hamiltonian fields vanish at hbar^0".into(),
        }));
    }
    if w.is_zero() {
        return Ok(Solve::Found(HPoly::zero(&ring, order)));
    }
    let w_pi = pi.leading_weight()?;
    let pi1 = pi.coefficient(1);
    let mut parts: Vec<PolyVector> = vec![PolyVector::zero(&ring, 0, 0); order + 1];
    for m in 1..=order {
        let mut rhs = w.hbar_coeff(m);
        for j in 2..=m {
            let pj = pi.coefficient(j);
            if pj.is_zero() || parts[m - j].is_zero() {
                continue;
            }
            rhs = rhs.sub(&schouten(&pj, &parts[m - j])?);
        }
        if rhs.is_zero() {
            continue;
        }
        if pinned_leading && m == 1 {
            return Ok(Solve::Obstructed(Obstruction {
                order: 1,
                weight: None,
                residual: rhs.to_string(),
                exhaustive: true,
                detail: "leading term of the unit is fixed".into(),
            }));
        }
        for (weight, comp) in rhs.weight_components_at(0) {
            let domain_weight = weight - w_pi;
            if domain_weight > cfg.weight_bound {
                return Ok(Solve::Obstructed(Obstruction {
                    order: m,
                    weight: Some(weight),
                    residual: comp.to_string(),
                    exhaustive: false,
                    detail: format!(
                        "a preimage would have weight {domain_weight} beyond the bound"
                    ),
                }));
            }
            let map =
                SliceMap::build::<Vectors, Vectors>(&ring, 0, domain_weight, cfg.bounds(), |e| {
                    schouten(&pi1, e)
                })?;
            match map.solve(&comp.coordinates_at(0)) {
                Some(x) => {
                    let piece = PolyVector::from_coordinates(&ring, 0, &x);
                    parts[m - 1] = parts[m - 1].add(&piece);
                }
                None => {
                    return Ok(Solve::Obstructed(Obstruction {
                        order: m,
                        weight: Some(weight),
                        residual: comp.to_string(),
                        exhaustive,
                        detail: format!(
                            "not in the image of [pi_1, -] on functions of weight {domain_weight}"
                        ),
                    }))
                }
            }
        }
    }
    let f = PolyVector::from_hbar_coeffs(&ring, 0, &parts, order).component(&[]);
    debug_assert!(schouten(&pi.pi, &PolyVector::function(f.clone()))?
        .sub(&w.truncate(order))
        .is_zero());
    Ok(Solve::Found(f))
}

/// Searches for a unit `f` with `v = f⁻¹[π, f]`: leading monomials `f₀`
/// from the exponent box, then `f = f₀·exp(g)` with `[π, g] = v - f₀⁻¹[π, f₀]`.
pub fn log_hamiltonian_decompose(
    pi: &PoissonStructure,
    v: &PolyVector,
    cfg: &SearchConfig,
) -> Result<Solve<HPoly>> {
    pi.require_certified()?;
    let ring = pi.ring().clone();
    let order = pi.order().min(v.order());
    let pi = pi.truncate(order);
    let mut best: Option<Obstruction> = None;
    for alpha in unit_candidates(&ring, cfg.exponent_box) {
        let f0 = monomial_unit(&ring, &alpha, order);
        let rest = v.sub(&log_hamiltonian_field(&pi, &f0)?);
        let outcome = solve_hamiltonian_inner(&pi, &rest, cfg, true)?;
        match outcome {
            Solve::Found(g) => {
                let f = f0.mul(&g.exp()?);
                debug_assert!(log_hamiltonian_field(&pi, &f)?
                    .sub(v)
                    .truncate(order)
                    .is_zero());
                return Ok(Solve::Found(f));
            }
            Solve::Obstructed(o) => {
                if best.as_ref().is_none_or(|b| o.order > b.order) {
                    best = Some(o);
                }
            }
        }
    }
    let mut o = best.expect("at least the trivial candidate is tried");
    if ring.has_invertible() {
        o.exhaustive = false;
        o.detail = format!(
            "no unit within exponent box {}; {}",
            cfg.exponent_box, o.detail
        );
    }
    Ok(Solve::Obstructed(o))
}

/// Searches for `ω̃ = Σ ħ^k ω_k` with `L_π ω̃ = 0` modulo ħ^{N+1}, starting
/// from a unit rescaling of `ω₀`.
pub fn unimodularity_witness(
    pi: &PoissonStructure,
    omega0: &DiffForm,
    cfg: &SearchConfig,
) -> Result<Solve<DiffForm>> {
    pi.require_certified()?;
    check_volume(omega0)?;
    let ring = pi.ring().clone();
    let n = ring.nvars();
    let order = pi.order();
    let base = omega0.hbar_coeff(0);
    let exhaustive = cfg.bounds().exhaustive(&ring) && !pi.has_higher_terms();
    let pi1 = pi.coefficient(1);
    let mut best: Option<Obstruction> = None;
    'candidates: for alpha in unit_candidates(&ring, cfg.exponent_box) {
        let u = monomial_unit(&ring, &alpha, 0);
        let mut parts = vec![DiffForm::zero(&ring, n, 0); order + 1];
        parts[0] = base.mul_fn(&u);
        for m in 1..=order {
            let mut rhs = DiffForm::zero(&ring, n - 1, 0);
            for j in 2..=m {
                let pj = pi.coefficient(j);
                if pj.is_zero() || parts[m - j].is_zero() {
                    continue;
                }
                rhs = rhs.sub(&lie_derivative(&pj, &parts[m - j])?);
            }
            let residual_at_leading = lie_derivative(&pi1, &parts[0])?;
            if m == 1 {
                if !residual_at_leading.is_zero() {
                    let o = Obstruction {
                        order: 1,
                        weight: None,
                        residual: residual_at_leading.to_string(),
                        exhaustive: !ring.has_invertible(),
                        detail: format!("L_pi_1 does not annihilate {}", parts[0]),
                    };
                    if best.is_none() {
                        best = Some(o);
                    }
                    continue 'candidates;
                }
                continue;
            }
            if rhs.is_zero() {
                continue;
            }
            let w_pi = pi.leading_weight()?;
            for (weight, comp) in rhs.weight_components_at(0) {
                let domain_weight = weight - w_pi;
                let fail = |exhaustive: bool, detail: String| Obstruction {
                    order: m,
                    weight: Some(weight),
                    residual: comp.to_string(),
                    exhaustive,
                    detail,
                };
                let o = if domain_weight - n as i64 > cfg.weight_bound {
                    Some(fail(false, "correction beyond the weight bound".into()))
                } else {
                    let map = SliceMap::build::<Forms, Forms>(
                        &ring,
                        n,
                        domain_weight,
                        cfg.bounds(),
                        |e| lie_derivative(&pi1, e),
                    )?;
                    match map.solve(&comp.coordinates_at(0)) {
                        Some(x) => {
                            parts[m - 1] =
                                parts[m - 1].add(&DiffForm::from_coordinates(&ring, n, &x));
                            None
                        }
                        None => Some(fail(
                            exhaustive,
                            format!(
                                "not in the image of L_pi_1 on top forms of weight {domain_weight}"
                            ),
                        )),
                    }
                };
                if let Some(o) = o {
                    if best.as_ref().is_none_or(|b| o.order > b.order) {
                        best = Some(o);
                    }
                    continue 'candidates;
                }
            }
        }
        let witness = DiffForm::from_hbar_coeffs(&ring, n, &parts, order);
        debug_assert!(lie_derivative(&pi.pi, &witness)?.is_zero());
        return Ok(Solve::Found(witness));
    }
    let mut o = best.expect("at least the trivial candidate is tried");
    if ring.has_invertible() {
        o.exhaustive = false;
    }
    Ok(Solve::Obstructed(o))
}

/// The extension `πᵗ = π + t∂_t ∧ v` on the ring with an extra invertible
/// variable `t`, and the volume `ω_t = t⁻² dt ∧ ω`.
pub fn modular_extension(
    pi: &PoissonStructure,
    omega: &DiffForm,
    t_name: &str,
) -> Result<(PolyVector, DiffForm)> {
    let v = modular_vector_field(pi, omega)?;
    let ring = pi.ring().with_invertible_var(t_name)?;
    let t = ring.nvars() - 1;
    let order = v.order();
    let t_poly = Poly::var(&ring, t);
    let euler = PolyVector::term(HPoly::from_poly(t_poly, order), &[t])?;
    let pi_t = pi
        .pi
        .embed(&ring)?
        .truncate(order)
        .add(&euler.wedge(&v.embed(&ring)?)?);
    let t_inv2 = Poly::monomial(
        &ring,
        &unit_exps(ring.nvars(), t, -2),
        BigRational::from_integer(1.into()),
    )?;
    let dt = DiffForm::term(HPoly::from_poly(t_inv2, omega.order()), &[t])?;
    let omega_t = dt.wedge(&omega.embed(&ring)?)?;
    Ok((pi_t, omega_t))
}

fn unit_exps(n: usize, i: usize, e: i32) -> Vec<i32> {
    let mut v = vec![0; n];
    v[i] = e;
    v
}

/// One weight slice of a (co)homology computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HpSlice {
    pub weight: i64,
    pub dimension: usize,
    pub kernel_dim: usize,
    pub image_rank: usize,
    pub representatives: Vec<String>,
}

/// Leading-order Poisson (co)homology over a window of weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HpReport {
    pub kind: &'static str,
    pub degree: usize,
    pub exhaustive: bool,
    pub slices: Vec<HpSlice>,
}

impl HpReport {
    pub fn slice(&self, weight: i64) -> Option<&HpSlice> {
        self.slices.iter().find(|s| s.weight == weight)
    }

    pub fn total_dimension(&self) -> usize {
        self.slices.iter().map(|s| s.dimension).sum()
    }
}

fn hp_slice<K: crate::calculus::Kind>(
    ring: &Ring,
    degree: usize,
    weight: i64,
    kernel_map: &SliceMap,
    image_map: Option<&SliceMap>,
) -> HpSlice {
    let kernel = kernel_map.kernel();
    let len = kernel_map.domain.len();
    let image_cols = image_map
        .map(|m| m.columns_in(&kernel_map.domain))
        .unwrap_or_default();
    let image_rank = linalg::rank(&image_cols, len);
    let picked = linalg::complement(&image_cols, &kernel, len);
    let representatives = picked
        .iter()
        .map(|&i| {
            let coords = vector_to_coords(&kernel_map.domain, &kernel[i]);
            crate::calculus::Graded::<K>::from_coordinates(ring, degree, &coords).to_string()
        })
        .collect();
    HpSlice {
        weight,
        dimension: kernel.len() - image_rank,
        kernel_dim: kernel.len(),
        image_rank,
        representatives,
    }
}

/// `HP^k` of `∂_{π₁}` on k-vector fields, slice by slice for weights in `window`.
pub fn hp_cohomology(
    pi: &PoissonStructure,
    degree: usize,
    window: (i64, i64),
    cfg: &SearchConfig,
) -> Result<HpReport> {
    pi.require_certified()?;
    let ring = pi.ring().clone();
    if degree > ring.nvars() {
        return Err(Error::WrongDegree {
            expected: "multivector degree at most the number of variables",
            found: degree,
        });
    }
    let w_pi = pi.leading_weight()?;
    let pi1 = pi.coefficient(1);
    let mut slices = Vec::new();
    for weight in window.0..=window.1 {
        let d = |e: &PolyVector| schouten(&pi1, e);
        let kernel_map =
            SliceMap::build::<Vectors, Vectors>(&ring, degree, weight, cfg.bounds(), d)?;
        let image_map = if degree > 0 {
            Some(SliceMap::build::<Vectors, Vectors>(
                &ring,
                degree - 1,
                weight - w_pi,
                cfg.bounds(),
                d,
            )?)
        } else {
            None
        };
        slices.push(hp_slice::<Vectors>(
            &ring,
            degree,
            weight,
            &kernel_map,
            image_map.as_ref(),
        ));
    }
    Ok(HpReport {
        kind: "cohomology",
        degree,
        exhaustive: cfg.bounds().exhaustive(&ring),
        slices,
    })
}

/// `HP_k` of `L_{π₁}` on k-forms, slice by slice for weights in `window`.
pub fn hp_homology(
    pi: &PoissonStructure,
    degree: usize,
    window: (i64, i64),
    cfg: &SearchConfig,
) -> Result<HpReport> {
    pi.require_certified()?;
    let ring = pi.ring().clone();
    if degree > ring.nvars() {
        return Err(Error::WrongDegree {
            expected: "form degree at most the number of variables",
            found: degree,
        });
    }
    let w_pi = pi.leading_weight()?;
    let pi1 = pi.coefficient(1);
    let mut slices = Vec::new();
    for weight in window.0..=window.1 {
        let l = |e: &DiffForm| lie_derivative(&pi1, e);
        let kernel_map = SliceMap::build::<Forms, Forms>(&ring, degree, weight, cfg.bounds(), l)?;
        let image_map = if degree < ring.nvars() {
            Some(SliceMap::build::<Forms, Forms>(
                &ring,
                degree + 1,
                weight - w_pi,
                cfg.bounds(),
                l,
            )?)
        } else {
            None
        };
        slices.push(hp_slice::<Forms>(
            &ring,
            degree,
            weight,
            &kernel_map,
            image_map.as_ref(),
        ));
    }
    Ok(HpReport {
        kind: "homology",
        degree,
        exhaustive: cfg.bounds().exhaustive(&ring),
        slices,
    })
}

/// Basis of leading-order Poisson vector fields (`[π₁, w] = 0`) of one weight.
pub fn poisson_vector_fields(
    pi: &PoissonStructure,
    weight: i64,
    cfg: &SearchConfig,
) -> Result<Vec<PolyVector>> {
    pi.require_certified()?;
    let ring = pi.ring().clone();
    let pi1 = pi.coefficient(1);
    let map =
        SliceMap::build::<Vectors, Vectors>(&ring, 1, weight, cfg.bounds(), |e| schouten(&pi1, e))?;
    Ok(map
        .kernel()
        .iter()
        .map(|v| PolyVector::from_coordinates(&ring, 1, &vector_to_coords(&map.domain, v)))
        .collect())
}

/// Coordinates of the ħ^k coefficient restricted to one weight.
pub fn weight_part<K: crate::calculus::Kind>(
    g: &crate::calculus::Graded<K>,
    k: usize,
    weight: i64,
) -> BTreeMap<crate::slices::Coord, BigRational> {
    g.coordinates_at(k)
        .into_iter()
        .filter(|((i, m), c)| {
            !c.is_zero() && crate::calculus::Graded::<K>::term_weight(i, m) == weight
        })
        .collect()
}
