//! Inner automorphisms of the star algebra: solving `ψ(a) = F ⋆ a ⋆ F⁻¹`
//! for a unit `F`, order by order.
//!
//! Write `R(a) = ψ(a) ⋆ F - F ⋆ a` for the current truncation of `F`.
//! Adding `ħ^k f₀ h` to `F` changes the order `k + 1` part of `R(x_i)` by
//! `f₀ {x_i, h}`, once the leading order is consistent. So each step is a
//! Hamiltonian problem `[π₁, h] = -f₀⁻¹ Σ_i R_{k+1}(x_i) ∂_i`.

use serde::Serialize;

use super::derivation::{exp_derivation, quantized_derivation, QuantDerivation};
use super::star::{sample_poly, seeded_rng, StarProvider};
use crate::calculus::{DiffForm, PolyVector};
use crate::error::Result;
use crate::poisson::{
    log_hamiltonian_field, modular_vector_field, solve_hamiltonian, Obstruction, PoissonStructure,
    SearchConfig, Solve,
};
use crate::ring::Poly;
use crate::series::HPoly;

fn generators(provider: &StarProvider) -> Result<Vec<HPoly>> {
    let ring = provider.ring();
    (0..ring.nvars())
        .map(|i| provider.lift(&Poly::var(ring, i)))
        .collect()
}

/// `ħπ₁` as a certified structure of order 1.
fn leading_structure(provider: &StarProvider) -> Result<PoissonStructure> {
    let ring = provider.ring();
    let pi1 = provider.poisson().coefficient(1);
    PoissonStructure::certified(PolyVector::from_hbar_coeffs(
        ring,
        2,
        &[PolyVector::zero(ring, 2, 0), pi1],
        1,
    ))
}

/// Whether `ψ(a) ⋆ F = F ⋆ a` holds modulo ħ^{N+1} on every generator.
pub fn conjugation_holds(
    provider: &StarProvider,
    psi: &impl Fn(&HPoly) -> Result<HPoly>,
    f: &HPoly,
) -> Result<bool> {
    for a in generators(provider)? {
        let lhs = provider.star(&psi(&a)?, f)?;
        let rhs = provider.star(f, &a)?;
        if !lhs.sub(&rhs).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solves for a unit `F ≡ u₀ mod ħ` with `ψ(a) = F ⋆ a ⋆ F⁻¹` on generators.
pub fn conjugating_unit(
    provider: &StarProvider,
    psi: impl Fn(&HPoly) -> Result<HPoly>,
    u0: &HPoly,
    cfg: &SearchConfig,
) -> Result<Solve<HPoly>> {
    let order = provider.order();
    let f0 = u0.coeff(0).clone();
    let f0_inv = f0.unit_inverse()?;
    let gens = generators(provider)?;
    let images = gens.iter().map(&psi).collect::<Result<Vec<_>>>()?;
    let leading = leading_structure(provider)?;
    let mut f = HPoly::from_poly(f0.clone(), order);
    let residual = |f: &HPoly| -> Result<Vec<HPoly>> {
        gens.iter()
            .zip(&images)
            .map(|(a, pa)| Ok(provider.star(pa, f)?.sub(&provider.star(f, a)?)))
            .collect()
    };
    let r = residual(&f)?;
    if order >= 1 {
        if let Some(bad) = r.iter().find(|ri| !ri.coeff_or_zero(1).is_zero()) {
            return Ok(Solve::Obstructed(Obstruction {
                order: 1,
                weight: None,
                residual: bad.coeff_or_zero(1).to_string(),
                exhaustive: true,
                detail: format!("leading unit {f0} is incompatible with the automorphism"),
            }));
        }
    }
    for k in 1..order {
        let r = residual(&f)?;
        let comps: Vec<HPoly> = r
            .iter()
            .map(|ri| HPoly::monomial(-(&f0_inv * &ri.coeff_or_zero(k + 1)), 1, 1))
            .collect();
        let target = PolyVector::vector_field(&comps)?;
        match solve_hamiltonian(&leading, &target, cfg)? {
            Solve::Found(h) => {
                let fk = &f0 * h.coeff(0);
                f = f.add(&HPoly::monomial(fk, k, order));
            }
            Solve::Obstructed(mut o) => {
                o.order = k + 1;
                o.detail = format!("no correction of F at hbar^{k}: {}", o.detail);
                return Ok(Solve::Obstructed(o));
            }
        }
    }
    Ok(Solve::Found(f))
}

/// The lift of a unit `f`: the field `w = -f⁻¹[π, f]`, its derivation
/// `D_w`, and `F ≡ f mod ħ` with `exp(D_w)(a) = F ⋆ a ⋆ F⁻¹`.
#[derive(Debug, Clone)]
pub struct Lift {
    pub field: PolyVector,
    pub derivation: QuantDerivation,
    pub unit: HPoly,
}

pub fn lift_log_hamiltonian(
    provider: &StarProvider,
    f: &HPoly,
    cfg: &SearchConfig,
) -> Result<Solve<Lift>> {
    let f = f.truncate(provider.order());
    let w = log_hamiltonian_field(provider.poisson(), &f)?.neg();
    let derivation = match quantized_derivation(&w, provider, cfg)? {
        Solve::Found(d) => d,
        Solve::Obstructed(o) => return Ok(Solve::Obstructed(o)),
    };
    let d = derivation.clone();
    let unit = conjugating_unit(provider, move |a| d.exp_power(1, a), &f, cfg)?;
    Ok(match unit {
        Solve::Found(unit) => Solve::Found(Lift {
            field: w,
            derivation,
            unit,
        }),
        Solve::Obstructed(o) => Solve::Obstructed(o),
    })
}

/// Whether `exp(D_{w₁}) ∘ exp(-D_{w₀})` is conjugation by a unit.
#[derive(Debug, Clone, Serialize)]
pub struct InnerTwistReport {
    pub field: String,
    pub twisted_field: String,
    pub unit: Option<String>,
    pub obstruction: Option<Obstruction>,
    pub verified: bool,
}

/// Looks for `F ≡ u₀ mod ħ` with `exp(D_{w₁}) ∘ exp(-D_{w₀}) = F ⋆ (·) ⋆ F⁻¹`.
pub fn relative_twist(
    provider: &StarProvider,
    w0: &PolyVector,
    w1: &PolyVector,
    u0: &HPoly,
    cfg: &SearchConfig,
) -> Result<InnerTwistReport> {
    let mut report = InnerTwistReport {
        field: w0.to_string(),
        twisted_field: w1.to_string(),
        unit: None,
        obstruction: None,
        verified: false,
    };
    let d1 = quantized_derivation(w1, provider, cfg)?;
    let d0 = quantized_derivation(w0, provider, cfg)?;
    let (d1, d0) = match (d1, d0) {
        (Solve::Found(a), Solve::Found(b)) => (a, b),
        (Solve::Obstructed(o), _) | (_, Solve::Obstructed(o)) => {
            report.obstruction = Some(o);
            return Ok(report);
        }
    };
    let psi = move |a: &HPoly| d1.exp_power(1, &d0.exp_power(-1, a)?);
    match conjugating_unit(provider, &psi, u0, cfg)? {
        Solve::Found(unit) => {
            report.verified = conjugation_holds(provider, &psi, &unit)?;
            report.unit = Some(unit.to_string());
        }
        Solve::Obstructed(o) => report.obstruction = Some(o),
    }
    Ok(report)
}

/// Twisting a Poisson field by a log-Hamiltonian field changes
/// `exp(D_w)` by an inner automorphism, implemented by `F ≡ f⁻¹ mod ħ`.
pub fn twist_is_inner(
    provider: &StarProvider,
    w: &PolyVector,
    f: &HPoly,
    cfg: &SearchConfig,
) -> Result<InnerTwistReport> {
    let order = provider.order();
    let f = f.truncate(order);
    let w = w.with_order(order);
    let w_log = log_hamiltonian_field(provider.poisson(), &f)?;
    relative_twist(provider, &w, &w.add(&w_log), &f.unit_inverse()?, cfg)
}

/// `exp(D_v)` for the modular field of a volume form, with checks.
#[derive(Debug, Clone, Serialize)]
pub struct ModularAutomorphismReport {
    pub modular_field: String,
    pub derivation: String,
    pub generator_images: Vec<(String, String)>,
    pub automorphism_samples: usize,
    pub automorphism_law: bool,
    pub rescaling: Option<InnerTwistReport>,
    pub obstruction: Option<Obstruction>,
}

/// Builds `φ_v = exp(D_v)`, samples `φ(a ⋆ b) = φ(a) ⋆ φ(b)`, and, given
/// a unit `f`, checks that the field of `fω` yields `φ_v` up to an inner
/// automorphism.
pub fn modular_automorphism_candidate(
    provider: &StarProvider,
    omega: &DiffForm,
    rescale: Option<&HPoly>,
    cfg: &SearchConfig,
    seed: u64,
    samples: usize,
) -> Result<ModularAutomorphismReport> {
    let order = provider.order();
    let v = modular_vector_field(provider.poisson(), &omega.with_order(order))?;
    let mut report = ModularAutomorphismReport {
        modular_field: v.to_string(),
        derivation: String::new(),
        generator_images: Vec::new(),
        automorphism_samples: samples,
        automorphism_law: false,
        rescaling: None,
        obstruction: None,
    };
    let d = match quantized_derivation(&v, provider, cfg)? {
        Solve::Found(d) => d,
        Solve::Obstructed(o) => {
            report.obstruction = Some(o);
            return Ok(report);
        }
    };
    report.derivation = d.to_string();
    let ring = provider.ring();
    for (i, a) in generators(provider)?.iter().enumerate() {
        report
            .generator_images
            .push((ring.name(i).to_string(), exp_derivation(&d, a)?.to_string()));
    }
    let mut rng = seeded_rng(seed);
    report.automorphism_law = true;
    for _ in 0..samples {
        let a = HPoly::from_poly(sample_poly(ring, &mut rng, 2, 3), order);
        let b = HPoly::from_poly(sample_poly(ring, &mut rng, 2, 3), order);
        let lhs = exp_derivation(&d, &provider.star(&a, &b)?)?;
        let rhs = provider.star(&exp_derivation(&d, &a)?, &exp_derivation(&d, &b)?)?;
        if lhs != rhs {
            report.automorphism_law = false;
            break;
        }
    }
    if let Some(f) = rescale {
        let f = f.truncate(order);
        let scaled = omega.with_order(order).mul_fn(&f);
        let v_f = modular_vector_field(provider.poisson(), &scaled)?;
        report.rescaling = Some(relative_twist(provider, &v, &v_f, &f, cfg)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{CoordinateRing, Ring};

    fn laurent_moyal(order: usize) -> (Ring, StarProvider) {
        let r = CoordinateRing::new(&["x", "y"], &["x", "y"]).unwrap();
        let pi = PolyVector::term(HPoly::hbar(&r, order), &[0, 1]).unwrap();
        let s = StarProvider::moyal(&PoissonStructure::certified(pi).unwrap(), order).unwrap();
        (r, s)
    }

    #[test]
    fn trivial_unit_lifts_to_itself() {
        let (r, s) = laurent_moyal(2);
        let lift = lift_log_hamiltonian(&s, &HPoly::one(&r, 2), &SearchConfig::default()).unwrap();
        let lift = lift.found().unwrap();
        assert!(lift.field.is_zero());
        assert_eq!(lift.unit, HPoly::one(&r, 2));
    }

    #[test]
    fn coordinate_unit_lifts() {
        let (r, s) = laurent_moyal(3);
        let x = s.lift(&Poly::var(&r, 0)).unwrap();
        let lift = lift_log_hamiltonian(&s, &x, &SearchConfig::default()).unwrap();
        let lift = lift.found().unwrap();
        assert_eq!(lift.unit.coeff(0), x.coeff(0));
        let d = lift.derivation.clone();
        assert!(conjugation_holds(&s, &move |a: &HPoly| d.exp_power(1, a), &lift.unit).unwrap());
    }

    #[test]
    fn twists_by_log_hamiltonian_fields_are_inner() {
        let (r, s) = laurent_moyal(2);
        let w = PolyVector::term(HPoly::hbar(&r, 2), &[0]).unwrap();
        let f = s.lift(&Poly::var(&r, 1)).unwrap();
        let report = twist_is_inner(&s, &w, &f, &SearchConfig::default()).unwrap();
        assert!(report.verified, "{report:?}");
    }

    #[test]
    fn symplectic_modular_automorphism_is_trivial() {
        let (r, s) = laurent_moyal(2);
        let omega = DiffForm::term(HPoly::one(&r, 2), &[0, 1]).unwrap();
        let f = s.lift(&Poly::var(&r, 0)).unwrap();
        let report =
            modular_automorphism_candidate(&s, &omega, Some(&f), &SearchConfig::default(), 1, 5)
                .unwrap();
        assert_eq!(report.modular_field, "0");
        assert!(report.automorphism_law);
        assert_eq!(
            report.generator_images[0],
            ("x".to_string(), "x".to_string())
        );
        assert!(report.rescaling.unwrap().verified);
    }
}
