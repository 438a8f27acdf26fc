//! Randomized checks for star products, quantized derivations, lifts and
//! the crossed product.

use num_rational::BigRational;
use poisson_core::calculus::{schouten, PolyVector};
use poisson_core::poisson::{poisson_vector_fields, PoissonStructure, SearchConfig};
use poisson_core::quantize::derivation::{
    inner_derivation, inner_derivation_witness, quantized_derivation,
};
use poisson_core::quantize::lift::{conjugation_holds, lift_log_hamiltonian, twist_is_inner};
use poisson_core::quantize::star::{sample_poly, seeded_rng, StarProvider};
use poisson_core::quantize::{exp_derivation, CrossedAlgebra, QuantDerivation};
use poisson_core::{CoordinateRing, HPoly, Poly, Ring};
use proptest::prelude::*;
use rand::Rng;

fn hbar_term(p: Poly, idx: &[usize], order: usize) -> PolyVector {
    PolyVector::term(HPoly::monomial(p, 1, order), idx).unwrap()
}

fn structure(pi: PolyVector) -> PoissonStructure {
    PoissonStructure::certified(pi).unwrap()
}

fn moyal(order: usize, laurent: bool) -> StarProvider {
    let r = if laurent {
        CoordinateRing::new(&["x", "y"], &["x", "y"]).unwrap()
    } else {
        CoordinateRing::polynomial(&["x", "y"]).unwrap()
    };
    StarProvider::moyal(&structure(hbar_term(Poly::one(&r), &[0, 1], order)), order).unwrap()
}

fn ax_b(order: usize) -> StarProvider {
    let r = CoordinateRing::polynomial(&["x", "y"]).unwrap();
    StarProvider::universal2(
        &structure(hbar_term(Poly::var(&r, 1), &[0, 1], order)),
        order,
        11,
    )
    .unwrap()
}

fn constant3(order: usize) -> StarProvider {
    let r = CoordinateRing::polynomial(&["x", "y", "z"]).unwrap();
    let pi =
        hbar_term(Poly::one(&r), &[0, 1], order).add(&hbar_term(Poly::one(&r), &[1, 2], order));
    StarProvider::universal2(&structure(pi), order, 11).unwrap()
}

fn sample(s: &StarProvider, rng: &mut impl Rng) -> HPoly {
    let r = s.ring();
    HPoly::from_coeffs(
        &Poly::zero(r),
        vec![sample_poly(r, rng, 3, 3), sample_poly(r, rng, 2, 2)],
        s.order(),
    )
}

/// A random leading-order Poisson field of weight in `-1..=1`, times ħ.
fn random_poisson_field(s: &StarProvider, rng: &mut impl Rng) -> PolyVector {
    let r = s.ring().clone();
    let cfg = SearchConfig::default();
    let mut w = PolyVector::zero(&r, 1, s.order());
    for weight in -1..=1 {
        for b in poisson_vector_fields(s.poisson(), weight, &cfg).unwrap() {
            let c = BigRational::from_integer(rng.gen_range(-2i64..=2).into());
            w = w.add(
                &b.with_order(s.order())
                    .mul_fn(&HPoly::hbar(&r, s.order()))
                    .scale(&c),
            );
        }
    }
    w
}

fn derivation(s: &StarProvider, w: &PolyVector) -> QuantDerivation {
    quantized_derivation(w, s, &SearchConfig::default())
        .unwrap()
        .into_found()
        .expect("derivation correction obstructed")
}

fn associator(s: &StarProvider, a: &HPoly, b: &HPoly, c: &HPoly) -> HPoly {
    let l = s.star(&s.star(a, b).unwrap(), c).unwrap();
    let r = s.star(a, &s.star(b, c).unwrap()).unwrap();
    l.sub(&r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn star_products_are_associative(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        for s in [moyal(4, false), ax_b(2), constant3(2)] {
            let (a, b, c) = (sample(&s, &mut rng), sample(&s, &mut rng), sample(&s, &mut rng));
            prop_assert!(associator(&s, &a, &b, &c).is_zero());
            prop_assert_eq!(s.star(&a, &HPoly::one(s.ring(), s.order())).unwrap(), a.truncate(s.order()));
        }
    }

    #[test]
    fn commutators_start_with_the_bracket(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        for s in [moyal(3, true), ax_b(2)] {
            let a = sample_poly(s.ring(), &mut rng, 3, 3);
            let b = sample_poly(s.ring(), &mut rng, 3, 3);
            let c = s.commutator(&s.lift(&a).unwrap(), &s.lift(&b).unwrap()).unwrap();
            prop_assert!(c.coeff(0).is_zero());
            prop_assert_eq!(c.coeff(1), &s.bracket(&a, &b));
        }
    }

    #[test]
    fn quantized_derivations_satisfy_leibniz(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        for s in [moyal(3, false), ax_b(2)] {
            let w = random_poisson_field(&s, &mut rng);
            let d = derivation(&s, &w);
            let (a, b) = (sample(&s, &mut rng), sample(&s, &mut rng));
            prop_assert!(d.leibniz_defect(&a, &b).unwrap().is_zero());
            let leading = d.apply(&a).unwrap().coeff_or_zero(1);
            prop_assert_eq!(leading, w.hbar_coeff(1).apply(&a.truncate(0)).unwrap().coeff(0).clone());
            let lhs = exp_derivation(&d, &s.star(&a, &b).unwrap()).unwrap();
            let rhs = s.star(&exp_derivation(&d, &a).unwrap(), &exp_derivation(&d, &b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn derivation_commutators_agree_up_to_inner(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let s = moyal(3, true);
        let w1 = random_poisson_field(&s, &mut rng);
        let w2 = random_poisson_field(&s, &mut rng);
        let (d1, d2) = (derivation(&s, &w1), derivation(&s, &w2));
        let d12 = derivation(&s, &schouten(&w1, &w2).unwrap());
        let delta = |a: &HPoly| -> poisson_core::Result<HPoly> {
            let x = d1.apply(&d2.apply(a)?)?;
            let y = d2.apply(&d1.apply(a)?)?;
            Ok(x.sub(&y).sub(&d12.apply(a)?))
        };
        let g = inner_derivation_witness(&s, delta, &SearchConfig::default())
            .unwrap()
            .into_found()
            .expect("no inner witness");
        let a = sample(&s, &mut rng);
        let residual = delta(&a).unwrap().sub(&inner_derivation(&s, &g, &a).unwrap().truncate(s.order()));
        let before = delta(&a).unwrap().valuation();
        prop_assert!(before.is_none_or(|v| v >= 2));
        prop_assert!(residual.valuation().is_none_or(|v| before.is_some_and(|b| v > b)));
    }

    #[test]
    fn laurent_units_lift(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let s = moyal(2, true);
        let r = s.ring().clone();
        let exps = [rng.gen_range(-1..=1), rng.gen_range(-1..=1)];
        let lead = Poly::monomial(&r, &exps, BigRational::from_integer(rng.gen_range(1i64..=3).into())).unwrap();
        let f = HPoly::from_coeffs(&lead, vec![lead.clone(), sample_poly(&r, &mut rng, 1, 2)], 2);
        let lift = lift_log_hamiltonian(&s, &f, &SearchConfig::default()).unwrap().into_found().expect("lift obstructed");
        prop_assert_eq!(lift.unit.coeff(0), f.coeff(0));
        let d = lift.derivation.clone();
        prop_assert!(conjugation_holds(&s, &move |a: &HPoly| d.exp_power(1, a), &lift.unit).unwrap());
    }

    #[test]
    fn log_hamiltonian_twists_are_inner(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let s = moyal(2, true);
        let r = s.ring().clone();
        let w = random_poisson_field(&s, &mut rng);
        let exps = [rng.gen_range(-1..=1), rng.gen_range(-1..=1)];
        let f = HPoly::from_poly(Poly::monomial(&r, &exps, BigRational::from_integer(2.into())).unwrap(), 2);
        let report = twist_is_inner(&s, &w, &f, &SearchConfig::default()).unwrap();
        prop_assert!(report.verified, "{:?}", report);
    }

    #[test]
    fn crossed_product_laws(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let s = if seed % 2 == 0 { moyal(2, false) } else { ax_b(2) };
        let alg = CrossedAlgebra::new(derivation(&s, &random_poisson_field(&s, &mut rng)));
        let (a, b, c) = (alg.sample(&mut rng), alg.sample(&mut rng), alg.sample(&mut rng));
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
        prop_assert_eq!(alg.one().mul(&a).unwrap(), a.clone());
        prop_assert_eq!(a.mul(&alg.one()).unwrap(), a.clone());
        let lhs = alg.euler(&a.mul(&b).unwrap());
        let rhs = alg.euler(&a).mul(&b).unwrap().try_add(&a.mul(&alg.euler(&b)).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        let x = sample(&s, &mut rng);
        let conj = alg.t_power(1).mul(&alg.monomial(x.clone(), 0)).unwrap().mul(&alg.t_power(-1)).unwrap();
        prop_assert_eq!(conj, alg.monomial(alg.phi(1, &x).unwrap(), 0));
    }
}

#[test]
fn ax_b_modular_automorphism_shifts_x() {
    let s = ax_b(2);
    let r: Ring = s.ring().clone();
    let omega = poisson_core::DiffForm::term(HPoly::one(&r, 2), &[0, 1]).unwrap();
    let report = poisson_core::quantize::modular_automorphism_candidate(
        &s,
        &omega,
        None,
        &SearchConfig::default(),
        5,
        10,
    )
    .unwrap();
    assert_eq!(report.modular_field, "-h*Dx");
    assert!(report.automorphism_law);
    let (name, image) = &report.generator_images[0];
    assert_eq!((name.as_str(), image.as_str()), ("x", "x - h"));
    assert_eq!(report.generator_images[1].1, "y");
}
