//! Randomized checks for modular fields, log-Hamiltonian fields and the
//! Lichnerowicz differentials.

use num_rational::BigRational;
use poisson_core::calculus::{lie_derivative, schouten, DiffForm, PolyVector};
use poisson_core::poisson::{
    hamiltonian_field, koszul_differential, lichnerowicz, log_hamiltonian_decompose,
    log_hamiltonian_field, modular_vector_field, poisson_vector_fields, solve_hamiltonian,
    unimodularity_witness, PoissonStructure, SearchConfig,
};
use poisson_core::quantize::star::{sample_poly, seeded_rng};
use poisson_core::{CoordinateRing, HPoly, Poly, Ring};
use proptest::prelude::*;
use rand::Rng;

const ORDER: usize = 2;

fn hbar_term(p: Poly, idx: &[usize]) -> PolyVector {
    PolyVector::term(HPoly::monomial(p, 1, ORDER), idx).unwrap()
}

fn bank() -> Vec<PoissonStructure> {
    let plane = CoordinateRing::new(&["x", "y"], &["y"]).unwrap();
    let space = CoordinateRing::new(&["x", "y", "z"], &["z"]).unwrap();
    let v = |r: &Ring, i| Poly::var(r, i);
    let so3 = hbar_term(v(&space, 2), &[0, 1])
        .add(&hbar_term(v(&space, 0), &[1, 2]))
        .add(&hbar_term(v(&space, 1), &[2, 0]));
    [
        hbar_term(Poly::one(&plane), &[0, 1]),
        hbar_term(v(&plane, 1), &[0, 1]),
        so3,
    ]
    .into_iter()
    .map(|pi| PoissonStructure::certified(pi).unwrap())
    .collect()
}

fn random_unit(r: &Ring, rng: &mut impl Rng) -> HPoly {
    let exps: Vec<i32> = (0..r.nvars())
        .map(|i| {
            if r.is_invertible(i) {
                rng.gen_range(-2..=2)
            } else {
                0
            }
        })
        .collect();
    let c = loop {
        let c = rng.gen_range(-3i64..=3);
        if c != 0 {
            break c;
        }
    };
    let lead = Poly::monomial(r, &exps, BigRational::from_integer(c.into())).unwrap();
    HPoly::from_coeffs(
        &lead,
        vec![
            lead.clone(),
            sample_poly(r, rng, 2, 2),
            sample_poly(r, rng, 1, 2),
        ],
        ORDER,
    )
}

fn random_function(r: &Ring, rng: &mut impl Rng) -> HPoly {
    HPoly::from_coeffs(
        &Poly::zero(r),
        (0..=ORDER).map(|_| sample_poly(r, rng, 2, 3)).collect(),
        ORDER,
    )
}

fn random_polyvector(r: &Ring, k: usize, rng: &mut impl Rng) -> PolyVector {
    let mut out = PolyVector::zero(r, k, ORDER);
    let n = r.nvars();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            out = out.add(&PolyVector::term(random_function(r, rng), &idx).unwrap());
        }
    }
    out
}

fn random_form(r: &Ring, k: usize, rng: &mut impl Rng) -> DiffForm {
    let mut out = DiffForm::zero(r, k, ORDER);
    let n = r.nvars();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            out = out.add(&DiffForm::term(random_function(r, rng), &idx).unwrap());
        }
    }
    out
}

fn volume(r: &Ring) -> DiffForm {
    let idx: Vec<usize> = (0..r.nvars()).collect();
    DiffForm::term(HPoly::one(r, ORDER), &idx).unwrap()
}

fn pick(seed: u64) -> (PoissonStructure, rand_chacha::ChaCha8Rng) {
    let b = bank();
    let pi = b[(seed % b.len() as u64) as usize].clone();
    (pi, seeded_rng(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn lichnerowicz_squares_to_zero(seed in any::<u64>(), k in 0usize..3) {
        let (pi, mut rng) = pick(seed);
        let gamma = random_polyvector(pi.ring(), k, &mut rng);
        let twice = lichnerowicz(&pi, &lichnerowicz(&pi, &gamma).unwrap()).unwrap();
        prop_assert!(twice.is_zero());
    }

    #[test]
    fn koszul_squares_to_zero(seed in any::<u64>(), k in 1usize..4) {
        let (pi, mut rng) = pick(seed);
        let k = k.min(pi.ring().nvars());
        let alpha = random_form(pi.ring(), k, &mut rng);
        let twice = koszul_differential(&pi, &koszul_differential(&pi, &alpha).unwrap()).unwrap();
        prop_assert!(twice.is_zero());
        let direct = lie_derivative(pi.pi(), &lie_derivative(pi.pi(), &alpha).unwrap()).unwrap();
        prop_assert!(direct.is_zero());
    }

    #[test]
    fn modular_fields_are_poisson_and_covariant(seed in any::<u64>()) {
        let (pi, mut rng) = pick(seed);
        let r = pi.ring().clone();
        let u = random_unit(&r, &mut rng);
        let omega = volume(&r).mul_fn(&u);
        let v = modular_vector_field(&pi, &omega).unwrap();
        prop_assert!(schouten(pi.pi(), &v).unwrap().is_zero());
        let f = random_unit(&r, &mut rng);
        let moved = modular_vector_field(&pi, &omega.mul_fn(&f)).unwrap();
        let expected = v.sub(&log_hamiltonian_field(&pi, &f).unwrap());
        prop_assert_eq!(moved, expected);
    }

    #[test]
    fn log_hamiltonian_fields_form_a_lattice(seed in any::<u64>(), n in -2i64..3, m in -2i64..3) {
        let (pi, mut rng) = pick(seed);
        let r = pi.ring().clone();
        let f1 = random_unit(&r, &mut rng);
        let f2 = random_unit(&r, &mut rng);
        let combined = f1.powi(n).unwrap().mul(&f2.powi(m).unwrap());
        let lhs = log_hamiltonian_field(&pi, &combined).unwrap();
        let int = |k: i64| BigRational::from_integer(k.into());
        let rhs = log_hamiltonian_field(&pi, &f1).unwrap().scale(&int(n))
            .add(&log_hamiltonian_field(&pi, &f2).unwrap().scale(&int(m)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn poisson_bracket_with_log_hamiltonian_is_hamiltonian(seed in any::<u64>(), weight in -1i64..2) {
        let (pi, mut rng) = pick(seed);
        let r = pi.ring().clone();
        let cfg = SearchConfig::default();
        let basis = poisson_vector_fields(&pi, weight, &cfg).unwrap();
        let mut w1 = PolyVector::zero(&r, 1, ORDER);
        for b in &basis {
            let c = BigRational::from_integer(rng.gen_range(-2i64..=2).into());
            w1 = w1.add(&b.with_order(ORDER).mul_fn(&HPoly::hbar(&r, ORDER)).scale(&c));
        }
        prop_assert!(schouten(pi.pi(), &w1).unwrap().is_zero());
        let f = random_unit(&r, &mut rng);
        let w2 = log_hamiltonian_field(&pi, &f).unwrap();
        let bracket = schouten(&w1, &w2).unwrap();
        let witness = w1.apply(&f).unwrap().mul(&f.unit_inverse().unwrap());
        prop_assert_eq!(&hamiltonian_field(&pi, &witness).unwrap(), &bracket);
        prop_assert!(solve_hamiltonian(&pi, &bracket, &cfg).unwrap().is_found());
    }

    #[test]
    fn exponentials_have_hamiltonian_log_fields(seed in any::<u64>()) {
        let (pi, mut rng) = pick(seed);
        let r = pi.ring().clone();
        let g = random_function(&r, &mut rng).shift_hbar(1);
        let f = g.exp().unwrap();
        prop_assert_eq!(
            log_hamiltonian_field(&pi, &f).unwrap(),
            hamiltonian_field(&pi, &g).unwrap()
        );
    }
}

#[test]
fn witness_exists_iff_modular_field_decomposes() {
    let cfg = SearchConfig::default();
    let polynomial_plane = CoordinateRing::polynomial(&["x", "y"]).unwrap();
    let mut cases = bank();
    cases.push(
        PoissonStructure::certified(hbar_term(Poly::var(&polynomial_plane, 1), &[0, 1])).unwrap(),
    );
    cases.push(
        PoissonStructure::certified(hbar_term(Poly::one(&polynomial_plane), &[0, 1])).unwrap(),
    );
    for pi in cases {
        let omega = volume(pi.ring());
        let v = modular_vector_field(&pi, &omega).unwrap();
        let decomposes = log_hamiltonian_decompose(&pi, &v, &cfg).unwrap().is_found();
        let witness = unimodularity_witness(&pi, &omega, &cfg).unwrap().is_found();
        assert_eq!(decomposes, witness, "{}", pi.pi());
    }
}
