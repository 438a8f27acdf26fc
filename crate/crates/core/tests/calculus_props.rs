//! Randomized checks of the Cartan calculus identities.
//!
//! Graded commutators use the operator degrees `deg i_γ = -k`,
//! `deg L_γ = 1 - k` and `deg d = 1` for a k-vector `γ`.

use num_rational::BigRational;
use poisson_core::calculus::{contract, de_rham, lie_derivative, schouten, DiffForm, PolyVector};
use poisson_core::{CoordinateRing, HPoly, Poly, Ring};
use proptest::prelude::*;

fn ring() -> Ring {
    CoordinateRing::new(&["x", "y", "z"], &["z"]).unwrap()
}

type Term = (Vec<i32>, i64);

fn poly_terms() -> impl Strategy<Value = Vec<Term>> {
    prop::collection::vec(
        (
            (0i32..3, 0i32..3, -2i32..3).prop_map(|(a, b, c)| vec![a, b, c]),
            -3i64..4,
        ),
        0..3,
    )
}

fn build_poly(r: &Ring, terms: &[Term]) -> HPoly {
    let mut p = Poly::zero(r);
    for (e, c) in terms {
        p = p + Poly::monomial(r, e, BigRational::from_integer((*c).into())).unwrap();
    }
    HPoly::from_poly(p, 0)
}

fn subsets(k: usize) -> Vec<Vec<usize>> {
    (0u32..8)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..3).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn element<K: poisson_core::calculus::Kind>(
    r: &Ring,
    k: usize,
    parts: &[Vec<Term>],
) -> poisson_core::calculus::Graded<K> {
    let mut out = poisson_core::calculus::Graded::<K>::zero(r, k, 0);
    for (idx, terms) in subsets(k).iter().zip(parts) {
        let t = poisson_core::calculus::Graded::<K>::term(build_poly(r, terms), idx).unwrap();
        out = out.add(&t);
    }
    out
}

fn graded(max_degree: usize) -> impl Strategy<Value = (usize, Vec<Vec<Term>>)> {
    (0..=max_degree, prop::collection::vec(poly_terms(), 3))
}

fn pv((k, parts): &(usize, Vec<Vec<Term>>)) -> PolyVector {
    element(&ring(), *k, parts)
}

fn form((k, parts): &(usize, Vec<Vec<Term>>)) -> DiffForm {
    element(&ring(), *k, parts)
}

fn sign(e: i64) -> BigRational {
    BigRational::from_integer(if e.rem_euclid(2) == 0 { 1 } else { -1 }.into())
}

fn same(a: &DiffForm, b: &DiffForm) -> bool {
    a.sub(b).is_zero() || (a.is_zero() && b.is_zero())
}

fn same_pv(a: &PolyVector, b: &PolyVector) -> bool {
    (a.is_zero() && b.is_zero()) || a.sub(b).is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(a in graded(3)) {
        let alpha = form(&a);
        prop_assert!(de_rham(&de_rham(&alpha)).is_zero());
    }

    #[test]
    fn schouten_is_graded_antisymmetric(a in graded(3), b in graded(3)) {
        let (a, b) = (pv(&a), pv(&b));
        let lhs = schouten(&a, &b).unwrap();
        let rhs = schouten(&b, &a)
            .unwrap()
            .scale(&-sign(a.shifted_degree() * b.shifted_degree()));
        prop_assert!(same_pv(&lhs, &rhs));
    }

    #[test]
    fn schouten_satisfies_graded_jacobi(a in graded(2), b in graded(2), c in graded(2)) {
        let (a, b, c) = (pv(&a), pv(&b), pv(&c));
        let lhs = schouten(&a, &schouten(&b, &c).unwrap()).unwrap();
        let r1 = schouten(&schouten(&a, &b).unwrap(), &c).unwrap();
        let r2 = schouten(&b, &schouten(&a, &c).unwrap())
            .unwrap()
            .scale(&sign(a.shifted_degree() * b.shifted_degree()));
        prop_assert!(same_pv(&lhs, &r1.add(&r2)));
    }

    #[test]
    fn contraction_bracket_identity(a in graded(3), b in graded(3), f in graded(3)) {
        // [i_a, L_b] = i_{[a, b]}
        let (a, b, alpha) = (pv(&a), pv(&b), form(&f));
        let ka = a.degree() as i64;
        let kb = b.degree() as i64;
        let lhs = contract(&a, &lie_derivative(&b, &alpha).unwrap()).unwrap();
        let back = lie_derivative(&b, &contract(&a, &alpha).unwrap())
            .unwrap()
            .scale(&sign(ka * (1 - kb)));
        let rhs = contract(&schouten(&a, &b).unwrap(), &alpha).unwrap();
        prop_assert!(same(&lhs.sub(&back), &rhs));
    }

    #[test]
    fn lie_derivatives_form_a_representation(a in graded(2), b in graded(2), f in graded(3)) {
        // [L_a, L_b] = L_{[a, b]}
        let (a, b, alpha) = (pv(&a), pv(&b), form(&f));
        let ka = a.degree() as i64;
        let kb = b.degree() as i64;
        let ab = lie_derivative(&a, &lie_derivative(&b, &alpha).unwrap()).unwrap();
        let ba = lie_derivative(&b, &lie_derivative(&a, &alpha).unwrap())
            .unwrap()
            .scale(&sign((1 - ka) * (1 - kb)));
        let rhs = lie_derivative(&schouten(&a, &b).unwrap(), &alpha).unwrap();
        prop_assert!(same(&ab.sub(&ba), &rhs));
    }

    #[test]
    fn lie_derivative_commutes_with_d(a in graded(3), f in graded(3)) {
        // [d, L_a] = 0
        let (a, alpha) = (pv(&a), form(&f));
        let ka = a.degree() as i64;
        let lhs = de_rham(&lie_derivative(&a, &alpha).unwrap());
        let rhs = lie_derivative(&a, &de_rham(&alpha))
            .unwrap()
            .scale(&sign(1 - ka));
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn wedge_and_d_satisfy_leibniz(a in graded(2), b in graded(2)) {
        let (a, b) = (form(&a), form(&b));
        let lhs = de_rham(&a.wedge(&b).unwrap());
        let rhs = de_rham(&a)
            .wedge(&b)
            .unwrap()
            .add(&a.wedge(&de_rham(&b)).unwrap().scale(&sign(a.degree() as i64)));
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn schouten_is_a_graded_derivation_of_wedge(a in graded(2), b in graded(2), c in graded(2)) {
        // [a, b ∧ c] = [a, b] ∧ c + (-1)^{|a| deg b} b ∧ [a, c]
        let (a, b, c) = (pv(&a), pv(&b), pv(&c));
        let lhs = schouten(&a, &b.wedge(&c).unwrap()).unwrap();
        let r1 = schouten(&a, &b).unwrap().wedge(&c).unwrap();
        let r2 = b
            .wedge(&schouten(&a, &c).unwrap())
            .unwrap()
            .scale(&sign(a.shifted_degree() * b.degree() as i64));
        prop_assert!(same_pv(&lhs, &r1.add(&r2)));
    }
}
