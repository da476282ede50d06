//! Property tests for the graded algebra laws: Koszul commutativity,
//! associativity, the Leibniz rule, the contraction homotopy and the Jacobi
//! identity for derivation commutators.

use algebroid_core::derivation::{delta, delta_inv, Derivation, Parity};
use algebroid_core::element::Element;
use algebroid_core::generator::Gen;
use algebroid_core::poly::BasePoly;
use algebroid_core::scalar::int;

use proptest::prelude::*;

const DIM: usize = 2;
const RANK: usize = 2;

fn arb_gen() -> impl Strategy<Value = Gen> {
    prop_oneof![
        (0..DIM as u16).prop_map(Gen::Dx),
        (0..DIM as u16).prop_map(Gen::Y),
        (0..DIM as u16).prop_map(Gen::Dy),
        (0..RANK as u16).prop_map(Gen::V),
        (0..RANK as u16).prop_map(Gen::Dv),
    ]
}

fn arb_poly() -> impl Strategy<Value = BasePoly> {
    proptest::collection::vec(((0u16..3, 0u16..3), -4i64..5), 0..3).prop_map(|terms| {
        let mut p = BasePoly::zero(DIM);
        for ((e1, e2), c) in terms {
            if c != 0 {
                p = &p + &BasePoly::monomial(DIM, &[(0, e1), (1, e2)], int(c));
            }
        }
        p
    })
}

fn arb_element() -> impl Strategy<Value = Element> {
    proptest::collection::vec((arb_poly(), proptest::collection::vec(arb_gen(), 0..4)), 0..4)
        .prop_map(|terms| {
            let mut e = Element::zero(DIM);
            for (p, word) in terms {
                e.add_assign(&Element::monomial(p, &word));
            }
            e
        })
}

fn word_parity(e: &Element) -> Option<bool> {
    let mut it = e.terms().map(|(w, _)| Element::word_is_odd(w));
    let first = it.next()?;
    it.all(|p| p == first).then_some(first)
}

fn arb_derivation() -> impl Strategy<Value = Derivation> {
    // odd derivation with small random images and optional exterior base action
    (
        proptest::collection::vec((arb_gen(), arb_element()), 0..3),
        any::<bool>(),
    )
        .prop_map(|(images, with_base)| {
            let mut d = Derivation::new(DIM, Parity::Odd);
            for (g, img) in images {
                // keep the derivation parity-homogeneous: an odd derivation
                // must send a generator to the opposite parity
                let want_odd = !g.is_odd();
                let img = img.filter(|w| Element::word_is_odd(w) == want_odd);
                let mut acc = d.image(g);
                acc.add_assign(&img);
                d.set_image(g, acc);
            }
            if with_base {
                let base: Vec<Element> = (0..DIM as u16).map(|i| Element::gen(DIM, Gen::Dx(i))).collect();
                d = d.with_base(base);
            }
            d
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn multiplication_graded_commutative(a in arb_element(), b in arb_element()) {
        let ab = &a * &b;
        let ba = &b * &a;
        if let (Some(pa), Some(pb)) = (word_parity(&a), word_parity(&b)) {
            let expect = if pa && pb { -&ba } else { ba };
            prop_assert_eq!(ab, expect);
        } else {
            // mixed parity: check homogeneous components separately
            for odd in [false, true] {
                for odd2 in [false, true] {
                    let ah = a.filter(|w| Element::word_is_odd(w) == odd);
                    let bh = b.filter(|w| Element::word_is_odd(w) == odd2);
                    let lhs = &ah * &bh;
                    let rhs = &bh * &ah;
                    let rhs = if odd && odd2 { -&rhs } else { rhs };
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn multiplication_associative(a in arb_element(), b in arb_element(), c in arb_element()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn derivation_leibniz(d in arb_derivation(), a in arb_element(), b in arb_element()) {
        let lhs = d.apply(&(&a * &b));
        // split a into parity-homogeneous parts for the sign
        let mut rhs = Element::zero(DIM);
        for odd in [false, true] {
            let ah = a.filter(|w| Element::word_is_odd(w) == odd);
            if ah.is_zero() {
                continue;
            }
            rhs.add_assign(&(&d.apply(&ah) * &b));
            let t = &ah * &d.apply(&b);
            rhs.add_assign(&(if odd { -&t } else { t }));
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn homotopy_identity(e in arb_element()) {
        let dl = delta(DIM, DIM);
        let pq_pos = e.filter(|w| {
            Element::word_form_degree(w) + Element::word_y_degree(w) > 0
        });
        let back = &dl.apply(&delta_inv(&pq_pos)) + &delta_inv(&dl.apply(&pq_pos));
        prop_assert_eq!(back, pq_pos);
    }

    #[test]
    fn commutator_is_operator_bracket(d1 in arb_derivation(), d2 in arb_derivation(), e in arb_element()) {
        let comm = d1.commutator(&d2);
        // both odd: anticommutator
        let direct = &d1.apply(&d2.apply(&e)) + &d2.apply(&d1.apply(&e));
        prop_assert_eq!(comm.apply(&e), direct);
    }

    #[test]
    fn jacobi_identity(d1 in arb_derivation(), d2 in arb_derivation(), d3 in arb_derivation()) {
        // odd derivations: [[d1,d2],d3] = [d1,[d2,d3]] + (-1)^{|d2||d3|}... for
        // all-odd inputs the graded Jacobi identity reads
        // [[d1,d2],d3] + [[d2,d3],d1] + [[d3,d1],d2] = 0 with the mixed
        // even/odd bracket handled by `commutator`.
        let a = d1.commutator(&d2).commutator(&d3);
        let b = d2.commutator(&d3).commutator(&d1);
        let c = d3.commutator(&d1).commutator(&d2);
        for g in [Gen::Y(0), Gen::Y(1), Gen::V(0), Gen::V(1), Gen::Dx(0)] {
            let mut s = a.image(g);
            s.add_assign(&b.image(g));
            s.add_assign(&c.image(g));
            prop_assert!(s.is_zero(), "Jacobi fails on {:?}", g);
        }
    }
}
