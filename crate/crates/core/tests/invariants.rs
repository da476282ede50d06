//! Structural invariants beyond the acceptance criteria: retraction
//! identities, flat sections, the basic-curvature identity for the torsion
//! bracket, the equivalence between tensor-level axioms and nilpotency, gauge
//! independence of the Bianchi verdict, and solver determinism.

use algebroid_core::algebroid::{basic_connections, check_anchor, check_bianchi};
use algebroid_core::atiyah::{homotopy, iota, weil_project, LiftedState};
use algebroid_core::derivation::{delta, delta_inv};
use algebroid_core::element::Element;
use algebroid_core::fedosov::{check_nilpotency, RecursionState, Sector};
use algebroid_core::generator::Gen;
use algebroid_core::geometry::{Gauge, GeometrySpec, Tens};
use algebroid_core::poly::BasePoly;
use algebroid_core::scalar::frac;

fn affine_r2_spec() -> GeometrySpec {
    let mut spec = GeometrySpec::zeros(2, 2);
    let nv = spec.nvars();
    let x1 = BasePoly::var(nv, 0);
    let x2 = BasePoly::var(nv, 1);
    spec.set_rho(0, 0, -&x1);
    spec.set_rho(0, 1, BasePoly::one(nv));
    spec.set_gamma(0, 0, 1, x2.clone());
    spec.set_gamma(1, 1, 1, x1.clone());
    spec.set_gamma_prime(0, 0, 1, x1.clone());
    spec.set_gamma_prime(1, 1, 0, x2.clone());
    spec.set_gamma_prime(1, 0, 1, BasePoly::one(nv));
    spec.cstruct.set(&[1, 0, 1], BasePoly::one(nv));
    spec.cstruct.set(&[1, 1, 0], BasePoly::int(nv, -1));
    spec.derive_mu();
    spec.validate().unwrap();
    spec
}

fn sample_elements(nv: usize) -> Vec<Element> {
    let x1 = BasePoly::var(nv, 0);
    vec![
        Element::one(nv),
        Element::gen(nv, Gen::Dx(0)),
        Element::monomial(x1.clone(), &[Gen::Y(0), Gen::V(0)]),
        Element::monomial(BasePoly::one(nv), &[Gen::Dx(0), Gen::Y(1), Gen::Dy(0)]),
        Element::monomial(x1, &[Gen::Dx(0), Gen::Dx(1), Gen::Y(0), Gen::Dv(0)]),
        Element::monomial(BasePoly::var(nv, 1), &[Gen::Dy(1), Gen::V(0), Gen::Dv(1)]),
    ]
}

/// Lemma-level retraction identities for the unperturbed contraction.
#[test]
fn retraction_identities() {
    let nv = 2;
    let dl = delta(nv, 2);
    let proj = weil_project;
    for e in sample_elements(nv) {
        // p0 iota0 = id on the Weil sector
        let w = proj(&e);
        assert_eq!(proj(&w), w);
        // iota0 p0 = id - delta delta_inv - delta_inv delta
        let lhs = proj(&e);
        let rhs = &(&e - &dl.apply(&delta_inv(&e))) - &delta_inv(&dl.apply(&e));
        assert_eq!(lhs, rhs, "retraction identity fails");
        // delta_inv iota0 = 0 (Weil elements carry no dx)
        assert!(delta_inv(&w).is_zero());
        // p0 delta_inv = 0 (the contraction introduces a y)
        assert!(proj(&delta_inv(&e)).is_zero());
        // (delta_inv)^2 = 0
        assert!(delta_inv(&delta_inv(&e)).is_zero());
    }
}

/// The perturbed homotopy contracts the horizontal complex away from the
/// flat sections: d_par h + h d_par = iota p - id.
#[test]
fn perturbed_homotopy_contracts() {
    let spec = affine_r2_spec();
    let state = RecursionState::solve(&spec, 5).unwrap();
    let lift = LiftedState::new(&state);
    let d_par = lift.d_par();
    let y_cap = 7;
    let bound = 2usize;
    for e in sample_elements(spec.nvars()) {
        let lhs = &d_par.apply(&homotopy(&lift, &e, y_cap))
            + &homotopy(&lift, &d_par.apply(&e), y_cap);
        let rhs = &iota(&lift, &weil_project(&e), y_cap) - &e;
        let diff = &lhs - &rhs;
        assert!(
            diff.truncate_weight(bound).is_zero(),
            "homotopy relation fails on a sample element"
        );
    }
}

/// Flat sections: the embedding is annihilated by the horizontal
/// differential and reproduces the quadratic-order expansions.
#[test]
fn flat_sections() {
    let spec = affine_r2_spec();
    let nv = spec.nvars();
    let state = RecursionState::solve(&spec, 5).unwrap();
    let lift = LiftedState::new(&state);
    let d_par = lift.d_par();
    let y_cap = 6;

    // (delta + d_{>=1}) iota(f) = 0 to the asserted weight; iota(f) - f has
    // y-degree >= 1
    for g in [Gen::Dy(0), Gen::V(1), Gen::Dv(0), Gen::Dv(1)] {
        let f = Element::gen(nv, g);
        let emb = iota(&lift, &f, y_cap);
        assert!((&emb - &f)
            .terms()
            .all(|(w, _)| Element::word_y_degree(w) >= 1));
        let res = d_par.apply(&emb);
        assert!(
            res.truncate_y(y_cap.saturating_sub(state.cutoff)).is_zero(),
            "iota({g:?}) is not horizontally flat"
        );
    }

    // expansions to linear order in y:
    //   iota(f)      = f - d_i f y^i + O(y^2)
    //   iota(v^a)    = v^a + Gamma'^a_{jb} y^j v^b + O(y^2)
    //   iota(Dy^i)   = Dy^i + Gamma^i_{jk} y^j Dy^k + O(y^2)
    let f = Element::from_poly(BasePoly::var(nv, 0));
    let emb = iota(&lift, &f, y_cap);
    let lin = emb.filter(|w| Element::word_y_degree(w) == 1);
    assert_eq!(lin, -&Element::gen(nv, Gen::Y(0)));

    for a in 0..2u16 {
        let emb = iota(&lift, &Element::gen(nv, Gen::V(a)), y_cap);
        let lin = emb.filter(|w| Element::word_y_degree(w) == 1);
        let mut expect = Element::zero(nv);
        for j in 0..2 {
            for b in 0..2 {
                expect.add_assign(&Element::monomial(
                    spec.gamma_prime.get(&[a as usize, j, b]).clone(),
                    &[Gen::Y(j as u16), Gen::V(b as u16)],
                ));
            }
        }
        assert_eq!(lin, expect, "iota(v{}) linear order", a + 1);
    }
    for i in 0..2u16 {
        let emb = iota(&lift, &Element::gen(nv, Gen::Dy(i)), y_cap);
        let lin = emb.filter(|w| Element::word_y_degree(w) == 1);
        let mut expect = Element::zero(nv);
        for j in 0..2 {
            for k in 0..2 {
                expect.add_assign(&Element::monomial(
                    spec.gamma.get(&[i as usize, j, k]).clone(),
                    &[Gen::Y(j as u16), Gen::Dy(k as u16)],
                ));
            }
        }
        assert_eq!(lin, expect, "iota(Dy{}) linear order", i + 1);
    }
    // iota(Dv^a) quadratic data: the y Dy v term carries half the curvature
    for a in 0..2usize {
        let emb = iota(&lift, &Element::gen(nv, Gen::Dv(a as u16)), y_cap);
        let rp = spec.curvature_prime();
        let got = emb.filter(|w| {
            Element::word_y_degree(w) == 1 && Element::word_de_rham_degree(w) == 1 && Element::word_v_degree(w) == 1
        });
        let mut expect = Element::zero(nv);
        for m in 0..2 {
            for j in 0..2 {
                for b in 0..2 {
                    expect.add_assign(&Element::monomial(
                        rp.get(&[m, j, b, a]).scale(&frac(1, 2)),
                        &[Gen::Y(m as u16), Gen::Dy(j as u16), Gen::V(b as u16)],
                    ));
                }
            }
        }
        assert_eq!(got, expect, "iota(Dv{}) curvature term", a + 1);
    }
}

/// The torsion bracket at weight one equals the basic curvature with the
/// anchor-curvature corrections:
/// `mu_3^a_{jbc} = R^bas_{bcj}^a - 1/2 rho^k_b R'_{jkc}^a + 1/2 rho^k_c R'_{jkb}^a`.
#[test]
fn torsion_bracket_basic_curvature_identity() {
    let spec = affine_r2_spec();
    let nv = spec.nvars();
    let state = RecursionState::solve(&spec, 3).unwrap();
    let basic = basic_connections(&spec);
    let rp = spec.curvature_prime();
    let (d, r) = (2, 2);
    for a in 0..r {
        let img = state.d_mu[1].image(Gen::V(a as u16));
        let mut expect = Element::zero(nv);
        for j in 0..d {
            for b in 0..r {
                for c in 0..r {
                    let mut coeff = basic.rbas.get(&[b, c, j, a]).clone();
                    for k in 0..d {
                        coeff = &coeff
                            - &(spec.rho.get(&[k, b]) * rp.get(&[j, k, c, a])).scale(&frac(1, 2));
                        coeff = &coeff
                            + &(spec.rho.get(&[k, c]) * rp.get(&[j, k, b, a])).scale(&frac(1, 2));
                    }
                    expect.add_assign(&Element::monomial(
                        coeff.scale(&frac(1, 2)),
                        &[Gen::Y(j as u16), Gen::V(b as u16), Gen::V(c as u16)],
                    ));
                }
            }
        }
        assert_eq!(img, expect, "basic curvature identity for dmu_3(v{})", a + 1);
    }
}

/// The weight-one anchor bracket against the basic connection:
/// `check-nabla^bas_a d_j - nabla_{rho(a)} d_j = -rho_{1+1}(d_j, v_a)`.
#[test]
fn basic_connection_anchor_cross_check() {
    let spec = affine_r2_spec();
    let basic = basic_connections(&spec);
    let t = spec.rho11();
    for a in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let mut lhs = basic.chk.get(&[a, j, k]).clone();
                for i in 0..2 {
                    lhs = &lhs - &(spec.rho.get(&[i, a]) * spec.gamma.get(&[k, i, j]));
                }
                assert_eq!(lhs, -t.get(&[k, j, a]));
            }
        }
    }
}

/// Tensor axioms and vertical nilpotency agree in both directions across a
/// corpus of valid and invalid inputs.
#[test]
fn equivalence_of_axioms_and_nilpotency() {
    let valid = vec![affine_r2_spec(), GeometrySpec::zeros(2, 2)];
    let mut invalid = Vec::new();
    // anchor violation
    let mut bad_anchor = GeometrySpec::zeros(2, 2);
    let nv = bad_anchor.nvars();
    bad_anchor.set_rho(0, 0, BasePoly::one(nv));
    bad_anchor.set_rho(0, 1, BasePoly::var(nv, 0));
    bad_anchor.derive_cstruct();
    invalid.push(bad_anchor);
    // Jacobi violation
    let mut bad_jacobi = GeometrySpec::zeros(1, 3);
    let nv = bad_jacobi.nvars();
    bad_jacobi.set_mu(0, 0, 1, BasePoly::one(nv));
    bad_jacobi.set_mu(1, 1, 2, BasePoly::one(nv));
    bad_jacobi.set_mu(2, 2, 0, BasePoly::one(nv));
    bad_jacobi.derive_cstruct();
    invalid.push(bad_jacobi);

    for spec in &valid {
        assert!(check_anchor(spec).is_zero());
        assert!(check_bianchi(spec).is_zero());
        let state = RecursionState::solve(spec, 4).unwrap();
        assert!(check_nilpotency(&state, Sector::Vertical).pass());
    }
    for spec in &invalid {
        let axioms_ok = check_anchor(spec).is_zero() && check_bianchi(spec).is_zero();
        assert!(!axioms_ok);
        let state = RecursionState::solve(spec, 4).unwrap();
        assert!(!check_nilpotency(&state, Sector::Vertical).pass());
    }
}

/// Gauge tensors change the solved brackets but not the Bianchi verdict, and
/// the first failing weight of the violator is gauge-independent.
#[test]
fn bianchi_gauge_independence() {
    let mut bad = GeometrySpec::zeros(2, 3);
    let nv = bad.nvars();
    bad.set_mu(0, 0, 1, BasePoly::one(nv));
    bad.set_mu(1, 1, 2, BasePoly::one(nv));
    bad.set_mu(2, 2, 0, BasePoly::one(nv));
    bad.set_rho(0, 0, BasePoly::var(nv, 0));
    bad.derive_cstruct();
    let mut gauged = bad.clone();
    // the gauge term enters the torsion bracket through psi^a_{b j k} rho^k_c,
    // so pick entries pairing the nonzero anchor column with b != c
    let mut psi3 = Tens::zeros(&[3, 3, 2, 2], nv);
    psi3.set(&[0, 1, 0, 0], BasePoly::var(nv, 1));
    psi3.set(&[2, 1, 0, 0], BasePoly::one(nv));
    let mut psi = std::collections::BTreeMap::new();
    psi.insert(3usize, psi3);
    gauged.gauge = Gauge::Explicit {
        phi: std::collections::BTreeMap::new(),
        psi,
    };

    // tensor residual is identical (the formula has no gauge dependence)
    assert_eq!(check_bianchi(&bad), check_bianchi(&gauged));
    // the solved torsion towers differ, the verdict and first weight agree
    let s1 = RecursionState::solve(&bad, 4).unwrap();
    let s2 = RecursionState::solve(&gauged, 4).unwrap();
    assert_ne!(
        s1.d_mu[1].image(Gen::V(0)),
        s2.d_mu[1].image(Gen::V(0)),
        "psi gauge must move the weight-one torsion bracket"
    );
    let r1 = check_nilpotency(&s1, Sector::Vertical);
    let r2 = check_nilpotency(&s2, Sector::Vertical);
    assert_eq!(r1.pass(), r2.pass());
    assert_eq!(r1.first_nonzero_weight, r2.first_nonzero_weight);
}

/// Re-solving is bit-identical: the recursion is deterministic and unique.
#[test]
fn solver_determinism() {
    let spec = affine_r2_spec();
    let a = RecursionState::solve(&spec, 4).unwrap();
    let b = RecursionState::solve(&spec, 4).unwrap();
    for (da, db) in a.d_nabla.iter().zip(&b.d_nabla) {
        for i in 0..2u16 {
            assert_eq!(da.image(Gen::Y(i)), db.image(Gen::Y(i)));
        }
    }
    for (da, db) in a.d_mu.iter().zip(&b.d_mu) {
        for v in 0..2u16 {
            assert_eq!(da.image(Gen::V(v)), db.image(Gen::V(v)));
        }
    }
}
