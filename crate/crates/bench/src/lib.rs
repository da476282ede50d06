//! Shared fixtures for the engine benchmarks.

use algebroid_core::geometry::GeometrySpec;
use algebroid_core::poly::BasePoly;

/// Dense dim-2 / rank-2 input with polynomial tensors: a realistic worst case
/// for monomial expansion at desk scale.
pub fn dense_spec() -> GeometrySpec {
    let mut spec = GeometrySpec::zeros(2, 2);
    let nv = spec.nvars();
    let x1 = BasePoly::var(nv, 0);
    let x2 = BasePoly::var(nv, 1);
    let one = BasePoly::one(nv);
    spec.set_gamma(0, 0, 0, x1.clone());
    spec.set_gamma(0, 0, 1, x2.clone());
    spec.set_gamma(0, 1, 1, one.clone());
    spec.set_gamma(1, 0, 0, &x2 * &x2);
    spec.set_gamma(1, 0, 1, &one + &x1);
    spec.set_gamma(1, 1, 1, &x1 * &x2);
    spec.set_gamma_prime(0, 0, 0, x2.clone());
    spec.set_gamma_prime(0, 0, 1, x1.clone());
    spec.set_gamma_prime(1, 0, 0, &x1 * &x1);
    spec.set_gamma_prime(1, 1, 1, x2.clone());
    spec.set_rho(0, 0, x2.clone());
    spec.set_rho(0, 1, &one + &x1);
    spec.set_rho(1, 0, &x1 * &x2);
    spec.set_rho(1, 1, &x2 * &x2);
    spec.set_mu(0, 0, 1, x1);
    spec.set_mu(1, 0, 1, &one - &x2);
    spec.derive_cstruct();
    spec
}
