//! Atiyah class, Atiyah-Chern classes, transgression, the Weil algebra
//! differential, the modular class and the action-algebroid comparison.
//!
//! The de Rham complex of the structure algebra is realized by adjoining the
//! generators `Dy^i`, `Dv^a`. Every differential component lifts by the rule
//! `d(Dg) = -D(d(g))`, which makes the lifted differential anticommute with
//! the Kaehler differential `D`. The Atiyah matrix entry in row `beta`,
//! column `alpha` is `D` applied to the right polarization of the stored
//! image `d(s^beta)` with respect to `s^alpha`.
//!
//! Super-trace convention: trace over the tangent block minus trace over the
//! bundle block.

use crate::chart::Chart;
use crate::derivation::{delta_inv, Derivation, Parity};
use crate::element::Element;
use crate::fedosov::RecursionState;
use crate::generator::Gen;
use crate::geometry::GeometrySpec;
use crate::poly::BasePoly;
use crate::scalar;

/// The Kaehler differential: `y -> Dy`, `v -> Dv`, kills `dx`, `Dy`, `Dv`
/// and the coefficients.
pub fn de_rham(chart: Chart) -> Derivation {
    let nv = chart.nvars();
    let mut d = Derivation::new(nv, Parity::Odd);
    for i in 0..chart.dim {
        d.set_image(Gen::Y(i as u16), chart.dy(i));
    }
    for a in 0..chart.rank {
        d.set_image(Gen::V(a as u16), chart.dv(a));
    }
    d
}

/// Recursion towers extended to the de Rham complex.
#[derive(Clone, Debug)]
pub struct LiftedState {
    pub chart: Chart,
    pub cutoff: usize,
    pub delta: Derivation,
    pub dr: Derivation,
    pub d_nabla: Vec<Derivation>,
    pub d_nabla_prime: Vec<Derivation>,
    pub d_rho: Vec<Derivation>,
    pub d_mu: Vec<Derivation>,
}

fn lift_one(d: &Derivation, dr: &Derivation, chart: Chart) -> Derivation {
    let mut out = d.clone();
    for i in 0..chart.dim {
        let img = d.image(Gen::Y(i as u16));
        out.set_image(Gen::Dy(i as u16), -&dr.apply(&img));
    }
    for a in 0..chart.rank {
        let img = d.image(Gen::V(a as u16));
        out.set_image(Gen::Dv(a as u16), -&dr.apply(&img));
    }
    out
}

impl LiftedState {
    pub fn new(state: &RecursionState) -> Self {
        let chart = state.chart;
        let dr = de_rham(chart);
        LiftedState {
            chart,
            cutoff: state.cutoff,
            delta: state.delta.clone(),
            d_nabla: state.d_nabla.iter().map(|d| lift_one(d, &dr, chart)).collect(),
            d_nabla_prime: state
                .d_nabla_prime
                .iter()
                .map(|d| lift_one(d, &dr, chart))
                .collect(),
            d_rho: state.d_rho.iter().map(|d| lift_one(d, &dr, chart)).collect(),
            d_mu: state.d_mu.iter().map(|d| lift_one(d, &dr, chart)).collect(),
            dr,
        }
    }

    /// `d^nabla_{>=1} + d^nabla'_{>=1}` (no `delta`).
    pub fn d_ge1(&self) -> Derivation {
        let mut d = Derivation::new(self.chart.nvars(), Parity::Odd);
        for t in self.d_nabla.iter().chain(&self.d_nabla_prime) {
            d = d.add(t);
        }
        d
    }

    /// Horizontal differential `delta + d^nabla + d^nabla'`.
    pub fn d_par(&self) -> Derivation {
        self.delta.add(&self.d_ge1())
    }

    /// `d^rho + d^mu` lifted.
    pub fn d_rho_mu(&self) -> Derivation {
        let mut d = Derivation::new(self.chart.nvars(), Parity::Odd);
        for t in self.d_rho.iter().chain(&self.d_mu) {
            d = d.add(t);
        }
        d
    }

    /// Vertical differential `d^rho + d^mu + D`.
    pub fn d_perp(&self) -> Derivation {
        self.d_rho_mu().add(&self.dr)
    }

    /// Full CE differential on forms (no Kaehler part).
    pub fn d_g(&self) -> Derivation {
        self.d_par().add(&self.d_rho_mu())
    }

    /// Total differential `d_par + d_perp`.
    pub fn d_total(&self) -> Derivation {
        self.d_g().add(&self.dr)
    }

    /// Image of the full CE differential on a generator.
    pub fn d_g_image(&self, g: Gen) -> Element {
        let mut out = self.delta.image(g);
        for t in self
            .d_nabla
            .iter()
            .chain(&self.d_nabla_prime)
            .chain(&self.d_rho)
            .chain(&self.d_mu)
        {
            out.add_assign(&t.image(g));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Atiyah matrix and Atiyah-Chern classes
// ---------------------------------------------------------------------------

/// `(d + r) x (d + r)` matrix of elements; rows/cols `0..d` are the tangent
/// block, `d..d+r` the bundle block.
#[derive(Clone, Debug, PartialEq)]
pub struct EndMatrix {
    pub dim: usize,
    pub rank: usize,
    pub entries: Vec<Element>,
}

impl EndMatrix {
    pub fn n(&self) -> usize {
        self.dim + self.rank
    }

    pub fn zeros(chart: Chart) -> Self {
        let n = chart.dim + chart.rank;
        EndMatrix {
            dim: chart.dim,
            rank: chart.rank,
            entries: vec![Element::zero(chart.nvars()); n * n],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> &Element {
        &self.entries[row * self.n() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, e: Element) {
        let n = self.n();
        self.entries[row * n + col] = e;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Element::is_zero)
    }

    pub fn matmul(&self, other: &EndMatrix) -> EndMatrix {
        assert_eq!(self.n(), other.n());
        let n = self.n();
        let nv = self.entries[0].nvars();
        let mut out = EndMatrix {
            dim: self.dim,
            rank: self.rank,
            entries: vec![Element::zero(nv); n * n],
        };
        for r in 0..n {
            for c in 0..n {
                let mut acc = Element::zero(nv);
                for k in 0..n {
                    acc.add_assign(&(self.get(r, k) * other.get(k, c)));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Super-trace: tangent-block trace minus bundle-block trace.
    pub fn supertrace(&self) -> Element {
        let nv = self.entries[0].nvars();
        let mut out = Element::zero(nv);
        for i in 0..self.dim {
            out.add_assign(self.get(i, i));
        }
        for a in 0..self.rank {
            let e = self.get(self.dim + a, self.dim + a);
            out.add_assign(&-e);
        }
        out
    }

    pub fn pow(&self, k: usize) -> EndMatrix {
        assert!(k >= 1);
        let mut out = self.clone();
        for _ in 1..k {
            out = out.matmul(self);
        }
        out
    }
}

fn basis_gen(chart: Chart, idx: usize) -> Gen {
    if idx < chart.dim {
        Gen::Y(idx as u16)
    } else {
        Gen::V((idx - chart.dim) as u16)
    }
}

/// Module-connection coefficients of the tangent module.
///
/// The module of vector fields carries the canonical differential
/// `X -> [d^g, X]`; on the frame `d/ds^alpha` this produces
/// `eta[beta][alpha] = -(-1)^{|s^alpha|} (left d/ds^alpha) d^g(s^beta)`,
/// so that `D(omega (x) s_beta) = d^g(omega) (x) s_beta
/// + (-1)^{|omega|} omega eta[gamma][beta] (x) s_gamma` squares to zero.
pub fn module_matrix(lift: &LiftedState) -> EndMatrix {
    let chart = lift.chart;
    let n = chart.dim + chart.rank;
    let mut eta = EndMatrix::zeros(chart);
    for beta in 0..n {
        let img = lift.d_g_image(basis_gen(chart, beta));
        for alpha in 0..n {
            let g = basis_gen(chart, alpha);
            let entry = if g.is_odd() {
                img.left_derivative(g)
            } else {
                -&img.left_derivative(g)
            };
            eta.set(beta, alpha, entry);
        }
    }
    eta
}

/// The Atiyah matrix `[nabla_B, d^g]` on the tangent module: the Kaehler
/// differential of the module-connection coefficients.
pub fn atiyah_matrix(lift: &LiftedState) -> EndMatrix {
    let chart = lift.chart;
    let n = chart.dim + chart.rank;
    let eta = module_matrix(lift);
    let mut at = EndMatrix::zeros(chart);
    for beta in 0..n {
        for alpha in 0..n {
            at.set(beta, alpha, lift.dr.apply(eta.get(beta, alpha)));
        }
    }
    at
}

/// `sum_m (-1)^{|m|} m * b` over the monomials of `a`.
fn mul_with_left_parity(a: &Element, b: &Element) -> Element {
    let nv = a.nvars();
    let mut out = Element::zero(nv);
    for (w, c) in a.terms() {
        let t = &Element::monomial(c.clone(), w) * b;
        if Element::word_is_odd(w) {
            out.add_assign(&-&t);
        } else {
            out.add_assign(&t);
        }
    }
    out
}

/// Residual of `[d^g, At]` on every basis column; components of weight
/// `<= asserted_weight` are reported.
pub fn atiyah_closedness(lift: &LiftedState, asserted_weight: usize) -> Vec<(usize, usize, Element)> {
    let chart = lift.chart;
    let n = chart.dim + chart.rank;
    let at = atiyah_matrix(lift);
    let eta = module_matrix(lift);
    let dg = lift.d_g();
    let mut failures = Vec::new();
    for alpha in 0..n {
        for gamma in 0..n {
            let mut z = dg.apply(at.get(gamma, alpha));
            for beta in 0..n {
                z.add_assign(&mul_with_left_parity(at.get(beta, alpha), eta.get(gamma, beta)));
                z.add_assign(&-&(eta.get(beta, alpha) * at.get(gamma, beta)));
            }
            let z = z.filter(|w| Element::word_weight(w) <= asserted_weight);
            if !z.is_zero() {
                failures.push((gamma, alpha, z));
            }
        }
    }
    failures
}

/// `c_k = STr(At^k)`.
pub fn chern_class(at: &EndMatrix, k: usize) -> Element {
    at.pow(k).supertrace()
}

// ---------------------------------------------------------------------------
// Transgression
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct TransgressionCertificate {
    pub original: Element,
    /// representative of `dx`-degree zero
    pub alpha: Element,
    /// primitives by `dx`-degree
    pub primitives: Vec<Element>,
}

#[derive(Clone, Debug)]
pub struct TransgressionChecks {
    pub alpha_dx_free: bool,
    /// `original - alpha - d(sum primitives)` vanishes up to the asserted y-degree
    pub certificate_ok: bool,
    pub alpha_d_par_closed: bool,
    pub alpha_d_perp_closed: bool,
}

impl TransgressionChecks {
    pub fn pass(&self) -> bool {
        self.alpha_dx_free && self.certificate_ok && self.alpha_d_par_closed && self.alpha_d_perp_closed
    }
}

/// The perturbed contraction homotopy `h = -delta_inv o sum (-d_{>=1}
/// delta_inv)^n`, truncated at `y_cap`. Satisfies
/// `d_par o h + h o d_par = iota p - id`, so `-h` produces primitives on the
/// complement of the flat sections.
pub fn homotopy(lift: &LiftedState, e: &Element, y_cap: usize) -> Element {
    let d_ge1 = lift.d_ge1();
    let mut acc = e.truncate_y(y_cap);
    let mut total = acc.clone();
    while !acc.is_zero() {
        acc = (-&d_ge1.apply(&delta_inv(&acc))).truncate_y(y_cap);
        total.add_assign(&acc);
    }
    -&delta_inv(&total)
}

#[derive(Debug, Clone)]
pub enum TransgressError {
    /// The input is not a total cocycle up to the asserted weight.
    NotClosed { weight: usize },
}

impl std::fmt::Display for TransgressError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TransgressError::NotClosed { weight } => {
                write!(f, "transgression input is not closed (weight {weight} component)")
            }
        }
    }
}

impl std::error::Error for TransgressError {}

/// Pushes a total cocycle to a representative of `dx`-degree zero,
/// producing the primitive chain.
pub fn transgress(
    lift: &LiftedState,
    c: &Element,
    y_cap: usize,
) -> Result<TransgressionCertificate, TransgressError> {
    let nv = lift.chart.nvars();
    let d_perp = lift.d_perp();
    let d_tot = lift.d_total();
    // closedness precheck at low weight; the matrix entries are exact to
    // weight cutoff - 2, so one application of the differential is exact one
    // weight lower
    let closed_bound = lift.cutoff.saturating_sub(3);
    let dres = d_tot.apply(c).filter(|w| Element::word_weight(w) <= closed_bound);
    if !dres.is_zero() {
        let w = dres.terms().map(|(w, _)| Element::word_weight(w)).min().unwrap();
        return Err(TransgressError::NotClosed { weight: w });
    }

    let p_max = c
        .terms()
        .map(|(w, _)| Element::word_form_degree(w))
        .max()
        .unwrap_or(0);
    let comp = |p: usize| c.filter(|w| Element::word_form_degree(w) == p);
    let mut primitives = vec![Element::zero(nv); p_max.max(1)];
    if p_max > 0 {
        primitives[p_max - 1] = -&homotopy(lift, &comp(p_max), y_cap);
        for p in (1..p_max).rev() {
            let target = &comp(p) - &d_perp.apply(&primitives[p]).truncate_y(y_cap);
            primitives[p - 1] = -&homotopy(lift, &target, y_cap);
        }
    }
    let alpha = &comp(0) - &d_perp.apply(&primitives[0]).truncate_y(y_cap);
    Ok(TransgressionCertificate {
        original: c.clone(),
        alpha,
        primitives,
    })
}

/// Re-verifies a certificate by substitution.
///
/// The matrix entries are exact to weight `cutoff - 2` and each application
/// of a truncated differential costs one more weight, so all identities are
/// asserted on components of weight `<= cutoff - 3`.
pub fn verify_certificate(lift: &LiftedState, cert: &TransgressionCertificate) -> TransgressionChecks {
    let bound = lift.cutoff.saturating_sub(3);
    let d_tot = lift.d_total();
    let d_par = lift.d_par();
    let d_perp = lift.d_perp();
    let mut db = Element::zero(lift.chart.nvars());
    for b in &cert.primitives {
        db.add_assign(&d_tot.apply(b));
    }
    let low = |e: &Element| e.truncate_weight(bound).is_zero();
    let resid = &(&cert.original - &cert.alpha) - &db;
    let certificate_ok = low(&resid);
    let alpha_dx_free = cert
        .alpha
        .terms()
        .all(|(w, _)| Element::word_form_degree(w) == 0);
    let alpha_d_par_closed = low(&d_par.apply(&cert.alpha));
    let alpha_d_perp_closed = low(&d_perp.apply(&cert.alpha));
    TransgressionChecks {
        alpha_dx_free,
        certificate_ok,
        alpha_d_par_closed,
        alpha_d_perp_closed,
    }
}

// ---------------------------------------------------------------------------
// Weil algebra
// ---------------------------------------------------------------------------

/// Projection onto the Weil sector: kills every term containing `y`, `dx`
/// or `dt` factors.
pub fn weil_project(e: &Element) -> Element {
    e.filter(|w| {
        !w.iter()
            .any(|g| matches!(g, Gen::Y(_) | Gen::Dx(_) | Gen::Dt))
    })
}

/// Flat-section embedding: the unique extension `f + (terms at least linear
/// in y)` annihilated by the horizontal differential, truncated at `y_cap`.
pub fn iota(lift: &LiftedState, e: &Element, y_cap: usize) -> Element {
    let d_ge1 = lift.d_ge1();
    let mut term = e.clone();
    let mut total = e.clone();
    while !term.is_zero() {
        term = (-&delta_inv(&d_ge1.apply(&term))).truncate_y(y_cap);
        total.add_assign(&term);
    }
    total
}

/// The induced Weil differential `D = p o d_perp o iota`.
///
/// Every component of the vertical differential lowers the y-degree by at
/// most one and the projection kills positive y-degrees, so the flat-section
/// series is only needed to y-degree one; the cap below is exact.
pub fn weil_differential(lift: &LiftedState, w: &Element, y_cap: usize) -> Element {
    weil_project(&lift.d_perp().apply(&iota(lift, w, y_cap.min(2))))
}

/// The Kaehler component `D^DR = p o D o iota`.
pub fn weil_differential_dr(lift: &LiftedState, w: &Element, y_cap: usize) -> Element {
    weil_project(&lift.dr.apply(&iota(lift, w, y_cap.min(2))))
}

/// The bracket component `D^{mu+rho} = p o (d^rho + d^mu) o iota`.
pub fn weil_differential_rho_mu(lift: &LiftedState, w: &Element, y_cap: usize) -> Element {
    weil_project(&lift.d_rho_mu().apply(&iota(lift, w, y_cap.min(2))))
}

// ---------------------------------------------------------------------------
// Modular class
// ---------------------------------------------------------------------------

/// The modular cochain: super-trace of the difference between the basic
/// connections and the anchor pullbacks, in `C^1(V)`. With the tangent-module
/// sign conventions of `module_matrix` this is the `D^DR`-preimage of the
/// transgressed first Atiyah-Chern class:
/// `sum_a (mu-trace - rho_{1+1}-trace) v^a`.
pub fn modular_class(spec: &GeometrySpec) -> Element {
    let (d, r) = (spec.chart.dim, spec.chart.rank);
    let nv = spec.nvars();
    let t = spec.rho11();
    let mut out = Element::zero(nv);
    for a in 0..r {
        let mut coeff = BasePoly::zero(nv);
        for j in 0..d {
            coeff = &coeff - t.get(&[j, j, a]);
        }
        for b in 0..r {
            coeff = &coeff + spec.mu.get(&[b, a, b]);
        }
        out.add_assign(&Element::monomial(coeff, &[Gen::V(a as u16)]));
    }
    out
}

#[derive(Clone, Debug)]
pub struct ModularReport {
    /// Weil projection of the transgressed first Atiyah-Chern class.
    pub transgressed_c1: Element,
    /// `D^DR` of the modular cochain.
    pub ddr_modular: Element,
    pub difference: Element,
    /// the `Dy Dy` component of the transgressed class (vanishes for a
    /// trace-free curvature, e.g. unit-determinant Levi-Civita input)
    pub dydy_component: Element,
    pub checks: TransgressionChecks,
}

impl ModularReport {
    pub fn pass(&self) -> bool {
        self.difference.is_zero() && self.checks.pass()
    }
}

/// Headline comparison: the first Atiyah-Chern class transgresses to the
/// `D^DR` image of the modular class. Requires a fibre metric compatible with
/// the bundle connection (validated by the geometry layer).
pub fn check_c1_modular(
    spec: &GeometrySpec,
    lift: &LiftedState,
    y_cap: usize,
) -> Result<ModularReport, TransgressError> {
    let at = atiyah_matrix(lift);
    let c1 = chern_class(&at, 1);
    let cert = transgress(lift, &c1, y_cap)?;
    let checks = verify_certificate(lift, &cert);
    let lhs = weil_project(&cert.alpha);
    let rhs = weil_differential_dr(lift, &modular_class(spec), y_cap);
    let dydy = lhs.filter(|w| w.iter().filter(|g| matches!(g, Gen::Dy(_))).count() == 2);
    Ok(ModularReport {
        difference: &lhs - &rhs,
        transgressed_c1: lhs,
        ddr_modular: rhs,
        dydy_component: dydy,
        checks,
    })
}

// ---------------------------------------------------------------------------
// Action algebroids
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ActionChernReport {
    pub k: usize,
    /// `v`-degree-zero part of the transgressed class in the Weil sector
    pub transgressed: Element,
    /// `(-1)^k STr((R + moment) (+) ad)^k`
    pub equivariant: Element,
    pub difference: Element,
    /// the bundle tower and the torsion tower vanish above their seeds
    pub towers_vanish: bool,
    pub checks: TransgressionChecks,
}

impl ActionChernReport {
    pub fn pass(&self) -> bool {
        self.difference.is_zero() && self.towers_vanish && self.checks.pass()
    }
}

#[derive(Debug, Clone)]
pub enum ActionError {
    NotAction(&'static str),
    Transgress(TransgressError),
}

impl std::fmt::Display for ActionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActionError::NotAction(what) => write!(f, "not an action algebroid spec: {what}"),
            ActionError::Transgress(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ActionError {}

/// The curvature-plus-moment matrix of the action, realized in the Weil
/// sector with the generator dictionary `dx^i -> -Dy^i` fixed by
/// `D^DR(f) = -d_i f Dy^i`: tangent block `1/2 R_{mnj}^i Dy^m Dy^n +
/// (L - nabla_rho)^i_{ja} Dv^a`, bundle block `C^a_{cb} Dv^c`.
pub fn cartan_matrix(spec: &GeometrySpec) -> EndMatrix {
    let chart = spec.chart;
    let (d, r) = (chart.dim, chart.rank);
    let nv = chart.nvars();
    let rr = spec.curvature();
    let c = spec.c_from_mu(&spec.mu);
    let mut m = EndMatrix::zeros(chart);
    for i in 0..d {
        for j in 0..d {
            let mut e = Element::zero(nv);
            for mm in 0..d {
                for n in 0..d {
                    let p = rr.get(&[mm, n, j, i]);
                    if p.is_zero() {
                        continue;
                    }
                    e.add_assign(&Element::monomial(
                        p.scale(&scalar::frac(1, 2)),
                        &[Gen::Dy(mm as u16), Gen::Dy(n as u16)],
                    ));
                }
            }
            for a in 0..r {
                // Lie-derivative moment: (L_{rho(e_a)} - nabla_{rho(e_a)})^i_j
                let mut p = -&spec.rho.get(&[i, a]).partial(j);
                for mm in 0..d {
                    p = &p - &(spec.rho.get(&[mm, a]) * spec.gamma.get(&[i, mm, j]));
                }
                if !p.is_zero() {
                    e.add_assign(&Element::monomial(p, &[Gen::Dv(a as u16)]));
                }
            }
            m.set(i, j, e);
        }
    }
    for a in 0..r {
        for b in 0..r {
            let mut e = Element::zero(nv);
            for cc in 0..r {
                let p = c.get(&[a, cc, b]);
                if p.is_zero() {
                    continue;
                }
                e.add_assign(&Element::monomial(p.clone(), &[Gen::Dv(cc as u16)]));
            }
            m.set(d + a, d + b, e);
        }
    }
    m
}

/// Compares the constant part of the transgressed `c_k` against the
/// equivariant character expression at leading order in `v`-degree.
pub fn action_chern(
    spec: &GeometrySpec,
    state: &RecursionState,
    lift: &LiftedState,
    k: usize,
    y_cap: usize,
) -> Result<ActionChernReport, ActionError> {
    if !spec.action_algebroid {
        return Err(ActionError::NotAction("flag not set"));
    }
    if !spec.gamma_prime.is_zero() {
        return Err(ActionError::NotAction("bundle connection must be flat"));
    }
    if !spec.mu.iter().all(BasePoly::is_constant) {
        return Err(ActionError::NotAction("torsion must be constant"));
    }
    let at = atiyah_matrix(lift);
    let ck = chern_class(&at, k);
    let cert = transgress(lift, &ck, y_cap).map_err(ActionError::Transgress)?;
    let checks = verify_certificate(lift, &cert);
    // Counterpart of the equivariant character: with the tangent-module sign
    // conventions the (-1)^k prefactor is absorbed into the Atiyah matrix.
    let lhs = weil_project(&cert.alpha).filter(|w| Element::word_v_degree(w) == 0);
    let rhs = cartan_matrix(spec).pow(k).supertrace();
    let towers_vanish = state.d_nabla_prime.iter().skip(1).all(Derivation::is_zero)
        && state.d_mu.iter().skip(1).all(Derivation::is_zero);
    Ok(ActionChernReport {
        k,
        difference: &lhs - &rhs,
        transgressed: lhs,
        equivariant: rhs,
        towers_vanish,
        checks,
    })
}
