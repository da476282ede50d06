//! Graded derivations, the Koszul differential and its contraction homotopy.
//!
//! A `Derivation` is specified by its parity, its images on generators and an
//! optional base action sending a coefficient `f` to `sum_i (df/dx_i) * E_i`
//! for stored elements `E_i`. Everything extends by the graded Leibniz rule.
//! Derivations are immutable values; all operations return fresh ones.

use std::collections::BTreeMap;

use crate::element::Element;
use crate::generator::Gen;
use crate::scalar;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug)]
pub struct Derivation {
    nvars: usize,
    parity: Parity,
    /// `f -> sum_i df/dx_i * base[i]`; `None` means coefficients are constants.
    base: Option<Vec<Element>>,
    images: BTreeMap<Gen, Element>,
}

impl Derivation {
    pub fn new(nvars: usize, parity: Parity) -> Self {
        Derivation {
            nvars,
            parity,
            base: None,
            images: BTreeMap::new(),
        }
    }

    pub fn with_base(mut self, base: Vec<Element>) -> Self {
        assert_eq!(base.len(), self.nvars);
        self.base = Some(base);
        self
    }

    pub fn with_image(mut self, g: Gen, img: Element) -> Self {
        self.set_image(g, img);
        self
    }

    pub fn set_image(&mut self, g: Gen, img: Element) {
        assert_eq!(img.nvars(), self.nvars);
        if img.is_zero() {
            self.images.remove(&g);
        } else {
            self.images.insert(g, img);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn image(&self, g: Gen) -> Element {
        self.images
            .get(&g)
            .cloned()
            .unwrap_or_else(|| Element::zero(self.nvars))
    }

    pub fn images(&self) -> impl Iterator<Item = (&Gen, &Element)> {
        self.images.iter()
    }

    pub fn base(&self) -> Option<&Vec<Element>> {
        self.base.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.images.is_empty() && self.base.iter().all(|b| b.iter().all(|e| e.is_zero()))
    }

    /// Applies the derivation by the graded Leibniz rule.
    pub fn apply(&self, e: &Element) -> Element {
        assert_eq!(self.nvars, e.nvars(), "chart dimension mismatch");
        let mut out = Element::zero(self.nvars);
        let mut scratch: Vec<Gen> = Vec::new();
        for (word, coeff) in e.terms() {
            // base action on the coefficient (polynomials are even)
            if let Some(base) = &self.base {
                for (i, ei) in base.iter().enumerate() {
                    if ei.is_zero() {
                        continue;
                    }
                    let pc = coeff.partial(i);
                    if pc.is_zero() {
                        continue;
                    }
                    for (bw, bc) in ei.terms() {
                        scratch.clear();
                        scratch.extend_from_slice(bw);
                        scratch.extend_from_slice(word);
                        if let Some((sorted, sign)) = crate::generator::sort_word(&scratch) {
                            let c = &pc * bc;
                            out.add_term(sorted, if sign < 0 { -&c } else { c });
                        }
                    }
                }
            }
            // generator part with the prefix sign
            let mut odd_prefix = 0usize;
            for (k, &g) in word.iter().enumerate() {
                if let Some(img) = self.images.get(&g) {
                    let flip = self.parity == Parity::Odd && odd_prefix % 2 == 1;
                    for (iw, ic) in img.terms() {
                        scratch.clear();
                        scratch.extend_from_slice(&word[..k]);
                        scratch.extend_from_slice(iw);
                        scratch.extend_from_slice(&word[k + 1..]);
                        if let Some((sorted, sign)) = crate::generator::sort_word(&scratch) {
                            let c = coeff * ic;
                            let neg = (sign < 0) ^ flip;
                            out.add_term(sorted, if neg { -&c } else { c });
                        }
                    }
                }
                if g.is_odd() {
                    odd_prefix += 1;
                }
            }
        }
        out
    }

    /// Pointwise sum of derivations of equal parity.
    pub fn add(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.nvars, other.nvars);
        assert_eq!(self.parity, other.parity, "cannot sum derivations of different parity");
        let mut out = self.clone();
        for (g, img) in &other.images {
            let s = &out.image(*g) + img;
            out.set_image(*g, s);
        }
        out.base = match (&self.base, &other.base) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x + y).collect()),
        };
        out
    }

    pub fn negate(&self) -> Derivation {
        let mut out = Derivation::new(self.nvars, self.parity);
        for (g, img) in &self.images {
            out.images.insert(*g, -img);
        }
        out.base = self.base.as_ref().map(|b| b.iter().map(|e| -e).collect());
        out
    }

    /// Graded commutator `[D1, D2] = D1 D2 - (-1)^{|D1||D2|} D2 D1`,
    /// returned through its generator images and composite base action.
    ///
    /// The second-order part of the base action cancels by the symmetry of
    /// mixed partials, leaving `E_i -> D1(E2_i) - (-1)^{|D1||D2|} D2(E1_i)`.
    pub fn commutator(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.nvars, other.nvars);
        let both_odd = self.parity == Parity::Odd && other.parity == Parity::Odd;
        let parity = if self.parity == other.parity {
            Parity::Even
        } else {
            Parity::Odd
        };
        let mut out = Derivation::new(self.nvars, parity);
        let mut gens: Vec<Gen> = self.images.keys().chain(other.images.keys()).cloned().collect();
        gens.sort_unstable();
        gens.dedup();
        for g in gens {
            let a = self.apply(&other.image(g));
            let b = other.apply(&self.image(g));
            let img = if both_odd { &a + &b } else { &a - &b };
            out.set_image(g, img);
        }
        let zeroes = || vec![Element::zero(self.nvars); self.nvars];
        if self.base.is_some() || other.base.is_some() {
            let b1 = self.base.clone().unwrap_or_else(zeroes);
            let b2 = other.base.clone().unwrap_or_else(zeroes);
            let base: Vec<Element> = b1
                .iter()
                .zip(&b2)
                .map(|(e1, e2)| {
                    let a = self.apply(e2);
                    let b = other.apply(e1);
                    if both_odd {
                        &a + &b
                    } else {
                        &a - &b
                    }
                })
                .collect();
            if base.iter().any(|e| !e.is_zero()) {
                out.base = Some(base);
            }
        }
        out
    }

    /// Commutator applied to a single generator, avoiding building the full
    /// operator: `[self, other](g)` as an element.
    pub fn commutator_on(&self, other: &Derivation, g: Gen) -> Element {
        let both_odd = self.parity == Parity::Odd && other.parity == Parity::Odd;
        let a = self.apply(&other.image(g));
        let b = other.apply(&self.image(g));
        if both_odd {
            &a + &b
        } else {
            &a - &b
        }
    }
}

/// The Koszul differential `delta = dx^i d/dy^i`.
pub fn delta(nvars: usize, dim: usize) -> Derivation {
    let mut d = Derivation::new(nvars, Parity::Odd);
    for i in 0..dim {
        d.set_image(Gen::Y(i as u16), Element::gen(nvars, Gen::Dx(i as u16)));
    }
    d
}

/// The normalized contraction homotopy `delta^{-1}`.
///
/// Acts on the bihomogeneous `(p, q)` component (`p` counts `dx`, `q` counts
/// `y`; `v`, `Dy`, `Dv` are spectators) as `(1/(p+q)) y^i iota_{d/dx^i}`, and
/// as zero on `(0, 0)`. Not a derivation.
pub fn delta_inv(e: &Element) -> Element {
    let nvars = e.nvars();
    let mut out = Element::zero(nvars);
    for (word, coeff) in e.terms() {
        let p = Element::word_form_degree(word);
        let q = Element::word_y_degree(word);
        if p + q == 0 || p == 0 {
            continue;
        }
        let norm = scalar::frac(1, (p + q) as i64);
        let mut odd_prefix = 0usize;
        for (k, &g) in word.iter().enumerate() {
            if let Gen::Dx(i) = g {
                let sign = if odd_prefix % 2 == 1 { -1i64 } else { 1 };
                let mut w2: Vec<Gen> = Vec::with_capacity(word.len());
                w2.push(Gen::Y(i));
                w2.extend_from_slice(&word[..k]);
                w2.extend_from_slice(&word[k + 1..]);
                let c = coeff.scale(&(norm.clone() * scalar::int(sign)));
                out.add_assign(&Element::monomial(c, &w2));
            }
            if g.is_odd() {
                odd_prefix += 1;
            }
        }
    }
    out
}
