//! Generators of the graded coordinate algebra.
//!
//! The algebra is generated over the polynomial base ring by
//!
//! - `dx^i` — odd chart one-forms,
//! - `y^i`  — even symmetric-algebra coordinates dual to the coordinate frame,
//! - `v^a`  — odd fibre coordinates dual to the bundle frame,
//! - `Dy^i`, `Dv^a` — Kaehler differentials of `y^i`, `v^a` (odd resp. even),
//! - `dt`   — the odd simplex one-form, present only in family computations.
//!
//! The `Ord` instance fixes the canonical generator order; every sign in the
//! engine is produced by sorting generator words into this order and counting
//! odd transpositions.

/// A single generator. Indices are 0-based internally.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Gen {
    /// Simplex one-form `dt` (odd).
    Dt,
    /// Chart one-form `dx^i` (odd).
    Dx(u16),
    /// Even coordinate `y^i`.
    Y(u16),
    /// Odd differential `Dy^i`.
    Dy(u16),
    /// Odd fibre coordinate `v^a`.
    V(u16),
    /// Even differential `Dv^a`.
    Dv(u16),
}

impl Gen {
    pub fn is_odd(self) -> bool {
        matches!(self, Gen::Dt | Gen::Dx(_) | Gen::Dy(_) | Gen::V(_))
    }
}

/// Sorts a generator word into canonical order.
///
/// Returns `None` when the word contains a repeated odd generator (the term is
/// zero), otherwise the sorted word together with the Koszul sign of the
/// permutation.
pub fn sort_word(word: &[Gen]) -> Option<(Vec<Gen>, i8)> {
    let mut w: Vec<Gen> = word.to_vec();
    let mut sign = 1i8;
    // insertion sort, counting odd-odd transpositions
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            if w[j - 1].is_odd() && w[j].is_odd() {
                sign = -sign;
            }
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    for k in 1..w.len() {
        if w[k] == w[k - 1] && w[k].is_odd() {
            return None;
        }
    }
    Some((w, sign))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        assert!(Gen::Dt < Gen::Dx(0));
        assert!(Gen::Dx(5) < Gen::Y(0));
        assert!(Gen::Y(3) < Gen::Dy(0));
        assert!(Gen::Dy(2) < Gen::V(0));
        assert!(Gen::V(1) < Gen::Dv(0));
        assert!(Gen::Dx(0) < Gen::Dx(1));
    }

    #[test]
    fn odd_square_is_zero() {
        assert!(sort_word(&[Gen::Dx(0), Gen::Dx(0)]).is_none());
        assert!(sort_word(&[Gen::V(1), Gen::Y(0), Gen::V(1)]).is_none());
        // even generators may repeat
        let (w, s) = sort_word(&[Gen::Y(0), Gen::Y(0)]).unwrap();
        assert_eq!(w, vec![Gen::Y(0), Gen::Y(0)]);
        assert_eq!(s, 1);
    }

    #[test]
    fn koszul_signs() {
        // two odd generators anticommute
        let (w, s) = sort_word(&[Gen::V(1), Gen::V(0)]).unwrap();
        assert_eq!(w, vec![Gen::V(0), Gen::V(1)]);
        assert_eq!(s, -1);
        // moving an even generator is free
        let (w, s) = sort_word(&[Gen::V(0), Gen::Y(0)]).unwrap();
        assert_eq!(w, vec![Gen::Y(0), Gen::V(0)]);
        assert_eq!(s, 1);
        // dx v dx' = -dx dx' v etc.
        let (_, s) = sort_word(&[Gen::Dx(1), Gen::V(0), Gen::Dx(0)]).unwrap();
        // dx1 v dx0 -> dx0 dx1 v: permutation (dx1,v,dx0)->(dx0,dx1,v):
        // dx0 moves left past v (odd-odd: -1) and past dx1 (odd-odd: -1)
        assert_eq!(s, 1);
    }
}
