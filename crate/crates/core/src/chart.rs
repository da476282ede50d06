//! Chart context: dimensions, variable names, generator helpers.

use crate::element::Element;
use crate::generator::Gen;
use crate::poly::BasePoly;

/// A coordinate chart of dimension `dim` carrying a rank-`rank` bundle.
/// `has_t` marks the ring extension by the family parameter `t`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Chart {
    pub dim: usize,
    pub rank: usize,
    pub has_t: bool,
}

impl Chart {
    pub fn new(dim: usize, rank: usize) -> Self {
        Chart {
            dim,
            rank,
            has_t: false,
        }
    }

    pub fn with_t(dim: usize, rank: usize) -> Self {
        Chart {
            dim,
            rank,
            has_t: true,
        }
    }

    /// Number of polynomial variables (chart coordinates plus `t` if present).
    pub fn nvars(&self) -> usize {
        self.dim + usize::from(self.has_t)
    }

    pub fn t_index(&self) -> Option<usize> {
        self.has_t.then_some(self.dim)
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        if self.has_t {
            names.push("t".to_string());
        }
        names
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.nvars())
    }

    pub fn one(&self) -> Element {
        Element::one(self.nvars())
    }

    pub fn poly_zero(&self) -> BasePoly {
        BasePoly::zero(self.nvars())
    }

    pub fn poly_one(&self) -> BasePoly {
        BasePoly::one(self.nvars())
    }

    pub fn x(&self, i: usize) -> BasePoly {
        BasePoly::var(self.nvars(), i)
    }

    pub fn t_poly(&self) -> BasePoly {
        BasePoly::var(self.nvars(), self.t_index().expect("chart has no t"))
    }

    pub fn dx(&self, i: usize) -> Element {
        Element::gen(self.nvars(), Gen::Dx(i as u16))
    }

    pub fn y(&self, i: usize) -> Element {
        Element::gen(self.nvars(), Gen::Y(i as u16))
    }

    pub fn v(&self, a: usize) -> Element {
        Element::gen(self.nvars(), Gen::V(a as u16))
    }

    pub fn dy(&self, i: usize) -> Element {
        Element::gen(self.nvars(), Gen::Dy(i as u16))
    }

    pub fn dv(&self, a: usize) -> Element {
        Element::gen(self.nvars(), Gen::Dv(a as u16))
    }

    pub fn dt_el(&self) -> Element {
        assert!(self.has_t);
        Element::gen(self.nvars(), Gen::Dt)
    }

    /// All CE generators `y^1..y^d, v^1..v^r` in order.
    pub fn ce_generators(&self) -> Vec<Gen> {
        let mut gens: Vec<Gen> = (0..self.dim).map(|i| Gen::Y(i as u16)).collect();
        gens.extend((0..self.rank).map(|a| Gen::V(a as u16)));
        gens
    }

    pub fn display<'a>(&self, el: &'a Element, names: &'a [String]) -> String {
        format!("{}", el.display(names))
    }
}
