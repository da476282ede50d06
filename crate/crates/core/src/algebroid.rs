//! Direct tensor-level verification of the Lie algebroid conditions.
//!
//! The bracket on sections is reconstructed from the structure functions
//! `C^a_{bc}` with the Leibniz convention
//! `[f alpha, beta] = f [alpha, beta] - rho(beta)(f) alpha`.
//! Residuals are reported as full polynomial tensors so failures localize.

use crate::geometry::{GeometrySpec, Tens};
use crate::poly::BasePoly;

/// Basic connections and basic curvature of the algebroid data.
#[derive(Clone, Debug)]
pub struct BasicConnections {
    /// `hat nabla^bas_{v_a} v_b = hat[a][b][c] v_c`
    pub hat: Tens,
    /// `check nabla^bas_{v_a} d_j = chk[a][j][k] d_k`
    pub chk: Tens,
    /// `R^bas(v_b, v_c) y_j = rbas[b][c][j][a] v_a`
    pub rbas: Tens,
}

#[derive(Clone, Debug)]
pub struct AlgebroidReport {
    /// `[rho(v_b), rho(v_c)] - rho([v_b, v_c])` per `(b, c, i)`, layout `[b][c][i]`
    pub anchor_residual: Tens,
    /// cyclic Bianchi residual per `(a, b, c)` with value index `d`, layout `[a][b][c][d]`
    pub bianchi_residual: Tens,
    pub basic: BasicConnections,
}

impl AlgebroidReport {
    pub fn anchor_ok(&self) -> bool {
        self.anchor_residual.is_zero()
    }

    pub fn bianchi_ok(&self) -> bool {
        self.bianchi_residual.is_zero()
    }

    pub fn pass(&self) -> bool {
        self.anchor_ok() && self.bianchi_ok()
    }

    /// First offending index tuples, for reporting.
    pub fn anchor_failures(&self) -> Vec<Vec<usize>> {
        self.anchor_residual.iter_indexed().map(|(i, _)| i).collect()
    }

    pub fn bianchi_failures(&self) -> Vec<Vec<usize>> {
        self.bianchi_residual.iter_indexed().map(|(i, _)| i).collect()
    }
}

/// `[rho(v_b), rho(v_c)]^i - rho^i_a C^a_{bc}`.
pub fn check_anchor(spec: &GeometrySpec) -> Tens {
    let (d, r) = (spec.chart.dim, spec.chart.rank);
    let nv = spec.nvars();
    let c = spec.c_from_mu(&spec.mu);
    let mut out = Tens::zeros(&[r, r, d], nv);
    for b in 0..r {
        for cc in 0..r {
            for i in 0..d {
                let mut acc = BasePoly::zero(nv);
                for j in 0..d {
                    acc = &acc + &(spec.rho.get(&[j, b]) * &spec.rho.get(&[i, cc]).partial(j));
                    acc = &acc - &(spec.rho.get(&[j, cc]) * &spec.rho.get(&[i, b]).partial(j));
                }
                for a in 0..r {
                    acc = &acc - &(spec.rho.get(&[i, a]) * c.get(&[a, b, cc]));
                }
                out.set(&[b, cc, i], acc);
            }
        }
    }
    out
}

/// Cyclic sum over `(a, b, c)` of
/// `mu(mu(v_a, v_b), v_c) + (nabla'^{(1)}_{rho(v_a)} mu)(v_b, v_c)
///  - R'(rho(v_a), rho(v_b)) v_c`.
pub fn check_bianchi(spec: &GeometrySpec) -> Tens {
    let (d, r) = (spec.chart.dim, spec.chart.rank);
    let nv = spec.nvars();
    let npm = spec.nabla_prime_mu();
    let rp = spec.curvature_prime();
    let mut out = Tens::zeros(&[r, r, r, r], nv);
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                for dd in 0..r {
                    let mut acc = BasePoly::zero(nv);
                    for (p, q, s) in [(a, b, c), (b, c, a), (c, a, b)] {
                        // mu(mu(v_p, v_q), v_s)^dd
                        for e in 0..r {
                            acc = &acc + &(spec.mu.get(&[e, p, q]) * spec.mu.get(&[dd, e, s]));
                        }
                        // rho^i_p (nabla'_i mu)^dd_{qs}
                        for i in 0..d {
                            acc = &acc + &(spec.rho.get(&[i, p]) * npm.get(&[i, dd, q, s]));
                        }
                        // - rho^i_p rho^j_q R'_{ijs}^dd
                        for i in 0..d {
                            for j in 0..d {
                                acc = &acc
                                    - &(&(spec.rho.get(&[i, p]) * spec.rho.get(&[j, q]))
                                        * rp.get(&[i, j, s, dd]));
                            }
                        }
                    }
                    out.set(&[a, b, c, dd], acc);
                }
            }
        }
    }
    out
}

/// The basic connections and the five-term basic curvature.
pub fn basic_connections(spec: &GeometrySpec) -> BasicConnections {
    let (d, r) = (spec.chart.dim, spec.chart.rank);
    let nv = spec.nvars();
    let c = spec.c_from_mu(&spec.mu);

    // hat nabla^bas_{v_a} v_b = nabla'_{rho(v_a)} v_b - mu(v_a, v_b)
    let mut hat = Tens::zeros(&[r, r, r], nv);
    for a in 0..r {
        for b in 0..r {
            for cc in 0..r {
                let mut acc = BasePoly::zero(nv);
                for i in 0..d {
                    acc = &acc + &(spec.rho.get(&[i, a]) * spec.gamma_prime.get(&[cc, i, b]));
                }
                acc = &acc - spec.mu.get(&[cc, a, b]);
                hat.set(&[a, b, cc], acc);
            }
        }
    }

    // check nabla^bas_{v_a} d_j
    //   = nabla_{rho(v_a)} d_j - nabla_j rho(v_a) + rho(nabla'_j v_a)
    let mut chk = Tens::zeros(&[r, d, d], nv);
    for a in 0..r {
        for j in 0..d {
            for k in 0..d {
                let mut acc = BasePoly::zero(nv);
                for i in 0..d {
                    acc = &acc + &(spec.rho.get(&[i, a]) * spec.gamma.get(&[k, i, j]));
                    acc = &acc - &(spec.rho.get(&[i, a]) * spec.gamma.get(&[k, j, i]));
                }
                acc = &acc - &spec.rho.get(&[k, a]).partial(j);
                for b in 0..r {
                    acc = &acc + &(spec.gamma_prime.get(&[b, j, a]) * spec.rho.get(&[k, b]));
                }
                chk.set(&[a, j, k], acc);
            }
        }
    }

    // R^bas(v_b, v_c) y_j = nabla'_j [v_b, v_c] - [nabla'_j v_b, v_c]
    //   - [v_b, nabla'_j v_c] + nabla'_{chk(v_b) y_j} v_c - nabla'_{chk(v_c) y_j} v_b
    let mut rbas = Tens::zeros(&[r, r, d, r], nv);
    for b in 0..r {
        for cc in 0..r {
            for j in 0..d {
                for a in 0..r {
                    let mut acc = c.get(&[a, b, cc]).partial(j);
                    for e in 0..r {
                        acc = &acc + &(spec.gamma_prime.get(&[a, j, e]) * c.get(&[e, b, cc]));
                        // [nabla'_j v_b, v_c] = Gamma'^e_{jb} C^a_{ec} - rho(v_c)(Gamma'^a_{jb})
                        acc = &acc - &(spec.gamma_prime.get(&[e, j, b]) * c.get(&[a, e, cc]));
                        // [v_b, nabla'_j v_c] = Gamma'^e_{jc} C^a_{be} + rho(v_b)(Gamma'^a_{jc})
                        acc = &acc - &(spec.gamma_prime.get(&[e, j, cc]) * c.get(&[a, b, e]));
                    }
                    for k in 0..d {
                        acc = &acc
                            + &(spec.rho.get(&[k, cc]) * &spec.gamma_prime.get(&[a, j, b]).partial(k));
                        acc = &acc
                            - &(spec.rho.get(&[k, b]) * &spec.gamma_prime.get(&[a, j, cc]).partial(k));
                    }
                    acc = &acc
                        + &{
                            let mut s = BasePoly::zero(nv);
                            for k in 0..d {
                                s = &s + &(chk.get(&[b, j, k]) * spec.gamma_prime.get(&[a, k, cc]));
                                s = &s - &(chk.get(&[cc, j, k]) * spec.gamma_prime.get(&[a, k, b]));
                            }
                            s
                        };
                    rbas.set(&[b, cc, j, a], acc);
                }
            }
        }
    }

    BasicConnections { hat, chk, rbas }
}

pub fn report(spec: &GeometrySpec) -> AlgebroidReport {
    AlgebroidReport {
        anchor_residual: check_anchor(spec),
        bianchi_residual: check_bianchi(spec),
        basic: basic_connections(spec),
    }
}
