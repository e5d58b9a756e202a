//! The bigraded module L = (S (x)_{S^G} F_p) (x) Lambda(x_1..x_n) with its
//! GL_n(F_p)-action and Milnor operators Q_i, and Steinberg-summand
//! extraction.
//!
//! The y-part is the coinvariant algebra F_p[y]/(D_1..D_n) reduced per
//! degree by elimination; the exterior part is carried as subset masks with
//! explicit Koszul signs. Q_i(x_j) = y_j^(p^i), Q_i(y_j) = 0, extended as an
//! odd derivation; the group acts by linear substitution on both kinds of
//! generators, which commutes with every Q_i because entries of g are fixed
//! by the Frobenius.

use std::collections::BTreeMap;

use crate::bidegree::BiDegree;
use crate::bigraded::{BasisVector, BigradedVectorSpace, ProjectedModule, QModule, QOp};
use crate::dickson::dickson_invariants;
use crate::error::{Error, Result};
use crate::fp::Fp;
use crate::groupring::{GroupElement, GroupRingElement};
use crate::linalg::FpMatrix;
use crate::quotient::{DensePoly, QuotientTable};

#[derive(Clone, Debug)]
pub struct CoinvBasisElt {
    pub y_degree: usize,
    /// Position in the canonical quotient basis of that degree.
    pub y_pos: usize,
    pub x_mask: u32,
    pub bidegree: BiDegree,
}

pub struct CoinvariantModule {
    pub p: u32,
    pub n: usize,
    pub socle: usize,
    table: QuotientTable,
    pub basis: Vec<CoinvBasisElt>,
    index: BTreeMap<(usize, usize, u32), usize>,
    q_mats: Vec<FpMatrix>,
}

impl CoinvariantModule {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn label(&self, i: usize) -> String {
        let e = &self.basis[i];
        let mono = self.table.mons.monomials(e.y_degree)[self.table.basis_monomials(e.y_degree)[e.y_pos]].clone();
        let mut factors: Vec<String> = Vec::new();
        for (v, &exp) in mono.iter().enumerate() {
            match exp {
                0 => {}
                1 => factors.push(format!("y{}", v + 1)),
                _ => factors.push(format!("y{}^{}", v + 1, exp)),
            }
        }
        for t in 0..self.n {
            if e.x_mask >> t & 1 == 1 {
                factors.push(format!("x{}", t + 1));
            }
        }
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        }
    }

    /// The Milnor operator Q_m applied to a coordinate vector.
    pub fn milnor_q(&self, m: usize, v: &[u32]) -> Result<Vec<u32>> {
        let mat = self
            .q_mats
            .get(m)
            .ok_or_else(|| Error::Parameter(format!("Q_{} exceeds the configured maximum", m)))?;
        Ok(mat.apply(v))
    }

    pub fn q_matrix(&self, m: usize) -> Option<&FpMatrix> {
        self.q_mats.get(m)
    }

    /// Exponent vector of the canonical y-basis monomial at (degree, pos).
    pub fn y_basis_monomial(&self, degree: usize, pos: usize) -> Vec<u16> {
        self.table.mons.monomials(degree)[self.table.basis_monomials(degree)[pos]].clone()
    }

    /// Action matrix of a group element: substitution then reduction on the
    /// y-part, exterior-power minors on the x-part.
    pub fn action_matrix(&self, g: &GroupElement) -> FpMatrix {
        assert_eq!((g.p, g.n), (self.p, self.n), "group parameters must match");
        let f = Fp(self.p);
        let n = self.n;
        let mons = &self.table.mons;

        // minors: coefficient of x_T in g(x_S) is det g[T, S]
        let minors = exterior_minors(g);

        // reduced y-action per degree, built by extending images one
        // variable at a time
        let dim = self.dim();
        let mut out = FpMatrix::zeros(self.p, dim, dim);
        let mut prev: Vec<DensePoly> = vec![DensePoly {
            degree: 0,
            coeffs: vec![1],
        }];
        for d in 0..=self.socle {
            if d > 0 {
                let mut cur = Vec::with_capacity(mons.count(d));
                for idx in 0..mons.count(d) {
                    let exps = mons.monomials(d)[idx].clone();
                    let v = exps.iter().position(|&e| e > 0).expect("degree > 0");
                    let mut parent = exps.clone();
                    parent[v] -= 1;
                    let pidx = mons.index_of(d - 1, &parent);
                    let col: Vec<u32> = (0..n).map(|i| g.get(i, v)).collect();
                    cur.push(prev[pidx].mul_linear(mons, self.p, &col));
                }
                prev = cur;
            }
            // columns of the action in this degree
            for (pos, &midx) in self.table.basis_monomials(d).iter().enumerate() {
                let red = self.table.reduce(&prev[midx]);
                for s_mask in 0u32..(1 << n) {
                    let col = self.index[&(d, pos, s_mask)];
                    for (pos2, &cy) in red.iter().enumerate() {
                        if cy == 0 {
                            continue;
                        }
                        for &(t_mask, cm) in &minors[s_mask as usize] {
                            if cm == 0 {
                                continue;
                            }
                            let row = self.index[&(d, pos2, t_mask)];
                            let v = f.add(out.get(row, col), f.mul(cy, cm));
                            out.set(row, col, v);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn to_qmodule(&self) -> QModule {
        let space = BigradedVectorSpace {
            p: self.p,
            basis: (0..self.dim())
                .map(|i| BasisVector {
                    label: self.label(i),
                    bidegree: self.basis[i].bidegree,
                })
                .collect(),
        };
        let ops = self
            .q_mats
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let pi = (self.p as i64).pow(i as u32);
                (
                    i,
                    QOp {
                        shift: BiDegree::new(pi - 1, 2 * pi - 1),
                        matrix: m.clone(),
                    },
                )
            })
            .collect();
        QModule { space, ops }
    }

    /// Image of the projector sum_g e(g) g, with all Q's restricted to it.
    pub fn apply_idempotent(&self, e: &GroupRingElement) -> Result<ProjectedModule> {
        if (e.p, e.n) != (self.p, self.n) {
            return Err(Error::Config("group parameters do not match the module".into()));
        }
        crate::bigraded::project_module(&self.to_qmodule(), |g| self.action_matrix(g), e)
    }
}

/// All minors det g[T, S] indexed by [s_mask][t_mask], t ranging over masks
/// of the same popcount as s.
fn exterior_minors(g: &GroupElement) -> Vec<Vec<(u32, u32)>> {
    let n = g.n;
    let f = Fp(g.p);
    (0u32..(1 << n))
        .map(|s_mask| {
            let s: Vec<usize> = (0..n).filter(|&j| s_mask >> j & 1 == 1).collect();
            (0u32..(1 << n))
                .filter(|t| t.count_ones() == s_mask.count_ones())
                .map(|t_mask| {
                    let t: Vec<usize> = (0..n).filter(|&j| t_mask >> j & 1 == 1).collect();
                    (t_mask, submatrix_det(f, g, &t, &s))
                })
                .collect()
        })
        .collect()
}

fn submatrix_det(f: Fp, g: &GroupElement, rows: &[usize], cols: &[usize]) -> u32 {
    let k = rows.len();
    if k == 0 {
        return 1;
    }
    let mut m: Vec<u32> = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| g.get(r, c)))
        .collect();
    let mut det = 1u32;
    for c in 0..k {
        let Some(pr) = (c..k).find(|&r| m[r * k + c] != 0) else {
            return 0;
        };
        if pr != c {
            for j in 0..k {
                m.swap(c * k + j, pr * k + j);
            }
            det = f.neg(det);
        }
        let piv = m[c * k + c];
        det = f.mul(det, piv);
        let inv = f.inv(piv);
        for r in (c + 1)..k {
            let factor = f.mul(m[r * k + c], inv);
            if factor != 0 {
                for j in c..k {
                    m[r * k + j] = f.sub(m[r * k + j], f.mul(factor, m[c * k + j]));
                }
            }
        }
    }
    det
}

/// Builds the module for (p, n): monomial basis of F_p[y]/(D_1..D_n)
/// tensored with all x-subsets, with Q_0..Q_(n-1) installed.
pub fn build_module(p: u32, n: usize, cap: u64) -> Result<CoinvariantModule> {
    let ds = dickson_invariants(p, n, cap)?;
    let degrees = ds.degrees();
    let dim: u64 = degrees.iter().map(|&d| d as u64).product::<u64>() << n;
    if dim > cap {
        return Err(Error::Resource(format!(
            "module dimension {} exceeds the cap {}",
            dim, cap
        )));
    }
    let socle: usize = degrees.iter().map(|d| d - 1).sum();
    let max_shift = (p as usize).pow((n - 1) as u32);
    let max_degree = socle + max_shift;

    let mut mons = crate::quotient::MonomialSet::new(n);
    mons.ensure(max_degree + 1);
    let gens = ds.dense(&mons);
    let table = QuotientTable::build(p, n, &gens, max_degree);
    for d in (socle + 1)..=max_degree {
        assert_eq!(
            table.quotient_dim(d),
            0,
            "coinvariant algebra must vanish above its socle degree"
        );
    }

    let mut basis = Vec::new();
    let mut index = BTreeMap::new();
    for d in 0..=socle {
        for pos in 0..table.quotient_dim(d) {
            for x_mask in 0u32..(1 << n) {
                let s = x_mask.count_ones() as i64;
                let bidegree = BiDegree::new(d as i64 + s, 2 * d as i64 + s);
                let chow = bidegree.chow_level();
                assert!(
                    0 <= chow && chow <= n as i64,
                    "support window 0 <= 2i-j <= n violated"
                );
                index.insert((d, pos, x_mask), basis.len());
                basis.push(CoinvBasisElt {
                    y_degree: d,
                    y_pos: pos,
                    x_mask,
                    bidegree,
                });
            }
        }
    }
    assert_eq!(basis.len() as u64, dim);

    // Q_i as odd derivations: Q_i(y^a x_S) = sum over t in S with Koszul
    // sign of nf(y^a y_t^(p^i)) x_(S minus t)
    let f = Fp(p);
    let dim = basis.len();
    let mut q_mats = Vec::new();
    for i in 0..n {
        let shift = (p as usize).pow(i as u32);
        let mut mat = FpMatrix::zeros(p, dim, dim);
        for (col, elt) in basis.iter().enumerate() {
            let d = elt.y_degree;
            let midx = table.basis_monomials(d)[elt.y_pos];
            let exps = table.mons.monomials(d)[midx].clone();
            let mut sign = 1u32; // (+1) as an F_p scalar, flipped per passed x
            for t in 0..n {
                if elt.x_mask >> t & 1 == 0 {
                    continue;
                }
                let mut target = exps.clone();
                target[t] += shift as u16;
                let tidx = table.mons.index_of(d + shift, &target);
                let nf = table.nf_monomial(d + shift, tidx);
                let new_mask = elt.x_mask & !(1 << t);
                for (pos2, &c) in nf.iter().enumerate() {
                    if c != 0 {
                        let row = index[&(d + shift, pos2, new_mask)];
                        let v = f.add(mat.get(row, col), f.mul(sign, c));
                        mat.set(row, col, v);
                    }
                }
                sign = f.neg(sign);
            }
        }
        q_mats.push(mat);
    }

    Ok(CoinvariantModule {
        p,
        n,
        socle,
        table,
        basis,
        index,
        q_mats,
    })
}
