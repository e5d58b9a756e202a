//! The p = 2 topological-realization side: F_2[x1..xn]/(Dt_1^2..Dt_n^2)
//! with Q_i(x_j) = x_j^(2^(i+1)) as derivations, where Dt_r are the Dickson
//! invariants in the x-variables, plus the grading-collapse comparison with
//! the motivic module (y_j -> x_j^2, x_j -> x_j, (i)[j] -> [j]).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bidegree::BiDegree;
use crate::bigraded::{BasisVector, BigradedVectorSpace, ProjectedModule, QModule, QOp};
use crate::coinvariant::CoinvariantModule;
use crate::dickson::{dickson_invariants, poly_to_dense};
use crate::error::{Error, Result};
use crate::fp::Fp;
use crate::groupring::{GroupElement, GroupRingElement};
use crate::linalg::FpMatrix;
use crate::poly::{x_vars_graded, FpPolynomial};
use crate::quotient::{DensePoly, MonomialSet, QuotientTable};

pub struct FrobeniusModule {
    pub n: usize,
    pub socle: usize,
    table: QuotientTable,
    /// (degree, position in the canonical quotient basis of that degree).
    pub basis: Vec<(usize, usize)>,
    index: BTreeMap<(usize, usize), usize>,
    q_mats: Vec<FpMatrix>,
}

impl FrobeniusModule {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn label(&self, i: usize) -> String {
        let (d, pos) = self.basis[i];
        let mono = &self.table.mons.monomials(d)[self.table.basis_monomials(d)[pos]];
        let mut factors: Vec<String> = Vec::new();
        for (v, &exp) in mono.iter().enumerate() {
            match exp {
                0 => {}
                1 => factors.push(format!("x{}", v + 1)),
                _ => factors.push(format!("x{}^{}", v + 1, exp)),
            }
        }
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        }
    }

    pub fn q_matrix(&self, m: usize) -> Option<&FpMatrix> {
        self.q_mats.get(m)
    }

    pub fn milnor_q(&self, m: usize, v: &[u32]) -> Result<Vec<u32>> {
        let mat = self
            .q_mats
            .get(m)
            .ok_or_else(|| Error::Parameter(format!("Q_{} is not installed", m)))?;
        Ok(mat.apply(v))
    }

    pub fn action_matrix(&self, g: &GroupElement) -> FpMatrix {
        assert_eq!((g.p, g.n), (2, self.n), "group parameters must match");
        let mons = &self.table.mons;
        let n = self.n;
        let dim = self.dim();
        let mut out = FpMatrix::zeros(2, dim, dim);
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
                    cur.push(prev[pidx].mul_linear(mons, 2, &col));
                }
                prev = cur;
            }
            for (pos, &midx) in self.table.basis_monomials(d).iter().enumerate() {
                let red = self.table.reduce(&prev[midx]);
                let col = self.index[&(d, pos)];
                for (pos2, &c) in red.iter().enumerate() {
                    if c != 0 {
                        let row = self.index[&(d, pos2)];
                        out.set(row, col, c);
                    }
                }
            }
        }
        out
    }

    /// Single grading d is carried as the bidegree (0)[d].
    pub fn to_qmodule(&self) -> QModule {
        let space = BigradedVectorSpace {
            p: 2,
            basis: (0..self.dim())
                .map(|i| BasisVector {
                    label: self.label(i),
                    bidegree: BiDegree::new(0, self.basis[i].0 as i64),
                })
                .collect(),
        };
        let ops = self
            .q_mats
            .iter()
            .enumerate()
            .map(|(i, m)| {
                (
                    i,
                    QOp {
                        shift: BiDegree::new(0, (1i64 << (i + 1)) - 1),
                        matrix: m.clone(),
                    },
                )
            })
            .collect();
        QModule { space, ops }
    }

    pub fn apply_idempotent(&self, e: &GroupRingElement) -> Result<ProjectedModule> {
        if (e.p, e.n) != (2, self.n) {
            return Err(Error::Config("group parameters do not match the module".into()));
        }
        crate::bigraded::project_module(&self.to_qmodule(), |g| self.action_matrix(g), e)
    }
}

/// Builds F_2[x1..xn]/(Dt_1^2, ..., Dt_n^2) with Q_0..Q_(n-2) installed.
pub fn build_frobenius_module(n: usize, cap: u64) -> Result<FrobeniusModule> {
    if n < 2 {
        return Err(Error::Parameter("the Frobenius variant needs n >= 2".into()));
    }
    let ds = dickson_invariants(2, n, cap)?;
    let degrees = ds.degrees();
    let dim: u64 = degrees.iter().map(|&d| 2 * d as u64).product();
    if dim > cap {
        return Err(Error::Resource(format!(
            "module dimension {} exceeds the cap {}",
            dim, cap
        )));
    }
    let socle: usize = degrees.iter().map(|d| 2 * d - 1).sum();
    let n_ops = n - 1; // Q_0..Q_(n-2)
    let max_shift = (1usize << n_ops) - 1;
    let max_degree = socle + max_shift;

    let mut mons = MonomialSet::new(n);
    mons.ensure(max_degree + 1);
    let gens: Vec<DensePoly> = ds
        .invariants
        .iter()
        .map(|d| {
            let sq = d.mul(d).expect("same context");
            poly_to_dense(&sq, &mons)
        })
        .collect();
    let table = QuotientTable::build(2, n, &gens, max_degree);
    for d in (socle + 1)..=max_degree {
        assert_eq!(table.quotient_dim(d), 0, "quotient must vanish above the socle");
    }

    let mut basis = Vec::new();
    let mut index = BTreeMap::new();
    for d in 0..=socle {
        for pos in 0..table.quotient_dim(d) {
            index.insert((d, pos), basis.len());
            basis.push((d, pos));
        }
    }
    assert_eq!(basis.len() as u64, dim, "dim must equal prod_r 2(2^n - 2^(n-r))");

    let f = Fp(2);
    let total = basis.len();
    let mut q_mats = Vec::new();
    for i in 0..n_ops {
        let shift = (1usize << (i + 1)) - 1;
        let mut mat = FpMatrix::zeros(2, total, total);
        for (col, &(d, pos)) in basis.iter().enumerate() {
            if d + shift > socle {
                continue;
            }
            let midx = table.basis_monomials(d)[pos];
            let exps = table.mons.monomials(d)[midx].clone();
            for j in 0..n {
                if exps[j].is_multiple_of(2) {
                    continue; // even exponents die in the mod-2 derivation
                }
                let mut target = exps.clone();
                target[j] += shift as u16;
                let tidx = table.mons.index_of(d + shift, &target);
                let nf = table.nf_monomial(d + shift, tidx);
                for (pos2, &c) in nf.iter().enumerate() {
                    if c != 0 {
                        let row = index[&(d + shift, pos2)];
                        let v = f.add(mat.get(row, col), c);
                        mat.set(row, col, v);
                    }
                }
            }
        }
        q_mats.push(mat);
    }

    Ok(FrobeniusModule {
        n,
        socle,
        table,
        basis,
        index,
        q_mats,
    })
}

/// Verifies the realization identity: substituting y_j -> x_j^2 into D_r(y)
/// yields exactly Dt_r(x)^2.
pub fn frobenius_realization_check(n: usize, cap: u64) -> Result<bool> {
    let ds = dickson_invariants(2, n, cap)?;
    let xvars = x_vars_graded(n, 1);
    for d in &ds.invariants {
        let doubled = FpPolynomial::from_terms(
            2,
            xvars.clone(),
            d.terms()
                .iter()
                .map(|(m, &c)| (m.0.iter().map(|&e| e * 2).collect::<Vec<u16>>(), c as i64)),
        );
        let relabeled = FpPolynomial::from_terms(
            2,
            xvars.clone(),
            d.terms().iter().map(|(m, &c)| (m.0.clone(), c as i64)),
        );
        let squared = relabeled.mul(&relabeled).expect("same context");
        if doubled != squared {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct QIntertwine {
    pub op: usize,
    pub exact: bool,
    pub discrepancies: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RealizationReport {
    /// (total degree j, motivic dimension, Frobenius dimension).
    pub degree_dims: Vec<(usize, usize, usize)>,
    pub iso: bool,
    pub q_intertwine: Vec<QIntertwine>,
}

/// Collapses the motivic bigrading (i)[j] -> [j] via y_j -> x_j^2,
/// x_j -> x_j and compares graded dimensions and Q-actions.
pub fn realize_topologically(
    module: &CoinvariantModule,
    fm: &FrobeniusModule,
) -> Result<RealizationReport> {
    if module.p != 2 || module.n != fm.n {
        return Err(Error::Config(
            "realization needs a p = 2 module and a matching Frobenius module".into(),
        ));
    }
    let n = module.n;

    // graded dimension profiles under (i)[j] -> [j]
    let mut mot_dims: BTreeMap<usize, usize> = BTreeMap::new();
    for b in &module.basis {
        *mot_dims.entry(b.bidegree.degree as usize).or_insert(0) += 1;
    }
    let mut frob_dims: BTreeMap<usize, usize> = BTreeMap::new();
    for &(d, _) in &fm.basis {
        *frob_dims.entry(d).or_insert(0) += 1;
    }
    if mot_dims != frob_dims {
        return Err(Error::Structure(
            "graded dimensions disagree after the collapse".into(),
        ));
    }
    let degree_dims: Vec<(usize, usize, usize)> = mot_dims
        .iter()
        .map(|(&j, &d)| (j, d, frob_dims[&j]))
        .collect();

    // the comparison map on basis monomials: y^a x_S -> x^(2a + 1_S)
    let dim = module.dim();
    let mut phi = FpMatrix::zeros(2, fm.dim(), dim);
    for (col, elt) in module.basis.iter().enumerate() {
        let d = elt.y_degree;
        let midx = module_basis_monomial(module, elt.y_pos, d);
        let target_degree = 2 * d + elt.x_mask.count_ones() as usize;
        let mut exps: Vec<u16> = midx.iter().map(|&e| e * 2).collect();
        for t in 0..n {
            if elt.x_mask >> t & 1 == 1 {
                exps[t] += 1;
            }
        }
        let tidx = fm.table.mons.index_of(target_degree, &exps);
        let nf = fm.table.nf_monomial(target_degree, tidx);
        for (pos2, &c) in nf.iter().enumerate() {
            if c != 0 {
                phi.set(fm.index[&(target_degree, pos2)], col, c);
            }
        }
    }
    let iso = phi.rank() == dim;
    if !iso {
        return Err(Error::Structure("the collapse map is not bijective".into()));
    }

    let mut q_intertwine = Vec::new();
    for i in 0..fm.q_mats.len() {
        let lhs = fm.q_mats[i].mul(&phi);
        let rhs = phi.mul(module.q_matrix(i).expect("motivic module installs Q_i"));
        let mut discrepancies = 0;
        for r in 0..lhs.rows {
            for c in 0..lhs.cols {
                if lhs.get(r, c) != rhs.get(r, c) {
                    discrepancies += 1;
                }
            }
        }
        q_intertwine.push(QIntertwine {
            op: i,
            exact: discrepancies == 0,
            discrepancies,
        });
    }

    Ok(RealizationReport {
        degree_dims,
        iso,
        q_intertwine,
    })
}

fn module_basis_monomial(module: &CoinvariantModule, y_pos: usize, degree: usize) -> Vec<u16> {
    module.y_basis_monomial(degree, y_pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coinvariant::build_module;
    use crate::groupring::steinberg_idempotent;
    use crate::DEFAULT_CAP;

    #[test]
    fn frobenius_n2_dimension() {
        let fm = build_frobenius_module(2, DEFAULT_CAP).unwrap();
        assert_eq!(fm.dim(), 24); // 2*2 * 2*3
        assert_eq!(fm.socle, 8);
    }

    #[test]
    fn q0_is_squaring_on_generators() {
        let fm = build_frobenius_module(2, DEFAULT_CAP).unwrap();
        let x1 = fm
            .basis
            .iter()
            .position(|&(d, pos)| {
                d == 1 && fm.table.mons.monomials(1)[fm.table.basis_monomials(1)[pos]] == vec![1, 0]
            })
            .unwrap();
        let mut v = vec![0u32; fm.dim()];
        v[x1] = 1;
        let img = fm.milnor_q(0, &v).unwrap();
        let x1sq = fm
            .basis
            .iter()
            .position(|&(d, pos)| {
                d == 2 && fm.table.mons.monomials(2)[fm.table.basis_monomials(2)[pos]] == vec![2, 0]
            })
            .unwrap();
        let mut expected = vec![0u32; fm.dim()];
        expected[x1sq] = 1;
        assert_eq!(img, expected);
    }

    #[test]
    fn realization_identity() {
        assert!(frobenius_realization_check(2, DEFAULT_CAP).unwrap());
        assert!(frobenius_realization_check(3, DEFAULT_CAP).unwrap());
    }

    #[test]
    fn q_relations_hold() {
        let fm = build_frobenius_module(2, DEFAULT_CAP).unwrap();
        fm.to_qmodule().check_q_relations().unwrap();
    }

    #[test]
    fn collapse_comparison_2_2() {
        let m = build_module(2, 2, DEFAULT_CAP).unwrap();
        let fm = build_frobenius_module(2, DEFAULT_CAP).unwrap();
        let rep = realize_topologically(&m, &fm).unwrap();
        assert!(rep.iso);
        let total: usize = rep.degree_dims.iter().map(|&(_, a, _)| a).sum();
        assert_eq!(total, 24);
        for q in &rep.q_intertwine {
            assert!(q.exact, "Q_{} should intertwine exactly", q.op);
        }
    }

    #[test]
    fn steinberg_summand_exists() {
        let fm = build_frobenius_module(2, DEFAULT_CAP).unwrap();
        let e0 = steinberg_idempotent(2, 2, 0, DEFAULT_CAP).unwrap();
        let proj = fm.apply_idempotent(&e0.element).unwrap();
        assert!(proj.projector_rank > 0);
        assert_eq!(proj.projector_rank % 2, 0); // free over Lambda(Q_0)
    }
}
