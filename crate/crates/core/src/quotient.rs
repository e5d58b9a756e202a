//! Degree-by-degree monomial tables and normal forms modulo a homogeneous
//! ideal, computed by exact elimination over F_p (no Groebner machinery).

use std::collections::BTreeMap;

use crate::fp::Fp;
use crate::linalg::Echelon;

/// Monomials of F_p[x_1..x_n] enumerated per total degree in a fixed
/// (ascending lexicographic) order.
pub struct MonomialSet {
    pub n_vars: usize,
    by_degree: Vec<Vec<Vec<u16>>>,
    index: Vec<BTreeMap<Vec<u16>, usize>>,
}

impl MonomialSet {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            by_degree: Vec::new(),
            index: Vec::new(),
        }
    }

    pub fn ensure(&mut self, degree: usize) {
        while self.by_degree.len() <= degree {
            let d = self.by_degree.len();
            let mut list = Vec::new();
            let mut exp = vec![0u16; self.n_vars];
            enumerate(&mut list, &mut exp, 0, d);
            let idx = list
                .iter()
                .enumerate()
                .map(|(i, m)| (m.clone(), i))
                .collect();
            self.by_degree.push(list);
            self.index.push(idx);
        }
    }

    pub fn count(&self, degree: usize) -> usize {
        self.by_degree[degree].len()
    }

    pub fn monomials(&self, degree: usize) -> &[Vec<u16>] {
        &self.by_degree[degree]
    }

    pub fn index_of(&self, degree: usize, exp: &[u16]) -> usize {
        self.index[degree][exp]
    }

    /// Index at degree d+1 of (monomial at degree d) * variable `var`.
    pub fn mul_var(&self, degree: usize, idx: usize, var: usize) -> usize {
        let mut exp = self.by_degree[degree][idx].clone();
        exp[var] += 1;
        self.index_of(degree + 1, &exp)
    }
}

fn enumerate(list: &mut Vec<Vec<u16>>, exp: &mut Vec<u16>, var: usize, remaining: usize) {
    if var + 1 == exp.len() {
        exp[var] = remaining as u16;
        list.push(exp.clone());
        exp[var] = 0;
        return;
    }
    for e in 0..=remaining {
        exp[var] = e as u16;
        enumerate(list, exp, var + 1, remaining - e);
    }
    exp[var] = 0;
}

/// A homogeneous polynomial in dense per-degree coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePoly {
    pub degree: usize,
    pub coeffs: Vec<u32>,
}

impl DensePoly {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Multiplies by a linear form with coefficients `form` over the variables.
    pub fn mul_linear(&self, mons: &MonomialSet, p: u32, form: &[u32]) -> DensePoly {
        let f = Fp(p);
        let d = self.degree;
        let mut out = vec![0u32; mons.count(d + 1)];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (v, &fc) in form.iter().enumerate() {
                if fc != 0 {
                    let j = mons.mul_var(d, i, v);
                    out[j] = f.add(out[j], f.mul(c, fc));
                }
            }
        }
        DensePoly {
            degree: d + 1,
            coeffs: out,
        }
    }

    /// Multiplies by a single monomial of degree `shift`.
    pub fn mul_monomial(&self, mons: &MonomialSet, shift_exp: &[u16]) -> DensePoly {
        let shift: usize = shift_exp.iter().map(|&e| e as usize).sum();
        let d = self.degree;
        let mut out = vec![0u32; mons.count(d + shift)];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut exp = mons.monomials(d)[i].clone();
            for (e, &s) in exp.iter_mut().zip(shift_exp) {
                *e += s;
            }
            out[mons.index_of(d + shift, &exp)] = c;
        }
        DensePoly {
            degree: d + shift,
            coeffs: out,
        }
    }
}

struct DegreeTable {
    /// Monomial indices spanning the quotient in this degree, ascending.
    complement: Vec<usize>,
    /// Per monomial index, its normal form over `complement`.
    nf: Vec<Vec<u32>>,
}

/// Normal forms modulo the homogeneous ideal generated by `gens`, degree by
/// degree up to a bound. The complement in each degree is the
/// lexicographically least monomial set (elimination pivots are chosen
/// rightmost, i.e. on the greatest monomials).
pub struct QuotientTable {
    pub p: u32,
    pub mons: MonomialSet,
    pub max_degree: usize,
    tables: Vec<DegreeTable>,
}

impl QuotientTable {
    pub fn build(p: u32, n_vars: usize, gens: &[DensePoly], max_degree: usize) -> Self {
        let mut mons = MonomialSet::new(n_vars);
        mons.ensure(max_degree + 1);
        let f = Fp(p);
        let mut tables = Vec::with_capacity(max_degree + 1);
        for d in 0..=max_degree {
            let dim = mons.count(d);
            let mut ech = Echelon::new_rightmost(p, dim);
            for g in gens {
                if g.degree > d {
                    continue;
                }
                let shift = d - g.degree;
                for nu in 0..mons.count(shift) {
                    let exp = mons.monomials(shift)[nu].clone();
                    let row = g.mul_monomial(&mons, &exp);
                    ech.insert(&row.coeffs);
                }
            }
            let complement = ech.complement_positions();
            let comp_pos: BTreeMap<usize, usize> = complement
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, i))
                .collect();
            let mut nf = vec![vec![0u32; complement.len()]; dim];
            for (i, row) in nf.iter_mut().enumerate() {
                if let Some(&ci) = comp_pos.get(&i) {
                    row[ci] = 1;
                }
            }
            for (erow, &piv) in ech.rows.iter().zip(&ech.pivots) {
                // pivot monomial reduces to minus the off-pivot part
                for (j, &c) in erow.iter().enumerate() {
                    if c != 0 && j != piv {
                        let ci = comp_pos[&j];
                        nf[piv][ci] = f.neg(c);
                    }
                }
            }
            tables.push(DegreeTable { complement, nf });
        }
        Self {
            p,
            mons,
            max_degree,
            tables,
        }
    }

    pub fn quotient_dim(&self, degree: usize) -> usize {
        self.tables[degree].complement.len()
    }

    pub fn total_dim(&self) -> usize {
        self.tables.iter().map(|t| t.complement.len()).sum()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.tables.iter().map(|t| t.complement.len()).collect()
    }

    /// Monomial indices of the canonical quotient basis at `degree`.
    pub fn basis_monomials(&self, degree: usize) -> &[usize] {
        &self.tables[degree].complement
    }

    /// Normal form of a single monomial, as coordinates over the basis.
    pub fn nf_monomial(&self, degree: usize, idx: usize) -> &[u32] {
        &self.tables[degree].nf[idx]
    }

    /// Normal form of a dense homogeneous polynomial.
    pub fn reduce(&self, poly: &DensePoly) -> Vec<u32> {
        let f = Fp(self.p);
        let t = &self.tables[poly.degree];
        let mut out = vec![0u32; t.complement.len()];
        for (i, &c) in poly.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &n) in out.iter_mut().zip(&t.nf[i]) {
                *o = f.add(*o, f.mul(c, n));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        let mut m = MonomialSet::new(3);
        m.ensure(5);
        assert_eq!(m.count(0), 1);
        assert_eq!(m.count(1), 3);
        assert_eq!(m.count(4), 15); // C(6,2)
        let i = m.index_of(1, &[0, 1, 0]);
        assert_eq!(m.mul_var(1, i, 2), m.index_of(2, &[0, 1, 1]));
    }

    #[test]
    fn quotient_by_square() {
        // F_3[y]/(y^2): dims 1,1,0,0...
        let mut mons = MonomialSet::new(1);
        mons.ensure(3);
        let gen = DensePoly {
            degree: 2,
            coeffs: vec![1],
        };
        let q = QuotientTable::build(3, 1, &[gen], 3);
        assert_eq!(q.dims(), vec![1, 1, 0, 0]);
    }

    #[test]
    fn complement_is_lex_least() {
        // F_2[a,b]/(a + b) in degree 1: the ideal row is (1,1) over the
        // ascending monomial list [b, a]; the pivot lands on a, so the
        // canonical complement keeps the least monomial b (index 0).
        let gen = DensePoly {
            degree: 1,
            coeffs: vec![1, 1],
        };
        let q = QuotientTable::build(2, 2, &[gen], 2);
        assert_eq!(q.basis_monomials(1), &[0]);
        // a reduces to b: nf of index 1 is [1] over complement [index 0]
        assert_eq!(q.nf_monomial(1, 1), &[1]);
    }
}
