//! Dickson invariants D_1..D_n of GL_n(F_p) acting on F_p[y_1..y_n],
//! the Koszul regularity check, and the coinvariant Hilbert series.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bidegree::BiDegree;
use crate::error::{Error, Result};
use crate::fp::Fp;
use crate::groupring::{enumerate_group, GroupElement};
use crate::poly::{y_vars, FpPolynomial};
use crate::quotient::{DensePoly, MonomialSet, QuotientTable};

#[derive(Clone)]
pub struct DicksonSet {
    pub p: u32,
    pub n: usize,
    /// D_1..D_n; D_r is the literal coefficient of X^(p^(n-r)) in
    /// prod_v (X - v.y), of y-degree p^n - p^(n-r).
    pub invariants: Vec<FpPolynomial>,
}

impl DicksonSet {
    pub fn degrees(&self) -> Vec<usize> {
        let pn = (self.p as usize).pow(self.n as u32);
        (1..=self.n)
            .map(|r| pn - (self.p as usize).pow((self.n - r) as u32))
            .collect()
    }

    /// Dense forms over a monomial table (for the quotient machinery).
    pub fn dense(&self, mons: &MonomialSet) -> Vec<DensePoly> {
        self.invariants
            .iter()
            .map(|d| poly_to_dense(d, mons))
            .collect()
    }
}

/// Converts a homogeneous polynomial into per-degree dense coordinates.
pub fn poly_to_dense(poly: &FpPolynomial, mons: &MonomialSet) -> DensePoly {
    let degree = poly.exponent_degree() as usize;
    let mut coeffs = vec![0u32; mons.count(degree)];
    for (m, &c) in poly.terms() {
        debug_assert_eq!(m.total_exponent() as usize, degree, "homogeneous input");
        coeffs[mons.index_of(degree, &m.0)] = c;
    }
    DensePoly { degree, coeffs }
}

/// Expands prod_{v in F_p^n} (X - v.y) and reads off the coefficients.
///
/// All X-exponents with nonzero coefficient are powers of p (this is
/// asserted), the top coefficient is 1, and D_r is the coefficient of
/// X^(p^(n-r)).
pub fn dickson_invariants(p: u32, n: usize, cap: u64) -> Result<DicksonSet> {
    if !crate::fp::is_prime(p) {
        return Err(Error::Parameter(format!("{} is not prime", p)));
    }
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    let pn_big = (p as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if pn_big > 1024.min(cap) {
        return Err(Error::Resource(format!(
            "p^n = {} exceeds the expansion cap",
            pn_big
        )));
    }
    let pn = pn_big as usize;
    let vars = y_vars(n);
    let zero = FpPolynomial::zero(p, vars.clone());

    // coefficients of X^0 .. X^(p^n), starting from the constant 1
    let mut coeffs: Vec<FpPolynomial> = vec![zero.clone(); pn + 1];
    coeffs[0] = FpPolynomial::constant(p, vars.clone(), 1);
    let mut degree = 0usize;

    let mut v = vec![0u32; n];
    loop {
        // linear form v.y, negated
        let mut form = zero.clone();
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0 {
                form = form
                    .add(&FpPolynomial::variable(p, vars.clone(), i).scale(vi as i64))
                    .expect("same context");
            }
        }
        let neg_form = form.scale(-1);
        // multiply the X-polynomial by (X - v.y)
        let mut next: Vec<FpPolynomial> = vec![zero.clone(); pn + 1];
        for (i, c) in coeffs.iter().enumerate().take(degree + 1) {
            if c.is_zero() {
                continue;
            }
            next[i + 1] = next[i + 1].add(c).expect("same context");
            let lowered = c.mul(&neg_form).expect("same context");
            next[i] = next[i].add(&lowered).expect("same context");
        }
        coeffs = next;
        degree += 1;

        let mut j = n;
        loop {
            if j == 0 {
                // done: read off the invariants
                assert_eq!(degree, pn);
                let one = FpPolynomial::constant(p, vars.clone(), 1);
                assert_eq!(coeffs[pn], one, "top coefficient must be 1");
                for (i, c) in coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        assert!(
                            is_p_power(p, i as u64),
                            "X-exponent {} is not a power of p",
                            i
                        );
                    }
                }
                let invariants = (1..=n)
                    .map(|r| coeffs[(p as usize).pow((n - r) as u32)].clone())
                    .collect();
                return Ok(DicksonSet { p, n, invariants });
            }
            j -= 1;
            v[j] += 1;
            if v[j] < p {
                break;
            }
            v[j] = 0;
        }
    }
}

fn is_p_power(p: u32, mut x: u64) -> bool {
    if x == 0 {
        return false;
    }
    while x.is_multiple_of(p as u64) {
        x /= p as u64;
    }
    x == 1
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    pub group_order: u64,
    /// First failing (group element entries, invariant index 1..n), if any.
    pub failure: Option<(Vec<u32>, usize)>,
}

/// Substitutes g.y_j = sum_i g_ij y_i into each polynomial for every g in
/// GL_n(F_p) and reports whether all of them are fixed.
pub fn verify_invariance_of(p: u32, n: usize, polys: &[FpPolynomial], cap: u64) -> Result<InvarianceReport> {
    let group = enumerate_group(p, n, cap)?;
    for g in &group {
        let images = action_images(g);
        for (r, d) in polys.iter().enumerate() {
            if d.substitute_linear(&images) != *d {
                return Ok(InvarianceReport {
                    invariant: false,
                    group_order: group.len() as u64,
                    failure: Some((g.entries().to_vec(), r + 1)),
                });
            }
        }
    }
    Ok(InvarianceReport {
        invariant: true,
        group_order: group.len() as u64,
        failure: None,
    })
}

pub fn verify_invariance(ds: &DicksonSet, cap: u64) -> Result<InvarianceReport> {
    verify_invariance_of(ds.p, ds.n, &ds.invariants, cap)
}

/// images[j] = coefficients of the image of variable j, i.e. column j of g.
pub fn action_images(g: &GroupElement) -> Vec<Vec<u32>> {
    (0..g.n)
        .map(|j| (0..g.n).map(|i| g.get(i, j)).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct KoszulReport {
    pub degree_bound: usize,
    /// (homological index, internal degree) -> dimension, for indices >= 1;
    /// only nonzero entries are stored.
    pub higher_homology: BTreeMap<String, usize>,
    pub h0_dims: Vec<usize>,
    pub regular_within_bound: bool,
    /// False when the bound was too small to cover the socle.
    pub certified: bool,
}

/// Builds the Koszul complex on the given homogeneous sequence degree by
/// degree up to the bound and computes all homology dimensions.
pub fn koszul_regularity(
    p: u32,
    n_vars: usize,
    sequence: &[FpPolynomial],
    degree_bound: usize,
) -> Result<KoszulReport> {
    let k = sequence.len();
    if k > 20 {
        return Err(Error::Resource("sequence too long".into()));
    }
    let mut mons = MonomialSet::new(n_vars);
    mons.ensure(degree_bound + 1);
    let dense: Vec<DensePoly> = sequence.iter().map(|f| poly_to_dense(f, &mons)).collect();
    let weights: Vec<usize> = dense.iter().map(|f| f.degree).collect();

    // basis of K_i in internal degree d: (subset mask of size i, monomial)
    let subset_weight = |mask: usize| -> usize {
        (0..k).filter(|&t| mask >> t & 1 == 1).map(|t| weights[t]).sum()
    };
    let masks_by_size: Vec<Vec<usize>> = (0..=k)
        .map(|i| (0..(1usize << k)).filter(|m| m.count_ones() as usize == i).collect())
        .collect();

    let f = Fp(p);
    let mut higher = BTreeMap::new();
    let mut h0_dims = Vec::new();
    let mut regular = true;

    for d in 0..=degree_bound {
        // dimensions and index offsets of K_i at degree d
        let block_dims: Vec<Vec<(usize, usize)>> = masks_by_size
            .iter()
            .map(|masks| {
                masks
                    .iter()
                    .map(|&m| {
                        let w = subset_weight(m);
                        (m, if w > d { 0 } else { mons.count(d - w) })
                    })
                    .collect()
            })
            .collect();
        let dim_of = |i: usize| -> usize { block_dims[i].iter().map(|&(_, c)| c).sum() };

        // rank of d_i : K_i -> K_(i-1) at this degree
        let mut ranks = vec![0usize; k + 2];
        for i in 1..=k {
            let rows = dim_of(i - 1);
            let cols = dim_of(i);
            if rows == 0 || cols == 0 {
                continue;
            }
            let mut offsets = BTreeMap::new();
            let mut off = 0;
            for &(m, c) in &block_dims[i - 1] {
                offsets.insert(m, off);
                off += c;
            }
            let mut ech = crate::linalg::Echelon::new(p, rows);
            for &(mask, c) in &block_dims[i] {
                if c == 0 {
                    continue;
                }
                let w = subset_weight(mask);
                for mi in 0..c {
                    let mut col = vec![0u32; rows];
                    let mut pos = 0;
                    for t in 0..k {
                        if mask >> t & 1 == 0 {
                            continue;
                        }
                        let sub = mask & !(1 << t);
                        let sign = if pos % 2 == 0 { 1 } else { f.neg(1) };
                        pos += 1;
                        // f_t * monomial, placed in the (sub) block
                        let exp = mons.monomials(d - w)[mi].clone();
                        let term = dense[t].mul_monomial(&mons, &exp);
                        let base = offsets[&sub];
                        for (j, &cc) in term.coeffs.iter().enumerate() {
                            if cc != 0 {
                                col[base + j] = f.add(col[base + j], f.mul(sign, cc));
                            }
                        }
                    }
                    ech.insert(&col);
                }
            }
            ranks[i] = ech.rank();
        }

        h0_dims.push(dim_of(0) - ranks[1]);
        for i in 1..=k {
            let dim = dim_of(i);
            if dim == 0 {
                continue;
            }
            let h = dim - ranks[i] - ranks[i + 1];
            if h > 0 {
                higher.insert(format!("H{}[{}]", i, d), h);
                regular = false;
            }
        }
    }

    let socle_cover: usize = weights.iter().sum();
    Ok(KoszulReport {
        degree_bound,
        higher_homology: higher,
        h0_dims,
        regular_within_bound: regular,
        certified: regular && degree_bound >= socle_cover,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HilbertReport {
    /// Per y-degree dimensions of S tensored over the invariants with F_p.
    pub y_dims: Vec<u64>,
    /// Bigraded dimension table (optionally including the exterior factor).
    pub table: BTreeMap<String, u64>,
    pub total: u64,
    /// Whether the quotient dimensions match prod_r (1-T^{d_r})/(1-T).
    pub closed_form_ok: bool,
    pub with_exterior: bool,
}

/// Dimensions of the coinvariant algebra by elimination per degree (the
/// direct-quotient route), cross-checked against the closed product formula,
/// optionally tensored with the exterior algebra on x_1..x_n in (1)[1].
pub fn coinvariant_hilbert_series(ds: &DicksonSet, with_exterior: bool) -> Result<HilbertReport> {
    let degrees = ds.degrees();
    let socle: usize = degrees.iter().map(|d| d - 1).sum();
    let mut mons = MonomialSet::new(ds.n);
    mons.ensure(socle + 2);
    let gens = ds.dense(&mons);
    let q = QuotientTable::build(ds.p, ds.n, &gens, socle + 1);
    let mut y_dims: Vec<u64> = q.dims().iter().map(|&d| d as u64).collect();
    if y_dims.last() == Some(&0) {
        y_dims.pop();
    }

    // closed form: product of [d_r]_T = 1 + T + ... + T^(d_r - 1)
    let mut closed = vec![1u64];
    for &d in &degrees {
        let mut next = vec![0u64; closed.len() + d - 1];
        for (i, &c) in closed.iter().enumerate() {
            for j in 0..d {
                next[i + j] += c;
            }
        }
        closed = next;
    }
    let closed_form_ok = {
        let mut a = y_dims.clone();
        let mut b = closed.clone();
        while a.last() == Some(&0) {
            a.pop();
        }
        while b.last() == Some(&0) {
            b.pop();
        }
        a == b
    };

    let mut table: BTreeMap<BiDegree, u64> = BTreeMap::new();
    for (d, &dim) in y_dims.iter().enumerate() {
        if dim == 0 {
            continue;
        }
        if with_exterior {
            for s in 0..=ds.n {
                let mult = binomial(ds.n, s);
                let b = BiDegree::new((d + s) as i64, (2 * d + s) as i64);
                *table.entry(b).or_insert(0) += dim * mult;
            }
        } else {
            *table.entry(BiDegree::new(d as i64, 2 * d as i64)).or_insert(0) += dim;
        }
    }
    let total: u64 = table.values().sum();
    Ok(HilbertReport {
        y_dims,
        table: table.into_iter().map(|(b, v)| (b.to_string(), v)).collect(),
        total,
        closed_form_ok,
        with_exterior,
    })
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Truncated bigraded series of the exterior factor on generators z_i,
/// 1 <= i <= p^n with i != p^n - p^s, of bidegree (i)[2i-1]; the factor is
/// never realized as a module, only counted.
pub fn z_exterior_series(p: u32, n: usize, weight_bound: i64) -> BTreeMap<BiDegree, u64> {
    let pn = (p as i64).pow(n as u32);
    let skipped: Vec<i64> = (0..n as u32).map(|s| pn - (p as i64).pow(s)).collect();
    let mut series: BTreeMap<BiDegree, u64> = BTreeMap::new();
    series.insert(BiDegree::ZERO, 1);
    for i in 1..=pn {
        if skipped.contains(&i) {
            continue;
        }
        let z = BiDegree::new(i, 2 * i - 1);
        let mut next = series.clone();
        for (&b, &c) in &series {
            let nb = b + z;
            if nb.weight <= weight_bound {
                *next.entry(nb).or_insert(0) += c;
            }
        }
        series = next;
    }
    series
}
