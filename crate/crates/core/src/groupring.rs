//! GL_n(F_p): exhaustive enumeration, the Borel/unipotent/permutation
//! subgroups, and Steinberg idempotents e_k in the p-local group ring.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp::{is_prime, Fp};
use crate::plocal::PLocalRational;

/// An invertible n x n matrix over F_p, stored row-major. The derived
/// ordering on the raw entries is the canonical total order on the group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    pub p: u32,
    pub n: usize,
    entries: Vec<u32>,
}

impl GroupElement {
    pub fn new(p: u32, n: usize, entries: Vec<u32>) -> Result<Self> {
        assert_eq!(entries.len(), n * n);
        let g = Self {
            p,
            n,
            entries: entries.iter().map(|&e| e % p).collect(),
        };
        if g.det() == 0 {
            return Err(Error::Parameter(format!(
                "singular matrix over F_{}: {:?}",
                p, g.entries
            )));
        }
        Ok(g)
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Self { p, n, entries }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!((self.p, self.n), (other.p, other.n));
        Self {
            p: self.p,
            n: self.n,
            entries: mat_mul(self.p, self.n, &self.entries, &other.entries),
        }
    }

    pub fn det(&self) -> u32 {
        let f = Fp(self.p);
        let n = self.n;
        let mut m = self.entries.clone();
        let mut det = 1u32;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| m[r * n + c] != 0) else {
                return 0;
            };
            if pr != c {
                for j in 0..n {
                    m.swap(c * n + j, pr * n + j);
                }
                det = f.neg(det);
            }
            let piv = m[c * n + c];
            det = f.mul(det, piv);
            let inv = f.inv(piv);
            for r in (c + 1)..n {
                let factor = f.mul(m[r * n + c], inv);
                if factor != 0 {
                    for j in c..n {
                        m[r * n + j] = f.sub(m[r * n + j], f.mul(factor, m[c * n + j]));
                    }
                }
            }
        }
        det
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == 0))
    }

    pub fn has_unit_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 1)
    }

    pub fn is_permutation(&self) -> bool {
        self.entries.iter().all(|&e| e <= 1)
            && (0..self.n).all(|i| (0..self.n).map(|j| self.get(i, j)).sum::<u32>() == 1)
            && (0..self.n).all(|j| (0..self.n).map(|i| self.get(i, j)).sum::<u32>() == 1)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

fn mat_mul(p: u32, n: usize, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0u64;
            for k in 0..n {
                acc += a[i * n + k] as u64 * b[k * n + j] as u64;
            }
            out[i * n + j] = (acc % p as u64) as u32;
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum SubgroupTag {
    Borel,
    Unipotent,
    Permutation,
    Full,
}

/// |GL_n(F_p)| by the order formula.
pub fn group_order(p: u32, n: usize) -> BigInt {
    let pn = BigInt::from(p).pow(n as u32);
    let mut order = BigInt::from(1);
    for i in 0..n {
        order *= &pn - BigInt::from(p).pow(i as u32);
    }
    order
}

/// |U| = p^(n(n-1)/2).
pub fn unipotent_order(p: u32, n: usize) -> BigInt {
    BigInt::from(p).pow((n * (n - 1) / 2) as u32)
}

fn check_params(p: u32, n: usize) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::Parameter(format!("{} is not prime", p)));
    }
    if n == 0 {
        return Err(Error::Parameter("n must be positive".into()));
    }
    Ok(())
}

/// Every invertible matrix exactly once, in canonical (row-major
/// lexicographic) order.
pub fn enumerate_group(p: u32, n: usize, cap: u64) -> Result<Vec<GroupElement>> {
    check_params(p, n)?;
    let order = group_order(p, n);
    if order > BigInt::from(cap) {
        return Err(Error::Resource(format!(
            "|GL_{}(F_{})| = {} exceeds the cap {}",
            n, p, order, cap
        )));
    }
    let cells = n * n;
    let total = BigInt::from(p).pow(cells as u32);
    if total > BigInt::from(1u64 << 24) {
        return Err(Error::Resource(format!(
            "p^(n^2) = {} is too large for exhaustive filtering",
            total
        )));
    }
    let mut out = Vec::new();
    let mut entries = vec![0u32; cells];
    loop {
        let g = GroupElement {
            p,
            n,
            entries: entries.clone(),
        };
        if g.det() != 0 {
            out.push(g);
        }
        // advance the odometer, most significant cell first
        let mut i = cells;
        loop {
            if i == 0 {
                let found = BigInt::from(out.len() as u64);
                assert_eq!(found, order, "enumeration disagrees with the order formula");
                return Ok(out);
            }
            i -= 1;
            entries[i] += 1;
            if entries[i] < p {
                break;
            }
            entries[i] = 0;
        }
    }
}

/// Subgroup enumeration in canonical order.
pub fn enumerate_subgroup(p: u32, n: usize, tag: SubgroupTag, cap: u64) -> Result<Vec<GroupElement>> {
    check_params(p, n)?;
    match tag {
        SubgroupTag::Full => enumerate_group(p, n, cap),
        SubgroupTag::Borel | SubgroupTag::Unipotent => {
            let unit_diag = tag == SubgroupTag::Unipotent;
            let free_cells: Vec<(usize, usize, bool)> = (0..n)
                .flat_map(|i| (i..n).map(move |j| (i, j, i == j)))
                .collect();
            let mut out = Vec::new();
            let mut values = vec![0u32; free_cells.len()];
            'outer: loop {
                let mut entries = vec![0u32; n * n];
                for (v, &(i, j, diag)) in values.iter().zip(&free_cells) {
                    entries[i * n + j] = if diag {
                        if unit_diag {
                            1
                        } else {
                            v + 1 // nonzero diagonal
                        }
                    } else {
                        *v
                    };
                }
                out.push(GroupElement { p, n, entries });
                let mut i = values.len();
                loop {
                    if i == 0 {
                        break 'outer;
                    }
                    i -= 1;
                    let (_, _, diag) = free_cells[i];
                    let limit = if diag {
                        if unit_diag {
                            1
                        } else {
                            p - 1
                        }
                    } else {
                        p
                    };
                    values[i] += 1;
                    if values[i] < limit {
                        break;
                    }
                    values[i] = 0;
                }
            }
            out.sort();
            Ok(out)
        }
        SubgroupTag::Permutation => Ok(permutations_with_sign(p, n)
            .into_iter()
            .map(|(g, _)| g)
            .collect()),
    }
}

/// Permutation matrices with the parity sign of the permutation (in Z).
pub fn permutations_with_sign(p: u32, n: usize) -> Vec<(GroupElement, i32)> {
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    heap_permutations(&mut cur, n, &mut perms);
    perms.sort();
    perms
        .into_iter()
        .map(|perm| {
            let mut entries = vec![0u32; n * n];
            for (j, &img) in perm.iter().enumerate() {
                entries[img * n + j] = 1; // column j has a 1 in row perm(j)
            }
            let mut inversions = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    if perm[a] > perm[b] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (GroupElement { p, n, entries }, sign)
        })
        .collect()
}

fn heap_permutations(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(cur, k - 1, out);
        if k.is_multiple_of(2) {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

/// Finitely supported map GL_n(F_p) -> Z_(p); zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    pub p: u32,
    pub n: usize,
    support: BTreeMap<Vec<u32>, PLocalRational>,
}

impl GroupRingElement {
    pub fn zero(p: u32, n: usize) -> Self {
        Self {
            p,
            n,
            support: BTreeMap::new(),
        }
    }

    pub fn delta(g: &GroupElement) -> Self {
        let mut e = Self::zero(g.p, g.n);
        e.add_to(g.entries.clone(), PLocalRational::one());
        e
    }

    fn add_to(&mut self, key: Vec<u32>, c: PLocalRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.support.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn coefficient(&self, g: &GroupElement) -> PLocalRational {
        self.support
            .get(g.entries())
            .cloned()
            .unwrap_or_else(PLocalRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (GroupElement, &PLocalRational)> + '_ {
        self.support.iter().map(|(k, c)| {
            (
                GroupElement {
                    p: self.p,
                    n: self.n,
                    entries: k.clone(),
                },
                c,
            )
        })
    }

    pub fn scale(&self, c: &PLocalRational) -> Self {
        let mut out = Self::zero(self.p, self.n);
        for (k, v) in &self.support {
            out.add_to(k.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, v) in &other.support {
            out.add_to(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, v) in &other.support {
            out.add_to(k.clone(), -v);
        }
        Ok(out)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if (self.p, self.n) != (other.p, other.n) {
            return Err(Error::Config(format!(
                "mismatched group parameters ({},{}) vs ({},{})",
                self.p, self.n, other.p, other.n
            )));
        }
        Ok(())
    }

    /// Convolution product.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.p, self.n);
        for (ka, ca) in &self.support {
            for (kb, cb) in &other.support {
                out.add_to(mat_mul(self.p, self.n, ka, kb), ca * cb);
            }
        }
        Ok(out)
    }

    /// All coefficients reduced mod p, keyed by the canonical encoding.
    pub fn mod_p_coefficients(&self) -> BTreeMap<Vec<u32>, u32> {
        self.support
            .iter()
            .filter_map(|(k, c)| {
                let r = c.mod_p(self.p);
                (r != 0).then(|| (k.clone(), r))
            })
            .collect()
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (g, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*{:?}", c, g)?;
        }
        Ok(())
    }
}

/// Whether det^k admits an exact multiplicative lift F_p^x -> Z_(p)^x:
/// the lifted character must have order at most 2.
pub fn twist_lifts_exactly(p: u32, k: u32) -> bool {
    p == 2 || (2 * k).is_multiple_of(p - 1)
}

/// The det-twist phi_k applied coefficient-wise. Character values are lifted
/// to +-1 when the lift is exact, and to least positive residues otherwise.
pub fn det_twist(e: &GroupRingElement, k: u32) -> GroupRingElement {
    let p = e.p;
    let f = Fp(p);
    let mut out = GroupRingElement::zero(e.p, e.n);
    for (g, c) in e.iter() {
        let chi = f.pow(f.inv(g.det()), k as u64);
        let lifted: PLocalRational = if twist_lifts_exactly(p, k) {
            match chi {
                1 => PLocalRational::one(),
                x if x == p - 1 => -&PLocalRational::one(),
                _ => unreachable!("lifted character has order <= 2"),
            }
        } else {
            PLocalRational::from_int(chi)
        };
        out.add_to(g.entries().to_vec(), &lifted * c);
    }
    out
}

#[derive(Clone)]
pub struct SteinbergIdempotent {
    pub element: GroupRingElement,
    /// The index [GL : U]; coprime to p by construction.
    pub index: BigInt,
    /// True when e_k^2 = e_k holds exactly in Z_(p)[GL]; when the det-twist
    /// does not lift to the rationals, idempotency is verified mod p only.
    pub exact: bool,
    pub twist_lifts: bool,
}

/// The Steinberg idempotent e_k = phi_k(e_0) with
/// e_0 = [GL:U]^{-1} (sum_B b)(sum_Sigma sign(s) s).
pub fn steinberg_idempotent(p: u32, n: usize, k: u32, cap: u64) -> Result<SteinbergIdempotent> {
    check_params(p, n)?;
    if p == 2 {
        if n < 2 {
            return Err(Error::Parameter("p = 2 requires n >= 2".into()));
        }
        if k != 0 {
            return Err(Error::Parameter("p = 2 only admits the untwisted k = 0".into()));
        }
    } else if k > p - 2 {
        return Err(Error::Parameter(format!(
            "k = {} out of range 0..={} for p = {}",
            k,
            p - 2,
            p
        )));
    }
    let order = group_order(p, n);
    if order > BigInt::from(cap) {
        return Err(Error::Resource(format!(
            "|GL_{}(F_{})| = {} exceeds the cap {}",
            n, p, order, cap
        )));
    }

    let index = group_order(p, n) / unipotent_order(p, n);
    assert!(
        !(&index % BigInt::from(p)).is_zero(),
        "[GL:U] must be coprime to p"
    );

    let borel = enumerate_subgroup(p, n, SubgroupTag::Borel, cap)?;
    let perms = permutations_with_sign(p, n);
    let mut e0 = GroupRingElement::zero(p, n);
    for b in &borel {
        for (s, sign) in &perms {
            let g = b.mul(s);
            e0.add_to(g.entries().to_vec(), PLocalRational::from_int(*sign));
        }
    }
    let scale = PLocalRational::new(1, index.clone(), p)?;
    let e0 = e0.scale(&scale);

    let element = det_twist(&e0, k);
    let twist_lifts = twist_lifts_exactly(p, k);
    let square = element.convolve(&element)?;
    let exact = square == element;
    if !exact {
        let diff = square.sub(&element)?;
        let mod_p_ok = diff.mod_p_coefficients().is_empty();
        if twist_lifts || !mod_p_ok {
            return Err(Error::Structure(format!(
                "Steinberg element for (p,n,k)=({},{},{}) failed idempotency",
                p, n, k
            )));
        }
    }
    Ok(SteinbergIdempotent {
        element,
        index,
        exact,
        twist_lifts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_CAP;

    /// Independent determinant for the brute-force oracles: Leibniz sum.
    fn laplace_det(p: u32, n: usize, entries: &[u32]) -> u32 {
        let mut perms = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        heap_permutations(&mut cur, n, &mut perms);
        let f = Fp(p);
        let mut det = 0i64;
        for perm in perms {
            let mut inversions = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    if perm[a] > perm[b] {
                        inversions += 1;
                    }
                }
            }
            let mut prod = 1u32;
            for (i, &j) in perm.iter().enumerate() {
                prod = f.mul(prod, entries[i * n + j]);
            }
            det += if inversions % 2 == 0 {
                prod as i64
            } else {
                -(prod as i64)
            };
        }
        f.reduce_i64(det)
    }

    #[test]
    fn enumerate_gl1_f2() {
        let g = enumerate_group(2, 1, DEFAULT_CAP).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0], GroupElement::identity(2, 1));
    }

    #[test]
    fn enumerate_gl2_f2_against_brute_force() {
        let g = enumerate_group(2, 2, DEFAULT_CAP).unwrap();
        assert_eq!(g.len(), 6);
        let mut brute = Vec::new();
        for code in 0..16u32 {
            let entries: Vec<u32> = (0..4).map(|i| (code >> (3 - i)) & 1).collect();
            if laplace_det(2, 2, &entries) != 0 {
                brute.push(entries);
            }
        }
        assert_eq!(brute.len(), 6);
        let enumerated: Vec<Vec<u32>> = g.iter().map(|e| e.entries().to_vec()).collect();
        let mut brute_sorted = brute;
        brute_sorted.sort();
        assert_eq!(enumerated, brute_sorted);
    }

    #[test]
    fn enumerate_gl2_f3() {
        assert_eq!(enumerate_group(3, 2, DEFAULT_CAP).unwrap().len(), 48);
        assert_eq!(group_order(3, 2), BigInt::from(48));
    }

    #[test]
    fn subgroup_orders_and_index() {
        for (p, n) in [(2u32, 2usize), (2, 3), (3, 1), (3, 2), (5, 1)] {
            let gl = enumerate_group(p, n, DEFAULT_CAP).unwrap();
            assert_eq!(BigInt::from(gl.len()), group_order(p, n));
            let u = enumerate_subgroup(p, n, SubgroupTag::Unipotent, DEFAULT_CAP).unwrap();
            assert_eq!(BigInt::from(u.len()), unipotent_order(p, n));
            let index = group_order(p, n) / unipotent_order(p, n);
            assert!(!(index % BigInt::from(p)).is_zero());
            let b = enumerate_subgroup(p, n, SubgroupTag::Borel, DEFAULT_CAP).unwrap();
            for g in b.iter().chain(u.iter()) {
                assert!(g.is_upper_triangular());
            }
            for g in &u {
                assert!(g.has_unit_diagonal());
            }
        }
    }

    #[test]
    fn permutation_sign_matches_determinant_at_odd_p() {
        for p in [3u32, 5, 7] {
            for n in 1..=3usize {
                for (g, sign) in permutations_with_sign(p, n) {
                    assert!(g.is_permutation());
                    let expected = Fp(p).reduce_i64(sign as i64);
                    assert_eq!(g.det(), expected, "p={} n={}", p, n);
                }
            }
        }
    }

    #[test]
    fn delta_convolution() {
        let gl = enumerate_group(3, 2, DEFAULT_CAP).unwrap();
        let (g, h) = (&gl[7], &gl[23]);
        let dg = GroupRingElement::delta(g);
        let dh = GroupRingElement::delta(h);
        assert_eq!(dg.convolve(&dh).unwrap(), GroupRingElement::delta(&g.mul(h)));
        let zero = GroupRingElement::zero(3, 2);
        assert!(dg.convolve(&zero).unwrap().is_zero());
    }

    #[test]
    fn steinberg_gl1_f3() {
        // B = {1, -1}, U = Sigma = {1}: e_0 = (1 + g)/2 with g = (-1),
        // and the twist flips the sign on g.
        let st0 = steinberg_idempotent(3, 1, 0, DEFAULT_CAP).unwrap();
        let st1 = steinberg_idempotent(3, 1, 1, DEFAULT_CAP).unwrap();
        let id = GroupElement::identity(3, 1);
        let neg = GroupElement::new(3, 1, vec![2]).unwrap();
        let half = PLocalRational::new(1, 2, 3).unwrap();
        assert_eq!(st0.element.coefficient(&id), half);
        assert_eq!(st0.element.coefficient(&neg), half);
        assert_eq!(st1.element.coefficient(&id), half);
        assert_eq!(st1.element.coefficient(&neg), -&half);
        assert!(st0.exact && st1.exact);
        // e_0 * e_0 = e_0 by direct convolution
        let sq = st0.element.convolve(&st0.element).unwrap();
        assert_eq!(sq, st0.element);
    }

    #[test]
    fn steinberg_gl2_f2_identity_coefficient() {
        let st = steinberg_idempotent(2, 2, 0, DEFAULT_CAP).unwrap();
        assert_eq!(st.index, BigInt::from(3));
        let id = GroupElement::identity(2, 2);
        assert_eq!(
            st.element.coefficient(&id),
            PLocalRational::new(1, 3, 2).unwrap()
        );
        assert!(st.exact);
        // support is inside B * Sigma
        assert!(st.element.support_size() <= 2 * 2);
    }

    #[test]
    fn twist_multiplicativity() {
        // phi_k(g) phi_k(h) = phi_k(gh) exactly whenever the lift is exact.
        let gl = enumerate_group(3, 2, DEFAULT_CAP).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state as usize
        };
        for _ in 0..50 {
            let g = &gl[next() % gl.len()];
            let h = &gl[next() % gl.len()];
            let lhs = det_twist(&GroupRingElement::delta(g), 1)
                .convolve(&det_twist(&GroupRingElement::delta(h), 1))
                .unwrap();
            let rhs = det_twist(&GroupRingElement::delta(&g.mul(h)), 1);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn quadratic_twist_at_p5_is_exact_but_others_are_not() {
        let st2 = steinberg_idempotent(5, 1, 2, DEFAULT_CAP).unwrap();
        assert!(st2.exact && st2.twist_lifts);
        let st1 = steinberg_idempotent(5, 1, 1, DEFAULT_CAP).unwrap();
        assert!(!st1.twist_lifts);
        assert!(!st1.exact); // no exact rational idempotent exists for this twist
    }

    #[test]
    fn invalid_parameters() {
        assert!(steinberg_idempotent(2, 1, 0, DEFAULT_CAP).is_err());
        assert!(steinberg_idempotent(2, 2, 1, DEFAULT_CAP).is_err());
        assert!(steinberg_idempotent(3, 1, 2, DEFAULT_CAP).is_err());
        assert!(steinberg_idempotent(4, 1, 0, DEFAULT_CAP).is_err());
        assert!(matches!(
            enumerate_group(2, 5, DEFAULT_CAP),
            Err(Error::Resource(_))
        ));
    }
}
