//! Annihilator elimination over a truncated p-local Lazard ring: given a
//! finitely generated graded module whose K(m)-localization vanishes
//! (witnessed by certificate relations y_i v_m^{r_i} = sum_j y_j u_{j,i}
//! with u_{j,i} in I = (p, generators other than v_m)), produce an
//! annihilator of the shape v_m^s + tail with tail in I, and verify it by
//! exact membership reduction over Z_(p).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plocal::{parse_plocal, PLocalRational};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LazGenerator {
    pub name: String,
    pub grading: u64,
}

#[derive(Clone, Debug)]
pub struct TruncatedLazardRing {
    pub p: u32,
    pub gens: Vec<LazGenerator>,
    /// Index of the designated generator v_m.
    pub vm: usize,
}

impl TruncatedLazardRing {
    pub fn new(p: u32, gens: Vec<LazGenerator>, vm: usize) -> Result<Self> {
        if !crate::fp::is_prime(p) {
            return Err(Error::Parameter(format!("{} is not prime", p)));
        }
        if vm >= gens.len() {
            return Err(Error::Parameter("designated v_m index out of range".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, g) in gens.iter().enumerate() {
            if g.name.is_empty() || !seen.insert(g.name.clone()) {
                return Err(Error::Parameter(format!("bad or duplicate generator name {:?}", g.name)));
            }
            if i != vm && g.grading == 0 {
                return Err(Error::Parameter(format!(
                    "generator {} must have positive grading",
                    g.name
                )));
            }
        }
        // grading of v_m must be p^m - 1 for some m >= 0
        let mut x = gens[vm].grading + 1;
        while x.is_multiple_of(p as u64) {
            x /= p as u64;
        }
        if x != 1 {
            return Err(Error::Parameter(format!(
                "grading {} of {} is not p^m - 1",
                gens[vm].grading, gens[vm].name
            )));
        }
        Ok(Self { p, gens, vm })
    }

    pub fn vm_grading(&self) -> u64 {
        self.gens[self.vm].grading
    }

    fn gen_index(&self, name: &str) -> Result<usize> {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::Parse(format!("unknown ring generator {:?}", name)))
    }
}

/// A polynomial over Z_(p) in the ring generators.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LazPoly {
    terms: BTreeMap<Vec<u16>, PLocalRational>,
}

impl LazPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one(n_gens: usize) -> Self {
        let mut t = BTreeMap::new();
        t.insert(vec![0u16; n_gens], PLocalRational::one());
        Self { terms: t }
    }

    pub fn constant(n_gens: usize, c: PLocalRational) -> Self {
        let mut out = Self::zero();
        out.add_term(vec![0u16; n_gens], c);
        out
    }

    pub fn vm_power(ring: &TruncatedLazardRing, e: u16) -> Self {
        let mut exp = vec![0u16; ring.gens.len()];
        exp[ring.vm] = e;
        let mut out = Self::zero();
        out.add_term(exp, PLocalRational::one());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u16>, PLocalRational> {
        &self.terms
    }

    fn add_term(&mut self, exp: Vec<u16>, c: PLocalRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
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

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exp, ca * cb);
            }
        }
        out
    }

    pub fn grading_of_term(ring: &TruncatedLazardRing, exp: &[u16]) -> u64 {
        exp.iter()
            .zip(&ring.gens)
            .map(|(&e, g)| e as u64 * g.grading)
            .sum()
    }

    /// The common grading of all terms; zero polynomial reports Some(0).
    pub fn homogeneous_grading(&self, ring: &TruncatedLazardRing) -> Option<u64> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Some(0);
        };
        let g = Self::grading_of_term(ring, first);
        it.all(|e| Self::grading_of_term(ring, e) == g).then_some(g)
    }

    /// Membership in I = (p, generators other than v_m): every pure
    /// v_m-monomial (including constants) must have coefficient divisible
    /// by p.
    pub fn in_augmentation_ideal(&self, ring: &TruncatedLazardRing) -> bool {
        self.terms.iter().all(|(e, c)| {
            let pure_vm = e
                .iter()
                .enumerate()
                .all(|(i, &x)| i == ring.vm || x == 0);
            !pure_vm || c.valuation(ring.p).is_none_or(|v| v >= 1)
        })
    }

    pub fn display(&self, ring: &TruncatedLazardRing) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&x| x == 0);
            if is_const || c != &PLocalRational::one() {
                factors.push(c.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(ring.gens[i].name.clone()),
                    _ => factors.push(format!("{}^{}", ring.gens[i].name, x)),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }

    /// Parses `c*g1^e1*... + ...` with p-local rational coefficients.
    pub fn parse(s: &str, ring: &TruncatedLazardRing) -> Result<Self> {
        let mut out = Self::zero();
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(out);
        }
        for raw in s.split('+') {
            let raw = raw.trim();
            if raw.is_empty() {
                return Err(Error::Parse("empty term".into()));
            }
            let (negate, raw) = match raw.strip_prefix('-') {
                Some(rest) => (true, rest.trim()),
                None => (false, raw),
            };
            let mut coeff = PLocalRational::one();
            let mut exp = vec![0u16; ring.gens.len()];
            for factor in raw.split('*') {
                let factor = factor.trim();
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in {:?}", raw)));
                }
                let first = factor.chars().next().unwrap();
                if first.is_ascii_digit() || first == '-' {
                    coeff = &coeff * &parse_plocal(factor, ring.p)?;
                } else {
                    let (name, e) = match factor.split_once('^') {
                        Some((n, e)) => (
                            n.trim(),
                            e.trim()
                                .parse::<u16>()
                                .map_err(|_| Error::Parse(format!("bad exponent in {:?}", factor)))?,
                        ),
                        None => (factor, 1),
                    };
                    exp[ring.gen_index(name)?] += e;
                }
            }
            if negate {
                coeff = -&coeff;
            }
            out.add_term(exp, coeff);
        }
        Ok(out)
    }
}

impl std::fmt::Debug for LazPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LazPoly({} terms)", self.terms.len())
    }
}

#[derive(Clone, Debug)]
pub struct CertRelation {
    /// The exponent r_i in y_i v_m^(r_i) = sum_j y_j u_(j,i).
    pub power: u16,
    /// u[j] = u_(j,i), indexed by target generator.
    pub u: Vec<LazPoly>,
}

#[derive(Clone, Debug)]
pub struct LazardPresentation {
    pub gens: Vec<LazGenerator>,
    /// Certificate relation per generator, if supplied.
    pub relations: Vec<Option<CertRelation>>,
    /// Extra homogeneous rows: row[j] = coefficient of y_j.
    pub extra: Vec<Vec<LazPoly>>,
}

impl LazardPresentation {
    /// Checks counts, I-membership of every u, and grading consistency.
    pub fn validate(&self, ring: &TruncatedLazardRing) -> Result<()> {
        let g = self.gens.len();
        if self.relations.len() != g {
            return Err(Error::Input("one relation slot per generator required".into()));
        }
        for (i, rel) in self.relations.iter().enumerate() {
            let Some(rel) = rel else { continue };
            if rel.power == 0 {
                return Err(Error::Input(format!("relation {} needs power >= 1", i)));
            }
            if rel.u.len() != g {
                return Err(Error::Input(format!("relation {} has wrong width", i)));
            }
            let lhs = self.gens[i].grading + rel.power as u64 * ring.vm_grading();
            for (j, u) in rel.u.iter().enumerate() {
                if !u.in_augmentation_ideal(ring) {
                    return Err(Error::Input(format!(
                        "u[{},{}] is not in the ideal (p, generators other than {})",
                        j, i, ring.gens[ring.vm].name
                    )));
                }
                if !u.is_zero() {
                    let expected = lhs
                        .checked_sub(self.gens[j].grading)
                        .ok_or_else(|| Error::Input(format!("u[{},{}] grading underflow", j, i)))?;
                    match u.homogeneous_grading(ring) {
                        Some(gr) if gr == expected => {}
                        _ => {
                            return Err(Error::Input(format!(
                                "u[{},{}] is not homogeneous of grading {}",
                                j, i, expected
                            )))
                        }
                    }
                }
            }
        }
        for (r, row) in self.extra.iter().enumerate() {
            if row.len() != g {
                return Err(Error::Input(format!("extra relation {} has wrong width", r)));
            }
            let gradings: Vec<u64> = row
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| {
                    c.homogeneous_grading(ring)
                        .map(|gr| gr + self.gens[j].grading)
                        .ok_or_else(|| Error::Input(format!("extra relation {} inhomogeneous", r)))
                })
                .collect::<Result<_>>()?;
            if gradings.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::Input(format!("extra relation {} inhomogeneous", r)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilatorElement {
    /// Leading v_m-exponent s.
    pub power: u16,
    /// Rendered polynomial and tail (tail = poly - v_m^s, lies in I).
    pub poly_text: String,
    pub tail_text: String,
    pub degenerate: bool,
    #[serde(skip)]
    pub poly: LazPoly,
    #[serde(skip)]
    pub tail: LazPoly,
}

/// The recursion of the annihilator lemma: eliminate the last generator via
/// the 2x2 combination, recurse on (1..g-1) and on (2..g), and multiply the
/// two sub-annihilators. The base case g = 1 returns v_m^(r_1) - u_(1,1).
pub fn eliminate(ring: &TruncatedLazardRing, pres: &LazardPresentation) -> Result<AnnihilatorElement> {
    pres.validate(ring)?;
    let g = pres.gens.len();
    if g == 0 {
        let one = LazPoly::one(ring.gens.len());
        return Ok(AnnihilatorElement {
            power: 0,
            poly_text: one.display(ring),
            tail_text: "0".to_string(),
            degenerate: true,
            poly: one,
            tail: LazPoly::zero(),
        });
    }
    let rels: Vec<CertRelation> = pres
        .relations
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.clone().ok_or_else(|| {
                Error::Input(format!(
                    "generator {} lacks a certificate relation",
                    pres.gens[i].name
                ))
            })
        })
        .collect::<Result<_>>()?;

    let max_r = rels.iter().map(|r| r.power as u64).max().unwrap_or(0);
    let poly = eliminate_rec(ring, &rels);

    // normalize to v_m^s + tail
    let grading = poly
        .homogeneous_grading(ring)
        .expect("annihilator is homogeneous");
    let s = if ring.vm_grading() == 0 {
        // ungraded designated generator: read the top pure power directly
        poly.terms()
            .keys()
            .filter(|e| e.iter().enumerate().all(|(i, &x)| i == ring.vm || x == 0))
            .map(|e| e[ring.vm])
            .max()
            .unwrap_or(0)
    } else {
        debug_assert_eq!(grading % ring.vm_grading(), 0);
        (grading / ring.vm_grading()) as u16
    };
    let bound = 4u64.saturating_pow(g as u32 - 1) * max_r;
    assert!(
        (s as u64) <= bound,
        "leading exponent {} exceeds the recursion ceiling {}",
        s,
        bound
    );
    let tail = poly.sub(&LazPoly::vm_power(ring, s));
    if !tail.in_augmentation_ideal(ring) {
        return Err(Error::Structure(
            "annihilator does not decompose as v_m^s + (tail in I)".into(),
        ));
    }
    Ok(AnnihilatorElement {
        power: s,
        poly_text: poly.display(ring),
        tail_text: tail.display(ring),
        degenerate: false,
        poly,
        tail,
    })
}

fn eliminate_rec(ring: &TruncatedLazardRing, rels: &[CertRelation]) -> LazPoly {
    let g = rels.len();
    if g == 1 {
        return LazPoly::vm_power(ring, rels[0].power).sub(&rels[0].u[0]);
    }
    let a_left = eliminate_rec(ring, &eliminate_generator(ring, rels, g - 1));
    let a_right = eliminate_rec(ring, &eliminate_generator(ring, rels, 0));
    a_left.mul(&a_right)
}

/// Folds the relation of generator `e` into all the others, producing a
/// certificate presentation for the submodule on the remaining generators:
///   y_i v^(r_i + r_e) = y_i U_i + sum_(j != i,e) y_j w_(j,i)
/// with U_i = u_ii v^(r_e) + u_ee v^(r_i) - u_ii u_ee + u_ei u_ie and
/// w_(j,i) = u_ji (v^(r_e) - u_ee) + u_ei u_je.
fn eliminate_generator(
    ring: &TruncatedLazardRing,
    rels: &[CertRelation],
    e: usize,
) -> Vec<CertRelation> {
    let keep: Vec<usize> = (0..rels.len()).filter(|&i| i != e).collect();
    let u = |i: usize, j: usize| -> &LazPoly { &rels[i].u[j] }; // u_(j,i)
    let v_re = LazPoly::vm_power(ring, rels[e].power);
    let v_re_minus_uee = v_re.sub(u(e, e));
    keep.iter()
        .map(|&i| {
            let v_ri = LazPoly::vm_power(ring, rels[i].power);
            let big_u = u(i, i)
                .mul(&v_re)
                .add(&u(e, e).mul(&v_ri))
                .sub(&u(i, i).mul(u(e, e)))
                .add(&u(i, e).mul(u(e, i)));
            let new_u: Vec<LazPoly> = keep
                .iter()
                .map(|&j| {
                    if j == i {
                        big_u.clone()
                    } else {
                        u(i, j).mul(&v_re_minus_uee).add(&u(i, e).mul(u(e, j)))
                    }
                })
                .collect();
            CertRelation {
                power: rels[i].power + rels[e].power,
                u: new_u,
            }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub enum GenVerdict {
    ReducesToZero,
    Partial,
    NonMember,
    ValuationObstruction,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub per_generator: Vec<(String, GenVerdict)>,
    pub all_zero: bool,
    pub partial: bool,
}

/// Verifies that `a` annihilates every generator: a.y_i must lie in the
/// Z_(p)-span of the relation rows at the single relevant grading. The
/// degree bound gates which gradings are attempted (flagged partial beyond
/// it) and caps total monomial exponents when the designated generator has
/// grading zero.
pub fn verify_annihilates(
    ring: &TruncatedLazardRing,
    pres: &LazardPresentation,
    a: &LazPoly,
    degree_bound: u64,
) -> Result<VerifyReport> {
    pres.validate(ring)?;
    let g = pres.gens.len();
    let a_grading = a
        .homogeneous_grading(ring)
        .ok_or_else(|| Error::Input("annihilator candidate must be homogeneous".into()))?;

    // relation rows: row[j] = coefficient of y_j
    let mut rows: Vec<Vec<LazPoly>> = Vec::new();
    for (i, rel) in pres.relations.iter().enumerate() {
        let Some(rel) = rel else { continue };
        let mut row: Vec<LazPoly> = rel.u.iter().map(|u| LazPoly::zero().sub(u)).collect();
        row[i] = row[i].add(&LazPoly::vm_power(ring, rel.power));
        rows.push(row);
    }
    rows.extend(pres.extra.iter().cloned());

    let mut per_generator = Vec::new();
    let mut all_zero = true;
    let mut partial = false;
    for i in 0..g {
        let d = a_grading + pres.gens[i].grading;
        if d > degree_bound {
            partial = true;
            per_generator.push((pres.gens[i].name.clone(), GenVerdict::Partial));
            continue;
        }
        let verdict = membership_at_grading(ring, pres, &rows, a, i, d, degree_bound as u16);
        if verdict != GenVerdict::ReducesToZero {
            all_zero = false;
        }
        per_generator.push((pres.gens[i].name.clone(), verdict));
    }
    Ok(VerifyReport {
        per_generator,
        all_zero,
        partial,
    })
}

fn membership_at_grading(
    ring: &TruncatedLazardRing,
    pres: &LazardPresentation,
    rows: &[Vec<LazPoly>],
    a: &LazPoly,
    gen: usize,
    d: u64,
    exp_cap: u16,
) -> GenVerdict {
    // coordinates of the graded piece of the free module: (generator j,
    // monomial of grading d - deg y_j)
    let mut coord_index: BTreeMap<(usize, Vec<u16>), usize> = BTreeMap::new();
    let mut coords: Vec<(usize, Vec<u16>)> = Vec::new();
    for (j, gj) in pres.gens.iter().enumerate() {
        let Some(need) = d.checked_sub(gj.grading) else {
            continue;
        };
        for m in monomials_of_grading(ring, need, exp_cap) {
            coord_index.insert((j, m.clone()), coords.len());
            coords.push((j, m));
        }
    }
    let n_rows = coords.len();

    let place = |poly: &LazPoly, j: usize, shift: &[u16], out: &mut Vec<PLocalRational>| {
        for (e, c) in poly.terms() {
            let exp: Vec<u16> = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            if let Some(&idx) = coord_index.get(&(j, exp)) {
                out[idx] = &out[idx] + c;
            }
        }
    };

    // target vector a . e_gen
    let mut target = vec![PLocalRational::zero(); n_rows];
    place(a, gen, &vec![0u16; ring.gens.len()], &mut target);

    // columns: monomial multiples of each relation row landing in grading d
    let mut columns: Vec<Vec<PLocalRational>> = Vec::new();
    for row in rows {
        let row_grading = row.iter().enumerate().find_map(|(j, c)| {
            (!c.is_zero())
                .then(|| c.homogeneous_grading(ring).map(|gr| gr + pres.gens[j].grading))
                .flatten()
        });
        let Some(rg) = row_grading else { continue };
        let Some(need) = d.checked_sub(rg) else {
            continue;
        };
        for m in monomials_of_grading(ring, need, exp_cap) {
            let mut col = vec![PLocalRational::zero(); n_rows];
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    place(c, j, &m, &mut col);
                }
            }
            if col.iter().any(|c| !c.is_zero()) {
                columns.push(col);
            }
        }
    }

    solve_in_zp_span(ring.p, &columns, target)
}

/// Monomials in the ring generators of exact weighted grading `d`, with the
/// total exponent capped (the cap only binds when a generator has grading
/// zero).
pub fn monomials_of_grading(ring: &TruncatedLazardRing, d: u64, exp_cap: u16) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; ring.gens.len()];
    fn rec(
        gens: &[LazGenerator],
        var: usize,
        remaining: u64,
        budget: u16,
        cur: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
    ) {
        if var == gens.len() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = gens[var].grading;
        let max_e = if w == 0 {
            budget
        } else {
            ((remaining / w) as u16).min(budget)
        };
        for e in 0..=max_e {
            let used = e as u64 * w;
            if used > remaining {
                break;
            }
            cur[var] = e;
            rec(gens, var + 1, remaining - used, budget - e, cur, out);
        }
        cur[var] = 0;
    }
    rec(&ring.gens, 0, d, exp_cap, &mut cur, &mut out);
    out
}

/// Decides membership of `target` in the Z_(p)-span of `columns` by a
/// Smith-style reduction over the discrete valuation ring: pivots are
/// chosen with minimal p-adic valuation, so all row and column operations
/// stay in Z_(p).
fn solve_in_zp_span(
    p: u32,
    columns: &[Vec<PLocalRational>],
    mut target: Vec<PLocalRational>,
) -> GenVerdict {
    let n_rows = target.len();
    let n_cols = columns.len();
    let mut m: Vec<Vec<PLocalRational>> = (0..n_rows)
        .map(|r| (0..n_cols).map(|c| columns[c][r].clone()).collect())
        .collect();
    let steps = n_rows.min(n_cols);
    let mut pivots: Vec<PLocalRational> = Vec::new();
    let mut k = 0;
    while k < steps {
        // minimal-valuation pivot in the remaining submatrix
        let mut best: Option<(usize, usize, i64)> = None;
        for r in k..n_rows {
            for c in k..n_cols {
                if let Some(v) = m[r][c].valuation(p) {
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((r, c, v));
                    }
                }
            }
        }
        let Some((pr, pc, _)) = best else { break };
        m.swap(k, pr);
        target.swap(k, pr);
        for row in m.iter_mut() {
            row.swap(k, pc);
        }
        let pivot = m[k][k].clone();
        // clear the pivot column with row operations (also applied to the target)
        for r in 0..n_rows {
            if r == k || m[r][k].is_zero() {
                continue;
            }
            let factor = m[r][k]
                .divide(&pivot, p)
                .expect("pivot has minimal valuation");
            for c in k..n_cols {
                let sub = &factor * &m[k][c];
                m[r][c] = &m[r][c] - &sub;
            }
            let sub = &factor * &target[k];
            target[r] = &target[r] - &sub;
        }
        // clear the pivot row with column operations
        for c in (k + 1)..n_cols {
            if m[k][c].is_zero() {
                continue;
            }
            let factor = m[k][c]
                .divide(&pivot, p)
                .expect("pivot has minimal valuation");
            for r in k..n_rows {
                let sub = &factor * &m[r][k];
                m[r][c] = &m[r][c] - &sub;
            }
        }
        pivots.push(pivot);
        k += 1;
    }
    // solvable iff each pivot divides its target entry and the rest vanish
    for (i, pivot) in pivots.iter().enumerate() {
        if target[i].is_zero() {
            continue;
        }
        let pv = pivot.valuation(p).expect("nonzero pivot");
        let tv = target[i].valuation(p).expect("nonzero entry");
        if tv < pv {
            return GenVerdict::ValuationObstruction;
        }
    }
    for t in target.iter().skip(pivots.len()) {
        if !t.is_zero() {
            return GenVerdict::NonMember;
        }
    }
    GenVerdict::ReducesToZero
}

#[derive(Clone, Debug, Serialize)]
pub struct KmReport {
    pub ok: bool,
    /// Generators lacking a certificate-shaped relation.
    pub missing: Vec<String>,
    /// Per present relation: the generator is killed in N (x) F_p[v_m^(+-1)]
    /// after sending the ideal generators to zero.
    pub reductions: Vec<(String, bool)>,
}

/// Syntactic-plus-semantic check that N (x) K(m) = 0: every generator must
/// carry a certificate relation, and in F_p[v_m, v_m^-1] (all I-generators
/// and p sent to zero) the relation reads y_i v_m^(r_i) = 0.
pub fn km_localization_check(ring: &TruncatedLazardRing, pres: &LazardPresentation) -> Result<KmReport> {
    pres.validate(ring)?;
    let mut missing = Vec::new();
    let mut reductions = Vec::new();
    for (i, rel) in pres.relations.iter().enumerate() {
        let name = pres.gens[i].name.clone();
        match rel {
            None => missing.push(name),
            Some(rel) => {
                // image of every u in F_p[v_m, v_m^(-1)]
                let killed = rel.u.iter().all(|u| {
                    u.terms().iter().all(|(e, c)| {
                        let pure_vm = e.iter().enumerate().all(|(j, &x)| j == ring.vm || x == 0);
                        !pure_vm || c.mod_p(ring.p) == 0
                    })
                });
                reductions.push((name, killed));
            }
        }
    }
    Ok(KmReport {
        ok: missing.is_empty() && reductions.iter().all(|(_, k)| *k),
        missing,
        reductions,
    })
}

// --- JSON input surface -------------------------------------------------

#[derive(Deserialize)]
pub struct RingSpec {
    pub p: u32,
    pub generators: Vec<LazGenerator>,
    pub vm: String,
}

#[derive(Deserialize)]
pub struct RelationSpec {
    pub generator: String,
    pub power: u16,
    #[serde(default)]
    pub u: BTreeMap<String, String>,
}

#[derive(Deserialize)]
pub struct PresentationSpec {
    pub generators: Vec<LazGenerator>,
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
    #[serde(default)]
    pub extra_relations: Vec<BTreeMap<String, String>>,
}

pub fn ring_from_spec(spec: &RingSpec) -> Result<TruncatedLazardRing> {
    let vm = spec
        .generators
        .iter()
        .position(|g| g.name == spec.vm)
        .ok_or_else(|| Error::Input(format!("designated generator {:?} not in the list", spec.vm)))?;
    TruncatedLazardRing::new(spec.p, spec.generators.clone(), vm)
}

pub fn presentation_from_spec(
    ring: &TruncatedLazardRing,
    spec: &PresentationSpec,
) -> Result<LazardPresentation> {
    let g = spec.generators.len();
    let gen_index = |name: &str| -> Result<usize> {
        spec.generators
            .iter()
            .position(|x| x.name == name)
            .ok_or_else(|| Error::Input(format!("unknown module generator {:?}", name)))
    };
    let mut relations: Vec<Option<CertRelation>> = vec![None; g];
    for rel in &spec.relations {
        let i = gen_index(&rel.generator)?;
        let mut u = vec![LazPoly::zero(); g];
        for (name, text) in &rel.u {
            u[gen_index(name)?] = LazPoly::parse(text, ring)?;
        }
        if relations[i].is_some() {
            return Err(Error::Input(format!(
                "duplicate relation for generator {:?}",
                rel.generator
            )));
        }
        relations[i] = Some(CertRelation {
            power: rel.power,
            u,
        });
    }
    let mut extra = Vec::new();
    for row in &spec.extra_relations {
        let mut r = vec![LazPoly::zero(); g];
        for (name, text) in row {
            r[gen_index(name)?] = LazPoly::parse(text, ring)?;
        }
        extra.push(r);
    }
    let pres = LazardPresentation {
        gens: spec.generators.clone(),
        relations,
        extra,
    };
    pres.validate(ring)?;
    Ok(pres)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v0_ring(p: u32) -> TruncatedLazardRing {
        TruncatedLazardRing::new(
            p,
            vec![LazGenerator {
                name: "v".into(),
                grading: 0,
            }],
            0,
        )
        .unwrap()
    }

    fn graded_ring() -> TruncatedLazardRing {
        // p = 2, v = v_1 (grading 1), one extra generator of grading 2
        TruncatedLazardRing::new(
            2,
            vec![
                LazGenerator {
                    name: "v".into(),
                    grading: 1,
                },
                LazGenerator {
                    name: "t".into(),
                    grading: 2,
                },
            ],
            0,
        )
        .unwrap()
    }

    fn single_gen_pres(ring: &TruncatedLazardRing, grading: u64, power: u16, u_text: &str) -> LazardPresentation {
        LazardPresentation {
            gens: vec![LazGenerator {
                name: "y1".into(),
                grading,
            }],
            relations: vec![Some(CertRelation {
                power,
                u: vec![LazPoly::parse(u_text, ring).unwrap()],
            })],
            extra: Vec::new(),
        }
    }

    #[test]
    fn base_case_zero_u() {
        let ring = graded_ring();
        let pres = single_gen_pres(&ring, 0, 1, "0");
        let a = eliminate(&ring, &pres).unwrap();
        assert_eq!(a.power, 1);
        assert_eq!(a.poly_text, "v");
        assert!(a.tail.is_zero());
        let rep = verify_annihilates(&ring, &pres, &a.poly, 60).unwrap();
        assert!(rep.all_zero && !rep.partial);
    }

    #[test]
    fn base_case_v_squared_minus_p() {
        let ring = v0_ring(2);
        let pres = single_gen_pres(&ring, 0, 2, "2");
        let a = eliminate(&ring, &pres).unwrap();
        assert_eq!(a.power, 2);
        assert_eq!(a.poly_text, "v^2 + -2");
        let rep = verify_annihilates(&ring, &pres, &a.poly, 60).unwrap();
        assert!(rep.all_zero);
        // v alone does not annihilate: v.y is nonzero in the module
        let v = LazPoly::vm_power(&ring, 1);
        let rep = verify_annihilates(&ring, &pres, &v, 60).unwrap();
        assert!(!rep.all_zero);
    }

    #[test]
    fn two_generator_cross_relations() {
        // y1 v = y2 u21 with u21 = 2, y2 v = y1 u12 with u12 = t
        let ring = graded_ring();
        let t = LazPoly::parse("t", &ring).unwrap();
        let two = LazPoly::parse("2", &ring).unwrap();
        let pres = LazardPresentation {
            gens: vec![
                LazGenerator {
                    name: "y1".into(),
                    grading: 0,
                },
                LazGenerator {
                    name: "y2".into(),
                    grading: 1,
                },
            ],
            relations: vec![
                Some(CertRelation {
                    power: 1,
                    u: vec![LazPoly::zero(), two.clone()],
                }),
                Some(CertRelation {
                    power: 1,
                    u: vec![t.clone(), LazPoly::zero()],
                }),
            ],
            extra: Vec::new(),
        };
        pres.validate(&ring).unwrap();
        let a = eliminate(&ring, &pres).unwrap();
        // A' = A'' = v^2 - u12 u21, output (v^2 - 2t)^2
        let vv = LazPoly::vm_power(&ring, 2);
        let expected = vv.sub(&two.mul(&t));
        let expected = expected.mul(&expected);
        assert_eq!(a.poly, expected);
        assert_eq!(a.power, 4);
        let rep = verify_annihilates(&ring, &pres, &a.poly, 60).unwrap();
        assert!(rep.all_zero, "{:?}", rep);
    }

    #[test]
    fn annihilator_shape_and_ideal_tail() {
        let ring = graded_ring();
        let pres = single_gen_pres(&ring, 2, 2, "t");
        let a = eliminate(&ring, &pres).unwrap();
        assert_eq!(a.power, 2);
        assert!(a.tail.in_augmentation_ideal(&ring));
        assert!(verify_annihilates(&ring, &pres, &a.poly, 60).unwrap().all_zero);
    }

    #[test]
    fn km_check() {
        let ring = graded_ring();
        let pres = single_gen_pres(&ring, 0, 1, "0");
        assert!(km_localization_check(&ring, &pres).unwrap().ok);
        // free rank-1 module: no relation
        let free = LazardPresentation {
            gens: vec![LazGenerator {
                name: "y1".into(),
                grading: 0,
            }],
            relations: vec![None],
            extra: Vec::new(),
        };
        let rep = km_localization_check(&ring, &free).unwrap();
        assert!(!rep.ok);
        assert_eq!(rep.missing, vec!["y1".to_string()]);
        // missing relations also block eliminate
        assert!(eliminate(&ring, &free).is_err());
    }

    #[test]
    fn ideal_membership_is_enforced() {
        let ring = graded_ring();
        // u = v is not in I
        let pres = single_gen_pres(&ring, 0, 1, "v");
        assert!(matches!(eliminate(&ring, &pres), Err(Error::Input(_))));
        // u = 2*v is
        let pres = single_gen_pres(&ring, 0, 1, "2*v");
        assert!(eliminate(&ring, &pres).is_ok());
    }

    #[test]
    fn degenerate_empty_presentation() {
        let ring = graded_ring();
        let pres = LazardPresentation {
            gens: Vec::new(),
            relations: Vec::new(),
            extra: Vec::new(),
        };
        let a = eliminate(&ring, &pres).unwrap();
        assert!(a.degenerate);
        assert_eq!(a.power, 0);
        // vacuous verification on the zero module
        let rep = verify_annihilates(&ring, &pres, &a.poly, 10).unwrap();
        assert!(rep.all_zero);
    }

    #[test]
    fn poly_text_round_trip() {
        let ring = graded_ring();
        for s in ["v^2 + -2", "0", "t", "3/1*t", "1/1", "2*v*t + v^3"] {
            let p = LazPoly::parse(s, &ring).unwrap();
            let shown = p.display(&ring);
            assert_eq!(LazPoly::parse(&shown, &ring).unwrap(), p);
        }
    }

    #[test]
    fn json_specs_parse() {
        let ring_spec: RingSpec = serde_json::from_str(
            r#"{"p": 2, "generators": [{"name": "v", "grading": 1}, {"name": "t", "grading": 2}], "vm": "v"}"#,
        )
        .unwrap();
        let ring = ring_from_spec(&ring_spec).unwrap();
        let pres_spec: PresentationSpec = serde_json::from_str(
            r#"{"generators": [{"name": "y1", "grading": 0}],
                "relations": [{"generator": "y1", "power": 2, "u": {"y1": "t"}}]}"#,
        )
        .unwrap();
        let pres = presentation_from_spec(&ring, &pres_spec).unwrap();
        let a = eliminate(&ring, &pres).unwrap();
        assert_eq!(a.power, 2);
    }
}
