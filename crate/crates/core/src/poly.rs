//! Multivariate polynomials over F_p with bidegree-graded variables and a
//! round-tripping text format `c*v1^e1*v2^e2 + ...`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::bidegree::BiDegree;
use crate::error::{Error, Result};
use crate::fp::Fp;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyVar {
    pub name: String,
    pub bidegree: BiDegree,
}

impl PolyVar {
    pub fn new(name: impl Into<String>, bidegree: BiDegree) -> Self {
        Self {
            name: name.into(),
            bidegree,
        }
    }
}

/// Standard variable table y1..yn in bidegree (1)[2].
pub fn y_vars(n: usize) -> Vec<PolyVar> {
    (1..=n)
        .map(|i| PolyVar::new(format!("y{}", i), BiDegree::new(1, 2)))
        .collect()
}

/// Variable table x1..xn with a single grading d per variable, encoded (0)[d].
pub fn x_vars_graded(n: usize, degree: i64) -> Vec<PolyVar> {
    (1..=n)
        .map(|i| PolyVar::new(format!("x{}", i), BiDegree::new(0, degree)))
        .collect()
}

/// Exponent vector with graded-lexicographic order, ties broken by the
/// entries themselves (earlier variable index wins).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(n_vars: usize) -> Self {
        Monomial(vec![0; n_vars])
    }

    pub fn total_exponent(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_exponent()
            .cmp(&other.total_exponent())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FpPolynomial {
    p: u32,
    vars: Vec<PolyVar>,
    terms: BTreeMap<Monomial, u32>,
}

impl FpPolynomial {
    pub fn zero(p: u32, vars: Vec<PolyVar>) -> Self {
        Self {
            p,
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: u32, vars: Vec<PolyVar>, c: i64) -> Self {
        let mut out = Self::zero(p, vars);
        let c = Fp(p).reduce_i64(c);
        if c != 0 {
            out.terms.insert(Monomial::one(out.vars.len()), c);
        }
        out
    }

    pub fn variable(p: u32, vars: Vec<PolyVar>, index: usize) -> Self {
        let mut out = Self::zero(p, vars);
        let mut exp = vec![0u16; out.vars.len()];
        exp[index] = 1;
        out.terms.insert(Monomial(exp), 1);
        out
    }

    pub fn from_terms(
        p: u32,
        vars: Vec<PolyVar>,
        terms: impl IntoIterator<Item = (Vec<u16>, i64)>,
    ) -> Self {
        let mut out = Self::zero(p, vars);
        for (exp, c) in terms {
            out.add_term(&Monomial(exp), Fp(p).reduce_i64(c));
        }
        out
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn vars(&self) -> &[PolyVar] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[u16]) -> u32 {
        self.terms.get(&Monomial(exp.to_vec())).copied().unwrap_or(0)
    }

    fn add_term(&mut self, m: &Monomial, c: u32) {
        if c == 0 {
            return;
        }
        let f = Fp(self.p);
        let entry = self.terms.entry(m.clone()).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(m);
        }
    }

    fn check_context(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Config(format!(
                "mismatched primes {} and {}",
                self.p, other.p
            )));
        }
        if self.vars != other.vars {
            return Err(Error::Config("mismatched variable sets".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let f = Fp(self.p);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m, f.neg(c));
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> Self {
        let f = Fp(self.p);
        let c = f.reduce_i64(c);
        let mut out = Self::zero(self.p, self.vars.clone());
        for (m, &a) in &self.terms {
            out.add_term(m, f.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        let f = Fp(self.p);
        let mut out = Self::zero(self.p, self.vars.clone());
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(&ma.mul(mb), f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut out = Self::constant(self.p, self.vars.clone(), 1);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn monomial_bidegree(&self, m: &Monomial) -> BiDegree {
        m.0.iter()
            .zip(&self.vars)
            .map(|(&e, v)| BiDegree::new(v.bidegree.weight * e as i64, v.bidegree.degree * e as i64))
            .sum()
    }

    /// The common bidegree of all terms, if homogeneous. Zero counts as
    /// homogeneous of every bidegree; reported as None here.
    pub fn homogeneous_bidegree(&self) -> Option<BiDegree> {
        let mut it = self.terms.keys();
        let first = self.monomial_bidegree(it.next()?);
        it.all(|m| self.monomial_bidegree(m) == first)
            .then_some(first)
    }

    /// Sum of the terms of bidegree exactly `b` (zero polynomial if none).
    pub fn homogeneous_component(&self, b: BiDegree) -> Self {
        let mut out = Self::zero(self.p, self.vars.clone());
        for (m, &c) in &self.terms {
            if self.monomial_bidegree(m) == b {
                out.terms.insert(m.clone(), c);
            }
        }
        out
    }

    /// Degree as exponent total of the largest term (0 for the zero poly).
    pub fn exponent_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_exponent())
            .max()
            .unwrap_or(0)
    }

    /// Substitutes each variable by a linear form in the same variables;
    /// `images[i]` holds the coefficients of the image of variable i.
    pub fn substitute_linear(&self, images: &[Vec<u32>]) -> Self {
        assert_eq!(images.len(), self.vars.len());
        let f = Fp(self.p);
        let forms: Vec<FpPolynomial> = images
            .iter()
            .map(|coeffs| {
                let mut form = Self::zero(self.p, self.vars.clone());
                for (j, &c) in coeffs.iter().enumerate() {
                    let mut exp = vec![0u16; self.vars.len()];
                    exp[j] = 1;
                    form.add_term(&Monomial(exp), c % self.p);
                }
                form
            })
            .collect();
        let mut out = Self::zero(self.p, self.vars.clone());
        for (m, &c) in &self.terms {
            let mut term = Self::constant(self.p, self.vars.clone(), c as i64);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&forms[i].pow(e as u32).expect("same context")).expect("same context");
                }
            }
            for (mm, &cc) in &term.terms {
                out.add_term(mm, f.mul(cc, 1));
            }
        }
        out
    }

    /// Parses the canonical text format against a fixed variable table.
    pub fn parse(s: &str, p: u32, vars: Vec<PolyVar>) -> Result<Self> {
        let mut out = Self::zero(p, vars);
        let f = Fp(p);
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(out);
        }
        for raw_term in s.split('+') {
            let raw_term = raw_term.trim();
            if raw_term.is_empty() {
                return Err(Error::Parse("empty term".into()));
            }
            let (negate, raw_term) = match raw_term.strip_prefix('-') {
                Some(rest) => (true, rest.trim()),
                None => (false, raw_term),
            };
            let mut coeff: u32 = 1;
            let mut exp = vec![0u16; out.vars.len()];
            for factor in raw_term.split('*') {
                let factor = factor.trim();
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in {:?}", raw_term)));
                }
                if factor.chars().next().unwrap().is_ascii_digit() {
                    let c: i64 = factor
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad coefficient {:?}", factor)))?;
                    coeff = f.mul(coeff, f.reduce_i64(c));
                } else {
                    let (name, e) = match factor.split_once('^') {
                        Some((n, e)) => {
                            let e: u16 = e.trim().parse().map_err(|_| {
                                Error::Parse(format!("bad exponent in {:?}", factor))
                            })?;
                            (n.trim(), e)
                        }
                        None => (factor, 1),
                    };
                    let idx = out
                        .vars
                        .iter()
                        .position(|v| v.name == name)
                        .ok_or_else(|| Error::Parse(format!("unknown variable {:?}", name)))?;
                    exp[idx] += e;
                }
            }
            if negate {
                coeff = f.neg(coeff);
            }
            out.add_term(&Monomial(exp), coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for FpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if c != 1 || m.total_exponent() == 0 {
                factors.push(c.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].name.clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i].name, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
