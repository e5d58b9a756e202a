//! Bigraded F_p vector spaces with labeled bases, anticommuting square-zero
//! Q-operators, and idempotent projection onto Q-stable summands.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bidegree::BiDegree;
use crate::error::{Error, Result};
use crate::fp::Fp;
use crate::groupring::{GroupElement, GroupRingElement};
use crate::linalg::{Echelon, FpMatrix};

#[derive(Clone, Debug, Serialize)]
pub struct BasisVector {
    pub label: String,
    pub bidegree: BiDegree,
}

#[derive(Clone)]
pub struct BigradedVectorSpace {
    pub p: u32,
    pub basis: Vec<BasisVector>,
}

impl BigradedVectorSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dims_by_bidegree(&self) -> BTreeMap<BiDegree, usize> {
        let mut out = BTreeMap::new();
        for b in &self.basis {
            *out.entry(b.bidegree).or_insert(0) += 1;
        }
        out
    }

    pub fn indices_at(&self, b: BiDegree) -> Vec<usize> {
        self.basis
            .iter()
            .enumerate()
            .filter_map(|(i, v)| (v.bidegree == b).then_some(i))
            .collect()
    }

    pub fn min_weight(&self) -> Option<i64> {
        self.basis.iter().map(|v| v.bidegree.weight).min()
    }

    /// The common bidegree of the support of `coords`, if homogeneous.
    pub fn bidegree_of(&self, coords: &[u32]) -> Option<BiDegree> {
        let mut found = None;
        for (i, &c) in coords.iter().enumerate() {
            if c != 0 {
                match found {
                    None => found = Some(self.basis[i].bidegree),
                    Some(b) if b != self.basis[i].bidegree => return None,
                    _ => {}
                }
            }
        }
        found
    }
}

/// A Q-operator: an F_p-linear endomorphism shifting bidegrees by `shift`.
#[derive(Clone)]
pub struct QOp {
    pub shift: BiDegree,
    pub matrix: FpMatrix,
}

/// A finite-dimensional bigraded space with installed Milnor operators.
#[derive(Clone)]
pub struct QModule {
    pub space: BigradedVectorSpace,
    pub ops: BTreeMap<usize, QOp>,
}

impl QModule {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn op(&self, m: usize) -> Result<&QOp> {
        self.ops
            .get(&m)
            .ok_or_else(|| Error::Parameter(format!("Q_{} is not installed", m)))
    }

    pub fn apply_q(&self, m: usize, v: &[u32]) -> Result<Vec<u32>> {
        Ok(self.op(m)?.matrix.apply(v))
    }

    /// Q_i^2 = 0, Q_i Q_j + Q_j Q_i = 0, operators shift bidegrees as
    /// declared, and preserve homogeneity on basis vectors.
    pub fn check_q_relations(&self) -> Result<()> {
        let p = self.space.p;
        let dim = self.dim();
        let zero = FpMatrix::zeros(p, dim, dim);
        let f = Fp(p);
        for (&i, qi) in &self.ops {
            let sq = qi.matrix.mul(&qi.matrix);
            if sq != zero {
                return Err(Error::Structure(format!("Q_{}^2 != 0", i)));
            }
            for (col, basis) in self.space.basis.iter().enumerate() {
                let image = qi.matrix.column(col);
                if let Some(b) = self.space.bidegree_of(&image) {
                    if b != basis.bidegree + qi.shift {
                        return Err(Error::Structure(format!(
                            "Q_{} moved {} to {}, expected shift {}",
                            i, basis.bidegree, b, qi.shift
                        )));
                    }
                }
            }
            for (&j, qj) in &self.ops {
                if j <= i {
                    continue;
                }
                let a = qi.matrix.mul(&qj.matrix);
                let b = qj.matrix.mul(&qi.matrix);
                let mut anti = FpMatrix::zeros(p, dim, dim);
                for r in 0..dim {
                    for c in 0..dim {
                        anti.set(r, c, f.add(a.get(r, c), b.get(r, c)));
                    }
                }
                if anti != zero {
                    return Err(Error::Structure(format!(
                        "Q_{} and Q_{} do not anticommute",
                        i, j
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The image of an idempotent projector, as a module in its own right.
pub struct ProjectedModule {
    pub qmodule: QModule,
    /// Image basis vectors written in the parent basis (echelon rows).
    pub basis_in_parent: Vec<Vec<u32>>,
    pub projector_rank: usize,
}

/// Applies the projector sum_g e(g) rho(g) to a module carrying a group
/// action, extracting a homogeneous basis of the image and restricting
/// every installed Q to it.
///
/// The idempotent must satisfy e^2 = e at least mod p (that is what the
/// F_p-linear projector sees); the projector matrix itself is verified to
/// square to itself, and the image is checked to be Q-stable.
pub fn project_module(
    parent: &QModule,
    action: impl Fn(&GroupElement) -> FpMatrix,
    e: &GroupRingElement,
) -> Result<ProjectedModule> {
    let p = parent.space.p;
    if e.p != p {
        return Err(Error::Config(format!(
            "idempotent over F_{} applied to a module over F_{}",
            e.p, p
        )));
    }
    let square = e.convolve(e)?;
    if &square != e {
        let diff = square.sub(e)?;
        if !diff.mod_p_coefficients().is_empty() {
            return Err(Error::Parameter(
                "group ring element is not idempotent (checked e^2 = e)".into(),
            ));
        }
    }

    let dim = parent.dim();
    let f = Fp(p);
    let mut projector = FpMatrix::zeros(p, dim, dim);
    for (key, coeff) in e.mod_p_coefficients() {
        let g = GroupElement::new(e.p, e.n, key)?;
        let rho = action(&g);
        assert_eq!(rho.rows, dim);
        for r in 0..dim {
            for c in 0..dim {
                let v = rho.get(r, c);
                if v != 0 {
                    projector.set(r, c, f.add(projector.get(r, c), f.mul(coeff, v)));
                }
            }
        }
    }

    if projector.mul(&projector) != projector {
        return Err(Error::Structure("projector matrix does not square to itself".into()));
    }

    // dense elimination on the whole module at once; the resulting echelon
    // basis must come out homogeneous because the action preserves bidegrees
    let mut image = Echelon::new(p, dim);
    for c in 0..dim {
        image.insert(&projector.column(c));
    }
    let rank = image.rank();

    let mut basis = Vec::with_capacity(rank);
    for (i, row) in image.rows.iter().enumerate() {
        let Some(b) = parent.space.bidegree_of(row) else {
            return Err(Error::Structure(format!(
                "projector image vector {} is not homogeneous",
                i
            )));
        };
        basis.push(BasisVector {
            label: format!("v{}", i),
            bidegree: b,
        });
    }

    let mut ops = BTreeMap::new();
    for (&m, qop) in &parent.ops {
        let mut matrix = FpMatrix::zeros(p, rank, rank);
        for (col, row) in image.rows.iter().enumerate() {
            let img = qop.matrix.apply(row);
            let coords = image.coordinates(&img).ok_or_else(|| {
                Error::Structure(format!("projector image is not Q_{}-stable", m))
            })?;
            for (r, &c) in coords.iter().enumerate() {
                matrix.set(r, col, c);
            }
        }
        ops.insert(
            m,
            QOp {
                shift: qop.shift,
                matrix,
            },
        );
    }

    Ok(ProjectedModule {
        qmodule: QModule {
            space: BigradedVectorSpace {
                p,
                basis,
            },
            ops,
        },
        basis_in_parent: image.rows.clone(),
        projector_rank: rank,
    })
}
