//! Freeness certification over exterior Milnor subalgebras: Margolis
//! homology as one witness, explicit generator extraction plus a rank check
//! of the evaluation map as the other. The two must always agree.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bidegree::BiDegree;
use crate::bigraded::QModule;
use crate::error::{Error, Result};
use crate::linalg::Echelon;

#[derive(Clone, Debug, Serialize)]
pub struct MargolisTable {
    pub op: usize,
    /// Nonzero homology dimensions keyed by bidegree.
    pub per_bidegree: BTreeMap<String, usize>,
    pub total: usize,
}

/// dim(ker Q_m / im Q_m) in each bidegree; total zero iff the module is
/// free over the rank-one exterior algebra on Q_m.
pub fn margolis_homology(m: &QModule, op: usize) -> Result<MargolisTable> {
    let q = m.op(op)?;
    let p = m.space.p;
    let mut per_bidegree = BTreeMap::new();
    let mut total = 0;
    for (&b, &dim_b) in &m.space.dims_by_bidegree() {
        let rank_at = |bd: BiDegree| -> usize {
            let cols = m.space.indices_at(bd);
            let mut ech = Echelon::new(p, m.dim());
            for c in cols {
                ech.insert(&q.matrix.column(c));
            }
            ech.rank()
        };
        let rank_out = rank_at(b);
        let rank_in = rank_at(b - q.shift);
        let h = dim_b - rank_out - rank_in;
        if h > 0 {
            per_bidegree.insert(b.to_string(), h);
            total += h;
        }
    }
    Ok(MargolisTable {
        op,
        per_bidegree,
        total,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorInfo {
    /// Coordinate position of the lift in the module basis.
    pub index: usize,
    pub weight: i64,
    pub degree: i64,
    pub label: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FreenessCertificate {
    pub ops: Vec<usize>,
    pub free: bool,
    pub dim: usize,
    pub generator_count: usize,
    pub generators: Vec<GeneratorInfo>,
    /// Total Margolis homology per listed op (all zero iff free).
    pub margolis_totals: BTreeMap<usize, usize>,
    /// dim = 2^(#ops) * #generators.
    pub dimension_identity: bool,
    /// A bidegree where the evaluation-map rank falls short, when not free.
    pub witness: Option<String>,
}

/// Certifies freeness over the exterior algebra on the listed Q's by
/// extracting homogeneous generator lifts (lexicographically least
/// coordinates complementing sum_s im Q_s) and verifying the evaluation map
/// Lambda(Q_ops) (x) generators -> module is bijective by rank.
pub fn certify_freeness(m: &QModule, ops: &[usize]) -> Result<FreenessCertificate> {
    let mut ops: Vec<usize> = ops.to_vec();
    ops.sort_unstable();
    ops.dedup();
    let p = m.space.p;
    let dim = m.dim();
    for &s in &ops {
        m.op(s)?;
    }

    let mut margolis_totals = BTreeMap::new();
    for &s in &ops {
        margolis_totals.insert(s, margolis_homology(m, s)?.total);
    }

    // generators: least coordinate positions complementing the Q-image span
    let mut image = Echelon::new_rightmost(p, dim);
    for &s in &ops {
        let q = &m.op(s)?.matrix;
        for c in 0..dim {
            image.insert(&q.column(c));
        }
    }
    let gen_positions = image.complement_positions();
    let generator_count = gen_positions.len();
    let generators: Vec<GeneratorInfo> = gen_positions
        .iter()
        .map(|&i| GeneratorInfo {
            index: i,
            weight: m.space.basis[i].bidegree.weight,
            degree: m.space.basis[i].bidegree.degree,
            label: m.space.basis[i].label.clone(),
        })
        .collect();

    let expected = generator_count
        .checked_shl(ops.len() as u32)
        .unwrap_or(usize::MAX);
    let dimension_identity = expected == dim;

    let mut free = dimension_identity;
    let mut witness = None;
    if dimension_identity {
        // evaluation vectors Q_T(gen) for all subsets T of ops
        let mut vectors: Vec<Vec<u32>> = Vec::with_capacity(dim);
        for &g in &gen_positions {
            let mut base = vec![0u32; dim];
            base[g] = 1;
            for mask in 0u32..(1 << ops.len()) {
                let mut v = base.clone();
                for (t, &s) in ops.iter().enumerate() {
                    if mask >> t & 1 == 1 {
                        v = m.op(s)?.matrix.apply(&v);
                    }
                }
                vectors.push(v);
            }
        }
        let mut ech = Echelon::new(p, dim);
        for v in &vectors {
            ech.insert(v);
        }
        free = ech.rank() == dim;
        if !free {
            // locate a bidegree where the spanned dimensions fall short
            let mut span_dims: BTreeMap<BiDegree, Echelon> = BTreeMap::new();
            for v in &vectors {
                if let Some(b) = m.space.bidegree_of(v) {
                    span_dims
                        .entry(b)
                        .or_insert_with(|| Echelon::new(p, dim))
                        .insert(v);
                }
            }
            for (&b, &d) in &m.space.dims_by_bidegree() {
                let got = span_dims.get(&b).map_or(0, |e| e.rank());
                if got < d {
                    witness = Some(b.to_string());
                    break;
                }
            }
        }
    } else if generator_count == 0 && dim > 0 {
        witness = m.space.basis.first().map(|b| b.bidegree.to_string());
    }

    Ok(FreenessCertificate {
        ops,
        free,
        dim,
        generator_count,
        generators,
        margolis_totals,
        dimension_identity,
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorLocation {
    pub weight: i64,
    pub degree: i64,
    /// Basis index of the chosen (lexicographically least) spanning vector.
    pub index: usize,
    /// Dimension of the module in the minimal bidegree.
    pub dimension: usize,
    /// Set when the minimal bidegree is not one-dimensional.
    pub ambiguous: bool,
}

impl GeneratorLocation {
    pub fn bidegree(&self) -> BiDegree {
        BiDegree::new(self.weight, self.degree)
    }
}

/// Finds the bidegree minimizing the weight and checks that the same
/// bidegree simultaneously minimizes the degree.
pub fn locate_generator(m: &QModule) -> Result<GeneratorLocation> {
    if m.dim() == 0 {
        return Err(Error::Parameter("module is zero".into()));
    }
    let dims = m.space.dims_by_bidegree();
    let min_weight = dims.keys().map(|b| b.weight).min().expect("nonzero");
    let min_degree_at_weight = dims
        .keys()
        .filter(|b| b.weight == min_weight)
        .map(|b| b.degree)
        .min()
        .expect("nonzero");
    let min_degree_global = dims.keys().map(|b| b.degree).min().expect("nonzero");
    if min_degree_at_weight != min_degree_global {
        return Err(Error::Certification(format!(
            "weight and degree minima are not simultaneous: degree {} at minimal weight {}, global minimal degree {}",
            min_degree_at_weight, min_weight, min_degree_global
        )));
    }
    let b = BiDegree::new(min_weight, min_degree_at_weight);
    let indices = m.space.indices_at(b);
    Ok(GeneratorLocation {
        weight: b.weight,
        degree: b.degree,
        index: indices[0],
        dimension: indices.len(),
        ambiguous: indices.len() > 1,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaReport {
    pub ops: Vec<usize>,
    pub nonzero: bool,
    pub weight: i64,
    pub degree: i64,
    pub slope_two: bool,
    /// Sparse coordinates over the module basis.
    pub coordinates: Vec<(usize, u32)>,
}

/// beta = Q_(max) o ... o Q_(min) (alpha), applied in ascending index order.
pub fn compute_beta(m: &QModule, alpha: &[u32], ops: &[usize]) -> Result<BetaReport> {
    let mut ops: Vec<usize> = ops.to_vec();
    ops.sort_unstable();
    ops.dedup();
    if alpha.iter().all(|&c| c == 0) {
        return Err(Error::Parameter("alpha must be nonzero".into()));
    }
    let mut v = alpha.to_vec();
    for &s in &ops {
        v = m.apply_q(s, &v)?;
    }
    let nonzero = v.iter().any(|&c| c != 0);
    let b = m.space.bidegree_of(&v).unwrap_or(BiDegree::ZERO);
    Ok(BetaReport {
        ops,
        nonzero,
        weight: b.weight,
        degree: b.degree,
        slope_two: nonzero && b.is_slope_two(),
        coordinates: v
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c != 0).then_some((i, c)))
            .collect(),
    })
}
