//! Level certificates: K(m)-triviality for m below the level via Margolis
//! vanishing, and K(r)-survival of beta for r at or above it via the
//! positional checks (slope-two position, support window, weight gap). The
//! spectral sequence itself is never materialized; only its degree
//! constraints are checked.

use serde::Serialize;

use crate::bigraded::QModule;
use crate::coinvariant::build_module;
use crate::error::{Error, Result};
use crate::freeness::{
    certify_freeness, compute_beta, locate_generator, margolis_homology, BetaReport,
    FreenessCertificate, GeneratorLocation, MargolisTable,
};
use crate::groupring::steinberg_idempotent;

/// Lower bound for the weight shift of every differential of the K(r)-AHSS:
/// the shift of its first differential d_1 = Q_r.
pub fn differential_weight_shift(p: u32, r: usize) -> i64 {
    (p as i64).pow(r as u32) - 1
}

#[derive(Clone, Debug, Serialize)]
pub struct TrivialityWitness {
    pub m: usize,
    pub margolis: MargolisTable,
    pub vanishes: bool,
}

/// Margolis-vanishing witness: the first differential of the K(m)-AHSS is
/// Q_m, so total vanishing kills the spectral sequence after its first page.
pub fn triviality_certificate(module: &QModule, m: usize) -> Result<TrivialityWitness> {
    let margolis = margolis_homology(module, m)?;
    let vanishes = margolis.total == 0;
    Ok(TrivialityWitness {
        m,
        margolis,
        vanishes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SurvivalWitness {
    pub r: usize,
    /// (a) beta sits on the slope-two line, so outgoing differentials leave
    /// the support window.
    pub slope_two: bool,
    /// (b) every basis bidegree satisfies 0 <= 2i - j <= n.
    pub support_window_ok: bool,
    /// (c) weight(beta) - (p^r - 1) < min weight: no source can hit beta.
    pub weight_gap_ok: bool,
    pub beta_weight: i64,
    pub weight_shift: i64,
    pub min_weight: i64,
    pub ok: bool,
}

pub fn survival_certificate(
    module: &QModule,
    beta: &BetaReport,
    r: usize,
    p: u32,
    window: i64,
) -> SurvivalWitness {
    let slope_two = beta.nonzero && beta.degree == 2 * beta.weight;
    let support_window_ok = module.space.basis.iter().all(|b| {
        let c = b.bidegree.chow_level();
        0 <= c && c <= window
    });
    let shift = differential_weight_shift(p, r);
    let min_weight = module.space.min_weight().unwrap_or(0);
    let weight_gap_ok = beta.weight - shift < min_weight;
    SurvivalWitness {
        r,
        slope_two,
        support_window_ok,
        weight_gap_ok,
        beta_weight: beta.weight,
        weight_shift: shift,
        min_weight,
        ok: slope_two && support_window_ok && weight_gap_ok,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BidegreeCheck {
    pub expected_weight: i64,
    pub expected_degree: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapClosedForm {
    /// q - n for odd p, 2^(n-1) - n for p = 2.
    pub expected: i64,
    pub actual: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelCertificate {
    pub p: u32,
    pub n: usize,
    pub k: u32,
    pub r_max: usize,
    pub level: usize,
    pub module_dim: usize,
    pub summand_dim: usize,
    pub freeness: FreenessCertificate,
    pub alpha: GeneratorLocation,
    pub alpha_formula: BidegreeCheck,
    pub beta: BetaReport,
    pub gap_closed_form: GapClosedForm,
    pub triviality: Vec<TrivialityWitness>,
    pub survival: Vec<SurvivalWitness>,
    pub assumption: String,
    pub toolchain_version: String,
    pub certified: bool,
    pub failure: Option<String>,
}

/// Expected bidegree of the generator alpha: (kq)[2kq - n] with
/// q = (p^n - 1)/(p - 1) for odd p, and (2^(n-1) - 1)[2^n - 1 - n] for p = 2.
pub fn alpha_formula(p: u32, n: usize, k: u32) -> (i64, i64) {
    if p == 2 {
        let w = (1i64 << (n - 1)) - 1;
        (w, (1i64 << n) - 1 - n as i64)
    } else {
        let q = ((p as i64).pow(n as u32) - 1) / (p as i64 - 1);
        (k as i64 * q, 2 * k as i64 * q - n as i64)
    }
}

/// The closed-form weight gap weight(beta) - weight(alpha).
pub fn gap_formula(p: u32, n: usize) -> i64 {
    if p == 2 {
        (1i64 << (n - 1)) - n as i64
    } else {
        let q = ((p as i64).pow(n as u32) - 1) / (p as i64 - 1);
        q - n as i64
    }
}

/// Runs the whole pipeline: build -> idempotent -> freeness -> alpha, beta
/// -> triviality for all m < level -> survival for level <= r <= r_max.
pub fn level_certificate(p: u32, n: usize, k: u32, r_max: usize, cap: u64) -> Result<LevelCertificate> {
    if p == 2 {
        if n < 2 {
            return Err(Error::Parameter("p = 2 requires n >= 2".into()));
        }
        if k != 0 {
            return Err(Error::Parameter("p = 2 uses the untwisted projector k = 0".into()));
        }
    } else if k == 0 || k > p - 2 {
        return Err(Error::Parameter(format!(
            "odd p needs a twist 1 <= k <= p - 2, got k = {}",
            k
        )));
    }
    let level = if p == 2 { n - 1 } else { n };
    if r_max < level {
        return Err(Error::Parameter(format!(
            "r_max = {} is below the claimed level {}",
            r_max, level
        )));
    }

    let st = steinberg_idempotent(p, n, k, cap)?;
    let module = build_module(p, n, cap)?;
    let proj = module.apply_idempotent(&st.element)?;
    let summand = &proj.qmodule;

    let ops: Vec<usize> = (0..level).collect();
    let freeness = certify_freeness(summand, &ops)?;
    let mut certified = freeness.free;
    let mut failure: Option<String> = None;
    let note_failure = |cert: &mut bool, fail: &mut Option<String>, msg: String| {
        *cert = false;
        if fail.is_none() {
            *fail = Some(msg);
        }
    };
    if !freeness.free {
        note_failure(&mut certified, &mut failure, "freeness certification failed".into());
    }

    let alpha = locate_generator(summand)?;
    let (ew, ed) = alpha_formula(p, n, k);
    let alpha_formula = BidegreeCheck {
        expected_weight: ew,
        expected_degree: ed,
        ok: alpha.weight == ew && alpha.degree == ed,
    };
    if !alpha_formula.ok {
        note_failure(
            &mut certified,
            &mut failure,
            format!(
                "alpha at ({})[{}] does not match the formula ({})[{}]",
                alpha.weight, alpha.degree, ew, ed
            ),
        );
    }

    let mut alpha_vec = vec![0u32; summand.dim()];
    alpha_vec[alpha.index] = 1;
    let beta = compute_beta(summand, &alpha_vec, &ops)?;
    if !beta.nonzero {
        note_failure(
            &mut certified,
            &mut failure,
            "beta vanishes, contradicting the freeness certificate".into(),
        );
    } else if !beta.slope_two {
        note_failure(&mut certified, &mut failure, "beta is off the slope-two line".into());
    }

    let gap = GapClosedForm {
        expected: gap_formula(p, n),
        actual: beta.weight - alpha.weight,
        ok: gap_formula(p, n) == beta.weight - alpha.weight,
    };
    if !gap.ok {
        note_failure(&mut certified, &mut failure, "weight gap differs from the closed form".into());
    }

    let mut triviality = Vec::new();
    for m in 0..level {
        let w = triviality_certificate(summand, m)?;
        if !w.vanishes {
            note_failure(
                &mut certified,
                &mut failure,
                format!("Margolis homology of Q_{} does not vanish", m),
            );
        }
        triviality.push(w);
    }

    let mut survival = Vec::new();
    for r in level..=r_max {
        let w = survival_certificate(summand, &beta, r, p, n as i64);
        if !w.ok {
            note_failure(&mut certified, &mut failure, format!("survival check failed at r = {}", r));
        }
        survival.push(w);
    }

    Ok(LevelCertificate {
        p,
        n,
        k,
        r_max,
        level,
        module_dim: module.dim(),
        summand_dim: summand.dim(),
        freeness,
        alpha,
        alpha_formula,
        beta,
        gap_closed_form: gap,
        triviality,
        survival,
        assumption: "every differential of the K(r)-AHSS shifts weights by at least p^r - 1, \
                     the shift of its first differential Q_r"
            .to_string(),
        toolchain_version: env!("CARGO_PKG_VERSION").to_string(),
        certified,
        failure,
    })
}
