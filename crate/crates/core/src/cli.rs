//! Command-line pipelines: argument parsing, dispatch, JSON envelopes, and
//! the golden-fixture regression harness.
//!
//! Exit codes: 0 certification success, 2 certified failure (witness
//! included in the envelope), 1 configuration/resource error, 64 usage.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::bigraded::QModule;
use crate::certificate::{first_difference, make_envelope, Envelope};
use crate::coinvariant::build_module;
use crate::dickson::{coinvariant_hilbert_series, dickson_invariants, koszul_regularity, verify_invariance};
use crate::error::{Error, Result};
use crate::freeness::certify_freeness;
use crate::frobenius::{build_frobenius_module, frobenius_realization_check};
use crate::groupring::{steinberg_idempotent, GroupElement};
use crate::lazard::{
    eliminate, km_localization_check, presentation_from_spec, ring_from_spec, verify_annihilates,
    PresentationSpec, RingSpec,
};
use crate::level::level_certificate;
use crate::DEFAULT_CAP;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CERTIFIED_FAILURE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "milnor-forge",
    version,
    about = "Exact-arithmetic certificates for Steinberg summands of Dickson coinvariant modules and Lazard-ring annihilators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Compute Dickson invariants, optionally verifying GL-invariance and
    /// Koszul regularity
    Dickson {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        /// Verify invariance under the full group by exhaustive substitution
        #[arg(long)]
        verify: bool,
        /// Check Koszul homology up to this internal degree
        #[arg(long)]
        koszul_bound: Option<usize>,
        /// Write the JSON envelope here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Construct the Steinberg idempotent e_k and check idempotency
    Steinberg {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Build the coinvariant module (or its Frobenius variant) and dump its
    /// basis with Q-images; with --k, dump the Steinberg summand instead
    Module {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<u32>,
        /// p = 2 only: the singly graded topological-realization variant
        #[arg(long)]
        frobenius: bool,
        /// Write the basis dump here
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Certify freeness of the e_k-summand over the exterior algebra on the
    /// listed Milnor operators
    Certify {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        /// Comma-separated Q-indices, e.g. --ops 0,1
        #[arg(long, value_delimiter = ',')]
        ops: Vec<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Full level certificate: freeness, generator, beta, triviality and
    /// survival witnesses
    Level {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the annihilator elimination on a presentation over a truncated
    /// Lazard ring and verify the result
    Annihilate {
        /// Ring description (generators, gradings, designated v_m)
        #[arg(long)]
        ring: PathBuf,
        /// Module presentation (generators, certificate relations)
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        verify_bound: Option<u64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Re-run every stored envelope and diff determinism hashes
    Regression {
        goldens_dir: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Certified,
    CertifiedFailure,
}

/// Resolved run configuration: command name, flat JSON parameters, output
/// path, and the enforced size cap.
pub struct RunConfig {
    pub command: String,
    pub parameters: Value,
    pub output: Option<PathBuf>,
    pub cap: u64,
}

pub fn cap_from_env() -> u64 {
    std::env::var("MILNOR_FORGE_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

fn get_u64(params: &Value, key: &str) -> Result<u64> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Input(format!("missing or invalid parameter {:?}", key)))
}

fn get_opt_u64(params: &Value, key: &str) -> Option<u64> {
    params.get(key).and_then(Value::as_u64)
}

fn get_bool(params: &Value, key: &str) -> bool {
    params.get(key).and_then(Value::as_bool).unwrap_or(false)
}

/// Dispatches a stored or freshly built configuration. Both the CLI and the
/// regression harness go through here, so goldens replay exactly.
pub fn run(config: &RunConfig) -> Result<(Envelope, Outcome)> {
    let params = &config.parameters;
    let cap = config.cap;
    match config.command.as_str() {
        "dickson" => {
            let p = get_u64(params, "p")? as u32;
            let n = get_u64(params, "n")? as usize;
            let ds = dickson_invariants(p, n, cap)?;
            let mut payload = Map::new();
            payload.insert("p".into(), json!(p));
            payload.insert("n".into(), json!(n));
            payload.insert("degrees".into(), json!(ds.degrees()));
            payload.insert(
                "invariants".into(),
                json!(ds.invariants.iter().map(|d| d.to_string()).collect::<Vec<_>>()),
            );
            let hilbert = coinvariant_hilbert_series(&ds, false)?;
            let mut outcome = if hilbert.closed_form_ok {
                Outcome::Certified
            } else {
                Outcome::CertifiedFailure
            };
            payload.insert("hilbert".into(), serde_json::to_value(&hilbert)?);
            if get_bool(params, "verify") {
                let rep = verify_invariance(&ds, cap)?;
                if !rep.invariant {
                    outcome = Outcome::CertifiedFailure;
                }
                payload.insert("invariance".into(), serde_json::to_value(&rep)?);
            }
            if let Some(bound) = get_opt_u64(params, "koszul_bound") {
                let rep = koszul_regularity(p, n, &ds.invariants, bound as usize)?;
                if !rep.regular_within_bound {
                    outcome = Outcome::CertifiedFailure;
                }
                payload.insert("koszul".into(), serde_json::to_value(&rep)?);
            }
            Ok((
                make_envelope("dickson", params.clone(), Value::Object(payload))?,
                outcome,
            ))
        }
        "steinberg" => {
            let p = get_u64(params, "p")? as u32;
            let n = get_u64(params, "n")? as usize;
            let k = get_u64(params, "k")? as u32;
            let st = steinberg_idempotent(p, n, k, cap)?;
            let id = GroupElement::identity(p, n);
            let payload = json!({
                "p": p,
                "n": n,
                "k": k,
                "index": st.index.to_string(),
                "support_size": st.element.support_size(),
                "identity_coefficient": st.element.coefficient(&id).to_string(),
                "idempotent_exact": st.exact,
                "idempotent_mod_p": true,
                "twist_lifts": st.twist_lifts,
            });
            Ok((
                make_envelope("steinberg", params.clone(), payload)?,
                Outcome::Certified,
            ))
        }
        "module" => {
            let p = get_u64(params, "p")? as u32;
            let n = get_u64(params, "n")? as usize;
            let k = get_opt_u64(params, "k").map(|k| k as u32);
            let frobenius = get_bool(params, "frobenius");
            let qm = if frobenius {
                if p != 2 {
                    return Err(Error::Parameter("--frobenius requires p = 2".into()));
                }
                build_frobenius_module(n, cap)?.to_qmodule()
            } else {
                build_module(p, n, cap)?.to_qmodule()
            };
            let (dump, dim, summand_dim) = match k {
                None => (dump_qmodule(&qm), qm.dim(), None),
                Some(k) => {
                    let st = steinberg_idempotent(p, n, k, cap)?;
                    let proj = if frobenius {
                        build_frobenius_module(n, cap)?.apply_idempotent(&st.element)?
                    } else {
                        build_module(p, n, cap)?.apply_idempotent(&st.element)?
                    };
                    let d = proj.qmodule.dim();
                    (dump_qmodule(&proj.qmodule), qm.dim(), Some(d))
                }
            };
            let mut payload = Map::new();
            payload.insert("p".into(), json!(p));
            payload.insert("n".into(), json!(n));
            payload.insert("variant".into(), json!(if frobenius { "frobenius" } else { "motivic" }));
            payload.insert("dim".into(), json!(dim));
            if let Some(k) = k {
                payload.insert("k".into(), json!(k));
                payload.insert("summand_dim".into(), json!(summand_dim));
            }
            if frobenius {
                payload.insert(
                    "realization_check".into(),
                    json!(frobenius_realization_check(n, cap)?),
                );
            }
            payload.insert("basis".into(), dump);
            Ok((
                make_envelope("module", params.clone(), Value::Object(payload))?,
                Outcome::Certified,
            ))
        }
        "certify" => {
            let p = get_u64(params, "p")? as u32;
            let n = get_u64(params, "n")? as usize;
            let k = get_u64(params, "k")? as u32;
            let ops: Vec<usize> = params
                .get("ops")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Input("missing parameter \"ops\"".into()))?
                .iter()
                .filter_map(Value::as_u64)
                .map(|x| x as usize)
                .collect();
            let st = steinberg_idempotent(p, n, k, cap)?;
            let module = build_module(p, n, cap)?;
            let proj = module.apply_idempotent(&st.element)?;
            let cert = certify_freeness(&proj.qmodule, &ops)?;
            let outcome = if cert.free {
                Outcome::Certified
            } else {
                Outcome::CertifiedFailure
            };
            let payload = json!({
                "p": p,
                "n": n,
                "k": k,
                "module_dim": module.dim(),
                "summand_dim": proj.qmodule.dim(),
                "certificate": serde_json::to_value(&cert)?,
            });
            Ok((make_envelope("certify", params.clone(), payload)?, outcome))
        }
        "level" => {
            let p = get_u64(params, "p")? as u32;
            let n = get_u64(params, "n")? as usize;
            let k = get_u64(params, "k")? as u32;
            let r_max = get_u64(params, "r_max")? as usize;
            let cert = level_certificate(p, n, k, r_max, cap)?;
            let outcome = if cert.certified {
                Outcome::Certified
            } else {
                Outcome::CertifiedFailure
            };
            Ok((
                make_envelope("level", params.clone(), serde_json::to_value(&cert)?)?,
                outcome,
            ))
        }
        "annihilate" => {
            let ring_spec: RingSpec = serde_json::from_value(
                params
                    .get("ring")
                    .cloned()
                    .ok_or_else(|| Error::Input("missing parameter \"ring\"".into()))?,
            )?;
            let pres_spec: PresentationSpec = serde_json::from_value(
                params
                    .get("presentation")
                    .cloned()
                    .ok_or_else(|| Error::Input("missing parameter \"presentation\"".into()))?,
            )?;
            let ring = ring_from_spec(&ring_spec)?;
            let pres = presentation_from_spec(&ring, &pres_spec)?;
            let ann = eliminate(&ring, &pres)?;
            let bound = get_opt_u64(params, "verify_bound").unwrap_or_else(|| {
                let a_grading = ann
                    .poly
                    .homogeneous_grading(&ring)
                    .unwrap_or(0);
                let max_gen = pres.gens.iter().map(|g| g.grading).max().unwrap_or(0);
                (a_grading + max_gen).max(ann.power as u64)
            });
            let verify = verify_annihilates(&ring, &pres, &ann.poly, bound)?;
            let km = km_localization_check(&ring, &pres)?;
            let outcome = if verify.all_zero && km.ok {
                Outcome::Certified
            } else {
                Outcome::CertifiedFailure
            };
            let payload = json!({
                "annihilator": serde_json::to_value(&ann)?,
                "verify": serde_json::to_value(&verify)?,
                "km_localization": serde_json::to_value(&km)?,
                "verify_bound": bound,
            });
            Ok((make_envelope("annihilate", params.clone(), payload)?, outcome))
        }
        other => Err(Error::Input(format!("unknown command {:?}", other))),
    }
}

/// Sparse basis dump: label, bidegree, and Q-images per installed operator.
fn dump_qmodule(qm: &QModule) -> Value {
    let basis: Vec<Value> = qm
        .space
        .basis
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut q_images = Map::new();
            for (&op, qop) in &qm.ops {
                let col = qop.matrix.column(i);
                let sparse: Vec<Value> = col
                    .iter()
                    .enumerate()
                    .filter(|&(r, &c)| (c != 0)).map(|(r, &c)| json!([r, c]))
                    .collect();
                q_images.insert(op.to_string(), Value::Array(sparse));
            }
            json!({
                "label": b.label,
                "weight": b.bidegree.weight,
                "degree": b.bidegree.degree,
                "q_images": Value::Object(q_images),
            })
        })
        .collect();
    Value::Array(basis)
}

#[derive(Debug, serde::Serialize)]
pub struct RegressionSummary {
    pub checked: usize,
    pub passed: usize,
    pub failures: Vec<String>,
    pub skipped: Vec<String>,
    pub warning: Option<String>,
}

/// Re-runs each stored envelope's configuration and diffs the determinism
/// hashes; a missing or unreadable golden is reported but non-fatal.
pub fn regression(dir: &Path, cap: u64) -> Result<RegressionSummary> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut summary = RegressionSummary {
        checked: 0,
        passed: 0,
        failures: Vec::new(),
        skipped: Vec::new(),
        warning: None,
    };
    if files.is_empty() {
        summary.warning = Some(format!("no goldens found in {}", dir.display()));
        return Ok(summary);
    }
    for file in files {
        let name = file
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let stored: Envelope = match std::fs::read_to_string(&file)
            .map_err(Error::from)
            .and_then(|s| serde_json::from_str(&s).map_err(Error::from))
        {
            Ok(e) => e,
            Err(err) => {
                summary.skipped.push(format!("{}: unreadable golden ({})", name, err));
                continue;
            }
        };
        summary.checked += 1;
        let config = RunConfig {
            command: stored.command.clone(),
            parameters: stored.parameters.clone(),
            output: None,
            cap,
        };
        match run(&config) {
            Ok((fresh, _)) => {
                if fresh.determinism_hash == stored.determinism_hash {
                    summary.passed += 1;
                } else {
                    let diff = first_difference(&stored.payload, &fresh.payload, "")
                        .unwrap_or_else(|| "payloads agree but hashes differ".into());
                    summary.failures.push(format!(
                        "{}: hash {} != stored {}; first difference at {}",
                        name, fresh.determinism_hash, stored.determinism_hash, diff
                    ));
                }
            }
            Err(err) => summary.failures.push(format!("{}: re-run failed ({})", name, err)),
        }
    }
    Ok(summary)
}

/// Converts parsed arguments into a RunConfig (file inputs are inlined so
/// envelopes replay without the original files).
pub fn config_from_cli(cmd: &CliCommand, cap: u64) -> Result<RunConfig> {
    let (command, parameters, output) = match cmd {
        CliCommand::Dickson {
            p,
            n,
            verify,
            koszul_bound,
            json,
        } => {
            let mut m = Map::new();
            m.insert("p".into(), json!(p));
            m.insert("n".into(), json!(n));
            m.insert("verify".into(), json!(verify));
            if let Some(b) = koszul_bound {
                m.insert("koszul_bound".into(), json!(b));
            }
            ("dickson", Value::Object(m), json.clone())
        }
        CliCommand::Steinberg { p, n, k, json } => (
            "steinberg",
            json!({"p": p, "n": n, "k": k}),
            json.clone(),
        ),
        CliCommand::Module {
            p,
            n,
            k,
            frobenius,
            dump,
        } => {
            let mut m = Map::new();
            m.insert("p".into(), json!(p));
            m.insert("n".into(), json!(n));
            m.insert("frobenius".into(), json!(frobenius));
            if let Some(k) = k {
                m.insert("k".into(), json!(k));
            }
            ("module", Value::Object(m), dump.clone())
        }
        CliCommand::Certify { p, n, k, ops, json } => (
            "certify",
            json!({"p": p, "n": n, "k": k, "ops": ops}),
            json.clone(),
        ),
        CliCommand::Level { p, n, k, r_max, out } => (
            "level",
            json!({"p": p, "n": n, "k": k, "r_max": r_max}),
            out.clone(),
        ),
        CliCommand::Annihilate {
            ring,
            presentation,
            verify_bound,
            json,
        } => {
            let ring_value: Value = serde_json::from_str(&std::fs::read_to_string(ring)?)?;
            let pres_value: Value = serde_json::from_str(&std::fs::read_to_string(presentation)?)?;
            let mut m = Map::new();
            m.insert("ring".into(), ring_value);
            m.insert("presentation".into(), pres_value);
            if let Some(b) = verify_bound {
                m.insert("verify_bound".into(), json!(b));
            }
            ("annihilate", Value::Object(m), json.clone())
        }
        CliCommand::Regression { .. } => {
            return Err(Error::Input("regression is dispatched separately".into()))
        }
    };
    Ok(RunConfig {
        command: command.to_string(),
        parameters,
        output,
        cap,
    })
}

/// Human-readable one-line summaries printed to stdout.
pub fn summarize(envelope: &Envelope, outcome: Outcome) -> String {
    let p = &envelope.payload;
    let status = match outcome {
        Outcome::Certified => "ok",
        Outcome::CertifiedFailure => "FAILED",
    };
    match envelope.command.as_str() {
        "dickson" => format!(
            "dickson: degrees {} [{}]",
            p.get("degrees").map(|d| d.to_string()).unwrap_or_default(),
            status
        ),
        "steinberg" => format!(
            "steinberg: support {} identity coefficient {} idempotent(exact={}, mod p=true) [{}]",
            p.get("support_size").and_then(Value::as_u64).unwrap_or(0),
            p.get("identity_coefficient").and_then(Value::as_str).unwrap_or("?"),
            p.get("idempotent_exact").and_then(Value::as_bool).unwrap_or(false),
            status
        ),
        "module" => format!(
            "module: dim {}{} [{}]",
            p.get("dim").and_then(Value::as_u64).unwrap_or(0),
            p.get("summand_dim")
                .and_then(Value::as_u64)
                .map(|d| format!(", summand dim {}", d))
                .unwrap_or_default(),
            status
        ),
        "certify" => format!(
            "certify: free={} generators={} [{}]",
            p.pointer("/certificate/free").and_then(Value::as_bool).unwrap_or(false),
            p.pointer("/certificate/generator_count").and_then(Value::as_u64).unwrap_or(0),
            status
        ),
        "level" => format!(
            "level: {} alpha ({})[{}] beta ({})[{}] [{}]",
            p.get("level").and_then(Value::as_u64).unwrap_or(0),
            p.pointer("/alpha/weight").and_then(Value::as_i64).unwrap_or(0),
            p.pointer("/alpha/degree").and_then(Value::as_i64).unwrap_or(0),
            p.pointer("/beta/weight").and_then(Value::as_i64).unwrap_or(0),
            p.pointer("/beta/degree").and_then(Value::as_i64).unwrap_or(0),
            status
        ),
        "annihilate" => format!(
            "annihilate: v_m^{} + tail; verified={} [{}]",
            p.pointer("/annihilator/power").and_then(Value::as_u64).unwrap_or(0),
            p.pointer("/verify/all_zero").and_then(Value::as_bool).unwrap_or(false),
            status
        ),
        _ => format!("{}: [{}]", envelope.command, status),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cmd(command: &str, params: Value) -> (Envelope, Outcome) {
        run(&RunConfig {
            command: command.into(),
            parameters: params,
            output: None,
            cap: DEFAULT_CAP,
        })
        .unwrap()
    }

    #[test]
    fn dickson_envelope() {
        let (env, outcome) = run_cmd("dickson", json!({"p": 2, "n": 2, "verify": true}));
        assert_eq!(outcome, Outcome::Certified);
        let inv = env.payload.get("invariants").unwrap().as_array().unwrap();
        assert_eq!(inv[0], json!("y1^2 + y1*y2 + y2^2"));
        assert_eq!(inv[1], json!("y1^2*y2 + y1*y2^2"));
    }

    #[test]
    fn level_envelope_is_deterministic() {
        let params = json!({"p": 3, "n": 1, "k": 1, "r_max": 2});
        let (a, oa) = run_cmd("level", params.clone());
        let (b, ob) = run_cmd("level", params);
        assert_eq!(oa, Outcome::Certified);
        assert_eq!(ob, Outcome::Certified);
        assert_eq!(a.to_canonical_string(), b.to_canonical_string());
        assert_eq!(a.payload.get("level"), Some(&json!(1)));
    }

    #[test]
    fn certify_k0_is_a_certified_failure() {
        // the untwisted summand of the (3,1) module contains 1 and x^y,
        // on which Q_0 vanishes: not free over Lambda(Q_0)
        let (env, outcome) = run_cmd("certify", json!({"p": 3, "n": 1, "k": 0, "ops": [0]}));
        assert_eq!(outcome, Outcome::CertifiedFailure);
        assert_eq!(env.payload.pointer("/certificate/free"), Some(&json!(false)));
    }

    #[test]
    fn annihilate_inline() {
        let params = json!({
            "ring": {"p": 2, "generators": [{"name": "v", "grading": 0}], "vm": "v"},
            "presentation": {
                "generators": [{"name": "y1", "grading": 0}],
                "relations": [{"generator": "y1", "power": 2, "u": {"y1": "2"}}]
            }
        });
        let (env, outcome) = run_cmd("annihilate", params);
        assert_eq!(outcome, Outcome::Certified);
        assert_eq!(
            env.payload.pointer("/annihilator/poly_text"),
            Some(&json!("v^2 + -2"))
        );
    }

    #[test]
    fn unknown_command() {
        let r = run(&RunConfig {
            command: "nope".into(),
            parameters: json!({}),
            output: None,
            cap: DEFAULT_CAP,
        });
        assert!(r.is_err());
    }

    #[test]
    fn regression_harness() {
        let dir = std::env::temp_dir().join(format!("mf-regress-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        // empty directory: vacuous pass with a warning
        let summary = regression(&dir, DEFAULT_CAP).unwrap();
        assert_eq!(summary.checked, 0);
        assert!(summary.warning.is_some());

        let (env, _) = run_cmd("dickson", json!({"p": 2, "n": 2, "verify": false}));
        std::fs::write(dir.join("d22.json"), env.to_canonical_string()).unwrap();
        let summary = regression(&dir, DEFAULT_CAP).unwrap();
        assert_eq!((summary.checked, summary.passed), (1, 1));

        // corrupt the stored hash
        let mut bad = env.clone();
        bad.determinism_hash = "0".repeat(64);
        std::fs::write(dir.join("bad.json"), bad.to_canonical_string()).unwrap();
        let summary = regression(&dir, DEFAULT_CAP).unwrap();
        assert_eq!(summary.checked, 2);
        assert_eq!(summary.failures.len(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
