//! Self-contained JSON certificate envelopes: canonical serialization
//! (sorted keys, integers and integer fractions only, newline-terminated)
//! and a determinism hash over the payload.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub command: String,
    pub parameters: Value,
    pub payload: Value,
    pub determinism_hash: String,
}

/// Rejects floating-point numbers anywhere in the value tree.
pub fn assert_canonical(v: &Value) -> Result<()> {
    match v {
        Value::Number(n) => {
            if n.as_i64().is_none() && n.as_u64().is_none() {
                return Err(Error::Structure(format!(
                    "non-integer scalar {} in a certificate",
                    n
                )));
            }
            Ok(())
        }
        Value::Array(a) => a.iter().try_for_each(assert_canonical),
        Value::Object(o) => o.values().try_for_each(assert_canonical),
        _ => Ok(()),
    }
}

/// Compact JSON with sorted keys (the default map is ordered).
pub fn canonical_json(v: &Value) -> String {
    serde_json::to_string(v).expect("serialization of a checked value")
}

pub fn payload_hash(payload: &Value) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical_json(payload).as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{:02x}", b)).collect()
}

pub fn make_envelope(command: &str, parameters: Value, payload: Value) -> Result<Envelope> {
    assert_canonical(&parameters)?;
    assert_canonical(&payload)?;
    let determinism_hash = payload_hash(&payload);
    Ok(Envelope {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        parameters,
        payload,
        determinism_hash,
    })
}

impl Envelope {
    /// Byte-reproducible rendering: canonical JSON plus a trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let v = serde_json::to_value(self).expect("envelope serializes");
        let mut s = canonical_json(&v);
        s.push('\n');
        s
    }
}

/// First structural difference between two values, as a path + summary.
pub fn first_difference(a: &Value, b: &Value, path: &str) -> Option<String> {
    match (a, b) {
        (Value::Object(ma), Value::Object(mb)) => {
            for key in ma.keys().chain(mb.keys()) {
                let p = format!("{}/{}", path, key);
                match (ma.get(key), mb.get(key)) {
                    (Some(x), Some(y)) => {
                        if let Some(d) = first_difference(x, y, &p) {
                            return Some(d);
                        }
                    }
                    (Some(_), None) => return Some(format!("{} missing on the right", p)),
                    (None, Some(_)) => return Some(format!("{} missing on the left", p)),
                    (None, None) => unreachable!(),
                }
            }
            None
        }
        (Value::Array(xa), Value::Array(xb)) => {
            if xa.len() != xb.len() {
                return Some(format!("{}: lengths {} vs {}", path, xa.len(), xb.len()));
            }
            for (i, (x, y)) in xa.iter().zip(xb).enumerate() {
                if let Some(d) = first_difference(x, y, &format!("{}[{}]", path, i)) {
                    return Some(d);
                }
            }
            None
        }
        _ => (a != b).then(|| format!("{}: {} vs {}", path, a, b)),
    }
}
