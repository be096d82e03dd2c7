//! Verification records and serde helpers. Big integers serialize as decimal strings.

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

pub fn big<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn opt_big<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.serialize_str(&b.to_string()),
        None => s.serialize_none(),
    }
}

pub fn big_map<S: Serializer>(
    v: &std::collections::BTreeMap<usize, BigInt>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(v.len()))?;
    for (k, b) in v {
        m.serialize_entry(&k.to_string(), &b.to_string())?;
    }
    m.end()
}

/// Pass/fail record binding a claim to the instance it was checked on.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerificationReport {
    pub claim: String,
    pub instance: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(
        claim: impl Into<String>,
        instance: impl Into<String>,
        expected: impl ToString,
        observed: impl ToString,
    ) -> Self {
        let (expected, observed) = (expected.to_string(), observed.to_string());
        VerificationReport {
            claim: claim.into(),
            instance: instance.into(),
            pass: expected == observed,
            expected,
            observed,
        }
    }

    pub fn with_pass(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }
}
