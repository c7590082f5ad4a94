//! Machine-readable run reports.
//!
//! Every subcommand emits exactly one JSON document on stdout.  The field
//! order is fixed and every exact integer is rendered as a decimal string, so
//! counts like 2^80 survive any JSON parser unharmed and two runs with the
//! same inputs produce byte-identical output apart from `elapsed_ms`.

use num_bigint::BigUint;
use num_rational::BigRational;
use persym_core::engine::RankDistribution;
use persym_core::formulas::IdentityCheck;
use serde::Serialize;
use serde_json::{Map, Value};
use std::str::FromStr;

/// One verified equality, both sides spelled out.
#[derive(Serialize)]
pub struct CheckLine {
    pub anchor: String,
    pub lhs: String,
    pub rhs: String,
    pub ok: bool,
}

impl From<&IdentityCheck> for CheckLine {
    fn from(c: &IdentityCheck) -> Self {
        CheckLine {
            anchor: c.anchor.clone(),
            lhs: c.lhs.to_string(),
            rhs: c.rhs.to_string(),
            ok: c.ok,
        }
    }
}

#[derive(Serialize)]
pub struct ShardMeta {
    pub count: u64,
    pub index: u64,
    pub tuples_scanned: String,
}

/// Shape of a solved linear system.
#[derive(Serialize)]
pub struct SystemMeta {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub unique: bool,
}

#[derive(Serialize)]
pub struct SolvedCoefficient {
    pub rank: usize,
    pub exponent: usize,
    pub value: String,
}

/// The one report schema all subcommands share; sections that do not apply
/// are omitted.  `params` is a sorted map, everything else keeps declaration
/// order.
#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub params: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    /// Fitted polynomial, constant term first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conflict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solved: Option<Vec<SolvedCoefficient>>,
    /// One coefficient list per histogram row, constant term first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomials: Option<Vec<Vec<String>>>,
    /// Ranks no closed form covers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncovered: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shards: Option<ShardMeta>,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            params: Map::new(),
            gamma: None,
            value: None,
            source: None,
            outcome: None,
            coefficients: None,
            conflict: None,
            free_dim: None,
            system: None,
            solved: None,
            polynomials: None,
            uncovered: None,
            checks: Vec::new(),
            shards: None,
            elapsed_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn rational(x: &BigRational) -> String {
    x.to_string()
}

pub fn gamma_strings(dist: &RankDistribution) -> Vec<String> {
    dist.gamma.iter().map(BigUint::to_string).collect()
}

/// Histogram as CSV, one row per rank.
pub fn gamma_csv(dist: &RankDistribution) -> String {
    let mut out = String::from("i,gamma\n");
    for (i, g) in dist.gamma.iter().enumerate() {
        out.push_str(&format!("{i},{g}\n"));
    }
    out
}

/// Rebuilds the distribution a `census` report describes, so a saved report
/// can be re-verified without rescanning.
pub fn parse_census_report(text: &str) -> Result<RankDistribution, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("not a JSON report: {e}"))?;
    let field_usize = |name: &str| -> Result<usize, String> {
        v["params"][name]
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| format!("report lacks params.{name}"))
    };
    let n = field_usize("n")?;
    let k = field_usize("k")?;
    let mut dist = RankDistribution::empty(n, k).map_err(|e| e.to_string())?;

    let gamma = v["gamma"].as_array().ok_or("report lacks a gamma array")?;
    if gamma.len() != dist.gamma.len() {
        return Err(format!(
            "gamma has {} entries, sizes n={n}, k={k} need {}",
            gamma.len(),
            dist.gamma.len()
        ));
    }
    for (slot, g) in dist.gamma.iter_mut().zip(gamma) {
        let s = g.as_str().ok_or("gamma entries must be decimal strings")?;
        *slot = BigUint::from_str(s).map_err(|e| format!("bad gamma entry {s:?}: {e}"))?;
    }

    let scanned = v["shards"]["tuples_scanned"]
        .as_str()
        .ok_or("report lacks shards.tuples_scanned")?;
    dist.tuples_scanned =
        BigUint::from_str(scanned).map_err(|e| format!("bad tuples_scanned: {e}"))?;
    Ok(dist)
}
