//! Run configuration shared by the subcommands and the exit-code policy.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use wachlab::wach::{default_gamma_gens, default_mx, WachParams};
use wachlab::{EisensteinRing, Error, OlElem};

use crate::apspec::{max_p_val, parse_ap, parse_eisenstein, unramified, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_OUT_OF_SCOPE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

/// An error carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_PARSE,
            msg: msg.into(),
        }
    }

    pub fn failure(msg: impl Into<String>) -> Self {
        CliError {
            code: EXIT_FAILURE,
            msg: msg.into(),
        }
    }
}

/// Out-of-scope inputs exit with 2, malformed ones with 3, the rest with 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::OutOfScope(_) => EXIT_OUT_OF_SCOPE,
        Error::Parse(_) | Error::InvalidInput(_) | Error::InvalidRing(_) | Error::Json(_) => EXIT_PARSE,
        _ => EXIT_FAILURE,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: exit_code(&e),
            msg: e.to_string(),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::parse(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::failure(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::failure(format!("json error: {e}"))
    }
}

/// One (p, k, a_p) input with its precisions.
#[derive(Debug, Clone)]
pub struct Instance {
    pub p: u64,
    pub k: u32,
    /// The a_p spec as typed.
    pub ap_text: String,
    pub eisenstein: Vec<BigInt>,
    pub ap: Vec<BigInt>,
    pub mx: Option<i64>,
    pub n_target: u32,
    pub gamma_gens: Option<Vec<i64>>,
}

impl Instance {
    pub fn new(p: u64, k: u32, ap_text: &str, eisenstein: Option<&str>) -> Result<Self, CliError> {
        let eis = match eisenstein {
            Some(s) => parse_eisenstein(s, p)?,
            None => unramified(p),
        };
        let ap = parse_ap(ap_text, p, &eis)?;
        Ok(Instance {
            p,
            k,
            ap_text: ap_text.to_string(),
            eisenstein: eis,
            ap,
            mx: None,
            n_target: 2,
            gamma_gens: None,
        })
    }

    /// a_p in a ring with enough digits to read off its valuation.
    pub fn ap_elem(&self) -> Result<OlElem, Error> {
        let digits = 8 + max_p_val(&self.ap, self.p);
        let ring = EisensteinRing::new(self.p, self.eisenstein.clone(), digits)?;
        OlElem::from_coords(&ring, &self.ap)
    }

    pub fn params(&self) -> WachParams {
        let mut w = WachParams::with_ring_data(self.p, self.eisenstein.clone(), self.k, self.ap.clone());
        w.mx = self.mx.unwrap_or_else(|| default_mx(self.p, self.k));
        w.n_target = self.n_target;
        w.gamma_gens = self
            .gamma_gens
            .clone()
            .unwrap_or_else(|| default_gamma_gens(self.p));
        w
    }
}

/// Parses "3", "3,5,7", "3..13" or mixtures like "3..7,11".
pub fn parse_list(s: &str) -> Result<Vec<i64>, CliError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let b = b.trim_start_matches('=');
            let a: i64 = a.trim().parse().map_err(|_| CliError::parse(format!("bad range {part:?}")))?;
            let b: i64 = b.trim().parse().map_err(|_| CliError::parse(format!("bad range {part:?}")))?;
            out.extend(a..=b);
        } else {
            out.push(
                part.parse()
                    .map_err(|_| CliError::parse(format!("bad integer {part:?}")))?,
            );
        }
    }
    Ok(out)
}

/// The weights a table covers for p: the requested ones inside [p+2, 2p−1].
pub fn k_range(p: u64, requested: Option<&[i64]>) -> Vec<u32> {
    let full: RangeInclusive<i64> = (p as i64 + 2)..=(2 * p as i64 - 1);
    match requested {
        None => full.map(|k| k as u32).collect(),
        Some(ks) => {
            let mut v: Vec<u32> = ks.iter().filter(|k| full.contains(k)).map(|&k| k as u32).collect();
            v.sort_unstable();
            v.dedup();
            v
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}
