//! Fixed-point BTC amounts.
//!
//! Amounts are stored as integer satoshi (1 BTC = 10^8 satoshi) so that
//! arithmetic, CSV round-trips and conservation checks are exact. The textual
//! form is always a decimal with exactly 8 fractional digits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SATOSHI_PER_BTC: u64 = 100_000_000;

/// A non-negative BTC amount with 8 fractional digits, backed by integer satoshi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Btc(u64);

impl Btc {
    pub const ZERO: Btc = Btc(0);

    pub fn from_sat(satoshi: u64) -> Btc {
        Btc(satoshi)
    }

    pub fn sat(self) -> u64 {
        self.0
    }

    /// BTC value as a float. Exact for every amount below 2^53 satoshi,
    /// which covers the full 21M BTC supply.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SATOSHI_PER_BTC as f64
    }
}

/// Converts integer satoshi to a decimal BTC amount (1 satoshi = 10^-8 BTC).
pub fn satoshi_to_btc(value_satoshi: u64) -> Btc {
    Btc::from_sat(value_satoshi)
}

impl fmt::Display for Btc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{:08}",
            self.0 / SATOSHI_PER_BTC,
            self.0 % SATOSHI_PER_BTC
        )
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid BTC amount {0:?}")]
pub struct ParseBtcError(pub String);

impl FromStr for Btc {
    type Err = ParseBtcError;

    /// Parses a non-negative decimal with at most 8 fractional digits.
    fn from_str(s: &str) -> Result<Btc, ParseBtcError> {
        let err = || ParseBtcError(s.to_string());
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if frac_part.len() > 8 {
            return Err(err());
        }
        let whole: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let mut frac: u64 = 0;
        if !frac_part.is_empty() {
            frac = frac_part.parse().map_err(|_| err())?;
            frac *= 10u64.pow(8 - frac_part.len() as u32);
        }
        whole
            .checked_mul(SATOSHI_PER_BTC)
            .and_then(|w| w.checked_add(frac))
            .map(Btc)
            .ok_or_else(err)
    }
}

impl Serialize for Btc {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Btc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Btc, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
