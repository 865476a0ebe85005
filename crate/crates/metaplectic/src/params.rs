//! Solution parameters `(p, r, kappa)` and the braiding sign `lambda`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::OddModulus;

/// A value in `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn from_i64(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::InvalidParams(format!("sign must be 1 or -1, got {v}"))),
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl TryFrom<i64> for Sign {
    type Error = Error;
    fn try_from(v: i64) -> Result<Self> {
        Sign::from_i64(v)
    }
}

impl From<Sign> for i64 {
    fn from(s: Sign) -> i64 {
        s.value()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Validated `(p, r, kappa)`: `r` odd, `1 <= r < 2p+1`, `gcd(r, 2p+1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Params {
    pub p: usize,
    pub r: i64,
    pub kappa: Sign,
}

impl Params {
    pub fn new(p: usize, r: i64, kappa: Sign) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidParams("p must be at least 1".into()));
        }
        let n = 2 * p as i64 + 1;
        if r % 2 == 0 {
            return Err(Error::InvalidParams(format!("r must be odd, got {r}")));
        }
        if r < 1 || r >= n {
            return Err(Error::InvalidParams(format!("r must satisfy 1 <= r < 2p+1 = {n}, got {r}")));
        }
        if r.gcd(&n) != 1 {
            return Err(Error::InvalidParams(format!("r must be coprime to 2p+1 = {n}, got {r}")));
        }
        Ok(Params { p, r, kappa })
    }

    /// `2p + 1`.
    pub fn n(&self) -> i64 {
        2 * self.p as i64 + 1
    }

    pub fn modulus(&self) -> OddModulus {
        OddModulus::new(self.n()).expect("validated")
    }

    pub fn kappa_i(&self) -> i64 {
        self.kappa.value()
    }

    /// Odd `r` in `[1, 2p+1)` coprime to `2p+1`, ascending.
    pub fn valid_r(p: usize) -> Vec<i64> {
        let n = 2 * p as i64 + 1;
        (1..n).step_by(2).filter(|r| r.gcd(&n) == 1).collect()
    }

    /// Every valid `(r, kappa)` at rank `p`, `kappa = +1` first for each `r`.
    pub fn all(p: usize) -> Vec<Params> {
        Self::valid_r(p).into_iter().flat_map(|r| Sign::BOTH.into_iter().map(move |k| Params { p, r, kappa: k })).collect()
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, r={}, kappa={})", self.p, self.r, self.kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_messages() {
        let e = Params::new(2, 2, Sign::Plus).unwrap_err();
        assert!(e.to_string().contains("r must be odd"));
        let e = Params::new(3, 9, Sign::Plus).unwrap_err();
        assert!(e.to_string().contains("1 <= r < 2p+1"));
        let e = Params::new(4, 3, Sign::Plus).unwrap_err();
        assert!(e.to_string().contains("coprime"));
        assert!(Params::new(0, 1, Sign::Plus).is_err());
    }

    #[test]
    fn valid_r_lists() {
        assert_eq!(Params::valid_r(1), vec![1]);
        assert_eq!(Params::valid_r(2), vec![1, 3]);
        assert_eq!(Params::valid_r(4), vec![1, 5, 7]);
        assert_eq!(Params::all(2).len(), 4);
    }

    #[test]
    fn valid_r_covers_half_unit_group_once() {
        use crate::numtheory::{g_reduce, HalfUnitGroup};
        for p in 1..60 {
            let m = OddModulus::from_rank(p).unwrap();
            let mut folded: Vec<i64> = Params::valid_r(p).iter().map(|&r| g_reduce(r, m)).collect();
            folded.sort();
            assert_eq!(folded, HalfUnitGroup::new(m).reps());
        }
    }

    #[test]
    fn sign_serde() {
        assert_eq!(serde_json::to_string(&Sign::Minus).unwrap(), "-1");
        assert_eq!(serde_json::from_str::<Sign>("1").unwrap(), Sign::Plus);
        assert!(serde_json::from_str::<Sign>("0").is_err());
    }
}
