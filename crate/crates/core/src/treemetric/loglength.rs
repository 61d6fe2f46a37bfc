//! Exact lengths of the form `-log(v)/k`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Values a metric tree can carry on its edges: an ordered additive monoid
/// with exact halving and partial subtraction.
pub trait Length: Clone + Ord + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    /// `self - other`, or `None` when the result would be negative.
    fn checked_sub(&self, other: &Self) -> Option<Self>;
    fn half(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
}

impl Length for Rational {
    fn zero() -> Self {
        Rational::zero()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn checked_sub(&self, other: &Self) -> Option<Self> {
        let d = self - other;
        (!d.is_negative()).then_some(d)
    }

    fn half(&self) -> Self {
        self / Rational::from_integer(2)
    }

    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }

    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
}

/// The nonnegative real `-log(v)/k` with `0 < v <= 1`, held exactly.
///
/// Equality and order are semantic, so `(1/4, 2)` equals `(1/2, 1)`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "RawLogLength", into = "RawLogLength")]
pub struct LogLength {
    v: Rational,
    k: u64,
}

#[derive(Serialize, Deserialize)]
struct RawLogLength {
    v: Rational,
    k: u64,
}

impl TryFrom<RawLogLength> for LogLength {
    type Error = Error;

    fn try_from(raw: RawLogLength) -> Result<Self> {
        LogLength::new(raw.v, raw.k)
    }
}

impl From<LogLength> for RawLogLength {
    fn from(l: LogLength) -> Self {
        RawLogLength { v: l.v, k: l.k }
    }
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl LogLength {
    pub fn new(v: Rational, k: u64) -> Result<Self> {
        if k == 0 || !v.is_positive() || v > Rational::one() {
            return Err(Error::Parse(format!("invalid log-length carrier ({v}, {k})")));
        }
        Ok(LogLength { v, k }.reduced())
    }

    /// `-log(q)` for a rational `q` in `(0, 1]`.
    pub fn neg_log(q: Rational) -> Result<Self> {
        LogLength::new(q, 1)
    }

    pub fn carrier(&self) -> &Rational {
        &self.v
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Pulls out square roots while `k` is even, keeping carriers small.
    fn reduced(mut self) -> Self {
        while self.k.is_multiple_of(2) {
            match (exact_sqrt(self.v.numer()), exact_sqrt(self.v.denom())) {
                (Some(n), Some(d)) => {
                    self.v = Rational::from_big(n, d);
                    self.k /= 2;
                }
                _ => break,
            }
        }
        self
    }

    fn at(&self, k: u64) -> Rational {
        self.v.pow(u32::try_from(k / self.k).expect("exponent fits in u32"))
    }
}

impl Length for LogLength {
    fn zero() -> Self {
        LogLength { v: Rational::one(), k: 1 }
    }

    fn add(&self, other: &Self) -> Self {
        let k = self.k.lcm(&other.k);
        LogLength { v: self.at(k) * other.at(k), k }.reduced()
    }

    fn checked_sub(&self, other: &Self) -> Option<Self> {
        let k = self.k.lcm(&other.k);
        let v = self.at(k) / other.at(k);
        (v <= Rational::one()).then(|| LogLength { v, k }.reduced())
    }

    fn half(&self) -> Self {
        LogLength { v: self.v.clone(), k: self.k * 2 }.reduced()
    }

    fn is_zero(&self) -> bool {
        self.v.is_one()
    }

    fn to_f64(&self) -> f64 {
        (ln_big(self.v.denom()) - ln_big(self.v.numer())) / self.k as f64
    }
}

fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.abs().to_string().parse::<f64>().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 900;
    let top: BigInt = n.abs() >> shift;
    top.to_string().parse::<f64>().map(f64::ln).unwrap_or(f64::NAN) + shift as f64 * std::f64::consts::LN_2
}

impl Ord for LogLength {
    fn cmp(&self, other: &Self) -> Ordering {
        // -log(v1)/k1 < -log(v2)/k2  iff  v1^k2 > v2^k1
        let lhs = self.v.pow(u32::try_from(other.k).expect("k fits in u32"));
        let rhs = other.v.pow(u32::try_from(self.k).expect("k fits in u32"));
        rhs.cmp(&lhs)
    }
}

impl PartialOrd for LogLength {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for LogLength {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LogLength {}

impl fmt::Display for LogLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "-log({})", self.v)
        } else {
            write!(f, "-log({})/{}", self.v, self.k)
        }
    }
}

impl fmt::Debug for LogLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.v, self.k)
    }
}
