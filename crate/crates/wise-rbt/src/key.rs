use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::TreeError;

/// Exact rational sort key.
///
/// Keys give elements a total order without ever being shifted: inserting a
/// block between two neighbors synthesizes fresh keys strictly between their
/// keys (see [`synth_keys`]), and deleting never renumbers survivors. Keys
/// are an internal ordering device — elements are addressed by rank — but
/// they are exposed read-only so deleted blocks can be reinserted verbatim.
///
/// Values that fit a reduced `i64/i64` fraction are stored inline; anything
/// wider spills to an arbitrary-precision rational, so key arithmetic cannot
/// overflow. Both forms keep `denominator > 0` and lowest terms, and a value
/// is stored inline whenever it fits, so equality is representational.
#[derive(Clone, PartialEq, Eq)]
pub struct RankKey(Repr);

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

impl RankKey {
    /// The integer `n` as a key (denominator 1).
    pub fn integer(n: i64) -> RankKey {
        RankKey(Repr::Small { num: n, den: 1 })
    }

    /// Numerator/denominator as strings, mostly for diagnostics.
    pub fn numer_denom_strings(&self) -> (String, String) {
        match &self.0 {
            Repr::Small { num, den } => (num.to_string(), den.to_string()),
            Repr::Big(r) => (r.numer().to_string(), r.denom().to_string()),
        }
    }

    /// Builds from an i128 fraction with `den > 0`; reduces and demotes.
    fn from_i128(num: i128, den: i128) -> RankKey {
        debug_assert!(den > 0);
        let g = num.gcd(&den);
        let (n, d) = if g == 0 { (0, 1) } else { (num / g, den / g) };
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n64), Ok(d64)) => RankKey(Repr::Small { num: n64, den: d64 }),
            _ => RankKey(Repr::Big(Box::new(BigRational::new(
                BigInt::from(n),
                BigInt::from(d),
            )))),
        }
    }

    /// Wraps a normalized big rational, demoting to the inline form when it
    /// fits so the representation stays canonical.
    fn from_big(r: BigRational) -> RankKey {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            RankKey(Repr::Small { num: n, den: d })
        } else {
            RankKey(Repr::Big(Box::new(r)))
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            // Already reduced with a positive denominator.
            Repr::Small { num, den } => {
                BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            Repr::Big(r) => (**r).clone(),
        }
    }

    /// `self + delta` for an integer delta.
    pub(crate) fn offset(&self, delta: i64) -> RankKey {
        match &self.0 {
            Repr::Small { num, den } => {
                let n = *num as i128 + (delta as i128) * (*den as i128);
                RankKey::from_i128(n, *den as i128)
            }
            Repr::Big(r) => {
                RankKey::from_big(&**r + BigRational::from_integer(BigInt::from(delta)))
            }
        }
    }

    /// `pred + i * (succ - pred) / t`, exact. Requires `0 < i < t`.
    fn interpolate(pred: &RankKey, succ: &RankKey, i: i64, t: i64) -> RankKey {
        debug_assert!(0 < i && i < t);
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&pred.0, &succ.0)
        {
            if let Some(k) = interpolate_i128(*a, *b, *c, *d, i, t) {
                return k;
            }
        }
        let p = pred.to_big();
        let s = succ.to_big();
        let frac = BigRational::new(BigInt::from(i), BigInt::from(t));
        let step = (s - p.clone()) * frac;
        RankKey::from_big(p + step)
    }
}

/// Inline interpolation: `(a/b) + i*((c/d)-(a/b))/t` as
/// `(a*d*t + i*(c*b - a*d)) / (b*d*t)`. Returns `None` when any intermediate
/// product leaves i128 range and the big path must take over.
fn interpolate_i128(a: i64, b: i64, c: i64, d: i64, i: i64, t: i64) -> Option<RankKey> {
    let (a, b, c, d, i, t) = (
        a as i128, b as i128, c as i128, d as i128, i as i128, t as i128,
    );
    let ad = a.checked_mul(d)?;
    let cb = c.checked_mul(b)?;
    let num = ad
        .checked_mul(t)?
        .checked_add(i.checked_mul(cb.checked_sub(ad)?)?)?;
    let den = b.checked_mul(d)?.checked_mul(t)?;
    Some(RankKey::from_i128(num, den))
}

impl Ord for RankKey {
    fn cmp(&self, other: &RankKey) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                // i64*i64 always fits i128, so cross multiplication is exact.
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for RankKey {
    fn partial_cmp(&self, other: &RankKey) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RankKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Debug for RankKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RankKey({self})")
    }
}

/// Synthesizes `m` strictly increasing keys that fit strictly between the
/// given bounds.
///
/// * both bounds present — the evenly spaced rationals
///   `pred + i*(succ-pred)/(m+1)` for `i = 1..=m`, reduced to lowest terms;
/// * only a predecessor — the integer steps `pred+1 ..= pred+m`;
/// * only a successor — the integer steps `succ-m ..= succ-1`;
/// * no bounds (empty sequence) — the integers `1..=m`.
///
/// Fails with `InvariantViolation` when both bounds are present but not in
/// strictly increasing order.
pub fn synth_keys(
    pred: Option<&RankKey>,
    succ: Option<&RankKey>,
    m: usize,
) -> Result<Vec<RankKey>, TreeError> {
    if m == 0 {
        return Ok(Vec::new());
    }
    match (pred, succ) {
        (Some(p), Some(s)) => {
            if p >= s {
                return Err(TreeError::InvariantViolation { k: 0, m, count: 0 });
            }
            let t = (m + 1) as i64;
            Ok((1..=m)
                .map(|i| RankKey::interpolate(p, s, i as i64, t))
                .collect())
        }
        (Some(p), None) => Ok((1..=m).map(|i| p.offset(i as i64)).collect()),
        (None, Some(s)) => Ok((1..=m).map(|i| s.offset(i as i64 - 1 - m as i64)).collect()),
        (None, None) => Ok((1..=m).map(|i| RankKey::integer(i as i64)).collect()),
    }
}
