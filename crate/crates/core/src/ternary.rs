//! Exact base-3 arithmetic for the middle-thirds Cantor set `C` and its
//! scale-invariant extension `C^e`, the set of nonnegative reals whose
//! ternary expansion uses only the digits 0 and 2.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Exact;

/// Default number of ternary digits examined by membership tests.
pub const DEFAULT_DEPTH: u32 = 48;

/// Number of digits used when rounding into `C`.
pub const ROUNDING_DEPTH: u32 = 256;

/// Enumeration limit for [`ce_truncation`].
pub const TRUNCATION_BUDGET: usize = 1 << 20;

/// A finite base-3 expansion with digits in `{0, 2}`:
/// `sum of digits[i] * 3^(top - i)`.
///
/// Canonical form has no leading or trailing zero digits; zero is the empty
/// expansion with `top == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TernaryNumber {
    top: i64,
    digits: Vec<u8>,
}

impl TernaryNumber {
    pub fn zero() -> Self {
        TernaryNumber {
            top: 0,
            digits: Vec::new(),
        }
    }

    /// Builds the canonical form of `sum digits[i] * 3^(top - i)`.
    pub fn new(top: i64, digits: Vec<u8>) -> Result<Self> {
        if let Some(bad) = digits.iter().find(|&&d| d != 0 && d != 2) {
            return Err(Error::Range(format!("digit {bad}"), "{0, 2}"));
        }
        let first = digits.iter().position(|&d| d != 0);
        let Some(first) = first else {
            return Ok(TernaryNumber::zero());
        };
        let last = digits.iter().rposition(|&d| d != 0).unwrap_or(first);
        Ok(TernaryNumber {
            top: top - first as i64,
            digits: digits[first..=last].to_vec(),
        })
    }

    /// Exponent of the leading digit.
    pub fn top_exponent(&self) -> i64 {
        self.top
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Exponent of the last digit.
    fn low_exponent(&self) -> i64 {
        self.top - self.digits.len() as i64 + 1
    }

    /// `sum a_j 3^j`, exactly.
    pub fn value(&self) -> Exact {
        if self.is_zero() {
            return Exact::zero();
        }
        let three = BigInt::from(3u8);
        let n = self
            .digits
            .iter()
            .fold(BigInt::zero(), |acc, &d| acc * &three + BigInt::from(d));
        Exact::from_rational(BigRational::from_integer(n)).scale3(self.low_exponent())
    }

    /// Recovers the finite `{0,2}` expansion of `value`, if it has one.
    pub fn from_value(value: &Exact) -> Option<Self> {
        if value.is_zero() {
            return Some(TernaryNumber::zero());
        }
        if value.is_negative() || !value.mantissa().denom().is_one() {
            return None;
        }
        let three = BigInt::from(3u8);
        let mut n = value.mantissa().numer().clone();
        let mut rev = Vec::new();
        while !n.is_zero() {
            let (q, r) = n.div_rem(&three);
            let d = r.to_u8()?;
            if d == 1 {
                return None;
            }
            rev.push(d);
            n = q;
        }
        rev.reverse();
        let top = value.exp3() + rev.len() as i64 - 1;
        TernaryNumber::new(top, rev).ok()
    }
}

/// Multiplies by `3^n` by shifting the exponent.
pub fn scale3(t: &TernaryNumber, n: i64) -> TernaryNumber {
    if t.is_zero() {
        return t.clone();
    }
    TernaryNumber {
        top: t.top + n,
        digits: t.digits.clone(),
    }
}

/// `sum a_j 3^j` of a canonical expansion.
pub fn ternary_value(t: &TernaryNumber) -> Exact {
    t.value()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    In,
    Out,
    UndecidedAtDepth,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipVerdict {
    pub answer: Membership,
    /// Digits examined after the leading zeros.
    pub depth: u32,
    /// Position (1-based, below the ternary point of the input) of the first
    /// digit that is forced to be 1.
    pub witness: Option<u64>,
}

impl MembershipVerdict {
    pub fn is_in(&self) -> bool {
        self.answer == Membership::In
    }
}

/// Greedy ternary digits of a rational in `[0, 1)`, with cycle detection.
struct Digits {
    rem: BigInt,
    den: BigInt,
    seen: HashMap<BigInt, u32>,
    position: u32,
}

enum Step {
    /// next digit and whether the expansion terminates right after it
    Digit(u8, bool),
    /// the remaining expansion repeats digits already produced
    Cycle,
    Done,
}

impl Digits {
    fn new(q: &BigRational) -> Self {
        Digits {
            rem: q.numer().clone(),
            den: q.denom().clone(),
            seen: HashMap::new(),
            position: 0,
        }
    }

    fn next(&mut self) -> Step {
        if self.rem.is_zero() {
            return Step::Done;
        }
        if self.seen.insert(self.rem.clone(), self.position).is_some() {
            return Step::Cycle;
        }
        let (digit, rem) = (&self.rem * 3u8).div_rem(&self.den);
        self.rem = rem;
        self.position += 1;
        Step::Digit(digit.to_u8().unwrap_or(0), self.rem.is_zero())
    }
}

/// Splits `q > 0` as `q = q' * 3^-shift` with `q'` in `(1/3, 1]` (or larger
/// when `q > 1`, in which case `shift <= 0`).
fn normalize_unit(q: &Exact) -> (Exact, i64) {
    let j = q.floor_log3().unwrap_or(0);
    // 3^j <= q < 3^(j+1); want q * 3^s in (1/3, 1]
    let mut s = -(j + 1);
    let mut scaled = q.scale3(s);
    if scaled == Exact::ratio(1, 3) {
        s += 1;
        scaled = q.scale3(s);
    }
    (scaled, s)
}

/// Decides `q ∈ C` for `0 <= q <= 1` by exploring `{0,2}` expansions.
///
/// A finite expansion ending in the digit 1 is rewritten as `0222…`, so
/// endpoints such as `1/3` are members. `C` is invariant under `x ↦ x/3`, so
/// leading zero digits are skipped exactly and `depth` counts digits after
/// them.
pub fn is_cantor(q: &Exact, depth: u32) -> Result<MembershipVerdict> {
    if q.is_negative() || *q > Exact::one() {
        return Err(Error::Range(q.to_string(), "[0, 1]"));
    }
    let verdict = |answer, depth, witness| MembershipVerdict {
        answer,
        depth,
        witness,
    };
    if q.is_zero() || *q == Exact::one() {
        return Ok(verdict(Membership::In, 0, None));
    }
    let (unit, shift) = normalize_unit(q);
    let unit = unit.to_rational();
    if unit.is_one() {
        return Ok(verdict(Membership::In, 0, None));
    }
    let mut digits = Digits::new(&unit);
    loop {
        if digits.position >= depth {
            return Ok(verdict(Membership::UndecidedAtDepth, depth, None));
        }
        match digits.next() {
            Step::Done | Step::Cycle => return Ok(verdict(Membership::In, digits.position, None)),
            Step::Digit(1, true) => return Ok(verdict(Membership::In, digits.position, None)),
            Step::Digit(1, false) => {
                let at = digits.position as u64 + shift as u64;
                return Ok(verdict(Membership::Out, digits.position, Some(at)));
            }
            Step::Digit(_, _) => {}
        }
    }
}

/// Decides `q ∈ C^e` for `q >= 0` through the single scale
/// `i = max(0, ceil(log3 q))`: `q ∈ C^e` iff `3^-i q ∈ C`.
pub fn is_extended_cantor(q: &Exact, depth: u32) -> Result<MembershipVerdict> {
    if q.is_negative() {
        return Err(Error::Range(q.to_string(), "[0, inf)"));
    }
    if q.is_zero() {
        return is_cantor(q, depth);
    }
    let j = q.floor_log3().unwrap_or(0);
    let ceil = if Exact::pow3(j) == *q { j } else { j + 1 };
    is_cantor(&q.scale3(-ceil.max(0)), depth)
}

/// Largest element of `C` that is `<= x`, for `x >= 0`.
///
/// Exact unless the first [`ROUNDING_DEPTH`] significant digits of `x`
/// avoid 1 without terminating or cycling, in which case the truncated
/// prefix (an element of `C` within `3^-ROUNDING_DEPTH` relative) is used.
pub fn floor_in_cantor(x: &Exact) -> Exact {
    if !x.is_positive() {
        return Exact::zero();
    }
    if *x >= Exact::one() {
        return Exact::one();
    }
    let (unit, shift) = normalize_unit(x);
    if unit == Exact::one() {
        return x.clone();
    }
    let rounded = round_unit_in_cantor(&unit.to_rational(), false);
    rounded.scale3(-shift)
}

/// Smallest element of `C` that is `>= x`; `None` when `x > 1`.
pub fn ceil_in_cantor(x: &Exact) -> Option<Exact> {
    if !x.is_positive() {
        return Some(Exact::zero());
    }
    if *x > Exact::one() {
        return None;
    }
    if *x == Exact::one() {
        return Some(Exact::one());
    }
    let (unit, shift) = normalize_unit(x);
    if unit == Exact::one() {
        return Some(x.clone());
    }
    Some(round_unit_in_cantor(&unit.to_rational(), true).scale3(-shift))
}

fn round_unit_in_cantor(unit: &BigRational, up: bool) -> Exact {
    let mut digits = Digits::new(unit);
    let mut prefix = BigInt::zero();
    let three = BigInt::from(3u8);
    let original = Exact::from_rational(unit.clone());
    let at = |prefix: &BigInt, position: u32| {
        Exact::from_rational(BigRational::from_integer(prefix.clone())).scale3(-(position as i64))
    };
    loop {
        if digits.position >= ROUNDING_DEPTH {
            let base = at(&prefix, digits.position);
            return if up {
                &base + &Exact::pow3(-(digits.position as i64))
            } else {
                base
            };
        }
        match digits.next() {
            Step::Done | Step::Cycle => return original,
            Step::Digit(1, true) => return original,
            Step::Digit(1, false) => {
                let position = digits.position;
                let base = at(&(&prefix * &three), position);
                // prefix,0,2,2,2,... = base + 3^-position ; prefix,2 = base + 2*3^-position
                let step = Exact::pow3(-(position as i64));
                return if up { &base + &(&step + &step) } else { &base + &step };
            }
            Step::Digit(d, _) => prefix = &prefix * &three + BigInt::from(d),
        }
    }
}

/// All values of `C_m^e ∩ [0, R]` (`m = 0`) or `C_m^e ∩ [-R, 0]` (`m = 1`)
/// representable with digits down to `3^-depth`, sorted ascending.
///
/// For `m = 1` the translated set `C - 1` equals `-C` because `C` is
/// symmetric under `t ↦ 1 - t`, so `C_1^e = -C^e`.
pub fn ce_truncation(bound: &Exact, depth: u32, marked: u8) -> Result<Vec<Exact>> {
    if bound.is_negative() {
        return Err(Error::Range(bound.to_string(), "[0, inf)"));
    }
    if marked > 1 {
        return Err(Error::Range(marked.to_string(), "{0, 1}"));
    }
    let depth = depth as i64;
    let floor_unit = Exact::pow3(-depth);
    let two_unit = &floor_unit + &floor_unit;
    if *bound < two_unit {
        return Ok(vec![Exact::zero()]);
    }
    // highest exponent J with 2 * 3^J <= R
    let half = bound / &Exact::from_integer(2);
    let top = half.floor_log3().unwrap_or(-depth);
    let width = (top + depth + 1) as u32;
    let needed: u128 = if width >= 127 { u128::MAX } else { 1u128 << width };
    if needed > TRUNCATION_BUDGET as u128 {
        let reduce_by = (needed as f64 / TRUNCATION_BUDGET as f64).log2().ceil() as u32;
        return Err(Error::Budget {
            needed,
            limit: TRUNCATION_BUDGET,
            reduce_by,
        });
    }
    // integer bound N <= R * 3^depth on the digit integer
    let limit = bound.scale3(depth).floor();
    let mut out = Vec::new();
    let mut stack: Vec<(u32, BigInt)> = vec![(0, BigInt::zero())];
    let three = BigInt::from(3u8);
    let pow3: Vec<BigInt> = (0..=width).map(|e| num_traits::pow::pow(three.clone(), e as usize)).collect();
    // depth-first, smaller digit first, yields ascending order
    while let Some((used, n)) = stack.pop() {
        if used == width {
            out.push(Exact::from_rational(BigRational::from_integer(n)).scale3(-depth));
            continue;
        }
        let place = &pow3[(width - used - 1) as usize];
        let with_two = &n + place * 2u8;
        if with_two <= limit {
            stack.push((used + 1, with_two));
        }
        stack.push((used + 1, n));
    }
    if marked == 1 {
        out = out.into_iter().rev().map(|v| -v).collect();
    }
    Ok(out)
}

/// Affine maps generating `C`: `φ0(x) = x/3`, `φ1(x) = x/3 + 2/3`.
pub fn similarity(m: u8, x: &Exact) -> Exact {
    let third = x.scale3(-1);
    if m == 0 {
        third
    } else {
        &third + &Exact::ratio(2, 3)
    }
}

/// Fixed point `a_m` of `φ_m`.
pub fn fixed_point(m: u8) -> Exact {
    if m == 0 {
        Exact::zero()
    } else {
        Exact::one()
    }
}

/// Whether `x` is a signed member of `C_m^e`.
pub fn is_member_of_ce(x: &Exact, marked: u8, depth: u32) -> Result<MembershipVerdict> {
    if marked == 1 {
        is_extended_cantor(&-x, depth)
    } else {
        is_extended_cantor(x, depth)
    }
}
