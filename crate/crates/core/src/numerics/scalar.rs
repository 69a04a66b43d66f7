//! Working-precision scalars.
//!
//! Every solver in the crate is generic over [`Real`]. Two implementations
//! exist: plain `f64` (about 16 significant digits) and [`DoubleDouble`], an
//! unevaluated sum of two `f64` values giving roughly 31 significant digits.
//! A computation picks one type up front and never mixes them.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Precision mode of a computation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    /// Native `f64`.
    Standard,
    /// Double-double, at least 30 significant digits.
    Extended,
}

impl Precision {
    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Standard => "standard",
            Precision::Extended => "extended",
        }
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Precision::Standard),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision mode `{other}`")),
        }
    }
}

/// Scalar arithmetic contract shared by all numerical code.
pub trait Real:
    Copy
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    const PRECISION: Precision;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Unit roundoff of the representation.
    fn epsilon() -> Self;

    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn floor(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn is_finite(self) -> bool;
    fn pi() -> Self;

    /// `(sin 2πt, cos 2πt)`, with the argument given in turns.
    fn sin_cos_turns(self) -> (Self, Self);

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }

    fn half() -> Self {
        Self::from_f64(0.5)
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    /// Reduction into `[0, 1)`.
    fn fract_turns(self) -> Self {
        let r = self - self.floor();
        if r >= Self::one() {
            r - Self::one()
        } else {
            r
        }
    }

    fn cos_turns(self) -> Self {
        self.sin_cos_turns().1
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn signum_nonzero(self) -> i8 {
        if self > Self::zero() {
            1
        } else if self < Self::zero() {
            -1
        } else {
            0
        }
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Standard;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn floor(self) -> Self {
        f64::floor(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    #[inline]
    fn sin_cos_turns(self) -> (Self, Self) {
        // reduce to [-1/2, 1/2] first so large arguments keep their accuracy
        let r = self - self.round();
        (std::f64::consts::TAU * r).sin_cos()
    }
}

// ---------------------------------------------------------------------------
// Double-double
// ---------------------------------------------------------------------------

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    let e = (a - (s - v)) + (b - v);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

const DD_PI: DoubleDouble = DoubleDouble {
    hi: 3.141_592_653_589_793,
    lo: 1.224_646_799_147_353_2e-16,
};
const DD_LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::renorm(p, e + self.lo * b)
    }

    fn ldexp(self, e: i32) -> Self {
        let f = 2f64.powi(e);
        Self { hi: self.hi * f, lo: self.lo * f }
    }

    fn sin_cos_small(x: Self) -> (Self, Self) {
        // Taylor series, |x| <= pi/4
        let x2 = x * x;
        let mut term = x;
        let mut sin = x;
        let mut k = 1.0;
        loop {
            term = -(term * x2) / Self::from_f64((k + 1.0) * (k + 2.0));
            k += 2.0;
            sin += term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        let mut term = Self::ONE;
        let mut cos = Self::ONE;
        let mut k = 0.0;
        loop {
            term = -(term * x2) / Self::from_f64((k + 1.0) * (k + 2.0));
            k += 2.0;
            cos += term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        (sin, cos)
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Self::renorm(s1, s2 + t2)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        Self::renorm(p, e)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::from_f64(q3)
    }
}

macro_rules! dd_assign {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            #[inline]
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}
dd_assign!(AddAssign, add_assign, +);
dd_assign!(SubAssign, sub_assign, -);
dd_assign!(MulAssign, mul_assign, *);
dd_assign!(DivAssign, div_assign, /);

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl Real for DoubleDouble {
    const PRECISION: Precision = Precision::Extended;

    #[inline]
    fn from_f64(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn epsilon() -> Self {
        // 2^-104
        Self::from_f64(4.930_380_657_631_324e-32)
    }

    #[inline]
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(self.hi.sqrt());
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = (self - Self::new(p, e)).hi;
        Self::renorm(x, r / (2.0 * x))
    }

    fn floor(self) -> Self {
        let h = self.hi.floor();
        if h == self.hi {
            Self::renorm(h, self.lo.floor())
        } else {
            Self::from_f64(h)
        }
    }

    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self - DD_LN2.mul_f64(k);
        let mut term = Self::ONE;
        let mut sum = Self::ONE;
        let mut i = 1.0;
        loop {
            term = term * r / Self::from_f64(i);
            sum += term;
            i += 1.0;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        sum.ldexp(k as i32)
    }

    fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(self.hi.ln());
        }
        // one Newton step on exp(y) = x doubles the digits of ln(hi)
        let mut y = Self::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Self::ONE;
        }
        y
    }

    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    fn pi() -> Self {
        DD_PI
    }

    fn sin_cos_turns(self) -> (Self, Self) {
        let r = self - Self::from_f64(self.hi.round());
        let q = (r.hi * 4.0).round();
        let u = r - Self::from_f64(q * 0.25);
        let x = u * DD_PI.ldexp(1);
        let (s, c) = Self::sin_cos_small(x);
        match q as i64 {
            0 => (s, c),
            1 => (c, -s),
            -1 => (-c, s),
            _ => (-s, -c),
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(31);
        if !self.hi.is_finite() {
            return write!(f, "{}", self.hi);
        }
        if self.hi == 0.0 {
            return write!(f, "{:.*e}", digits, 0.0);
        }
        let neg = self.hi < 0.0;
        let mut v = self.abs();
        let mut exp10 = v.hi.log10().floor() as i32;
        v = v * Self::from_f64(10.0).powi(-exp10);
        if v.hi >= 10.0 {
            v = v / Self::from_f64(10.0);
            exp10 += 1;
        } else if v.hi < 1.0 {
            v = v * Self::from_f64(10.0);
            exp10 -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 2);
        for _ in 0..=digits + 1 {
            let d = v.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            v = (v - Self::from_f64(d)) * Self::from_f64(10.0);
        }
        // round half up on the guard digit
        let guard = ds.pop().unwrap_or(0);
        if guard >= 5 {
            let mut i = ds.len();
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.pop();
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if ds.len() > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        write!(f, "{s}e{exp10}")
    }
}

/// Error returned when a decimal string cannot be read as a [`Real`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRealError(pub String);

impl fmt::Display for ParseRealError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid decimal literal `{}`", self.0)
    }
}

impl std::error::Error for ParseRealError {}

/// Parses a decimal literal (`-1.25e-3`, `0.618...`) at the precision of `R`.
///
/// Digits are accumulated in `R` arithmetic, so extended-precision values keep
/// every digit given in the literal.
pub fn parse_real<R: Real>(text: &str) -> Result<R, ParseRealError> {
    let err = || ParseRealError(text.to_string());
    let t = text.trim();
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let ten = R::from_f64(10.0);
    let mut acc = R::zero();
    for c in int_part.chars().chain(frac_part.chars()) {
        let d = c.to_digit(10).ok_or_else(err)?;
        acc = acc * ten + R::from_f64(d as f64);
    }
    let scale = exp - frac_part.len() as i32;
    let value = if scale >= 0 {
        acc * ten.powi(scale)
    } else {
        acc / ten.powi(-scale)
    };
    Ok(if neg { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(v: f64) -> DoubleDouble {
        DoubleDouble::from_f64(v)
    }

    #[test]
    fn dd_sqrt_two_squares_back() {
        let r = dd(2.0).sqrt();
        let back = r * r - dd(2.0);
        assert!(back.abs().hi < 1e-31);
    }

    #[test]
    fn dd_division_is_inverse_of_multiplication() {
        let a = dd(1.0) / dd(3.0);
        let e = a * dd(3.0) - dd(1.0);
        assert!(e.abs().hi < 1e-31);
    }

    #[test]
    fn dd_sin_cos_identities() {
        for &t in &[0.0, 0.1, 0.125, 0.3, -0.4, 0.7, 12.25, 1e3 + 0.2] {
            let (s, c) = dd(t).sin_cos_turns();
            let one = s * s + c * c - dd(1.0);
            assert!(one.abs().hi < 1e-30, "t={t}");
            let (sf, cf) = t.sin_cos_turns();
            assert!((s.to_f64() - sf).abs() < 1e-12);
            assert!((c.to_f64() - cf).abs() < 1e-12);
        }
        // sin(2π/12) = 1/2 exactly
        let s = (dd(1.0) / dd(12.0)).sin_cos_turns().0;
        assert!((s - dd(0.5)).abs().hi < 1e-31);
    }

    #[test]
    fn dd_exp_ln_round_trip() {
        for &x in &[0.5, 1.0, 2.0, 3.7, 1e-3, 123.0] {
            let y = dd(x).ln().exp();
            let rel = ((y - dd(x)) / dd(x)).abs().hi;
            assert!(rel < 1e-30, "x={x} rel={rel:e}");
        }
        let e = dd(1.0).exp();
        // e = 2.718281828459045235360287471352662497757
        let e_ref = parse_real::<DoubleDouble>("2.718281828459045235360287471352662").unwrap();
        let d = (e - e_ref).abs().hi;
        assert!(d < 2e-31, "{d:e}");
    }

    #[test]
    fn dd_display_shows_extra_digits() {
        let third = dd(1.0) / dd(3.0);
        let s = format!("{:.25}", third);
        assert!(s.starts_with("3.3333333333333333333333333"), "{s}");
        assert!(s.ends_with("e-1"));
    }

    #[test]
    fn parse_real_keeps_extended_digits() {
        let g: DoubleDouble = parse_real("0.61803398874989484820458683436563811").unwrap();
        let exact = (dd(5.0).sqrt() - dd(1.0)) / dd(2.0);
        assert!((g - exact).abs().hi < 1e-32);
        let x: f64 = parse_real("-1.5e-3").unwrap();
        assert_eq!(x, -1.5e-3);
        assert!(parse_real::<f64>("abc").is_err());
        assert!(parse_real::<f64>("1.2.3").is_err());
    }

    #[test]
    fn fract_turns_is_in_unit_interval() {
        for &v in &[-0.25, 0.0, 1.0, 2.75, -3.0] {
            let r = v.fract_turns();
            assert!((0.0..1.0).contains(&r));
            let rd = dd(v).fract_turns();
            assert!(rd >= dd(0.0) && rd < dd(1.0));
        }
    }
}
