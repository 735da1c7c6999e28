//! Double-precision interval arithmetic with outward rounding.
//!
//! Sums, products and quotients use error-free transformations (`two_sum`,
//! `fma`) to detect whether the rounded result is exact; only inexact results
//! are widened by one ulp. Integer data therefore stays point-valued.
//! Transcendental functions (`ln`, `exp`, `powf`) are widened by a few ulps,
//! which covers the sub-ulp error of the platform libm.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Closed interval `[lo, hi]` of reals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

const LIBM_ULPS: u32 = 4;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn round_pair(r: f64, err: f64) -> (f64, f64) {
    // exact value = r + err
    if err == 0.0 {
        (r, r)
    } else if err > 0.0 {
        (r, r.next_up())
    } else {
        (r.next_down(), r)
    }
}

#[inline]
fn add_lo(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    round_pair(s, two_sum_err(a, b, s)).0
}

#[inline]
fn add_hi(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    round_pair(s, two_sum_err(a, b, s)).1
}

#[inline]
fn mul_bounds(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    if !p.is_finite() || p == 0.0 {
        if p == 0.0 && a != 0.0 && b != 0.0 {
            // underflow
            return (-f64::MIN_POSITIVE, f64::MIN_POSITIVE);
        }
        return (p, p);
    }
    let err = a.mul_add(b, -p);
    if p.abs() < 1e-290 {
        return (p.next_down(), p.next_up());
    }
    round_pair(p, err)
}

#[inline]
fn div_bounds(a: f64, b: f64) -> (f64, f64) {
    let q = a / b;
    if !q.is_finite() || q == 0.0 {
        if q == 0.0 && a != 0.0 {
            return (-f64::MIN_POSITIVE, f64::MIN_POSITIVE);
        }
        return (q, q);
    }
    if q.abs() < 1e-290 {
        return (q.next_down(), q.next_up());
    }
    // a - q*b computed exactly
    let r = (-q).mul_add(b, a);
    let err = if r == 0.0 { 0.0 } else { r * b.signum() };
    round_pair(q, err)
}

fn widen_ulps(x: f64, n: u32, up: bool) -> f64 {
    let mut y = x;
    for _ in 0..n {
        y = if up { y.next_up() } else { y.next_down() };
    }
    y
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan(), "bad interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn from_i64(v: i64) -> Self {
        let f = v as f64;
        if f as i128 == v as i128 {
            Interval::point(f)
        } else {
            Interval::new(f.next_down(), f.next_up())
        }
    }

    /// Smallest double interval enclosing the rational `q`.
    pub fn from_rational(q: &BigRational) -> Self {
        let f = q.to_f64().unwrap_or(f64::NAN);
        if !f.is_finite() {
            return Interval::new(f64::NEG_INFINITY, f64::INFINITY);
        }
        match BigRational::from_float(f) {
            Some(fr) => {
                if &fr == q {
                    Interval::point(f)
                } else if fr < *q {
                    Interval::new(f, f.next_up())
                } else {
                    Interval::new(f.next_down(), f)
                }
            }
            None => Interval::new(f.next_down(), f.next_up()),
        }
    }

    /// Enclosure of a rational interval `[lo, hi]`.
    pub fn from_rational_bounds(lo: &BigRational, hi: &BigRational) -> Self {
        Interval::new(Interval::from_rational(lo).lo, Interval::from_rational(hi).hi)
    }

    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval::new(0.0, self.hi.max(-self.lo))
        }
    }

    pub fn max(self, other: Self) -> Self {
        Interval::new(self.lo.max(other.lo), self.hi.max(other.hi))
    }

    pub fn min(self, other: Self) -> Self {
        Interval::new(self.lo.min(other.lo), self.hi.min(other.hi))
    }

    pub fn hull(self, other: Self) -> Self {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Certainly `self <= other`.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    /// Certainly `self < other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    /// Possibly `self <= other`.
    pub fn possibly_le(&self, other: &Interval) -> bool {
        self.lo <= other.hi
    }

    /// Natural logarithm; requires a positive interval.
    pub fn ln(self) -> Self {
        if self.lo == 1.0 && self.hi == 1.0 {
            return Interval::ZERO;
        }
        let lo = if self.lo <= 0.0 {
            f64::NEG_INFINITY
        } else {
            widen_ulps(self.lo.ln(), LIBM_ULPS, false)
        };
        let hi = if self.hi <= 0.0 {
            f64::NEG_INFINITY
        } else {
            widen_ulps(self.hi.ln(), LIBM_ULPS, true)
        };
        Interval::new(lo, hi)
    }

    pub fn exp(self) -> Self {
        Interval::new(
            widen_ulps(self.lo.exp(), LIBM_ULPS, false).max(0.0),
            widen_ulps(self.hi.exp(), LIBM_ULPS, true),
        )
    }

    /// `self^e` for a nonnegative base interval and a real exponent.
    pub fn powf(self, e: f64) -> Self {
        let lo = self.lo.max(0.0);
        let hi = self.hi.max(0.0);
        if e == 0.0 {
            return Interval::ONE;
        }
        let (a, b) = if e > 0.0 {
            (lo.powf(e), hi.powf(e))
        } else {
            (hi.powf(e), lo.powf(e))
        };
        let a = if a == 0.0 { 0.0 } else { widen_ulps(a, LIBM_ULPS, false).max(0.0) };
        let b = if b.is_infinite() { b } else { widen_ulps(b, LIBM_ULPS, true) };
        Interval::new(a, b)
    }

    /// Certified `n`-th root of a nonnegative interval.
    pub fn root(self, n: u32) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return self;
        }
        let lo_x = self.lo.max(0.0);
        let hi_x = self.hi.max(0.0);
        let e = 1.0 / n as f64;
        let mut lo = lo_x.powf(e);
        let mut hi = hi_x.powf(e);
        if lo > 0.0 {
            while Interval::point(lo).powi(n).lo > lo_x {
                lo = lo.next_down();
            }
        }
        if hi.is_finite() {
            while Interval::point(hi).powi(n).hi < hi_x {
                hi = hi.next_up();
            }
        }
        Interval::new(lo.max(0.0), hi)
    }

    /// `self^e` for an interval exponent and a positive base.
    pub fn pow(self, e: Interval) -> Self {
        if e.is_point() {
            return self.powf(e.lo);
        }
        (self.ln() * e).exp()
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = Interval::ONE;
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    pub fn recip(self) -> Self {
        Interval::ONE / self
    }

    /// Outward-rounded enclosure of an exact rational lower bound check:
    /// certified `lo` as a rational.
    pub fn lo_rational(&self) -> Option<BigRational> {
        BigRational::from_float(self.lo)
    }

    pub fn hi_rational(&self) -> Option<BigRational> {
        BigRational::from_float(self.hi)
    }

    /// Exact containment test against a rational.
    pub fn contains_rational(&self, q: &BigRational) -> bool {
        match (self.lo_rational(), self.hi_rational()) {
            (Some(lo), Some(hi)) => &lo <= q && q <= &hi,
            _ => true,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::new(add_lo(self.lo, o.lo), add_hi(self.hi, o.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        self + (-o)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        if self.is_point() && o.is_point() {
            let (l, h) = mul_bounds(self.lo, o.lo);
            return Interval::new(l, h);
        }
        let cands = [
            mul_bounds(self.lo, o.lo),
            mul_bounds(self.lo, o.hi),
            mul_bounds(self.hi, o.lo),
            mul_bounds(self.hi, o.hi),
        ];
        let lo = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let hi = cands.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        if o.contains_zero() {
            return Interval::new(f64::NEG_INFINITY, f64::INFINITY);
        }
        let cands = [
            div_bounds(self.lo, o.lo),
            div_bounds(self.lo, o.hi),
            div_bounds(self.hi, o.lo),
            div_bounds(self.hi, o.hi),
        ];
        let lo = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let hi = cands.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }
}

impl Zero for Interval {
    fn zero() -> Self {
        Interval::ZERO
    }
    fn is_zero(&self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }
}

impl One for Interval {
    fn one() -> Self {
        Interval::ONE
    }
}

/// Rational interval with exact endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RationalInterval { lo, hi }
    }

    pub fn point(q: BigRational) -> Self {
        RationalInterval { lo: q.clone(), hi: q }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn mag(&self) -> BigRational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn add(&self, o: &RationalInterval) -> RationalInterval {
        RationalInterval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn mul(&self, o: &RationalInterval) -> RationalInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        RationalInterval::new(lo, hi)
    }

    pub fn scale(&self, q: &BigRational) -> RationalInterval {
        let a = &self.lo * q;
        let b = &self.hi * q;
        if a <= b {
            RationalInterval::new(a, b)
        } else {
            RationalInterval::new(b, a)
        }
    }

    /// Rounds endpoints outward onto the grid `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> RationalInterval {
        use num_bigint::BigInt;
        let den = BigInt::one() << bits as usize;
        let lo = (&self.lo * BigRational::from_integer(den.clone())).floor();
        let hi = (&self.hi * BigRational::from_integer(den.clone())).ceil();
        RationalInterval::new(lo / BigRational::from_integer(den.clone()), hi / BigRational::from_integer(den))
    }

    pub fn to_interval(&self) -> Interval {
        Interval::from_rational_bounds(&self.lo, &self.hi)
    }
}
