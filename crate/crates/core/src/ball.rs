//! Midpoint-radius arithmetic over MPFR floats.
//!
//! A [`Ball`] is a pair (mid, rad) standing for the interval
//! [mid - rad, mid + rad]. Every operation returns a ball that contains the
//! exact image of every point of its input balls: midpoints are computed with
//! round-to-nearest and one full ulp of the result is added to the propagated
//! radius (MPFR guarantees a half-ulp rounding error, so one ulp leaves
//! margin). Monotone functions (exp, ln, sqrt, powers of positive balls) are
//! evaluated on the interval endpoints with directed rounding instead.
//!
//! Radii are kept at a fixed small precision and always rounded upward.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational};
use rug::float::{Constant, Round};
use rug::ops::{AddAssignRound, DivAssignRound, MulAssignRound, Pow};
use rug::{Float, Integer, Rational};

use crate::{Error, Result};

/// Working precision in bits.
pub type Prec = u32;

/// Precision of radius values. Radii only need an order of magnitude.
const RADIUS_PREC: u32 = 32;

/// Rigorous enclosure of a real number.
#[derive(Clone)]
pub struct Ball {
    mid: Float,
    rad: Float,
}

fn rad_zero() -> Float {
    Float::with_val(RADIUS_PREC, 0)
}

/// One ulp of `f` at its own precision; zero for exact zero.
///
/// MPFR values are normalized with an essentially unbounded exponent range,
/// so a nonzero result of a rounded operation is never flushed to zero and
/// the zero case only arises from exact zeros.
fn ulp(f: &Float) -> Float {
    match f.get_exp() {
        None => rad_zero(),
        Some(e) => {
            let shift = e as i64 - f.prec() as i64;
            Float::with_val(RADIUS_PREC, Float::i_exp(1, shift as i32))
        }
    }
}

/// Round an arbitrary float up into a radius-precision value.
fn as_rad(f: &Float) -> Float {
    let mut r = Float::with_val_round(RADIUS_PREC, f, Round::Up).0;
    r.abs_mut();
    r
}

fn rug_int(n: &BigInt) -> Integer {
    let (sign, bytes) = n.to_bytes_be();
    let mut i = Integer::from_digits(&bytes, rug::integer::Order::Msf);
    if sign == Sign::Minus {
        i = -i;
    }
    i
}

fn rug_rat(q: &BigRational) -> Rational {
    Rational::from((rug_int(q.numer()), rug_int(q.denom())))
}

impl Ball {
    pub fn zero(prec: Prec) -> Self {
        Ball { mid: Float::with_val(prec, 0), rad: rad_zero() }
    }

    pub fn one(prec: Prec) -> Self {
        Ball { mid: Float::with_val(prec, 1), rad: rad_zero() }
    }

    /// Exact small integer.
    pub fn from_i64(prec: Prec, v: i64) -> Self {
        Ball { mid: Float::with_val(prec, v), rad: rad_zero() }
    }

    /// Enclosure of a big integer; exact when it fits in `prec` bits.
    pub fn from_bigint(prec: Prec, v: &BigInt) -> Self {
        let (mid, ord) = Float::with_val_round(prec, &rug_int(v), Round::Nearest);
        let rad = if ord == Ordering::Equal { rad_zero() } else { ulp(&mid) };
        Ball { mid, rad }
    }

    /// Enclosure of an exact rational.
    pub fn from_rational(prec: Prec, q: &BigRational) -> Self {
        let (mid, ord) = Float::with_val_round(prec, &rug_rat(q), Round::Nearest);
        let rad = if ord == Ordering::Equal { rad_zero() } else { ulp(&mid) };
        Ball { mid, rad }
    }

    /// Enclosure of pi.
    pub fn pi(prec: Prec) -> Self {
        let (mid, _) = Float::with_val_round(prec, Constant::Pi, Round::Nearest);
        let rad = ulp(&mid);
        Ball { mid, rad }
    }

    /// Ball from explicit interval endpoints `lo <= hi`.
    pub fn from_endpoints(prec: Prec, lo: &Float, hi: &Float) -> Self {
        debug_assert!(lo <= hi);
        let mid = Float::with_val(prec, lo + hi) / 2;
        let up = as_rad(&Float::with_val_round(RADIUS_PREC, hi - &mid, Round::Up).0);
        let down = as_rad(&Float::with_val_round(RADIUS_PREC, &mid - lo, Round::Up).0);
        let mut rad = if up >= down { up } else { down };
        rad += ulp(&mid);
        let rad = Float::with_val_round(RADIUS_PREC, &rad, Round::Up).0;
        Ball { mid, rad }
    }

    pub fn prec(&self) -> Prec {
        self.mid.prec()
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    /// Lower bound of the enclosed interval (rounded down).
    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid - &self.rad, Round::Down).0
    }

    /// Upper bound of the enclosed interval (rounded up).
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid + &self.rad, Round::Up).0
    }

    pub fn contains_zero(&self) -> bool {
        self.lower() <= 0 && self.upper() >= 0
    }

    pub fn is_certainly_positive(&self) -> bool {
        self.lower() > 0
    }

    pub fn is_certainly_negative(&self) -> bool {
        self.upper() < 0
    }

    /// True when every point of `self` is >= every point of `other`.
    pub fn ge_certain(&self, other: &Ball) -> bool {
        self.lower() >= other.upper()
    }

    /// True when every point of `self` is <= every point of `other`.
    pub fn le_certain(&self, other: &Ball) -> bool {
        self.upper() <= other.lower()
    }

    /// True when the two enclosures intersect.
    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    /// True when `v` lies inside the enclosure.
    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let r = rug_rat(q);
        self.lower() <= r && r <= self.upper()
    }

    fn with_error(mid: Float, mut rad: Float, extra: &Float) -> Ball {
        rad.add_assign_round(extra, Round::Up);
        let e = ulp(&mid);
        rad.add_assign_round(&e, Round::Up);
        Ball { mid, rad }
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: Float::with_val(self.prec(), -&self.mid), rad: self.rad.clone() }
    }

    pub fn abs(&self) -> Ball {
        let mut mid = self.mid.clone();
        mid.abs_mut();
        Ball { mid, rad: self.rad.clone() }
    }

    pub fn add(&self, other: &Ball) -> Ball {
        let prec = self.prec().max(other.prec());
        let mid = Float::with_val(prec, &self.mid + &other.mid);
        Ball::with_error(mid, self.rad.clone(), &other.rad)
    }

    pub fn sub(&self, other: &Ball) -> Ball {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Ball) -> Ball {
        let prec = self.prec().max(other.prec());
        let mid = Float::with_val(prec, &self.mid * &other.mid);
        // |xy - mx my| <= |mx| ry + |my| rx + rx ry
        let mut rad = as_rad(&self.mid);
        rad.mul_assign_round(&other.rad, Round::Up);
        let mut t = as_rad(&other.mid);
        t.mul_assign_round(&self.rad, Round::Up);
        rad.add_assign_round(&t, Round::Up);
        let mut c = self.rad.clone();
        c.mul_assign_round(&other.rad, Round::Up);
        rad.add_assign_round(&c, Round::Up);
        let e = ulp(&mid);
        rad.add_assign_round(&e, Round::Up);
        Ball { mid, rad }
    }

    /// Multiply by an exact small integer.
    pub fn mul_i64(&self, v: i64) -> Ball {
        let mid = Float::with_val(self.prec(), &self.mid * v);
        let mut rad = self.rad.clone();
        rad.mul_assign_round(&Float::with_val(RADIUS_PREC, v.unsigned_abs()), Round::Up);
        Ball::with_error(mid, rad, &rad_zero())
    }

    /// Division; fails if the divisor's enclosure meets zero.
    pub fn div(&self, other: &Ball) -> Result<Ball> {
        let om = as_rad(&other.mid);
        if !(om > other.rad) || other.mid.is_zero() {
            return Err(Error::Domain("division by a ball containing zero".into()));
        }
        let prec = self.prec().max(other.prec());
        let mid = Float::with_val(prec, &self.mid / &other.mid);
        // |x/y - mx/my| <= (rx |my| + |mx| ry) / (|my| (|my| - ry))
        let mut num = om.clone();
        num.mul_assign_round(&self.rad, Round::Up);
        let mut t = as_rad(&self.mid);
        t.mul_assign_round(&other.rad, Round::Up);
        num.add_assign_round(&t, Round::Up);
        let mut den = Float::with_val_round(RADIUS_PREC, &om - &other.rad, Round::Down).0;
        den.mul_assign_round(&om, Round::Down);
        num.div_assign_round(&den, Round::Up);
        let e = ulp(&mid);
        num.add_assign_round(&e, Round::Up);
        Ball { mid, rad: num }.finite()
    }

    fn finite(self) -> Result<Ball> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::PrecisionExhausted("non-finite ball".into()))
        }
    }

    /// Monotone map applied to both endpoints with directed rounding.
    fn monotone(&self, f: impl Fn(&mut Float, Round)) -> Ball {
        let prec = self.prec();
        let mut lo = self.lower();
        f(&mut lo, Round::Down);
        let mut hi = self.upper();
        f(&mut hi, Round::Up);
        Ball::from_endpoints(prec, &lo, &hi)
    }

    pub fn exp(&self) -> Result<Ball> {
        self.monotone(|v, r| {
            v.exp_round(r);
        })
        .finite()
    }

    pub fn ln(&self) -> Result<Ball> {
        if !(self.lower() > 0) {
            return Err(Error::Domain("log of a ball not strictly positive".into()));
        }
        self.monotone(|v, r| {
            v.ln_round(r);
        })
        .finite()
    }

    pub fn sqrt(&self) -> Result<Ball> {
        if self.lower() < 0 {
            return Err(Error::Domain("sqrt of a ball with negative lower bound".into()));
        }
        self.monotone(|v, r| {
            v.sqrt_round(r);
        })
        .finite()
    }

    /// Integer power via binary exponentiation on balls.
    pub fn powi(&self, n: i64) -> Result<Ball> {
        if n < 0 {
            return Ball::one(self.prec()).div(&self.powi(-n)?);
        }
        let mut result = Ball::one(self.prec());
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// `self^exponent` for a strictly positive base. The exponent float is
    /// used exactly, so it must be exactly representable (dyadic).
    pub fn pow_exact(&self, exponent: &Float) -> Result<Ball> {
        if !(self.lower() > 0) {
            return Err(Error::Domain("power of a non-positive ball".into()));
        }
        let prec = self.prec();
        let increasing = *exponent >= 0;
        let (a, b) = if increasing {
            (self.lower(), self.upper())
        } else {
            (self.upper(), self.lower())
        };
        let lo = Float::with_val_round(prec, (&a).pow(exponent), Round::Down).0;
        let hi = Float::with_val_round(prec, (&b).pow(exponent), Round::Up).0;
        Ball::from_endpoints(prec, &lo, &hi).finite()
    }

    /// Rational power n/d of a positive ball, for dyadic-representable n/d.
    pub fn pow_dyadic(&self, num: i64, den: u32) -> Result<Ball> {
        assert!(den.is_power_of_two(), "pow_dyadic exponent denominator must be a power of two");
        let e = Float::with_val(64, num) / Float::with_val(64, den);
        self.pow_exact(&e)
    }

    /// sin with the |sin'| <= 1 Lipschitz bound for radius transport.
    pub fn sin(&self) -> Ball {
        let (mid, _) = Float::with_val_round(self.prec(), self.mid.sin_ref(), Round::Nearest);
        Ball::with_error(mid, self.rad.clone(), &rad_zero())
    }

    /// cos with the |cos'| <= 1 Lipschitz bound for radius transport.
    pub fn cos(&self) -> Ball {
        let (mid, _) = Float::with_val_round(self.prec(), self.mid.cos_ref(), Round::Nearest);
        Ball::with_error(mid, self.rad.clone(), &rad_zero())
    }

    /// Gamma function. Supported for point balls anywhere in the domain and
    /// for balls with lower bound >= 3/2 (where gamma is increasing).
    pub fn gamma(&self) -> Result<Ball> {
        if self.rad.is_zero() {
            let (mid, _) = Float::with_val_round(self.prec(), self.mid.gamma_ref(), Round::Nearest);
            return Ball::with_error(mid, rad_zero(), &rad_zero()).finite();
        }
        if self.lower() >= 1.5 {
            return self
                .monotone(|v, r| {
                    v.gamma_round(r);
                })
                .finite();
        }
        Err(Error::Domain("gamma only supported for point balls or balls >= 3/2".into()))
    }

    /// Smallest ball containing both inputs.
    pub fn hull(&self, other: &Ball) -> Ball {
        let prec = self.prec().max(other.prec());
        let lo = if self.lower() <= other.lower() { self.lower() } else { other.lower() };
        let hi = if self.upper() >= other.upper() { self.upper() } else { other.upper() };
        Ball::from_endpoints(prec, &lo, &hi)
    }

    /// Widen the radius by a nonnegative float.
    pub fn widen(&self, extra: &Float) -> Ball {
        debug_assert!(*extra >= 0);
        let mut rad = self.rad.clone();
        rad.add_assign_round(&as_rad(extra), Round::Up);
        Ball { mid: self.mid.clone(), rad }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Decimal strings for (mid, rad), used by machine-readable reports.
    pub fn to_mid_rad_strings(&self) -> (String, String) {
        (float_to_string(&self.mid), float_to_string(&self.rad))
    }

    /// The unique integer contained in the enclosure, if there is exactly one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let lo = self.lower();
        let hi = self.upper();
        let lo_i = lo.to_integer_round(Round::Up)?.0;
        let hi_i = hi.to_integer_round(Round::Down)?.0;
        if lo_i == hi_i {
            Some(BigInt::parse_bytes(lo_i.to_string_radix(10).as_bytes(), 10).unwrap())
        } else {
            None
        }
    }

    /// Nearest integer to the midpoint.
    pub fn round_mid(&self) -> BigInt {
        let i = self.mid.to_integer_round(Round::Nearest).map(|p| p.0).unwrap_or_default();
        BigInt::parse_bytes(i.to_string_radix(10).as_bytes(), 10).unwrap()
    }
}

pub(crate) fn float_to_string(f: &Float) -> String {
    if f.is_zero() {
        return "0".into();
    }
    // Shortest decimal string that round-trips at this precision.
    let digits = (f.prec() as f64 * 0.3010f64).ceil() as usize + 2;
    let s = f.to_string_radix(10, Some(digits));
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ball[{} +/- {}]", self.mid.to_f64(), self.rad.to_f64())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Rectangular complex enclosure.
#[derive(Clone, Debug)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    pub fn zero(prec: Prec) -> Self {
        ComplexBall { re: Ball::zero(prec), im: Ball::zero(prec) }
    }

    pub fn from_real(re: Ball) -> Self {
        let prec = re.prec();
        ComplexBall { re, im: Ball::zero(prec) }
    }

    pub fn add(&self, other: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn mul(&self, other: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: self.re.mul(&other.re).sub(&self.im.mul(&other.im)),
            im: self.re.mul(&other.im).add(&self.im.mul(&other.re)),
        }
    }

    pub fn scale(&self, s: &Ball) -> ComplexBall {
        ComplexBall { re: self.re.mul(s), im: self.im.mul(s) }
    }

    pub fn scale_i64(&self, v: i64) -> ComplexBall {
        ComplexBall { re: self.re.mul_i64(v), im: self.im.mul_i64(v) }
    }

    /// Enclosure of the modulus.
    pub fn abs(&self) -> Result<Ball> {
        let s = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        // The square sum is >= 0 by construction; clamp any rounding
        // undershoot and take endpoints directly.
        if s.lower() < 0 {
            let mut hi = s.upper();
            if hi < 0 {
                hi = Float::with_val(s.prec(), 0);
            }
            hi.sqrt_round(Round::Up);
            let z = Float::with_val(s.prec(), 0);
            return Ok(Ball::from_endpoints(s.prec(), &z, &hi));
        }
        s.sqrt()
    }
}

/// Enclosure of exp(pi * i * e) for an exact rational exponent `e`.
///
/// The exponent is reduced mod 2 exactly before any rounding, keeping the
/// trigonometric argument inside [0, 2*pi).
pub fn exp_pi_i(prec: Prec, e: &BigRational) -> ComplexBall {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut r = e % &two;
    if r < BigRational::from_integer(BigInt::from(0)) {
        r += &two;
    }
    let angle = Ball::pi(prec).mul(&Ball::from_rational(prec, &r));
    ComplexBall { re: angle.cos(), im: angle.sin() }
}
