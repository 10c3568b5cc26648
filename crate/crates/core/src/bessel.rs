//! Rigorous evaluation of the modified Bessel function I_nu on [0, inf),
//! for the small fixed orders the exact formula needs (nu = 2, 3), plus
//! phi = log I_2 and its first two derivatives.
//!
//! Two regimes, switched at [`switch_point`]:
//!
//! - ascending power series I_nu(t) = sum (t/2)^{nu+2m} / (m! (m+nu)!) with
//!   a geometric tail bound (all terms positive, no cancellation);
//! - the large-argument expansion
//!   I_nu(t) ~ e^t/sqrt(2 pi t) * sum_s (-1)^s a_s(nu) t^-s,
//!   a_s(nu) = prod_{i<=s} (4nu^2 - (2i-1)^2) / (s! 8^s),
//!   with certified remainder
//!       2|a_S| t^-S  +  2 e^{-2t} (sum_{s<=S} |a_s| t^-s).
//!
//! The first part of the remainder is the usual "twice the first omitted
//! term"; the second absorbs the reflected e^{-t} series that enters the
//! I-function expansion on the real axis. This is this module's certified
//! constant choice for the remainder; the reflected part also puts an
//! honest floor of order e^{-2t} on the achievable relative radius, which
//! is why the switch point grows with the working precision.

use num::{BigInt, BigRational, One};
use rug::float::Round;
use rug::ops::{AddAssignRound, DivAssignRound, MulAssignRound};
use rug::Float;

use crate::ball::{Ball, Prec};
use crate::{Error, Result};

/// Arguments below this use the power series; above it, the asymptotic
/// expansion. Chosen so the asymptotic remainder floor e^{-2t} stays below
/// 2^-prec.
pub fn switch_point(prec: Prec) -> f64 {
    (prec as f64 / 2.0).max(30.0)
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).product::<u64>().into()
}

/// Power-series evaluation with a rigorous geometric tail bound.
pub fn bessel_i_series(nu: u32, t: &Ball, prec: Prec) -> Result<Ball> {
    if t.lower() < 0 {
        return Err(Error::Domain("bessel_i needs t >= 0".into()));
    }
    let wp = prec + 16;
    let half = t.mul(&Ball::from_rational(wp, &BigRational::new(1.into(), 2.into())));
    let u = half.mul(&half);
    let mut term = half.powi(nu as i64)?.div(&Ball::from_bigint(wp, &factorial(nu)))?;
    let mut sum = term.clone();
    let u_hi = u.upper();
    // target: absolute tail threshold relative to the partial sum
    for m in 1u64..200_000 {
        let den = Ball::from_i64(wp, (m * (m + nu as u64)) as i64);
        term = term.mul(&u).div(&den)?;
        sum = sum.add(&term);
        // ratio bound for all subsequent terms
        let mut q = u_hi.clone();
        q.div_assign_round(
            &Float::with_val(53, (m + 1) * (m + 1 + nu as u64)),
            Round::Up,
        );
        if q < 0.5 {
            let term_hi = term.abs().upper();
            let mut small_enough = sum.abs().upper();
            small_enough >>= (prec + 8) as u32;
            if term_hi <= small_enough || term_hi.is_zero() {
                // tail <= |term| * q / (1 - q)
                let mut tail = term_hi;
                tail.mul_assign_round(&q, Round::Up);
                let mut denq = Float::with_val(53, 1);
                denq -= &q;
                tail.div_assign_round(&denq, Round::Up);
                return Ok(sum.widen(&tail));
            }
        }
    }
    Err(Error::PrecisionExhausted("bessel series did not reach its tail bound".into()))
}

/// Large-argument expansion with the documented certified remainder.
/// Requires t >= 4.
pub fn bessel_i_asymptotic(nu: u32, t: &Ball, prec: Prec) -> Result<Ball> {
    if !(t.lower() >= 4) {
        return Err(Error::Domain("asymptotic regime needs t >= 4".into()));
    }
    let wp = prec + 16;
    let mu = 4 * (nu as i64) * (nu as i64);
    let pi = Ball::pi(wp);
    let prefactor = t.exp()?.div(&t.mul(&pi).mul_i64(2).sqrt()?)?;

    let tinv = Ball::one(wp).div(t)?;
    let mut a = BigRational::one();
    let mut tpow = Ball::one(wp);
    let mut sum = Ball::one(wp);
    let mut abs_total = Float::with_val(53, 1); // sum of |a_s| t^-s upper bounds
    let mut last_mag = Float::with_val(53, rug::float::Special::Infinity);
    let mut omitted = None;
    let mut target = sum.abs().upper();
    target >>= (prec + 8) as u32;
    for s in 1i64..(8 * wp as i64) {
        a = a * BigRational::new((mu - (2 * s - 1) * (2 * s - 1)).into(), (8 * s).into());
        tpow = tpow.mul(&tinv);
        let signed = if s % 2 == 0 { a.clone() } else { -a.clone() };
        let term = Ball::from_rational(wp, &signed).mul(&tpow);
        let mag = term.abs().upper();
        if mag >= last_mag || mag <= target {
            omitted = Some(mag);
            break;
        }
        sum = sum.add(&term);
        abs_total.add_assign_round(&mag, Round::Up);
        last_mag = mag;
    }
    let omitted = omitted
        .ok_or_else(|| Error::PrecisionExhausted("asymptotic series never converged".into()))?;

    // remainder: 2 * first omitted + 2 e^{-2t} * (series of absolute values)
    abs_total.add_assign_round(&omitted, Round::Up);
    let mut reflect = Float::with_val_round(wp, t.lower() * -2i32, Round::Up).0;
    reflect.exp_round(Round::Up);
    let mut remainder = Float::with_val_round(53, &reflect * &abs_total, Round::Up).0;
    remainder.mul_assign_round(&Float::with_val(53, 2), Round::Up);
    let mut first = omitted;
    first.mul_assign_round(&Float::with_val(53, 2), Round::Up);
    remainder.add_assign_round(&first, Round::Up);

    Ok(prefactor.mul(&sum.widen(&remainder)))
}

/// Rigorous enclosure of I_nu(t) for t >= 0.
pub fn bessel_i(nu: u32, t: &Ball, prec: Prec) -> Result<Ball> {
    if t.lower() < 0 {
        return Err(Error::Domain("bessel_i needs t >= 0".into()));
    }
    if t.mid().to_f64() < switch_point(prec) {
        bessel_i_series(nu, t, prec)
    } else {
        bessel_i_asymptotic(nu, t, prec)
    }
}

/// The elementary upper bound for I_kappa:
/// sqrt(2/(pi s)) e^s for s >= 1, else 2^{1-kappa} s^kappa / Gamma(kappa+1).
///
/// For balls straddling s = 1 the hull of both branch values is returned.
pub fn bessel_upper_bound(kappa: &Ball, s: &Ball) -> Result<Ball> {
    let prec = s.prec().max(kappa.prec());
    if !(kappa.lower().to_f64() > -0.5) {
        return Err(Error::Precondition("bound needs kappa > -1/2".into()));
    }
    if s.lower() < 0 {
        return Err(Error::Precondition("bound needs s >= 0".into()));
    }
    let big = |b: &Ball| -> Result<Ball> {
        let pi = Ball::pi(prec);
        Ball::from_i64(prec, 2).div(&pi.mul(b))?.sqrt()?.mul(&b.exp()?).finite_ok()
    };
    let small = |b: &Ball| -> Result<Ball> {
        // 2^{1-k} s^k / Gamma(k+1)
        let one = Ball::one(prec);
        let two_pow = Ball::from_i64(prec, 2)
            .ln()?
            .mul(&one.sub(kappa))
            .exp()?;
        let s_pow = if b.lower() > 0 {
            b.ln()?.mul(kappa).exp()?
        } else if b.upper().is_zero() {
            Ball::zero(prec)
        } else {
            // enclosure [0, upper^kappa] for kappa > 0
            let hi = Ball::from_endpoints(prec, &b.upper(), &b.upper());
            let top = hi.ln()?.mul(kappa).exp()?;
            Ball::from_endpoints(prec, &Float::with_val(prec, 0), &top.upper())
        };
        two_pow.mul(&s_pow).div(&kappa.add(&Ball::one(prec)).gamma()?)
    };
    if s.lower() >= 1 {
        big(s)
    } else if s.upper() < 1 {
        small(s)
    } else {
        Ok(big(s)?.hull(&small(s)?))
    }
}

trait FiniteOk {
    fn finite_ok(self) -> Result<Ball>;
}
impl FiniteOk for Ball {
    fn finite_ok(self) -> Result<Ball> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::PrecisionExhausted("non-finite ball".into()))
        }
    }
}

/// Enclosures of phi'(t) and phi''(t) for phi = log I_2, via
/// I_2' = I_3 + (2/t) I_2 and the Riccati identity
/// phi'' = 1 + 4/t^2 - phi'/t - phi'^2 from the modified Bessel equation.
pub fn log_bessel_derivatives(t: &Ball, prec: Prec) -> Result<(Ball, Ball)> {
    if !(t.lower() > 0) {
        return Err(Error::Domain("log derivatives need t > 0".into()));
    }
    let i2 = bessel_i(2, t, prec)?;
    if i2.contains_zero() {
        return Err(Error::Domain(
            "I_2 enclosure straddles zero; domain too small for log derivative".into(),
        ));
    }
    let i3 = bessel_i(3, t, prec)?;
    let phi1 = i3.div(&i2)?.add(&Ball::from_i64(prec, 2).div(t)?);
    let t2 = t.mul(t);
    let phi2 = Ball::one(prec)
        .add(&Ball::from_i64(prec, 4).div(&t2)?)
        .sub(&phi1.div(t)?)
        .sub(&phi1.mul(&phi1));
    Ok((phi1, phi2))
}

/// phi' target 1 - 1/(2t) and both envelope radii (2/t^2, 4/t^3), used by
/// the envelope checks.
pub fn phi_envelope_parts(t: &Ball, prec: Prec) -> Result<(Ball, Ball, Ball, Ball)> {
    let one = Ball::one(prec);
    let c1 = one.sub(&one.div(&t.mul_i64(2))?);
    let c2 = one.div(&t.mul(t).mul_i64(2))?;
    let r1 = Ball::from_i64(prec, 2).div(&t.mul(t))?;
    let r2 = Ball::from_i64(prec, 4).div(&t.powi(3)?)?;
    Ok((c1, c2, r1, r2))
}

/// Ball-rigorous check of both envelopes
/// |phi' - (1 - 1/(2t))| <= 2/t^2 and |phi'' - 1/(2t^2)| <= 4/t^3 at `t`.
/// Returns (phi1_ok, phi2_ok); `Ok(true)` means certified to hold,
/// `Ok(false)` certified to fail; indecision raises precision-exhausted.
pub fn phi_envelopes_hold(t: &Ball, prec: Prec) -> Result<(bool, bool)> {
    let (phi1, phi2) = log_bessel_derivatives(t, prec)?;
    let (c1, c2, r1, r2) = phi_envelope_parts(t, prec)?;
    let d1 = phi1.sub(&c1).abs();
    let d2 = phi2.sub(&c2).abs();
    let decide = |d: &Ball, r: &Ball| -> Result<bool> {
        if d.le_certain(r) {
            Ok(true)
        } else if r.le_certain(d) {
            Ok(false)
        } else {
            Err(Error::PrecisionExhausted("phi envelope comparison undecided".into()))
        }
    };
    Ok((decide(&d1, &r1)?, decide(&d2, &r2)?))
}
