//! Main term, error envelopes, and the constant chain of the asymptotic
//! formula.
//!
//! For k >= 3 the decomposition Delta_k(n) = M_k(n) + R_k(n) holds with
//!
//! ```text
//! M_k(n) = pi^3 alpha_k / (18 x_k(n)^2) * I_2(sqrt(alpha_k) x_k(n)),
//! |R_k(n)| <= 12 k^3 e^{pi sqrt(k/3)} x_k(n)^{-3/2} e^{sqrt(beta_k) x_k(n)},
//! ```
//!
//! where alpha_k = (5k+2)/(2k+1), beta_k = (5k-10)/(2k+1) and
//! x_k(n) = pi sqrt(24n - (2k+2)) / 6. The relative error obeys
//! eps_n <= C_k x e^{-delta_k x} once sqrt(alpha_k) x >= 4, with
//! delta_k = sqrt(alpha_k) - sqrt(beta_k) and
//! C_k = 432 sqrt(2) k^3 e^{pi sqrt(k/3)} / (pi^{5/2} alpha_k^{3/4}).
//!
//! The main term itself is meaningful for every k >= 1 (it is the j = 1,
//! zero-index term of the exact formula); the envelope constants require
//! k >= 3, where beta_k > 0.
//!
//! All constants are assembled from exact rationals and ball
//! transcendentals; there are no decimal literals.

use num::{BigInt, BigRational, One, Signed};

use crate::ball::{Ball, Prec};
use crate::bessel::bessel_i;
use crate::series::CoeffTable;
use crate::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// alpha_k = (5k+2)/(2k+1).
pub fn alpha(k: u32) -> BigRational {
    rat(5 * k as i64 + 2, 2 * k as i64 + 1)
}

/// beta_k = (5k-10)/(2k+1); negative for k < 2.
pub fn beta(k: u32) -> BigRational {
    rat(5 * k as i64 - 10, 2 * k as i64 + 1)
}

/// The constants of Theorem 2 and Lemmas 4.2/4.4 for one k >= 3.
#[derive(Clone, Debug)]
pub struct KConstants {
    pub k: u32,
    pub alpha: BigRational,
    pub beta: BigRational,
    /// delta_k = sqrt(alpha) - sqrt(beta) > 0.
    pub delta: Ball,
    /// C_k = 432 sqrt(2) k^3 e^{pi sqrt(k/3)} / (pi^{5/2} alpha^{3/4}).
    pub c: Ball,
    /// A_k = 1728 C_k / (pi^4 sqrt(alpha)).
    pub a: Ball,
    /// The rougher bound A~_k = (1728/pi^{13/2}) 432 sqrt(2) k^3 e^{pi sqrt(k/3)}.
    pub a_tilde: Ball,
}

impl KConstants {
    pub fn new(k: u32, prec: Prec) -> Result<Self> {
        if k < 3 {
            return Err(Error::KOutOfRange { k, requirement: "envelope constants need k >= 3" });
        }
        let alpha_q = alpha(k);
        let beta_q = beta(k);
        let pi = Ball::pi(prec);
        let alpha_b = Ball::from_rational(prec, &alpha_q);
        let beta_b = Ball::from_rational(prec, &beta_q);
        let delta = alpha_b.sqrt()?.sub(&beta_b.sqrt()?);
        let k3 = Ball::from_i64(prec, (k as i64).pow(3));
        let exp_term = Ball::from_rational(prec, &rat(k as i64, 3)).sqrt()?.mul(&pi).exp()?;
        let sqrt2 = Ball::from_i64(prec, 2).sqrt()?;
        let c = sqrt2
            .mul_i64(432)
            .mul(&k3)
            .mul(&exp_term)
            .div(&pi.pow_dyadic(5, 2)?.mul(&alpha_b.pow_dyadic(3, 4)?))?;
        let a = c.mul_i64(1728).div(&pi.powi(4)?.mul(&alpha_b.sqrt()?))?;
        let a_tilde = Ball::from_i64(prec, 1728)
            .div(&pi.pow_dyadic(13, 2)?)?
            .mul(&sqrt2.mul_i64(432))
            .mul(&k3)
            .mul(&exp_term);
        Ok(KConstants { k, alpha: alpha_q, beta: beta_q, delta, c, a, a_tilde })
    }
}

fn x_argument(k: u32, n: u64) -> Result<BigRational> {
    let v = rat(24 * n as i64 - (2 * k as i64 + 2), 1);
    if !v.is_positive() {
        return Err(Error::InvalidN { k, n });
    }
    Ok(v)
}

/// x_k(n) = pi sqrt(24n - (2k+2)) / 6 as a ball.
pub fn x_of_n(k: u32, n: u64, prec: Prec) -> Result<Ball> {
    x_of_rational(k, &rat(n as i64, 1), prec)
}

/// x_k at a real (rational) argument; used for the threshold point n_0(k).
pub fn x_of_rational(k: u32, n: &BigRational, prec: Prec) -> Result<Ball> {
    let v = n * rat(24, 1) - rat(2 * k as i64 + 2, 1);
    if !v.is_positive() {
        return Err(Error::InvalidN { k, n: 0 });
    }
    Ok(Ball::pi(prec)
        .mul(&Ball::from_rational(prec, &v).sqrt()?)
        .mul(&Ball::from_rational(prec, &rat(1, 6))))
}

/// The main term M_k(n). Defined for every k >= 1 with n > (k+1)/12.
///
/// pi^3 alpha/(18 x^2) collapses to 2 pi alpha / (24n - 2k - 2) exactly,
/// which is how the prefactor is evaluated.
pub fn main_term(k: u32, n: u64, prec: Prec) -> Result<Ball> {
    let arg = x_argument(k, n)?;
    let alpha_b = Ball::from_rational(prec, &alpha(k));
    let x = x_of_n(k, n, prec)?;
    let bessel = bessel_i(2, &alpha_b.sqrt()?.mul(&x), prec)?;
    let prefactor =
        Ball::pi(prec).mul_i64(2).mul(&alpha_b).mul(&Ball::from_rational(prec, &(rat(1, 1) / arg)));
    Ok(prefactor.mul(&bessel))
}

/// The Theorem 2 envelope 12 k^3 e^{pi sqrt(k/3)} x^{-3/2} e^{sqrt(beta) x}.
pub fn error_envelope(k: u32, n: u64, prec: Prec) -> Result<Ball> {
    if k < 3 {
        return Err(Error::KOutOfRange { k, requirement: "error envelope is stated for k >= 3" });
    }
    x_argument(k, n)?;
    let pi = Ball::pi(prec);
    let x = x_of_n(k, n, prec)?;
    let beta_b = Ball::from_rational(prec, &beta(k));
    let k3 = Ball::from_i64(prec, (k as i64).pow(3));
    let exp_term = Ball::from_rational(prec, &rat(k as i64, 3)).sqrt()?.mul(&pi).exp()?;
    Ok(k3
        .mul_i64(12)
        .mul(&exp_term)
        .mul(&x.pow_dyadic(-3, 2)?)
        .mul(&beta_b.sqrt()?.mul(&x).exp()?))
}

/// The relative-error bound C_k x e^{-delta_k x}, valid once
/// sqrt(alpha_k) x_k(n) >= 4.
pub fn relative_error_bound(k: u32, n: u64, prec: Prec) -> Result<Ball> {
    let kc = KConstants::new(k, prec)?;
    let x = x_of_n(k, n, prec)?;
    let t = Ball::from_rational(prec, &kc.alpha).sqrt()?.mul(&x);
    if !(t.lower() >= 4) {
        return Err(Error::Precondition(format!(
            "relative error bound needs sqrt(alpha) x >= 4 (k={k}, n={n})"
        )));
    }
    Ok(kc.c.mul(&x).mul(&x.mul(&kc.delta).neg().exp()?))
}

/// Main term plus both envelopes at one (k, n).
#[derive(Clone, Debug)]
pub struct AsymptoticEstimate {
    pub k: u32,
    pub n: u64,
    pub x: Ball,
    pub main: Ball,
    pub r_bound: Ball,
    /// Present when the Lemma 4.2 precondition sqrt(alpha) x >= 4 is
    /// certified.
    pub eps_bound: Option<Ball>,
}

pub fn estimate(k: u32, n: u64, prec: Prec) -> Result<AsymptoticEstimate> {
    let x = x_of_n(k, n, prec)?;
    let main = main_term(k, n, prec)?;
    let r_bound = error_envelope(k, n, prec)?;
    let eps_bound = match relative_error_bound(k, n, prec) {
        Ok(b) => Some(b),
        Err(Error::Precondition(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(AsymptoticEstimate { k, n, x, main, r_bound, eps_bound })
}

/// (2m-3)!! for m >= 1, with (-1)!! = 1.
fn odd_double_factorial(m: u64) -> BigInt {
    let mut p = BigInt::one();
    let mut i: i64 = 2 * m as i64 - 3;
    while i >= 2 {
        p *= i;
        i -= 2;
    }
    p
}

fn factorial_big(m: u64) -> BigInt {
    (1..=m).product::<u64>().into()
}

/// Model coefficients A_m(n) of the expansion of log(Delta_k(n+j)/Delta_k(n)):
///
/// A_1 = sqrt(alpha) pi^2/(3x) - 5 pi^2/(6 x^2), and for m >= 2
/// A_m = (-sqrt(alpha)(2m-3)!!/(2^m m! x^{2m-1}) + 5/(4m x^{2m})) (-2 pi^2/3)^m.
///
/// Returns the first `m_terms` coefficients and a remainder note. The note
/// records that the tail beyond `m_terms` and the O(x^-3)-order mismatch of
/// the underlying model (which drops the Bessel correction series) are
/// empirical, not certified.
pub fn log_ratio_expansion(
    k: u32,
    n: u64,
    j: i64,
    m_terms: u32,
    prec: Prec,
) -> Result<(Vec<Ball>, String)> {
    if m_terms == 0 {
        return Err(Error::Precondition("need at least one expansion term".into()));
    }
    let x = x_of_n(k, n, prec)?;
    let x2 = x.mul(&x);
    // convergence: x^2 > 2 pi^2 |j| / 3
    let pi2 = Ball::pi(prec).powi(2)?;
    let lim = pi2.mul_i64(2 * j.abs()).mul(&Ball::from_rational(prec, &rat(1, 3)));
    if !x2.lower().gt(&lim.upper()) {
        return Err(Error::Convergence(format!(
            "x_k(n)^2 must exceed 2 pi^2 |j| / 3 (k={k}, n={n}, j={j})"
        )));
    }
    let sqrt_alpha = Ball::from_rational(prec, &alpha(k)).sqrt()?;
    let mut coeffs = Vec::with_capacity(m_terms as usize);
    // A_1
    let a1 = sqrt_alpha
        .mul(&pi2)
        .div(&x.mul_i64(3))?
        .sub(&pi2.mul_i64(5).div(&x2.mul_i64(6))?);
    coeffs.push(a1);
    let neg_two_pi2_third = pi2.mul_i64(-2).mul(&Ball::from_rational(prec, &rat(1, 3)));
    for m in 2..=m_terms as u64 {
        let dfac = odd_double_factorial(m);
        let denom = BigInt::from(2u64).pow(m as u32) * factorial_big(m);
        let first = sqrt_alpha
            .mul(&Ball::from_bigint(prec, &dfac))
            .div(&Ball::from_bigint(prec, &denom).mul(&x.powi(2 * m as i64 - 1)?))?
            .neg();
        let second = Ball::from_rational(prec, &rat(5, 4 * m as i64)).div(&x.powi(2 * m as i64)?)?;
        coeffs.push(first.add(&second).mul(&neg_two_pi2_third.powi(m as i64)?));
    }
    let note = format!(
        "model coefficients through j^{m_terms}; tail and the O(x^-3) model \
         mismatch (Bessel correction series) are empirical, not certified"
    );
    Ok((coeffs, note))
}

/// log(Delta_k(n+j)/Delta_k(n)) from exact table values, as a ball.
pub fn exact_log_ratio(table: &CoeffTable, n: u64, j: i64, prec: Prec) -> Result<Ball> {
    let a = table.value((n as i64 + j) as u64)?;
    let b = table.value(n)?;
    Ball::from_bigint(prec, a).ln()?.sub(&Ball::from_bigint(prec, b).ln()?).ok_or_nan()
}

trait OkOrNan {
    fn ok_or_nan(self) -> Result<Ball>;
}
impl OkOrNan for Ball {
    fn ok_or_nan(self) -> Result<Ball> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::PrecisionExhausted("non-finite ball".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::delta_table;

    #[test]
    fn x_values() {
        // x_3(1) = 2 pi / 3
        let x = x_of_n(3, 1, 128).unwrap();
        let expect = Ball::pi(128).mul(&Ball::from_rational(128, &rat(2, 3)));
        assert!(x.overlaps(&expect));
        // x_1(1) = pi sqrt(20) / 6
        let x = x_of_n(1, 1, 128).unwrap();
        let expect = Ball::pi(128)
            .mul(&Ball::from_i64(128, 20).sqrt().unwrap())
            .mul(&Ball::from_rational(128, &rat(1, 6)));
        assert!(x.overlaps(&expect));
        assert!(matches!(x_of_n(3, 0, 128), Err(Error::InvalidN { .. })));
    }

    #[test]
    fn x_at_threshold_rational() {
        // x_3(n_0(3)) with n_0(3) = 8*27 + 4/12 equals 4 pi 3^{3/2}/sqrt(3) = 12 pi
        let n0 = rat(8 * 27, 1) + rat(3 + 1, 12);
        let x = x_of_rational(3, &n0, 128).unwrap();
        let expect = Ball::pi(128).mul_i64(12);
        assert!(x.overlaps(&expect));
    }

    #[test]
    fn constants_ranges_for_k_3_to_50() {
        for k in 3..=50u32 {
            let a = alpha(k);
            let b = beta(k);
            assert!(a >= rat(17, 7) && a < rat(5, 2), "alpha out of range at k={k}");
            assert!(b >= rat(5, 7) && b < rat(5, 2), "beta out of range at k={k}");
            let kc = KConstants::new(k, 128).unwrap();
            assert!(kc.delta.is_certainly_positive());
            // delta_k >= (6/(2k+1)) sqrt(2/5)
            let lb = Ball::from_rational(128, &rat(6, 2 * k as i64 + 1))
                .mul(&Ball::from_rational(128, &rat(2, 5)).sqrt().unwrap());
            assert!(lb.le_certain(&kc.delta), "delta lower bound fails at k={k}");
            // A_k <= A~_k
            assert!(kc.a.le_certain(&kc.a_tilde) || kc.a.overlaps(&kc.a_tilde));
        }
    }

    #[test]
    fn alphabeta_combination_below_14() {
        // 2 alpha pi^3/18 + sqrt(2) pi^{3/2} beta^{3/4}/3 < 14
        let prec = 128;
        let pi = Ball::pi(prec);
        let fourteen = Ball::from_i64(prec, 14);
        for k in 3..=50u32 {
            let a = Ball::from_rational(prec, &alpha(k));
            let b = Ball::from_rational(prec, &beta(k));
            let lhs = a
                .mul_i64(2)
                .mul(&pi.powi(3).unwrap())
                .mul(&Ball::from_rational(prec, &rat(1, 18)))
                .add(
                    &Ball::from_i64(prec, 2)
                        .sqrt()
                        .unwrap()
                        .mul(&pi.pow_dyadic(3, 2).unwrap())
                        .mul(&b.pow_dyadic(3, 4).unwrap())
                        .mul(&Ball::from_rational(prec, &rat(1, 3))),
                );
            assert!(lhs.le_certain(&fourteen), "constant combination fails at k={k}");
        }
    }

    #[test]
    fn k_below_3_rejected_for_envelopes() {
        assert!(matches!(error_envelope(2, 100, 128), Err(Error::KOutOfRange { .. })));
        assert!(matches!(KConstants::new(1, 128), Err(Error::KOutOfRange { .. })));
    }

    #[test]
    fn main_term_positive_and_envelope_holds_at_samples() {
        let table = delta_table(3, 600);
        for n in [1u64, 10, 100, 526] {
            let m = main_term(3, n, 256).unwrap();
            assert!(m.is_certainly_positive());
            let env = error_envelope(3, n, 256).unwrap();
            let exact = Ball::from_bigint(256, table.value(n).unwrap());
            let dev = exact.sub(&m).abs();
            assert!(dev.le_certain(&env), "envelope fails at n={n}: dev={dev:?} env={env:?}");
        }
    }

    #[test]
    fn relative_error_bound_holds_against_series() {
        let table = delta_table(3, 1100);
        for n in [526u64, 1000] {
            let m = main_term(3, n, 256).unwrap();
            let exact = Ball::from_bigint(256, table.value(n).unwrap());
            let eps = exact.sub(&m).abs().div(&m).unwrap();
            let bound = relative_error_bound(3, n, 256).unwrap();
            assert!(eps.le_certain(&bound), "relative bound fails at n={n}");
        }
        // boundary: smallest n with sqrt(alpha) x >= 4 evaluates cleanly
        let mut n = 1;
        loop {
            match relative_error_bound(3, n, 128) {
                Ok(_) => break,
                Err(Error::Precondition(_)) => n += 1,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(n > 1, "precondition should exclude at least n=1");
    }

    #[test]
    fn log_ratio_model_approaches_exact_ratio() {
        let table = delta_table(3, 10_010);
        let mut devs = Vec::new();
        for n in [1000u64, 10_000] {
            let (coeffs, _) = log_ratio_expansion(3, n, 1, 4, 256).unwrap();
            let mut model = Ball::zero(256);
            for c in &coeffs {
                model = model.add(c);
            }
            let exact = exact_log_ratio(&table, n, 1, 256).unwrap();
            devs.push(model.sub(&exact).abs().upper().to_f64());
        }
        assert!(devs[0] < 1e-4, "model deviation too large at n=1000: {}", devs[0]);
        assert!(devs[1] < devs[0], "deviation must shrink with n: {devs:?}");
    }

    #[test]
    fn a1_positive_for_large_n() {
        for n in [100u64, 1000, 10_000] {
            let (coeffs, _) = log_ratio_expansion(1, n, 1, 1, 128).unwrap();
            assert!(coeffs[0].is_certainly_positive());
        }
    }

    #[test]
    fn delta_model_matches_sqrt_neg_a2() {
        // alpha^{1/4} pi^2 / (3 sqrt(2) x^{3/2}) vs sqrt(-A_2) to leading order
        let prec = 256;
        let n = 10_000u64;
        let k = 3u32;
        let (coeffs, _) = log_ratio_expansion(k, n, 1, 2, prec).unwrap();
        let sqrt_neg_a2 = coeffs[1].neg().sqrt().unwrap();
        let x = x_of_n(k, n, prec).unwrap();
        let model = Ball::from_rational(prec, &alpha(k))
            .pow_dyadic(1, 4)
            .unwrap()
            .mul(&Ball::pi(prec).powi(2).unwrap())
            .div(&Ball::from_i64(prec, 2).sqrt().unwrap().mul_i64(3).mul(&x.pow_dyadic(3, 2).unwrap()))
            .unwrap();
        let ratio = sqrt_neg_a2.div(&model).unwrap().to_f64();
        assert!((ratio - 1.0).abs() < 0.02, "ratio {ratio} should be 1 + O(1/x)");
    }

    #[test]
    fn convergence_precondition_enforced() {
        // tiny n with huge j violates x^2 > 2 pi^2 |j| / 3
        assert!(matches!(
            log_ratio_expansion(3, 1, 100, 3, 128),
            Err(Error::Convergence(_))
        ));
    }
}
