//! Inequality families over the exact tables, and the certified
//! log-concavity route.
//!
//! Exact integer checks: second-order Turan ([`turan2_exact`]), higher
//! orders via Jensen-polynomial hyperbolicity ([`jensen_poly`] +
//! [`is_hyperbolic`]), Laguerre of any order ([`laguerre`]), forward
//! differences ([`forward_difference`]), and multiplicativity
//! ([`multiplicative_check`]). Hyperbolicity is decided exactly with
//! square-free reduction and Sturm chains, never by floating root finding.
//!
//! Ball-certified route: [`logconcavity_certifier`] evaluates the two
//! sufficient hypotheses
//!
//! ```text
//! (i)  x_k(n-1) >= 26 / sqrt(alpha_k)
//! (ii) e^{delta_k x_k(n)} >= A_k x_k(n)^4
//! ```
//!
//! and reports Certified only when both clear rigorously. A
//! NotCertifiedHere verdict says nothing about log-concavity itself;
//! `turan2_exact` decides that. [`threshold_certificate`] discharges the
//! hypotheses for all n >= max(ceil(8k^3 + (k+1)/12), 526), by a finite
//! computation for 3 <= k < 16 and by a closed-form inequality for k >= 16.

use num::integer::binomial;
use num::{BigInt, BigRational, One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{alpha, main_term, x_of_n, KConstants};
use crate::ball::{Ball, Prec};
use crate::poly::{self, RatPoly};
use crate::series::CoeffTable;
use crate::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Jensen polynomial of degree d and shift n: sum_j C(d,j) a(n+j) X^j.
#[derive(Clone, Debug)]
pub struct JensenPoly {
    pub degree: u32,
    pub shift: u64,
    pub coeffs: Vec<BigInt>,
}

pub fn jensen_poly(table: &CoeffTable, d: u32, n: u64) -> Result<JensenPoly> {
    let mut coeffs = Vec::with_capacity(d as usize + 1);
    for j in 0..=d as u64 {
        let c = binomial(BigInt::from(d), BigInt::from(j));
        coeffs.push(c * table.value(n + j)?);
    }
    Ok(JensenPoly { degree: d, shift: n, coeffs })
}

/// Exact hyperbolicity decision (all roots real).
pub fn is_hyperbolic(p: &JensenPoly) -> bool {
    poly::is_hyperbolic(&RatPoly::from_bigints(&p.coeffs))
}

/// Exact check a(n)^2 >= a(n-1) a(n+1); returns the verdict and the three
/// values involved.
pub fn turan2_exact(table: &CoeffTable, n: u64) -> Result<(bool, [BigInt; 3])> {
    if n == 0 {
        return Err(Error::Precondition("turan2 needs n >= 1".into()));
    }
    let lo = table.value(n - 1)?;
    let mid = table.value(n)?;
    let hi = table.value(n + 1)?;
    Ok((mid * mid >= lo * hi, [lo.clone(), mid.clone(), hi.clone()]))
}

/// Exact Laguerre value
/// L_m(a(n)) = 1/2 sum_{i=0}^{2m} (-1)^{i+m} C(2m,i) a(n+i) a(n+2m-i).
///
/// The signed sum is always even (paired terms plus an even central
/// binomial), so L_m itself is an exact integer and that is what is
/// returned; the order-1 value is exactly a(n+1)^2 - a(n) a(n+2).
pub fn laguerre(table: &CoeffTable, m: u32, n: u64) -> Result<BigInt> {
    if m == 0 {
        return Err(Error::Precondition("laguerre order must be >= 1".into()));
    }
    let mut sum = BigInt::zero();
    for i in 0..=2 * m as u64 {
        let c = binomial(BigInt::from(2 * m), BigInt::from(i));
        let term = c * table.value(n + i)? * table.value(n + 2 * m as u64 - i)?;
        if (i + m as u64) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let (half, remainder) = num::integer::div_rem(sum, BigInt::from(2));
    assert!(remainder.is_zero(), "Laguerre sum must be even");
    Ok(half)
}

/// Exact forward difference
/// Delta^r a(n) = sum_{i=0}^r C(r,i) (-1)^{r+i} a(n+i).
pub fn forward_difference(table: &CoeffTable, r: u32, n: u64) -> Result<BigInt> {
    let mut sum = BigInt::zero();
    for i in 0..=r as u64 {
        let c = binomial(BigInt::from(r), BigInt::from(i));
        let term = c * table.value(n + i)?;
        if (i + r as u64) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// Exact comparison a(a) a(b) >= a(a+b), with the three values.
pub fn multiplicative_check(table: &CoeffTable, a: u64, b: u64) -> Result<(bool, [BigInt; 3])> {
    let va = table.value(a)?;
    let vb = table.value(b)?;
    let vab = table.value(a + b)?;
    Ok((va * vb >= *vab, [va.clone(), vb.clone(), vab.clone()]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CertVerdict {
    /// Both hypotheses hold rigorously; log-concavity at n is certified.
    Certified,
    /// The sufficient condition could not be established at n. Says
    /// nothing about the truth of the inequality there.
    NotCertifiedHere,
}

/// State of the log-concavity certifier at one n.
#[derive(Clone, Debug)]
pub struct CertifierState {
    /// Theta(n) = a(n-1) a(n+1) / a(n)^2 from exact series values.
    pub theta: Ball,
    /// Theta_M(n), same ratio on main terms.
    pub theta_m: Ball,
    /// Upper bound for eps*_n = max(eps_{n-1}, eps_n, eps_{n+1}):
    /// C_k x(n+1) e^{-delta_k x(n-1)}.
    pub eps_star: Ball,
    /// 1 - Theta_M(n).
    pub gap: Ball,
    pub hypothesis_i: bool,
    pub hypothesis_ii: bool,
    pub verdict: CertVerdict,
}

/// Evaluate the certified sufficient condition for log-concavity at n.
pub fn logconcavity_certifier(
    k: u32,
    n: u64,
    precision_bits: Prec,
    table: &CoeffTable,
) -> Result<CertifierState> {
    let kc = KConstants::new(k, precision_bits)?;
    if 12 * (n as i64 - 1) <= k as i64 + 1 {
        return Err(Error::InvalidN { k, n });
    }
    let prec = precision_bits;
    let theta = {
        let lo = table.value(n - 1)?;
        let mid = table.value(n)?;
        let hi = table.value(n + 1)?;
        Ball::from_bigint(prec, &(lo * hi)).div(&Ball::from_bigint(prec, &(mid * mid)))?
    };
    let theta_m = {
        let lo = main_term(k, n - 1, prec)?;
        let mid = main_term(k, n, prec)?;
        let hi = main_term(k, n + 1, prec)?;
        lo.mul(&hi).div(&mid.mul(&mid))?
    };
    let gap = Ball::one(prec).sub(&theta_m);
    let eps_star = kc
        .c
        .mul(&x_of_n(k, n + 1, prec)?)
        .mul(&x_of_n(k, n - 1, prec)?.mul(&kc.delta).neg().exp()?);

    // (i) x(n-1) >= 26/sqrt(alpha)  <=>  alpha x(n-1)^2 >= 676
    let x2_nm1 = Ball::pi(prec)
        .powi(2)?
        .mul(&Ball::from_rational(prec, &(alpha(k) * rat(24 * (n as i64 - 1) - 2 * k as i64 - 2, 36))));
    let hypothesis_i = x2_nm1.ge_certain(&Ball::from_i64(prec, 676));

    // (ii) e^{delta x(n)} >= A x(n)^4
    let x_n = x_of_n(k, n, prec)?;
    let lhs = kc.delta.mul(&x_n).exp()?;
    let rhs = kc.a.mul(&x_n.powi(4)?);
    let hypothesis_ii = lhs.ge_certain(&rhs);

    let verdict =
        if hypothesis_i && hypothesis_ii { CertVerdict::Certified } else { CertVerdict::NotCertifiedHere };
    Ok(CertifierState { theta, theta_m, eps_star, gap, hypothesis_i, hypothesis_ii, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ThresholdBranch {
    /// k >= 16: the closed-form inequality
    /// ((72 pi/7) sqrt(2/15) - pi/sqrt(3)) sqrt(k) >= 9 log k + 72/5.
    ClosedForm,
    /// 3 <= k < 16: hypothesis (ii) checked with exact constants at one
    /// point, extended upward by monotonicity of e^{delta x}/x^4.
    FiniteCheck { at_n: u64 },
}

/// Certificate that the sufficient hypotheses hold for every
/// n >= max(ceil(8k^3 + (k+1)/12), 526).
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub k: u32,
    /// ceil(8k^3 + (k+1)/12).
    pub n0_ceil: u64,
    /// The certified threshold max(n0_ceil, 526).
    pub threshold: u64,
    pub branch: ThresholdBranch,
    /// (i) at the threshold.
    pub hypothesis_i: bool,
    /// (ii) at the branch point (via the closed form for k >= 16).
    pub hypothesis_ii: bool,
    /// x >= 4/delta at the branch point, so e^{delta x}/x^4 increases
    /// from there on.
    pub monotone: bool,
    pub passed: bool,
}

pub fn threshold_certificate(k: u32, precision_bits: Prec) -> Result<ThresholdReport> {
    let kc = KConstants::new(k, precision_bits)?;
    let prec = precision_bits;
    let n0_ceil = 8 * (k as u64).pow(3) + (k as u64 + 1).div_ceil(12);
    let threshold = n0_ceil.max(526);

    // monotonicity and hypothesis (ii) are anchored at this point
    let (branch, check_at) = if k >= 16 {
        (ThresholdBranch::ClosedForm, n0_ceil)
    } else if k == 4 {
        (ThresholdBranch::FiniteCheck { at_n: 526 }, 526)
    } else {
        (ThresholdBranch::FiniteCheck { at_n: n0_ceil }, n0_ceil)
    };

    let x_check = x_of_n(k, check_at, prec)?;
    let monotone = kc.delta.mul(&x_check).ge_certain(&Ball::from_i64(prec, 4));

    let hypothesis_ii = match branch {
        ThresholdBranch::ClosedForm => {
            // ((72 pi / 7) sqrt(2/15) - pi/sqrt(3)) sqrt(k) >= 9 log k + 72/5
            let pi = Ball::pi(prec);
            let lhs = pi
                .mul(&Ball::from_rational(prec, &rat(72, 7)))
                .mul(&Ball::from_rational(prec, &rat(2, 15)).sqrt()?)
                .sub(&pi.div(&Ball::from_i64(prec, 3).sqrt()?)?)
                .mul(&Ball::from_i64(prec, k as i64).sqrt()?);
            let rhs = Ball::from_i64(prec, k as i64)
                .ln()?
                .mul_i64(9)
                .add(&Ball::from_rational(prec, &rat(72, 5)));
            lhs.ge_certain(&rhs)
        }
        ThresholdBranch::FiniteCheck { at_n } => {
            let x = x_of_n(k, at_n, prec)?;
            let lhs = kc.delta.mul(&x).exp()?;
            let rhs = kc.a.mul(&x.powi(4)?);
            lhs.ge_certain(&rhs)
        }
    };

    // (i) at the reported threshold
    let x2_tm1 = Ball::pi(prec).powi(2)?.mul(&Ball::from_rational(
        prec,
        &(alpha(k) * rat(24 * (threshold as i64 - 1) - 2 * k as i64 - 2, 36)),
    ));
    let hypothesis_i = x2_tm1.ge_certain(&Ball::from_i64(prec, 676));

    let passed = hypothesis_i && hypothesis_ii && monotone;
    Ok(ThresholdReport { k, n0_ceil, threshold, branch, hypothesis_i, hypothesis_ii, monotone, passed })
}

/// Hermite polynomial coefficients in the normalization
/// e^{-t^2 + Xt} = sum_d H_d(X) t^d / d!, i.e. H_0 = 1, H_1 = X,
/// H_{d+1} = X H_d - 2d H_{d-1}.
///
/// This is the normalization the renormalized Jensen polynomials actually
/// converge to with the A(n), delta(n) scalings used here (the degree-1
/// coefficient tends to 1, not 2), so the probe measures distance to these.
pub fn hermite_coeffs(d: u32) -> Vec<BigInt> {
    let mut prev = vec![BigInt::one()];
    if d == 0 {
        return prev;
    }
    let mut cur = vec![BigInt::zero(), BigInt::one()];
    for m in 1..d {
        let mut next = vec![BigInt::zero(); m as usize + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= 2 * m as i64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Renormalized-Jensen deviation from H_d at each n of `n_list`.
///
/// Computes delta(n)^{-d}/a(n) * J^{d,n}((delta(n) X - 1)/exp(A(n))) with
/// the displayed leading-order A(n) = sqrt(alpha) pi^2/(3x) and
/// delta(n) = alpha^{1/4} pi^2 / (3 sqrt(2) x^{3/2}), and reports the
/// sup-norm coefficient distance to H_d. The dropped O-terms of A(n) are
/// unmodeled, so this is a qualitative probe: deviations shrink along
/// increasing n.
pub fn hermite_convergence_probe(
    table: &CoeffTable,
    k: u32,
    d: u32,
    n_list: &[u64],
    precision_bits: Prec,
) -> Result<Vec<(u64, f64)>> {
    let prec = precision_bits;
    let h = hermite_coeffs(d);
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let x = x_of_n(k, n, prec)?;
        let sqrt_alpha = Ball::from_rational(prec, &alpha(k)).sqrt()?;
        let pi2 = Ball::pi(prec).powi(2)?;
        let a_n = sqrt_alpha.mul(&pi2).div(&x.mul_i64(3))?;
        let delta_n = Ball::from_rational(prec, &alpha(k))
            .pow_dyadic(1, 4)?
            .mul(&pi2)
            .div(&Ball::from_i64(prec, 2).sqrt()?.mul_i64(3).mul(&x.pow_dyadic(3, 2)?))?;
        // coeff_i = delta^{i-d}/a(n) sum_{j=i}^d C(d,j) C(j,i) (-1)^{j-i}
        //           e^{-jA} a(n+j)
        let base = Ball::from_bigint(prec, table.value(n)?);
        let mut worst = 0f64;
        for i in 0..=d {
            let mut acc = Ball::zero(prec);
            for j in i..=d {
                let c = binomial(BigInt::from(d), BigInt::from(j))
                    * binomial(BigInt::from(j), BigInt::from(i));
                let mut w = Ball::from_bigint(prec, &c)
                    .mul(&Ball::from_bigint(prec, table.value(n + j as u64)?))
                    .mul(&a_n.mul_i64(-(j as i64)).exp()?);
                if (j - i) % 2 == 1 {
                    w = w.neg();
                }
                acc = acc.add(&w);
            }
            let coeff = acc
                .mul(&delta_n.powi(i as i64 - d as i64)?)
                .div(&base)?;
            let dev = coeff.sub(&Ball::from_bigint(prec, &h[i as usize])).abs();
            worst = worst.max(dev.mid().to_f64().abs());
        }
        out.push((n, worst));
    }
    Ok(out)
}

/// Inequality family of a sweep report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Family {
    Turan { order: u32 },
    Laguerre { order: u32 },
    Difference { order: u32 },
    LogConcave,
    Multiplicative,
    ThresholdCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    AllHold,
    Counterexamples(Vec<Witness>),
    Inconclusive { reason: String },
}

/// One (n, exact values) record; values are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: u64,
    pub values: Vec<String>,
}

/// Verdict and witnesses for one inequality family over an n-range.
#[derive(Clone, Debug, Serialize)]
pub struct IneqReport {
    pub family: Family,
    pub k: u32,
    pub range: (u64, u64),
    pub verdict: Verdict,
    /// Sample witnesses (boundary points when all hold, otherwise the
    /// counterexamples themselves).
    pub witnesses: Vec<Witness>,
    pub checked: u64,
    /// For LogConcave sweeps: how many points the ball certifier also
    /// certified (the exact check decides the verdict either way).
    pub certified_count: Option<u64>,
}

impl IneqReport {
    pub fn all_hold(&self) -> bool {
        self.verdict == Verdict::AllHold
    }
}

fn sweep<F>(family: Family, k: u32, lo: u64, hi: u64, check: F) -> Result<IneqReport>
where
    F: Fn(u64) -> Result<(bool, Vec<String>)> + Sync,
{
    if hi < lo {
        return Err(Error::Precondition("empty sweep range".into()));
    }
    let results: Vec<(u64, bool, Vec<String>)> = (lo..=hi)
        .into_par_iter()
        .map(|n| check(n).map(|(ok, vals)| (n, ok, vals)))
        .collect::<Result<Vec<_>>>()?;
    let mut counter = Vec::new();
    for (n, ok, vals) in &results {
        if !ok {
            counter.push(Witness { n: *n, values: vals.clone() });
        }
    }
    let verdict =
        if counter.is_empty() { Verdict::AllHold } else { Verdict::Counterexamples(counter.clone()) };
    let witnesses = if counter.is_empty() {
        let mut w = Vec::new();
        if let Some((n, _, vals)) = results.first() {
            w.push(Witness { n: *n, values: vals.clone() });
        }
        if results.len() > 1 {
            let (n, _, vals) = results.last().unwrap();
            w.push(Witness { n: *n, values: vals.clone() });
        }
        w
    } else {
        counter
    };
    Ok(IneqReport {
        family,
        k,
        range: (lo, hi),
        verdict,
        witnesses,
        checked: hi - lo + 1,
        certified_count: None,
    })
}

/// Order-d Turan sweep: hyperbolicity of the shift (n-1) Jensen polynomial;
/// the order-2 case is the direct exact comparison.
pub fn sweep_turan(table: &CoeffTable, k: u32, order: u32, lo: u64, hi: u64) -> Result<IneqReport> {
    if order < 2 {
        return Err(Error::Precondition("Turan order must be >= 2".into()));
    }
    if lo == 0 {
        return Err(Error::Precondition("Turan sweeps start at n >= 1".into()));
    }
    sweep(Family::Turan { order }, k, lo, hi, |n| {
        if order == 2 {
            let (ok, vals) = turan2_exact(table, n)?;
            Ok((ok, vals.iter().map(|v| v.to_string()).collect()))
        } else {
            let p = jensen_poly(table, order, n - 1)?;
            Ok((is_hyperbolic(&p), p.coeffs.iter().map(|v| v.to_string()).collect()))
        }
    })
}

pub fn sweep_laguerre(table: &CoeffTable, k: u32, order: u32, lo: u64, hi: u64) -> Result<IneqReport> {
    sweep(Family::Laguerre { order }, k, lo, hi, |n| {
        let v = laguerre(table, order, n)?;
        Ok((!v.is_negative(), vec![v.to_string()]))
    })
}

pub fn sweep_difference(table: &CoeffTable, k: u32, order: u32, lo: u64, hi: u64) -> Result<IneqReport> {
    sweep(Family::Difference { order }, k, lo, hi, |n| {
        let v = forward_difference(table, order, n)?;
        Ok((v.is_positive(), vec![v.to_string()]))
    })
}

/// Log-concavity sweep: the exact Turan check decides, and the ball
/// certifier's success count is reported alongside.
pub fn sweep_logconcave(
    table: &CoeffTable,
    k: u32,
    lo: u64,
    hi: u64,
    precision_bits: Prec,
) -> Result<IneqReport> {
    let mut report = sweep(Family::LogConcave, k, lo, hi, |n| {
        let (ok, vals) = turan2_exact(table, n)?;
        Ok((ok, vals.iter().map(|v| v.to_string()).collect()))
    })?;
    if k >= 3 {
        let certified = (lo..=hi)
            .into_par_iter()
            .map(|n| {
                logconcavity_certifier(k, n, precision_bits, table)
                    .map(|st| (st.verdict == CertVerdict::Certified) as u64)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        report.certified_count = Some(certified);
    }
    Ok(report)
}

/// All-pairs multiplicativity sweep over a <= b in [lo, hi].
pub fn sweep_multiplicative(table: &CoeffTable, k: u32, lo: u64, hi: u64) -> Result<IneqReport> {
    if hi < lo {
        return Err(Error::Precondition("empty sweep range".into()));
    }
    let rows: Vec<Vec<Witness>> = (lo..=hi)
        .into_par_iter()
        .map(|a| {
            let mut bad = Vec::new();
            for b in a..=hi {
                let (ok, vals) = multiplicative_check(table, a, b)?;
                if !ok {
                    bad.push(Witness {
                        n: a,
                        values: vec![
                            b.to_string(),
                            vals[0].to_string(),
                            vals[1].to_string(),
                            vals[2].to_string(),
                        ],
                    });
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?;
    let counter: Vec<Witness> = rows.into_iter().flatten().collect();
    let count = (hi - lo + 1) * (hi - lo + 2) / 2;
    let verdict = if counter.is_empty() {
        Verdict::AllHold
    } else {
        Verdict::Counterexamples(counter.clone())
    };
    Ok(IneqReport {
        family: Family::Multiplicative,
        k,
        range: (lo, hi),
        verdict,
        witnesses: counter,
        checked: count,
        certified_count: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::delta_table;
    use rand::{Rng, SeedableRng};

    #[test]
    fn turan2_examples() {
        let t3 = delta_table(3, 530);
        assert!(turan2_exact(&t3, 526).unwrap().0);
        let t1 = delta_table(1, 40);
        // Dong-Ji-Jia: log-concave for n >= 1 when k in {1,2}
        for n in 1..=30 {
            assert!(turan2_exact(&t1, n).unwrap().0, "k=1 log-concavity at n={n}");
        }
        assert!(matches!(turan2_exact(&t1, 0), Err(Error::Precondition(_))));
        assert!(matches!(turan2_exact(&t1, 40), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn jensen_polynomials() {
        let t1 = delta_table(1, 12);
        let p = jensen_poly(&t1, 1, 4).unwrap();
        assert_eq!(p.coeffs, vec![BigInt::from(38), BigInt::from(75)]);
        // frozen from the table: C(3,j) Delta_1(5+j)
        let p = jensen_poly(&t1, 3, 5).unwrap();
        assert_eq!(
            p.coeffs,
            vec![BigInt::from(75), BigInt::from(426), BigInt::from(774), BigInt::from(455)]
        );
    }

    #[test]
    fn degree2_jensen_iff_turan2() {
        let t2 = delta_table(2, 120);
        for n in 1..=100u64 {
            let direct = turan2_exact(&t2, n).unwrap().0;
            let p = jensen_poly(&t2, 2, n - 1).unwrap();
            assert_eq!(is_hyperbolic(&p), direct, "d=2 consistency at n={n}");
        }
    }

    #[test]
    fn third_order_turan_small_k() {
        // Jia: k in {1,2} satisfy the third-order Turan inequality for n >= 6
        for k in [1u32, 2] {
            let t = delta_table(k, 130);
            for n in 6..=120u64 {
                let p = jensen_poly(&t, 3, n - 1).unwrap();
                assert!(is_hyperbolic(&p), "third-order Turan fails at k={k} n={n}");
            }
        }
    }

    #[test]
    fn laguerre_order1_identity() {
        let t1 = delta_table(1, 60);
        for n in 0..=50u64 {
            let l1 = laguerre(&t1, 1, n).unwrap();
            let direct = t1.value(n + 1).unwrap() * t1.value(n + 1).unwrap()
                - t1.value(n).unwrap() * t1.value(n + 2).unwrap();
            assert_eq!(l1, direct, "order-1 identity at n={n}");
        }
    }

    #[test]
    fn laguerre_higher_orders_nonnegative_samples() {
        let t1 = delta_table(1, 530);
        for n in [100u64, 300, 500] {
            assert!(!laguerre(&t1, 2, n).unwrap().is_negative());
        }
        let t3 = delta_table(3, 530);
        for n in [200u64, 500] {
            assert!(!laguerre(&t3, 3, n).unwrap().is_negative());
        }
    }

    #[test]
    fn difference_basics_and_telescoping() {
        let t2 = delta_table(2, 540);
        // r = 0 is the value itself, r = 1 the step
        assert_eq!(forward_difference(&t2, 0, 7).unwrap(), *t2.value(7).unwrap());
        assert_eq!(
            forward_difference(&t2, 1, 7).unwrap(),
            t2.value(8).unwrap() - t2.value(7).unwrap()
        );
        assert!(forward_difference(&t2, 5, 500).unwrap().is_positive());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r = rng.gen_range(1..=6u32);
            let n = rng.gen_range(0..=500u64);
            let lhs = forward_difference(&t2, r, n).unwrap();
            let rhs = forward_difference(&t2, r - 1, n + 1).unwrap()
                - forward_difference(&t2, r - 1, n).unwrap();
            assert_eq!(lhs, rhs, "telescoping at r={r} n={n}");
        }
    }

    #[test]
    fn certifier_examples() {
        let t3 = delta_table(3, 530);
        let st = logconcavity_certifier(3, 526, 256, &t3).unwrap();
        assert_eq!(st.verdict, CertVerdict::Certified);
        assert!(st.gap.is_certainly_positive());
        let st = logconcavity_certifier(3, 2, 256, &t3).unwrap();
        assert_eq!(st.verdict, CertVerdict::NotCertifiedHere);
        assert!(!st.hypothesis_i);
        let t4 = delta_table(4, 530);
        let st = logconcavity_certifier(4, 526, 256, &t4).unwrap();
        assert_eq!(st.verdict, CertVerdict::Certified);
        let t5 = delta_table(5, 1005);
        let st = logconcavity_certifier(5, 1001, 256, &t5).unwrap();
        assert_eq!(st.verdict, CertVerdict::Certified);
    }

    #[test]
    fn certifier_soundness_where_gap_clears() {
        // Lemma chain: 1 - Theta_M >= 16 eps* forces Theta <= 1
        let t3 = delta_table(3, 800);
        for n in [526u64, 600, 700] {
            let st = logconcavity_certifier(3, n, 256, &t3).unwrap();
            if st.gap.ge_certain(&st.eps_star.mul_i64(16)) {
                let (ok, _) = turan2_exact(&t3, n).unwrap();
                assert!(ok, "gap >= 16 eps* must imply log-concavity at n={n}");
            }
        }
    }

    #[test]
    fn threshold_reports() {
        let r3 = threshold_certificate(3, 256).unwrap();
        assert_eq!(r3.n0_ceil, 217);
        assert_eq!(r3.threshold, 526);
        assert_eq!(r3.branch, ThresholdBranch::FiniteCheck { at_n: 217 });
        assert!(r3.passed);
        let r4 = threshold_certificate(4, 256).unwrap();
        assert_eq!(r4.branch, ThresholdBranch::FiniteCheck { at_n: 526 });
        assert_eq!(r4.threshold, 526);
        assert!(r4.passed);
        let r5 = threshold_certificate(5, 256).unwrap();
        assert_eq!(r5.threshold, 1001);
        assert_eq!(r5.branch, ThresholdBranch::FiniteCheck { at_n: 1001 });
        assert!(r5.passed);
        let r16 = threshold_certificate(16, 256).unwrap();
        assert_eq!(r16.branch, ThresholdBranch::ClosedForm);
        assert!(r16.passed);
        assert!(matches!(threshold_certificate(2, 128), Err(Error::KOutOfRange { .. })));
    }

    #[test]
    fn multiplicative_examples() {
        let t3 = delta_table(3, 1500);
        assert!(multiplicative_check(&t3, 526, 526).unwrap().0);
        assert!(multiplicative_check(&t3, 600, 800).unwrap().0);
        // below threshold the check still evaluates; no assertion on truth
        let _ = multiplicative_check(&t3, 3, 5).unwrap();
    }

    #[test]
    fn hermite_coefficients() {
        assert_eq!(hermite_coeffs(0), vec![BigInt::from(1)]);
        assert_eq!(hermite_coeffs(1), vec![BigInt::from(0), BigInt::from(1)]);
        assert_eq!(
            hermite_coeffs(3),
            vec![BigInt::from(0), BigInt::from(-6), BigInt::from(0), BigInt::from(1)]
        );
        assert_eq!(
            hermite_coeffs(4),
            vec![BigInt::from(12), BigInt::from(0), BigInt::from(-12), BigInt::from(0), BigInt::from(1)]
        );
    }

    #[test]
    fn hermite_probe_shrinks() {
        let t1 = delta_table(1, 2010);
        let devs = hermite_convergence_probe(&t1, 1, 3, &[500, 2000], 256).unwrap();
        assert!(devs[1].1 < devs[0].1, "probe deviation must shrink: {devs:?}");
        // d=1 sanity: renormalized polynomial approaches X
        let devs = hermite_convergence_probe(&t1, 1, 1, &[2000], 256).unwrap();
        assert!(devs[0].1 < 0.5, "degree-1 deviation from H_1: {devs:?}");
    }

    #[test]
    fn sweeps_and_reports() {
        let t3 = delta_table(3, 620);
        let r = sweep_turan(&t3, 3, 2, 526, 600).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.checked, 75);
        let r = sweep_logconcave(&t3, 3, 526, 560, 192).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.certified_count, Some(35));
        let r = sweep_difference(&t3, 3, 3, 300, 400).unwrap();
        assert!(r.all_hold());
        let r = sweep_laguerre(&t3, 3, 2, 100, 200).unwrap();
        assert!(r.all_hold());
        let r = sweep_multiplicative(&t3, 3, 300, 310).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.checked, 66);
    }
}
