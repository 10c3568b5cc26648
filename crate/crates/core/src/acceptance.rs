//! The acceptance sweep behind `diamond reproduce` and the `acceptance`
//! integration test target. Each numbered check is independently callable
//! and returns a [`CriterionResult`] with a one-line detail string.
//!
//! The naive truncated-product oracle lives here, deliberately separate
//! from the pentagonal-recurrence engine in [`crate::series`]: it expands
//! each factor (1 - q^m)^{+-1} term by term with no pentagonal shortcut,
//! so the two paths share no code.

use std::time::Instant;

use num::{BigInt, One, Zero};
use rayon::prelude::*;

use crate::asymptotics::{error_envelope, main_term, relative_error_bound};
use crate::ball::Ball;
use crate::bessel::{bessel_i, bessel_upper_bound, phi_envelopes_hold};
use crate::circle::exact_formula_eval;

use crate::inequalities::{
    hermite_convergence_probe, jensen_poly, is_hyperbolic, logconcavity_certifier,
    sweep_difference, sweep_laguerre, sweep_multiplicative, sweep_turan, threshold_certificate,
    CertVerdict, ThresholdBranch,
};
use crate::series::TableCache;
use crate::{Error, Result};

pub const CRITERIA_COUNT: u32 = 11;

#[derive(Clone, Debug, serde::Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

/// Multiply the dense series by (1 - q^m).
fn naive_mul_factor(c: &mut Vec<BigInt>, m: usize) {
    for i in (m..c.len()).rev() {
        let t = c[i - m].clone();
        c[i] -= t;
    }
}

/// Divide the dense series by (1 - q^m), i.e. multiply by 1 + q^m + q^2m + ...
fn naive_div_factor(c: &mut Vec<BigInt>, m: usize) {
    for i in m..c.len() {
        let t = c[i - m].clone();
        c[i] += t;
    }
}

/// Independent oracle: expand the defining product factor by factor.
pub fn naive_delta_table(k: u32, n_max: u64) -> Vec<BigInt> {
    let len = n_max as usize + 1;
    let mut c = vec![BigInt::zero(); len];
    c[0] = BigInt::one();
    for n in 1..len {
        if 2 * n < len {
            naive_mul_factor(&mut c, 2 * n);
        }
        let m = (2 * k as usize + 1) * n;
        if m < len {
            naive_mul_factor(&mut c, m);
        }
    }
    for n in 1..len {
        for _ in 0..3 {
            naive_div_factor(&mut c, n);
        }
        let m = (4 * k as usize + 2) * n;
        if m < len {
            naive_div_factor(&mut c, m);
        }
    }
    c
}

/// Independent oracle for the r-colored partitions.
pub fn naive_colored_table(r: u32, n_max: u64) -> Vec<BigInt> {
    let len = n_max as usize + 1;
    let mut c = vec![BigInt::zero(); len];
    c[0] = BigInt::one();
    for _ in 0..r {
        for n in 1..len {
            naive_div_factor(&mut c, n);
        }
    }
    c
}

fn finish(id: u32, name: &'static str, start: Instant, passed: bool, detail: String) -> CriterionResult {
    CriterionResult { id, name, passed, detail, millis: start.elapsed().as_millis() }
}

/// 1. The naive truncated-product oracle and the pentagonal engine agree
///    on Delta_k(n) for k <= 6, n <= 300, exactly.
pub fn criterion_1(cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for k in 1..=6u32 {
        let engine = cache.delta(k, 300);
        let oracle = naive_delta_table(k, 300);
        for n in 0..=300u64 {
            if engine.value(n)? != &oracle[n as usize] {
                mismatches.push((k, n));
            }
        }
    }
    let passed = mismatches.is_empty();
    let detail = if passed {
        "6 tables x 301 coefficients agree with the naive product oracle".into()
    } else {
        format!("mismatches at {mismatches:?}")
    };
    Ok(finish(1, "series self-consistency", start, passed, detail))
}

/// 2. Exact-formula certification at J=50, 256 bits for k <= 6 and 50
///    values of n up to 300.
pub fn criterion_2(cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut jobs = Vec::new();
    for k in 1..=6u32 {
        let table = cache.delta(k, 300);
        for i in 1..=50u64 {
            jobs.push((k, 6 * i, table.clone()));
        }
    }
    let failures: Vec<(u32, u64)> = jobs
        .par_iter()
        .map(|(k, n, table)| {
            let eval = exact_formula_eval(*k, *n, 50, 256, Some(table))?;
            Ok(if eval.certified { None } else { Some((*k, *n)) })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let passed = failures.is_empty();
    let detail = if passed {
        "300 evaluations round to the exact value with imaginary part enclosing 0".into()
    } else {
        format!("not certified at (k, n) in {failures:?}")
    };
    Ok(finish(2, "exact-formula certification", start, passed, detail))
}

fn envelope_holds(k: u32, n: u64, table: &crate::series::CoeffTable) -> Result<bool> {
    for prec in [256u32, 512] {
        let exact = Ball::from_bigint(prec, table.value(n)?);
        let m = main_term(k, n, prec)?;
        let env = error_envelope(k, n, prec)?;
        let dev = exact.sub(&m).abs();
        if dev.le_certain(&env) {
            return Ok(true);
        }
        if env.le_certain(&dev) {
            return Ok(false);
        }
    }
    Err(Error::PrecisionExhausted(format!("envelope comparison undecided at k={k} n={n}")))
}

/// 3. Theorem 2 envelope for k in 3..=8 and all n <= 3000.
pub fn criterion_3(cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut failures = Vec::new();
    for k in 3..=8u32 {
        let table = cache.delta(k, 3000);
        let bad: Vec<u64> = (1..=3000u64)
            .into_par_iter()
            .map(|n| envelope_holds(k, n, &table).map(|ok| if ok { None } else { Some(n) }))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        failures.extend(bad.into_iter().map(|n| (k, n)));
    }
    let passed = failures.is_empty();
    let detail = if passed {
        "|Delta - M| <= envelope, ball-rigorous, 6 x 3000 points".into()
    } else {
        format!("envelope fails at {failures:?}")
    };
    Ok(finish(3, "asymptotic error envelope", start, passed, detail))
}

fn relative_bound_holds(k: u32, n: u64, table: &crate::series::CoeffTable) -> Result<Option<bool>> {
    // None when the precondition sqrt(alpha) x >= 4 does not hold
    for prec in [256u32, 512] {
        let bound = match relative_error_bound(k, n, prec) {
            Ok(b) => b,
            Err(Error::Precondition(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let exact = Ball::from_bigint(prec, table.value(n)?);
        let m = main_term(k, n, prec)?;
        let eps = exact.sub(&m).abs().div(&m)?;
        if eps.le_certain(&bound) {
            return Ok(Some(true));
        }
        if bound.le_certain(&eps) {
            return Ok(Some(false));
        }
    }
    Err(Error::PrecisionExhausted(format!("relative bound undecided at k={k} n={n}")))
}

/// 4. Lemma 4.2 relative-error envelope on the same sweep, where
///    sqrt(alpha_k) x_k(n) >= 4.
pub fn criterion_4(cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut applicable = 0u64;
    for k in 3..=8u32 {
        let table = cache.delta(k, 3000);
        let results: Vec<(u64, Option<bool>)> = (1..=3000u64)
            .into_par_iter()
            .map(|n| relative_bound_holds(k, n, &table).map(|r| (n, r)))
            .collect::<Result<Vec<_>>>()?;
        for (n, r) in results {
            match r {
                Some(true) => applicable += 1,
                Some(false) => failures.push((k, n)),
                None => {}
            }
        }
    }
    let passed = failures.is_empty();
    let detail = if passed {
        format!("eps_n <= C_k x e^(-delta_k x) at all {applicable} applicable points")
    } else {
        format!("relative bound fails at {failures:?}")
    };
    Ok(finish(4, "relative error envelope", start, passed, detail))
}

/// 5. Theorem 1.5: second-order Turan on [n_k, 5000] for k in {3,4,5},
///    plus Certified verdicts at the thresholds.
pub fn criterion_5(cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut problems = Vec::new();
    for (k, n_k) in [(3u32, 526u64), (4, 526), (5, 1001)] {
        let expected_threshold = (8 * (k as u64).pow(3) + (k as u64 + 1).div_ceil(12)).max(526);
        if n_k != expected_threshold {
            problems.push(format!("threshold formula gives {expected_threshold} for k={k}"));
        }
        let table = cache.delta(k, 5001);
        let report = sweep_turan(&table, k, 2, n_k, 5000)?;
        if !report.all_hold() {
            problems.push(format!("turan2 fails in [{n_k}, 5000] for k={k}"));
        }
        let st = logconcavity_certifier(k, n_k, 256, &table)?;
        if st.verdict != CertVerdict::Certified {
            problems.push(format!("certifier not Certified at (k={k}, n={n_k})"));
        }
    }
    let passed = problems.is_empty();
    let detail = if passed {
        "turan2 exact on [n_k, 5000] for k=3,4,5 and Certified at n_k".into()
    } else {
        problems.join("; ")
    };
    Ok(finish(5, "log-concavity threshold (Theorem 1.5)", start, passed, detail))
}

/// 6. Threshold certificates for k in 3..=20, exercising both branches.
pub fn criterion_6(_cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut problems = Vec::new();
    for k in 3..=20u32 {
        let report = threshold_certificate(k, 256)?;
        if !report.passed {
            problems.push(format!("certificate fails for k={k}"));
        }
        let expect_closed = k >= 16;
        let is_closed = report.branch == ThresholdBranch::ClosedForm;
        if expect_closed != is_closed {
            problems.push(format!("wrong branch for k={k}: {:?}", report.branch));
        }
    }
    let passed = problems.is_empty();
    let detail = if passed {
        "certificates pass for k=3..=20 (finite-check branch below 16, closed form above)".into()
    } else {
        problems.join("; ")
    };
    Ok(finish(6, "threshold certificate", start, passed, detail))
}

/// 7. Cited small-k results, reproduced empirically: third-order Turan for
///    6 <= n <= 1000, order-2 Laguerre up to 1000, second-order Turan for
///    1 <= n <= 1000, each for k in {1,2}.
///
/// The order-2 Laguerre inequality genuinely fails at a few small odd n
/// (L_2(Delta_1(1)) = -19 and friends); its onset is n = 12 for k = 1 and
/// n = 10 for k = 2. The check verifies nonnegativity on [12, 1000] and
/// that every exception sits below 12, and reports the exceptions.
pub fn criterion_7(cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut exceptions = Vec::new();
    for k in 1..=2u32 {
        let table = cache.delta(k, 1010);
        let turan3: Vec<u64> = (6..=1000u64)
            .into_par_iter()
            .map(|n| {
                let p = jensen_poly(&table, 3, n - 1)?;
                Ok(if is_hyperbolic(&p) { None } else { Some(n) })
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        if !turan3.is_empty() {
            problems.push(format!("third-order Turan fails for k={k} at {turan3:?}"));
        }
        let lag = sweep_laguerre(&table, k, 2, 0, 1000)?;
        for w in &lag.witnesses {
            if matches!(lag.verdict, crate::inequalities::Verdict::Counterexamples(_)) {
                if w.n >= 12 {
                    problems.push(format!("order-2 Laguerre fails for k={k} at n={}", w.n));
                } else {
                    exceptions.push((k, w.n));
                }
            }
        }
        let t2 = sweep_turan(&table, k, 2, 1, 1000)?;
        if !t2.all_hold() {
            problems.push(format!("second-order Turan fails for k={k}"));
        }
    }
    let passed = problems.is_empty();
    let detail = if passed {
        format!(
            "third-order Turan (n>=6), order-2 Laguerre (n>=12), and log-concavity hold \
             for k=1,2 up to 1000; small-n Laguerre exceptions at (k,n) in {exceptions:?}"
        )
    } else {
        problems.join("; ")
    };
    Ok(finish(7, "small-k reproductions", start, passed, detail))
}

/// 8. Positive forward differences Delta^r for r <= 5, k <= 4, n in
///    [200, 2000], exact arithmetic.
pub fn criterion_8(cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut failures = Vec::new();
    for k in 1..=4u32 {
        let table = cache.delta(k, 2005);
        for r in 1..=5u32 {
            let rep = sweep_difference(&table, k, r, 200, 2000)?;
            if !rep.all_hold() {
                failures.push((k, r));
            }
        }
    }
    let passed = failures.is_empty();
    let detail = if passed {
        "Delta^r positive for r<=5, k<=4 on [200, 2000]".into()
    } else {
        format!("nonpositive differences at (k, r) in {failures:?}")
    };
    Ok(finish(8, "forward-difference positivity", start, passed, detail))
}

/// 9. Multiplicativity for k=3 over all pairs a, b in [526, 1200].
pub fn criterion_9(cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let table = cache.delta(3, 2400);
    let rep = sweep_multiplicative(&table, 3, 526, 1200)?;
    let passed = rep.all_hold();
    let detail = if passed {
        format!("Delta_3(a) Delta_3(b) >= Delta_3(a+b) for all {} pairs", rep.checked)
    } else {
        format!("{} failing pairs", rep.witnesses.len())
    };
    Ok(finish(9, "multiplicativity (Corollary 1.6)", start, passed, detail))
}

/// 10. Bessel bounds: the I_2 lower envelope on [4, 200], the elementary
///     upper bound at six sample points, and the phi-envelopes on [8, 200].
///
/// The phi-envelope part is implemented exactly as stated and fails at the
/// grid points below t ~ 23.16, where the stated bounds are genuinely
/// false; the detail string lists the failing points.
pub fn criterion_10(_cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let prec = 192u32;
    let pi = Ball::pi(prec);
    let mut problems = Vec::new();

    // I2(t) >= e^t / (2 sqrt(2 pi t)) on the 50-point grid 4, 8, ..., 200
    for i in 0..50u64 {
        let t = Ball::from_i64(prec, 4 + 4 * i as i64);
        let i2 = bessel_i(2, &t, prec)?;
        let lb = t.exp()?.div(&t.mul(&pi).mul_i64(2).sqrt()?.mul_i64(2))?;
        if !lb.le_certain(&i2) {
            problems.push(format!("I2 lower bound fails at t={}", 4 + 4 * i));
        }
    }

    // I2(s) <= upper bound at s in {1/10, 1/2, 1, 5, 50, 200}
    let samples = [(1i64, 10i64), (1, 2), (1, 1), (5, 1), (50, 1), (200, 1)];
    for (num, den) in samples {
        let s = Ball::from_i64(prec, num).div(&Ball::from_i64(prec, den))?;
        let i2 = bessel_i(2, &s, prec)?;
        let ub = bessel_upper_bound(&Ball::from_i64(prec, 2), &s)?;
        if !i2.le_certain(&ub) {
            problems.push(format!("I2 upper bound fails at s={num}/{den}"));
        }
    }

    // phi envelopes on the 50-point grid {8, 10, 12, 16, ..., 200}
    let mut grid: Vec<i64> = vec![8, 10];
    grid.extend((3..=50).map(|i| 4 * i));
    for t in grid {
        let (ok1, ok2) = phi_envelopes_hold(&Ball::from_i64(prec, t), prec)?;
        if !ok1 {
            problems.push(format!("phi' envelope fails at t={t}"));
        }
        if !ok2 {
            problems.push(format!("phi'' envelope fails at t={t}"));
        }
    }

    let passed = problems.is_empty();
    let detail = if passed {
        "I2 envelopes and phi envelopes hold on all grids".into()
    } else {
        format!(
            "{} sub-checks failed: {} (the phi envelopes are false below t~23.16 \
             as stated; they hold on t >= 24 and in particular wherever applied, t >= 26)",
            problems.len(),
            problems.join(", ")
        )
    };
    Ok(finish(10, "Bessel function bounds", start, passed, detail))
}

/// 11. Hermite probe: deviations strictly decrease along n in
///     {10^3, 5*10^3, 10^4} for k in {1,3}, d in {3,4}.
pub fn criterion_11(cache: &TableCache) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut problems = Vec::new();
    for k in [1u32, 3] {
        let table = cache.delta(k, 10_004);
        for d in [3u32, 4] {
            let devs = hermite_convergence_probe(&table, k, d, &[1000, 5000, 10_000], 256)?;
            let decreasing = devs.windows(2).all(|w| w[1].1 < w[0].1);
            if !decreasing {
                problems.push(format!("k={k} d={d}: {devs:?}"));
            }
        }
    }
    let passed = problems.is_empty();
    let detail = if passed {
        "renormalized Jensen coefficients approach the Hermite limit monotonically".into()
    } else {
        format!("non-decreasing deviations: {}", problems.join("; "))
    };
    Ok(finish(11, "Hermite renormalization probe", start, passed, detail))
}

/// Run one criterion by id.
pub fn run_criterion(id: u32, cache: &TableCache) -> Result<CriterionResult> {
    match id {
        1 => criterion_1(cache),
        2 => criterion_2(cache),
        3 => criterion_3(cache),
        4 => criterion_4(cache),
        5 => criterion_5(cache),
        6 => criterion_6(cache),
        7 => criterion_7(cache),
        8 => criterion_8(cache),
        9 => criterion_9(cache),
        10 => criterion_10(cache),
        11 => criterion_11(cache),
        _ => Err(Error::Precondition(format!("no criterion {id}"))),
    }
}

/// Run the whole suite in order.
pub fn run_all(cache: &TableCache) -> Result<Vec<CriterionResult>> {
    (1..=CRITERIA_COUNT).map(|id| run_criterion(id, cache)).collect()
}

// Unit tests for the oracle itself; the criteria run in tests/acceptance.rs.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_tables_match_frozen_values() {
        let d1 = naive_delta_table(1, 10);
        let expect = [1u64, 3, 8, 18, 38, 75, 142, 258, 455, 780, 1308];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(d1[n], BigInt::from(*e));
        }
        let p3 = naive_colored_table(3, 3);
        assert_eq!(p3, vec![BigInt::from(1), BigInt::from(3), BigInt::from(9), BigInt::from(22)]);
    }

    #[test]
    fn oracle_equivalence_sample() {
        // the full k<=6, N=300 comparison runs as acceptance criterion 1
        let cache = TableCache::new(None);
        let engine = cache.delta(4, 120);
        let oracle = naive_delta_table(4, 120);
        for n in 0..=120u64 {
            assert_eq!(engine.value(n).unwrap(), &oracle[n as usize]);
        }
    }
}
