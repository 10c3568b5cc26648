//! Exact modular data for the eta-quotient multiplier system.
//!
//! Everything here is exact rational or integer arithmetic:
//!
//! - [`sawtooth`]: ((x)) = x - floor(x) - 1/2 off the integers, 0 on them.
//! - [`dedekind_sum`]: s(h,j) = sum_{mu mod j} ((mu/j))((h mu/j)), computed
//!   by the direct O(j) sum; the reciprocity law is kept as a test.
//! - [`solve_h_prime`], [`solve_h_jt`]: canonical congruence representatives
//!   h h' = -1 (mod j) and h (t/gcd(j,t)) h_{j,t} = -1 (mod j/gcd(j,t)).
//! - [`omega_exponent`]: the rational e with the combined multiplier
//!   Omega_k(h,j) = exp(pi i e), assembled from four Dedekind sums.
//! - [`r_value`], [`enumerate_contributing`], [`b_value`]: the per-term
//!   exponent data of the exact formula.
//! - [`a_sum`]: the Kloosterman-type sum A_j as a complex ball; each of its
//!   terms is exp(pi i q) for an exact rational q, so the only rounding
//!   happens at final evaluation.
//!
//! Roots of unity are carried as exact rational exponents of pi*i for as
//! long as possible; see [`crate::ball::exp_pi_i`].

use num::{BigInt, BigRational, Integer, Signed, Zero};

use crate::ball::{exp_pi_i, ComplexBall, Prec};
use crate::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The sawtooth function ((x)).
pub fn sawtooth(x: &BigRational) -> BigRational {
    if x.is_integer() {
        return BigRational::zero();
    }
    x - x.floor() - rat(1, 2)
}

/// Dedekind sum s(h, j) by the direct sum over residues.
pub fn dedekind_sum(h: i64, j: u64) -> Result<BigRational> {
    check_coprime(h, j)?;
    let mut sum = BigRational::zero();
    for mu in 1..j {
        let a = sawtooth(&rat(mu as i64, j as i64));
        let b = sawtooth(&rat(h * mu as i64, j as i64));
        sum += a * b;
    }
    Ok(sum)
}

fn check_coprime(h: i64, j: u64) -> Result<()> {
    if j == 0 {
        return Err(Error::NonCoprime { h, j });
    }
    if j != 1 && h.rem_euclid(j as i64).gcd(&(j as i64)) != 1 {
        return Err(Error::NonCoprime { h, j });
    }
    Ok(())
}

/// Canonical h' in [0, j) with h h' = -1 (mod j); 0 when j = 1.
pub fn solve_h_prime(h: i64, j: u64) -> Result<i64> {
    check_coprime(h, j)?;
    if j == 1 {
        return Ok(0);
    }
    let m = j as i64;
    let hm = h.rem_euclid(m);
    let inv = mod_inverse(hm, m).expect("coprimality was checked");
    Ok((-inv).rem_euclid(m))
}

/// The unique 0 <= h_{j,t} < j/gcd(j,t) with
/// h (t/gcd(j,t)) h_{j,t} = -1 (mod j/gcd(j,t)).
pub fn solve_h_jt(h: i64, j: u64, t: u64) -> Result<i64> {
    check_coprime(h, j)?;
    let g = j.gcd(&t);
    let m = (j / g) as i64;
    if m == 1 {
        return Ok(0);
    }
    let a = (h.rem_euclid(m) * ((t / g) as i64 % m)).rem_euclid(m);
    let inv =
        mod_inverse(a, m).expect("h t/gcd(j,t) is coprime to j/gcd(j,t) when gcd(h,j)=1");
    Ok((-inv).rem_euclid(m))
}

fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let e = a.extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

/// Index tuple (n1, n2, n3, n4) of one term of the exact formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermIndex {
    pub n1: u32,
    pub n2: u32,
    pub n3: i32,
    pub n4: i32,
}

impl TermIndex {
    pub const ZERO: TermIndex = TermIndex { n1: 0, n2: 0, n3: 0, n4: 0 };

    pub fn new(n1: u32, n2: u32, n3: i32, n4: i32) -> Self {
        TermIndex { n1, n2, n3, n4 }
    }
}

/// Pentagonal-shaped weight m(3m-1); always even and nonnegative on integers.
fn pent_weight(m: i64) -> i64 {
    let w = m * (3 * m - 1);
    debug_assert!(w >= 0 && w % 2 == 0);
    w
}

fn gcds(k: u32, j: u64) -> (u64, u64, u64) {
    let g2 = j.gcd(&2);
    let g1 = j.gcd(&(2 * k as u64 + 1));
    let g4 = j.gcd(&(4 * k as u64 + 2));
    (g2, g1, g4)
}

/// The exact rational r(n1,n2,n3,n4) attached to (k, j). Independent of h.
pub fn r_value(k: u32, j: u64, idx: &TermIndex) -> BigRational {
    let (g2, g1, g4) = gcds(k, j);
    let (g2, g1, g4) = (g2 as i64, g1 as i64, g4 as i64);
    let m = 4 * k as i64 + 2;
    let base = rat((g2 * g2 - 2) * (g1 * g1 - (2 * k as i64 + 1)) + 2 * m, m);
    let inner = rat(idx.n1 as i64, 1)
        + rat(g4 * g4, m) * rat(idx.n2 as i64, 1)
        + rat(g2 * g2, 4) * rat(pent_weight(idx.n3 as i64), 1)
        + rat(g1 * g1, m) * rat(pent_weight(idx.n4 as i64), 1);
    base - rat(24, 1) * inner
}

/// All index tuples whose term actually contributes to the exact formula,
/// in lexicographic order.
///
/// Tuples with r = 0 are omitted: their summand r * I_2(x sqrt(r)/j)
/// vanishes identically. This is also how the boundary case k = 2,
/// (n1,n2,n3,n4) = (0,1,0,0) with r = beta_2 = 0 is read here.
pub fn enumerate_contributing(k: u32, j: u64) -> Vec<TermIndex> {
    let base = r_value(k, j, &TermIndex::ZERO);
    if !base.is_positive() {
        return Vec::new();
    }
    let (g2, g1, g4) = gcds(k, j);
    let m = 4 * k as i64 + 2;
    // Per-coordinate budgets: every bracket term is nonnegative, so a
    // coordinate value is feasible only while its own term stays below base.
    let fits = |weight: BigRational| -> bool { rat(24, 1) * weight < base };
    let n1_candidates: Vec<u32> = (0..).take_while(|&n1| fits(rat(n1 as i64, 1))).collect();
    let n2_candidates: Vec<u32> = (0..)
        .take_while(|&n2| fits(rat(g4 as i64 * g4 as i64, m) * rat(n2 as i64, 1)))
        .collect();
    let signed_candidates = |unit: BigRational| -> Vec<i32> {
        let mut v: Vec<i32> = vec![0];
        for x in 1.. {
            if fits(unit.clone() * rat(pent_weight(x as i64), 1)) {
                v.push(x);
            } else {
                break;
            }
        }
        for x in 1.. {
            if fits(unit.clone() * rat(pent_weight(-x as i64), 1)) {
                v.push(-x);
            } else {
                break;
            }
        }
        v.sort_unstable();
        v
    };
    let n3_candidates = signed_candidates(rat(g2 as i64 * g2 as i64, 4));
    let n4_candidates = signed_candidates(rat(g1 as i64 * g1 as i64, m));

    let mut out = Vec::new();
    for &n1 in &n1_candidates {
        for &n2 in &n2_candidates {
            for &n3 in &n3_candidates {
                for &n4 in &n4_candidates {
                    let idx = TermIndex::new(n1, n2, n3, n4);
                    if r_value(k, j, &idx).is_positive() {
                        out.push(idx);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// The integer b_{h,j}(n1,n2,n3,n4) using canonical congruence representatives.
pub fn b_value(k: u32, j: u64, h: i64, idx: &TermIndex) -> Result<i64> {
    let (g2, g1, g4) = gcds(k, j);
    let h_prime = solve_h_prime(h, j)?;
    let h_j2 = solve_h_jt(h, j, 2)?;
    let h_j1 = solve_h_jt(h, j, 2 * k as u64 + 1)?;
    let h_j4 = solve_h_jt(h, j, 4 * k as u64 + 2)?;
    Ok(2 * idx.n1 as i64 * h_prime
        + 2 * idx.n2 as i64 * g4 as i64 * h_j4
        + pent_weight(idx.n3 as i64) * g2 as i64 * h_j2
        + pent_weight(idx.n4 as i64) * g1 as i64 * h_j1)
}

/// Exact multiplier data at the cusp h/j for the four eta factors.
#[derive(Clone, Debug)]
pub struct ModularData {
    pub k: u32,
    pub j: u64,
    pub h: i64,
    pub h_prime: i64,
    /// (t, h_{j,t}) for t in {2, 2k+1, 4k+2}.
    pub h_jt: [(u64, i64); 3],
    /// Dedekind sums for the arguments (h,j), (h 2/g2, j/g2),
    /// (h (2k+1)/g1, j/g1), (h (4k+2)/g4, j/g4).
    pub s_values: [BigRational; 4],
    /// Exact rational e in [0,2) with Omega_k(h,j) = exp(pi i e).
    pub omega_exponent: BigRational,
}

fn reduce_mod_2(e: BigRational) -> BigRational {
    let two = rat(2, 1);
    let mut r = &e - (&e / &two).floor() * &two;
    if r.is_negative() {
        r += &two;
    }
    if r >= two {
        r -= rat(2, 1);
    }
    r
}

/// Dedekind sum of the shifted argument (h t/g, j/g) with g = gcd(j,t).
fn shifted_sum(h: i64, j: u64, t: u64) -> Result<BigRational> {
    let g = j.gcd(&t);
    let jj = j / g;
    if jj == 1 {
        return Ok(BigRational::zero());
    }
    let hh = (h.rem_euclid(jj as i64) * ((t / g) as i64 % jj as i64)).rem_euclid(jj as i64);
    dedekind_sum(hh, jj)
}

/// Exact rational e with Omega_k(h,j) = exp(pi i e), reduced into [0, 2).
pub fn omega_exponent(k: u32, j: u64, h: i64) -> Result<BigRational> {
    check_coprime(h, j)?;
    let e = rat(3, 1) * dedekind_sum(h.rem_euclid(j.max(1) as i64), j)?
        + shifted_sum(h, j, 4 * k as u64 + 2)?
        - shifted_sum(h, j, 2)?
        - shifted_sum(h, j, 2 * k as u64 + 1)?;
    Ok(reduce_mod_2(e))
}

pub fn modular_data(k: u32, j: u64, h: i64) -> Result<ModularData> {
    check_coprime(h, j)?;
    let t1 = 2 * k as u64 + 1;
    let t4 = 4 * k as u64 + 2;
    let s0 = dedekind_sum(h.rem_euclid(j as i64), j)?;
    let s2 = shifted_sum(h, j, 2)?;
    let s1 = shifted_sum(h, j, t1)?;
    let s4 = shifted_sum(h, j, t4)?;
    let omega = reduce_mod_2(rat(3, 1) * &s0 + &s4 - &s2 - &s1);
    Ok(ModularData {
        k,
        j,
        h,
        h_prime: solve_h_prime(h, j)?,
        h_jt: [
            (2, solve_h_jt(h, j, 2)?),
            (t1, solve_h_jt(h, j, t1)?),
            (t4, solve_h_jt(h, j, t4)?),
        ],
        s_values: [s0, s2, s1, s4],
        omega_exponent: omega,
    })
}

/// Multiplier data for every h coprime to j, built once and reused across
/// index tuples and across n.
#[derive(Clone, Debug)]
pub struct ModularTable {
    pub k: u32,
    pub j: u64,
    pub entries: Vec<ModularData>,
}

impl ModularTable {
    pub fn new(k: u32, j: u64) -> Result<ModularTable> {
        let mut entries = Vec::new();
        for h in 0..j.max(1) {
            let h = h as i64;
            if j > 1 && h.gcd(&(j as i64)) != 1 {
                continue;
            }
            entries.push(modular_data(k, j, h)?);
        }
        Ok(ModularTable { k, j, entries })
    }

    fn b_of(&self, md: &ModularData, idx: &TermIndex) -> i64 {
        let (g2, g1, g4) = gcds(self.k, self.j);
        2 * idx.n1 as i64 * md.h_prime
            + 2 * idx.n2 as i64 * g4 as i64 * md.h_jt[2].1
            + pent_weight(idx.n3 as i64) * g2 as i64 * md.h_jt[0].1
            + pent_weight(idx.n4 as i64) * g1 as i64 * md.h_jt[1].1
    }
}

/// The Kloosterman-type sum A_j(n, n1, n2, n3, n4) as a complex ball.
///
/// Each summand is Omega_k(h,j) e^{-2 pi i n h / j} e^{pi i b / j}, i.e.
/// exp(pi i q_h) for the exact rational q_h = e_Omega - 2nh/j + b/j,
/// reduced mod 2 before any rounding takes place.
///
/// The eta-quotient transformation carries the phase e^{-pi i (k+1) h/(6j)}
/// alongside the multiplier Omega_k(h,j); it cancels exactly against the
/// -(k+1)/12 part of the coefficient-extraction phase
/// e^{-2 pi i h (n-(k+1)/12)/j}, leaving the plain e^{-2 pi i n h/j} used
/// here. (Keeping the shift with a bare Omega misses the integers; see the
/// truncation tests, which round to the exact series values.)
pub fn a_sum(k: u32, j: u64, n: u64, idx: &TermIndex, prec: Prec) -> Result<ComplexBall> {
    a_sum_cached(&ModularTable::new(k, j)?, n, idx, prec)
}

/// [`a_sum`] over a prebuilt [`ModularTable`].
pub fn a_sum_cached(
    mt: &ModularTable,
    n: u64,
    idx: &TermIndex,
    prec: Prec,
) -> Result<ComplexBall> {
    let n_shift = rat(n as i64, 1) - rat(mt.k as i64 + 1, 12);
    if !n_shift.is_positive() {
        return Err(Error::InvalidN { k: mt.k, n });
    }
    let mut acc = ComplexBall::zero(prec);
    for md in &mt.entries {
        let b = mt.b_of(md, idx);
        let q = &md.omega_exponent + rat(-2 * md.h * n as i64, mt.j as i64)
            + rat(b, mt.j as i64);
        acc = acc.add(&exp_pi_i(prec, &reduce_mod_2(q)));
    }
    if !(acc.re.is_finite() && acc.im.is_finite()) {
        return Err(Error::PrecisionExhausted("A_j accumulation".into()));
    }
    Ok(acc)
}
