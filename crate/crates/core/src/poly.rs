//! Exact univariate polynomials over the rationals, just enough for
//! hyperbolicity decisions: derivative, euclidean remainder, gcd,
//! square-free part, and Sturm-chain real-root counting. No floating
//! point anywhere.

use num::{BigInt, BigRational, One, Signed, Zero};

/// Dense polynomial; `coeffs[i]` multiplies X^i, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        RatPoly::new(coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Scale by a positive rational so the coefficients become coprime
    /// integers; keeps the sign pattern and the roots.
    fn primitive(mut self) -> RatPoly {
        if self.is_zero() {
            return self;
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = num::integer::lcm(lcm, c.denom().clone());
        }
        let mut ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = num::integer::gcd(g, c.clone());
        }
        if !g.is_zero() && !g.is_one() {
            for c in &mut ints {
                *c /= &g;
            }
        }
        self.coeffs = ints.into_iter().map(BigRational::from_integer).collect();
        self
    }

    /// Euclidean remainder of self by div (div nonzero).
    pub fn rem(&self, div: &RatPoly) -> RatPoly {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.degree().unwrap();
        let lead = div.leading().unwrap();
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let q = r.last().unwrap() / lead;
            let shift = r.len() - 1 - dd;
            for i in 0..=dd {
                let t = &div.coeffs[i] * &q;
                r[shift + i] -= t;
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            if r.len() <= dd {
                break;
            }
        }
        RatPoly::new(r)
    }

    /// Exact quotient self / div, when divisible.
    pub fn divide_exact(&self, div: &RatPoly) -> Option<RatPoly> {
        if self.is_zero() {
            return Some(RatPoly::zero());
        }
        let dd = div.degree()?;
        let lead = div.leading().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd {
            let c = r.last().unwrap() / lead;
            let shift = r.len() - 1 - dd;
            q[shift] = c.clone();
            for i in 0..=dd {
                let t = &div.coeffs[i] * &c;
                r[shift + i] -= t;
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        if r.is_empty() {
            Some(RatPoly::new(q))
        } else {
            None
        }
    }

    /// Monic-free gcd via the euclidean algorithm with primitive
    /// normalization at each step.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone().primitive();
        let mut b = other.clone().primitive();
        while !b.is_zero() {
            let r = a.rem(&b).primitive();
            a = b;
            b = r;
        }
        a
    }

    /// Product of the distinct irreducible factors (same roots, all simple).
    pub fn squarefree_part(&self) -> RatPoly {
        if self.degree().unwrap_or(0) <= 1 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        self.divide_exact(&g).expect("gcd divides the polynomial").primitive()
    }
}

/// Sturm chain p, p', -rem(...), ...
fn sturm_chain(p: &RatPoly) -> Vec<RatPoly> {
    let mut chain = vec![p.clone().primitive()];
    let d = p.derivative().primitive();
    if !d.is_zero() {
        chain.push(d);
    }
    while chain.last().map_or(false, |c| c.degree().unwrap_or(0) > 0) {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        let mut neg = r.primitive();
        neg.coeffs.iter_mut().for_each(|c| *c = -c.clone());
        chain.push(neg);
    }
    chain
}

fn sign_of(c: &BigRational) -> i8 {
    if c.is_zero() {
        0
    } else if c.is_positive() {
        1
    } else {
        -1
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut count = 0;
    let mut prev = 0i8;
    for s in signs {
        if s == 0 {
            continue;
        }
        if prev != 0 && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

/// Number of distinct real roots of `p` over the whole real line.
pub fn count_distinct_real_roots(p: &RatPoly) -> usize {
    match p.degree() {
        None | Some(0) => return 0,
        _ => {}
    }
    let sf = p.squarefree_part();
    if sf.degree() == Some(0) {
        return 0;
    }
    let chain = sturm_chain(&sf);
    let at_plus = variations(chain.iter().map(|q| sign_of(q.leading().unwrap())));
    let at_minus = variations(chain.iter().map(|q| {
        let s = sign_of(q.leading().unwrap());
        if q.degree().unwrap_or(0) % 2 == 1 {
            -s
        } else {
            s
        }
    }));
    at_minus - at_plus
}

/// All roots real (counted with multiplicity)? Decided exactly:
/// square-free part + Sturm count over the rationals.
pub fn is_hyperbolic(p: &RatPoly) -> bool {
    match p.degree() {
        None => false,
        Some(0) => true,
        Some(1) => true,
        Some(_) => {
            let sf = p.squarefree_part();
            count_distinct_real_roots(&sf) == sf.degree().unwrap_or(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rp(v: &[i64]) -> RatPoly {
        RatPoly::new(v.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    #[test]
    fn basic_roots() {
        // 1 - X^2: roots +-1
        assert!(is_hyperbolic(&rp(&[1, 0, -1])));
        assert_eq!(count_distinct_real_roots(&rp(&[1, 0, -1])), 2);
        // 1 + X^2: no real roots
        assert!(!is_hyperbolic(&rp(&[1, 0, 1])));
        assert_eq!(count_distinct_real_roots(&rp(&[1, 0, 1])), 0);
        // (X-1)^2: double root is still hyperbolic
        assert!(is_hyperbolic(&rp(&[1, -2, 1])));
        assert_eq!(count_distinct_real_roots(&rp(&[1, -2, 1])), 1);
        // degree <= 1
        assert!(is_hyperbolic(&rp(&[5])));
        assert!(is_hyperbolic(&rp(&[3, 2])));
        assert!(!is_hyperbolic(&RatPoly::zero()));
    }

    #[test]
    fn products_of_linear_factors_are_hyperbolic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let d = rng.gen_range(2..6);
            let mut p = rp(&[1]);
            for _ in 0..d {
                let root = rng.gen_range(-9..10i64);
                // multiply by (X - root)
                let mut next = vec![BigRational::zero(); p.coeffs.len() + 1];
                for (i, c) in p.coeffs().iter().enumerate() {
                    next[i + 1] += c;
                    next[i] -= c * BigRational::from_integer(BigInt::from(root));
                }
                p = RatPoly::new(next);
            }
            assert!(is_hyperbolic(&p), "product of linear factors must be hyperbolic: {p:?}");
        }
    }

    #[test]
    fn complex_pair_detected() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            // (X^2 + bX + c) with b^2 < 4c has a complex pair
            let b = rng.gen_range(-5..6i64);
            let c = rng.gen_range(1 + (b * b) / 4..(b * b) / 4 + 20);
            let mut p = rp(&[c, b, 1]);
            // multiply by random linear factors
            for _ in 0..rng.gen_range(0..3) {
                let root = rng.gen_range(-9..10i64);
                let mut next = vec![BigRational::zero(); p.coeffs.len() + 1];
                for (i, cf) in p.coeffs().iter().enumerate() {
                    next[i + 1] += cf;
                    next[i] -= cf * BigRational::from_integer(BigInt::from(root));
                }
                p = RatPoly::new(next);
            }
            assert!(!is_hyperbolic(&p), "complex pair must be detected: {p:?}");
        }
    }

    #[test]
    fn remainder_and_gcd() {
        // gcd((X-1)(X-2), (X-1)(X-3)) ~ (X-1)
        let a = rp(&[2, -3, 1]);
        let b = rp(&[3, -4, 1]);
        let g = a.gcd(&b);
        assert_eq!(g.degree(), Some(1));
        let root = -&g.coeffs()[0] / &g.coeffs()[1];
        assert_eq!(root, BigRational::from_integer(BigInt::one()));
    }
}
