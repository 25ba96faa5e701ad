//! Exact coefficient backend: ℚ(i)-linear combinations of square roots of
//! squarefree positive integers.
//!
//! Every coefficient produced by the ladder algebra lives in the ring
//! generated by Gaussian rationals and √n!; keeping the radicand factored
//! into a square part and a squarefree part makes identities like
//! √(k+1)·(1/√(k+1)!) = 1/√k! hold structurally, so biorthonormality and the
//! ladder relations can be asserted with `==` instead of a tolerance.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Result;
use crate::scalar::Scalar;

/// A complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    /// re_n/re_d + i·im_n/im_d.
    pub fn from_parts(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Self {
        assert!(re_d != 0 && im_d != 0, "zero denominator");
        Self {
            re: BigRational::new(BigInt::from(re_n), BigInt::from(re_d)),
            im: BigRational::new(BigInt::from(im_n), BigInt::from(im_d)),
        }
    }

    pub fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn neg(&self) -> Self {
        Self {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn scale_big(&self, r: &BigRational) -> Self {
        Self {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Exact scalar: finite sum Σ q_t·√t over squarefree positive integers t,
/// with Gaussian-rational q_t. The radicand 1 holds the rational part.
///
/// Radicands arising here are products of factorials and small integers, so
/// they are smooth; squarefree normalization uses trial division (plus a
/// perfect-square check on any leftover cofactor).
#[derive(Clone, PartialEq, Eq)]
pub struct ExactScalar {
    terms: BTreeMap<BigUint, GaussRational>,
}

const TRIAL_DIVISION_BOUND: u64 = 1024;

/// Split n ≥ 1 into (s, t) with n = s²·t and t squarefree (for smooth n).
fn split_square(n: &BigUint) -> (BigUint, BigUint) {
    let mut rem = n.clone();
    let mut square_part = BigUint::one();
    let mut free_part = BigUint::one();
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_BOUND {
        let dd = BigUint::from(d);
        if (&rem % &dd).is_zero() {
            let mut mult = 0u32;
            while (&rem % &dd).is_zero() {
                rem /= &dd;
                mult += 1;
            }
            square_part *= dd.pow(mult / 2);
            if mult % 2 == 1 {
                free_part *= BigUint::from(d);
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !rem.is_one() {
        let root = rem.sqrt();
        if &root * &root == rem {
            square_part *= root;
        } else {
            free_part *= rem;
        }
    }
    (square_part, free_part)
}

impl ExactScalar {
    fn from_terms(terms: BTreeMap<BigUint, GaussRational>) -> Self {
        let mut s = Self { terms };
        s.terms.retain(|_, q| !q.is_zero());
        s
    }

    pub fn from_gauss(q: GaussRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(BigUint::one(), q);
        }
        Self { terms }
    }

    pub fn i() -> Self {
        Self::from_gauss(GaussRational::from_parts(0, 1, 1, 1))
    }

    pub fn from_parts(re_n: i64, re_d: i64, im_n: i64, im_d: i64) -> Self {
        Self::from_gauss(GaussRational::from_parts(re_n, re_d, im_n, im_d))
    }

    /// q·√t with t any positive integer (normalized internally).
    pub fn radical(q: GaussRational, radicand: u64) -> Self {
        assert!(radicand > 0, "radicand must be positive");
        let (s, t) = split_square(&BigUint::from(radicand));
        let coeff = q.scale_big(&BigRational::from_integer(BigInt::from(
            s.to_u64().expect("square part fits u64 for u64 input"),
        )));
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(t, coeff);
        }
        Self { terms }
    }

    /// n! as an exact integer.
    pub fn big_factorial(n: u32) -> BigUint {
        let mut acc = BigUint::one();
        for k in 2..=n {
            acc *= BigUint::from(k);
        }
        acc
    }

    /// Split n! = s²·t with t squarefree, via the prime exponents of n!.
    fn factorial_square_split(n: u32) -> (BigUint, BigUint) {
        let mut square = BigUint::one();
        let mut free = BigUint::one();
        for p in primes_up_to(n) {
            let mut e = 0u64;
            let mut pk = p as u64;
            while pk <= n as u64 {
                e += (n as u64) / pk;
                match pk.checked_mul(p as u64) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
            square *= BigUint::from(p).pow((e / 2) as u32);
            if e % 2 == 1 {
                free *= BigUint::from(p);
            }
        }
        (square, free)
    }

    /// Number of terms (1 for pure rationals and single radicals).
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The Gaussian-rational value when no radical is involved.
    pub fn to_gauss_rational(&self) -> Option<GaussRational> {
        match self.terms.len() {
            0 => Some(GaussRational::zero()),
            1 => {
                let (t, q) = self.terms.iter().next().expect("len checked");
                t.is_one().then(|| q.clone())
            }
            _ => None,
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, q) in &self.terms {
            let root = t.to_f64().unwrap_or(f64::NAN).sqrt();
            let (qr, qi) = q.to_f64_pair();
            re += qr * root;
            im += qi * root;
        }
        (re, im)
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, q) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if t.is_one() {
                write!(f, "({q:?})")?;
            } else {
                write!(f, "({q:?})*sqrt({t})")?;
            }
        }
        Ok(())
    }
}

impl Add for ExactScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut terms = self.terms;
        for (t, q) in rhs.terms {
            match terms.get_mut(&t) {
                Some(existing) => *existing = existing.add(&q),
                None => {
                    terms.insert(t, q);
                }
            }
        }
        Self::from_terms(terms)
    }
}

impl Sub for ExactScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ExactScalar {
    type Output = Self;
    fn neg(self) -> Self {
        let terms = self
            .terms
            .into_iter()
            .map(|(t, q)| (t, q.neg()))
            .collect();
        Self { terms }
    }
}

impl Mul for ExactScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut terms: BTreeMap<BigUint, GaussRational> = BTreeMap::new();
        for (t1, q1) in &self.terms {
            for (t2, q2) in &rhs.terms {
                // √t1·√t2 = g·√((t1/g)(t2/g)) with g = gcd(t1, t2);
                // both cofactors are squarefree and coprime, so the product
                // radicand is already squarefree.
                let g = t1.gcd(t2);
                let rad = (t1 / &g) * (t2 / &g);
                let coeff = q1
                    .mul(q2)
                    .scale_big(&BigRational::from_integer(BigInt::from(g)));
                match terms.get_mut(&rad) {
                    Some(existing) => *existing = existing.add(&coeff),
                    None => {
                        terms.insert(rad, coeff);
                    }
                }
            }
        }
        Self::from_terms(terms)
    }
}

impl Scalar for ExactScalar {
    fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
    fn one() -> Self {
        Self::from_gauss(GaussRational::one())
    }
    fn from_int(n: i64) -> Self {
        Self::from_gauss(GaussRational::from_int(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_gauss(GaussRational::from_ratio(num, den))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(t, q)| (t.clone(), q.conj()))
            .collect();
        Self { terms }
    }
    fn factorial(n: u32) -> Result<Self> {
        let f = BigRational::from_integer(BigInt::from(Self::big_factorial(n)));
        Ok(Self::from_gauss(GaussRational::new(f, BigRational::zero())))
    }
    fn sqrt_int(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        Self::radical(GaussRational::one(), n)
    }
    fn inv_sqrt_factorial(n: u32) -> Result<Self> {
        // 1/√(n!) = s·√t/n!  where n! = s²t.
        let (s, t) = Self::factorial_square_split(n);
        let q = GaussRational::new(
            BigRational::new(BigInt::from(s), BigInt::from(Self::big_factorial(n))),
            BigRational::zero(),
        );
        let mut terms = BTreeMap::new();
        terms.insert(t, q);
        Ok(Self::from_terms(terms))
    }
    fn abs_f64(&self) -> f64 {
        let (re, im) = self.to_f64_pair();
        re.hypot(im)
    }
}

fn primes_up_to(n: u32) -> Vec<u32> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2;
    while p * p <= n {
        if sieve[p] {
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &is_p)| is_p.then_some(i as u32))
        .collect()
}
