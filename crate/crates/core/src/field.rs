//! Arithmetic in the prime field F_p and in the cyclotomic field Q(ζ_p).
//!
//! Character values of the groups handled by this crate are sums of p-th
//! roots of unity scaled by rationals. They are kept exact in
//! [`CyclotomicNumber`], which stores coefficients on the power basis
//! `1, ζ, …, ζ^{p-2}` after eliminating `ζ^{p-1} = -(1 + ζ + … + ζ^{p-2})`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The prime field F_p. Residues are plain `u32` values in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// `a + b * c`, the inner step of every dot product in the crate.
    #[inline]
    pub fn mul_add(&self, a: u32, b: u32, c: u32) -> u32 {
        ((a as u64 + b as u64 * c as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::DivisionByZero(self.p));
        }
        // Fermat: a^(p-2)
        Ok(self.pow(a, self.p as u64 - 2))
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    pub fn elem(&self, v: i64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            p: self.p,
        }
    }
}

/// A single residue together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    p: u32,
}

impl FieldElement {
    pub fn new(value: i64, p: u32) -> Result<Self> {
        Ok(PrimeField::new(p)?.elem(value))
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    /// Multiplicative inverse; fails on zero.
    pub fn inv(&self) -> Result<Self> {
        Ok(Self {
            value: self.field().inv(self.value)?,
            p: self.p,
        })
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self {
            value: self.field().add(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self {
            value: self.field().sub(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        Self {
            value: self.field().mul(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: self.field().neg(self.value),
            p: self.p,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `a · a⁻¹ = 1` in F_p.
pub fn fe_inv(a: FieldElement) -> Result<FieldElement> {
    a.inv()
}

/// The value of the fixed additive character `t ↦ ζ_p^t`.
pub fn zeta_power(t: FieldElement) -> CyclotomicNumber {
    CyclotomicNumber::zeta(t.modulus(), t.value())
}

/// An exact element of Q(ζ_p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    p: u32,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    fn basis_len(p: u32) -> usize {
        (p as usize - 1).max(1)
    }

    pub fn zero(p: u32) -> Self {
        Self {
            p,
            coeffs: vec![BigRational::zero(); Self::basis_len(p)],
        }
    }

    pub fn one(p: u32) -> Self {
        Self::from_rational(p, BigRational::one())
    }

    pub fn from_rational(p: u32, r: BigRational) -> Self {
        let mut z = Self::zero(p);
        z.coeffs[0] = r;
        z
    }

    /// ζ_p^t for any integer exponent.
    pub fn zeta(p: u32, t: u32) -> Self {
        let mut counts = vec![0i64; p as usize];
        counts[(t % p) as usize] = 1;
        Self::from_power_counts(p, &counts, &BigInt::one())
    }

    /// Builds `(Σ_t counts[t] ζ^t) / denom` from a length-`p` vector of
    /// integer multiplicities of each power of ζ.
    pub fn from_power_counts(p: u32, counts: &[i64], denom: &BigInt) -> Self {
        assert_eq!(counts.len(), p as usize, "need one count per power of zeta");
        let top = counts[p as usize - 1];
        let coeffs = if p == 2 {
            // ζ_2 = -1
            vec![BigRational::new(BigInt::from(counts[0] - counts[1]), denom.clone())]
        } else {
            counts[..p as usize - 1]
                .iter()
                .map(|&c| BigRational::new(BigInt::from(c - top), denom.clone()))
                .collect()
        };
        Self { p, coeffs }
    }

    /// Builds a number from reduced power-basis coefficients.
    pub fn from_coeffs(p: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if coeffs.len() != Self::basis_len(p) {
            return Err(Error::Shape(format!(
                "Q(zeta_{p}) needs {} coefficients, got {}",
                Self::basis_len(p),
                coeffs.len()
            )));
        }
        Ok(Self { p, coeffs })
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `Some(r)` when the number lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Coefficients on all p powers of ζ (the last one zero).
    fn expanded(&self) -> Vec<BigRational> {
        if self.p == 2 {
            return vec![self.coeffs[0].clone(), BigRational::zero()];
        }
        let mut v = self.coeffs.clone();
        v.push(BigRational::zero());
        v
    }

    fn reduce_expanded(p: u32, v: Vec<BigRational>) -> Self {
        let top = v[p as usize - 1].clone();
        let coeffs = if p == 2 {
            vec![&v[0] - &top]
        } else {
            v[..p as usize - 1].iter().map(|c| c - &top).collect()
        };
        Self { p, coeffs }
    }

    /// Complex conjugation, ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let p = self.p as usize;
        let v = self.expanded();
        let mut w = vec![BigRational::zero(); p];
        for (t, c) in v.into_iter().enumerate() {
            w[(p - t) % p] = c;
        }
        Self::reduce_expanded(self.p, w)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Floating-point rendering with ζ = e^{2πi/p}; display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, c) in self.coeffs.iter().enumerate() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let angle = if self.p == 2 {
                0.0
            } else {
                2.0 * std::f64::consts::PI * t as f64 / self.p as f64
            };
            re += c * angle.cos();
            im += c * angle.sin();
        }
        (re, im)
    }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: Self) -> CyclotomicNumber {
        assert_eq!(self.p, rhs.p, "cyclotomic modulus mismatch");
        CyclotomicNumber {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: Self) -> CyclotomicNumber {
        assert_eq!(self.p, rhs.p, "cyclotomic modulus mismatch");
        CyclotomicNumber {
            p: self.p,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: Self) -> CyclotomicNumber {
        assert_eq!(self.p, rhs.p, "cyclotomic modulus mismatch");
        let p = self.p as usize;
        let a = self.expanded();
        let b = rhs.expanded();
        let mut w = vec![BigRational::zero(); p];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    w[(i + j) % p] += x * y;
                }
            }
        }
        CyclotomicNumber::reduce_expanded(self.p, w)
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $m(self, rhs: Self) -> CyclotomicNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match t {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if t == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{t}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicJson {
    p: u32,
    coeffs: Vec<(String, String)>,
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CyclotomicJson {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| (c.numer().to_string(), c.denom().to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CyclotomicJson::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|(n, dd)| {
                let n: BigInt = n.parse().map_err(D::Error::custom)?;
                let dd: BigInt = dd.parse().map_err(D::Error::custom)?;
                if dd.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(BigRational::new(n, dd))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CyclotomicNumber::from_coeffs(raw.p, coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn inverses() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.inv(1).unwrap(), 1);
        assert_eq!(f5.inv(2).unwrap(), 3);
        assert_eq!(PrimeField::new(7).unwrap().inv(4).unwrap(), 2);
        assert_eq!(f5.inv(0), Err(Error::DivisionByZero(5)));
        let a = FieldElement::new(4, 7).unwrap();
        assert_eq!(fe_inv(a).unwrap().value(), 2);
        assert!(fe_inv(FieldElement::new(7, 7).unwrap()).is_err());
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn zeta_reduction() {
        assert_eq!(CyclotomicNumber::zeta(5, 0), CyclotomicNumber::one(5));
        let z2 = CyclotomicNumber::zeta(3, 2);
        assert_eq!(z2.coeffs(), &[rat(-1), rat(-1)]);
        let total = (0..5).fold(CyclotomicNumber::zero(5), |acc, t| {
            &acc + &zeta_power(FieldElement::new(t, 5).unwrap())
        });
        assert!(total.is_zero());
    }

    #[test]
    fn character_sum_over_field() {
        for p in [2u32, 3, 5, 7] {
            for alpha in 0..p {
                let s = (0..p).fold(CyclotomicNumber::zero(p), |acc, t| {
                    &acc + &CyclotomicNumber::zeta(p, alpha * t)
                });
                let expected = if alpha == 0 { rat(p as i64) } else { rat(0) };
                assert_eq!(s.as_rational(), Some(expected), "p={p} alpha={alpha}");
            }
        }
    }

    #[test]
    fn display_and_json() {
        let z = CyclotomicNumber::zeta(3, 2);
        assert_eq!(z.to_string(), "-1 - z");
        let json = serde_json::to_string(&z).unwrap();
        assert_eq!(json, r#"{"p":3,"coeffs":[["-1","1"],["-1","1"]]}"#);
        let back: CyclotomicNumber = serde_json::from_str(&json).unwrap();
        assert_eq!(back, z);
        assert!(serde_json::from_str::<CyclotomicNumber>(r#"{"p":5,"coeffs":[["1","1"]]}"#).is_err());
    }

    #[test]
    fn approx_rendering() {
        let (re, im) = CyclotomicNumber::zeta(3, 1).to_complex();
        assert!((re + 0.5).abs() < 1e-12 && (im - 0.75f64.sqrt()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn zeta_is_homomorphism(p in prop::sample::select(vec![2u32, 3, 5, 7, 11]), a in 0u32..50, b in 0u32..50) {
            let lhs = &CyclotomicNumber::zeta(p, a) * &CyclotomicNumber::zeta(p, b);
            prop_assert_eq!(lhs, CyclotomicNumber::zeta(p, a + b));
            prop_assert_eq!(CyclotomicNumber::zeta(p, a).conj(), CyclotomicNumber::zeta(p, (p - a % p) % p));
        }

        #[test]
        fn field_ops_stay_reduced(a in 0u32..7, b in 1u32..7) {
            let f = PrimeField::new(7).unwrap();
            for v in [f.add(a, b), f.sub(a, b), f.mul(a, b), f.neg(a)] {
                prop_assert!(v < 7);
            }
            prop_assert_eq!(f.mul(b, f.inv(b).unwrap()), 1);
        }
    }
}
