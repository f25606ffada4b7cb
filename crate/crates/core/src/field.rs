//! Coefficient fields for the symbolic tower: exact rationals for canonical
//! computations and a 61-bit prime field for randomized identity testing.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

/// A field of coefficients. Everything downstream (polynomials, rational
/// functions, difference operators) is generic over this, so the same
/// construction code runs exactly over ℚ and modularly over 𝔽_p.
pub trait Field:
    Clone + PartialEq + Eq + PartialOrd + Ord + std::hash::Hash + fmt::Debug + fmt::Display + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
    /// Image of an arbitrary exact rational in this field.
    fn from_q(x: &BigRational) -> Self;
    /// Exact image of the rational n/d; panics if d maps to zero (cannot
    /// happen for the small denominators used here with a 61-bit prime).
    fn from_ratio(n: i64, d: i64) -> Self {
        let den = Self::from_i64(d);
        Self::from_i64(n).mul(&den.inv().expect("denominator maps to zero"))
    }
    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Exact rational coefficients.
pub type Q = BigRational;

impl Field for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_q(x: &BigRational) -> Self {
        x.clone()
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
}

/// Convenience: the rational n/d as a `Q`.
pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Default prime for randomized identity testing: the Mersenne prime 2^61 − 1.
pub const DEFAULT_PRIME: u64 = (1u64 << 61) - 1;

thread_local! {
    static ACTIVE_PRIME: std::cell::Cell<u64> = const { std::cell::Cell::new(DEFAULT_PRIME) };
}

/// Set the modulus used by `Fp` on the current thread. The CLI reads this
/// from the environment; tests leave the default in place.
pub fn set_prime(p: u64) {
    assert!(p > 1 << 32, "randomized-mode prime must exceed 2^32");
    ACTIVE_PRIME.with(|c| c.set(p));
}

pub fn active_prime() -> u64 {
    ACTIVE_PRIME.with(|c| c.get())
}

/// Element of 𝔽_p for the thread-active prime p (default 2^61 − 1).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fp(pub u64);

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Fp {
    pub fn new(n: u64) -> Self {
        Fp(n % active_prime())
    }

    fn p() -> u64 {
        active_prime()
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        let p = BigInt::from(Self::p());
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        let digits = r.to_u64_digits().1;
        Fp(digits.first().copied().unwrap_or(0))
    }

    pub fn from_q(x: &BigRational) -> Self {
        let num = Self::from_bigint(x.numer());
        let den = Self::from_bigint(x.denom());
        num.mul(&den.inv().expect("rational denominator divisible by the prime"))
    }

    fn pow_u64(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn is_one(&self) -> bool {
        self.0 == 1
    }
    fn add(&self, other: &Self) -> Self {
        let p = Self::p();
        let s = self.0 + other.0;
        Fp(if s >= p { s - p } else { s })
    }
    fn sub(&self, other: &Self) -> Self {
        let p = Self::p();
        Fp(if self.0 >= other.0 {
            self.0 - other.0
        } else {
            self.0 + p - other.0
        })
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(((self.0 as u128 * other.0 as u128) % Self::p() as u128) as u64)
    }
    fn neg(&self) -> Self {
        if self.0 == 0 {
            Fp(0)
        } else {
            Fp(Self::p() - self.0)
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow_u64(Self::p() - 2))
        }
    }
    fn from_i64(n: i64) -> Self {
        let p = Self::p();
        if n >= 0 {
            Fp(n as u64 % p)
        } else {
            Fp(p - ((-n) as u64 % p)).add(&Fp(0))
        }
    }
    fn from_q(x: &BigRational) -> Self {
        Fp::from_q(x)
    }
}
