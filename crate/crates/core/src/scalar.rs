//! Scalar types tensors range over.
//!
//! Every tensor entry lives in a commutative semiring: addition and
//! multiplication with identities, where multiplication distributes over
//! addition and zero annihilates. Equivalence of scalars is part of the
//! structure because floating-point carriers compare up to a tolerance.

use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::{One, Zero};

/// A commutative semiring with a (possibly toleranced) equivalence test.
///
/// Addition and multiplication come from the `num_traits` `Zero`/`One`
/// bounds; implementors only override [`Semiring::equiv`] when exact
/// `PartialEq` is not the right notion of sameness.
pub trait Semiring:
    Copy + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static + Zero + One
{
    /// Semantic equivalence of two scalars. Exact equality by default.
    fn equiv(&self, other: &Self) -> bool {
        self == other
    }
}

impl Semiring for i64 {}

/// Absolute per-entry tolerance used by the floating-point semirings.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

impl Semiring for f64 {
    fn equiv(&self, other: &Self) -> bool {
        (self - other).abs() <= DEFAULT_TOLERANCE
    }
}

/// Default modulus for the prime-field scalar: a 30-bit prime.
pub const DEFAULT_MODULUS: u64 = 1_000_000_007;

/// An element of the prime field Z_p, stored in canonical form `0 <= x < P`.
///
/// Arithmetic is exact, so randomized identity testing over `Fp` has no
/// tolerance: two tensors are equivalent iff every entry matches.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp<const P: u64 = DEFAULT_MODULUS>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(value: u64) -> Self {
        Fp(value % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn modulus() -> u64 {
        P
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let sum = self.0 + rhs.0;
        Fp(if sum >= P { sum - P } else { sum })
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Semiring for Fp<P> {}

/// Double-precision complex numbers compared with absolute tolerance
/// [`DEFAULT_TOLERANCE`] per entry.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Cx(pub Complex64);

impl Cx {
    pub fn new(re: f64, im: f64) -> Self {
        Cx(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Cx(Complex64::new(re, 0.0))
    }
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx(z)
    }
}

impl Add for Cx {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Cx(self.0 + rhs.0)
    }
}

impl Mul for Cx {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Cx(self.0 * rhs.0)
    }
}

impl Zero for Cx {
    fn zero() -> Self {
        Cx(Complex64::new(0.0, 0.0))
    }
    fn is_zero(&self) -> bool {
        self.0.norm() == 0.0
    }
}

impl One for Cx {
    fn one() -> Self {
        Cx(Complex64::new(1.0, 0.0))
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im == 0.0 {
            write!(f, "{}", self.0.re)
        } else {
            write!(f, "{}{:+}i", self.0.re, self.0.im)
        }
    }
}

impl Semiring for Cx {
    fn equiv(&self, other: &Self) -> bool {
        (self.0 - other.0).norm() <= DEFAULT_TOLERANCE
    }
}
