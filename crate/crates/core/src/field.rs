//! Scalar arithmetic for the exact linear algebra layer.
//!
//! Every decision procedure in this crate runs over an exact field. The
//! [`Field`] trait abstracts the handful of operations the elimination and
//! subspace code needs, so the same algorithms run unchanged over
//! arbitrary-precision rationals (the default) and over small prime fields,
//! which the exhaustive cross-checking harness uses to enumerate entire
//! subspace lattices.

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Zero};
use std::fmt::{Debug, Display};

/// Exact rational scalar used on the default decision path.
///
/// Kept in lowest terms with a positive denominator by construction.
pub type Rat = BigRational;

/// An exact field. Implementations must have decidable equality; the
/// elimination routines rely on `is_zero` being exact, never approximate.
pub trait Field: Clone + PartialEq + Eq + Debug + Display + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    /// Embeds an exact rational. `None` when the denominator has no inverse
    /// (a prime-field denominator divisible by the characteristic).
    fn from_rational(r: &Rat) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse. Panics on zero; elimination only inverts pivots.
    fn inv(&self) -> Self;
}

impl Field for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }

    fn one() -> Self {
        <Rat as One>::one()
    }

    fn from_int(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rat) -> Option<Self> {
        Some(r.clone())
    }

    fn is_zero(&self) -> bool {
        <Rat as Zero>::is_zero(self)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn inv(&self) -> Self {
        self.recip()
    }
}

/// Prime field of order `P`. `P` must be prime; the inverse uses Fermat's
/// little theorem and is wrong for composite moduli.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Gf<const P: u64>(u64);

impl<const P: u64> Gf<P> {
    pub fn new(v: i64) -> Self {
        let p = P as i64;
        Gf(((v % p + p) % p) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= P;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            exp >>= 1;
        }
        acc
    }
}

impl<const P: u64> Display for Gf<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Field for Gf<P> {
    fn zero() -> Self {
        Gf(0)
    }

    fn one() -> Self {
        Gf(1 % P)
    }

    fn from_int(v: i64) -> Self {
        Gf::new(v)
    }

    fn from_rational(r: &Rat) -> Option<Self> {
        let p = BigInt::from(P);
        let num = r.numer().mod_floor(&p);
        let den = r.denom().mod_floor(&p);
        let num = u64::try_from(num).expect("residue fits in u64");
        let den = u64::try_from(den).expect("residue fits in u64");
        if den == 0 {
            return None;
        }
        Some(Gf(num).mul(&Gf(den).inv()))
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    fn add(&self, rhs: &Self) -> Self {
        Gf((self.0 + rhs.0) % P)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Gf((self.0 + P - rhs.0) % P)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Gf(self.0 * rhs.0 % P)
    }

    fn neg(&self) -> Self {
        Gf((P - self.0) % P)
    }

    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        Gf(Self::pow(self.0, P - 2))
    }
}

/// Parses an exact rational from its textual forms: an integer (`"-3"`), a
/// fraction `"p/q"` with `q > 0`, or a terminating decimal (`"2.25"`).
/// Exponent notation and non-terminating representations are rejected.
pub fn parse_rational(text: &str) -> Result<Rat, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty rational literal".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if den <= BigInt::zero() {
            return Err(format!("denominator must be positive in {s:?}"));
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let (negative, whole_digits) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        let digits_ok = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !digits_ok(frac) || !(whole_digits.is_empty() || digits_ok(whole_digits)) {
            return Err(format!("bad decimal literal {s:?}"));
        }
        let whole_val: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().expect("digits")
        };
        let frac_val: BigInt = frac.parse().expect("digits");
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let magnitude = Rat::from_integer(whole_val) + Rat::new(frac_val, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let int: BigInt = s
        .parse()
        .map_err(|_| format!("bad integer literal {s:?}"))?;
    Ok(Rat::from_integer(int))
}
