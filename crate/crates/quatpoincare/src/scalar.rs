//! Exact scalar types: rationals and Gaussian rationals.
//!
//! Every coefficient in this crate is an element of Q or Q(i). No floating
//! point anywhere; equality is decidable and all residual checks demand
//! exact zero.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator (num-rational maintains both invariants).
pub type Rational = BigRational;

/// Element of Q(i), used by the twistor layer.
pub type GaussianRational = Complex<Rational>;

/// `n/d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as a [`Rational`].
pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `re + im*i` as a [`GaussianRational`].
pub fn gauss(re: Rational, im: Rational) -> GaussianRational {
    Complex::new(re, im)
}

/// Real rational embedded into Q(i).
pub fn gauss_re(re: Rational) -> GaussianRational {
    Complex::new(re, Rational::zero())
}

/// Common scalar interface for the dense linear algebra kernels.
///
/// Implemented for exactly two types: `Rational` and `GaussianRational`.
/// `pivot_size` is the magnitude used for pivot selection during
/// elimination (magnitude of the numerator once the row has been cleared
/// of denominators); ties are broken by row order, which keeps every
/// elimination deterministic across runs and platforms.
pub trait Scalar:
    Clone
    + PartialEq
    + std::fmt::Debug
    + std::fmt::Display
    + Zero
    + One
    + std::ops::Neg<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Div<Output = Self>
{
    fn conj(&self) -> Self;
    fn pivot_size(&self) -> BigUint;
    fn from_rational(r: &Rational) -> Self;
}

impl Scalar for Rational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn pivot_size(&self) -> BigUint {
        self.numer().abs().to_biguint().unwrap()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for GaussianRational {
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn pivot_size(&self) -> BigUint {
        (self.re.numer().abs() + self.im.numer().abs())
            .to_biguint()
            .unwrap()
    }

    fn from_rational(r: &Rational) -> Self {
        gauss_re(r.clone())
    }
}

/// Canonical `"num/den"` rendering used by every serialized document.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses the `"num/den"` form accepted by documents and CLI flags; a bare
/// integer is read as `n/1`.
pub fn rational_from_str(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| format!("invalid rational numerator: {s:?}"))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| format!("invalid rational denominator: {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in rational: {s:?}"));
    }
    Ok(Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_string_round_trip() {
        for r in [rat(1, 2), rat(-3, 4), rint(0), rint(7)] {
            let s = rational_to_string(&r);
            assert_eq!(rational_from_str(&s).unwrap(), r);
        }
        assert_eq!(rational_from_str("5").unwrap(), rint(5));
        assert_eq!(rational_from_str("-2/4").unwrap(), rat(-1, 2));
        assert!(rational_from_str("1/0").is_err());
        assert!(rational_from_str("x").is_err());
    }

    #[test]
    fn gaussian_conj_involution() {
        let z = gauss(rat(1, 3), rat(-2, 5));
        assert_eq!(Scalar::conj(&Scalar::conj(&z)), z);
        let w = gauss(rat(2, 1), rat(1, 7));
        // field sanity: (z*w)/w == z
        let prod = z.clone() * w.clone();
        assert_eq!(prod / w, z);
    }
}
