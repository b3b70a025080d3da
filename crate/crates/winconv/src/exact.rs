//! Exact rational scalars and dense univariate polynomials over them.
//!
//! Everything downstream (transform construction, the exactness oracle)
//! works in this arithmetic; floats only appear when a finished algorithm is
//! lowered for execution. Polynomials are dense coefficient vectors with the
//! constant term first, and the zero polynomial is the empty vector.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact scalar: arbitrary-precision reduced fraction.
pub type Rational = BigRational;

/// Small-integer rational constructor (`rat(-1, 2)` is −1/2).
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "rat: zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer-valued rational.
pub fn rat_int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Parses `"num"` or `"num/den"` with arbitrary precision. Accepts a
/// leading ASCII minus or U+2212 (the typographic minus that creeps in when
/// point lists are copied from documents).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let cleaned = s.trim().replace('\u{2212}', "-");
    let (num_str, den_str) = match cleaned.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (cleaned.as_str(), "1"),
    };
    let num = BigInt::from_str(num_str)
        .map_err(|_| Error::Parse(format!("invalid rational `{s}`")))?;
    let den = BigInt::from_str(den_str)
        .map_err(|_| Error::Parse(format!("invalid rational `{s}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(num, den))
}

/// Renders a rational as `"num"` or `"num/den"` (lossless round trip with
/// [`parse_rational`]).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lowers an exact rational to f64 with a single rounding: numerator and
/// denominator convert exactly while they fit in the 53-bit significand, and
/// one IEEE division rounds to nearest-even. Oversized components fall back
/// to the bignum conversion.
pub fn rational_to_f64(r: &Rational) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    if num.bits() <= 53 && den.bits() <= 53 {
        let n = num.to_f64().expect("small BigInt converts");
        let d = den.to_f64().expect("small BigInt converts");
        n / d
    } else {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

/// Exact conversion of a finite f64 into a rational (every finite double is
/// a dyadic rational). Returns `None` for NaN/±∞.
pub fn f64_to_rational(v: f64) -> Option<Rational> {
    BigRational::from_float(v)
}

/// As [`f64_to_rational`] but for contexts that require finite data,
/// erroring instead of returning `None`.
pub fn finite_rational(v: f64) -> crate::Result<Rational> {
    f64_to_rational(v).ok_or_else(|| {
        crate::Error::InvalidArgument(format!("non-finite value {v} in exact arithmetic"))
    })
}

/// Dense univariate polynomial over [`Rational`]; `coeffs[i]` multiplies
/// `a^i`. Invariant: no trailing zero coefficient (zero polynomial = empty).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    /// `coeff * a^degree`.
    pub fn monomial(degree: usize, coeff: Rational) -> Self {
        if coeff.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = coeff;
        Polynomial { coeffs }
    }

    /// The linear modulus `a − p` for a root point `p`.
    pub fn from_root(p: &Rational) -> Self {
        Polynomial::new(vec![-p.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `a^i`, zero-padded beyond the stored length.
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff().is_some_and(|c| c.is_one())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|k| k * c).collect())
    }

    /// Monic normalization (zero polynomial stays zero).
    pub fn make_monic(&self) -> Self {
        match self.leading_coeff() {
            Some(lc) if !lc.is_one() => self.scale(&lc.recip()),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Polynomial {
    /// Human-readable descending form, e.g. `a^2 - 1/2*a + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_str = format_rational(&mag);
            match i {
                0 => write!(f, "{coeff_str}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{coeff_str}*")?;
                    }
                    if i == 1 {
                        write!(f, "a")?;
                    } else {
                        write!(f, "a^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn poly_add(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let n = p.coeffs.len().max(q.coeffs.len());
    Polynomial::new((0..n).map(|i| p.coeff(i) + q.coeff(i)).collect())
}

pub fn poly_sub(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let n = p.coeffs.len().max(q.coeffs.len());
    Polynomial::new((0..n).map(|i| p.coeff(i) - q.coeff(i)).collect())
}

pub fn poly_neg(p: &Polynomial) -> Polynomial {
    Polynomial::new(p.coeffs.iter().map(|c| -c.clone()).collect())
}

/// Schoolbook product; the coefficient vector of the result is exactly the
/// linear convolution of the operand coefficient vectors.
pub fn poly_mul(p: &Polynomial, q: &Polynomial) -> Polynomial {
    if p.is_zero() || q.is_zero() {
        return Polynomial::zero();
    }
    let mut out = vec![Rational::zero(); p.coeffs.len() + q.coeffs.len() - 1];
    for (i, a) in p.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q.coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    Polynomial::new(out)
}

/// Euclidean division: returns `(quotient, remainder)` with
/// `p = quotient·m + remainder` and `deg(remainder) < deg(m)`.
/// The remainder is the residue `R_m[p]`.
pub fn poly_divmod(p: &Polynomial, m: &Polynomial) -> Result<(Polynomial, Polynomial)> {
    let Some(dm) = m.degree() else {
        return Err(Error::InvalidArgument(
            "polynomial division by zero".into(),
        ));
    };
    let lc_inv = m.leading_coeff().expect("nonzero divisor").recip();
    let mut rem = p.coeffs.clone();
    if rem.len() <= dm {
        return Ok((Polynomial::zero(), p.clone()));
    }
    let mut quot = vec![Rational::zero(); rem.len() - dm];
    for k in (dm..rem.len()).rev() {
        let q = &rem[k] * &lc_inv;
        if q.is_zero() {
            continue;
        }
        for (i, mc) in m.coeffs.iter().enumerate() {
            let idx = k - dm + i;
            let delta = mc * &q;
            rem[idx] -= delta;
        }
        quot[k - dm] = q;
    }
    rem.truncate(dm);
    Ok((Polynomial::new(quot), Polynomial::new(rem)))
}

/// Monic greatest common divisor (Euclid). `gcd(0, 0)` is the zero
/// polynomial by convention.
pub fn poly_gcd(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let mut a = p.clone();
    let mut b = q.clone();
    while !b.is_zero() {
        let (_, r) = poly_divmod(&a, &b).expect("nonzero divisor in gcd loop");
        a = std::mem::replace(&mut b, r);
    }
    a.make_monic()
}

/// Extended Euclid for the Bezout pair of the CRT: given coprime `m` and
/// `M`, returns `(N, n)` with `N·M + n·m = 1`, normalized so that
/// `deg(N) < deg(m)` (and consequently `deg(n) < deg(M)`).
pub fn ext_euclid(m: &Polynomial, big_m: &Polynomial) -> Result<(Polynomial, Polynomial)> {
    if m.is_zero() || big_m.is_zero() {
        return Err(Error::InvalidArgument(
            "ext_euclid requires nonzero polynomials".into(),
        ));
    }
    // Track r_i = s_i·M + t_i·m through the Euclidean remainder sequence.
    let (mut r0, mut s0) = (big_m.clone(), Polynomial::one());
    let (mut r1, mut s1) = (m.clone(), Polynomial::zero());
    while !r1.is_zero() {
        let (q, r) = poly_divmod(&r0, &r1)?;
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if r0.degree() != Some(0) {
        return Err(Error::InvalidArgument(format!(
            "ext_euclid: not coprime (gcd = {})",
            r0.make_monic()
        )));
    }
    let g = r0.coeff(0);
    // r0 = s0·M + t0·m, so N = s0/g modulo m gives the canonical residue.
    let (_, n_cap) = poly_divmod(&s0.scale(&g.recip()), m)?;
    // Recover n = (1 − N·M)/m exactly.
    let numer = poly_sub(&Polynomial::one(), &poly_mul(&n_cap, big_m));
    let (n_low, check) = poly_divmod(&numer, m)?;
    debug_assert!(check.is_zero(), "Bezout residual must divide exactly");
    Ok((n_cap, n_low))
}

/// Coefficient vector, constant term first, zero-padded to `length`.
/// Errors unless `length > deg(p)` (the zero polynomial pads to any length).
pub fn vec_coeffs(p: &Polynomial, length: usize) -> Result<Vec<Rational>> {
    if let Some(d) = p.degree() {
        if length <= d {
            return Err(Error::InvalidArgument(format!(
                "vec length {length} cannot hold degree-{d} polynomial"
            )));
        }
    }
    Ok((0..length).map(|i| p.coeff(i)).collect())
}
