//! Exact scalars and the small amount of rational linear algebra the
//! verifiers need.
//!
//! Structure constants, expectation weights and Haar weights are
//! [`Rational`]. Function and measure coefficients are [`Scalar`], a complex
//! number with rational real and imaginary parts, so conjugation and the
//! positivity inequalities can be tested without tolerances.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Scalar = Complex<Rational>;
pub type C64 = Complex<f64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn real(r: Rational) -> Scalar {
    Complex::new(r, Rational::zero())
}

pub fn sint(n: i64) -> Scalar {
    real(int(n))
}

pub fn szero() -> Scalar {
    Complex::new(Rational::zero(), Rational::zero())
}

pub fn sone() -> Scalar {
    Complex::new(Rational::one(), Rational::zero())
}

pub fn indicator(len: usize, at: usize) -> Vec<Scalar> {
    (0..len)
        .map(|i| if i == at { sone() } else { szero() })
        .collect()
}

/// Real scalar `r`.
pub fn scale(z: &Scalar, r: &Rational) -> Scalar {
    Complex::new(&z.re * r, &z.im * r)
}

pub fn norm_sqr(z: &Scalar) -> Rational {
    &z.re * &z.re + &z.im * &z.im
}

pub fn is_real_nonneg(z: &Scalar) -> bool {
    z.im.is_zero() && !z.re.is_negative()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn to_c64(z: &Scalar) -> C64 {
    C64::new(to_f64(&z.re), to_f64(&z.im))
}

/// Parses `"p/q"`, `"p"` or a plain JSON integer rendered as text.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let r = Rational::from_str(t).map_err(|_| Error::Parse(format!("not a rational: `{s}`")))?;
    Ok(r)
}

/// Renders `p/q` in lowest terms, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Best rational approximation with denominator at most `max_den`, accepted
/// only when within `tol` of `x`.
pub fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    // Stern-Brocot style continued fraction expansion.
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
            return Some(rat(h1, k1));
        }
        let rem = frac - a;
        if rem.abs() < 1e-300 {
            break;
        }
        frac = 1.0 / rem;
    }
    if k1 != 0 && ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
        Some(rat(h1, k1))
    } else {
        None
    }
}

/// Uniform rational in `[-bound, bound]` with denominator in `1..=max_den`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-bound * den..=bound * den);
    rat(num, den)
}

pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, bound: i64, max_den: i64) -> Scalar {
    Complex::new(
        random_rational(rng, bound, max_den),
        random_rational(rng, bound, max_den),
    )
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Scalar> {
    (0..len).map(|_| random_scalar(rng, 3, 4)).collect()
}

pub fn random_real_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<Scalar> {
    (0..len).map(|_| real(random_rational(rng, 3, 4))).collect()
}

/// Basis of the right null space of `rows` (each of length `ncols`), by
/// reduction to row echelon form over the rationals.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                    if !y.is_zero() {
                        *x = &*x - &factor * y;
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); ncols];
            v[fc] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][fc].clone();
            }
            v
        })
        .collect()
}

/// Rank of a list of vectors over the rationals.
pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    ncols - nullspace(rows, ncols).len()
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}
