//! Finite groups as multiplication tables, and the group-side operations
//! feeding the construction: convolution of measures, the comultiplication
//! `(Δf)(p, q) = f(pq)` and the involution `f(p) ↦ f(p⁻¹)`.
//!
//! Elements are indices `0..order`. Haar measure on a finite group is the
//! counting measure.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{szero, Scalar};

/// A validated finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    mult: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    /// Validates a raw multiplication table, where `raw[p][q]` is the index
    /// of `pq`, and computes the identity and inverses.
    pub fn validate(raw: &[Vec<i64>]) -> Result<Self> {
        let order = raw.len();
        if order == 0 {
            return Err(Error::NoIdentity);
        }
        for (row, entries) in raw.iter().enumerate() {
            if entries.len() != order {
                return Err(Error::NotSquare {
                    row,
                    len: entries.len(),
                    expected: order,
                });
            }
        }
        let mut mult = Vec::with_capacity(order * order);
        for (row, entries) in raw.iter().enumerate() {
            for (col, &value) in entries.iter().enumerate() {
                if value < 0 || value as usize >= order {
                    return Err(Error::NotClosed {
                        row,
                        col,
                        value,
                        order,
                    });
                }
                mult.push(value as usize);
            }
        }
        let at = |p: usize, q: usize| mult[p * order + q];
        let identity = (0..order)
            .find(|&e| (0..order).all(|p| at(e, p) == p && at(p, e) == p))
            .ok_or(Error::NoIdentity)?;
        let mut inverse = Vec::with_capacity(order);
        for p in 0..order {
            let inv = (0..order)
                .find(|&q| at(p, q) == identity && at(q, p) == identity)
                .ok_or(Error::NoInverse(p))?;
            inverse.push(inv);
        }
        for p in 0..order {
            for q in 0..order {
                let pq = at(p, q);
                for r in 0..order {
                    if at(pq, r) != at(p, at(q, r)) {
                        return Err(Error::NotAssociative(p, q, r));
                    }
                }
            }
        }
        Ok(GroupTable {
            order,
            mult,
            identity,
            inverse,
        })
    }

    /// Builds a table from a product closure on `0..order`, then validates it.
    pub fn from_fn(order: usize, product: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let raw: Vec<Vec<i64>> = (0..order)
            .map(|p| (0..order).map(|q| product(p, q) as i64).collect())
            .collect();
        Self::validate(&raw)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, p: usize, q: usize) -> usize {
        self.mult[p * self.order + q]
    }

    #[inline]
    pub fn inv(&self, p: usize) -> usize {
        self.inverse[p]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverse
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.mult.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|p| (0..self.order).all(|q| self.mul(p, q) == self.mul(q, p)))
    }

    /// Convolution of measures, `(μ*ν)({r}) = Σ_{pq=r} μ({p}) ν({q})`.
    pub fn convolve(&self, mu: &MeasureVector, nu: &MeasureVector) -> Result<MeasureVector> {
        let carrier = Carrier::Group(self.order);
        mu.expect_carrier(carrier)?;
        nu.expect_carrier(carrier)?;
        let mut out = vec![szero(); self.order];
        for (p, a) in mu.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (q, b) in nu.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let r = self.mul(p, q);
                out[r] = &out[r] + a * b;
            }
        }
        Ok(MeasureVector::new(carrier, out))
    }

    /// The comultiplication: `out[p][q] = f[pq]`.
    pub fn comult(&self, f: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
        self.check_len(f)?;
        Ok((0..self.order)
            .map(|p| (0..self.order).map(|q| f[self.mul(p, q)].clone()).collect())
            .collect())
    }

    /// The involution `f̌(p) = f(p⁻¹)`.
    pub fn check(&self, f: &[Scalar]) -> Result<Vec<Scalar>> {
        self.check_len(f)?;
        Ok(self.inverse.iter().map(|&i| f[i].clone()).collect())
    }

    /// Point mass at `p`.
    pub fn dirac(&self, p: usize) -> MeasureVector {
        MeasureVector::dirac(Carrier::Group(self.order), p)
    }

    fn check_len<T>(&self, f: &[T]) -> Result<()> {
        if f.len() != self.order {
            return Err(Error::LengthMismatch {
                expected: self.order,
                got: f.len(),
            });
        }
        Ok(())
    }
}

/// Which finite space a measure lives on. Sizes are part of the tag so that
/// measures over different groups cannot be mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carrier {
    Group(usize),
    Hypergroup(usize),
    /// `Q × Q`, indexed `s * size + t`.
    HypergroupSquare(usize),
}

impl Carrier {
    pub fn points(self) -> usize {
        match self {
            Carrier::Group(n) | Carrier::Hypergroup(n) => n,
            Carrier::HypergroupSquare(n) => n * n,
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::Group(n) => write!(f, "G[{n}]"),
            Carrier::Hypergroup(n) => write!(f, "Q[{n}]"),
            Carrier::HypergroupSquare(n) => write!(f, "QxQ[{n}]"),
        }
    }
}

/// A finitely supported complex measure, one coefficient per point.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureVector {
    pub carrier: Carrier,
    pub coeffs: Vec<Scalar>,
}

impl MeasureVector {
    /// # Panics
    /// If the coefficient count differs from the carrier's point count.
    pub fn new(carrier: Carrier, coeffs: Vec<Scalar>) -> Self {
        assert_eq!(
            coeffs.len(),
            carrier.points(),
            "measure length must match carrier"
        );
        MeasureVector { carrier, coeffs }
    }

    pub fn try_new(carrier: Carrier, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.len() != carrier.points() {
            return Err(Error::LengthMismatch {
                expected: carrier.points(),
                got: coeffs.len(),
            });
        }
        Ok(MeasureVector { carrier, coeffs })
    }

    pub fn dirac(carrier: Carrier, at: usize) -> Self {
        MeasureVector::new(carrier, crate::scalar::indicator(carrier.points(), at))
    }

    pub fn uniform(carrier: Carrier) -> Self {
        let n = carrier.points();
        let w = crate::scalar::real(crate::scalar::rat(1, n as i64));
        MeasureVector::new(carrier, vec![w; n])
    }

    pub fn total_mass(&self) -> Scalar {
        self.coeffs.iter().fold(szero(), |acc, c| acc + c)
    }

    /// True for a nonnegative real measure of total mass exactly one.
    pub fn is_probability(&self) -> bool {
        self.coeffs.iter().all(crate::scalar::is_real_nonneg)
            && self.total_mass() == crate::scalar::sone()
    }

    pub fn expect_carrier(&self, carrier: Carrier) -> Result<()> {
        if self.carrier != carrier {
            return Err(Error::CarrierMismatch {
                left: self.carrier.to_string(),
                right: carrier.to_string(),
            });
        }
        Ok(())
    }
}
