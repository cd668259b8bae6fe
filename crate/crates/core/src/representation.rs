//! Regular representations of a finite hypergroup on `ℓ²(Q, m̃)`.
//!
//! Operators are stored as exact matrices together with the weights of the
//! inner product they act on, so adjoints are `W⁻¹ M^H W` with
//! `W = diag(weights)`. The hat form `W^{1/2} M W^{-1/2}` turns that adjoint
//! into the ordinary conjugate transpose and is what the spectral routines
//! consume.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergroup::HypergroupTable;
use crate::numeric::{cluster, hermitian_eigen, spectral_norm, CMat};
use crate::report::Report;
use crate::scalar::{
    rational_sqrt, rationalize, real, scale, szero, to_c64, to_f64, Rational, Scalar, C64,
};

pub const PSD_TOLERANCE: f64 = 1e-9;
pub const SEPARATION_TOLERANCE: f64 = 1e-7;
const CHARACTER_ATTEMPTS: usize = 8;
const CHARACTER_SEED: u64 = 0x6368_6172;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: Vec<Scalar>,
    inner_weights: Vec<Rational>,
}

impl OperatorMatrix {
    pub fn new(rows: Vec<Vec<Scalar>>, inner_weights: Vec<Rational>) -> Result<Self> {
        let dim = rows.len();
        if inner_weights.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{dim} rows but {} weights",
                inner_weights.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!("row {bad} is not of length {dim}")));
        }
        Ok(OperatorMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
            inner_weights,
        })
    }

    fn from_fn(inner_weights: Vec<Rational>, f: impl Fn(usize, usize) -> Scalar) -> Self {
        let dim = inner_weights.len();
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        OperatorMatrix {
            dim,
            entries,
            inner_weights,
        }
    }

    pub fn identity(inner_weights: Vec<Rational>) -> Self {
        Self::from_fn(inner_weights, |i, j| if i == j { real(Rational::one()) } else { szero() })
    }

    pub fn zero(inner_weights: Vec<Rational>) -> Self {
        Self::from_fn(inner_weights, |_, _| szero())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inner_weights(&self) -> &[Rational] {
        &self.inner_weights
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.entries.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect()
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.inner_weights != other.inner_weights {
            return Err(Error::DimensionMismatch(format!(
                "operators on different spaces ({} and {})",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let n = self.dim;
        let mut out = vec![szero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out[i * n + j] = &out[i * n + j] + a * b;
                    }
                }
            }
        }
        Ok(OperatorMatrix {
            dim: n,
            entries: out,
            inner_weights: self.inner_weights.clone(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(OperatorMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
            inner_weights: self.inner_weights.clone(),
        })
    }

    pub fn scaled(&self, z: &Scalar) -> Self {
        OperatorMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * z).collect(),
            inner_weights: self.inner_weights.clone(),
        }
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| {
                (0..self.dim).fold(szero(), |acc, j| {
                    let a = self.get(i, j);
                    if a.is_zero() || v[j].is_zero() {
                        acc
                    } else {
                        acc + a * &v[j]
                    }
                })
            })
            .collect())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.inner_weights.clone(), |i, j| self.get(j, i).conj())
    }

    /// Adjoint for `⟨x, y⟩ = Σ_i w_i x_i conj(y_i)`: `W⁻¹ M^H W`.
    pub fn adjoint(&self) -> Self {
        let w = &self.inner_weights;
        Self::from_fn(w.clone(), |i, j| scale(&self.get(j, i).conj(), &(&w[j] / &w[i])))
    }

    /// Kronecker product, acting on the tensor product space with product
    /// weights.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let weights = (0..n * m)
            .map(|k| &self.inner_weights[k / m] * &other.inner_weights[k % m])
            .collect();
        Self::from_fn(weights, |i, j| {
            let a = self.get(i / m, j / m);
            if a.is_zero() {
                szero()
            } else {
                a * other.get(i % m, j % m)
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.is_zero())
    }

    pub fn to_c64(&self) -> DMatrix<C64> {
        CMat::from_fn(self.dim, self.dim, |i, j| to_c64(self.get(i, j)))
    }

    /// `W^{1/2} M W^{-1/2}`, unitarily equivalent to `M` on the weighted space.
    pub fn hat(&self) -> DMatrix<C64> {
        let root: Vec<f64> = self.inner_weights.iter().map(|w| to_f64(w).sqrt()).collect();
        CMat::from_fn(self.dim, self.dim, |i, j| to_c64(self.get(i, j)) * (root[i] / root[j]))
    }

    /// Operator norm on the weighted space.
    pub fn op_norm(&self) -> f64 {
        spectral_norm(&self.hat())
    }

    /// Entries as `[re, im]` pairs for serialization.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let z = to_c64(self.get(i, j));
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }
}

/// `(L_s f)(t) = Σ_r c[š][t][r] f(r)`, one operator per point.
pub fn left_regular(h: &HypergroupTable) -> Vec<OperatorMatrix> {
    let w = h.haar().to_vec();
    (0..h.size())
        .map(|s| OperatorMatrix::from_fn(w.clone(), |t, r| real(h.c(h.inv(s), t, r).clone())))
        .collect()
}

/// `(R_s f)(t) = κ(s)^{1/2} Σ_r c[t][s][r] f(r)`. Exact arithmetic needs
/// each `κ(s)` to be the square of a rational.
pub fn right_regular(h: &HypergroupTable) -> Result<Vec<OperatorMatrix>> {
    let w = h.haar().to_vec();
    (0..h.size())
        .map(|s| {
            let root = rational_sqrt(&h.modular()[s]).ok_or(Error::NonSquareModular(s))?;
            Ok(OperatorMatrix::from_fn(w.clone(), |t, r| real(h.c(t, s, r) * &root)))
        })
        .collect()
}

/// Checks that `pi` is a `*`-representation of the hypergroup: unit,
/// adjoint against the stored weights, and the product rule
/// `π(s)π(t) = Σ_r c[s][t][r] π(r)`.
pub fn verify_representation(pi: &[OperatorMatrix], h: &HypergroupTable) -> Result<Report> {
    let n = h.size();
    if pi.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} operators for {n} points",
            pi.len()
        )));
    }
    if let Some(bad) = pi.iter().position(|p| p.inner_weights != pi[0].inner_weights) {
        return Err(Error::DimensionMismatch(format!("operator {bad} acts on a different space")));
    }
    let mut report = Report::new("representation conditions (i)-(iii)");
    let id = OperatorMatrix::identity(pi[0].inner_weights.clone());
    report.record(
        "(i) unit",
        (pi[h.identity()] != id).then(|| format!("pi({}) is not the identity", h.identity())),
    );
    let w = (0..n)
        .find(|&s| pi[s].adjoint() != pi[h.inv(s)])
        .map(|s| format!("s = {s}"));
    report.record("(ii) adjoint", w);
    let mut w = None;
    'outer: for s in 0..n {
        for t in 0..n {
            let lhs = pi[s].mul(&pi[t])?;
            let mut rhs = OperatorMatrix::zero(pi[0].inner_weights.clone());
            for (r, c) in h.product(s, t).iter().enumerate() {
                if !c.is_zero() {
                    rhs = rhs.add(&pi[r].scaled(&real(c.clone())))?;
                }
            }
            if lhs != rhs {
                w = Some(format!("(s,t) = ({s},{t})"));
                break 'outer;
            }
        }
    }
    report.record("(iii) product rule", w);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositiveDefiniteResult {
    pub is_pd: bool,
    pub hermitian: bool,
    pub min_eigenvalue: f64,
    pub norm: f64,
}

/// The kernel matrix `M[i][j] = Σ_r c[p_i][p̌_j][r] φ(r)`, exact.
pub fn pd_kernel(phi: &[Scalar], h: &HypergroupTable) -> Result<Vec<Vec<Scalar>>> {
    if phi.len() != h.size() {
        return Err(Error::LengthMismatch {
            expected: h.size(),
            got: phi.len(),
        });
    }
    let n = h.size();
    Ok((0..n)
        .map(|i| (0..n).map(|j| h.pair(i, h.inv(j), phi)).collect())
        .collect())
}

pub fn positive_definite_check(phi: &[Scalar], h: &HypergroupTable) -> Result<PositiveDefiniteResult> {
    positive_definite_check_with(phi, h, PSD_TOLERANCE)
}

/// `φ` is positive definite when its kernel matrix is Hermitian and has
/// no eigenvalue below `-tol·‖M‖`.
pub fn positive_definite_check_with(
    phi: &[Scalar],
    h: &HypergroupTable,
    tol: f64,
) -> Result<PositiveDefiniteResult> {
    let m = pd_kernel(phi, h)?;
    let n = h.size();
    let hermitian = (0..n).all(|i| (0..n).all(|j| m[i][j] == m[j][i].conj()));
    let mat = CMat::from_fn(n, n, |i, j| to_c64(&m[i][j]));
    let norm = spectral_norm(&mat);
    let min_eigenvalue = if hermitian {
        hermitian_eigen(&mat).0[0]
    } else {
        f64::NAN
    };
    Ok(PositiveDefiniteResult {
        is_pd: hermitian && min_eigenvalue >= -tol * norm.max(1e-300),
        hermitian,
        min_eigenvalue,
        norm,
    })
}

/// A multiplicative function `χ` on a commutative hypergroup with
/// `χ(ẽ) = 1`. `exact` holds a rational form when one was found and
/// verified exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Character {
    pub values: Vec<C64>,
    pub exact: Option<Vec<Scalar>>,
}

impl Character {
    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|z| (z - C64::new(1.0, 0.0)).norm() < 1e-9)
    }

    /// Largest deviation from `Σ_r c[s][t][r]χ(r) = χ(s)χ(t)`.
    pub fn multiplicativity_defect(&self, h: &HypergroupTable) -> f64 {
        let n = h.size();
        let mut worst: f64 = 0.0;
        for s in 0..n {
            for t in 0..n {
                let lhs: C64 = h
                    .product(s, t)
                    .iter()
                    .zip(&self.values)
                    .map(|(c, v)| v * to_f64(c))
                    .sum();
                worst = worst.max((lhs - self.values[s] * self.values[t]).norm());
            }
        }
        worst
    }
}

fn exact_multiplicative(chi: &[Scalar], h: &HypergroupTable) -> bool {
    let n = h.size();
    chi[h.identity()] == real(Rational::one())
        && (0..n).all(|s| (0..n).all(|t| h.pair(s, t, chi) == &chi[s] * &chi[t]))
}

fn rationalize_character(values: &[C64], h: &HypergroupTable) -> Option<Vec<Scalar>> {
    let chi: Option<Vec<Scalar>> = values
        .iter()
        .map(|z| Some(Complex::new(rationalize(z.re, 1000, 1e-9)?, rationalize(z.im, 1000, 1e-9)?)))
        .collect();
    chi.filter(|c| exact_multiplicative(c, h))
}

/// Characters of a commutative hypergroup, found as the joint eigenvectors
/// of the left regular operators. A random complex combination
/// `Σ_s (α_s L̂_s + conj(α_s) L̂_s^H)` has simple spectrum for almost every
/// `α`; up to eight combinations are tried. The trivial character comes
/// first.
pub fn characters(h: &HypergroupTable) -> Result<Vec<Character>> {
    if let Some((s, t)) = h.commutativity_witness() {
        return Err(Error::NotCommutative(s, t));
    }
    let n = h.size();
    let hats: Vec<CMat> = left_regular(h).iter().map(|l| l.hat()).collect();
    let root: Vec<f64> = h.haar().iter().map(|w| to_f64(w).sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(CHARACTER_SEED);
    let mut smallest_gap_count = 0;
    for _ in 0..CHARACTER_ATTEMPTS {
        let mut z = CMat::zeros(n, n);
        for l in &hats {
            let a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            z += l * a + l.adjoint() * a.conj();
        }
        let (values, vectors) = hermitian_eigen(&z);
        let scale_tol = SEPARATION_TOLERANCE * spectral_norm(&z).max(1.0);
        let clusters = cluster(&values, scale_tol);
        if clusters.len() != n {
            smallest_gap_count = n - clusters.len();
            continue;
        }
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let f: Vec<C64> = (0..n).map(|i| vectors[(i, k)] / root[i]).collect();
            let e = f[h.identity()];
            if e.norm() < 1e-12 {
                return Err(Error::DegenerateSpectrum(k));
            }
            let values: Vec<C64> = f.iter().map(|v| v / e).collect();
            let exact = rationalize_character(&values, h);
            out.push(Character { values, exact });
        }
        out.sort_by(|a, b| {
            b.is_trivial().cmp(&a.is_trivial()).then_with(|| {
                let key = |c: &Character| -> Vec<(i64, i64)> {
                    c.values
                        .iter()
                        .map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64))
                        .collect()
                };
                key(b).cmp(&key(a))
            })
        });
        return Ok(out);
    }
    Err(Error::DegenerateSpectrum(smallest_gap_count))
}
