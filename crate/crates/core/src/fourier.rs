//! The diagonal map, complete positivity of `Φ = (λ ⊗ λ) ∘ δ`, and the
//! reduced Fourier–Stieltjes norm.
//!
//! # Complete positivity from one matrix
//!
//! `Φ` is completely positive when `Σ_{i,j} ⟨Φ(b_i⋆ * b_j) ξ_j, ξ_i⟩ ≥ 0` for
//! every finite family `b_1..b_k` in `L₁(Q, m̃)` and vectors `ξ_i`. Writing
//! each `b_i` in the point-mass basis `{b_s = 1_s / m̃(s)}` turns the family
//! into a coefficient matrix `A`, and the form for the family becomes the
//! form of the basis block matrix `T = [Φ(b_s⋆ * b_t)]_{s,t}` evaluated at
//! `(A ⊗ I)ξ`. So `T ⪰ 0` for the inner product of `⊕ ℓ²(Q×Q, m̃⊗m̃)`
//! certifies complete positivity, and `T` has dimension `|Q|³`.
//!
//! # Norms
//!
//! A function `a` on `Q` defines the functional `Σ_s μ_s L_s ↦ Σ_s μ_s a(s)`
//! on the matrix algebra spanned by the left regular operators. After a
//! block decomposition `⊕_k M_{n_k}` the functional is
//! `X ↦ Σ_k tr(ρ_k X_k)`, and its norm against the operator norm is
//! `Σ_k ‖ρ_k‖₁`.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Carrier, MeasureVector};
use crate::hypergroup::HypergroupTable;
use crate::numeric::{cluster, column_span_dim, hermitian_eigen, psd_kernel, spectral_norm, trace_norm, CMat};
use crate::report::Report;
use crate::representation::{left_regular, positive_definite_check_with, OperatorMatrix, PSD_TOLERANCE};
use crate::scalar::{indicator, norm_sqr, random_vector, real, scale, szero, to_c64, to_f64, Rational, Scalar, C64};

pub const DECOMPOSITION_ATTEMPTS: usize = 8;
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
pub const NORM_SLACK: f64 = 1e-9;

/// `δ(μ) = Σ_s μ({s}) ε_s ⊗ ε_s` on `Q × Q`, indexed `s·|Q| + t`.
pub fn delta_extend(mu: &MeasureVector) -> Result<MeasureVector> {
    let n = match mu.carrier {
        Carrier::Hypergroup(n) => n,
        other => {
            return Err(Error::CarrierMismatch {
                left: other.to_string(),
                right: "Q[n]".into(),
            })
        }
    };
    let mut coeffs = vec![szero(); n * n];
    for (s, z) in mu.coeffs.iter().enumerate() {
        coeffs[s * n + s] = z.clone();
    }
    Ok(MeasureVector::new(Carrier::HypergroupSquare(n), coeffs))
}

/// `⟨δ(μ), F⟩ = Σ_s F(s, s) μ({s})`.
pub fn pair_square(mu: &MeasureVector, big_f: &[Vec<Scalar>]) -> Scalar {
    let n = big_f.len();
    mu.coeffs
        .iter()
        .enumerate()
        .filter(|(_, z)| !z.is_zero())
        .fold(szero(), |acc, (k, z)| acc + z * &big_f[k / n][k % n])
}

fn tensor_squares(h: &HypergroupTable) -> Vec<OperatorMatrix> {
    left_regular(h).iter().map(|l| l.kron(l)).collect()
}

fn combine(ops: &[OperatorMatrix], mu: &[Scalar]) -> Result<OperatorMatrix> {
    let mut out = OperatorMatrix::zero(ops[0].inner_weights().to_vec());
    for (op, z) in ops.iter().zip(mu) {
        if !z.is_zero() {
            out = out.add(&op.scaled(z))?;
        }
    }
    Ok(out)
}

/// `Φ(μ) = Σ_s μ({s}) L_s ⊗ L_s` on `ℓ²(Q, m̃) ⊗ ℓ²(Q, m̃)`.
pub fn phi_map(mu: &MeasureVector, h: &HypergroupTable) -> Result<OperatorMatrix> {
    mu.expect_carrier(Carrier::Hypergroup(h.size()))?;
    combine(&tensor_squares(h), &mu.coeffs)
}

/// `Φ` applied to the measure `f m̃` of a function in `L₁(Q, m̃)`.
pub fn phi_of_function(f: &[Scalar], h: &HypergroupTable) -> Result<OperatorMatrix> {
    phi_map(&h.measure_of(f)?, h)
}

/// The normalized point masses `b_s = 1_s / m̃(s)`, so that `b_s m̃ = ε_s`.
pub fn point_basis(h: &HypergroupTable) -> Vec<Vec<Scalar>> {
    (0..h.size())
        .map(|s| {
            indicator(h.size(), s)
                .iter()
                .map(|z| scale(z, &h.haar()[s].recip()))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpCertificate {
    pub is_cp: bool,
    pub min_eigenvalue: f64,
    pub norm: f64,
    pub matrix_dim: usize,
    /// Exact Hermitian symmetry of the weighted block matrix.
    pub hermitian: bool,
}

pub fn takesaki_cp_certificate(h: &HypergroupTable) -> Result<CpCertificate> {
    takesaki_cp_certificate_with(h, PSD_TOLERANCE)
}

/// Assembles the basis block matrix with `(i, j)` block `Φ(b_i⋆ * b_j)`,
/// multiplies by the inner-product weights so that positivity becomes
/// ordinary Hermitian positivity, checks the symmetry exactly and the
/// smallest eigenvalue in floating point.
pub fn takesaki_cp_certificate_with(h: &HypergroupTable, tol: f64) -> Result<CpCertificate> {
    let n = h.size();
    let m = n * n;
    let dim = n * m;
    let squares = tensor_squares(h);
    let weights: Vec<Rational> = squares[0].inner_weights().to_vec();
    let basis = point_basis(h);
    let stars: Vec<Vec<Scalar>> = basis.iter().map(|b| h.l1_star(b)).collect::<Result<_>>()?;

    let mut g = vec![szero(); dim * dim];
    for i in 0..n {
        for j in 0..n {
            let f = h.l1_convolve(&stars[i], &basis[j])?;
            let block = combine(&squares, &h.measure_of(&f)?.coeffs)?;
            for a in 0..m {
                for b in 0..m {
                    let z = block.get(a, b);
                    if !z.is_zero() {
                        g[(i * m + a) * dim + j * m + b] = scale(z, &weights[a]);
                    }
                }
            }
        }
    }
    let hermitian = (0..dim).all(|a| (a..dim).all(|b| g[a * dim + b] == g[b * dim + a].conj()));
    let root: Vec<f64> = (0..dim).map(|a| to_f64(&weights[a % m]).sqrt()).collect();
    let s = CMat::from_fn(dim, dim, |a, b| to_c64(&g[a * dim + b]) / (root[a] * root[b]));
    let norm = spectral_norm(&s);
    let min_eigenvalue = if hermitian {
        hermitian_eigen(&s).0[0]
    } else {
        f64::NAN
    };
    Ok(CpCertificate {
        is_cp: hermitian && min_eigenvalue >= -tol * norm.max(1e-300),
        min_eigenvalue,
        norm,
        matrix_dim: dim,
        hermitian,
    })
}

/// An isotypic component: `multiplicity` copies of an irreducible block of
/// size `dim`, occupying consecutive coordinates from `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub dim: usize,
    pub multiplicity: usize,
    pub offset: usize,
}

impl Block {
    pub fn copy(&self, k: usize) -> Range<usize> {
        let start = self.offset + k * self.dim;
        start..start + self.dim
    }
}

/// A unitary `U` (in hat coordinates) such that `U^H L̂_s U` is block
/// diagonal for every generator, with equal blocks on copies of the same
/// irreducible.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    blocks: Vec<Block>,
    basis_change: DMatrix<C64>,
    residual: f64,
}

impl BlockDecomposition {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn basis_change(&self) -> &DMatrix<C64> {
        &self.basis_change
    }

    pub fn space_dim(&self) -> usize {
        self.basis_change.nrows()
    }

    /// `Σ_k n_k²`, the dimension of the generated algebra.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// Coordinate slices of the first copy of each block.
    pub fn block_projectors(&self) -> Vec<Range<usize>> {
        self.blocks.iter().map(|b| b.copy(0)).collect()
    }

    /// Largest off-block or copy-mismatch entry seen during verification,
    /// relative to the generator norm.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn conjugate(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        self.basis_change.adjoint() * m * &self.basis_change
    }
}

fn commutant_basis(hats: &[CMat]) -> Vec<CMat> {
    let n = hats[0].nrows();
    let id = CMat::identity(n, n);
    let mut gram = CMat::zeros(n * n, n * n);
    // column-major vec(AX - XA) = (I ⊗ A - Aᵀ ⊗ I) vec(X)
    for a in hats {
        let c = id.kronecker(a) - a.transpose().kronecker(&id);
        gram += c.adjoint() * &c;
    }
    let tol = 1e-9 * spectral_norm(&gram).max(1.0);
    let kernel = psd_kernel(&gram, tol);
    (0..kernel.ncols())
        .map(|k| CMat::from_fn(n, n, |i, j| kernel[(j * n + i, k)]))
        .collect()
}

fn compression_dim(v: &CMat, w: &CMat, commutant: &[CMat]) -> (usize, Option<usize>) {
    let vecs: Vec<Vec<C64>> = commutant
        .iter()
        .map(|y| (w.adjoint() * y * v).iter().copied().collect())
        .collect();
    let norms: Vec<f64> = vecs
        .iter()
        .map(|x| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let best = norms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .filter(|(_, &nm)| nm > 1e-6)
        .map(|(k, _)| k);
    let rank = if best.is_some() { column_span_dim(&vecs, 1e-6) } else { 0 };
    (rank, best)
}

fn try_decompose(hats: &[CMat], commutant: &[CMat], rng: &mut ChaCha8Rng) -> std::result::Result<BlockDecomposition, String> {
    let n = hats[0].nrows();
    let mut herm = CMat::zeros(n, n);
    for y in commutant {
        let b = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        herm += y * b + y.adjoint() * b.conj();
    }
    let (values, vectors) = hermitian_eigen(&herm);
    let tol = crate::representation::SEPARATION_TOLERANCE * spectral_norm(&herm).max(1.0);
    let spaces: Vec<CMat> = cluster(&values, tol)
        .into_iter()
        .map(|idx| CMat::from_fn(n, idx.len(), |i, j| vectors[(i, idx[j])]))
        .collect();
    for (k, v) in spaces.iter().enumerate() {
        if compression_dim(v, v, commutant).0 != 1 {
            return Err(format!("eigenspace {k} is not irreducible"));
        }
    }
    // isotypic classes: representative index and aligned copies
    let mut classes: Vec<(usize, Vec<CMat>)> = Vec::new();
    for (j, v) in spaces.iter().enumerate() {
        let mut placed = false;
        for (rep, copies) in classes.iter_mut() {
            let r = &spaces[*rep];
            if r.ncols() != v.ncols() {
                continue;
            }
            if let (_, Some(k)) = compression_dim(r, v, commutant) {
                let t = v.adjoint() * &commutant[k] * r;
                let d = r.ncols() as f64;
                let c = ((t.adjoint() * &t).trace().re / d).sqrt();
                copies.push(v * (t / C64::new(c, 0.0)));
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push((j, vec![v.clone()]));
        }
    }
    let mut blocks = Vec::new();
    let mut columns: Vec<DVector<C64>> = Vec::with_capacity(n);
    for (_, copies) in &classes {
        let dim = copies[0].ncols();
        blocks.push(Block {
            dim,
            multiplicity: copies.len(),
            offset: columns.len(),
        });
        for v in copies {
            columns.extend(v.column_iter().map(|c| c.into_owned()));
        }
    }
    let u = CMat::from_columns(&columns);
    let unitarity = (u.adjoint() * &u - CMat::identity(n, n))
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    if unitarity > RESIDUAL_TOLERANCE {
        return Err(format!("basis change is not unitary ({unitarity:.3e})"));
    }
    let mut residual: f64 = 0.0;
    for a in hats {
        let scale = spectral_norm(a).max(1.0);
        let b = u.adjoint() * a * &u;
        let mut inside = vec![false; n * n];
        for blk in &blocks {
            let first = blk.copy(0);
            for k in 0..blk.multiplicity {
                let r = blk.copy(k);
                for (i0, i) in r.clone().enumerate() {
                    for (j0, j) in r.clone().enumerate() {
                        inside[i * n + j] = true;
                        let diff = (b[(i, j)] - b[(first.start + i0, first.start + j0)]).norm();
                        residual = residual.max(diff / scale);
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !inside[i * n + j] {
                    residual = residual.max(b[(i, j)].norm() / scale);
                }
            }
        }
    }
    if residual > RESIDUAL_TOLERANCE {
        return Err(format!("off-block residual {residual:.3e}"));
    }
    Ok(BlockDecomposition {
        blocks,
        basis_change: u,
        residual,
    })
}

/// Simultaneous block diagonalization of the `*`-algebra generated by
/// `generators`, from the eigenspaces of a random Hermitian element of the
/// commutant. Retries with fresh elements before giving up.
pub fn block_decompose(generators: &[OperatorMatrix], seed: u64) -> Result<BlockDecomposition> {
    if generators.is_empty() {
        return Err(Error::DimensionMismatch("no generators".into()));
    }
    if generators.iter().any(|g| g.inner_weights() != generators[0].inner_weights()) {
        return Err(Error::DimensionMismatch("generators act on different spaces".into()));
    }
    let hats: Vec<CMat> = generators.iter().map(|g| g.hat()).collect();
    let commutant = commutant_basis(&hats);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reason = String::new();
    for _ in 0..DECOMPOSITION_ATTEMPTS {
        match try_decompose(&hats, &commutant, &mut rng) {
            Ok(d) => return Ok(d),
            Err(r) => reason = r,
        }
    }
    Err(Error::DecompositionFailed {
        attempts: DECOMPOSITION_ATTEMPTS,
        reason,
    })
}

/// Solves for the block densities of functionals on the algebra spanned by
/// the left regular operators of `h`.
#[derive(Debug, Clone)]
pub struct DualNormSolver {
    blocks: Vec<Block>,
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl DualNormSolver {
    pub fn new(h: &HypergroupTable, d: &BlockDecomposition) -> Result<Self> {
        let n = h.size();
        if d.space_dim() != n {
            return Err(Error::DecompositionMismatch(format!(
                "decomposition acts on dimension {}, hypergroup has {n} points",
                d.space_dim()
            )));
        }
        if d.algebra_dim() != n {
            return Err(Error::DecompositionMismatch(format!(
                "blocks span dimension {}, expected {n}",
                d.algebra_dim()
            )));
        }
        let mut system = CMat::zeros(n, n);
        for (s, l) in left_regular(h).iter().enumerate() {
            let b = d.conjugate(&l.hat());
            let mut col = 0;
            for blk in d.blocks() {
                let r = blk.copy(0);
                // tr(ρ B) = Σ_{i,j} ρ[i][j] B[j][i]
                for i in 0..blk.dim {
                    for j in 0..blk.dim {
                        system[(s, col)] = b[(r.start + j, r.start + i)];
                        col += 1;
                    }
                }
            }
        }
        let lu = system.lu();
        if !lu.is_invertible() {
            return Err(Error::DecompositionMismatch("block system is singular".into()));
        }
        Ok(DualNormSolver {
            blocks: d.blocks().to_vec(),
            lu,
        })
    }

    /// The block densities `ρ_k` of the functional defined by `a`.
    pub fn densities(&self, a: &[C64]) -> Result<Vec<CMat>> {
        let rhs = DVector::from_column_slice(a);
        let x = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::DecompositionMismatch("block system is singular".into()))?;
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut k = 0;
        for blk in &self.blocks {
            let d = blk.dim;
            out.push(CMat::from_fn(d, d, |i, j| x[k + i * d + j]));
            k += d * d;
        }
        Ok(out)
    }

    pub fn norm(&self, a: &[Scalar]) -> Result<f64> {
        let a: Vec<C64> = a.iter().map(to_c64).collect();
        Ok(self.densities(&a)?.iter().map(trace_norm).sum())
    }
}

/// Norm of `Σ_s μ_s L_s ↦ Σ_s μ_s a(s)` against the operator norm of
/// `ℓ²(Q, m̃)`.
pub fn dual_norm(a: &[Scalar], h: &HypergroupTable, d: &BlockDecomposition) -> Result<f64> {
    if a.len() != h.size() {
        return Err(Error::LengthMismatch {
            expected: h.size(),
            got: a.len(),
        });
    }
    DualNormSolver::new(h, d)?.norm(a)
}

pub fn l2_norm_sqr(f: &[Scalar], h: &HypergroupTable) -> Rational {
    f.iter()
        .zip(h.haar())
        .map(|(z, m)| norm_sqr(z) * m)
        .fold(Rational::zero(), |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmultiplicativityReport {
    pub samples: usize,
    pub seed: u64,
    pub pd_failures: usize,
    pub norm_violations: usize,
    pub worst_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_sample: Option<usize>,
    /// `dual_norm(f*f†) / ‖f‖₂²` over the samples.
    pub min_gns_ratio: f64,
    pub max_gns_ratio: f64,
    pub gns_violations: usize,
    /// Dimension of the span of the sampled `f*f†`.
    pub span_dimension: usize,
    pub report: Report,
}

/// For random `f, g`, checks that `u·v` is positive definite and
/// `‖u·v‖ ≤ ‖u‖‖v‖` for `u = f*f†`, `v = g*g†`.
pub fn fourier_submultiplicativity_report(
    h: &HypergroupTable,
    samples: usize,
    seed: u64,
) -> Result<SubmultiplicativityReport> {
    fourier_submultiplicativity_report_with(h, samples, seed, PSD_TOLERANCE)
}

pub fn fourier_submultiplicativity_report_with(
    h: &HypergroupTable,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SubmultiplicativityReport> {
    let d = block_decompose(&left_regular(h), seed)?;
    let solver = DualNormSolver::new(h, &d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pd_failure = None;
    let mut norm_failure = None;
    let mut gns_failure = None;
    let (mut pd_failures, mut norm_violations, mut gns_violations) = (0, 0, 0);
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_sample = None;
    let (mut min_gns, mut max_gns) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut span = Vec::new();
    for k in 0..samples {
        let f = random_vector(&mut rng, h.size());
        let g = random_vector(&mut rng, h.size());
        let u = h.l1_convolve(&f, &h.l1_dagger(&f)?)?;
        let v = h.l1_convolve(&g, &h.l1_dagger(&g)?)?;
        let uv: Vec<Scalar> = u.iter().zip(&v).map(|(a, b)| a * b).collect();
        if !positive_definite_check_with(&uv, h, tol)?.is_pd {
            pd_failures += 1;
            pd_failure.get_or_insert_with(|| format!("sample {k}"));
        }
        let (nu, nv, nuv) = (solver.norm(&u)?, solver.norm(&v)?, solver.norm(&uv)?);
        if nuv > nu * nv + NORM_SLACK {
            norm_violations += 1;
            norm_failure.get_or_insert_with(|| format!("sample {k}: {nuv} > {nu} * {nv}"));
        }
        if nu * nv > 0.0 && nuv / (nu * nv) > worst_ratio {
            worst_ratio = nuv / (nu * nv);
            worst_sample = Some(k);
        }
        for (fun, n) in [(&f, nu), (&g, nv)] {
            let l2 = to_f64(&l2_norm_sqr(fun, h));
            if n > l2 + NORM_SLACK {
                gns_violations += 1;
                gns_failure.get_or_insert_with(|| format!("sample {k}: {n} > {l2}"));
            }
            if l2 > 0.0 {
                min_gns = min_gns.min(n / l2);
                max_gns = max_gns.max(n / l2);
            }
        }
        span.push(u.iter().map(to_c64).collect::<Vec<_>>());
    }
    let mut report = Report::new("Fourier algebra submultiplicativity").with_seed(seed);
    report.record("(a) pointwise product is positive definite", pd_failure);
    report.record("(b) norm of product at most product of norms", norm_failure);
    report.record("norm of f*f† at most squared L2 norm of f", gns_failure);
    Ok(SubmultiplicativityReport {
        samples,
        seed,
        pd_failures,
        norm_violations,
        worst_ratio,
        worst_sample,
        min_gns_ratio: min_gns,
        max_gns_ratio: max_gns,
        gns_violations,
        span_dimension: column_span_dim(&span, 1e-9),
        report,
    })
}

/// The constant function `value` on `Q`.
pub fn constant_function(h: &HypergroupTable, value: Rational) -> Vec<Scalar> {
    vec![real(value); h.size()]
}
