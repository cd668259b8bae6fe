//! Conditional expectations on `C(G)` onto block-constant subalgebras.
//!
//! On a finite group every conditional expectation onto a subalgebra is a
//! block average: the subalgebra is the set of functions constant on the
//! blocks `O_s` of a partition of `G`, and
//! `(Pf)(p) = Σ_{q ∈ O_s} w_s(q) f(q)` for `p ∈ O_s`, where `w_s` is a
//! probability vector on `O_s`. The adjoint sends `ε_s` to the measure
//! `w_s` on `O_s`, and the quotient map `φ` sends `p` to its block index.
//!
//! Weights are required strictly positive, so `supp P*(ε_s) = O_s` always
//! holds by construction.
//!
//! Verification follows one rule: a predicate linear (or multilinear) in
//! the test function is checked exactly on all basis indicators, which is
//! complete; nonlinear inequalities are checked exactly on
//! [`RANDOM_SAMPLES`] seeded random complex-rational functions.

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{Carrier, GroupTable, MeasureVector};
use crate::report::Report;
use crate::scalar::{
    indicator, int, norm_sqr, random_vector, rat, real, scale, szero, to_c64, Rational, Scalar,
};

/// Number of random test functions used for nonlinear axiom checks.
pub const RANDOM_SAMPLES: usize = 64;

/// A partition of `0..order` into nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSystem {
    order: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl BlockSystem {
    pub fn new(order: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; order];
        for (b, members) in blocks.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidBlocks(format!("block {b} is empty")));
            }
            for &p in members {
                if p >= order {
                    return Err(Error::InvalidBlocks(format!(
                        "element {p} in block {b} is outside 0..{order}"
                    )));
                }
                if block_of[p] != usize::MAX {
                    return Err(Error::InvalidBlocks(format!(
                        "element {p} appears in blocks {} and {b}",
                        block_of[p]
                    )));
                }
                block_of[p] = b;
            }
        }
        if let Some(p) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidBlocks(format!("element {p} is not covered")));
        }
        Ok(BlockSystem {
            order,
            blocks,
            block_of,
        })
    }

    /// Blocks from a labelling, numbered by first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut ids: Vec<(usize, usize)> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (p, &l) in labels.iter().enumerate() {
            match ids.iter().find(|(lab, _)| *lab == l) {
                Some(&(_, b)) => blocks[b].push(p),
                None => {
                    ids.push((l, blocks.len()));
                    blocks.push(vec![p]);
                }
            }
        }
        BlockSystem::new(labels.len(), blocks).expect("labelling is a partition")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, s: usize) -> &[usize] {
        &self.blocks[s]
    }

    /// The quotient map `φ`.
    pub fn block_of(&self, p: usize) -> usize {
        self.block_of[p]
    }
}

/// A block-averaging conditional expectation `P` on functions over `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalExpectation {
    blocks: BlockSystem,
    weights: Vec<Vec<Rational>>,
    // weight of each element in its own block
    point_weight: Vec<Rational>,
}

impl ConditionalExpectation {
    /// `weights[s][i]` is the weight of `blocks.block(s)[i]`.
    pub fn new(blocks: BlockSystem, weights: Vec<Vec<Rational>>) -> Result<Self> {
        if weights.len() != blocks.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weight vectors for {} blocks",
                weights.len(),
                blocks.len()
            )));
        }
        let mut point_weight = vec![Rational::zero(); blocks.order()];
        for (s, w) in weights.iter().enumerate() {
            let members = blocks.block(s);
            if w.len() != members.len() {
                return Err(Error::InvalidWeights(format!(
                    "block {s} has {} elements but {} weights",
                    members.len(),
                    w.len()
                )));
            }
            if let Some(bad) = w.iter().find(|x| !x.is_positive()) {
                return Err(Error::InvalidWeights(format!(
                    "block {s} has non-positive weight {bad}"
                )));
            }
            let total: Rational = w.iter().sum();
            if !total.is_one() {
                return Err(Error::InvalidWeights(format!(
                    "block {s} weights sum to {total}, not 1"
                )));
            }
            for (&p, x) in members.iter().zip(w) {
                point_weight[p] = x.clone();
            }
        }
        Ok(ConditionalExpectation {
            blocks,
            weights,
            point_weight,
        })
    }

    /// Uniform weights on every block.
    pub fn uniform(blocks: BlockSystem) -> Self {
        let weights = blocks
            .blocks()
            .iter()
            .map(|b| vec![rat(1, b.len() as i64); b.len()])
            .collect();
        ConditionalExpectation::new(blocks, weights).expect("uniform weights are valid")
    }

    /// `P = id`: singleton blocks.
    pub fn identity(order: usize) -> Self {
        ConditionalExpectation::uniform(BlockSystem::from_labels(
            &(0..order).collect::<Vec<_>>(),
        ))
    }

    /// Expectation onto bi-`H`-invariant functions,
    /// `Pf(p) = |H|⁻² Σ_{h₁,h₂ ∈ H} f(h₁ p h₂)`.
    pub fn double_coset(g: &GroupTable, subgroup: &[usize]) -> Result<Self> {
        let h = checked_subgroup(g, subgroup)?;
        let n = g.order();
        let hh = (h.len() * h.len()) as i64;
        let mut labels = vec![usize::MAX; n];
        let mut blocks = Vec::new();
        let mut weights = Vec::new();
        for p in 0..n {
            if labels[p] != usize::MAX {
                continue;
            }
            let mut counts = vec![0i64; n];
            for &h1 in &h {
                for &h2 in &h {
                    counts[g.mul(g.mul(h1, p), h2)] += 1;
                }
            }
            let members: Vec<usize> = (0..n).filter(|&q| counts[q] > 0).collect();
            for &q in &members {
                labels[q] = blocks.len();
            }
            weights.push(members.iter().map(|&q| rat(counts[q], hh)).collect());
            blocks.push(members);
        }
        ConditionalExpectation::new(BlockSystem::new(n, blocks)?, weights)
    }

    /// Averaging over inner automorphisms, `Pf(p) = |G|⁻¹ Σ_h f(h p h⁻¹)`;
    /// the blocks are the conjugacy classes.
    pub fn conjugation(g: &GroupTable) -> Self {
        let n = g.order();
        let autos: Vec<Vec<usize>> = (0..n)
            .map(|h| (0..n).map(|p| g.mul(g.mul(h, p), g.inv(h))).collect())
            .collect();
        orbit_average(n, &autos)
    }

    /// Averaging over a group `B` of automorphisms,
    /// `Pf(p) = |B|⁻¹ Σ_{σ ∈ B} f(σ(p))`. The list must consist of
    /// automorphisms and be closed under composition and inversion.
    pub fn automorphism_orbit(g: &GroupTable, autos: &[Vec<usize>]) -> Result<Self> {
        let n = g.order();
        if autos.is_empty() {
            return Err(Error::NotAGroupOfAutomorphisms("empty list".into()));
        }
        for (i, sigma) in autos.iter().enumerate() {
            if sigma.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: sigma.len(),
                });
            }
            let mut seen = vec![false; n];
            for &x in sigma {
                if x >= n || seen[x] {
                    return Err(Error::NotAGroupOfAutomorphisms(format!(
                        "entry {i} is not a permutation"
                    )));
                }
                seen[x] = true;
            }
            for p in 0..n {
                for q in 0..n {
                    if sigma[g.mul(p, q)] != g.mul(sigma[p], sigma[q]) {
                        return Err(Error::NotAnAutomorphism { index: i, p, q });
                    }
                }
            }
        }
        for (i, a) in autos.iter().enumerate() {
            let mut inverse = vec![0; n];
            for (p, &x) in a.iter().enumerate() {
                inverse[x] = p;
            }
            if !autos.contains(&inverse) {
                return Err(Error::NotAGroupOfAutomorphisms(format!(
                    "inverse of entry {i} is missing"
                )));
            }
            for (j, b) in autos.iter().enumerate() {
                let composed: Vec<usize> = (0..n).map(|p| a[b[p]]).collect();
                if !autos.contains(&composed) {
                    return Err(Error::NotAGroupOfAutomorphisms(format!(
                        "composition of entries {i} and {j} is missing"
                    )));
                }
            }
        }
        Ok(orbit_average(n, autos))
    }

    pub fn block_system(&self) -> &BlockSystem {
        &self.blocks
    }

    pub fn weights(&self) -> &[Vec<Rational>] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.blocks.order()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Weight of `p` inside its own block.
    pub fn point_weight(&self, p: usize) -> &Rational {
        &self.point_weight[p]
    }

    /// Block-constant image `Pf` as a function on `G`.
    pub fn apply(&self, f: &[Scalar]) -> Result<Vec<Scalar>> {
        let values = self.block_values(f)?;
        Ok((0..self.order())
            .map(|p| values[self.blocks.block_of(p)].clone())
            .collect())
    }

    /// `Pf` as a function on the quotient, one value per block.
    pub fn block_values(&self, f: &[Scalar]) -> Result<Vec<Scalar>> {
        if f.len() != self.order() {
            return Err(Error::LengthMismatch {
                expected: self.order(),
                got: f.len(),
            });
        }
        Ok(self
            .blocks
            .blocks()
            .iter()
            .zip(&self.weights)
            .map(|(members, w)| {
                members
                    .iter()
                    .zip(w)
                    .fold(szero(), |acc, (&q, x)| acc + scale(&f[q], x))
            })
            .collect())
    }

    /// Pulls a function on `Q` back to the block-constant function on `G`.
    pub fn lift_function(&self, f: &[Scalar]) -> Result<Vec<Scalar>> {
        if f.len() != self.num_blocks() {
            return Err(Error::LengthMismatch {
                expected: self.num_blocks(),
                got: f.len(),
            });
        }
        Ok((0..self.order())
            .map(|p| f[self.blocks.block_of(p)].clone())
            .collect())
    }

    /// Matrix of `P` in the standard basis: `M[p][q] = w(q)` when `p`, `q`
    /// share a block.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        let n = self.order();
        (0..n)
            .map(|p| {
                (0..n)
                    .map(|q| {
                        if self.blocks.block_of(p) == self.blocks.block_of(q) {
                            self.point_weight[q].clone()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `P*(ε_s)`: mass `w_s(q)` at each `q ∈ O_s`.
    pub fn adjoint_point_measure(&self, s: usize) -> Result<MeasureVector> {
        if s >= self.num_blocks() {
            return Err(Error::IndexOutOfRange {
                index: s,
                bound: self.num_blocks(),
            });
        }
        let mut coeffs = vec![szero(); self.order()];
        for (&q, w) in self.blocks.block(s).iter().zip(&self.weights[s]) {
            coeffs[q] = real(w.clone());
        }
        Ok(MeasureVector::new(Carrier::Group(self.order()), coeffs))
    }

    /// The adjoint `P*` on arbitrary measures over `Q`.
    pub fn adjoint(&self, mu: &MeasureVector) -> Result<MeasureVector> {
        mu.expect_carrier(Carrier::Hypergroup(self.num_blocks()))?;
        let coeffs = (0..self.order())
            .map(|p| scale(&mu.coeffs[self.blocks.block_of(p)], &self.point_weight[p]))
            .collect();
        Ok(MeasureVector::new(Carrier::Group(self.order()), coeffs))
    }

    /// The pushforward `φ_*` of a measure on `G`.
    pub fn pushforward(&self, mu: &MeasureVector) -> Result<MeasureVector> {
        mu.expect_carrier(Carrier::Group(self.order()))?;
        let mut coeffs = vec![szero(); self.num_blocks()];
        for (p, c) in mu.coeffs.iter().enumerate() {
            let s = self.blocks.block_of(p);
            coeffs[s] = &coeffs[s] + c;
        }
        Ok(MeasureVector::new(Carrier::Hypergroup(self.num_blocks()), coeffs))
    }

    fn is_block_constant(&self, f: &[Scalar]) -> bool {
        (0..self.order()).all(|p| f[p] == f[self.blocks.block(self.blocks.block_of(p))[0]])
    }

    /// Checks the conditional-expectation axioms (i)–(v) independently.
    pub fn verify_axioms(&self, seed: u64) -> Report {
        let n = self.order();
        let mut report = Report::new("conditional expectation axioms").with_seed(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<Vec<Scalar>> = (0..RANDOM_SAMPLES).map(|_| random_vector(&mut rng, n)).collect();
        let apply = |f: &[Scalar]| self.apply(f).expect("length checked");

        // (i) projection: exact on the basis; norm one: sup-norm on samples
        let mut w = None;
        for q in 0..n {
            let pf = apply(&indicator(n, q));
            if apply(&pf) != pf {
                w = Some(format!("P(P(1_{q})) != P(1_{q})"));
                break;
            }
            if !self.is_block_constant(&pf) {
                w = Some(format!("P(1_{q}) is not block-constant"));
                break;
            }
        }
        report.record("(i) idempotent onto block-constant functions", w);
        let mut w = None;
        for (k, f) in samples.iter().enumerate() {
            let sup_f = f.iter().map(norm_sqr).max().unwrap_or_else(Rational::zero);
            if let Some(p) = apply(f).iter().position(|v| norm_sqr(v) > sup_f) {
                w = Some(format!("sample {k}: |Pf({p})| exceeds sup|f|"));
                break;
            }
        }
        report.record("(i) sup-norm contraction", w);

        // (ii) positivity
        let mut w = None;
        for (k, f) in samples.iter().enumerate() {
            let sq: Vec<Scalar> = f.iter().map(|v| real(norm_sqr(v))).collect();
            if let Some(p) = apply(&sq)
                .iter()
                .position(|v| !v.im.is_zero() || v.re.is_negative())
            {
                w = Some(format!("sample {k}: P(|f|^2)({p}) < 0"));
                break;
            }
        }
        report.record("(ii) positive", w);

        // (iii) bimodule property, trilinear: block indicators and basis f
        let mut w = None;
        'outer: for s in 0..self.num_blocks() {
            let b1 = self.block_indicator(s);
            for t in 0..self.num_blocks() {
                let b2 = self.block_indicator(t);
                for q in 0..n {
                    let f = indicator(n, q);
                    let lhs = apply(&pointwise(&pointwise(&b1, &f), &b2));
                    let rhs = pointwise(&pointwise(&b1, &apply(&f)), &b2);
                    if lhs != rhs {
                        w = Some(format!("b = 1_O{s}, b' = 1_O{t}, f = 1_{q}"));
                        break 'outer;
                    }
                }
            }
        }
        report.record("(iii) bimodule over the image", w);

        // (iv) Schwarz inequality
        let mut w = None;
        for (k, f) in samples.iter().enumerate() {
            let pf = apply(f);
            let sq: Vec<Scalar> = f.iter().map(|v| real(norm_sqr(v))).collect();
            let psq = apply(&sq);
            if let Some(p) = (0..n).find(|&p| psq[p].re < norm_sqr(&pf[p])) {
                w = Some(format!("sample {k}: |Pf|^2 > P(|f|^2) at {p}"));
                break;
            }
        }
        report.record("(iv) Schwarz inequality", w);

        // (v) *-preserving
        let mut w = None;
        for (k, f) in samples.iter().enumerate() {
            let conj: Vec<Scalar> = f.iter().map(|v| v.conj()).collect();
            let lhs = apply(&conj);
            let rhs: Vec<Scalar> = apply(f).iter().map(|v| v.conj()).collect();
            if lhs != rhs {
                w = Some(format!("sample {k}"));
                break;
            }
        }
        report.record("(v) self-adjoint", w);
        report
    }

    /// Checks the construction hypotheses exactly on all basis indicators:
    /// (a) `(P×id)∘Δ∘P = (id×P)∘Δ∘P = (P×P)∘Δ`,
    /// (b) `P∘ˇ = ˇ∘P`,
    /// (c) `Σ_p (Pf)(p) = Σ_p f(p)`.
    pub fn verify_hypergroup_conditions(&self, g: &GroupTable) -> Result<Report> {
        let n = g.order();
        if n != self.order() {
            return Err(Error::CarrierMismatch {
                left: Carrier::Group(self.order()).to_string(),
                right: Carrier::Group(n).to_string(),
            });
        }
        let mut report = Report::new("construction hypotheses");
        let mut wa = None;
        let mut wb = None;
        let mut wc = None;
        for q in 0..n {
            let f = indicator(n, q);
            let pf = self.apply(&f)?;
            if wa.is_none() {
                let dpf = g.comult(&pf)?;
                let left = self.apply_left(&dpf);
                let right = self.apply_right(&dpf);
                let both = self.apply_left(&self.apply_right(&g.comult(&f)?));
                if let Some(w) = first_difference(&left, &both) {
                    wa = Some(format!("f = 1_{q}: (P x id)DP vs (P x P)D differ at {w:?}"));
                } else if let Some(w) = first_difference(&right, &both) {
                    wa = Some(format!("f = 1_{q}: (id x P)DP vs (P x P)D differ at {w:?}"));
                }
            }
            if wb.is_none() && self.apply(&g.check(&f)?)? != g.check(&pf)? {
                wb = Some(format!("f = 1_{q}"));
            }
            if wc.is_none() {
                let total = pf.iter().fold(szero(), |acc, v| acc + v);
                if total != real(int(1)) {
                    wc = Some(format!("f = 1_{q}: sum of Pf is {}", total.re));
                }
            }
        }
        report.record("(a) comultiplication compatibility", wa);
        report.record("(b) commutes with involution", wb);
        report.record("(c) preserves Haar measure", wc);
        Ok(report)
    }

    /// Checks that `P` extends to an idempotent on `L₁(G)` and an
    /// orthogonal projection on `L₂(G)` with counting measure.
    pub fn verify_l2_projection(&self, g: &GroupTable, seed: u64) -> Result<Report> {
        let n = g.order();
        if n != self.order() {
            return Err(Error::CarrierMismatch {
                left: Carrier::Group(self.order()).to_string(),
                right: Carrier::Group(n).to_string(),
            });
        }
        for q in 0..n {
            let pf = self.apply(&indicator(n, q))?;
            let total = pf.iter().fold(szero(), |acc, v| acc + v);
            if total != real(int(1)) {
                return Err(Error::HaarIncompatible {
                    element: q,
                    sum: total.re.to_string(),
                });
            }
        }
        let mut report = Report::new("L2 projection").with_seed(seed);
        let m = self.matrix();
        let mut w = None;
        'sq: for i in 0..n {
            for j in 0..n {
                let v: Rational = (0..n).map(|k| &m[i][k] * &m[k][j]).sum();
                if v != m[i][j] {
                    w = Some(format!("(M^2)[{i}][{j}] != M[{i}][{j}]"));
                    break 'sq;
                }
            }
        }
        report.record("idempotent matrix", w);
        let w = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| m[i][j] != m[j][i])
            .map(|(i, j)| format!("(P 1_{j}, 1_{i}) != (1_{j}, P 1_{i})"));
        report.record("self-adjoint for counting measure", w);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w1 = None;
        let mut w2 = None;
        for k in 0..RANDOM_SAMPLES {
            let f = random_vector(&mut rng, n);
            let pf = self.apply(&f)?;
            let l2 = |v: &[Scalar]| v.iter().map(norm_sqr).sum::<Rational>();
            if w2.is_none() && l2(&pf) > l2(&f) {
                w2 = Some(format!("sample {k}"));
            }
            // |z| is irrational in general; compare in floating point
            let l1 = |v: &[Scalar]| v.iter().map(|z| to_c64(z).norm()).sum::<f64>();
            let (a, b) = (l1(&pf), l1(&f));
            if w1.is_none() && a > b * (1.0 + 1e-12) {
                w1 = Some(format!("sample {k}: {a} > {b}"));
            }
        }
        report.record("L1 contraction", w1);
        report.record("L2 contraction", w2);
        Ok(report)
    }

    fn block_indicator(&self, s: usize) -> Vec<Scalar> {
        (0..self.order())
            .map(|p| real(int((self.blocks.block_of(p) == s) as i64)))
            .collect()
    }

    /// `P` applied in the first variable of a function on `G × G`.
    pub fn apply_left(&self, table: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        let n = self.order();
        let mut out = vec![vec![szero(); n]; n];
        for (s, members) in self.blocks.blocks().iter().enumerate() {
            for q in 0..n {
                let v = members
                    .iter()
                    .zip(&self.weights[s])
                    .fold(szero(), |acc, (&p, w)| acc + scale(&table[p][q], w));
                for &p in members {
                    out[p][q] = v.clone();
                }
            }
        }
        out
    }

    /// `P` applied in the second variable.
    pub fn apply_right(&self, table: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        table
            .iter()
            .map(|row| self.apply(row).expect("row length"))
            .collect()
    }
}

fn pointwise(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn first_difference(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Option<(usize, usize)> {
    for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
        for (j, (x, y)) in ra.iter().zip(rb).enumerate() {
            if x != y {
                return Some((i, j));
            }
        }
    }
    None
}

fn checked_subgroup(g: &GroupTable, subgroup: &[usize]) -> Result<Vec<usize>> {
    let n = g.order();
    let mut members: Vec<usize> = subgroup.to_vec();
    members.sort_unstable();
    members.dedup();
    if let Some(&p) = members.iter().find(|&&p| p >= n) {
        return Err(Error::NotASubgroup(format!("element {p} is outside 0..{n}")));
    }
    if !members.contains(&g.identity()) {
        return Err(Error::NotASubgroup("identity is missing".into()));
    }
    for &p in &members {
        if !members.contains(&g.inv(p)) {
            return Err(Error::NotASubgroup(format!("inverse of {p} is missing")));
        }
        for &q in &members {
            if !members.contains(&g.mul(p, q)) {
                return Err(Error::NotASubgroup(format!("product {p}*{q} is missing")));
            }
        }
    }
    Ok(members)
}

/// Uniform averaging over the orbits of a permutation group.
fn orbit_average(n: usize, perms: &[Vec<usize>]) -> ConditionalExpectation {
    let mut labels = vec![usize::MAX; n];
    for p in 0..n {
        if labels[p] == usize::MAX {
            for sigma in perms {
                labels[sigma[p]] = p;
            }
            labels[p] = p;
        }
    }
    ConditionalExpectation::uniform(BlockSystem::from_labels(&labels))
}
