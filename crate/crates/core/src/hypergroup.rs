//! Finite hypergroups as tables of structure constants.
//!
//! A finite hypergroup on points `0..size` is determined by
//! `c[s][t][r] = (ε_s * ε_t)({r})`, an identity `ẽ` and an involution
//! `s ↦ š`. This module builds such a table from a conditional expectation
//! on a finite group, verifies the hypergroup axioms in measure form and
//! in comultiplication form, and provides the convolution algebra of
//! functions `L₁(Q, m̃)`.
//!
//! The `L₁` product is `(f*g)(s) = Σ_t m̃(t) f(t) ⟨g, ε_ť * ε_s⟩`, which is
//! the product of measures `fm̃ * gm̃` divided by `m̃`.

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expectation::ConditionalExpectation;
use crate::group::{Carrier, GroupTable, MeasureVector};
use crate::report::Report;
use crate::scalar::{indicator, nullspace, real, scale, sone, szero, Rational, Scalar};

/// Structure constants, identity, involution, Haar weights and modular
/// function of a finite hypergroup.
///
/// Construction only enforces shape (dimensions, indices in range, positive
/// Haar weights). The hypergroup axioms are checked by
/// [`verify_djs`](Self::verify_djs) so that hand-authored tables with
/// violations can be loaded and diagnosed.
#[derive(Debug, Clone, PartialEq)]
pub struct HypergroupTable {
    size: usize,
    c: Vec<Rational>,
    identity: usize,
    involution: Vec<usize>,
    haar: Vec<Rational>,
    modular: Vec<Rational>,
}

impl HypergroupTable {
    /// Assembles a table from raw parts. A missing Haar measure is solved
    /// from the invariance system; a missing modular function is solved
    /// from the right-translation identity.
    pub fn from_parts(
        c: Vec<Vec<Vec<Rational>>>,
        identity: usize,
        involution: Vec<usize>,
        haar: Option<Vec<Rational>>,
        modular: Option<Vec<Rational>>,
    ) -> Result<Self> {
        let size = c.len();
        if size == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        let mut flat = Vec::with_capacity(size * size * size);
        for (s, plane) in c.into_iter().enumerate() {
            if plane.len() != size {
                return Err(Error::InvalidTable(format!("c[{s}] has {} rows", plane.len())));
            }
            for (t, row) in plane.into_iter().enumerate() {
                if row.len() != size {
                    return Err(Error::InvalidTable(format!(
                        "c[{s}][{t}] has {} entries",
                        row.len()
                    )));
                }
                flat.extend(row);
            }
        }
        if identity >= size {
            return Err(Error::IndexOutOfRange {
                index: identity,
                bound: size,
            });
        }
        if involution.len() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                got: involution.len(),
            });
        }
        if let Some(&bad) = involution.iter().find(|&&x| x >= size) {
            return Err(Error::IndexOutOfRange { index: bad, bound: size });
        }
        let mut table = HypergroupTable {
            size,
            c: flat,
            identity,
            involution,
            haar: vec![Rational::one(); size],
            modular: vec![Rational::one(); size],
        };
        match haar {
            Some(h) => {
                if h.len() != size {
                    return Err(Error::LengthMismatch {
                        expected: size,
                        got: h.len(),
                    });
                }
                if let Some(bad) = h.iter().position(|x| !x.is_positive()) {
                    return Err(Error::InvalidTable(format!("haar weight {bad} is not positive")));
                }
                table.haar = h;
            }
            None => {
                table.haar = table
                    .haar_solve()?
                    .coeffs
                    .into_iter()
                    .map(|z| z.re)
                    .collect();
            }
        }
        table.modular = match modular {
            Some(k) => {
                if k.len() != size {
                    return Err(Error::LengthMismatch {
                        expected: size,
                        got: k.len(),
                    });
                }
                k
            }
            None => table.solve_modular(),
        };
        Ok(table)
    }

    /// Builds the hypergroup of an expectation after checking its axioms
    /// and the construction hypotheses. The seed drives the randomized
    /// axiom checks.
    pub fn construct(p: &ConditionalExpectation, g: &GroupTable, seed: u64) -> Result<Self> {
        let axioms = p.verify_axioms(seed);
        if !axioms.passed() {
            return Err(Error::PreconditionFailed(Box::new(axioms)));
        }
        let conditions = p.verify_hypergroup_conditions(g)?;
        if !conditions.passed() {
            return Err(Error::PreconditionFailed(Box::new(conditions)));
        }
        Self::from_expectation_unchecked(p, g)
    }

    /// The structure-constant table `φ_*(P*(ε_s) *_G P*(ε_t))` with Haar
    /// weights `|O_s|`, without checking any hypothesis. Used to exhibit
    /// what goes wrong when the hypotheses fail.
    pub fn from_expectation_unchecked(p: &ConditionalExpectation, g: &GroupTable) -> Result<Self> {
        let n = g.order();
        if p.order() != n {
            return Err(Error::CarrierMismatch {
                left: Carrier::Group(p.order()).to_string(),
                right: Carrier::Group(n).to_string(),
            });
        }
        let blocks = p.block_system();
        let size = blocks.len();
        let mut c = vec![Rational::zero(); size * size * size];
        for s in 0..size {
            for t in 0..size {
                let base = (s * size + t) * size;
                for (&x, wx) in blocks.block(s).iter().zip(&p.weights()[s]) {
                    for (&y, wy) in blocks.block(t).iter().zip(&p.weights()[t]) {
                        let r = blocks.block_of(g.mul(x, y));
                        c[base + r] += wx * wy;
                    }
                }
            }
        }
        let identity = blocks.block_of(g.identity());
        let mut involution = Vec::with_capacity(size);
        for s in 0..size {
            let mut targets: Vec<usize> = blocks
                .block(s)
                .iter()
                .map(|&x| blocks.block_of(g.inv(x)))
                .collect();
            targets.sort_unstable();
            targets.dedup();
            if targets.len() != 1 {
                return Err(Error::InvolutionIllDefined { block: s, targets });
            }
            involution.push(targets[0]);
        }
        let haar = (0..size)
            .map(|s| Rational::from_integer((blocks.block(s).len() as i64).into()))
            .collect();
        let mut table = HypergroupTable {
            size,
            c,
            identity,
            involution,
            haar,
            modular: vec![Rational::one(); size],
        };
        table.modular = table.solve_modular();
        Ok(table)
    }

    /// `κ(s)` from `(m̃ * ε_s)({ẽ}) = κ(s) m̃(ẽ)`; the identity at the other
    /// points is checked by [`verify_djs`](Self::verify_djs).
    fn solve_modular(&self) -> Vec<Rational> {
        let e = self.identity;
        (0..self.size)
            .map(|s| {
                let lhs: Rational = (0..self.size)
                    .map(|t| &self.haar[t] * self.c(t, s, e))
                    .sum();
                lhs / &self.haar[e]
            })
            .collect()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn c(&self, s: usize, t: usize, r: usize) -> &Rational {
        &self.c[(s * self.size + t) * self.size + r]
    }

    /// The probability vector `ε_s * ε_t`.
    pub fn product(&self, s: usize, t: usize) -> &[Rational] {
        let base = (s * self.size + t) * self.size;
        &self.c[base..base + self.size]
    }

    pub fn structure_constants(&self) -> Vec<Vec<Vec<Rational>>> {
        (0..self.size)
            .map(|s| (0..self.size).map(|t| self.product(s, t).to_vec()).collect())
            .collect()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    #[inline]
    pub fn inv(&self, s: usize) -> usize {
        self.involution[s]
    }

    pub fn haar(&self) -> &[Rational] {
        &self.haar
    }

    pub fn modular(&self) -> &[Rational] {
        &self.modular
    }

    pub fn is_commutative(&self) -> bool {
        self.commutativity_witness().is_none()
    }

    pub fn commutativity_witness(&self) -> Option<(usize, usize)> {
        (0..self.size)
            .flat_map(|s| (s + 1..self.size).map(move |t| (s, t)))
            .find(|&(s, t)| self.product(s, t) != self.product(t, s))
    }

    pub fn is_unimodular(&self) -> bool {
        self.modular.iter().all(|k| k.is_one())
    }

    fn check_len<T>(&self, f: &[T]) -> Result<()> {
        if f.len() != self.size {
            return Err(Error::LengthMismatch {
                expected: self.size,
                got: f.len(),
            });
        }
        Ok(())
    }

    /// `⟨f, ε_s * ε_t⟩`.
    pub fn pair(&self, s: usize, t: usize, f: &[Scalar]) -> Scalar {
        self.product(s, t)
            .iter()
            .zip(f)
            .filter(|(w, _)| !w.is_zero())
            .fold(szero(), |acc, (w, v)| acc + scale(v, w))
    }

    /// The comultiplication `(Δ̃f)(s, t) = ⟨f, ε_s * ε_t⟩`.
    pub fn comult(&self, f: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
        self.check_len(f)?;
        Ok((0..self.size)
            .map(|s| (0..self.size).map(|t| self.pair(s, t, f)).collect())
            .collect())
    }

    /// `f̌(s) = f(š)`.
    pub fn check(&self, f: &[Scalar]) -> Result<Vec<Scalar>> {
        self.check_len(f)?;
        Ok(self.involution.iter().map(|&i| f[i].clone()).collect())
    }

    /// Convolution of measures on `Q`.
    pub fn convolve(&self, mu: &MeasureVector, nu: &MeasureVector) -> Result<MeasureVector> {
        let carrier = Carrier::Hypergroup(self.size);
        mu.expect_carrier(carrier)?;
        nu.expect_carrier(carrier)?;
        let mut out = vec![szero(); self.size];
        for (s, a) in mu.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (t, b) in nu.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (r, w) in self.product(s, t).iter().enumerate() {
                    if !w.is_zero() {
                        out[r] = &out[r] + scale(&ab, w);
                    }
                }
            }
        }
        Ok(MeasureVector::new(carrier, out))
    }

    /// Product in `L₁(Q, m̃)`:
    /// `(f*g)(s) = Σ_t m̃(t) f(t) Σ_r c[ť][s][r] g(r)`.
    pub fn l1_convolve(&self, f: &[Scalar], g: &[Scalar]) -> Result<Vec<Scalar>> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok((0..self.size)
            .map(|s| {
                (0..self.size)
                    .filter(|&t| !f[t].is_zero())
                    .fold(szero(), |acc, t| {
                        let inner = self.pair(self.inv(t), s, g);
                        acc + scale(&(&f[t] * inner), &self.haar[t])
                    })
            })
            .collect())
    }

    /// `f⋆(s) = κ(s)⁻¹ conj(f(š))`.
    pub fn l1_star(&self, f: &[Scalar]) -> Result<Vec<Scalar>> {
        self.check_len(f)?;
        Ok((0..self.size)
            .map(|s| scale(&f[self.inv(s)].conj(), &self.modular[s].recip()))
            .collect())
    }

    /// `f†(s) = conj(f(š))`.
    pub fn l1_dagger(&self, f: &[Scalar]) -> Result<Vec<Scalar>> {
        self.check_len(f)?;
        Ok((0..self.size).map(|s| f[self.inv(s)].conj()).collect())
    }

    /// The unit of `L₁(Q, m̃)`: `1_ẽ / m̃(ẽ)`.
    pub fn l1_unit(&self) -> Vec<Scalar> {
        let mut u = vec![szero(); self.size];
        u[self.identity] = real(self.haar[self.identity].recip());
        u
    }

    /// The function `f` with `f m̃ = μ`.
    pub fn density(&self, mu: &MeasureVector) -> Result<Vec<Scalar>> {
        mu.expect_carrier(Carrier::Hypergroup(self.size))?;
        Ok(mu
            .coeffs
            .iter()
            .zip(&self.haar)
            .map(|(z, m)| scale(z, &m.recip()))
            .collect())
    }

    /// The measure `f m̃`.
    pub fn measure_of(&self, f: &[Scalar]) -> Result<MeasureVector> {
        self.check_len(f)?;
        Ok(MeasureVector::new(
            Carrier::Hypergroup(self.size),
            f.iter().zip(&self.haar).map(|(z, m)| scale(z, m)).collect(),
        ))
    }

    /// Solves `Σ_t c[s][t][r] x(t) = x(r)` for all `s, r` exactly and
    /// returns the solution normalized by `x(ẽ) = 1`.
    pub fn haar_solve(&self) -> Result<MeasureVector> {
        let n = self.size;
        let mut rows = Vec::with_capacity(n * n);
        for s in 0..n {
            for r in 0..n {
                let mut row: Vec<Rational> = (0..n).map(|t| self.c(s, t, r).clone()).collect();
                row[r] -= Rational::one();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        let ns = nullspace(&rows, n);
        match ns.len() {
            0 => Err(Error::NoPositiveSolution),
            1 => {
                let x = &ns[0];
                let e = &x[self.identity];
                if e.is_zero() {
                    return Err(Error::NoPositiveSolution);
                }
                let normalized: Vec<Rational> = x.iter().map(|v| v / e).collect();
                if normalized.iter().any(|v| !v.is_positive()) {
                    return Err(Error::NoPositiveSolution);
                }
                Ok(MeasureVector::new(
                    Carrier::Hypergroup(n),
                    normalized.into_iter().map(real).collect(),
                ))
            }
            d => Err(Error::NonUniqueSolution(d)),
        }
    }

    /// Checks (H1)–(H7) on the table, together with left invariance of the
    /// stored Haar weights and the modular identity. (H3) and (H4) are
    /// continuity requirements that hold automatically on a finite
    /// discrete space.
    pub fn verify_djs(&self) -> Report {
        let n = self.size;
        let e = self.identity;
        let mut report = Report::new("hypergroup axioms (H1)-(H7)");

        let mut w = None;
        'h1: for s in 0..n {
            for t in 0..n {
                for u in 0..n {
                    let mut left = vec![Rational::zero(); n];
                    for (r, a) in self.product(s, t).iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        for (v, b) in self.product(r, u).iter().enumerate() {
                            if !b.is_zero() {
                                left[v] += a * b;
                            }
                        }
                    }
                    let mut right = vec![Rational::zero(); n];
                    for (r, a) in self.product(t, u).iter().enumerate() {
                        if a.is_zero() {
                            continue;
                        }
                        for (v, b) in self.product(s, r).iter().enumerate() {
                            if !b.is_zero() {
                                right[v] += a * b;
                            }
                        }
                    }
                    if let Some(v) = (0..n).find(|&v| left[v] != right[v]) {
                        w = Some(format!(
                            "(s,t,u,v) = ({s},{t},{u},{v}): {} != {}",
                            left[v], right[v]
                        ));
                        break 'h1;
                    }
                }
            }
        }
        report.record("H1 associativity", w);

        let w = (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .find(|&(s, t)| {
                let row = self.product(s, t);
                row.iter().any(|x| x.is_negative()) || !row.iter().sum::<Rational>().is_one()
            })
            .map(|(s, t)| format!("(s,t) = ({s},{t})"));
        report.record("H2 products are probability measures", w);
        report.automatic("H3 weak continuity", "automatic (finite discrete)");
        report.automatic("H4 support continuity", "automatic (finite discrete)");

        let w = (0..n)
            .find(|&s| {
                (0..n).any(|r| {
                    let delta = if s == r { Rational::one() } else { Rational::zero() };
                    *self.c(e, s, r) != delta || *self.c(s, e, r) != delta
                })
            })
            .map(|s| format!("s = {s}"));
        report.record("H5 identity", w);

        let mut w = (0..n)
            .find(|&s| self.inv(self.inv(s)) != s)
            .map(|s| format!("involution not involutive at s = {s}"));
        if w.is_none() {
            'h6: for s in 0..n {
                for t in 0..n {
                    for r in 0..n {
                        if self.c(s, t, self.inv(r)) != self.c(self.inv(t), self.inv(s), r) {
                            w = Some(format!("(s,t,r) = ({s},{t},{r})"));
                            break 'h6;
                        }
                    }
                }
            }
        }
        report.record("H6 involution", w);

        let w = (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .find(|&(s, t)| self.c(s, self.inv(t), e).is_positive() != (s == t))
            .map(|(s, t)| format!("(s,t) = ({s},{t})"));
        report.record("H7 identity in support iff s = t", w);

        let w = (0..n)
            .flat_map(|s| (0..n).map(move |r| (s, r)))
            .find(|&(s, r)| {
                let lhs: Rational = (0..n).map(|t| self.c(s, t, r) * &self.haar[t]).sum();
                lhs != self.haar[r]
            })
            .map(|(s, r)| format!("(s,r) = ({s},{r})"));
        report.record("left-invariant Haar measure", w);

        let w = (0..n)
            .find(|&s| !self.modular[s].is_positive())
            .map(|s| format!("kappa({s}) is not positive"))
            .or_else(|| {
                (0..n)
                    .flat_map(|s| (0..n).map(move |r| (s, r)))
                    .find(|&(s, r)| {
                        let lhs: Rational = (0..n).map(|t| &self.haar[t] * self.c(t, s, r)).sum();
                        lhs != &self.modular[s] * &self.haar[r]
                    })
                    .map(|(s, r)| format!("(s,r) = ({s},{r})"))
            });
        report.record("modular function", w);
        report
    }

    /// Checks the comultiplication form of the axioms on all basis
    /// indicators.
    pub fn verify_dual_axioms(&self) -> Report {
        let n = self.size;
        let e = self.identity;
        let mut report = Report::new("dual axioms (H~1)-(H~7)");
        let basis: Vec<Vec<Scalar>> = (0..n).map(|v| indicator(n, v)).collect();
        let deltas: Vec<Vec<Vec<Scalar>>> = basis
            .iter()
            .map(|f| self.comult(f).expect("basis length"))
            .collect();

        let mut w = None;
        'h1: for (v, d) in deltas.iter().enumerate() {
            for s in 0..n {
                for t in 0..n {
                    for u in 0..n {
                        // (Δ̃ × id)Δ̃f (s,t,u) and (id × Δ̃)Δ̃f (s,t,u)
                        let column: Vec<Scalar> = (0..n).map(|r| d[r][u].clone()).collect();
                        let left = self.pair(s, t, &column);
                        let right = self.pair(t, u, &d[s]);
                        if left != right {
                            w = Some(format!("f = 1_{v} at ({s},{t},{u})"));
                            break 'h1;
                        }
                    }
                }
            }
        }
        report.record("H~1 coassociativity", w);

        let w = deltas
            .iter()
            .enumerate()
            .find(|(_, d)| {
                d.iter()
                    .flatten()
                    .any(|z| !z.im.is_zero() || z.re.is_negative())
            })
            .map(|(v, _)| format!("f = 1_{v}"));
        report.record("H~2(a) positivity", w);
        let ones = self.comult(&vec![sone(); n]).expect("length");
        let w = (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .find(|&(s, t)| ones[s][t] != sone())
            .map(|(s, t)| format!("(s,t) = ({s},{t})"));
        report.record("H~2(b) unit", w);
        report.automatic("H~2(c) compact supports", "automatic (finite discrete, take f = 1 on Q)");
        report.automatic("H~4 support separation", "automatic (finite discrete)");

        let w = deltas
            .iter()
            .enumerate()
            .find_map(|(v, d)| {
                (0..n)
                    .find(|&s| d[e][s] != basis[v][s] || d[s][e] != basis[v][s])
                    .map(|s| format!("f = 1_{v} at s = {s}"))
            });
        report.record("H~5 counit", w);

        let mut w = (0..n)
            .find(|&v| self.check(&self.check(&basis[v]).expect("len")).expect("len") != basis[v])
            .map(|v| format!("check(check(1_{v})) != 1_{v}"));
        if w.is_none() {
            w = (0..n).find_map(|v| {
                let lhs = self.comult(&self.check(&basis[v]).expect("len")).expect("len");
                (0..n)
                    .flat_map(|s| (0..n).map(move |t| (s, t)))
                    .find(|&(s, t)| lhs[s][t] != deltas[v][self.inv(t)][self.inv(s)])
                    .map(|(s, t)| format!("function index {v} at ({s},{t})"))
            });
        }
        report.record("H~6 involution", w);

        // Among basis indicators only 1_ẽ is positive at ẽ.
        let support = &deltas[e];
        let w = (0..n)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .find(|&(s, t)| {
                let in_graph = t == self.inv(s);
                let in_support = !support[s][t].is_zero();
                in_graph != in_support
            })
            .map(|(s, t)| format!("(s,t) = ({s},{t})"));
        report.record("H~7 graph of involution", w);
        report
    }

    /// Seeded random complex-rational function on `Q`.
    pub fn random_function(&self, rng: &mut ChaCha8Rng) -> Vec<Scalar> {
        crate::scalar::random_vector(rng, self.size)
    }

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::report::Status;
    use crate::scalar::{int, rat};

    fn s3_double_coset() -> (catalog::NamedGroup, ConditionalExpectation, HypergroupTable) {
        let g = catalog::group("S3").unwrap();
        let h = vec![g.table.identity(), g.index_of("(12)").unwrap()];
        let p = ConditionalExpectation::double_coset(&g.table, &h).unwrap();
        let q = HypergroupTable::construct(&p, &g.table, 1).unwrap();
        (g, p, q)
    }

    #[test]
    fn identity_expectation_recovers_the_group() {
        let g = catalog::group("S3").unwrap().table;
        let q = HypergroupTable::construct(&ConditionalExpectation::identity(6), &g, 0).unwrap();
        for s in 0..6 {
            for t in 0..6 {
                for r in 0..6 {
                    let expected = if g.mul(s, t) == r { int(1) } else { int(0) };
                    assert_eq!(*q.c(s, t, r), expected);
                }
            }
        }
        assert!(q.haar().iter().all(|x| x.is_one()));
        assert!(q.is_unimodular());
        assert_eq!(q.involution(), g.inverses());
    }

    #[test]
    fn s3_double_coset_structure() {
        let (_, _, q) = s3_double_coset();
        assert_eq!(q.size(), 2);
        let e = q.identity();
        let a = 1 - e;
        assert_eq!(*q.c(a, a, e), rat(1, 2));
        assert_eq!(*q.c(a, a, a), rat(1, 2));
        assert_eq!(q.haar()[e], int(2));
        assert_eq!(q.haar()[a], int(4));
        assert_eq!(q.inv(a), a);
        assert!(q.is_unimodular());
        assert!(q.verify_djs().passed());
        assert!(q.verify_dual_axioms().passed());
    }

    #[test]
    fn s3_conjugation_structure() {
        let g = catalog::group("S3").unwrap();
        let p = ConditionalExpectation::conjugation(&g.table);
        let q = HypergroupTable::construct(&p, &g.table, 2).unwrap();
        let b = |name: &str| p.block_system().block_of(g.index_of(name).unwrap());
        let (e, tau, sigma) = (b("e"), b("(12)"), b("(123)"));
        let row = |s, t| -> Vec<Rational> { vec![q.c(s, t, e).clone(), q.c(s, t, tau).clone(), q.c(s, t, sigma).clone()] };
        assert_eq!(row(tau, tau), vec![rat(1, 3), int(0), rat(2, 3)]);
        assert_eq!(row(sigma, sigma), vec![rat(1, 2), int(0), rat(1, 2)]);
        assert_eq!(row(tau, sigma), vec![int(0), int(1), int(0)]);
        assert_eq!(q.haar()[e], int(1));
        assert_eq!(q.haar()[tau], int(3));
        assert_eq!(q.haar()[sigma], int(2));
    }

    #[test]
    fn haar_solve_examples() {
        let (_, _, q) = s3_double_coset();
        let x = q.haar_solve().unwrap();
        let e = q.identity();
        assert_eq!(x.coeffs[e], real(int(1)));
        assert_eq!(x.coeffs[1 - e], real(int(2)));

        let z4 = catalog::cyclic(4).table;
        let qz = HypergroupTable::construct(&ConditionalExpectation::identity(4), &z4, 0).unwrap();
        assert!(qz.haar_solve().unwrap().coeffs.iter().all(|v| *v == real(int(1))));
    }

    #[test]
    fn haar_solve_detects_non_uniqueness() {
        // Two disconnected copies of the trivial structure: every point is
        // an idempotent with c[s][t] = ε_t when s = 0.
        let c = vec![
            vec![vec![int(1), int(0)], vec![int(0), int(1)]],
            vec![vec![int(0), int(1)], vec![int(0), int(1)]],
        ];
        let t = HypergroupTable::from_parts(c, 0, vec![0, 1], Some(vec![int(1), int(1)]), None).unwrap();
        assert!(matches!(
            t.haar_solve(),
            Err(Error::NoPositiveSolution) | Err(Error::NonUniqueSolution(_))
        ));
    }

    #[test]
    fn tampered_constants_fail_left_invariance() {
        let (_, _, q) = s3_double_coset();
        let e = q.identity();
        let a = 1 - e;
        let mut c = q.structure_constants();
        c[a][a][e] = rat(2, 5);
        c[a][a][a] = rat(3, 5);
        let bad = HypergroupTable::from_parts(
            c,
            e,
            q.involution().to_vec(),
            Some(q.haar().to_vec()),
            Some(q.modular().to_vec()),
        )
        .unwrap();
        let r = bad.verify_djs();
        let check = r.get("left-invariant Haar measure").unwrap();
        assert_eq!(check.status, Status::Fail);
        assert!(check.witness.as_deref().unwrap().contains(&format!("({a},{e})")));
        assert_eq!(r.status("H7 identity in support iff s = t"), Some(Status::Pass));
    }

    #[test]
    fn swapped_involution_breaks_h7_and_h6() {
        let g = catalog::group("S3").unwrap();
        let p = ConditionalExpectation::conjugation(&g.table);
        let q = HypergroupTable::construct(&p, &g.table, 2).unwrap();
        let e = q.identity();
        let others: Vec<usize> = (0..3).filter(|&s| s != e).collect();
        let mut inv = q.involution().to_vec();
        inv.swap(others[0], others[1]);
        let bad = HypergroupTable::from_parts(
            q.structure_constants(),
            e,
            inv,
            Some(q.haar().to_vec()),
            Some(q.modular().to_vec()),
        )
        .unwrap();
        let r = bad.verify_djs();
        assert_eq!(r.status("H7 identity in support iff s = t"), Some(Status::Fail));
        assert!(r.get("H7 identity in support iff s = t").unwrap().witness.is_some());
        let d = bad.verify_dual_axioms();
        assert_eq!(d.status("H~6 involution"), Some(Status::Fail));
        assert!(d.get("H~6 involution").unwrap().witness.as_deref().unwrap().contains("function index"));
    }

    #[test]
    fn l1_unit_and_group_convolution() {
        let g = catalog::group("S3").unwrap().table;
        let q = HypergroupTable::construct(&ConditionalExpectation::identity(6), &g, 0).unwrap();
        let mut rng = HypergroupTable::rng(4);
        let f = q.random_function(&mut rng);
        let h = q.random_function(&mut rng);
        assert_eq!(q.l1_convolve(&q.l1_unit(), &f).unwrap(), f);
        assert_eq!(q.l1_convolve(&f, &q.l1_unit()).unwrap(), f);
        let conv = q.l1_convolve(&f, &h).unwrap();
        for s in 0..6 {
            let direct = (0..6).fold(szero(), |acc, t| acc + &f[t] * &h[g.mul(g.inv(t), s)]);
            assert_eq!(conv[s], direct);
        }
    }

    #[test]
    fn star_and_dagger() {
        let (_, _, q) = s3_double_coset();
        let f = vec![real(rat(1, 3)), real(rat(-2, 5))];
        assert_eq!(q.l1_star(&f).unwrap(), f);
        assert_eq!(q.l1_dagger(&f).unwrap(), f);
        let g = catalog::group("S3").unwrap();
        let p = ConditionalExpectation::conjugation(&g.table);
        let q = HypergroupTable::construct(&p, &g.table, 0).unwrap();
        for s in 0..3 {
            assert_eq!(q.l1_star(&indicator(3, s)).unwrap(), indicator(3, q.inv(s)));
        }
        let mut rng = HypergroupTable::rng(8);
        for _ in 0..8 {
            let f = q.random_function(&mut rng);
            let h = q.random_function(&mut rng);
            assert_eq!(q.l1_star(&q.l1_star(&f).unwrap()).unwrap(), f);
            let lhs = q.l1_star(&q.l1_convolve(&f, &h).unwrap()).unwrap();
            let rhs = q
                .l1_convolve(&q.l1_star(&h).unwrap(), &q.l1_star(&f).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(q.l1_star(&[sone()]).is_err());
    }

    #[test]
    fn involution_ill_defined_is_reported() {
        let g = catalog::group("S3").unwrap();
        let c = g.index_of("(123)").unwrap();
        let blocks: Vec<Vec<usize>> = (0..6)
            .map(|p| vec![p])
            .filter(|b| b[0] != c && b[0] != g.table.inv(c))
            .chain(std::iter::once(vec![c]))
            .chain(std::iter::once(vec![g.table.inv(c)]))
            .collect();
        // merge (123) with e so that its inverse (132) is split off
        let mut merged: Vec<Vec<usize>> = blocks
            .into_iter()
            .filter(|b| b[0] != c && b[0] != g.table.identity())
            .collect();
        merged.push(vec![g.table.identity(), c]);
        let p = ConditionalExpectation::uniform(crate::BlockSystem::new(6, merged).unwrap());
        assert!(matches!(
            HypergroupTable::from_expectation_unchecked(&p, &g.table),
            Err(Error::InvolutionIllDefined { .. })
        ));
        assert!(matches!(
            HypergroupTable::construct(&p, &g.table, 0),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn structural_errors() {
        assert!(HypergroupTable::from_parts(vec![], 0, vec![], None, None).is_err());
        let c = vec![vec![vec![int(1)]]];
        assert!(HypergroupTable::from_parts(c.clone(), 1, vec![0], None, None).is_err());
        assert!(HypergroupTable::from_parts(c.clone(), 0, vec![1], None, None).is_err());
        assert!(HypergroupTable::from_parts(c.clone(), 0, vec![0], Some(vec![int(0)]), None).is_err());
        assert!(HypergroupTable::from_parts(c, 0, vec![0], None, None).is_ok());
    }
}
