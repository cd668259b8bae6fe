#![allow(dead_code)]

use hypergroup_core::catalog::{self, NamedGroup};
use hypergroup_core::representation::left_regular;
use hypergroup_core::scalar::{rat, Scalar, C64};
use hypergroup_core::{BlockSystem, ConditionalExpectation, GroupTable, HypergroupTable};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub label: String,
    pub group: NamedGroup,
    pub p: ConditionalExpectation,
    pub h: HypergroupTable,
}

impl Instance {
    pub fn g(&self) -> &GroupTable {
        &self.group.table
    }
}

fn build(group: &str, builder: &str) -> Instance {
    let g = catalog::group(group).unwrap();
    let p = match builder {
        "id" => ConditionalExpectation::identity(g.table.order()),
        "conjugation" => ConditionalExpectation::conjugation(&g.table),
        "double_coset" => {
            let h = vec![g.table.identity(), g.index_of("(12)").unwrap()];
            ConditionalExpectation::double_coset(&g.table, &h).unwrap()
        }
        "automorphism_orbit" => {
            let n = g.table.order();
            let autos: Vec<Vec<usize>> = (1..n)
                .filter(|k| (1..n).all(|x| k * x % n != 0))
                .map(|k| (0..n).map(|x| k * x % n).collect())
                .collect();
            ConditionalExpectation::automorphism_orbit(&g.table, &autos).unwrap()
        }
        other => panic!("unknown builder {other}"),
    };
    let h = HypergroupTable::construct(&p, &g.table, 7)
        .unwrap_or_else(|e| panic!("{group} x {builder}: {e}"));
    Instance {
        label: format!("{group} x {builder}"),
        group: g,
        p,
        h,
    }
}

/// The instance set used for the spectral criteria: every hypergroup has at
/// most six points.
pub fn catalog_instances() -> Vec<Instance> {
    let mut out: Vec<Instance> = (2..=6).map(|n| build(&format!("Z{n}"), "id")).collect();
    for b in ["id", "double_coset", "conjugation"] {
        out.push(build("S3", b));
    }
    for g in ["S4", "D4", "Q8"] {
        out.push(build(g, "conjugation"));
    }
    out.push(build("Z5", "automorphism_orbit"));
    out
}

/// The spectral set plus the larger cyclic groups.
pub fn axiom_instances() -> Vec<Instance> {
    let mut out = catalog_instances();
    out.extend((7..=12).map(|n| build(&format!("Z{n}"), "id")));
    out
}

pub fn s3_block(g: &NamedGroup, names: &[&str]) -> Vec<usize> {
    names.iter().map(|n| g.index_of(n).unwrap()).collect()
}

/// Even and odd permutations of S3, odd weights skewed towards (12).
pub fn s3_skewed_even_odd() -> (NamedGroup, ConditionalExpectation) {
    let g = catalog::group("S3").unwrap();
    let blocks = BlockSystem::new(
        6,
        vec![
            s3_block(&g, &["e", "(123)", "(132)"]),
            s3_block(&g, &["(12)", "(13)", "(23)"]),
        ],
    )
    .unwrap();
    let p = ConditionalExpectation::new(
        blocks,
        vec![vec![rat(1, 3); 3], vec![rat(1, 2), rat(1, 4), rat(1, 4)]],
    )
    .unwrap();
    (g, p)
}

/// Conjugacy classes of S3 with the transposition weights skewed the same way.
pub fn s3_skewed_classes() -> (NamedGroup, ConditionalExpectation) {
    let g = catalog::group("S3").unwrap();
    let blocks = BlockSystem::new(
        6,
        vec![
            s3_block(&g, &["e"]),
            s3_block(&g, &["(12)", "(13)", "(23)"]),
            s3_block(&g, &["(123)", "(132)"]),
        ],
    )
    .unwrap();
    let p = ConditionalExpectation::new(
        blocks,
        vec![
            vec![rat(1, 1)],
            vec![rat(1, 2), rat(1, 4), rat(1, 4)],
            vec![rat(1, 2), rat(1, 2)],
        ],
    )
    .unwrap();
    (g, p)
}

/// `f * g` computed on the group: lift `f m̃` and `g m̃` with `P*`, convolve
/// on `G`, push forward to `Q` and divide by `m̃`.
pub fn g_side_convolve(inst: &Instance, f: &[Scalar], g: &[Scalar]) -> Vec<Scalar> {
    let h = &inst.h;
    let lift = |x: &[Scalar]| inst.p.adjoint(&h.measure_of(x).unwrap()).unwrap();
    let conv = inst.g().convolve(&lift(f), &lift(g)).unwrap();
    h.density(&inst.p.pushforward(&conv).unwrap()).unwrap()
}

fn combination(hats: &[DMatrix<C64>], mu: &[C64]) -> DMatrix<C64> {
    let n = hats[0].nrows();
    let mut x = DMatrix::<C64>::zeros(n, n);
    for (l, m) in hats.iter().zip(mu) {
        x += l * *m;
    }
    x
}

fn ratio(a: &[C64], hats: &[DMatrix<C64>], mu: &[C64]) -> f64 {
    let op = combination(hats, mu).svd(false, false).singular_values.max();
    let value: C64 = a.iter().zip(mu).map(|(p, q)| p * q).sum();
    if op <= 0.0 {
        0.0
    } else {
        value.norm() / op
    }
}

/// Coordinates of the Hilbert-Schmidt projection of `x` onto the span of
/// the generators.
fn coordinates(hats: &[DMatrix<C64>], x: &DMatrix<C64>) -> Vec<C64> {
    let k = hats.len();
    let gram = DMatrix::<C64>::from_fn(k, k, |t, s| (hats[t].adjoint() * &hats[s]).trace());
    let rhs = nalgebra::DVector::<C64>::from_fn(k, |t, _| (hats[t].adjoint() * x).trace());
    gram.lu().solve(&rhs).map(|v| v.iter().copied().collect()).unwrap_or_else(|| vec![C64::new(0.0, 0.0); k])
}

/// The unitary part `W V^H` of `x = W Σ V^H`, expressed in generator
/// coordinates.
fn snap(hats: &[DMatrix<C64>], mu: &[C64]) -> Vec<C64> {
    let svd = combination(hats, mu).svd(true, true);
    let u = svd.u.expect("u") * svd.v_t.expect("v_t");
    coordinates(hats, &u)
}

/// Direct estimate of `sup |Σ_s a(s)μ_s| / ‖Σ_s μ_s L_s‖` using
/// `evaluations` objective calls: random restarts refined by a random walk,
/// where every proposal is also tried after replacing the operator by its
/// unitary polar part.
pub fn sampled_dual_norm(a: &[Scalar], h: &HypergroupTable, evaluations: usize, seed: u64) -> f64 {
    let hats: Vec<DMatrix<C64>> = left_regular(h).iter().map(|l| l.hat()).collect();
    let a: Vec<C64> = a.iter().map(hypergroup_core::scalar::to_c64).collect();
    let n = h.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = |rng: &mut ChaCha8Rng| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let restarts = 10;
    let per = evaluations / restarts / 2;
    let mut best = 0.0f64;
    for _ in 0..restarts {
        let mut mu: Vec<C64> = (0..n).map(|_| gauss(&mut rng)).collect();
        let mut value = ratio(&a, &hats, &mu);
        // step relative to |mu|, adapted by the one-fifth success rule
        let mut step = 0.3;
        for _ in 1..per {
            let size = mu.iter().map(|m| m.norm_sqr()).sum::<f64>().sqrt();
            let cand: Vec<C64> = mu.iter().map(|m| m + gauss(&mut rng) * (step * size)).collect();
            let snapped = snap(&hats, &cand);
            let (v1, v2) = (ratio(&a, &hats, &cand), ratio(&a, &hats, &snapped));
            let (v, c) = if v2 > v1 { (v2, snapped) } else { (v1, cand) };
            if v > value {
                mu = c;
                value = v;
                step *= 1.5;
            } else {
                step *= 0.9;
            }
            step = step.clamp(1e-6, 1.0);
        }
        best = best.max(value);
    }
    best
}

/// `‖R‖₁` for the element `R` of the span with `tr(R L_t) = a(t)`. On the
/// algebra itself this is the exact norm of the functional, computed
/// without any block structure.
pub fn trace_pairing_norm(a: &[Scalar], h: &HypergroupTable) -> f64 {
    let hats: Vec<DMatrix<C64>> = left_regular(h).iter().map(|l| l.hat()).collect();
    let k = hats.len();
    let gram = DMatrix::<C64>::from_fn(k, k, |t, s| (&hats[s] * &hats[t]).trace());
    let rhs = nalgebra::DVector::<C64>::from_fn(k, |t, _| hypergroup_core::scalar::to_c64(&a[t]));
    let r = gram.lu().solve(&rhs).expect("generators are independent");
    let rep = combination(&hats, &r.iter().copied().collect::<Vec<_>>());
    rep.svd(false, false).singular_values.sum()
}
