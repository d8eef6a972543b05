//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 4 and 5 are evaluated exactly as stated and are expected to fail;
//! `KNOWN_UNATTAINABLE` carries the reason, and the README explains the
//! measurements. Any other failing criterion makes the process exit nonzero.

#![allow(clippy::needless_range_loop)]

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vigraal::{
    render_csv, run_experiment_observed, GeometryName, RunArtifact, RunConfig, SolverKind,
};
use vigraal_core::geometry::{
    project_simplex_euclidean, project_simplex_euclidean_in_place, project_simplex_kl,
    project_simplex_kl_in_place, OpCount,
};
use vigraal_core::linalg::spectral_norm;
use vigraal_core::oracles::{
    cournot_equilibrium_oracle, euclidean_projection_oracle, kl_projection_oracle, matrix_game_gap,
};
use vigraal_core::problems::{InstanceParams, ProblemInstance};
use vigraal_core::solver::{bagraal_step, bgraal_step, default_rho, GOLDEN_RATIO};
use vigraal_core::{
    AdaptiveConfig, BoxBounds, ConstraintSpec, CournotInstance, DenseMatrix, FixedStepConfig,
    Geometry, ProblemFamily, SimplexBlock, SolverState, VIProblem,
};

const KNOWN_UNATTAINABLE: &[(usize, &str)] = &[
    (
        4,
        "fixed step phi/(2L) with L ~ 100 gives O(1/k) progress: about 4 orders and gap ~1e-2 (Euclidean) \
         in 2e4 iterations; the KL residual has a positive floor while the equilibrium has unused strategies",
    ),
    (5, "the KL runs need 6e3 to over 6e4 iterations for 4 orders; the Euclidean runs pass"),
];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

// ---------------------------------------------------------------- criterion 1

struct GeometryCase {
    name: &'static str,
    geom: Geometry,
    feasible: ConstraintSpec,
    sigma: f64,
}

fn geometry_cases() -> Vec<GeometryCase> {
    let bounds = BoxBounds::new(vec![0.0, -1.0, 2.0, -3.0], vec![1.0, 1.0, 6.0, 5.0]).unwrap();
    let blocks = vec![
        SimplexBlock::new(4, 500.0).unwrap(),
        SimplexBlock::new(4, 50.0).unwrap(),
    ];
    vec![
        GeometryCase {
            name: "euclidean",
            geom: Geometry::euclidean(5).unwrap(),
            feasible: ConstraintSpec::Free(5),
            sigma: 1.0,
        },
        GeometryCase {
            name: "negative-entropy",
            geom: Geometry::negative_entropy_simplex(5, 3.0).unwrap(),
            feasible: ConstraintSpec::simplex_product(vec![SimplexBlock::new(5, 3.0).unwrap()])
                .unwrap(),
            sigma: 1.0 / 3.0,
        },
        GeometryCase {
            name: "negative-entropy-product",
            geom: Geometry::negative_entropy(blocks.clone()).unwrap(),
            feasible: ConstraintSpec::simplex_product(blocks).unwrap(),
            sigma: 1.0 / 500.0,
        },
        GeometryCase {
            name: "fermi-dirac",
            geom: Geometry::fermi_dirac(bounds.clone()),
            feasible: ConstraintSpec::Box(bounds.clone()),
            sigma: 4.0 / 8.0,
        },
        GeometryCase {
            name: "hellinger",
            geom: Geometry::hellinger(bounds.clone()),
            feasible: ConstraintSpec::Box(bounds),
            sigma: 2.0 / 8.0,
        },
    ]
}

/// Interior point at least 5% of the width away from a box boundary, so that
/// extrapolated gradient combinations stay representable.
fn sample_core(c: &ConstraintSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match c {
        ConstraintSpec::Box(b) => b
            .lo()
            .iter()
            .zip(b.hi())
            .map(|(l, h)| l + (h - l) * rng.random_range(0.05..0.95))
            .collect(),
        other => other.sample_interior(rng),
    }
}

fn criterion_1() -> Verdict {
    const TRIPLES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 5];
    for case in geometry_cases() {
        let g = &case.geom;
        if (g.sigma() - case.sigma).abs() > 1e-15 * case.sigma {
            return verdict(
                false,
                format!(
                    "{}: sigma {} but expected {}",
                    case.name,
                    g.sigma(),
                    case.sigma
                ),
            );
        }
        let d = |a: &[f64], b: &[f64]| g.bregman_distance(a, b).unwrap();
        for _ in 0..TRIPLES {
            let x = case.feasible.sample_interior(&mut rng);
            let y = case.feasible.sample_interior(&mut rng);
            let z = case.feasible.sample_interior(&mut rng);
            let (gx, gy) = (g.gradient(&x).unwrap(), g.gradient(&y).unwrap());

            // D(z,x) - D(z,y) - D(y,x) = <∇h(x) - ∇h(y), y - z>
            let (a, b, c) = (d(&z, &x), d(&z, &y), d(&y, &x));
            let inner = dot(&sub(&gx, &gy), &sub(&y, &z));
            let mag = 1.0 + a.abs() + b.abs() + c.abs() + inner.abs();
            worst[0] = worst[0].max((a - b - c - inner).abs() / mag);

            // ∇h(y') = α ∇h(u) + (1 - α) ∇h(v)  ⇒
            // D(x,y') = α[D(x,u) - D(y',u)] + (1 - α)[D(x,v) - D(y',v)]
            let u = sample_core(&case.feasible, &mut rng);
            let v = sample_core(&case.feasible, &mut rng);
            let alpha: f64 = rng.random_range(-2.0..3.0);
            let (gu, gv) = (g.gradient(&u).unwrap(), g.gradient(&v).unwrap());
            let mix: Vec<f64> = gu
                .iter()
                .zip(&gv)
                .map(|(p, q)| alpha * p + (1.0 - alpha) * q)
                .collect();
            let yp = g.gradient_inverse(&mix).unwrap();
            let (l, t1, t2, t3, t4) = (d(&x, &yp), d(&x, &u), d(&yp, &u), d(&x, &v), d(&yp, &v));
            let r = alpha * (t1 - t2) + (1.0 - alpha) * (t3 - t4);
            let mag = 1.0
                + l.abs()
                + alpha.abs() * (t1.abs() + t2.abs())
                + (1.0 - alpha).abs() * (t3.abs() + t4.abs());
            worst[1] = worst[1].max((l - r).abs() / mag);

            // Round trips.
            worst[2] = worst[2].max(max_abs_diff(&g.gradient_inverse(&gx).unwrap(), &x));
            let t: Vec<f64> = (0..g.dim()).map(|_| rng.random_range(-5.0..5.0)).collect();
            worst[3] = worst[3].max(max_abs_diff(
                &g.gradient(&g.gradient_inverse(&t).unwrap()).unwrap(),
                &t,
            ));

            // D(x,y) >= σ/2 |x - y|^2 - 1e-12
            let gap = 0.5 * case.sigma * dot(&sub(&x, &y), &sub(&x, &y)) - d(&x, &y);
            worst[4] = worst[4].max(gap);
        }
    }
    let pass = worst[0] <= 1e-9
        && worst[1] <= 1e-9
        && worst[2] <= 1e-10
        && worst[3] <= 1e-10
        && worst[4] <= 1e-12;
    verdict(
        pass,
        format!(
            "5 geometries x {TRIPLES}: three-point {:.1e}, convex-combination {:.1e}, round trips {:.1e}/{:.1e}, \
             strong-convexity violation {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

// ---------------------------------------------------------------- criterion 2

struct Affine {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl Affine {
    /// `A = S + 0.1 B^T B` with `S` skew-symmetric, so `A` is monotone.
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let d = rng.random_range(2..=8);
        let mut a = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in (i + 1)..d {
                let s: f64 = rng.random_range(-1.0..1.0);
                a[i][j] = s;
                a[j][i] = -s;
            }
        }
        let bm: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        for i in 0..d {
            for j in 0..d {
                a[i][j] += 0.1 * (0..d).map(|k| bm[k][i] * bm[k][j]).sum::<f64>();
            }
        }
        let b = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        Affine { a, b }
    }

    fn dim(&self) -> usize {
        self.b.len()
    }

    fn eval(&self, z: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| dot(row, z) + bi)
            .collect()
    }

    fn frobenius(&self) -> f64 {
        self.a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn spectral(&self) -> f64 {
        let rows: Vec<&[f64]> = self.a.iter().map(|r| r.as_slice()).collect();
        spectral_norm(&DenseMatrix::from_rows(&rows).unwrap())
    }

    fn problem(&self, constraint: ConstraintSpec) -> VIProblem {
        let (a, b) = (self.a.clone(), self.b.clone());
        VIProblem::new(constraint, move |z, out| {
            for i in 0..out.len() {
                out[i] = dot(&a[i], z) + b[i];
            }
        })
    }
}

/// Even-numbered problems are unconstrained, odd ones live on `[-1, 1]^d`.
fn affine_constraint(k: usize, d: usize) -> (ConstraintSpec, Option<(f64, f64)>) {
    if k % 2 == 0 {
        (ConstraintSpec::Free(d), None)
    } else {
        (
            ConstraintSpec::Box(BoxBounds::uniform(d, -1.0, 1.0).unwrap()),
            Some((-1.0, 1.0)),
        )
    }
}

fn project(z: &mut [f64], bounds: Option<(f64, f64)>) {
    if let Some((lo, hi)) = bounds {
        z.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    }
}

fn criterion_2() -> Verdict {
    const PROBLEMS: usize = 20;
    const ITERS: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_fixed, mut worst_adaptive): (f64, f64) = (0.0, 0.0);
    for k in 0..PROBLEMS {
        let f = Affine::random(&mut rng);
        let d = f.dim();
        let (constraint, bounds) = affine_constraint(k, d);
        let p = f.problem(constraint);
        let g = Geometry::euclidean(d).unwrap();
        let start: Vec<f64> = (0..d).map(|_| rng.random_range(-0.9..0.9)).collect();
        let anchor: Vec<f64> = (0..d).map(|_| rng.random_range(-0.9..0.9)).collect();

        // Euclidean GRAAL with fixed step.
        let phi = GOLDEN_RATIO;
        let lambda = phi / (2.0 * f.frobenius());
        let cfg = FixedStepConfig::new(lambda, ITERS);
        let mut s = SolverState::fixed(&p, &g, &start, &anchor, lambda).unwrap();
        let (mut z, mut zbar) = (start.clone(), anchor.clone());
        for _ in 0..ITERS {
            bgraal_step(&mut s, &p, &g, &cfg).unwrap();
            zbar = z
                .iter()
                .zip(&zbar)
                .map(|(zi, bi)| ((phi - 1.0) * zi + bi) / phi)
                .collect();
            let fz = f.eval(&z);
            z = zbar
                .iter()
                .zip(&fz)
                .map(|(bi, fi)| bi - lambda * fi)
                .collect();
            project(&mut z, bounds);
            worst_fixed = worst_fixed
                .max(max_abs_diff(&s.z, &z))
                .max(max_abs_diff(&s.zbar, &zbar));
        }

        // Adaptive GRAAL (sigma = 1), started from z_1 = zbar_0 with theta_0 = 1.
        let mut acfg = AdaptiveConfig::new(0.5 / f.frobenius(), ITERS);
        acfg.lambda_max = 1e6;
        let (phi, rho) = (acfg.phi, acfg.rho);
        let mut s = SolverState::adaptive(&p, &g, &start, &anchor, acfg.lambda0).unwrap();
        let (mut z_prev, mut z, mut zbar) = (start.clone(), anchor.clone(), anchor.clone());
        let (mut lam_prev, mut theta) = (acfg.lambda0, 1.0);
        for _ in 0..ITERS {
            let rec = bagraal_step(&mut s, &p, &g, &acfg).unwrap();
            let (fz, fz_prev) = (f.eval(&z), f.eval(&z_prev));
            let (dz, df) = (sub(&z, &z_prev), sub(&fz, &fz_prev));
            let ratio = if dot(&df, &df) == 0.0 {
                f64::INFINITY
            } else {
                phi * theta / (4.0 * lam_prev) * dot(&dz, &dz) / dot(&df, &df)
            };
            let lam = (rho * lam_prev).min(ratio).min(acfg.lambda_max);
            zbar = z
                .iter()
                .zip(&zbar)
                .map(|(zi, bi)| ((phi - 1.0) * zi + bi) / phi)
                .collect();
            let mut next: Vec<f64> = zbar.iter().zip(&fz).map(|(bi, fi)| bi - lam * fi).collect();
            project(&mut next, bounds);
            theta = lam * phi / lam_prev;
            lam_prev = lam;
            z_prev = std::mem::replace(&mut z, next);
            worst_adaptive = worst_adaptive
                .max(max_abs_diff(&s.z, &z))
                .max(max_abs_diff(&s.zbar, &zbar))
                .max((rec.lambda - lam).abs() / lam)
                .max((rec.theta - theta).abs() / theta);
        }
    }
    verdict(
        worst_fixed <= 1e-12 && worst_adaptive <= 1e-12,
        format!(
            "{PROBLEMS} problems x {ITERS} iterations: fixed max deviation {worst_fixed:.1e}, adaptive {worst_adaptive:.1e}"
        ),
    )
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Verdict {
    const VECTORS: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut kl_dev, mut eu_dev): (f64, f64) = (0.0, 0.0);
    let mut single_pass = true;
    let mut euclid_comparisons_at_6 = 0;
    for _ in 0..VECTORS {
        let n = rng.random_range(1..=6);
        let scale = rng.random_range(0.1..10.0);
        let x: Vec<f64> = (0..n)
            .map(|_| 10f64.powf(rng.random_range(-3.0..3.0)))
            .collect();
        kl_dev = kl_dev.max(max_abs_diff(
            &project_simplex_kl(&x, scale).unwrap(),
            &kl_projection_oracle(&x, scale).unwrap(),
        ));

        let mut ops = OpCount::default();
        let mut v = x.clone();
        project_simplex_kl_in_place(&mut v, scale, &mut ops).unwrap();
        // One read to accumulate and one to rescale per element, one sign
        // check each: a sort would need more comparisons for n >= 3.
        single_pass &= ops.element_reads == 2 * n && ops.comparisons == n;

        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        eu_dev = eu_dev.max(max_abs_diff(
            &project_simplex_euclidean(&y, scale).unwrap(),
            &euclidean_projection_oracle(&y, scale).unwrap(),
        ));
        if n == 6 {
            let mut ops = OpCount::default();
            let (mut w, mut sorted) = (y.clone(), vec![0.0; n]);
            project_simplex_euclidean_in_place(&mut w, scale, &mut sorted, &mut ops).unwrap();
            euclid_comparisons_at_6 = euclid_comparisons_at_6.max(ops.comparisons);
        }
    }
    verdict(
        kl_dev <= 1e-10 && eu_dev <= 1e-8 && single_pass,
        format!(
            "{VECTORS} vectors: KL {kl_dev:.1e}, Euclidean {eu_dev:.1e}; KL op count single-pass: {single_pass} \
             (Euclidean uses up to {euclid_comparisons_at_6} comparisons at n = 6)"
        ),
    )
}

// ---------------------------------------------------------------- criteria 4-6

struct Runs {
    matrix: Vec<(GeometryName, RunConfig, RunArtifact)>,
    gaussian: Vec<(GeometryName, RunConfig, RunArtifact)>,
    cournot: Vec<(GeometryName, RunConfig, RunArtifact)>,
}

fn residual_ratio(art: &RunArtifact) -> f64 {
    art.reps
        .iter()
        .map(|r| r.trace.best_residual_sq() / r.trace.records[0].residual_sq)
        .fold(0.0, f64::max)
}

fn criterion_4(runs: &mut Runs) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for geometry in [GeometryName::Euclidean, GeometryName::Kl] {
        let mut cfg = RunConfig::new(
            ProblemFamily::MatrixGame,
            geometry,
            SolverKind::Fixed,
            50,
            20_000,
        );
        cfg.reps = 10;
        let art = run_experiment_observed(&cfg, |_, _, _| {}).unwrap();
        let mut step_ok = true;
        let mut worst_gap: f64 = 0.0;
        for rep in &art.reps {
            let InstanceParams::MatrixGame(m) = &rep.instance.params else {
                unreachable!()
            };
            step_ok &= (rep.summary.lambda0 - GOLDEN_RATIO / (2.0 * spectral_norm(&m.distances)))
                .abs()
                <= 1e-15;
            let (x, y) = rep.trace.final_zbar.split_at(m.n);
            worst_gap = worst_gap.max(matrix_game_gap(&m.distances, x, y));
        }
        let ratio = residual_ratio(&art);
        let ok = step_ok && ratio <= 1e-6 && worst_gap <= 1e-3;
        pass &= ok;
        parts.push(format!(
            "{}: worst reduction {ratio:.1e}, worst gap {worst_gap:.1e}, step phi/(2|M|) {step_ok}",
            geometry.as_str()
        ));
        runs.matrix.push((geometry, cfg, art));
    }
    verdict(pass, parts.join("; "))
}

fn criterion_5(runs: &mut Runs) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for geometry in [GeometryName::Euclidean, GeometryName::Kl] {
        let mut cfg = RunConfig::new(
            ProblemFamily::Gaussian,
            geometry,
            SolverKind::Adaptive,
            10,
            5_000,
        );
        cfg.reps = 10;
        let mut sum_dev: f64 = 0.0;
        // The primal iterates z_k are feasible. Under KL the extrapolated
        // point is a weighted geometric mean and only has block sums <= (P, N).
        let art = run_experiment_observed(&cfg, |_, s, _| {
            let (p, n) = s.z.split_at(10);
            sum_dev = sum_dev
                .max((p.iter().sum::<f64>() - 500.0).abs())
                .max((n.iter().sum::<f64>() - 50.0).abs());
        })
        .unwrap();
        let expected_factor = if geometry == GeometryName::Kl {
            1e-2
        } else {
            1.0
        };
        let factor_ok = art
            .reps
            .iter()
            .all(|r| r.summary.lambda0_factor == Some(expected_factor));
        let ratio = residual_ratio(&art);
        let ok = ratio <= 1e-4 && sum_dev <= 1e-9 && factor_ok;
        pass &= ok;
        parts.push(format!(
            "{}: {} worst reduction {ratio:.1e}, block-sum deviation {sum_dev:.1e}, lambda0 factor {expected_factor:e} {factor_ok}",
            geometry.as_str(),
            if ok { "pass" } else { "FAIL" },
        ));
        runs.gaussian.push((geometry, cfg, art));
    }
    verdict(pass, parts.join("; "))
}

fn symmetric_cournot() -> ProblemInstance {
    ProblemInstance {
        size: 5,
        seed: 0,
        params: InstanceParams::Cournot(
            CournotInstance::symmetric(5, 10.0, 1.0, 4.0, 10.0).unwrap(),
        ),
    }
}

fn criterion_6(runs: &mut Runs) -> Verdict {
    let inst = symmetric_cournot();
    let InstanceParams::Cournot(ci) = &inst.params else {
        unreachable!()
    };
    let oracle = cournot_equilibrium_oracle(ci).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for geometry in [
        GeometryName::FermiDirac,
        GeometryName::Hellinger,
        GeometryName::Euclidean,
    ] {
        let mut cfg = RunConfig::new(
            ProblemFamily::Cournot,
            geometry,
            SolverKind::Adaptive,
            5,
            5_000,
        );
        cfg.reps = 10;
        cfg.instance = Some(inst.clone());
        let mut interior = true;
        let art = run_experiment_observed(&cfg, |_, s, _| {
            interior &= s.z.iter().chain(&s.zbar).all(|v| *v > 0.0 && *v < 10.0);
        })
        .unwrap();
        let target = if geometry == GeometryName::Euclidean {
            oracle.clone()
        } else {
            vec![1.0; 5]
        };
        let dev = art
            .reps
            .iter()
            .map(|r| max_abs_diff(&r.trace.final_z, &target))
            .fold(0.0, f64::max);
        let ok = dev <= 1e-6 && (geometry == GeometryName::Euclidean || interior);
        pass &= ok;
        let against = if geometry == GeometryName::Euclidean {
            "best-response oracle"
        } else {
            "x = 1"
        };
        let inside = if geometry == GeometryName::Euclidean {
            String::new()
        } else {
            format!(", strictly interior {interior}")
        };
        parts.push(format!(
            "{}: deviation from {against} {dev:.1e}{inside}",
            geometry.as_str()
        ));
        runs.cournot.push((geometry, cfg, art));
    }
    verdict(pass, parts.join("; "))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7(runs: &Runs) -> Verdict {
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut worst_lip: f64 = f64::NEG_INFINITY;
    for (_, _, art) in &runs.matrix {
        for rep in &art.reps {
            checked += rep.trace.records.len();
            violations += rep.trace.records.iter().filter(|r| r.lambda > 1e6).count();
        }
    }
    for (_, _, art) in runs.gaussian.iter().chain(&runs.cournot) {
        for rep in &art.reps {
            let s = &rep.summary;
            let rho = s.rho.expect("adaptive run");
            for r in &rep.trace.records {
                checked += 1;
                let bound = (s.sigma * r.theta * r.theta_prev).sqrt() / 2.0 * r.step_norm;
                let lip = r.lambda * r.operator_diff_norm - bound;
                worst_lip = worst_lip.max(lip);
                if r.lambda > 1e6 || r.theta > rho * s.phi * (1.0 + 1e-12) || lip > 1e-9 {
                    violations += 1;
                }
            }
        }
    }

    // Lower bound on globally Lipschitz affine problems.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_margin = f64::INFINITY;
    for _ in 0..20 {
        let f = Affine::random(&mut rng);
        let d = f.dim();
        let p = f.problem(ConstraintSpec::Free(d));
        let g = Geometry::euclidean(d).unwrap();
        let l = f.spectral();
        let start: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let anchor: Vec<f64> = start
            .iter()
            .map(|v| v + rng.random_range(-1e-3..1e-3))
            .collect();
        let cfg = AdaptiveConfig::new(1.0 / l, 200);
        let floor = g.sigma() * cfg.phi * cfg.phi / (4.0 * l * l * cfg.lambda_max);
        let mut s = SolverState::adaptive(&p, &g, &start, &anchor, cfg.lambda0).unwrap();
        for _ in 0..200 {
            let rec = bagraal_step(&mut s, &p, &g, &cfg).unwrap();
            checked += 1;
            worst_margin = worst_margin.min(rec.lambda - floor);
            if rec.lambda < floor - 1e-12
                || rec.theta > default_rho(cfg.phi) * cfg.phi * (1.0 + 1e-12)
            {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0,
        format!(
            "{checked} iterations checked, {violations} violations; worst lambda|dF| - bound {worst_lip:.1e}, \
             smallest lambda above the affine floor {worst_margin:.1e}"
        ),
    )
}

// ---------------------------------------------------------------- criterion 8

fn cli_args(cfg: &RunConfig, instance: Option<&Path>, out: &Path) -> Vec<String> {
    let solver = match cfg.solver {
        SolverKind::Fixed => "fixed",
        SolverKind::Adaptive => "adaptive",
    };
    let mut args: Vec<String> = [
        "run",
        "--problem",
        cfg.problem.name(),
        "--geometry",
        cfg.geometry.as_str(),
        "--solver",
        solver,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    args.extend([
        "--size".into(),
        cfg.size.to_string(),
        "--iters".into(),
        cfg.iters.to_string(),
        "--reps".into(),
        cfg.reps.to_string(),
        "--seed".into(),
        cfg.seed.to_string(),
        "--out".into(),
        out.display().to_string(),
    ]);
    if let Some(p) = instance {
        args.extend(["--instance".into(), p.display().to_string()]);
    }
    args
}

fn criterion_8(runs: &Runs) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let instance_path = dir.path().join("cournot-symmetric.json");
    std::fs::write(
        &instance_path,
        serde_json::to_string(&symmetric_cournot()).unwrap(),
    )
    .unwrap();
    let mut commands = 0;
    let mut mismatches = Vec::new();
    let all = runs
        .matrix
        .iter()
        .chain(&runs.gaussian)
        .chain(&runs.cournot);
    for (i, (geometry, cfg, art)) in all.enumerate() {
        let instance = cfg.instance.as_ref().map(|_| instance_path.as_path());
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let out = dir.path().join(format!("run{i}-{attempt}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_vigraal"))
                .args(cli_args(cfg, instance, &out))
                .output()
                .unwrap();
            if !status.status.success() {
                mismatches.push(format!(
                    "{} {}: exit {}",
                    cfg.problem,
                    geometry.as_str(),
                    status.status
                ));
            }
            outputs.push(std::fs::read(&out).unwrap_or_default());
            commands += 1;
        }
        if outputs[0] != outputs[1] || outputs[0] != render_csv(art).into_bytes() {
            mismatches.push(format!("{} {}", cfg.problem, geometry.as_str()));
        }
    }
    verdict(
        mismatches.is_empty(),
        format!(
            "{commands} CLI invocations of the criterion 4-6 commands; reruns byte-identical and equal to the \
             library CSV{}",
            if mismatches.is_empty() { String::new() } else { format!(", mismatches: {}", mismatches.join(", ")) }
        ),
    )
}

// ---------------------------------------------------------------- driver

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let mut v = f();
    let elapsed = start.elapsed();
    match budget {
        Some(b) => {
            v.detail.push_str(&format!(
                " [{:.2} s of {} s]",
                elapsed.as_secs_f64(),
                b.as_secs()
            ));
            v.pass &= elapsed <= b;
        }
        None => v
            .detail
            .push_str(&format!(" [{:.2} s]", elapsed.as_secs_f64())),
    }
    v
}

fn main() {
    // Ignore libtest flags such as `--nocapture` or `--quiet`; only a listing
    // request needs an answer.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let secs = |s| Some(Duration::from_secs(s));
    let mut runs = Runs {
        matrix: Vec::new(),
        gaussian: Vec::new(),
        cournot: Vec::new(),
    };
    let mut results = vec![
        (1, "geometry identities", timed(secs(5), criterion_1)),
        (2, "Euclidean reduction", timed(secs(5), criterion_2)),
        (3, "projection oracles", timed(secs(5), criterion_3)),
    ];
    results.push((4, "matrix game", timed(secs(60), || criterion_4(&mut runs))));
    results.push((
        5,
        "Gaussian channels",
        timed(secs(30), || criterion_5(&mut runs)),
    ));
    results.push((6, "Cournot", timed(secs(30), || criterion_6(&mut runs))));
    results.push((
        7,
        "adaptive step-size law",
        timed(None, || criterion_7(&runs)),
    ));
    results.push((8, "determinism", timed(None, || criterion_8(&runs))));

    let mut unexpected = 0;
    for (n, name, v) in &results {
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| k == n);
        println!(
            "criterion {n} ({name}): {} - {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        match (v.pass, known) {
            (false, Some((_, why))) => println!("    known unattainable: {why}"),
            (false, None) => unexpected += 1,
            _ => {}
        }
    }
    let passed = results.iter().filter(|(_, _, v)| v.pass).count();
    println!(
        "acceptance: {passed}/{} criteria pass, {unexpected} unexpected failures",
        results.len()
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
