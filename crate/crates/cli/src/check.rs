//! Self-checks run by `vigraal check`: each suite compares an implementation
//! against an independent oracle from `vigraal_core::oracles`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vigraal_core::geometry::{project_simplex_euclidean, project_simplex_kl};
use vigraal_core::oracles::{
    cournot_equilibrium_oracle, euclidean_projection_oracle, finite_difference_gradient,
    kl_projection_oracle, OracleReport,
};
use vigraal_core::problems::gaussian::{capacity_grad_noise, capacity_grad_power};
use vigraal_core::problems::{gaussian_capacity, generate_instance, InstanceParams};
use vigraal_core::solver::{run, NullClock};
use vigraal_core::vi::monotonicity_check;
use vigraal_core::{AdaptiveConfig, CournotInstance, Geometry, ProblemFamily, SolverConfig};

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn from_worst(name: &'static str, worst: f64, tol: f64, cases: usize) -> Self {
        CheckOutcome {
            name,
            passed: worst <= tol,
            detail: format!("max deviation {worst:.3e} over {cases} cases (tolerance {tol:.0e})"),
        }
    }
}

fn random_positive(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(1e-3..10.0)).collect()
}

fn kl_projection(rng: &mut ChaCha8Rng, cases: usize) -> Result<CheckOutcome, HarnessError> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.random_range(1..=6);
        let x = random_positive(rng, n);
        let scale = rng.random_range(0.1..100.0);
        let r = OracleReport::compare(
            "kl",
            kl_projection_oracle(&x, scale)?,
            project_simplex_kl(&x, scale)?,
            1e-10,
        );
        worst = worst.max(r.max_abs_dev);
    }
    Ok(CheckOutcome::from_worst(
        "kl-projection",
        worst,
        1e-10,
        cases,
    ))
}

fn euclidean_projection(rng: &mut ChaCha8Rng, cases: usize) -> Result<CheckOutcome, HarnessError> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.random_range(1..=6);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let scale = rng.random_range(0.1..10.0);
        let r = OracleReport::compare(
            "euclidean",
            euclidean_projection_oracle(&x, scale)?,
            project_simplex_euclidean(&x, scale)?,
            1e-8,
        );
        worst = worst.max(r.max_abs_dev);
    }
    Ok(CheckOutcome::from_worst(
        "euclidean-projection",
        worst,
        1e-8,
        cases,
    ))
}

/// Relative deviation of the operator from central differences of the
/// objectives it is derived from.
fn operator_gradients(rng: &mut ChaCha8Rng, cases: usize) -> Result<CheckOutcome, HarnessError> {
    const H: f64 = 1e-6;
    let mut worst: f64 = 0.0;
    let mut rel = |fd: &[f64], op: &[f64]| {
        for (a, b) in fd.iter().zip(op) {
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    };
    for _ in 0..cases {
        let seed = rng.random();
        let mg = generate_instance(ProblemFamily::MatrixGame, 5, seed)?;
        let z = mg.constraint().sample_interior(rng);
        let f = mg.problem()?.eval(&z)?;
        let InstanceParams::MatrixGame(inst) = &mg.params else {
            unreachable!()
        };
        let (x, y) = z.split_at(5);
        // f(x, y) = <M x, y>; the operator is (grad_x f, -grad_y f).
        let bil = |x: &[f64], y: &[f64]| -> f64 {
            inst.distances
                .mul_vec(x)
                .iter()
                .zip(y)
                .map(|(a, b)| a * b)
                .sum()
        };
        rel(&finite_difference_gradient(|v| bil(v, y), x, H), &f[..5]);
        let neg: Vec<f64> = f[5..].iter().map(|v| -v).collect();
        rel(&finite_difference_gradient(|v| bil(x, v), y, H), &neg);

        let gi = generate_instance(ProblemFamily::Gaussian, 4, seed)?;
        let InstanceParams::Gaussian(g) = &gi.params else {
            unreachable!()
        };
        let z = gi.constraint().sample_interior(rng);
        let (p, n) = z.split_at(4);
        let mut gp = vec![0.0; 4];
        let mut gn = vec![0.0; 4];
        capacity_grad_power(p, n, g, &mut gp);
        capacity_grad_noise(p, n, g, &mut gn);
        rel(
            &finite_difference_gradient(|v| gaussian_capacity(v, n, g), p, H),
            &gp,
        );
        rel(
            &finite_difference_gradient(|v| gaussian_capacity(p, v, g), n, H),
            &gn,
        );

        let ci = generate_instance(ProblemFamily::Cournot, 4, seed)?;
        let InstanceParams::Cournot(c) = &ci.params else {
            unreachable!()
        };
        let x = ci.constraint().sample_interior(rng);
        let f = ci.problem()?.eval(&x)?;
        for firm in 0..4 {
            let g = finite_difference_gradient(|v| c.utility(v, firm), &x, H);
            rel(&[-g[firm]], &f[firm..=firm]);
        }
    }
    Ok(CheckOutcome::from_worst(
        "operator-gradients",
        worst,
        1e-6,
        cases,
    ))
}

fn monotonicity(seed: u64) -> Result<CheckOutcome, HarnessError> {
    let mut worst = f64::INFINITY;
    let mut passed = true;
    for family in [
        ProblemFamily::MatrixGame,
        ProblemFamily::Gaussian,
        ProblemFamily::Cournot,
    ] {
        let inst = generate_instance(family, 6, seed)?;
        let report = monotonicity_check(&inst.problem()?, 500, seed)?;
        passed &= report.passed;
        worst = worst.min(report.min_inner / report.scale);
    }
    Ok(CheckOutcome {
        name: "monotonicity",
        passed,
        detail: format!("min scaled <dF, dz> = {worst:.3e} over 3 families"),
    })
}

/// Adaptive Hellinger solve of a symmetric Cournot game against the
/// best-response oracle.
fn cournot_equilibrium() -> Result<CheckOutcome, HarnessError> {
    let inst = CournotInstance::symmetric(5, 10.0, 1.0, 4.0, 10.0)?;
    let oracle = cournot_equilibrium_oracle(&inst)?;
    let problem = vigraal_core::problems::cournot_problem(&inst);
    let geom = Geometry::hellinger(inst.bounds());
    let z0 = vec![5.0; 5];
    let zbar0: Vec<f64> = (0..5).map(|i| 5.0 + 0.01 * (i as f64 + 1.0)).collect();
    let cfg = SolverConfig::Adaptive(AdaptiveConfig::new(1.0, 5000));
    let trace = run(&problem, &geom, &cfg, &z0, &zbar0, &NullClock)?;
    let r = OracleReport::compare("cournot", oracle, trace.final_z, 1e-6);
    Ok(CheckOutcome {
        name: "cournot-equilibrium",
        passed: r.passed,
        detail: format!(
            "max deviation {:.3e} from best responses (tolerance 1e-6)",
            r.max_abs_dev
        ),
    })
}

/// Runs every suite; errors inside a suite become failed outcomes.
pub fn run_checks(seed: u64, cases: usize) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites: [(&'static str, Result<CheckOutcome, HarnessError>); 5] = [
        ("kl-projection", kl_projection(&mut rng, cases)),
        (
            "euclidean-projection",
            euclidean_projection(&mut rng, cases),
        ),
        (
            "operator-gradients",
            operator_gradients(&mut rng, cases.div_ceil(10)),
        ),
        ("monotonicity", monotonicity(seed)),
        ("cournot-equilibrium", cournot_equilibrium()),
    ];
    suites
        .into_iter()
        .map(|(name, r)| {
            r.unwrap_or_else(|e| CheckOutcome {
                name,
                passed: false,
                detail: e.to_string(),
            })
        })
        .collect()
}
