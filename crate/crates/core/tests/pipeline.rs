use ssburgers::coefficients::DEFAULT_TOLERANCE;
use ssburgers::dynamics::{sample_stationary, simulate, Trajectory};
use ssburgers::fields::{bg_discrepancy, field_series, martingale_decomposition, Functional, TestFunction, Weight};
use ssburgers::seeding::derive_seed;
use ssburgers::stats::{pairwise, run_ensemble, Execution, Experiment};
use ssburgers::symbolic::GeneratorParams;
use ssburgers::ModelCoefficients;

fn params(n: usize) -> GeneratorParams<f64> {
    let mut c = ModelCoefficients::zeros(2).unwrap();
    for k in 0..2 {
        c.set_alpha(k, 1.0).unwrap();
        c.set_beta(k, 1, 1.0).unwrap();
        c.set_gamma(k, 1, 0.5).unwrap();
    }
    GeneratorParams::new(c, (n as f64).powf(-0.5), n, &DEFAULT_TOLERANCE).unwrap()
}

fn trajectory(n: usize, steps: u64, stride: u64, seed: u64) -> Trajectory {
    let p = params(n);
    let init = sample_stationary(2, n, seed).unwrap();
    simulate(&init, &p, 0.01, steps, stride, seed).unwrap()
}

#[test]
fn streaming_ensemble_matches_stored_trajectories() {
    let n = 16;
    let phi = TestFunction::Cos(1);
    let fs = vec![
        Functional::Field { phi: phi.clone(), k: 1 },
        Functional::Martingale { phi: phi.clone(), k: 0 },
        Functional::BoltzmannGibbs {
            phi: phi.clone(),
            k: 0,
            l: 2,
            weight: Weight::Gradient,
        },
    ];
    let exp = Experiment::new(params(n), 0.01, 0.01, 4, fs).unwrap();
    let base = 99;
    let res = run_ensemble(&exp, 3, base, Execution::default()).unwrap();
    for i in 0..3 {
        let seed = derive_seed(base, i as u64);
        let traj = trajectory(n, exp.n_steps(), 4, seed);
        let x = field_series(&traj, &phi, 1).unwrap().final_value();
        let (_, _, m) = martingale_decomposition(&traj, &phi, 0).unwrap();
        let bg = bg_discrepancy(&traj, &phi, 0, 2, 0.01).unwrap();
        assert!((res[0].values[i] - x).abs() < 1e-12);
        assert!((res[1].values[i] - m.final_value()).abs() < 1e-12);
        assert!((res[2].values[i] - bg).abs() < 1e-12);
    }
}

#[test]
fn saved_trajectory_reproduces_fields() {
    let dir = tempfile::tempdir().unwrap();
    let traj = trajectory(16, 50, 5, 3);
    traj.save(dir.path(), "t").unwrap();
    let back = Trajectory::load(dir.path(), "t").unwrap();
    let phi = TestFunction::Sin(2);
    assert_eq!(
        field_series(&traj, &phi, 0).unwrap().values,
        field_series(&back, &phi, 0).unwrap().values
    );
}

#[test]
fn quadrature_error_shrinks_with_stride() {
    // the reference integral uses every step; the trapezoid error over
    // coarser snapshots should drop when the stride halves
    let n = 16;
    let phi = TestFunction::Cos(1);
    let steps = 400;
    let mut err = [Vec::new(), Vec::new()];
    for seed in 0..12 {
        let exact = {
            let t = trajectory(n, steps, 1, seed);
            martingale_decomposition(&t, &phi, 0).unwrap().0.final_value()
        };
        for (slot, stride) in [(0usize, 20u64), (1, 5)] {
            let t = trajectory(n, steps, stride, seed);
            let s = martingale_decomposition(&t, &phi, 0).unwrap().0.final_value();
            err[slot].push((s - exact).powi(2));
        }
    }
    let coarse = pairwise(&err[0]).mean();
    let fine = pairwise(&err[1]).mean();
    assert!(fine < coarse / 2.0, "coarse {coarse:e}, fine {fine:e}");
}
