//! Scratch probe for solver behavior on the synthetic datasets. Not part of
//! the public surface; run with `cargo run --release -p dwifob --example probe`.

use std::time::Instant;

use dwifob::fb::RunStatus;
use dwifob::linalg::estimate_spectral_norm;
use dwifob::primal_dual::{
    run_pd_dwifob, EvalMode, PdDwifobConfig, PdMetric, PdRunOptions, PrimalDualPoint,
};
use dwifob::svm::{assemble_problem, compute_reference_solution, ReferenceOptions};
use dwifob::synthetic;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "breast-cancer".into());
    let delta: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let ds = synthetic::by_name(&name).expect("known dataset");
    println!("dataset {name}: {} x {}", ds.samples(), ds.features());
    let problem = assemble_problem(ds, delta).unwrap();
    let t0 = Instant::now();
    let est = estimate_spectral_norm(problem.l.as_ref(), 1e-9, 10_000, 42).unwrap();
    println!("||L|| = {} ({} iters, {:?})", est.value, est.iterations, t0.elapsed());
    let tau = 0.99 / est.value;
    let metric = PdMetric::new(tau, tau, problem.l.clone(), est.value).unwrap();

    let t0 = Instant::now();
    let reference = compute_reference_solution(
        &problem,
        &metric,
        &ReferenceOptions { cache_dir: None, ..Default::default() },
    )
    .unwrap();
    println!(
        "reference: {} iters, achieved ({:.3e}, {:.3e}), cap={}, {:?}",
        reference.iterations,
        reference.achieved_dx,
        reference.achieved_dmu,
        reference.hit_cap,
        t0.elapsed()
    );
    let resid = dwifob::svm::optimality_residual(&problem, &reference.point);
    println!("optimality residual: {resid:.3e}");

    let pd = problem.to_pd_problem();
    let z0 = PrimalDualPoint::zeros(problem.primal_dim(), problem.dual_dim());
    let l_ref = problem.l.forward(&reference.point.x);
    let d0 = {
        let dx = z0.x.sub(&reference.point.x);
        let dmu = z0.mu.sub(&reference.point.mu);
        let dlx = problem.l.forward(&dx);
        metric.norm_sq_with_image(&dx, &dmu, &dlx).max(0.0).sqrt()
    };
    println!("initial M-distance: {d0:.6e}");

    for (label, cfg) in [
        ("cp", PdDwifobConfig::chambolle_pock()),
        ("m=3", PdDwifobConfig::new(3, 1e-5)),
        ("m=5", PdDwifobConfig::new(5, 1e-5)),
        ("m=10", PdDwifobConfig::new(10, 1e-5)),
        ("m=15", PdDwifobConfig::new(15, 1e-5)),
    ] {
        let t0 = Instant::now();
        let mut reached = None;
        let mut obs = |view: &dwifob::primal_dual::PdIterationView<'_>| {
            let dist = view.distance_sq_to(&reference.point, &l_ref).sqrt();
            if dist <= 1e-8 * d0 {
                reached = Some(view.n + 1);
                return true;
            }
            false
        };
        let result = run_pd_dwifob(
            &pd,
            &cfg,
            &metric,
            z0.clone(),
            PdRunOptions {
                mode: EvalMode::Recursive,
                max_iters: 200_000,
                observer: Some(&mut obs),
                ..Default::default()
            },
        )
        .unwrap();
        println!(
            "{label}: status {:?}, iters {}, reached {:?}, {:?}",
            result.status,
            result.iterations,
            reached,
            t0.elapsed()
        );
        assert!(matches!(result.status, RunStatus::Converged | RunStatus::MaxIters));
    }
}
