use samplescreen::compression::{compression_curve, rank_samples, CompressionConfig, Method};
use samplescreen::screening::{safe_initial_ball, screen_ellipsoid};
use samplescreen::synthetic::{gen_interval_demo, gen_synthetic_classification, gen_synthetic_regression};
use samplescreen::{
    audit_safety, build_region, screen, screen_kernel, screen_with_gap_ball, solve, solve_screened, Dataset,
    ErmProblem, GapRadiusRule, GramProblem, Kernel, LossKind, Penalty, SafeLoss, SolverOptions, Task,
};

fn tight() -> SolverOptions {
    SolverOptions::new(1e-12, 1e5)
}

fn zeros(p: usize) -> Vec<f64> {
    vec![0.0; p]
}

#[test]
fn ellipsoid_screening_is_safe_for_every_safe_loss() {
    let reg = gen_synthetic_regression(120, 8, 4, 0.1, 1).unwrap().data;
    let cls = gen_synthetic_classification(200, 8, 2.0, 1).unwrap().data;
    let cases = [
        (reg.clone(), LossKind::SquareDistance, Penalty::l1(0.01).unwrap()),
        (reg, LossKind::SquareDistance, Penalty::l2(0.05).unwrap()),
        (cls.clone(), LossKind::SquaredHinge, Penalty::l2(0.05).unwrap()),
        (cls.clone(), LossKind::SafeLogistic, Penalty::l2(0.05).unwrap()),
        (cls, LossKind::SquaredHinge, Penalty::l1(0.01).unwrap()),
    ];
    for (data, kind, penalty) in cases {
        let prob = ErmProblem::new(data, SafeLoss::new(kind, 0.3).unwrap(), penalty).unwrap();
        let p = prob.p();
        let warm = solve(&prob, &zeros(p), &SolverOptions::new(1e-12, 2.0)).unwrap().x;
        let (report, region) = screen_ellipsoid(&prob, &safe_initial_ball(&prob, &warm).unwrap(), 30).unwrap();
        let x_full = solve(&prob, &zeros(p), &tight()).unwrap().x;
        let audit = audit_safety(&prob, &report.screened, &x_full, &region, &tight()).unwrap();
        assert!(audit.passed(), "{} {:?}: {audit:?}", kind.id(), penalty.kind());
    }
}

#[test]
fn gap_ball_screening_is_safe() {
    let data = gen_synthetic_classification(300, 10, 2.5, 2).unwrap().data;
    let prob = ErmProblem::new(data, SafeLoss::new(LossKind::SquaredHinge, 0.5).unwrap(), Penalty::l2(0.1).unwrap()).unwrap();
    let x = solve(&prob, &zeros(10), &SolverOptions::new(1e-5, 1e4)).unwrap().x;
    let (report, region) = screen_with_gap_ball(&prob, &x, GapRadiusRule::Sqrt).unwrap();
    assert!(report.screened_count() > 0);
    let x_full = solve(&prob, &zeros(10), &tight()).unwrap().x;
    let audit = audit_safety(&prob, &report.screened, &x_full, &region, &tight()).unwrap();
    assert!(audit.passed(), "{audit:?}");
}

#[test]
fn screened_solve_reaches_the_full_objective() {
    let data = gen_synthetic_regression(100, 10, 5, 0.1, 3).unwrap().data;
    let prob = ErmProblem::new(data, SafeLoss::new(LossKind::SquareDistance, 0.5).unwrap(), Penalty::l2(0.05).unwrap()).unwrap();
    let warm = solve(&prob, &zeros(10), &SolverOptions::new(1e-12, 20.0)).unwrap().x;
    let ball = safe_initial_ball(&prob, &warm).unwrap();
    let region = build_region(&prob, ball.center(), ball.radius(), 20).unwrap().region;
    let (res, report) = solve_screened(&prob, &region, &warm, &tight()).unwrap();
    let full = solve(&prob, &warm, &tight()).unwrap();
    assert!(report.screened_count() > 0);
    assert!((res.primal - full.primal).abs() <= 1e-7 * full.primal);
}

#[test]
fn interval_demo_screens_most_samples() {
    let data = gen_interval_demo(20, 0.1, 0).unwrap().data;
    let prob = ErmProblem::new(data, SafeLoss::new(LossKind::SquareDistance, 0.3).unwrap(), Penalty::l2(0.003).unwrap()).unwrap();
    let warm = solve(&prob, &zeros(2), &SolverOptions::new(1e-12, 20.0)).unwrap().x;
    let (report, region) = screen_ellipsoid(&prob, &safe_initial_ball(&prob, &warm).unwrap(), 20).unwrap();
    assert!(report.screened_count() >= 10, "{}", report.screened_count());
    let x_full = solve(&prob, &zeros(2), &tight()).unwrap().x;
    assert!(audit_safety(&prob, &report.screened, &x_full, &region, &tight()).unwrap().passed());
}

#[test]
fn screened_samples_are_not_support_vectors() {
    let data = gen_synthetic_classification(400, 6, 2.0, 4).unwrap().data;
    let prob = ErmProblem::new(data, SafeLoss::new(LossKind::SquaredHinge, 0.5).unwrap(), Penalty::l2(0.05).unwrap()).unwrap();
    let x = solve(&prob, &zeros(6), &tight()).unwrap().x;
    let (report, _) = screen_ellipsoid(&prob, &safe_initial_ball(&prob, &x).unwrap(), 20).unwrap();
    let nu = prob.dual_candidate(&x).unwrap().nu;
    let order = rank_samples(&report);
    let k = report.screened_count();
    assert!(k > 0);
    for &i in &order[..k] {
        assert!(report.screened[i]);
        assert_eq!(nu[i], 0.0);
    }
    // every support vector sits in the unscreened tail
    for (i, v) in nu.iter().enumerate() {
        if *v != 0.0 {
            assert!(order[k..].contains(&i));
        }
    }
}

#[test]
fn deleting_screened_samples_keeps_the_model() {
    let data = gen_synthetic_regression(100, 10, 5, 0.1, 0).unwrap().data;
    let prob = ErmProblem::new(data, SafeLoss::new(LossKind::SquareDistance, 0.1).unwrap(), Penalty::l1(0.01).unwrap()).unwrap();
    let cfg = CompressionConfig {
        fractions: vec![0.0, 0.1, 0.2],
        seeds: vec![0, 1, 2],
        ..Default::default()
    };
    let curve = compression_curve(&prob, &cfg).unwrap();
    let base = curve.point(0.0, Method::Screening).unwrap().mean;
    for f in [0.1, 0.2] {
        let got = curve.point(f, Method::Screening).unwrap().mean;
        assert!((got - base).abs() <= 1e-6, "fraction {f}: {got} vs {base}");
    }
    let csv = curve.to_csv();
    assert!(csv.lines().count() > 1);
}

#[test]
fn linear_kernel_on_identity_design_matches_linear_model() {
    let n = 12;
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let labels: Vec<f64> = (0..n).map(|i| if i % 3 == 0 { -1.0 } else { 1.0 }).collect();
    let ds = Dataset::from_dense(rows, labels, Task::Classification).unwrap();
    let loss = SafeLoss::new(LossKind::SquaredHinge, 0.2).unwrap();
    let lambda = 0.01;
    let linear = ErmProblem::new(ds.clone(), loss, Penalty::l2(2.0 * lambda).unwrap()).unwrap();
    let kernel = GramProblem::from_dataset(&ds, Kernel::Linear, loss, lambda).unwrap();
    let x0 = vec![0.5; n];
    let a = build_region(&linear, &x0, 3.0, 15).unwrap().region;
    let b = build_region(&kernel, &x0, 3.0, 15).unwrap().region;
    assert_eq!(a, b);
    let (ra, rb) = (screen(&linear, &a).unwrap(), screen_kernel(&kernel, &b).unwrap());
    assert_eq!(ra.screened, rb.screened);
    assert_eq!(ra.scores, rb.scores);
}

#[test]
fn kernel_screening_is_safe() {
    let data = gen_synthetic_classification(60, 3, 3.0, 5).unwrap().data;
    let loss = SafeLoss::new(LossKind::SquaredHinge, 0.5).unwrap();
    for kernel in [Kernel::Linear, Kernel::Rbf { gamma: 0.5 }] {
        let prob = GramProblem::from_dataset(&data, kernel, loss, 1e-2).unwrap();
        let alpha = solve(&prob, &zeros(60), &tight()).unwrap().x;
        let warm = solve(&prob, &zeros(60), &SolverOptions::new(1e-12, 20.0)).unwrap().x;
        let dist = warm.iter().zip(&alpha).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let region = build_region(&prob, &warm, 2.0 * dist + 1e-9, 20).unwrap().region;
        let report = screen_kernel(&prob, &region).unwrap();
        let audit = samplescreen::kernels::audit_kernel(&prob, &report.screened, &alpha, &region, &tight()).unwrap();
        assert!(audit.contains_solution.passed && audit.margins_inside.passed, "{kernel:?}: {audit:?}");
    }
}
