use samplescreen::oracle::{conjugate_on_grid, inf_conv, lower_ray_indicator, unit_interval_indicator, GridSpec};
use samplescreen::{LossKind, SafeLoss};

const SAFE: [LossKind; 4] = [
    LossKind::SquareDistance,
    LossKind::SafeLogistic,
    LossKind::Hinge,
    LossKind::SquaredHinge,
];

fn grid() -> GridSpec {
    GridSpec::new(-10.0, 10.0, 20_001)
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// The loss rebuilt from its ingredients: a base loss convolved with a
/// scaled regularizer conjugate, or (for the safe logistic) the conjugate of
/// the logistic conjugate plus the entropy/ℓ1 dual penalty.
fn oracle(kind: LossKind, mu: f64, t: f64) -> f64 {
    let g = grid();
    match kind {
        LossKind::SquareDistance => inf_conv(|z| 0.5 * z * z, unit_interval_indicator, mu, t, &g),
        LossKind::Hinge => inf_conv(|z| (1.0 - z).max(0.0), lower_ray_indicator, mu, t, &g),
        LossKind::SquaredHinge => inf_conv(
            |z| 0.5 * (1.0 - z).max(0.0).powi(2),
            lower_ray_indicator,
            mu,
            t,
            &g,
        ),
        LossKind::Huber => inf_conv(f64::abs, |y| 0.5 * y * y, mu, t, &g),
        LossKind::SafeLogistic => {
            let dual = |s: f64| {
                if !(-1.0..=0.0).contains(&s) {
                    return f64::INFINITY;
                }
                let logistic_conj = xlogx(-s) + xlogx(1.0 + s);
                let omega = -xlogx(-s) - mu * s;
                logistic_conj + omega
            };
            conjugate_on_grid(dual, t, &GridSpec::new(-1.5, 0.5, 20_001))
        }
        _ => unreachable!(),
    }
    .unwrap()
}

fn ts() -> impl Iterator<Item = f64> {
    (0..=200).map(|i| -5.0 + 0.05 * i as f64)
}

#[test]
fn closed_forms_match_inf_conv_oracle() {
    for kind in SAFE.into_iter().chain([LossKind::Huber]) {
        for mu in [0.1, 0.5, 0.9] {
            let loss = SafeLoss::new(kind, mu).unwrap();
            for t in ts() {
                let (got, want) = (loss.value(t), oracle(kind, mu, t));
                assert!((got - want).abs() <= 1e-4, "{} mu={mu} t={t}: {got} vs {want}", kind.id());
            }
        }
    }
}

#[test]
fn flat_region_is_exactly_zero() {
    for kind in SAFE {
        for mu in [0.0, 0.1, 0.5, 1.0] {
            let loss = SafeLoss::new(kind, mu).unwrap();
            let interval = loss.flat_interval().unwrap();
            for t in ts() {
                if interval.contains(t) {
                    assert_eq!(loss.value(t), 0.0, "{} mu={mu} t={t}", kind.id());
                    assert_eq!(loss.derivative(t), 0.0);
                } else {
                    assert!(loss.value(t) > 0.0, "{} mu={mu} t={t}", kind.id());
                }
            }
        }
    }
    let safelog = SafeLoss::new(LossKind::SafeLogistic, 0.3).unwrap();
    assert_eq!(safelog.value(0.7), 0.0);
    assert_eq!(safelog.value(0.7 + 1e-12), 0.0);
}

#[test]
fn derivative_matches_finite_differences() {
    let h = 1e-6;
    for kind in LossKind::ALL {
        let loss = SafeLoss::new(kind, 0.4).unwrap();
        let kinks = [-0.4, 0.4, 0.6, 0.0];
        for t in ts() {
            if kinks.iter().any(|k| (t - k).abs() < 1e-3) {
                continue;
            }
            let fd = (loss.value(t + h) - loss.value(t - h)) / (2.0 * h);
            let d = loss.derivative(t);
            assert!((fd - d).abs() <= 1e-6, "{} t={t}: {d} vs {fd}", kind.id());
        }
    }
}

#[test]
fn conjugates_agree_with_grid_supremum() {
    let g = GridSpec::new(-60.0, 60.0, 200_001);
    for kind in SAFE {
        let loss = SafeLoss::new(kind, 0.3).unwrap();
        for s in [-0.9, -0.5, -0.2, -0.05] {
            let num = loss.conjugate_numeric(s, &g).unwrap();
            assert!((num - loss.conjugate(s)).abs() <= 1e-4, "{} s={s}", kind.id());
        }
    }
    let sq = SafeLoss::new(LossKind::SquareDistance, 0.3).unwrap();
    for s in [-2.0, 0.7, 1.5] {
        assert!((sq.conjugate_numeric(s, &g).unwrap() - sq.conjugate(s)).abs() <= 1e-4);
    }
}

#[test]
fn fenchel_young() {
    for kind in LossKind::ALL {
        let loss = SafeLoss::new(kind, 0.25).unwrap();
        for t in ts() {
            let s = loss.derivative(t);
            let eq = loss.value(t) + loss.conjugate(s) - s * t;
            assert!(eq.abs() <= 1e-9, "{} t={t}: {eq}", kind.id());
            for s in [-0.8, -0.3, 0.0, 0.3] {
                assert!(loss.value(t) + loss.conjugate(s) >= s * t - 1e-12);
            }
        }
    }
}

#[test]
fn vanishing_mu_recovers_base_losses() {
    for t in ts() {
        let sq = SafeLoss::new(LossKind::SquareDistance, 0.0).unwrap();
        assert_eq!(sq.value(t), 0.5 * t * t);
        let hinge = SafeLoss::new(LossKind::Hinge, 0.0).unwrap();
        assert_eq!(hinge.value(t), (1.0 - t).max(0.0));
        let sqh = SafeLoss::new(LossKind::SquaredHinge, 0.0).unwrap();
        assert_eq!(sqh.value(t), 0.5 * (1.0 - t).max(0.0).powi(2));
        let huber = SafeLoss::new(LossKind::Huber, 1e-9).unwrap();
        assert!((huber.value(t) - t.abs()).abs() <= 1e-9);
    }
}

#[test]
fn huber_is_moreau_envelope_of_absolute_value() {
    for mu in [0.2, 1.0, 2.0] {
        let huber = SafeLoss::new(LossKind::Huber, mu).unwrap();
        for t in ts() {
            let env = inf_conv(f64::abs, |y| 0.5 * y * y, mu, t, &grid()).unwrap();
            assert!((huber.value(t) - env).abs() <= 1e-6);
            assert!(huber.value(t) <= t.abs() + 1e-12);
            assert!(huber.value(t) >= t.abs() - 0.5 * mu - 1e-12);
        }
    }
}

#[test]
fn safe_losses_sit_below_their_base() {
    let logistic = SafeLoss::new(LossKind::PlainLogistic, 0.0).unwrap();
    for mu in [0.1, 0.5] {
        let sq = SafeLoss::new(LossKind::SquareDistance, mu).unwrap();
        let hinge = SafeLoss::new(LossKind::Hinge, mu).unwrap();
        let sqh = SafeLoss::new(LossKind::SquaredHinge, mu).unwrap();
        for t in ts() {
            assert!(sq.value(t) <= 0.5 * t * t);
            assert!(sq.value(t) >= 0.5 * t * t - mu * t.abs());
            assert!(hinge.value(t) <= (1.0 - t).max(0.0));
            assert!(hinge.value(t) >= (1.0 - t).max(0.0) - mu);
            assert!(sqh.value(t) <= 0.5 * (1.0 - t).max(0.0).powi(2));
        }
        // the safe logistic grows linearly with the same slope as the logistic
        let safelog = SafeLoss::new(LossKind::SafeLogistic, mu).unwrap();
        let slope = safelog.value(-40.0) - safelog.value(-41.0);
        let base = logistic.value(-40.0) - logistic.value(-41.0);
        assert!((slope - base).abs() <= 1e-9);
    }
}
