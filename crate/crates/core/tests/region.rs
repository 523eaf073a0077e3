use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use samplescreen::region::EllipsoidRegion;
use samplescreen::{build_region, flops, Region};

fn gaussian(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    (0..p).map(|_| rng.sample(StandardNormal)).collect()
}

/// Textbook dense update of `(z, E)` for the cut `gᵀ(x − z) ≤ 0`.
fn dense_step(z: &mut DVector<f64>, e: &mut DMatrix<f64>, g: &[f64]) {
    let p = z.len() as f64;
    let g = DVector::from_column_slice(g);
    let eg = &*e * &g;
    let geg = g.dot(&eg);
    *z -= &eg / ((p + 1.0) * geg.sqrt());
    *e = (&*e - (&eg * eg.transpose()) * (2.0 / ((p + 1.0) * geg))) * (p * p / (p * p - 1.0));
}

#[test]
fn low_rank_matches_dense_reference() {
    let (p, k) = (50, 40);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let z0 = gaussian(&mut rng, p);
    let mut ell = EllipsoidRegion::sphere(z0.clone(), 2.0).unwrap();
    let mut z = DVector::from_column_slice(&z0);
    let mut e = DMatrix::identity(p, p) * 4.0;
    for _ in 0..k {
        let g = gaussian(&mut rng, p);
        ell.step_in_place(&g).unwrap();
        dense_step(&mut z, &mut e, &g);
        let rel = (ell.dense() - &e).norm() / e.norm();
        assert!(rel <= 1e-10, "matrix rel err {rel}");
        let zrel = (DVector::from_column_slice(ell.center()) - &z).norm() / z.norm();
        assert!(zrel <= 1e-10, "center rel err {zrel}");
    }
}

#[test]
fn determinant_strictly_decreases() {
    let p = 30;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ell = EllipsoidRegion::sphere(vec![0.0; p], 1.0).unwrap();
    let mut prev = ell.log_det();
    for _ in 0..40 {
        ell.step_in_place(&gaussian(&mut rng, p)).unwrap();
        let ld = ell.log_det();
        let dense = ell.dense().determinant().ln();
        assert!((ld - dense).abs() <= 1e-8 * dense.abs().max(1.0));
        assert!(ld < prev);
        prev = ld;
    }
}

#[test]
fn step_cost_is_linear_in_dimension() {
    let k = 10;
    let mut per_pk = Vec::new();
    for p in [100, 400, 1600] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ell = EllipsoidRegion::sphere(vec![0.0; p], 1.0).unwrap();
        for _ in 0..k {
            ell.step_in_place(&gaussian(&mut rng, p)).unwrap();
        }
        let g = gaussian(&mut rng, p);
        let (_, count) = flops::measure(|| ell.step_in_place(&g).unwrap());
        assert!((count as usize) < p * p / 4, "p={p}: {count} flops");
        per_pk.push(count as f64 / (p * (k + 1)) as f64);
    }
    let (lo, hi) = per_pk.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi / lo < 1.1, "flops per p·k drift: {per_pk:?}");
}

#[test]
fn max_linear_bounds_brute_force_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let p = rng.random_range(2..=4);
        let center = gaussian(&mut rng, p);
        let factors: Vec<Vec<f64>> = (0..2).map(|_| gaussian(&mut rng, p)).collect();
        let top: f64 = factors.iter().map(|f| f.iter().map(|v| v * v).sum::<f64>()).sum();
        let weights = vec![0.5 / top, 0.3 / top];
        let cut = gaussian(&mut rng, p);
        let ell = EllipsoidRegion::from_parts(center.clone(), 1.0, factors, weights, Some(cut.clone())).unwrap();
        let chol = ell.dense().cholesky().unwrap().l();
        let a = gaussian(&mut rng, p);
        let region = Region::Ellipsoid(ell.clone());
        let closed = region.max_linear(&a, 0.0).unwrap();
        let free = Region::Ellipsoid(ell.without_cut()).max_linear(&a, 0.0).unwrap();
        assert!(closed <= free + 1e-12);

        let la = chol.transpose() * DVector::from_column_slice(&a);
        let lg = chol.transpose() * DVector::from_column_slice(&cut);
        let az: f64 = a.iter().zip(&center).map(|(x, y)| x * y).sum();
        // feasible points of the unit ball cut by lgᵀu ≤ 0
        let feasible = |mut u: DVector<f64>| {
            let c = lg.dot(&u);
            if c > 0.0 {
                u -= &lg * (c / lg.dot(&lg));
            }
            let norm = u.norm();
            if norm > 1.0 {
                u /= norm;
            }
            u
        };
        let check = |u: &DVector<f64>| {
            let val = az + la.dot(u);
            assert!(val <= closed + 1e-9, "{val} exceeds {closed}");
            val
        };
        let mut best = (f64::NEG_INFINITY, DVector::zeros(p));
        for _ in 0..20_000 {
            let u = DVector::from_vec(gaussian(&mut rng, p));
            let shrink: f64 = rng.random_range(0.0..1.0);
            for v in [feasible(&u / u.norm()), feasible(&u * (shrink / u.norm()))] {
                let val = check(&v);
                if val > best.0 {
                    best = (val, v);
                }
            }
        }
        let mut width = 0.1;
        for _ in 0..20_000 {
            let v = feasible(&best.1 + DVector::from_vec(gaussian(&mut rng, p)) * width);
            let val = check(&v);
            if val > best.0 {
                best = (val, v);
            } else {
                width = (width * 0.999).max(1e-6);
            }
        }
        let best = best.0;
        assert!(closed - best <= 1e-3, "closed {closed}, sampled {best}");
    }
}

#[test]
fn regions_contain_the_minimizer_of_a_quadratic() {
    struct Quadratic(Vec<f64>);
    impl samplescreen::region::SubgradientOracle for Quadratic {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn subgradient_at(&self, x: &[f64]) -> samplescreen::Result<Vec<f64>> {
            Ok(x.iter().zip(&self.0).map(|(a, b)| a - b).collect())
        }
    }
    let target = vec![0.3, -0.2, 0.5, 0.1];
    let oracle = Quadratic(target.clone());
    let built = build_region(&oracle, &[0.0; 4], 1.0, 25).unwrap();
    let m = built.region.membership(&target).unwrap();
    assert!(m.is_inside(1e-9), "{m:?}");
    let json = built.region.to_json().unwrap();
    assert_eq!(Region::from_json(&json).unwrap(), built.region);
}
