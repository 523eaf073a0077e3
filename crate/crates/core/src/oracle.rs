//! Brute-force grid oracles for scalar convex functions.
//!
//! These exist to check closed forms: every safe loss is an infimum
//! convolution `f □ μΩ*(·/μ)`, and every conjugate is a supremum, so both can
//! be evaluated by scanning a grid. After the coarse scan the bracket around
//! the best grid point is re-gridded a few times; for convex functions the
//! true minimizer always lies in that bracket.

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Number of zoom passes over the bracket of the coarse minimizer.
    pub refinements: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            lo: -10.0,
            hi: 10.0,
            points: 100_000,
            refinements: 3,
        }
    }
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        GridSpec {
            lo,
            hi,
            points,
            refinements: 3,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(invalid("grid", format!("bad range [{}, {}]", self.lo, self.hi)));
        }
        if self.points < 3 {
            return Err(invalid("grid", "needs at least 3 points"));
        }
        Ok(())
    }
}

const ZOOM_POINTS: usize = 201;

fn scan(h: &impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Option<(usize, f64, f64)> {
    let step = (hi - lo) / (points - 1) as f64;
    let mut best: Option<(usize, f64, f64)> = None;
    for i in 0..points {
        let z = lo + step * i as f64;
        let v = h(z);
        if v.is_nan() || v == f64::INFINITY {
            continue;
        }
        if best.is_none_or(|(_, _, bv)| v < bv) {
            best = Some((i, z, v));
        }
    }
    best
}

/// Minimum of an extended-valued convex function over the grid.
///
/// Fails with [`Error::GridBoundary`] if the coarse minimizer sits on either
/// end of the grid, since the true minimizer may then lie outside it.
pub fn minimize_on_grid(h: impl Fn(f64) -> f64, grid: &GridSpec) -> Result<f64> {
    grid.validate()?;
    let (i, z, mut value) = scan(&h, grid.lo, grid.hi, grid.points)
        .ok_or_else(|| invalid("grid", "function is +inf on the whole grid"))?;
    if i == 0 || i == grid.points - 1 {
        return Err(Error::GridBoundary(z));
    }
    let mut step = (grid.hi - grid.lo) / (grid.points - 1) as f64;
    let mut center = z;
    for _ in 0..grid.refinements {
        let (lo, hi) = (center - step, center + step);
        if let Some((_, z, v)) = scan(&h, lo, hi, ZOOM_POINTS) {
            if v <= value {
                value = v;
                center = z;
            }
        }
        step = 2.0 * step / (ZOOM_POINTS - 1) as f64;
    }
    Ok(value)
}

/// `min_z f(z) + μ·Ω*((t − z)/μ)` over the grid in `z`.
pub fn inf_conv(
    f: impl Fn(f64) -> f64,
    omega_conj: impl Fn(f64) -> f64,
    mu: f64,
    t: f64,
    grid: &GridSpec,
) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(invalid("mu", format!("must be positive, got {mu}")));
    }
    minimize_on_grid(|z| f(z) + mu * omega_conj((t - z) / mu), grid)
}

/// `sup_t s·t − φ(t)` over the grid in `t`.
pub fn conjugate_on_grid(phi: impl Fn(f64) -> f64, s: f64, grid: &GridSpec) -> Result<f64> {
    minimize_on_grid(|t| phi(t) - s * t, grid).map(|v| -v)
}

/// Indicator of `[−1, 1]`, the conjugate of the absolute value.
pub fn unit_interval_indicator(y: f64) -> f64 {
    if y.abs() <= 1.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Indicator of `[−1, +∞)`, the conjugate of `|·| + 1{· ≤ 0}`.
pub fn lower_ray_indicator(y: f64) -> f64 {
    if y >= -1.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn square_with_box_at_zero() {
        let v = inf_conv(|z| 0.5 * z * z, unit_interval_indicator, 1.0, 0.0, &GridSpec::default())
            .unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn square_with_box_at_two() {
        let v = inf_conv(|z| 0.5 * z * z, unit_interval_indicator, 1.0, 2.0, &GridSpec::default())
            .unwrap();
        assert_abs_diff_eq!(v, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn abs_with_quadratic_is_huber() {
        let v = inf_conv(|z: f64| z.abs(), |y| 0.5 * y * y, 1.0, 0.5, &GridSpec::default()).unwrap();
        assert_abs_diff_eq!(v, 0.125, epsilon = 1e-8);
    }

    #[test]
    fn boundary_hit_is_reported() {
        let grid = GridSpec::new(-1.0, 1.0, 101);
        let err = minimize_on_grid(|z| (z - 3.0).powi(2), &grid).unwrap_err();
        assert!(matches!(err, Error::GridBoundary(_)));
    }

    #[test]
    fn conjugate_of_half_square() {
        let v = conjugate_on_grid(|t| 0.5 * t * t, 3.0, &GridSpec::default()).unwrap();
        assert_abs_diff_eq!(v, 4.5, epsilon = 1e-8);
    }

    #[test]
    fn conjugate_outside_domain_hits_boundary() {
        // sup_t 2t − |t| is unbounded
        assert!(conjugate_on_grid(|t: f64| t.abs(), 2.0, &GridSpec::default()).is_err());
    }
}
