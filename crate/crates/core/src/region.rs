//! Test regions guaranteed (or assumed and later audited) to contain the
//! optimum: balls, and ellipsoids produced by a few steps of the ellipsoid
//! method.
//!
//! An ellipsoid `{x : (x − z)ᵀE⁻¹(x − z) ≤ 1}` is stored in the low-rank form
//! `E = s·I − L·D·Lᵀ` where `L` has one column per step taken. Products with
//! `E` then cost `O(pk)` instead of `O(p²)`. The final region may also carry a
//! half-space cut `gᵀ(x − z) ≤ 0` from a subgradient at its center.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Row;
use crate::error::{invalid, Error, Result};
use crate::flops;
use crate::losses::Penalty;

/// Anything that can produce a subgradient of a convex objective.
pub trait SubgradientOracle {
    fn dim(&self) -> usize;
    fn subgradient_at(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl SubgradientOracle for crate::erm::ErmProblem {
    fn dim(&self) -> usize {
        self.p()
    }

    fn subgradient_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.subgradient(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallRegion {
    center: Vec<f64>,
    radius: f64,
}

impl BallRegion {
    /// A radius of zero is accepted and describes a single point.
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(invalid("radius", format!("must be finite and nonnegative, got {radius}")));
        }
        Ok(BallRegion { center, radius })
    }

    pub fn point(center: Vec<f64>) -> Self {
        BallRegion {
            center,
            radius: 0.0,
        }
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_point(&self) -> bool {
        self.radius == 0.0
    }
}

/// How the initial ball is sized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum InitStrategy {
    ExplicitRadius { radius: f64 },
    /// `κ/2 ‖x₀ − x*‖² ≤ P(x₀) − P* ≤ bound`.
    StrongConvexity { bound: f64, kappa: f64 },
    /// Same bound with a duality gap `Δ ≥ P(x₀) − P*`.
    Gap { gap: f64, kappa: f64 },
    /// `λR(x*) ≤ P(x*) ≤ P(x₀) = objective` since losses are nonnegative. The
    /// ball covering that sublevel set of `R` is centered at the origin, not
    /// at `x₀`.
    PenaltyLevelSet { objective: f64, penalty: Penalty },
}

/// Initial ball around `x0` for the chosen strategy.
pub fn init_ball(x0: &[f64], strategy: InitStrategy) -> Result<BallRegion> {
    let need_kappa = |kappa: f64| {
        if kappa > 0.0 && kappa.is_finite() {
            Ok(())
        } else {
            Err(invalid("kappa", "strategy requires a strongly convex objective (kappa > 0)"))
        }
    };
    let nonneg = |name: &'static str, v: f64| {
        if v >= 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(invalid(name, format!("must be finite and nonnegative, got {v}")))
        }
    };
    let radius = match strategy {
        InitStrategy::ExplicitRadius { radius } => radius,
        InitStrategy::StrongConvexity { bound, kappa } => {
            need_kappa(kappa)?;
            nonneg("bound", bound)?;
            (2.0 * bound / kappa).sqrt()
        }
        InitStrategy::Gap { gap, kappa } => {
            need_kappa(kappa)?;
            nonneg("gap", gap)?;
            (2.0 * gap / kappa).sqrt()
        }
        InitStrategy::PenaltyLevelSet { objective, penalty } => {
            nonneg("objective", objective)?;
            let lambda = penalty.lambda();
            if lambda <= 0.0 {
                return Err(invalid("lambda", "level-set bound needs lambda > 0"));
            }
            let radius = match penalty.kind() {
                crate::losses::PenaltyKind::L1 => objective / lambda,
                crate::losses::PenaltyKind::HalfSquaredL2 => (2.0 * objective / lambda).sqrt(),
            };
            return BallRegion::new(vec![0.0; x0.len()], radius);
        }
    };
    BallRegion::new(x0.to_vec(), radius)
}

/// `{x : (x − z)ᵀE⁻¹(x − z) ≤ 1, gᵀ(x − z) ≤ 0}` with `E = s·I − L·D·Lᵀ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidRegion {
    #[serde(rename = "z")]
    center: Vec<f64>,
    #[serde(rename = "s")]
    scale: f64,
    /// Columns of `L`.
    #[serde(rename = "l")]
    factors: Vec<Vec<f64>>,
    /// Diagonal of `D`.
    #[serde(rename = "d")]
    weights: Vec<f64>,
    #[serde(rename = "g")]
    cut: Option<Vec<f64>>,
    init_radius: f64,
}

impl EllipsoidRegion {
    /// The ball of radius `r` as an ellipsoid, `E = r²·I`.
    pub fn sphere(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("radius", format!("must be positive, got {radius}")));
        }
        Ok(EllipsoidRegion {
            center,
            scale: radius * radius,
            factors: Vec::new(),
            weights: Vec::new(),
            cut: None,
            init_radius: radius,
        })
    }

    /// General low-rank ellipsoid. Positive definiteness is checked.
    pub fn from_parts(
        center: Vec<f64>,
        scale: f64,
        factors: Vec<Vec<f64>>,
        weights: Vec<f64>,
        cut: Option<Vec<f64>>,
    ) -> Result<Self> {
        let p = center.len();
        if factors.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: factors.len(),
                got: weights.len(),
            });
        }
        if let Some(bad) = factors
            .iter()
            .chain(cut.iter())
            .find(|c| c.len() != p)
        {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: bad.len(),
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("scale", "must be positive"));
        }
        let region = EllipsoidRegion {
            center,
            scale,
            factors,
            weights,
            cut,
            init_radius: scale.sqrt(),
        };
        let min_eig = region.min_eigenvalue();
        if min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite(min_eig));
        }
        Ok(region)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn steps(&self) -> usize {
        self.factors.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn factors(&self) -> &[Vec<f64>] {
        &self.factors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cut(&self) -> Option<&[f64]> {
        self.cut.as_deref()
    }

    pub fn init_radius(&self) -> f64 {
        self.init_radius
    }

    pub fn with_cut(mut self, g: Vec<f64>) -> Result<Self> {
        if g.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: g.len(),
            });
        }
        self.cut = Some(g);
        Ok(self)
    }

    pub fn without_cut(mut self) -> Self {
        self.cut = None;
        self
    }

    /// `Lᵀv`.
    fn project(&self, v: &[f64]) -> Vec<f64> {
        self.factors.iter().map(|l| flops::dot(l, v)).collect()
    }

    fn project_row(&self, a: &Row) -> Vec<f64> {
        self.factors.iter().map(|l| a.dot(l)).collect()
    }

    /// `E v` through the factors.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let lv = self.project(v);
        flops::add(v.len());
        let mut out: Vec<f64> = v.iter().map(|x| self.scale * x).collect();
        for ((l, &d), c) in self.factors.iter().zip(&self.weights).zip(lv) {
            flops::axpy(-d * c, l, &mut out);
        }
        out
    }

    /// `vᵀ E v`, clamped at zero.
    pub fn quad(&self, v: &[f64]) -> f64 {
        let lv = self.project(v);
        let vv = flops::dot(v, v);
        self.quad_from_parts(vv, &lv)
    }

    fn quad_from_parts(&self, vv: f64, lv: &[f64]) -> f64 {
        flops::add(lv.len());
        let low: f64 = self.weights.iter().zip(lv).map(|(d, c)| d * c * c).sum();
        (self.scale * vv - low).max(0.0)
    }

    fn bilinear_from_parts(&self, uv: f64, lu: &[f64], lv: &[f64]) -> f64 {
        flops::add(lu.len());
        let low: f64 = self
            .weights
            .iter()
            .zip(lu.iter().zip(lv))
            .map(|(d, (a, b))| d * a * b)
            .sum();
        self.scale * uv - low
    }

    /// Dense `E` (for audits and reference checks).
    pub fn dense(&self) -> DMatrix<f64> {
        let p = self.dim();
        let mut e = DMatrix::<f64>::identity(p, p) * self.scale;
        for (l, &d) in self.factors.iter().zip(&self.weights) {
            let col = DVector::from_column_slice(l);
            e -= &col * col.transpose() * d;
        }
        e
    }

    /// `D^{1/2} LᵀL D^{1/2}`; its spectrum is that of `L D Lᵀ` (plus zeros).
    fn reduced(&self) -> DMatrix<f64> {
        let k = self.steps();
        let mut m = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in 0..=i {
                let v = (self.weights[i] * self.weights[j]).sqrt()
                    * self.factors[i]
                        .iter()
                        .zip(&self.factors[j])
                        .map(|(a, b)| a * b)
                        .sum::<f64>();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Smallest eigenvalue of `E`, from the `k×k` reduced problem.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.steps() == 0 {
            return self.scale;
        }
        let top = self
            .reduced()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        self.scale - top.max(0.0)
    }

    /// `log det E` via the determinant lemma on the reduced problem.
    pub fn log_det(&self) -> f64 {
        let p = self.dim() as f64;
        let k = self.steps();
        let base = p * self.scale.ln();
        if k == 0 {
            return base;
        }
        let m = DMatrix::<f64>::identity(k, k) - self.reduced() / self.scale;
        base + m.determinant().ln()
    }

    /// One ellipsoid-method step with subgradient `g` at the center.
    ///
    /// The new ellipsoid is the minimum-volume ellipsoid containing
    /// `{x ∈ E : gᵀ(x − z) ≤ 0}`. Any stored cut is dropped.
    pub fn step(&self, g: &[f64]) -> Result<EllipsoidRegion> {
        let mut next = self.clone();
        next.step_in_place(g)?;
        Ok(next)
    }

    pub fn step_in_place(&mut self, g: &[f64]) -> Result<()> {
        let p = self.dim();
        if g.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: g.len(),
            });
        }
        if p < 2 {
            return Err(invalid("dimension", "the ellipsoid method needs p >= 2"));
        }
        if g.iter().all(|&v| v == 0.0) {
            return Err(invalid("g", "zero subgradient; the center is optimal"));
        }
        let eg = self.matvec(g);
        let geg = flops::dot(g, &eg);
        if !(geg > 0.0) {
            return Err(Error::NotPositiveDefinite(geg));
        }
        let pf = p as f64;
        let inv = 1.0 / geg.sqrt();
        let u: Vec<f64> = eg.iter().map(|v| v * inv).collect();
        flops::axpy(-1.0 / (pf + 1.0), &u, &mut self.center);
        let c = pf * pf / (pf * pf - 1.0);
        self.scale *= c;
        for d in &mut self.weights {
            *d *= c;
        }
        self.weights.push(c * 2.0 / (pf + 1.0));
        self.factors.push(u);
        self.cut = None;
        Ok(())
    }

    /// `(x − z)ᵀE⁻¹(x − z)` and `gᵀ(x − z)` (0 without a cut), via a dense
    /// Cholesky factorization.
    pub fn membership(&self, x: &[f64]) -> Result<Membership> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let diff = DVector::from_iterator(x.len(), x.iter().zip(&self.center).map(|(a, b)| a - b));
        let chol = self
            .dense()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite(self.min_eigenvalue()))?;
        let sol = chol.solve(&diff);
        let level = diff.dot(&sol);
        let cut_value = self
            .cut
            .as_ref()
            .map_or(0.0, |g| g.iter().zip(diff.iter()).map(|(a, b)| a * b).sum());
        Ok(Membership { level, cut_value })
    }
}

/// Position of a point relative to a region: `level ≤ 1` inside the quadric,
/// `cut_value ≤ 0` on the kept side of the half-space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub level: f64,
    pub cut_value: f64,
}

impl Membership {
    pub fn is_inside(&self, tol: f64) -> bool {
        self.level <= 1.0 + tol && self.cut_value <= tol
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ellipsoid(EllipsoidRegion),
    Ball(BallRegion),
}

/// Precomputed pieces shared by every linear-form maximization over a region.
pub(crate) struct Support<'a> {
    region: &'a Region,
    cut: Option<CutParts>,
}

struct CutParts {
    g: Vec<f64>,
    lg: Vec<f64>,
    geg: f64,
}

/// `aᵀz`, `max_{x} aᵀ(x − z)` and `max_{x} −aᵀ(x − z)` over a region.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Spread {
    pub at_center: f64,
    pub up: f64,
    pub down: f64,
}

impl<'a> Support<'a> {
    pub(crate) fn new(region: &'a Region) -> Result<Self> {
        let cut = match region {
            Region::Ellipsoid(e) => match &e.cut {
                Some(g) => {
                    let lg = e.project(g);
                    let gg = flops::dot(g, g);
                    let geg = e.quad_from_parts(gg, &lg);
                    if !(geg > 0.0) {
                        return Err(Error::NotPositiveDefinite(geg));
                    }
                    Some(CutParts {
                        g: g.clone(),
                        lg,
                        geg,
                    })
                }
                None => None,
            },
            Region::Ball(_) => None,
        };
        Ok(Support { region, cut })
    }

    pub(crate) fn spread(&self, a: &Row) -> Spread {
        match self.region {
            Region::Ball(b) => {
                let at_center = a.dot(&b.center);
                let r = if b.radius == 0.0 {
                    0.0
                } else {
                    b.radius * a.norm_sq().sqrt()
                };
                Spread {
                    at_center,
                    up: r,
                    down: r,
                }
            }
            Region::Ellipsoid(e) => {
                let at_center = a.dot(&e.center);
                let la = e.project_row(a);
                flops::add(a.nnz());
                let aa = a.norm_sq();
                let aea = e.quad_from_parts(aa, &la);
                match &self.cut {
                    None => {
                        let r = aea.sqrt();
                        Spread {
                            at_center,
                            up: r,
                            down: r,
                        }
                    }
                    Some(cut) => {
                        let ga = a.dot(&cut.g);
                        let gea = e.bilinear_from_parts(ga, &cut.lg, &la);
                        let free = aea.sqrt();
                        let cut_val = (aea - gea * gea / cut.geg).max(0.0).sqrt();
                        // the cut binds for +a when gᵀEa ≥ 0 and for −a when gᵀEa ≤ 0
                        let (up, down) = if gea >= 0.0 {
                            (cut_val, if gea > 0.0 { free } else { cut_val })
                        } else {
                            (free, cut_val)
                        };
                        Spread {
                            at_center,
                            up,
                            down,
                        }
                    }
                }
            }
        }
    }
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Ellipsoid(e) => e.dim(),
            Region::Ball(b) => b.center.len(),
        }
    }

    pub fn center(&self) -> &[f64] {
        match self {
            Region::Ellipsoid(e) => e.center(),
            Region::Ball(b) => b.center(),
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            Region::Ellipsoid(e) => e.steps(),
            Region::Ball(_) => 0,
        }
    }

    pub fn has_cut(&self) -> bool {
        matches!(self, Region::Ellipsoid(e) if e.cut.is_some())
    }

    pub fn init_radius(&self) -> f64 {
        match self {
            Region::Ellipsoid(e) => e.init_radius,
            Region::Ball(b) => b.radius,
        }
    }

    /// `max aᵀx − offset` over the region (with its cut, if any).
    pub fn max_linear(&self, a: &[f64], offset: f64) -> Result<f64> {
        if a.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.len(),
            });
        }
        let row = Row::Dense(a.to_vec());
        let s = Support::new(self)?.spread(&row);
        Ok(s.at_center + s.up - offset)
    }

    pub fn membership(&self, x: &[f64]) -> Result<Membership> {
        match self {
            Region::Ellipsoid(e) => e.membership(x),
            Region::Ball(b) => {
                if x.len() != b.center.len() {
                    return Err(Error::DimensionMismatch {
                        expected: b.center.len(),
                        got: x.len(),
                    });
                }
                let d2: f64 = x.iter().zip(&b.center).map(|(a, c)| (a - c) * (a - c)).sum();
                let level = if b.radius > 0.0 {
                    d2 / (b.radius * b.radius)
                } else if d2 == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                Ok(Membership {
                    level,
                    cut_value: 0.0,
                })
            }
        }
    }

    /// Same region with every distance scaled by `factor` around the center.
    pub fn shrunk(&self, factor: f64) -> Result<Region> {
        if !(factor > 0.0) {
            return Err(invalid("factor", "must be positive"));
        }
        Ok(match self {
            Region::Ball(b) => Region::Ball(BallRegion::new(b.center.clone(), b.radius * factor)?),
            Region::Ellipsoid(e) => {
                let f2 = factor * factor;
                let mut e = e.clone();
                e.scale *= f2;
                for d in &mut e.weights {
                    *d *= f2;
                }
                e.init_radius *= factor;
                Region::Ellipsoid(e)
            }
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Region> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Why the ellipsoid iterations stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuildStop {
    Completed,
    /// A zero subgradient: the center is optimal and the region is a point.
    OptimalCenter,
    /// `gᵀEg` became negligible relative to `s‖g‖²`.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuiltRegion {
    pub region: Region,
    pub stop: BuildStop,
    pub steps_taken: usize,
}

const PD_GUARD: f64 = 1e-12;

/// Runs `steps` iterations of the ellipsoid method from the ball
/// `B(x0, r0)`, then adds the half-space cut from the final center.
pub fn build_region<O: SubgradientOracle + ?Sized>(
    oracle: &O,
    x0: &[f64],
    r0: f64,
    steps: usize,
) -> Result<BuiltRegion> {
    if steps == 0 {
        return Err(invalid("k", "need at least one ellipsoid step"));
    }
    if x0.len() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            got: x0.len(),
        });
    }
    let mut ell = EllipsoidRegion::sphere(x0.to_vec(), r0)?;
    let mut taken = 0;
    let mut stop = BuildStop::Completed;
    while taken < steps {
        let g = oracle.subgradient_at(ell.center())?;
        if g.iter().all(|&v| v == 0.0) {
            return Ok(BuiltRegion {
                region: Region::Ball(BallRegion::point(ell.center.clone())),
                stop: BuildStop::OptimalCenter,
                steps_taken: taken,
            });
        }
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if ell.quad(&g) <= PD_GUARD * ell.scale * gg {
            stop = BuildStop::Degenerate;
            break;
        }
        ell.step_in_place(&g)?;
        taken += 1;
    }
    let g = oracle.subgradient_at(ell.center())?;
    if g.iter().all(|&v| v == 0.0) {
        return Ok(BuiltRegion {
            region: Region::Ball(BallRegion::point(ell.center.clone())),
            stop: BuildStop::OptimalCenter,
            steps_taken: taken,
        });
    }
    let gg: f64 = g.iter().map(|v| v * v).sum();
    let region = if ell.quad(&g) > PD_GUARD * ell.scale * gg {
        ell.with_cut(g)?
    } else {
        ell
    };
    Ok(BuiltRegion {
        region: Region::Ellipsoid(region),
        stop,
        steps_taken: taken,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    struct Quadratic {
        target: Vec<f64>,
    }

    impl SubgradientOracle for Quadratic {
        fn dim(&self) -> usize {
            self.target.len()
        }
        fn subgradient_at(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(x.iter().zip(&self.target).map(|(a, b)| a - b).collect())
        }
    }

    #[test]
    fn init_ball_strategies() {
        let b = init_ball(&[0.0], InitStrategy::StrongConvexity { bound: 2.0, kappa: 4.0 }).unwrap();
        assert_eq!(b.radius(), 1.0);
        let b = init_ball(&[0.0], InitStrategy::Gap { gap: 0.0, kappa: 1.0 }).unwrap();
        assert!(b.is_point());
        let b = init_ball(&[0.0], InitStrategy::ExplicitRadius { radius: 10.0 }).unwrap();
        assert_eq!(b.radius(), 10.0);
        assert!(init_ball(&[0.0], InitStrategy::Gap { gap: 1.0, kappa: 0.0 }).is_err());
        let pen = Penalty::l1(0.5).unwrap();
        let b = init_ball(&[3.0, 4.0], InitStrategy::PenaltyLevelSet { objective: 1.0, penalty: pen }).unwrap();
        assert_eq!(b.radius(), 2.0);
        assert_eq!(b.center(), &[0.0, 0.0]);
    }

    #[test]
    fn single_step_matches_hand_update() {
        let e = EllipsoidRegion::sphere(vec![0.0, 0.0], 1.0).unwrap();
        let e1 = e.step(&[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(e1.center()[0], -1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e1.center()[1], 0.0);
        assert_abs_diff_eq!(e1.scale(), 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e1.weights()[0], 8.0 / 9.0, epsilon = 1e-15);
        assert_eq!(e1.factors()[0], vec![1.0, 0.0]);
        let d = e1.dense();
        assert_abs_diff_eq!(d[(0, 0)], 4.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(1, 1)], 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(0, 1)], 0.0);
        assert!(e1.log_det() < e.log_det());
    }

    #[test]
    fn step_rejects_bad_input() {
        let e = EllipsoidRegion::sphere(vec![0.0, 0.0], 1.0).unwrap();
        assert!(e.step(&[0.0, 0.0]).is_err());
        assert!(e.step(&[1.0]).is_err());
        let e = EllipsoidRegion::sphere(vec![0.0], 1.0).unwrap();
        assert!(e.step(&[1.0]).is_err());
    }

    #[test]
    fn max_linear_examples() {
        let ball = Region::Ellipsoid(EllipsoidRegion::sphere(vec![0.0, 0.0], 1.0).unwrap());
        assert_abs_diff_eq!(ball.max_linear(&[2.0, 0.0], 0.0).unwrap(), 2.0);
        let cut = Region::Ellipsoid(
            EllipsoidRegion::sphere(vec![0.0, 0.0], 1.0)
                .unwrap()
                .with_cut(vec![1.0, 0.0])
                .unwrap(),
        );
        assert_abs_diff_eq!(cut.max_linear(&[1.0, 1.0], 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cut.max_linear(&[2.0, 0.0], 0.0).unwrap(), 0.0);
        // the cut does not bind for directions pointing away from g
        assert_abs_diff_eq!(cut.max_linear(&[-2.0, 0.0], 1.0).unwrap(), 1.0);
        let b = Region::Ball(BallRegion::new(vec![1.0, 0.0], 2.0).unwrap());
        assert_abs_diff_eq!(b.max_linear(&[0.0, 3.0], 0.5).unwrap(), 5.5);
    }

    #[test]
    fn build_k1_reproduces_single_step_plus_cut() {
        let q = Quadratic {
            target: vec![-1.0, 0.0],
        };
        // gradient at the origin is (1, 0), as in the single-step example
        let built = build_region(&q, &[0.0, 0.0], 1.0, 1).unwrap();
        let Region::Ellipsoid(e) = &built.region else {
            panic!("expected an ellipsoid")
        };
        assert_abs_diff_eq!(e.center()[0], -1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.scale(), 4.0 / 3.0, epsilon = 1e-15);
        let g = e.cut().unwrap();
        assert_abs_diff_eq!(g[0], -1.0 / 3.0 + 1.0, epsilon = 1e-15);
    }

    #[test]
    fn build_at_optimum_returns_point() {
        let q = Quadratic {
            target: vec![0.5, 0.5],
        };
        let built = build_region(&q, &[0.5, 0.5], 1.0, 20).unwrap();
        assert_eq!(built.stop, BuildStop::OptimalCenter);
        assert_eq!(built.region, Region::Ball(BallRegion::point(vec![0.5, 0.5])));
        assert!(build_region(&q, &[0.5, 0.5], 1.0, 0).is_err());
    }

    #[test]
    fn build_keeps_minimizer_inside() {
        let q = Quadratic {
            target: vec![0.3, -0.2, 0.1],
        };
        let built = build_region(&q, &[0.0, 0.0, 0.0], 1.0, 20).unwrap();
        assert_eq!(built.steps_taken, 20);
        let m = built.region.membership(&q.target).unwrap();
        assert!(m.is_inside(1e-12), "{m:?}");
    }

    #[test]
    fn json_round_trip() {
        let e = EllipsoidRegion::sphere(vec![0.0, 1.0], 2.0)
            .unwrap()
            .step(&[1.0, 2.0])
            .unwrap()
            .with_cut(vec![0.5, -1.0])
            .unwrap();
        let r = Region::Ellipsoid(e);
        let json = r.to_json().unwrap();
        assert!(json.contains("\"z\""));
        assert_eq!(Region::from_json(&json).unwrap(), r);
    }

    #[test]
    fn from_parts_rejects_indefinite() {
        let err = EllipsoidRegion::from_parts(vec![0.0, 0.0], 1.0, vec![vec![1.0, 0.0]], vec![2.0], None);
        assert!(matches!(err, Err(Error::NotPositiveDefinite(_))));
    }
}
