//! Scalar losses with flat regions, the penalties they are paired with, and
//! their Fenchel conjugates.
//!
//! A loss is written `φ(t)` where `t` is the margin of a sample: `aᵀx − b` for
//! regression and `b·aᵀx` for classification. The safe kinds are exactly zero
//! on a non-degenerate interval, which forces the matching dual variable to
//! zero at the optimum and is what makes data points screenable.
//!
//! | id        | kind            | φ(t)                                   | flat interval |
//! |-----------|-----------------|----------------------------------------|---------------|
//! | `sqdist`  | square distance | ½ [\|t\| − μ]₊²                        | [−μ, μ]       |
//! | `safelog` | safe logistic   | e^{t+μ−1} − (t+μ) for t ≤ 1−μ, else 0  | [1−μ, ∞)      |
//! | `hinge`   | hinge           | [1 − t − μ]₊                           | [1−μ, ∞)      |
//! | `sqhinge` | squared hinge   | ½ [1 − t − μ]₊²                        | [1−μ, ∞)      |
//! | `huber`   | Huber           | t²/(2μ) on \|t\| ≤ μ, else \|t\| − μ/2 | none          |
//! | `square`  | square          | ½ t²                                   | none          |
//! | `logistic`| logistic        | log(1 + e^{−t})                        | none          |

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Whether a loss (or a dataset) describes a regression or a binary
/// classification problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Regression,
    Classification,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Regression => "regression",
            Task::Classification => "classification",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    SquareDistance,
    SafeLogistic,
    Hinge,
    SquaredHinge,
    Huber,
    PlainSquare,
    PlainLogistic,
}

impl LossKind {
    pub const ALL: [LossKind; 7] = [
        LossKind::SquareDistance,
        LossKind::SafeLogistic,
        LossKind::Hinge,
        LossKind::SquaredHinge,
        LossKind::Huber,
        LossKind::PlainSquare,
        LossKind::PlainLogistic,
    ];

    /// Identifier used in configuration files and on the command line.
    pub fn id(self) -> &'static str {
        match self {
            LossKind::SquareDistance => "sqdist",
            LossKind::SafeLogistic => "safelog",
            LossKind::Hinge => "hinge",
            LossKind::SquaredHinge => "sqhinge",
            LossKind::Huber => "huber",
            LossKind::PlainSquare => "square",
            LossKind::PlainLogistic => "logistic",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.id() == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn task(self) -> Task {
        match self {
            LossKind::SquareDistance | LossKind::Huber | LossKind::PlainSquare => Task::Regression,
            _ => Task::Classification,
        }
    }
}

/// The set of margins on which a safe loss vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum FlatInterval {
    /// `[−half_width, half_width]`, regression losses.
    Symmetric { half_width: f64 },
    /// `[start, +∞)`, classification losses.
    UpperRay { start: f64 },
}

impl FlatInterval {
    /// Signed distance from `t` to the boundary, positive strictly inside.
    pub fn depth(&self, t: f64) -> f64 {
        match *self {
            FlatInterval::Symmetric { half_width } => half_width - t.abs(),
            FlatInterval::UpperRay { start } => t - start,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.depth(t) >= 0.0
    }

    /// The threshold reported alongside screening scores.
    pub fn threshold(&self) -> f64 {
        match *self {
            FlatInterval::Symmetric { half_width } => half_width,
            FlatInterval::UpperRay { start } => start,
        }
    }

    /// True when the interior is empty, so no sample can ever be screened.
    pub fn is_degenerate(&self) -> bool {
        match *self {
            FlatInterval::Symmetric { half_width } => half_width <= 0.0,
            FlatInterval::UpperRay { .. } => false,
        }
    }
}

/// A scalar loss `φ` with its threshold parameter `μ ≥ 0`.
///
/// For the safe kinds `μ` widens the flat region; for Huber it is the
/// smoothing width; the plain kinds ignore it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafeLoss {
    kind: LossKind,
    mu: f64,
}

impl SafeLoss {
    pub fn new(kind: LossKind, mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(invalid("mu", format!("must be finite and nonnegative, got {mu}")));
        }
        Ok(SafeLoss { kind, mu })
    }

    pub fn from_id(id: &str, mu: f64) -> Result<Self> {
        SafeLoss::new(LossKind::from_id(id)?, mu)
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn id(&self) -> &'static str {
        self.kind.id()
    }

    pub fn task(&self) -> Task {
        self.kind.task()
    }

    /// The interval on which `φ` is identically zero, if any.
    pub fn flat_interval(&self) -> Option<FlatInterval> {
        match self.kind {
            LossKind::SquareDistance => Some(FlatInterval::Symmetric {
                half_width: self.mu,
            }),
            LossKind::SafeLogistic | LossKind::Hinge | LossKind::SquaredHinge => {
                Some(FlatInterval::UpperRay {
                    start: 1.0 - self.mu,
                })
            }
            LossKind::Huber | LossKind::PlainSquare | LossKind::PlainLogistic => None,
        }
    }

    /// Whether `φ` is continuously differentiable everywhere.
    pub fn is_smooth(&self) -> bool {
        match self.kind {
            LossKind::Hinge => false,
            LossKind::Huber => self.mu > 0.0,
            _ => true,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let mu = self.mu;
        match self.kind {
            LossKind::SquareDistance => {
                let d = t.abs() - mu;
                if d > 0.0 {
                    0.5 * d * d
                } else {
                    0.0
                }
            }
            LossKind::SafeLogistic => {
                let u = t + mu - 1.0;
                if u <= 0.0 {
                    // e^u − (u + 1), written to avoid cancellation near u = 0
                    u.exp_m1() - u
                } else {
                    0.0
                }
            }
            LossKind::Hinge => (1.0 - t - mu).max(0.0),
            LossKind::SquaredHinge => {
                let d = (1.0 - t - mu).max(0.0);
                0.5 * d * d
            }
            LossKind::Huber => {
                if t.abs() <= mu {
                    t * t / (2.0 * mu)
                } else {
                    t.abs() - 0.5 * mu
                }
            }
            LossKind::PlainSquare => 0.5 * t * t,
            LossKind::PlainLogistic => {
                if t > 0.0 {
                    (-t).exp().ln_1p()
                } else {
                    -t + t.exp().ln_1p()
                }
            }
        }
    }

    /// `φ′(t)`. Hinge and Huber(μ=0) return the right-continuous element of
    /// the subdifferential at their kinks, which is 0 at the kink of hinge.
    pub fn derivative(&self, t: f64) -> f64 {
        let mu = self.mu;
        match self.kind {
            LossKind::SquareDistance => {
                let d = t.abs() - mu;
                if d > 0.0 {
                    d.copysign(t)
                } else {
                    0.0
                }
            }
            LossKind::SafeLogistic => {
                let u = t + mu - 1.0;
                if u <= 0.0 {
                    u.exp_m1()
                } else {
                    0.0
                }
            }
            LossKind::Hinge => {
                if t < 1.0 - mu {
                    -1.0
                } else {
                    0.0
                }
            }
            LossKind::SquaredHinge => -(1.0 - t - mu).max(0.0),
            LossKind::Huber => {
                if mu > 0.0 {
                    (t / mu).clamp(-1.0, 1.0)
                } else if t == 0.0 {
                    0.0
                } else {
                    t.signum()
                }
            }
            LossKind::PlainSquare => t,
            LossKind::PlainLogistic => {
                // −1 / (1 + e^t)
                if t > 0.0 {
                    let e = (-t).exp();
                    -e / (1.0 + e)
                } else {
                    -1.0 / (1.0 + t.exp())
                }
            }
        }
    }

    /// Fenchel conjugate `φ*(s) = sup_t s·t − φ(t)`, `+∞` outside its domain.
    pub fn conjugate(&self, s: f64) -> f64 {
        let mu = self.mu;
        match self.kind {
            LossKind::SquareDistance => 0.5 * s * s + mu * s.abs(),
            LossKind::SafeLogistic => {
                if (-1.0..=0.0).contains(&s) {
                    xlogx(1.0 + s) - mu * s
                } else {
                    f64::INFINITY
                }
            }
            LossKind::Hinge => {
                if (-1.0..=0.0).contains(&s) {
                    (1.0 - mu) * s
                } else {
                    f64::INFINITY
                }
            }
            LossKind::SquaredHinge => {
                if s <= 0.0 {
                    (1.0 - mu) * s + 0.5 * s * s
                } else {
                    f64::INFINITY
                }
            }
            LossKind::Huber => {
                if s.abs() <= 1.0 {
                    0.5 * mu * s * s
                } else {
                    f64::INFINITY
                }
            }
            LossKind::PlainSquare => 0.5 * s * s,
            LossKind::PlainLogistic => {
                if (-1.0..=0.0).contains(&s) {
                    xlogx(-s) + xlogx(1.0 + s)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Conjugate computed as a grid supremum; independent of the closed forms.
    /// Errors when the maximizer runs into the grid boundary, which happens
    /// when `s` is outside (or on the edge of) the conjugate's domain.
    pub fn conjugate_numeric(&self, s: f64, grid: &crate::oracle::GridSpec) -> Result<f64> {
        crate::oracle::conjugate_on_grid(|t| self.value(t), s, grid)
    }

    /// Sum of `φ` over the components of `t`.
    pub fn sum(&self, t: &[f64]) -> f64 {
        t.iter().map(|&ti| self.value(ti)).sum()
    }
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    L1,
    HalfSquaredL2,
}

impl PenaltyKind {
    pub fn id(self) -> &'static str {
        match self {
            PenaltyKind::L1 => "l1",
            PenaltyKind::HalfSquaredL2 => "l2",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "l1" => Ok(PenaltyKind::L1),
            "l2" => Ok(PenaltyKind::HalfSquaredL2),
            _ => Err(Error::UnknownId(id.to_string())),
        }
    }
}

/// `λ·R(x)` with `R = ‖·‖₁` or `R = ½‖·‖²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    kind: PenaltyKind,
    lambda: f64,
}

impl Penalty {
    pub fn new(kind: PenaltyKind, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(invalid(
                "lambda",
                format!("must be finite and nonnegative, got {lambda}"),
            ));
        }
        Ok(Penalty { kind, lambda })
    }

    pub fn l1(lambda: f64) -> Result<Self> {
        Penalty::new(PenaltyKind::L1, lambda)
    }

    pub fn l2(lambda: f64) -> Result<Self> {
        Penalty::new(PenaltyKind::HalfSquaredL2, lambda)
    }

    pub fn kind(&self) -> PenaltyKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Penalty::new(self.kind, lambda)
    }

    /// Modulus of strong convexity of `λR`.
    pub fn strong_convexity(&self) -> f64 {
        match self.kind {
            PenaltyKind::L1 => 0.0,
            PenaltyKind::HalfSquaredL2 => self.lambda,
        }
    }

    /// `R(x)`, without the `λ` factor.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self.kind {
            PenaltyKind::L1 => x.iter().map(|v| v.abs()).sum(),
            PenaltyKind::HalfSquaredL2 => 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
        }
    }

    /// Proximal operator of `step·λR`.
    pub fn prox(&self, x: &[f64], step: f64) -> Vec<f64> {
        let thr = self.lambda * step;
        match self.kind {
            PenaltyKind::L1 => x
                .iter()
                .map(|&v| (v.abs() - thr).max(0.0).copysign(v))
                .collect(),
            PenaltyKind::HalfSquaredL2 => x.iter().map(|&v| v / (1.0 + thr)).collect(),
        }
    }

    /// `R*(y)`: the indicator of the unit ℓ∞ ball for L1, `½‖y‖²` for L2.
    pub fn conjugate(&self, y: &[f64]) -> f64 {
        match self.kind {
            PenaltyKind::L1 => {
                if y.iter().all(|v| v.abs() <= 1.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PenaltyKind::HalfSquaredL2 => 0.5 * y.iter().map(|v| v * v).sum::<f64>(),
        }
    }

    /// Adds `λ·∂R(x)` into `out`, choosing 0 for L1 coordinates at zero.
    pub fn add_subgradient(&self, x: &[f64], out: &mut [f64]) {
        match self.kind {
            PenaltyKind::L1 => {
                for (o, &v) in out.iter_mut().zip(x) {
                    if v != 0.0 {
                        *o += self.lambda * v.signum();
                    }
                }
            }
            PenaltyKind::HalfSquaredL2 => {
                for (o, &v) in out.iter_mut().zip(x) {
                    *o += self.lambda * v;
                }
            }
        }
    }
}
