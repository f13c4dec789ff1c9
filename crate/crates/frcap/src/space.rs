//! Ensemble spaces: compact convex state spaces and their points.
//!
//! Three concrete families are supported:
//!
//! * the probability simplex over `n` outcomes,
//! * the Bloch ball of a two-level quantum system (the unit ball in R^3),
//! * the density matrices of an `n`-level quantum system.
//!
//! Points are [`Ensemble`] values whose constructors enforce membership to an
//! absolute residual of 1e-12, so everything downstream can assume valid
//! states. Extreme points (pure states) are basis vectors, unit Bloch
//! vectors and rank-1 projectors respectively.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Hermitian;
use crate::rng::SplitMix64;

/// Absolute tolerance on membership residuals (sum-to-one, norm, min eigenvalue).
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Tolerance used when deciding whether a point is extreme.
pub const EXTREME_TOL: f64 = 1e-10;

/// One of the three supported compact convex state spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnsembleSpace {
    /// Probability distributions over `outcomes` elementary events.
    Simplex { outcomes: usize },
    /// The unit ball in R^3; states of a two-level quantum system.
    BlochBall,
    /// Trace-one positive semidefinite `dim x dim` complex matrices.
    DensityMatrix { dim: usize },
}

impl std::fmt::Display for EnsembleSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Simplex { outcomes } => write!(f, "simplex({outcomes})"),
            Self::BlochBall => write!(f, "bloch-ball"),
            Self::DensityMatrix { dim } => write!(f, "density-matrices({dim})"),
        }
    }
}

/// Raw coordinates of a candidate point, prior to any validation.
#[derive(Debug, Clone)]
pub enum Payload {
    Distribution(Vec<f64>),
    Bloch([f64; 3]),
    Density(Hermitian),
}

impl EnsembleSpace {
    pub fn simplex(outcomes: usize) -> Result<Self> {
        if outcomes == 0 {
            return Err(Error::InvalidParameter(
                "a simplex needs at least one outcome".into(),
            ));
        }
        Ok(Self::Simplex { outcomes })
    }

    pub fn density_matrix(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "density matrices need a positive dimension".into(),
            ));
        }
        Ok(Self::DensityMatrix { dim })
    }

    fn check_payload_dimension(&self, point: &Payload) -> Result<()> {
        match (self, point) {
            (Self::Simplex { outcomes }, Payload::Distribution(q)) => {
                if q.len() != *outcomes {
                    return Err(Error::DimensionMismatch {
                        expected: *outcomes,
                        got: q.len(),
                    });
                }
            }
            (Self::BlochBall, Payload::Bloch(_)) => {}
            (Self::DensityMatrix { dim }, Payload::Density(m)) => {
                if m.dim() != *dim {
                    return Err(Error::DimensionMismatch {
                        expected: *dim,
                        got: m.dim(),
                    });
                }
            }
            _ => {
                return Err(Error::NotInSpace {
                    reason: format!("payload kind does not match {self}"),
                })
            }
        }
        Ok(())
    }

    /// Membership test against the space constraints, to 1e-12.
    pub fn contains(&self, point: &Payload) -> Result<bool> {
        self.check_payload_dimension(point)?;
        Ok(match point {
            Payload::Distribution(q) => {
                let min = q.iter().cloned().fold(f64::INFINITY, f64::min);
                let total: f64 = q.iter().sum();
                min >= -MEMBERSHIP_TOL && (total - 1.0).abs() <= MEMBERSHIP_TOL
            }
            Payload::Bloch(r) => norm3(r) <= 1.0 + MEMBERSHIP_TOL,
            Payload::Density(m) => {
                m.hermiticity_residual() <= MEMBERSHIP_TOL
                    && (m.trace() - 1.0).abs() <= MEMBERSHIP_TOL
                    && m.min_eigenvalue() >= -MEMBERSHIP_TOL
            }
        })
    }

    /// True when the point is an extreme point (a pure state) of the space.
    pub fn is_extreme(&self, point: &Payload) -> Result<bool> {
        if !self.contains(point)? {
            return Ok(false);
        }
        Ok(match point {
            Payload::Distribution(q) => {
                q.iter().cloned().fold(f64::NEG_INFINITY, f64::max) >= 1.0 - EXTREME_TOL
            }
            Payload::Bloch(r) => norm3(r) >= 1.0 - EXTREME_TOL,
            Payload::Density(m) => {
                let values = m.eigenvalues();
                values[values.len() - 1] >= 1.0 - EXTREME_TOL
            }
        })
    }
}

/// A state: a validated point of one of the ensemble spaces.
#[derive(Debug, Clone)]
pub struct Ensemble {
    payload: Payload,
}

impl Ensemble {
    /// Classical distribution on the simplex.
    pub fn distribution(q: Vec<f64>) -> Result<Self> {
        let space = EnsembleSpace::simplex(q.len())?;
        Self::validated(space, Payload::Distribution(q))
    }

    /// Bloch vector of a two-level quantum state.
    pub fn bloch(r: [f64; 3]) -> Result<Self> {
        Self::validated(EnsembleSpace::BlochBall, Payload::Bloch(r))
    }

    /// Density matrix of an `n`-level quantum state.
    pub fn density(m: Hermitian) -> Result<Self> {
        let space = EnsembleSpace::density_matrix(m.dim())?;
        Self::validated(space, Payload::Density(m))
    }

    fn validated(space: EnsembleSpace, payload: Payload) -> Result<Self> {
        if !space.contains(&payload)? {
            return Err(Error::NotInSpace {
                reason: format!("constraint residual exceeds {MEMBERSHIP_TOL:.0e} in {space}"),
            });
        }
        Ok(Self { payload })
    }

    /// Vertex `index` of the simplex with `outcomes` outcomes.
    pub fn simplex_vertex(outcomes: usize, index: usize) -> Result<Self> {
        if index >= outcomes {
            return Err(Error::InvalidParameter(format!(
                "vertex {index} out of range for {outcomes} outcomes"
            )));
        }
        let mut q = vec![0.0; outcomes];
        q[index] = 1.0;
        Self::distribution(q)
    }

    /// Center of the Bloch ball: the maximally mixed two-level state.
    pub fn bloch_center() -> Self {
        Self {
            payload: Payload::Bloch([0.0, 0.0, 0.0]),
        }
    }

    /// The maximally mixed `n`-level state `I / n`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::density(Hermitian::maximally_mixed(dim))
    }

    /// Pure `n`-level state from a (not necessarily normalized) state vector.
    pub fn pure_state(amplitudes: &[Complex64]) -> Result<Self> {
        Self::density(Hermitian::projector(amplitudes)?)
    }

    pub fn space(&self) -> EnsembleSpace {
        match &self.payload {
            Payload::Distribution(q) => EnsembleSpace::Simplex { outcomes: q.len() },
            Payload::Bloch(_) => EnsembleSpace::BlochBall,
            Payload::Density(m) => EnsembleSpace::DensityMatrix { dim: m.dim() },
        }
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn as_distribution(&self) -> Option<&[f64]> {
        match &self.payload {
            Payload::Distribution(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_bloch(&self) -> Option<&[f64; 3]> {
        match &self.payload {
            Payload::Bloch(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_density(&self) -> Option<&Hermitian> {
        match &self.payload {
            Payload::Density(m) => Some(m),
            _ => None,
        }
    }

    /// True when this point is extreme (pure) in its space.
    pub fn is_extreme(&self) -> bool {
        self.space().is_extreme(&self.payload).unwrap_or(false)
    }

    /// Euclidean-style distance between two points of the same space.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        match (&self.payload, &other.payload) {
            (Payload::Distribution(a), Payload::Distribution(b)) if a.len() == b.len() => Ok(a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()),
            (Payload::Bloch(a), Payload::Bloch(b)) => {
                Ok(norm3(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]]))
            }
            (Payload::Density(a), Payload::Density(b)) if a.dim() == b.dim() => a.distance(b),
            _ => Err(Error::SpaceMismatch {
                left: self.space(),
                right: other.space(),
            }),
        }
    }

    /// The two-level density matrix with this Bloch vector.
    pub fn to_qubit_density(&self) -> Result<Ensemble> {
        match &self.payload {
            Payload::Bloch(r) => Ensemble::density(density_from_bloch(r)),
            _ => Err(Error::SpaceMismatch {
                left: self.space(),
                right: EnsembleSpace::BlochBall,
            }),
        }
    }

    /// The Bloch vector of a two-level density matrix.
    pub fn to_bloch(&self) -> Result<Ensemble> {
        match &self.payload {
            Payload::Density(m) if m.dim() == 2 => Ensemble::bloch(bloch_from_density(m)),
            _ => Err(Error::SpaceMismatch {
                left: self.space(),
                right: EnsembleSpace::DensityMatrix { dim: 2 },
            }),
        }
    }
}

/// Mixture `p * a + (1 - p) * b` of two states of the same space.
pub fn convex_combine(p: f64, a: &Ensemble, b: &Ensemble) -> Result<Ensemble> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidFraction(p));
    }
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch {
            left: a.space(),
            right: b.space(),
        });
    }
    let q = 1.0 - p;
    let payload = match (&a.payload, &b.payload) {
        (Payload::Distribution(x), Payload::Distribution(y)) => {
            Payload::Distribution(x.iter().zip(y).map(|(u, v)| p * u + q * v).collect())
        }
        (Payload::Bloch(x), Payload::Bloch(y)) => Payload::Bloch([
            p * x[0] + q * y[0],
            p * x[1] + q * y[1],
            p * x[2] + q * y[2],
        ]),
        (Payload::Density(x), Payload::Density(y)) => {
            let mut m = x.scaled(p);
            m.axpy_mut(q, y)?;
            Payload::Density(m)
        }
        _ => unreachable!("spaces already checked equal"),
    };
    Ensemble::validated(a.space(), payload)
}

/// Deterministic sample of extreme points, used by the discretization oracle.
///
/// * simplex: all `n` vertices, whatever `count` says;
/// * Bloch ball: a Fibonacci lattice of `count` unit vectors whose endpoints
///   sit exactly on the two poles of the z axis;
/// * density matrices: `count` Haar-like random rank-1 projectors drawn from
///   the seeded generator.
pub fn sample_extreme_points(
    space: &EnsembleSpace,
    count: usize,
    seed: u64,
) -> Result<Vec<Ensemble>> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    match space {
        EnsembleSpace::Simplex { outcomes } => (0..*outcomes)
            .map(|i| Ensemble::simplex_vertex(*outcomes, i))
            .collect(),
        EnsembleSpace::BlochBall => Ok(fibonacci_sphere(count)
            .into_iter()
            .map(|r| Ensemble {
                payload: Payload::Bloch(r),
            })
            .collect()),
        EnsembleSpace::DensityMatrix { dim } => {
            let mut rng = SplitMix64::new(seed);
            (0..count)
                .map(|_| {
                    let v: Vec<Complex64> = (0..*dim)
                        .map(|_| Complex64::new(rng.normal(), rng.normal()))
                        .collect();
                    Ensemble::pure_state(&v)
                })
                .collect()
        }
    }
}

/// Fibonacci lattice on the unit sphere, including both z poles.
fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    if count == 1 {
        return vec![[0.0, 0.0, 1.0]];
    }
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * i as f64 / (count - 1) as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden_angle * i as f64;
            [rho * theta.cos(), rho * theta.sin(), z]
        })
        .collect()
}

/// `rho = (I + r . sigma) / 2`.
pub fn density_from_bloch(r: &[f64; 3]) -> Hermitian {
    let mut m = Hermitian::zeros(2);
    m.set(0, 0, Complex64::new((1.0 + r[2]) / 2.0, 0.0));
    m.set(1, 1, Complex64::new((1.0 - r[2]) / 2.0, 0.0));
    m.set(0, 1, Complex64::new(r[0] / 2.0, -r[1] / 2.0));
    m.set(1, 0, Complex64::new(r[0] / 2.0, r[1] / 2.0));
    m
}

/// `r_i = Tr(rho sigma_i)`.
pub fn bloch_from_density(m: &Hermitian) -> [f64; 3] {
    [
        2.0 * m.get(0, 1).re,
        -2.0 * m.get(0, 1).im,
        m.get(0, 0).re - m.get(1, 1).re,
    ]
}

pub(crate) fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// A subset of the extreme points, in the most structured variant available.
#[derive(Debug, Clone)]
pub enum ExtremeSet {
    /// No extreme points.
    Empty,
    /// All extreme points of the space.
    Full,
    /// An explicit finite list of extreme points.
    Finite(Vec<Ensemble>),
    /// Bloch-ball spherical cap `{ x on the sphere : <axis, x> >= height }`.
    Cap { axis: [f64; 3], height: f64 },
    /// Density-matrix level set `{ pure psi : Tr(observable psi) >= threshold }`.
    LevelSet {
        observable: Hermitian,
        threshold: f64,
    },
}

impl ExtremeSet {
    /// Finite set of extreme points; every member must be extreme and all
    /// members must live in the same space.
    pub fn finite(points: Vec<Ensemble>) -> Result<Self> {
        if points.is_empty() {
            return Ok(Self::Empty);
        }
        let space = points[0].space();
        for point in &points {
            if point.space() != space {
                return Err(Error::SpaceMismatch {
                    left: space,
                    right: point.space(),
                });
            }
            if !point.is_extreme() {
                return Err(Error::NotExtreme { space });
            }
        }
        Ok(Self::Finite(points))
    }

    /// Spherical cap on the Bloch sphere. `axis` must be a unit vector and
    /// `height` must lie in `[-1, 1]`.
    pub fn cap(axis: [f64; 3], height: f64) -> Result<Self> {
        if (norm3(&axis) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "cap axis must be a unit vector (norm {})",
                norm3(&axis)
            )));
        }
        if !(-1.0..=1.0).contains(&height) {
            return Err(Error::InvalidParameter(format!(
                "cap height {height} outside [-1, 1]"
            )));
        }
        Ok(Self::Cap { axis, height })
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Self::Empty)
    }

    /// The space a structured set belongs to, when it pins one down.
    pub fn space(&self) -> Option<EnsembleSpace> {
        match self {
            Self::Empty | Self::Full => None,
            Self::Finite(points) => points.first().map(Ensemble::space),
            Self::Cap { .. } => Some(EnsembleSpace::BlochBall),
            Self::LevelSet { observable, .. } => Some(EnsembleSpace::DensityMatrix {
                dim: observable.dim(),
            }),
        }
    }

    /// Whether an extreme point of `space` belongs to this set, within `tol`.
    pub fn contains_extreme(&self, point: &Ensemble, tol: f64) -> Result<bool> {
        Ok(match self {
            Self::Empty => false,
            Self::Full => true,
            Self::Finite(points) => {
                let mut hit = false;
                for member in points {
                    if member.distance(point)? <= tol {
                        hit = true;
                        break;
                    }
                }
                hit
            }
            Self::Cap { axis, height } => match point.payload() {
                Payload::Bloch(r) => dot3(axis, r) >= height - tol,
                _ => {
                    return Err(Error::SpaceMismatch {
                        left: EnsembleSpace::BlochBall,
                        right: point.space(),
                    })
                }
            },
            Self::LevelSet {
                observable,
                threshold,
            } => match point.payload() {
                Payload::Density(m) => observable.trace_product(m)? >= threshold - tol,
                _ => {
                    return Err(Error::SpaceMismatch {
                        left: EnsembleSpace::DensityMatrix {
                            dim: observable.dim(),
                        },
                        right: point.space(),
                    })
                }
            },
        })
    }

    /// Union of two sets, where a structured representative exists.
    pub fn union(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (Self::Full, _) | (_, Self::Full) => Self::Full,
            (Self::Empty, s) | (s, Self::Empty) => s.clone(),
            (Self::Finite(a), Self::Finite(b)) => {
                let mut points = a.clone();
                for candidate in b {
                    let mut seen = false;
                    for existing in &points {
                        if existing.distance(candidate)? <= 1e-12 {
                            seen = true;
                            break;
                        }
                    }
                    if !seen {
                        points.push(candidate.clone());
                    }
                }
                Self::Finite(points)
            }
            (Self::Cap { axis: u, height: c }, Self::Cap { axis: v, height: d })
                if norm3(&[u[0] - v[0], u[1] - v[1], u[2] - v[2]]) <= 1e-12 =>
            {
                Self::Cap {
                    axis: *u,
                    height: c.min(*d),
                }
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "union of these set variants has no structured representative".into(),
                ))
            }
        })
    }
}
