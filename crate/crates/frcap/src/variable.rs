//! Statistical variables: affine functionals on an ensemble space.
//!
//! A variable evaluates to the expectation of the underlying observable at
//! each state. On the simplex it is a value vector, on the Bloch ball an
//! affine form `<g, r> + k`, on density matrices a Hermitian observable
//! evaluated as `Tr(O rho)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Hermitian;
use crate::space::{dot3, norm3, Ensemble, EnsembleSpace, ExtremeSet, Payload};

/// Tolerance below which a variable counts as constant on its space.
const DEGENERACY_TOL: f64 = 1e-12;

/// An affine functional on one of the ensemble spaces.
#[derive(Debug, Clone)]
pub struct StatisticalVariable {
    form: VariableForm,
}

#[derive(Debug, Clone)]
pub enum VariableForm {
    /// `F(q) = sum_i q_i * values_i`.
    Simplex { values: Vec<f64> },
    /// `F(r) = <gradient, r> + offset`.
    Bloch { gradient: [f64; 3], offset: f64 },
    /// `F(rho) = Tr(observable * rho)`.
    Density { observable: Hermitian },
}

/// Extremes of a variable over the pure states, with witnesses.
#[derive(Debug, Clone)]
pub struct VariableRange {
    pub min_value: f64,
    pub max_value: f64,
    pub argmin: Ensemble,
    pub argmax: Ensemble,
    /// Set when the variable is constant, so min and max coincide and the
    /// witnesses are arbitrary extreme points.
    pub degenerate: bool,
}

impl StatisticalVariable {
    pub fn on_simplex(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "a simplex variable needs at least one value".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "variable values must be finite".into(),
            ));
        }
        Ok(Self {
            form: VariableForm::Simplex { values },
        })
    }

    pub fn on_bloch(gradient: [f64; 3], offset: f64) -> Result<Self> {
        if gradient.iter().any(|g| !g.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidParameter(
                "variable coefficients must be finite".into(),
            ));
        }
        Ok(Self {
            form: VariableForm::Bloch { gradient, offset },
        })
    }

    pub fn on_density(observable: Hermitian) -> Result<Self> {
        if observable.dim() == 0 {
            return Err(Error::InvalidParameter(
                "observable needs a positive dimension".into(),
            ));
        }
        let residual = observable.hermiticity_residual();
        if residual > 1e-12 {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self {
            form: VariableForm::Density { observable },
        })
    }

    pub fn form(&self) -> &VariableForm {
        &self.form
    }

    pub fn space(&self) -> EnsembleSpace {
        match &self.form {
            VariableForm::Simplex { values } => EnsembleSpace::Simplex {
                outcomes: values.len(),
            },
            VariableForm::Bloch { .. } => EnsembleSpace::BlochBall,
            VariableForm::Density { observable } => EnsembleSpace::DensityMatrix {
                dim: observable.dim(),
            },
        }
    }

    /// The expectation of the variable at a state.
    pub fn evaluate(&self, state: &Ensemble) -> Result<f64> {
        match (&self.form, state.payload()) {
            (VariableForm::Simplex { values }, Payload::Distribution(q))
                if values.len() == q.len() =>
            {
                Ok(values.iter().zip(q).map(|(f, w)| f * w).sum())
            }
            (VariableForm::Bloch { gradient, offset }, Payload::Bloch(r)) => {
                Ok(dot3(gradient, r) + offset)
            }
            (VariableForm::Density { observable }, Payload::Density(rho))
                if observable.dim() == rho.dim() =>
            {
                observable.trace_product(rho)
            }
            _ => Err(Error::SpaceMismatch {
                left: self.space(),
                right: state.space(),
            }),
        }
    }

    /// Minimum and maximum over the extreme points, with extreme witnesses.
    pub fn range_over_extremes(&self) -> Result<VariableRange> {
        match &self.form {
            VariableForm::Simplex { values } => {
                let mut lo = 0usize;
                let mut hi = 0usize;
                for (i, v) in values.iter().enumerate() {
                    if *v < values[lo] {
                        lo = i;
                    }
                    if *v > values[hi] {
                        hi = i;
                    }
                }
                let n = values.len();
                Ok(VariableRange {
                    min_value: values[lo],
                    max_value: values[hi],
                    argmin: Ensemble::simplex_vertex(n, lo)?,
                    argmax: Ensemble::simplex_vertex(n, hi)?,
                    degenerate: values[hi] - values[lo] <= DEGENERACY_TOL,
                })
            }
            VariableForm::Bloch { gradient, offset } => {
                let norm = norm3(gradient);
                if norm <= DEGENERACY_TOL {
                    let witness = Ensemble::bloch([0.0, 0.0, 1.0])?;
                    return Ok(VariableRange {
                        min_value: *offset,
                        max_value: *offset,
                        argmin: witness.clone(),
                        argmax: witness,
                        degenerate: true,
                    });
                }
                let unit = [gradient[0] / norm, gradient[1] / norm, gradient[2] / norm];
                Ok(VariableRange {
                    min_value: offset - norm,
                    max_value: offset + norm,
                    argmin: Ensemble::bloch([-unit[0], -unit[1], -unit[2]])?,
                    argmax: Ensemble::bloch(unit)?,
                    degenerate: false,
                })
            }
            VariableForm::Density { observable } => {
                let (values, vectors) = observable.eigen();
                let n = values.len();
                let min_value = values[0];
                let max_value = values[n - 1];
                let argmin = Ensemble::pure_state(&vectors[0])?;
                let argmax = Ensemble::pure_state(&vectors[n - 1])?;
                Ok(VariableRange {
                    min_value,
                    max_value,
                    argmin,
                    argmax,
                    degenerate: max_value - min_value <= DEGENERACY_TOL,
                })
            }
        }
    }

    /// The closed level set `{ x extreme : F(x) >= threshold }`, returned in
    /// the most structured variant available. On the Bloch ball an affine
    /// variable cuts the sphere along a plane, so the level set normalizes to
    /// a spherical cap.
    pub fn level_set(&self, threshold: f64) -> Result<ExtremeSet> {
        let range = self.range_over_extremes()?;
        if threshold <= range.min_value {
            return Ok(ExtremeSet::Full);
        }
        if threshold > range.max_value {
            return Ok(ExtremeSet::Empty);
        }
        match &self.form {
            VariableForm::Simplex { values } => {
                let n = values.len();
                let members: Vec<Ensemble> = values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v >= threshold)
                    .map(|(i, _)| Ensemble::simplex_vertex(n, i))
                    .collect::<Result<_>>()?;
                ExtremeSet::finite(members)
            }
            VariableForm::Bloch { gradient, offset } => {
                let norm = norm3(gradient);
                // Degenerate variables fall in the Full/Empty branches above.
                let axis = [gradient[0] / norm, gradient[1] / norm, gradient[2] / norm];
                let height = ((threshold - offset) / norm).clamp(-1.0, 1.0);
                ExtremeSet::cap(axis, height)
            }
            VariableForm::Density { observable } => Ok(ExtremeSet::LevelSet {
                observable: observable.clone(),
                threshold,
            }),
        }
    }

    /// The equivalent observable form of a Bloch-ball variable:
    /// `O = offset * I + gradient . sigma`, so `Tr(O rho(r)) = <g, r> + k`.
    pub fn to_qubit_observable(&self) -> Result<StatisticalVariable> {
        match &self.form {
            VariableForm::Bloch { gradient, offset } => {
                let mut o = Hermitian::zeros(2);
                o.set(0, 0, Complex64::new(offset + gradient[2], 0.0));
                o.set(1, 1, Complex64::new(offset - gradient[2], 0.0));
                o.set(0, 1, Complex64::new(gradient[0], -gradient[1]));
                o.set(1, 0, Complex64::new(gradient[0], gradient[1]));
                StatisticalVariable::on_density(o)
            }
            _ => Err(Error::SpaceMismatch {
                left: self.space(),
                right: EnsembleSpace::BlochBall,
            }),
        }
    }

    /// The Bloch-ball form of a two-level observable.
    pub fn to_bloch_form(&self) -> Result<StatisticalVariable> {
        match &self.form {
            VariableForm::Density { observable } if observable.dim() == 2 => {
                let offset = observable.trace() / 2.0;
                let gradient = [
                    observable.get(0, 1).re,
                    -observable.get(0, 1).im,
                    (observable.get(0, 0).re - observable.get(1, 1).re) / 2.0,
                ];
                StatisticalVariable::on_bloch(gradient, offset)
            }
            _ => Err(Error::SpaceMismatch {
                left: self.space(),
                right: EnsembleSpace::DensityMatrix { dim: 2 },
            }),
        }
    }
}
