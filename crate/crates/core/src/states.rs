//! Target states, noisy source models, and fidelity.

use alloc::vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;

// Required for f64 math under no_std; the import looks unused in test
// builds, where std in the crate graph provides the inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{Ket, LinalgError, Matrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub enum StateError {
    /// θ outside [0, π/2].
    ThetaOutOfRange { theta: f64 },
    /// Werner mixing weight outside [0, 1].
    MixingOutOfRange { p: f64 },
    /// A user-supplied matrix failed the density-matrix invariants.
    NotDensity { reason: &'static str, residual: f64 },
    Linalg(LinalgError),
}

impl fmt::Display for StateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateError::ThetaOutOfRange { theta } => {
                write!(f, "theta {theta} outside [0, pi/2]")
            }
            StateError::MixingOutOfRange { p } => write!(f, "mixing weight {p} outside [0, 1]"),
            StateError::NotDensity { reason, residual } => {
                write!(f, "not a density matrix: {reason} (residual {residual:e})")
            }
            StateError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl From<LinalgError> for StateError {
    fn from(e: LinalgError) -> Self {
        StateError::Linalg(e)
    }
}

/// The pure two-qubit family cosθ|01⟩ − sinθ|10⟩, with the first factor
/// belonging to Alice. θ = π/4 is the singlet; θ = 0 or π/2 is a product
/// state.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    theta: f64,
    ket: Ket,
}

impl TargetState {
    pub fn new(theta: f64) -> Result<Self, StateError> {
        if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(StateError::ThetaOutOfRange { theta });
        }
        let zero = C64::new(0.0, 0.0);
        let ket = Ket::new(vec![
            zero,
            C64::new(theta.cos(), 0.0),
            C64::new(-theta.sin(), 0.0),
            zero,
        ])?;
        Ok(TargetState { theta, ket })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn ket(&self) -> &Ket {
        &self.ket
    }

    pub fn density(&self) -> Matrix {
        self.ket.outer()
    }
}

/// Validates the density-matrix invariants: Hermitian, unit trace,
/// nonnegative spectrum.
pub fn validate_density(m: &Matrix) -> Result<(), StateError> {
    let herm = m.hermiticity_residual();
    if herm > 1e-12 {
        return Err(StateError::NotDensity { reason: "not Hermitian", residual: herm });
    }
    let tr = m.trace();
    let tr_res = (tr - C64::new(1.0, 0.0)).norm();
    if tr_res > 1e-10 {
        return Err(StateError::NotDensity { reason: "trace != 1", residual: tr_res });
    }
    let min = m
        .hermitian_eigenvalues()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min < -1e-10 {
        return Err(StateError::NotDensity { reason: "negative eigenvalue", residual: -min });
    }
    Ok(())
}

/// An i.i.d. source of two-qubit states. Each trial draws copies of a fixed
/// density matrix; the randomness of measurement outcomes lives in the
/// simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceModel {
    /// Emits the target exactly.
    Pure { target: TargetState },
    /// Depolarized target: (1−p)|Ψ⟩⟨Ψ| + p·I/4. Fidelity to the target is
    /// 1 − 3p/4.
    Werner { target: TargetState, p: f64 },
    /// Coherent error: a rotation about Y by `alice`/`bob` radians on each
    /// arm of the pure target.
    Rotated { target: TargetState, alice: f64, bob: f64 },
    /// A user-supplied density matrix, validated at construction.
    Custom { target: TargetState, state: Matrix },
}

impl SourceModel {
    pub fn pure(target: TargetState) -> SourceModel {
        SourceModel::Pure { target }
    }

    pub fn werner(target: TargetState, p: f64) -> Result<SourceModel, StateError> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(StateError::MixingOutOfRange { p });
        }
        Ok(SourceModel::Werner { target, p })
    }

    pub fn rotated(target: TargetState, alice: f64, bob: f64) -> SourceModel {
        SourceModel::Rotated { target, alice, bob }
    }

    pub fn custom(target: TargetState, state: Matrix) -> Result<SourceModel, StateError> {
        validate_density(&state)?;
        Ok(SourceModel::Custom { target, state })
    }

    pub fn target(&self) -> &TargetState {
        match self {
            SourceModel::Pure { target }
            | SourceModel::Werner { target, .. }
            | SourceModel::Rotated { target, .. }
            | SourceModel::Custom { target, .. } => target,
        }
    }

    /// The density matrix the source emits each round.
    pub fn emit(&self) -> Matrix {
        match self {
            SourceModel::Pure { target } => target.density(),
            SourceModel::Werner { target, p } => {
                let pure = target.density();
                pure.scale(1.0 - p)
                    .add(&Matrix::identity(4).scale(p / 4.0))
                    .expect("same dims")
            }
            SourceModel::Rotated { target, alice, bob } => {
                let u = rotation_y(*alice)
                    .kron(&rotation_y(*bob))
                    .expect("2x2 factors");
                u.mul(&target.density())
                    .and_then(|m| m.mul(&u.adjoint()))
                    .expect("same dims")
            }
            SourceModel::Custom { state, .. } => state.clone(),
        }
    }
}

fn rotation_y(angle: f64) -> Matrix {
    let (s, c) = angle.sin_cos();
    let mut m = Matrix::zeros(2);
    m.set(0, 0, C64::new(c, 0.0));
    m.set(0, 1, C64::new(-s, 0.0));
    m.set(1, 0, C64::new(s, 0.0));
    m.set(1, 1, C64::new(c, 0.0));
    m
}

/// ⟨Ψ|σ|Ψ⟩, the fidelity of a density matrix to a pure target.
pub fn fidelity(state: &Matrix, target: &TargetState) -> Result<f64, StateError> {
    let t = state.trace_product(&target.density())?;
    Ok(t.re)
}
