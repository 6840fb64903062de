//! Verification strategies: weighted collections of binary accept tests.
//!
//! A strategy's verification operator Ω = Σ wᵢPᵢ has the target as its top
//! eigenvector with eigenvalue 1; the gap to the second eigenvalue is the
//! efficiency constant f, which sets the sample-complexity penalty 1/f of
//! local versus global measurements.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use core::fmt;

// Required for f64 math under no_std; the import looks unused in test
// builds, where std in the crate graph provides the inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

use crate::jones::{AcceptRule, PlateSetting, WavePlates};
use crate::linalg::{pauli_x, pauli_y, pauli_z, Ket, LinalgError, Matrix, C64};
use crate::states::{StateError, TargetState};

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyError {
    /// θ invalid for the requested constructor.
    ThetaInvalid { theta: f64, reason: &'static str },
    /// Constructed operator failed the spectral self-check; indicates a
    /// construction-convention bug.
    SelfCheckFailed(SelfCheck),
    /// A setting lacks the wave-plate annotation needed for a table check.
    MissingWavePlates { label: String },
    State(StateError),
    Linalg(LinalgError),
}

impl fmt::Display for StrategyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyError::ThetaInvalid { theta, reason } => {
                write!(f, "theta {theta} invalid: {reason}")
            }
            StrategyError::SelfCheckFailed(c) => write!(
                f,
                "strategy self-check failed: weight_sum={:e} target={:e} second_eigenvalue={:e} idempotency={:e}",
                c.weight_sum_residual, c.target_residual, c.second_eigenvalue_residual, c.idempotency_residual
            ),
            StrategyError::MissingWavePlates { label } => {
                write!(f, "setting {label} has no wave-plate annotation")
            }
            StrategyError::State(e) => write!(f, "{e}"),
            StrategyError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl From<StateError> for StrategyError {
    fn from(e: StateError) -> Self {
        StrategyError::State(e)
    }
}

impl From<LinalgError> for StrategyError {
    fn from(e: LinalgError) -> Self {
        StrategyError::Linalg(e)
    }
}

/// Which constructor to use for a given θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Auto,
    Global,
    Singlet,
    Partial,
    Product,
}

/// One binary test: an accept projector selected with probability `weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetting {
    projector: Matrix,
    weight: f64,
    label: String,
    waveplates: Option<WavePlates>,
}

impl MeasurementSetting {
    pub fn projector(&self) -> &Matrix {
        &self.projector
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn waveplates(&self) -> Option<&WavePlates> {
        self.waveplates.as_ref()
    }
}

/// Residuals computed by the constructor self-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfCheck {
    /// |Σ wᵢ − 1|
    pub weight_sum_residual: f64,
    /// max component of Ω|Ψ⟩ − |Ψ⟩
    pub target_residual: f64,
    /// |λ₂ − (1 − f)|
    pub second_eigenvalue_residual: f64,
    /// max over settings of the projector idempotency residual
    pub idempotency_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    settings: Vec<MeasurementSetting>,
    target: TargetState,
    f: f64,
    self_check: SelfCheck,
}

impl Strategy {
    /// The globally optimal strategy: project onto the target itself. f = 1.
    pub fn global(target: TargetState) -> Result<Strategy, StrategyError> {
        let settings = vec![MeasurementSetting {
            projector: target.density(),
            weight: 1.0,
            label: String::from("target"),
            waveplates: None,
        }];
        Strategy::build(settings, target, 1.0)
    }

    /// The three-setting locally optimal strategy for the singlet (θ = π/4):
    /// accept projectors (I − X⊗X)/2, (I − Y⊗Y)/2, (I − Z⊗Z)/2 with equal
    /// weights. f = 2/3.
    pub fn singlet() -> Result<Strategy, StrategyError> {
        let target = TargetState::new(FRAC_PI_4)?;
        let paulis = [
            ("XX", pauli_x()),
            ("YY", pauli_y()),
            ("ZZ", pauli_z()),
        ];
        // Table I wave-plate angles. Bob's QWP for XX is printed as 4°;
        // symmetry says 45°, so 45° is primary and the printed value is
        // carried as an alternate reading for check_table to report.
        let plates = [
            WavePlates {
                plates: PlateSetting { qwp_a: 45.0, hwp_a: 22.5, qwp_b: 45.0, hwp_b: 22.5 },
                rule: AcceptRule::OppositeOutcomes,
                alternates: vec![(
                    String::from("table-printed Bob QWP 4"),
                    PlateSetting { qwp_a: 45.0, hwp_a: 22.5, qwp_b: 4.0, hwp_b: 22.5 },
                )],
            },
            WavePlates {
                plates: PlateSetting { qwp_a: 0.0, hwp_a: 67.5, qwp_b: 0.0, hwp_b: 67.5 },
                rule: AcceptRule::OppositeOutcomes,
                alternates: vec![],
            },
            WavePlates {
                plates: PlateSetting { qwp_a: 0.0, hwp_a: 0.0, qwp_b: 0.0, hwp_b: 0.0 },
                rule: AcceptRule::OppositeOutcomes,
                alternates: vec![],
            },
        ];
        let settings = paulis
            .into_iter()
            .zip(plates)
            .map(|((label, sigma), wp)| {
                let pp = sigma.kron(&sigma).expect("2x2 factors");
                MeasurementSetting {
                    projector: Matrix::identity(4).sub(&pp).expect("same dims").scale(0.5),
                    weight: 1.0 / 3.0,
                    label: String::from(label),
                    waveplates: Some(wp),
                }
            })
            .collect();
        Strategy::build(settings, target, 2.0 / 3.0)
    }

    /// The four-setting locally optimal strategy for a partially entangled
    /// target, θ ∈ (0, π/2) excluding π/4: P_ZZ⁻ plus the complements of
    /// three product states |φ_k⟩ orthogonal to the target.
    /// f = (2 + sinθ·cosθ)⁻¹.
    pub fn partial(theta: f64) -> Result<Strategy, StrategyError> {
        if !theta.is_finite() || theta <= 0.0 || theta >= FRAC_PI_2 {
            return Err(StrategyError::ThetaInvalid {
                theta,
                reason: "partial strategy requires theta in (0, pi/2)",
            });
        }
        if (theta - FRAC_PI_4).abs() < 1e-12 {
            return Err(StrategyError::ThetaInvalid {
                theta,
                reason: "theta = pi/4 is the singlet; use the singlet strategy",
            });
        }
        let target = TargetState::new(theta)?;
        let s = (2.0 * theta).sin();
        let w_zz = (2.0 - s) / (4.0 + s);
        let w_phi = 2.0 * (1.0 + s) / (3.0 * (4.0 + s));
        let f = 1.0 / (2.0 + theta.sin() * theta.cos());

        let mut settings = vec![MeasurementSetting {
            projector: Matrix::diag(&[0.0, 1.0, 1.0, 0.0]),
            weight: w_zz,
            label: String::from("ZZ"),
            waveplates: Some(WavePlates {
                plates: PlateSetting { qwp_a: 0.0, hwp_a: 0.0, qwp_b: 0.0, hwp_b: 0.0 },
                rule: AcceptRule::OppositeOutcomes,
                alternates: vec![],
            }),
        }];

        // |φ_k⟩ = a_k ⊗ b_k with
        //   a_k = |0⟩/√(1+cotθ) + e^{2πik/3}|1⟩/√(1+tanθ)
        //   b_k = |0⟩/√(1+tanθ) + e^{2πik/3}|1⟩/√(1+cotθ)
        // so that ⟨φ_k|Ψ⟩ = 0 identically and |a_k| = |b_k| = 1 via
        // 1/(1+tanθ) + 1/(1+cotθ) = 1.
        let inv_cot = 1.0 / (1.0 + 1.0 / theta.tan()).sqrt();
        let inv_tan = 1.0 / (1.0 + theta.tan()).sqrt();
        // Table I's φ_k wave-plate columns are quoted for θ = 30°.
        let table_is_30 = (theta - 30.0f64.to_radians()).abs() < 1e-9;
        let phi_plates = [
            PlateSetting { qwp_a: 30.1564, hwp_a: 45.9801, qwp_b: 59.8436, hwp_b: 60.8237 },
            PlateSetting { qwp_a: 30.1564, hwp_a: 74.1763, qwp_b: 59.8436, hwp_b: 89.0199 },
            PlateSetting { qwp_a: 52.9551, hwp_a: 26.4774, qwp_b: 37.0449, hwp_b: 18.5226 },
        ];
        for k in 1..=3u32 {
            let phase = C64::new(0.0, 2.0 * PI * k as f64 / 3.0).exp();
            let a = Ket::new(vec![C64::new(inv_cot, 0.0), phase * inv_tan])?;
            let b = Ket::new(vec![C64::new(inv_tan, 0.0), phase * inv_cot])?;
            let phi = a.kron(&b)?;
            settings.push(MeasurementSetting {
                projector: Matrix::identity(4).sub(&phi.outer()).expect("same dims"),
                weight: w_phi,
                label: format!("phi{k}"),
                waveplates: table_is_30.then(|| WavePlates {
                    plates: phi_plates[(k - 1) as usize],
                    rule: AcceptRule::RejectBothTransmitted,
                    alternates: vec![],
                }),
            });
        }
        Strategy::build(settings, target, f)
    }

    /// Strategy for a product target (θ = 0 or π/2), where the locally
    /// optimal strategy coincides with the global one. f = 1.
    pub fn product(theta: f64) -> Result<Strategy, StrategyError> {
        if theta != 0.0 && (theta - FRAC_PI_2).abs() > 1e-12 {
            return Err(StrategyError::ThetaInvalid {
                theta,
                reason: "product strategy requires theta = 0 or pi/2",
            });
        }
        Strategy::global(TargetState::new(theta)?)
    }

    /// Dispatches on θ: π/4 → singlet, 0 or π/2 → product, else partial.
    pub fn auto(theta: f64) -> Result<Strategy, StrategyError> {
        if (theta - FRAC_PI_4).abs() < 1e-12 {
            Strategy::singlet()
        } else if theta == 0.0 || (theta - FRAC_PI_2).abs() < 1e-12 {
            Strategy::product(theta)
        } else {
            Strategy::partial(theta)
        }
    }

    pub fn of_kind(kind: StrategyKind, theta: f64) -> Result<Strategy, StrategyError> {
        match kind {
            StrategyKind::Auto => Strategy::auto(theta),
            StrategyKind::Global => Ok(Strategy::global(TargetState::new(theta)?)?),
            StrategyKind::Singlet => {
                if (theta - FRAC_PI_4).abs() > 1e-12 {
                    return Err(StrategyError::ThetaInvalid {
                        theta,
                        reason: "singlet strategy requires theta = pi/4",
                    });
                }
                Strategy::singlet()
            }
            StrategyKind::Partial => Strategy::partial(theta),
            StrategyKind::Product => Strategy::product(theta),
        }
    }

    fn build(
        settings: Vec<MeasurementSetting>,
        target: TargetState,
        f: f64,
    ) -> Result<Strategy, StrategyError> {
        let strategy = Strategy {
            settings,
            target,
            f,
            self_check: SelfCheck {
                weight_sum_residual: 0.0,
                target_residual: 0.0,
                second_eigenvalue_residual: 0.0,
                idempotency_residual: 0.0,
            },
        };
        let check = strategy.compute_self_check()?;
        if check.weight_sum_residual > 1e-12
            || check.target_residual > 1e-8
            || check.second_eigenvalue_residual > 1e-8
            || check.idempotency_residual > 1e-10
        {
            return Err(StrategyError::SelfCheckFailed(check));
        }
        Ok(Strategy { self_check: check, ..strategy })
    }

    fn compute_self_check(&self) -> Result<SelfCheck, StrategyError> {
        let weight_sum: f64 = self.settings.iter().map(|s| s.weight).sum();
        let idempotency = self
            .settings
            .iter()
            .map(|s| s.projector.idempotency_residual().max(s.projector.hermiticity_residual()))
            .fold(0.0f64, f64::max);

        let omega = self.omega();
        let psi = self.target.ket();
        let image = omega.apply(psi)?;
        let target_residual = (0..4)
            .map(|i| (image.amp(i) - psi.amp(i)).norm())
            .fold(0.0f64, f64::max);

        let eigenvalues = omega.hermitian_eigenvalues()?;
        // rank-1 Ω (global strategy) has second eigenvalue 0 = 1 − f with f = 1
        let second = eigenvalues[1];
        Ok(SelfCheck {
            weight_sum_residual: (weight_sum - 1.0).abs(),
            target_residual,
            second_eigenvalue_residual: (second - (1.0 - self.f)).abs(),
            idempotency_residual: idempotency,
        })
    }

    pub fn settings(&self) -> &[MeasurementSetting] {
        &self.settings
    }

    pub fn target(&self) -> &TargetState {
        &self.target
    }

    /// Efficiency constant f = 1 − λ₂(Ω).
    pub fn f(&self) -> f64 {
        self.f
    }

    /// Residuals recorded by the constructor self-check.
    pub fn self_check(&self) -> SelfCheck {
        self.self_check
    }

    /// The verification operator Ω = Σ wᵢPᵢ.
    pub fn omega(&self) -> Matrix {
        let mut m = Matrix::zeros(4);
        for s in &self.settings {
            m = m.add(&s.projector.scale(s.weight)).expect("same dims");
        }
        m
    }
}
