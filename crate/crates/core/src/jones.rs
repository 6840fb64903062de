//! Jones-calculus consistency checks for the wave-plate realization of the
//! measurement settings.
//!
//! Convention (fixed so that the all-zero plate row realizes the Z basis and
//! the 45°/22.5° rows realize the X and Y bases): each arm analyzes the state
//! `|u⟩ = QWP(q) · HWP(h) · |H⟩`, with fast-axis angles measured
//! counterclockwise from horizontal and the standard retarder matrices
//! (phase lead on the fast axis). |H⟩ ≡ |0⟩. The PBS transmits |u⟩ and
//! reflects its orthogonal complement.

use alloc::string::String;
use alloc::vec::Vec;

// Required for f64 math under no_std; the import looks unused in test
// builds, where std in the crate graph provides the inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{Ket, Matrix, C64};
use crate::strategy::{Strategy, StrategyError};

/// How the two single-arm outcomes are coarse-grained into accept/reject.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptRule {
    /// Accept when Alice's outcome is opposite to Bob's (the Pauli settings).
    OppositeOutcomes,
    /// Accept every outcome except both arms transmitting (the rank-3
    /// complements I − |φ⟩⟨φ| with |φ⟩ = |u⟩⊗|v⟩).
    RejectBothTransmitted,
}

/// Fast-axis angles in degrees for one setting, both arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateSetting {
    pub qwp_a: f64,
    pub hwp_a: f64,
    pub qwp_b: f64,
    pub hwp_b: f64,
}

/// Wave-plate annotation attached to a measurement setting. `alternates`
/// carries ambiguous printed readings that are reported alongside the
/// primary angles rather than asserted.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePlates {
    pub plates: PlateSetting,
    pub rule: AcceptRule,
    pub alternates: Vec<(String, PlateSetting)>,
}

/// Jones matrix of a half-wave plate with fast axis at `angle` radians.
pub fn hwp_matrix(angle: f64) -> Matrix {
    let (s, c) = (2.0 * angle).sin_cos();
    let mut m = Matrix::zeros(2);
    m.set(0, 0, C64::new(c, 0.0));
    m.set(0, 1, C64::new(s, 0.0));
    m.set(1, 0, C64::new(s, 0.0));
    m.set(1, 1, C64::new(-c, 0.0));
    m
}

/// Jones matrix of a quarter-wave plate with fast axis at `angle` radians.
pub fn qwp_matrix(angle: f64) -> Matrix {
    let (s, c) = angle.sin_cos();
    let off = C64::new(1.0, -1.0) * (s * c);
    let mut m = Matrix::zeros(2);
    m.set(0, 0, C64::new(c * c, s * s));
    m.set(0, 1, off);
    m.set(1, 0, off);
    m.set(1, 1, C64::new(s * s, c * c));
    m
}

/// The single-arm state analyzed by a PBS behind the given plates, i.e. the
/// PBS-transmitted mode back-propagated through HWP then QWP. Angles in
/// degrees. Normalized.
pub fn projector_from_waveplates(qwp_deg: f64, hwp_deg: f64) -> Ket {
    let h = Ket::basis(2, 0).expect("dim 2");
    let v = hwp_matrix(hwp_deg.to_radians())
        .apply(&h)
        .and_then(|k| qwp_matrix(qwp_deg.to_radians()).apply(&k))
        .expect("2x2 chain");
    v.normalized()
}

/// The joint 4x4 accept projector realized by a plate setting under its rule.
pub fn realized_projector(plates: &PlateSetting, rule: AcceptRule) -> Matrix {
    let u = projector_from_waveplates(plates.qwp_a, plates.hwp_a);
    let v = projector_from_waveplates(plates.qwp_b, plates.hwp_b);
    match rule {
        AcceptRule::OppositeOutcomes => {
            let u_perp = u.orthogonal().expect("dim 2");
            let v_perp = v.orthogonal().expect("dim 2");
            let a = u.kron(&v_perp).expect("2x2 factors").outer();
            let b = u_perp.kron(&v).expect("2x2 factors").outer();
            a.add(&b).expect("same dims")
        }
        AcceptRule::RejectBothTransmitted => {
            let uv = u.kron(&v).expect("2x2 factors").outer();
            Matrix::identity(4).sub(&uv).expect("same dims")
        }
    }
}

/// Per-setting comparison of the plate-realized projector to the intended
/// one. Projectors carry no global phase, so the deviation is a plain
/// entrywise maximum.
#[derive(Debug, Clone)]
pub struct TableCheckEntry {
    pub label: String,
    pub realized: Matrix,
    pub intended: Matrix,
    pub deviation: f64,
    /// deviation exceeds the 1e−6 flag threshold
    pub flagged: bool,
    /// deviations for alternate printed readings, reported but never flagged
    pub alternates: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct TableCheckReport {
    /// Human-readable statement of the Jones convention in force.
    pub convention: &'static str,
    pub entries: Vec<TableCheckEntry>,
}

pub const JONES_CONVENTION: &str = "arm state = QWP(q) * HWP(h) * |H>, fast axis CCW from horizontal, \
     standard retarder matrices; PBS transmits the arm state";

const FLAG_TOL: f64 = 1e-6;

/// Compares every annotated setting's realized projector to its intended
/// projector. Deterministic; never panics on valid strategies; errors only
/// when a setting lacks annotations.
pub fn check_table(strategy: &Strategy) -> Result<TableCheckReport, StrategyError> {
    let mut entries = Vec::new();
    for setting in strategy.settings() {
        let wp = setting.waveplates().ok_or_else(|| StrategyError::MissingWavePlates {
            label: String::from(setting.label()),
        })?;
        let realized = realized_projector(&wp.plates, wp.rule);
        let deviation = realized.max_abs_diff(setting.projector());
        let alternates = wp
            .alternates
            .iter()
            .map(|(name, plates)| {
                let alt = realized_projector(plates, wp.rule);
                (name.clone(), alt.max_abs_diff(setting.projector()))
            })
            .collect();
        entries.push(TableCheckEntry {
            label: String::from(setting.label()),
            realized,
            intended: setting.projector().clone(),
            deviation,
            flagged: deviation > FLAG_TOL,
            alternates,
        });
    }
    Ok(TableCheckReport { convention: JONES_CONVENTION, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli_y;

    #[test]
    fn aligned_plates_leave_h_fixed() {
        let u = projector_from_waveplates(0.0, 0.0);
        assert!((u.amp(0).norm() - 1.0).abs() < 1e-15);
        assert!(u.amp(1).norm() < 1e-15);
    }

    #[test]
    fn qwp45_hwp22_5_realizes_x_arm() {
        let u = projector_from_waveplates(45.0, 22.5);
        // X eigenstate up to global phase: equal moduli, relative phase 0
        let r = 1.0 / 2.0f64.sqrt();
        assert!((u.amp(0).norm() - r).abs() < 1e-12);
        assert!(((u.amp(1) / u.amp(0)) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zz_plates_reproduce_diag_0110() {
        let plates = PlateSetting { qwp_a: 0.0, hwp_a: 0.0, qwp_b: 0.0, hwp_b: 0.0 };
        let p = realized_projector(&plates, AcceptRule::OppositeOutcomes);
        assert!(p.max_abs_diff(&Matrix::diag(&[0.0, 1.0, 1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn yy_plates_reproduce_pauli_projector() {
        let plates = PlateSetting { qwp_a: 0.0, hwp_a: 67.5, qwp_b: 0.0, hwp_b: 67.5 };
        let p = realized_projector(&plates, AcceptRule::OppositeOutcomes);
        let y = pauli_y();
        let expected = Matrix::identity(4).sub(&y.kron(&y).unwrap()).unwrap().scale(0.5);
        assert!(p.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn check_table_on_singlet() {
        let s = Strategy::singlet().unwrap();
        let report = check_table(&s).unwrap();
        assert_eq!(report.entries.len(), 3);
        for e in &report.entries {
            assert!(e.deviation < 1e-6, "{} deviated {}", e.label, e.deviation);
            assert!(!e.flagged);
        }
        // XX carries the table-printed Bob QWP 4° alternate; its deviation is
        // large and only reported
        let xx = report.entries.iter().find(|e| e.label == "XX").unwrap();
        assert_eq!(xx.alternates.len(), 1);
        assert!(xx.alternates[0].1 > 0.1);
    }

    #[test]
    fn check_table_requires_annotations() {
        let s = Strategy::product(0.0).unwrap();
        assert!(matches!(
            check_table(&s),
            Err(StrategyError::MissingWavePlates { .. })
        ));
    }

    #[test]
    fn check_table_partial_30_generates_report() {
        let s = Strategy::partial(30.0f64.to_radians()).unwrap();
        let report = check_table(&s).unwrap();
        assert_eq!(report.entries.len(), 4);
        let zz = report.entries.iter().find(|e| e.label == "ZZ").unwrap();
        assert!(zz.deviation < 1e-12);
        // φ_k rows are convention-dependent; only require the report exists
        // with finite deviations
        for e in &report.entries {
            assert!(e.deviation.is_finite());
        }
    }
}
