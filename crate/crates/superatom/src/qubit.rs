//! SU(2) qubit control: microwave rotations, state preparation and the
//! measurement-basis conventions used for tomography.
//!
//! The qubit lives on {|r1>, |r2>} with |r1> taken as +Z. States are compared
//! only through |<a|b>|^2, so no canonical global phase is stored.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Relative microwave phase that maps |r1> onto the diagonal state, fixing
/// which phase the X basis uses. Both phases are configurable; these are the
/// defaults the library is tested with.
pub const DEFAULT_PHASE_X: f64 = FRAC_PI_2;
/// Relative microwave phase for the Y (circular) basis, offset by pi/2 from X.
pub const DEFAULT_PHASE_Y: f64 = PI;

/// Normalized two-level state `a_r1 |r1> + a_r2 |r2>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    a_r1: Complex64,
    a_r2: Complex64,
}

impl QubitState {
    /// Build a state from raw amplitudes, normalizing them. Rejects the zero
    /// vector.
    pub fn new(a_r1: Complex64, a_r2: Complex64) -> Result<Self> {
        let norm_sq = a_r1.norm_sqr() + a_r2.norm_sqr();
        if !(norm_sq > 1e-24) || !norm_sq.is_finite() {
            return Err(Error::InvalidParameter {
                name: "state norm",
                value: norm_sq,
                reason: "amplitudes must form a nonzero finite vector",
            });
        }
        let inv = norm_sq.sqrt().recip();
        Ok(Self {
            a_r1: a_r1 * inv,
            a_r2: a_r2 * inv,
        })
    }

    /// Real-amplitude convenience constructor.
    pub fn from_reals(a_r1: f64, a_r2: f64) -> Result<Self> {
        Self::new(Complex64::new(a_r1, 0.0), Complex64::new(a_r2, 0.0))
    }

    pub fn r1() -> Self {
        Self {
            a_r1: Complex64::ONE,
            a_r2: Complex64::ZERO,
        }
    }

    pub fn r2() -> Self {
        Self {
            a_r1: Complex64::ZERO,
            a_r2: Complex64::ONE,
        }
    }

    /// Diagonal state (|r1> + |r2>)/sqrt(2).
    pub fn diagonal() -> Self {
        Self::from_reals(1.0, 1.0).expect("nonzero")
    }

    /// Antidiagonal state (|r1> - |r2>)/sqrt(2).
    pub fn antidiagonal() -> Self {
        Self::from_reals(1.0, -1.0).expect("nonzero")
    }

    /// Right-circular state (|r1> + i|r2>)/sqrt(2).
    pub fn circular_right() -> Self {
        Self::new(Complex64::ONE, Complex64::I).expect("nonzero")
    }

    /// Left-circular state (|r1> - i|r2>)/sqrt(2).
    pub fn circular_left() -> Self {
        Self::new(Complex64::ONE, -Complex64::I).expect("nonzero")
    }

    pub fn amp_r1(&self) -> Complex64 {
        self.a_r1
    }

    pub fn amp_r2(&self) -> Complex64 {
        self.a_r2
    }

    pub fn population_r1(&self) -> f64 {
        self.a_r1.norm_sqr()
    }

    pub fn population_r2(&self) -> f64 {
        self.a_r2.norm_sqr()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.a_r1.conj() * other.a_r1 + self.a_r2.conj() * other.a_r2
    }
}

/// Pulse area and relative phase of one microwave Raman pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    /// Pulse area in radians, in [0, 2*pi].
    pub theta: f64,
    /// Relative phase in radians, in [0, 2*pi).
    pub phi: f64,
}

impl Rotation {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=2.0 * PI).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                reason: "pulse area must lie in [0, 2*pi]",
            });
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::InvalidParameter {
                name: "phi",
                value: phi,
                reason: "phase must lie in [0, 2*pi)",
            });
        }
        Ok(Self { theta, phi })
    }

    /// Same pulse area with the phase advanced by pi: the inverse pulse.
    pub fn inverse(&self) -> Rotation {
        Rotation {
            theta: self.theta,
            phi: wrap_phase(self.phi + PI),
        }
    }
}

/// Wrap an angle into [0, 2*pi).
pub fn wrap_phase(phi: f64) -> f64 {
    let tau = 2.0 * PI;
    let mut w = phi % tau;
    if w < 0.0 {
        w += tau;
    }
    // `%` can return exactly tau for inputs just below a multiple of tau.
    if w >= tau {
        w = 0.0;
    }
    w
}

/// 2x2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2(pub [[Complex64; 2]; 2]);

impl Unitary2 {
    pub fn identity() -> Self {
        Unitary2([
            [Complex64::ONE, Complex64::ZERO],
            [Complex64::ZERO, Complex64::ONE],
        ])
    }

    pub fn apply(&self, state: &QubitState) -> QubitState {
        let a = self.0[0][0] * state.amp_r1() + self.0[0][1] * state.amp_r2();
        let b = self.0[1][0] * state.amp_r1() + self.0[1][1] * state.amp_r2();
        QubitState::new(a, b).expect("unitary preserves the norm")
    }

    pub fn mul(&self, rhs: &Unitary2) -> Unitary2 {
        let mut out = [[Complex64::ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, elem) in row.iter_mut().enumerate() {
                *elem = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        Unitary2(out)
    }

    pub fn adjoint(&self) -> Unitary2 {
        Unitary2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    /// Max elementwise deviation from the identity.
    pub fn distance_from_identity(&self) -> f64 {
        let id = Unitary2::identity();
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - id.0[i][j]).norm());
            }
        }
        d
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.mul(&self.adjoint()).distance_from_identity() <= tol
    }
}

/// Rotation unitary
/// `U(theta, phi) = [[cos(t/2), -i e^{-i phi} sin(t/2)],
///                   [-i e^{i phi} sin(t/2), cos(t/2)]]`.
pub fn rotation_unitary(rot: &Rotation) -> Unitary2 {
    let c = Complex64::new((rot.theta / 2.0).cos(), 0.0);
    let s = (rot.theta / 2.0).sin();
    let phase = Complex64::from_polar(1.0, rot.phi);
    let mi = -Complex64::I;
    Unitary2([[c, mi * phase.conj() * s], [mi * phase * s, c]])
}

/// State produced by applying one pulse to |r1>.
pub fn prepare_state(rot: &Rotation) -> QubitState {
    rotation_unitary(rot).apply(&QubitState::r1())
}

/// Projection probability `|<outcome|state>|^2`.
pub fn born_probability(state: &QubitState, outcome: &QubitState) -> f64 {
    outcome.inner(state).norm_sqr()
}

/// Tomography basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementBasis {
    Z,
    X,
    Y,
}

impl MeasurementBasis {
    pub const ALL: [MeasurementBasis; 3] = [
        MeasurementBasis::Z,
        MeasurementBasis::X,
        MeasurementBasis::Y,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            MeasurementBasis::Z => "Z",
            MeasurementBasis::X => "X",
            MeasurementBasis::Y => "Y",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "Z" => Ok(MeasurementBasis::Z),
            "X" => Ok(MeasurementBasis::X),
            "Y" => Ok(MeasurementBasis::Y),
            _ => Err(Error::Malformed {
                line: 0,
                message: format!("unknown basis label `{s}`, expected Z, X or Y"),
            }),
        }
    }
}

impl std::fmt::Display for MeasurementBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Phase convention tying the X and Y bases to concrete microwave phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisConvention {
    pub phase_x: f64,
    pub phase_y: f64,
}

impl Default for BasisConvention {
    fn default() -> Self {
        Self {
            phase_x: DEFAULT_PHASE_X,
            phase_y: DEFAULT_PHASE_Y,
        }
    }
}

/// Pulse that maps |r1> onto the plus state of `basis`; its inverse maps the
/// plus state back to |r1>. Z needs no pulse.
pub fn basis_rotation_with(basis: MeasurementBasis, conv: &BasisConvention) -> Rotation {
    match basis {
        MeasurementBasis::Z => Rotation {
            theta: 0.0,
            phi: 0.0,
        },
        MeasurementBasis::X => Rotation {
            theta: FRAC_PI_2,
            phi: wrap_phase(conv.phase_x),
        },
        MeasurementBasis::Y => Rotation {
            theta: FRAC_PI_2,
            phi: wrap_phase(conv.phase_y),
        },
    }
}

/// [`basis_rotation_with`] under the default phase convention.
pub fn basis_rotation(basis: MeasurementBasis) -> Rotation {
    basis_rotation_with(basis, &BasisConvention::default())
}

/// Plus eigenstate of `basis` under a convention.
pub fn basis_plus_state(basis: MeasurementBasis, conv: &BasisConvention) -> QubitState {
    prepare_state(&basis_rotation_with(basis, conv))
}

/// Minus eigenstate of `basis`: the plus state of the pulse with theta
/// extended by pi (orthogonal by construction).
pub fn basis_minus_state(basis: MeasurementBasis, conv: &BasisConvention) -> QubitState {
    let rot = basis_rotation_with(basis, conv);
    let flipped = Rotation {
        theta: rot.theta + PI,
        phi: rot.phi,
    };
    prepare_state(&flipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn zero_area_pulse_is_identity() {
        let u = rotation_unitary(&Rotation::new(0.0, 1.2).unwrap());
        assert!(u.distance_from_identity() < 1e-15);
    }

    #[test]
    fn pi_pulse_transfers_population() {
        let u = rotation_unitary(&Rotation::new(PI, 0.0).unwrap());
        let out = u.apply(&QubitState::r1());
        assert_relative_eq!(out.population_r2(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn half_pulse_splits_population() {
        let out = prepare_state(&Rotation::new(FRAC_PI_2, 0.0).unwrap());
        assert_relative_eq!(out.population_r1(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(out.population_r2(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn half_pulse_with_x_phase_prepares_diagonal() {
        let out = prepare_state(&Rotation::new(FRAC_PI_2, DEFAULT_PHASE_X).unwrap());
        assert_relative_eq!(
            born_probability(&out, &QubitState::diagonal()),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn tilted_preparation_populations() {
        // theta = 2*acos(0.88) puts cos^2 = 0.7744 on |r1>.
        let theta = 2.0 * 0.88f64.acos();
        let out = prepare_state(&Rotation::new(theta, 0.0).unwrap());
        assert_relative_eq!(out.population_r1(), 0.7744, epsilon = 1e-12);
        assert_relative_eq!(out.population_r2(), 0.2256, epsilon = 1e-12);
    }

    #[test]
    fn born_basics() {
        let r1 = QubitState::r1();
        let r2 = QubitState::r2();
        assert_relative_eq!(born_probability(&r1, &r1), 1.0, epsilon = 1e-15);
        assert!(born_probability(&r1, &r2).abs() < 1e-15);
    }

    #[test]
    fn born_overlap_of_normalized_tilted_state_with_diagonal() {
        // |<D|psi>|^2 for psi ~ 0.88|r1> + 0.48|r2> after normalization is
        // (0.88 + 0.48)^2 / (2 * (0.88^2 + 0.48^2)) = 289/314.
        let psi = QubitState::from_reals(0.88, 0.48).unwrap();
        let expected = (0.88f64 + 0.48).powi(2) / (2.0 * (0.88f64.powi(2) + 0.48f64.powi(2)));
        assert_relative_eq!(expected, 289.0 / 314.0, epsilon = 1e-15);
        assert_relative_eq!(
            born_probability(&psi, &QubitState::diagonal()),
            expected,
            epsilon = 1e-12
        );
        // The 0.47 variant quoted elsewhere is kept as a fixture too.
        let psi_b = QubitState::from_reals(0.88, 0.47).unwrap();
        let expected_b = (0.88f64 + 0.47).powi(2) / (2.0 * (0.88f64.powi(2) + 0.47f64.powi(2)));
        assert_relative_eq!(
            born_probability(&psi_b, &QubitState::diagonal()),
            expected_b,
            epsilon = 1e-12
        );
    }

    #[test]
    fn basis_rotations_map_plus_states_to_r1() {
        let conv = BasisConvention::default();
        for basis in MeasurementBasis::ALL {
            let rot = basis_rotation_with(basis, &conv);
            let inv = rotation_unitary(&rot.inverse());
            let plus = basis_plus_state(basis, &conv);
            let mapped = inv.apply(&plus);
            assert_relative_eq!(mapped.population_r1(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn default_convention_matches_named_states() {
        let conv = BasisConvention::default();
        assert_relative_eq!(
            born_probability(
                &basis_plus_state(MeasurementBasis::X, &conv),
                &QubitState::diagonal()
            ),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            born_probability(
                &basis_plus_state(MeasurementBasis::Y, &conv),
                &QubitState::circular_right()
            ),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            born_probability(
                &basis_plus_state(MeasurementBasis::Z, &conv),
                &QubitState::r1()
            ),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn basis_plus_minus_orthonormal() {
        let conv = BasisConvention::default();
        for basis in MeasurementBasis::ALL {
            let plus = basis_plus_state(basis, &conv);
            let minus = basis_minus_state(basis, &conv);
            assert!(plus.inner(&minus).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_parse_rejects_unknown_label() {
        assert!(MeasurementBasis::parse("Q").is_err());
        assert_eq!(MeasurementBasis::parse("x").unwrap(), MeasurementBasis::X);
    }

    #[test]
    fn zero_state_rejected() {
        assert!(QubitState::new(Complex64::ZERO, Complex64::ZERO).is_err());
    }

    proptest! {
        #[test]
        fn pulse_then_inverse_is_identity(theta in 0.0..(2.0 * PI), phi in 0.0..(2.0 * PI)) {
            let rot = Rotation::new(theta, phi).unwrap();
            let u = rotation_unitary(&rot);
            let v = rotation_unitary(&rot.inverse());
            prop_assert!(u.mul(&v).distance_from_identity() < 1e-10);
        }

        #[test]
        fn rotation_unitaries_are_unitary(theta in 0.0..(2.0 * PI), phi in 0.0..(2.0 * PI)) {
            let u = rotation_unitary(&Rotation::new(theta, phi).unwrap());
            prop_assert!(u.is_unitary(1e-12));
        }

        #[test]
        fn same_axis_pulses_add(
            theta1 in 0.0..PI,
            theta2 in 0.0..PI,
            phi in 0.0..(2.0 * PI),
        ) {
            let u1 = rotation_unitary(&Rotation::new(theta1, phi).unwrap());
            let u2 = rotation_unitary(&Rotation::new(theta2, phi).unwrap());
            let combined = rotation_unitary(&Rotation::new(theta1 + theta2, phi).unwrap());
            let mut worst: f64 = 0.0;
            let prod = u1.mul(&u2);
            for i in 0..2 {
                for j in 0..2 {
                    worst = worst.max((prod.0[i][j] - combined.0[i][j]).norm());
                }
            }
            prop_assert!(worst < 1e-10);
        }

        #[test]
        fn born_pair_sums_to_one(
            re1 in -1.0..1.0f64, im1 in -1.0..1.0f64,
            re2 in -1.0..1.0f64, im2 in -1.0..1.0f64,
            which in 0usize..3,
        ) {
            prop_assume!(re1.abs() + im1.abs() + re2.abs() + im2.abs() > 1e-3);
            let state = QubitState::new(
                Complex64::new(re1, im1),
                Complex64::new(re2, im2),
            ).unwrap();
            let conv = BasisConvention::default();
            let basis = MeasurementBasis::ALL[which];
            let p_plus = born_probability(&state, &basis_plus_state(basis, &conv));
            let p_minus = born_probability(&state, &basis_minus_state(basis, &conv));
            prop_assert!((p_plus + p_minus - 1.0).abs() < 1e-12);
        }
    }
}
