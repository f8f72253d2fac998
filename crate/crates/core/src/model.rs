//! Physical parameters, the `tanh` potential profile, asymptotic kinematics
//! and two-component spinors.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::{Complex, Error, Result};

/// Kinematic inputs that do not depend on the shape of the transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    m: f64,
    q: f64,
    p: f64,
    a1: f64,
    a2: f64,
}

impl Kinematics {
    /// Validates `m > 0` and that every field is finite.
    pub fn new(m: f64, q: f64, p: f64, a1: f64, a2: f64) -> Result<Self> {
        for (name, value) in [("m", m), ("q", q), ("p", p), ("a1", a1), ("a2", a2)] {
            if !value.is_finite() {
                return Err(invalid(name, format!("must be finite, got {value}")));
            }
        }
        if m <= 0.0 {
            return Err(invalid("m", format!("must be positive, got {m}")));
        }
        Ok(Self { m, q, p, a1, a2 })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn asymptotic_modes(&self) -> AsymptoticModes {
        let pi1 = self.p - self.q * self.a1;
        let pi2 = self.p - self.q * self.a2;
        AsymptoticModes {
            pi1,
            pi2,
            e1: pi1.hypot(self.m),
            e2: pi2.hypot(self.m),
        }
    }

    /// Attaches a transition time and width.
    pub fn with_transition(self, t0: f64, tau: f64) -> Result<StepParameters> {
        StepParameters::from_kinematics(self, t0, tau)
    }
}

/// Full set of inputs for a smooth step: `A(t)` goes from `a1` to `a2`
/// around `t0` over a time of order `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParameters {
    kinematics: Kinematics,
    t0: f64,
    tau: f64,
}

impl StepParameters {
    pub fn new(m: f64, q: f64, p: f64, a1: f64, a2: f64, t0: f64, tau: f64) -> Result<Self> {
        Self::from_kinematics(Kinematics::new(m, q, p, a1, a2)?, t0, tau)
    }

    pub fn from_kinematics(kinematics: Kinematics, t0: f64, tau: f64) -> Result<Self> {
        if !t0.is_finite() {
            return Err(invalid("t0", format!("must be finite, got {t0}")));
        }
        if !tau.is_finite() {
            return Err(invalid("tau", format!("must be finite, got {tau}")));
        }
        if tau <= 0.0 {
            return Err(invalid(
                "tau",
                format!("must be positive, got {tau}; the Heaviside limit is `sharp_step`"),
            ));
        }
        Ok(Self {
            kinematics,
            t0,
            tau,
        })
    }

    pub fn kinematics(&self) -> &Kinematics {
        &self.kinematics
    }

    pub fn m(&self) -> f64 {
        self.kinematics.m
    }

    pub fn q(&self) -> f64 {
        self.kinematics.q
    }

    pub fn p(&self) -> f64 {
        self.kinematics.p
    }

    pub fn a1(&self) -> f64 {
        self.kinematics.a1
    }

    pub fn a2(&self) -> f64 {
        self.kinematics.a2
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        let k = &self.kinematics;
        Self::new(k.m, k.q, p, k.a1, k.a2, self.t0, self.tau)
    }

    pub fn with_potentials(&self, a1: f64, a2: f64) -> Result<Self> {
        let k = &self.kinematics;
        Self::new(k.m, k.q, k.p, a1, a2, self.t0, self.tau)
    }

    pub fn with_t0(&self, t0: f64) -> Result<Self> {
        Self::from_kinematics(self.kinematics, t0, self.tau)
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::from_kinematics(self.kinematics, self.t0, tau)
    }

    /// Dimensionless time `(t - t0) / tau`.
    pub fn scaled_time(&self, t: f64) -> f64 {
        (t - self.t0) / self.tau
    }

    /// `A(t) = A1 + (A2 - A1)/2 * (1 + tanh((t - t0)/tau))`.
    pub fn potential_at(&self, t: f64) -> f64 {
        let k = &self.kinematics;
        let v = k.a1 + (k.a2 - k.a1) * half_one_plus_tanh(self.scaled_time(t));
        // Rounding can push the sum an ulp past an endpoint.
        v.clamp(k.a1.min(k.a2), k.a1.max(k.a2))
    }

    /// The same profile written as `(A1 + A2 e^{2s}) / (1 + e^{2s})`.
    pub fn potential_exponential_form(&self, t: f64) -> f64 {
        let k = &self.kinematics;
        let s = self.scaled_time(t);
        if s <= 0.0 {
            let w = (2.0 * s).exp();
            (k.a1 + k.a2 * w) / (1.0 + w)
        } else {
            let w = (-2.0 * s).exp();
            (k.a1 * w + k.a2) / (w + 1.0)
        }
    }

    /// `dA/dt = (A2 - A1)/(2 tau) * sech^2((t - t0)/tau)`.
    pub fn potential_rate(&self, t: f64) -> f64 {
        let k = &self.kinematics;
        (k.a2 - k.a1) / (2.0 * self.tau) * sech_squared(self.scaled_time(t))
    }

    /// Kinetic momentum `p - q A(t)`.
    pub fn kinetic_momentum(&self, t: f64) -> f64 {
        self.kinematics.p - self.kinematics.q * self.potential_at(t)
    }

    pub fn kinetic_momentum_rate(&self, t: f64) -> f64 {
        -self.kinematics.q * self.potential_rate(t)
    }

    pub fn asymptotic_modes(&self) -> AsymptoticModes {
        self.kinematics.asymptotic_modes()
    }
}

/// `(1 + tanh s) / 2`, i.e. the logistic function of `2s`, without
/// cancellation or overflow for either sign of `s`.
pub(crate) fn half_one_plus_tanh(s: f64) -> f64 {
    if s <= 0.0 {
        let w = (2.0 * s).exp();
        w / (1.0 + w)
    } else {
        1.0 / (1.0 + (-2.0 * s).exp())
    }
}

/// `sech^2 s = 4 e^{-2|s|} / (1 + e^{-2|s|})^2`.
pub(crate) fn sech_squared(s: f64) -> f64 {
    let w = (-2.0 * s.abs()).exp();
    4.0 * w / ((1.0 + w) * (1.0 + w))
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

/// Kinetic momenta and energies well before (`1`) and well after (`2`) the
/// transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticModes {
    pub pi1: f64,
    pub pi2: f64,
    pub e1: f64,
    pub e2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Chiral representation; the reduced Hamiltonian is `pi*s3 + m*s1`.
    Weyl,
    /// Standard representation; the reduced Hamiltonian is `m*s3 + pi*s1`.
    Dirac,
}

/// Two complex amplitudes `(phi, theta)` tagged with their basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinor {
    pub upper: Complex,
    pub lower: Complex,
    pub basis: Basis,
}

impl TwoSpinor {
    pub fn weyl(upper: Complex, lower: Complex) -> Self {
        Self {
            upper,
            lower,
            basis: Basis::Weyl,
        }
    }

    pub fn dirac(upper: Complex, lower: Complex) -> Self {
        Self {
            upper,
            lower,
            basis: Basis::Dirac,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            upper: self.upper * factor,
            lower: self.lower * factor,
            basis: self.basis,
        }
    }

    /// Euclidean distance to `other`; both must share a basis.
    pub fn distance(&self, other: &TwoSpinor) -> Result<f64> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                expected: self.basis,
                found: other.basis,
            });
        }
        Ok(((self.upper - other.upper).norm_sqr() + (self.lower - other.lower).norm_sqr()).sqrt())
    }
}

/// Applies `(1/sqrt 2) [[1, 1], [1, -1]]`.
///
/// The matrix is symmetric and its own inverse, so it carries the Weyl
/// Hamiltonian `pi*s3 + m*s1` into the Dirac form `m*s3 + pi*s1` and back.
pub fn weyl_to_dirac(s: TwoSpinor) -> Result<TwoSpinor> {
    if s.basis != Basis::Weyl {
        return Err(Error::BasisMismatch {
            expected: Basis::Weyl,
            found: s.basis,
        });
    }
    let (u, l) = hadamard(s.upper, s.lower);
    Ok(TwoSpinor::dirac(u, l))
}

pub fn dirac_to_weyl(s: TwoSpinor) -> Result<TwoSpinor> {
    if s.basis != Basis::Dirac {
        return Err(Error::BasisMismatch {
            expected: Basis::Dirac,
            found: s.basis,
        });
    }
    let (u, l) = hadamard(s.upper, s.lower);
    Ok(TwoSpinor::weyl(u, l))
}

fn hadamard(a: Complex, b: Complex) -> (Complex, Complex) {
    ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2)
}

/// Frequency branch of a free plane wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frequency {
    /// `e^{-iEt}`, eigenvalue `+E`.
    Positive,
    /// `e^{+iEt}`, eigenvalue `-E`.
    Negative,
}

/// Lower/upper ratio `(±E - pi)/m` of the Weyl eigenvector `(1, r)` of
/// `[[pi, m], [m, -pi]]`.
///
/// Uses `(E - pi)/m = m/(E + pi)` on whichever side avoids cancellation.
pub fn weyl_eigen_ratio(pi: f64, m: f64, frequency: Frequency) -> f64 {
    let e = pi.hypot(m);
    match frequency {
        Frequency::Positive if pi > 0.0 => m / (e + pi),
        Frequency::Positive => (e - pi) / m,
        Frequency::Negative if pi < 0.0 => -m / (e - pi),
        Frequency::Negative => -(e + pi) / m,
    }
}

/// `|(1, r)|^2` for the eigenvector above, `2E(E ∓ pi)/m^2`.
pub fn weyl_eigen_norm_sqr(pi: f64, m: f64, frequency: Frequency) -> f64 {
    let r = weyl_eigen_ratio(pi, m, frequency);
    1.0 + r * r
}

/// Upper Dirac-basis component of the Weyl eigenvector `(1, r)`:
/// `(1 + r)/sqrt 2 = (m ± E - pi)/(sqrt 2 m)`.
///
/// The negative-frequency value vanishes exactly when `pi = 0`.
pub fn dirac_upper_of_eigenvector(pi: f64, m: f64, frequency: Frequency) -> f64 {
    let e = pi.hypot(m);
    let numerator = match frequency {
        // m + E - pi
        Frequency::Positive if pi > 0.0 => m + m * m / (e + pi),
        Frequency::Positive => m + e - pi,
        // m - E - pi
        Frequency::Negative if pi >= 0.0 => -pi * (pi + e + m) / (e + m),
        Frequency::Negative => 2.0 * m * (-pi) / (m - pi + e),
    };
    numerator * FRAC_1_SQRT_2 / m
}

/// `H v` for the Weyl-basis reduced Hamiltonian `[[pi, m], [m, -pi]]`.
pub fn weyl_hamiltonian_apply(pi: f64, m: f64, v: [Complex; 2]) -> [Complex; 2] {
    [v[0] * pi + v[1] * m, v[0] * m - v[1] * pi]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn step(a1: f64, a2: f64, tau: f64) -> StepParameters {
        StepParameters::new(1.0, 1.0, 0.3, a1, a2, 0.0, tau).unwrap()
    }

    #[test]
    fn midpoint_and_constant_potential() {
        let s = StepParameters::new(1.0, 1.0, 0.0, -1.5, 2.5, 0.7, 0.2).unwrap();
        assert_eq!(s.potential_at(0.7), 0.5);
        let flat = step(3.0, 3.0, 0.4);
        for t in [-100.0, -1.0, 0.0, 0.3, 1e4] {
            assert_eq!(flat.potential_at(t), 3.0);
        }
    }

    #[test]
    fn potential_direct_value() {
        let s = step(0.0, 1.0, 1.0);
        let expected = (1.0 + 1f64.tanh()) / 2.0;
        assert!((s.potential_at(1.0) - expected).abs() < 1e-15);
        assert!((s.potential_at(1.0) - 0.880_797_077_977_882_3).abs() < 1e-7);
    }

    #[test]
    fn rate_values() {
        let s = StepParameters::new(1.0, 1.0, 0.0, 0.5, 2.5, 1.0, 0.25).unwrap();
        assert!((s.potential_rate(1.0) - 2.0 / 0.5).abs() < 1e-15);
        for sign in [-1.0, 1.0] {
            let t = 1.0 + sign * 30.0 * 0.25;
            assert!(s.potential_rate(t).abs() < 1e-25 * 2.0 / 0.25);
        }
    }

    #[test]
    fn rate_matches_central_difference() {
        let s = step(0.0, 1.0, 1.0);
        let h = 1e-5;
        let fd = (s.potential_at(1.0 + h) - s.potential_at(1.0 - h)) / (2.0 * h);
        assert!((s.potential_rate(1.0) - fd).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_mode_examples() {
        let r3 = 3f64.sqrt();
        let k = Kinematics::new(1.0, 1.0, r3, 0.0, 2.0 * r3).unwrap();
        let modes = k.asymptotic_modes();
        assert!((modes.pi1 - r3).abs() < 1e-15);
        assert!((modes.e1 - 2.0).abs() < 1e-15);
        assert!((modes.pi2 + r3).abs() < 1e-15);
        assert!((modes.e2 - 2.0).abs() < 1e-15);

        let same = Kinematics::new(2.0, -1.0, 0.4, 1.1, 1.1)
            .unwrap()
            .asymptotic_modes();
        assert_eq!(same.e1, same.e2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            StepParameters::new(1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0),
            Err(Error::InvalidParameter { name: "tau", .. })
        ));
        assert!(StepParameters::new(0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(StepParameters::new(1.0, 1.0, f64::NAN, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(StepParameters::new(1.0, 1.0, 0.0, 0.0, 1.0, f64::INFINITY, 1.0).is_err());
        assert!(StepParameters::new(1.0, 1.0, 0.0, 0.0, 1.0, 0.0, -2.0).is_err());
    }

    #[test]
    fn weyl_to_dirac_examples() {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        let d = weyl_to_dirac(TwoSpinor::weyl(one, one)).unwrap();
        assert_eq!(d.basis, Basis::Dirac);
        assert!((d.upper - 2f64.sqrt()).norm() < 1e-15);
        assert!(d.lower.norm() < 1e-15);

        let d = weyl_to_dirac(TwoSpinor::weyl(one, zero)).unwrap();
        assert!((d.upper - FRAC_1_SQRT_2).norm() < 1e-16);
        assert!((d.lower - FRAC_1_SQRT_2).norm() < 1e-16);

        assert!(matches!(
            weyl_to_dirac(d),
            Err(Error::BasisMismatch {
                expected: Basis::Weyl,
                found: Basis::Dirac
            })
        ));
    }

    #[test]
    fn dirac_eigenvector_ratio_matches_plane_wave_form() {
        // Positive-frequency Dirac eigenvector has lower/upper = (E - m)/pi.
        for &(pi, m) in &[(1.7, 1.0), (-0.4, 2.0), (12.0, 0.5), (-9.0, 1.0)] {
            let e = f64::hypot(pi, m);
            let r = weyl_eigen_ratio(pi, m, Frequency::Positive);
            let d = weyl_to_dirac(TwoSpinor::weyl(1.0.into(), r.into())).unwrap();
            let ratio = (d.lower / d.upper).re;
            assert!((ratio - (e - m) / pi).abs() < 1e-12 * (1.0 + ratio.abs()));

            let r = weyl_eigen_ratio(pi, m, Frequency::Negative);
            let d = weyl_to_dirac(TwoSpinor::weyl(1.0.into(), r.into())).unwrap();
            let ratio = (d.lower / d.upper).re;
            assert!((ratio - (-e - m) / pi).abs() < 1e-12 * (1.0 + ratio.abs()));
        }
    }

    #[test]
    fn dirac_upper_components() {
        for &(pi, m) in &[
            (1.7, 1.0),
            (-0.4, 2.0),
            (12.0, 0.5),
            (-9.0, 1.0),
            (0.0, 1.3),
        ] {
            for freq in [Frequency::Positive, Frequency::Negative] {
                let r = weyl_eigen_ratio(pi, m, freq);
                let naive = (1.0 + r) * FRAC_1_SQRT_2;
                let got = dirac_upper_of_eigenvector(pi, m, freq);
                assert!(
                    (got - naive).abs() < 1e-14 * (1.0 + naive.abs()),
                    "{pi} {m} {freq:?}"
                );
            }
        }
        assert_eq!(
            dirac_upper_of_eigenvector(0.0, 1.0, Frequency::Negative),
            0.0
        );
        // Relative accuracy survives pi -> 0.
        let tiny = dirac_upper_of_eigenvector(1e-12, 1.0, Frequency::Negative);
        assert!((tiny / (-1e-12 * FRAC_1_SQRT_2) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn eigen_norm_closed_form() {
        for &(pi, m) in &[(1.7, 1.0), (-0.4, 2.0), (30.0, 0.5)] {
            let e = f64::hypot(pi, m);
            let plus = weyl_eigen_norm_sqr(pi, m, Frequency::Positive);
            let minus = weyl_eigen_norm_sqr(pi, m, Frequency::Negative);
            assert!((plus - 2.0 * e * (e - pi) / (m * m)).abs() < 1e-10 * plus);
            assert!((minus - 2.0 * e * (e + pi) / (m * m)).abs() < 1e-10 * minus);
        }
    }

    proptest! {
        #[test]
        fn potential_is_bounded(a1 in -50.0..50.0f64, a2 in -50.0..50.0f64,
                                tau in 1e-4..10.0f64, t in -1e3..1e3f64) {
            let s = step(a1, a2, tau);
            let v = s.potential_at(t);
            prop_assert!(v >= a1.min(a2) && v <= a1.max(a2));
        }

        #[test]
        fn potential_is_monotone(a1 in -5.0..5.0f64, delta in 0.01..5.0f64,
                                 t in -10.0..10.0f64, dt in 1e-3..1.0f64) {
            let s = step(a1, a1 + delta, 1.0);
            prop_assert!(s.potential_at(t + dt) > s.potential_at(t));
        }

        #[test]
        fn closed_forms_agree(a1 in -5.0..5.0f64, a2 in -5.0..5.0f64, s in -300.0..300.0f64) {
            let p = step(a1, a2, 0.5);
            let t = s * 0.5;
            let x = p.potential_at(t);
            let y = p.potential_exponential_form(t);
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(f64::MIN_POSITIVE));
        }

        #[test]
        fn no_overflow_far_from_transition(s in -1e4..1e4f64) {
            let p = step(-1.0, 2.0, 1.0);
            prop_assert!(p.potential_at(s).is_finite());
            prop_assert!(p.potential_rate(s).is_finite());
            prop_assert!(p.potential_exponential_form(s).is_finite());
        }

        #[test]
        fn energies_bound_mass(m in 0.01..10.0f64, p in -10.0..10.0f64, a1 in -5.0..5.0f64) {
            let modes = Kinematics::new(m, 1.0, p, a1, 0.0).unwrap().asymptotic_modes();
            prop_assert!(modes.e1 >= m && modes.e2 >= m);
        }

        #[test]
        fn conversion_is_unitary_and_involutive(a in -5.0..5.0f64, b in -5.0..5.0f64,
                                                c in -5.0..5.0f64, d in -5.0..5.0f64) {
            let s = TwoSpinor::weyl(Complex::new(a, b), Complex::new(c, d));
            let t = weyl_to_dirac(s).unwrap();
            prop_assert!((t.norm_sqr() - s.norm_sqr()).abs() <= 1e-14 * s.norm_sqr().max(1.0));
            let back = dirac_to_weyl(t).unwrap();
            prop_assert!(back.distance(&s).unwrap() <= 1e-14 * s.norm_sqr().sqrt().max(1.0));
        }

        #[test]
        fn weyl_eigenvector(pi in -20.0..20.0f64, m in 0.01..20.0f64) {
            let e = pi.hypot(m);
            let v = [Complex::new(1.0, 0.0), Complex::new((e - pi) / m, 0.0)];
            let hv = weyl_hamiltonian_apply(pi, m, v);
            for k in 0..2 {
                prop_assert!((hv[k] - v[k] * e).norm() <= 1e-12 * e.max(1.0) * v[k].norm().max(1.0));
            }
        }
    }
}
