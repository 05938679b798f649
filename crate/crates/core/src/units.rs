//! Natural units (ħ = c = m = 1) and the weak-field parameter ε.
//!
//! Every solver in this crate works in natural units. The only place SI
//! quantities appear is [`epsilon_from_tesla`] and its inverse, which the
//! command-line front end uses to accept laboratory field strengths.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Elementary charge, C (CODATA 2018, exact).
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602_176_634e-19;
/// Electron mass, kg (CODATA 2018).
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;
/// Speed of light, m/s (exact).
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// Upper bound on |ε| for which the perturbative formulas are trusted.
pub const MAX_ABS_EPSILON: f64 = 0.1;
/// Smallest accepted packet width r_o/λ_c.
pub const MIN_R0_OVER_LAMBDA: f64 = 10.0;

/// The unit system used internally: ħ = c = m = 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NaturalUnits;

impl NaturalUnits {
    pub const HBAR: f64 = 1.0;
    pub const C: f64 = 1.0;
    pub const MASS: f64 = 1.0;

    /// ω_zbw = 2mc²/ħ.
    pub const fn omega_zbw() -> f64 {
        2.0 * Self::MASS * Self::C * Self::C / Self::HBAR
    }

    /// λ_c = ħ/(mc).
    pub const fn compton_wavelength() -> f64 {
        Self::HBAR / (Self::MASS * Self::C)
    }
}

/// Shorthand for `NaturalUnits::omega_zbw()`.
pub const OMEGA_ZBW: f64 = NaturalUnits::omega_zbw();

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// σ = ±1, the σ_z eigenvalue.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    /// s_z in units of ħ.
    pub fn s_z(self) -> f64 {
        0.5 * self.sign()
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "down",
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" => Ok(Spin::Up),
            "down" => Ok(Spin::Down),
            other => Err(Error::InvalidParameter(format!("unknown spin `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Charge {
    Electron,
    Positron,
}

impl Charge {
    /// +1 for the electron, −1 for the positron.
    ///
    /// This is a label for which shift rule applies, not the sign of the
    /// electric charge.
    pub fn conjugation_sign(self) -> f64 {
        match self {
            Charge::Electron => 1.0,
            Charge::Positron => -1.0,
        }
    }

    pub fn conjugate(self) -> Charge {
        match self {
            Charge::Electron => Charge::Positron,
            Charge::Positron => Charge::Electron,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Charge::Electron => "electron",
            Charge::Positron => "positron",
        }
    }
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Charge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "electron" => Ok(Charge::Electron),
            "positron" => Ok(Charge::Positron),
            other => Err(Error::InvalidParameter(format!("unknown charge `{other}`"))),
        }
    }
}

/// The full parameter set of a run.
///
/// ε ≡ −ω_c/ω_zbw is the only field parameter; for a physical field it is
/// negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub epsilon: f64,
    pub spin: Spin,
    pub charge: Charge,
    pub r0_over_lambda: f64,
    pub phi0: f64,
}

impl Default for DimensionlessParams {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            spin: Spin::Up,
            charge: Charge::Electron,
            r0_over_lambda: 100.0,
            phi0: 0.0,
        }
    }
}

impl DimensionlessParams {
    /// Builds a validated parameter set.
    pub fn new(
        epsilon: f64,
        spin: Spin,
        charge: Charge,
        r0_over_lambda: f64,
        phi0: f64,
    ) -> Result<Self> {
        let params = Self {
            epsilon,
            spin,
            charge,
            r0_over_lambda,
            phi0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn with_spin(mut self, spin: Spin) -> Self {
        self.spin = spin;
        self
    }

    pub fn with_charge(mut self, charge: Charge) -> Self {
        self.charge = charge;
        self
    }

    pub fn with_r0(mut self, r0_over_lambda: f64) -> Self {
        self.r0_over_lambda = r0_over_lambda;
        self
    }

    pub fn with_phi0(mut self, phi0: f64) -> Self {
        self.phi0 = phi0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon.abs() >= MAX_ABS_EPSILON {
            return Err(Error::OutOfRegime(format!(
                "|epsilon| = {} must be below {MAX_ABS_EPSILON}",
                self.epsilon.abs()
            )));
        }
        if !self.r0_over_lambda.is_finite() || self.r0_over_lambda < MIN_R0_OVER_LAMBDA {
            return Err(Error::InvalidParameter(format!(
                "r0/lambda_c = {} must be at least {MIN_R0_OVER_LAMBDA}",
                self.r0_over_lambda
            )));
        }
        if !self.phi0.is_finite() || !(0.0..2.0 * PI).contains(&self.phi0) {
            return Err(Error::InvalidParameter(format!(
                "phi0 = {} must lie in [0, 2pi)",
                self.phi0
            )));
        }
        Ok(())
    }

    /// ω_c = −ε·ω_zbw.
    pub fn omega_c(&self) -> f64 {
        cyclotron_frequency(self)
    }

    /// Ω = ω_c/2, the spin splitting of each energy branch.
    pub fn big_omega(&self) -> f64 {
        0.5 * self.omega_c()
    }
}

/// A laboratory magnetic flux density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SIField {
    pub b_tesla: f64,
}

impl SIField {
    pub fn new(b_tesla: f64) -> Self {
        Self { b_tesla }
    }
}

/// ε per tesla: −|e|ħ/(2m²c²).
fn epsilon_per_tesla() -> f64 {
    -ELEMENTARY_CHARGE_SI * HBAR_SI
        / (2.0 * ELECTRON_MASS_SI * ELECTRON_MASS_SI * SPEED_OF_LIGHT_SI * SPEED_OF_LIGHT_SI)
}

/// Converts a laboratory field to ε = −ω_c/ω_zbw with ω_c = |e|B/m.
pub fn epsilon_from_tesla(field: SIField) -> Result<f64> {
    if !field.b_tesla.is_finite() || field.b_tesla < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "B = {} T must be a finite nonnegative value",
            field.b_tesla
        )));
    }
    let epsilon = field.b_tesla * epsilon_per_tesla();
    if epsilon.abs() >= MAX_ABS_EPSILON {
        return Err(Error::OutOfRegime(format!(
            "B = {} T gives |epsilon| = {} >= {MAX_ABS_EPSILON}",
            field.b_tesla,
            epsilon.abs()
        )));
    }
    Ok(epsilon)
}

/// Inverse of [`epsilon_from_tesla`].
pub fn tesla_from_epsilon(epsilon: f64) -> SIField {
    SIField::new(epsilon / epsilon_per_tesla())
}

/// ω_c = −2ε in natural units.
pub fn cyclotron_frequency(params: &DimensionlessParams) -> f64 {
    -params.epsilon * OMEGA_ZBW
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_unit_constants() {
        assert_eq!(NaturalUnits::omega_zbw(), 2.0);
        assert_eq!(NaturalUnits::compton_wavelength(), 1.0);
    }

    #[test]
    fn zero_field_gives_zero_epsilon() {
        assert_eq!(epsilon_from_tesla(SIField::new(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn one_tesla_matches_bohr_magneton_route() {
        // ħω_c = 2μ_B·B, ħω_zbw = 2mc²
        let mu_b_ev_per_t = 5.788_381_806_0e-5;
        let mc2_ev = 0.510_998_950_00e6;
        let oracle = -(2.0 * mu_b_ev_per_t) / (2.0 * mc2_ev);
        let eps = epsilon_from_tesla(SIField::new(1.0)).unwrap();
        assert!(((eps - oracle) / oracle).abs() < 1e-8, "{eps} vs {oracle}");
        assert!((eps + 1.1327e-10).abs() < 1e-13);
    }

    #[test]
    fn epsilon_is_linear_in_field() {
        let one = epsilon_from_tesla(SIField::new(1.0)).unwrap();
        let ten = epsilon_from_tesla(SIField::new(10.0)).unwrap();
        assert!((ten - 10.0 * one).abs() <= 1e-15 * ten.abs());
    }

    #[test]
    fn negative_or_huge_fields_are_rejected() {
        assert!(epsilon_from_tesla(SIField::new(-1.0)).is_err());
        assert!(matches!(
            epsilon_from_tesla(SIField::new(1e12)),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn cyclotron_frequency_examples() {
        let freq = |eps| cyclotron_frequency(&DimensionlessParams::with_epsilon(eps));
        assert_eq!(freq(0.0), 0.0);
        assert!((freq(-1e-3) - 2e-3).abs() < 1e-18);
        assert!((freq(-5e-2) - 0.1).abs() < 1e-16);
    }

    #[test]
    fn params_validation() {
        assert!(DimensionlessParams::new(-0.2, Spin::Up, Charge::Electron, 100.0, 0.0).is_err());
        assert!(DimensionlessParams::new(-0.01, Spin::Up, Charge::Electron, 2.0, 0.0).is_err());
        assert!(DimensionlessParams::new(-0.01, Spin::Up, Charge::Electron, 100.0, 7.0).is_err());
        assert!(DimensionlessParams::new(-0.01, Spin::Down, Charge::Positron, 10.0, 1.0).is_ok());
    }

    proptest::proptest! {
        #[test]
        fn tesla_round_trip(b in 0.0f64..1e8) {
            let eps = epsilon_from_tesla(SIField::new(b)).unwrap();
            let back = tesla_from_epsilon(eps).b_tesla;
            proptest::prop_assert!((back - b).abs() <= 1e-12 * b.max(1e-300));
        }

        #[test]
        fn epsilon_monotone_in_field(a in 0.0f64..1e8, b in 0.0f64..1e8) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let e_lo = epsilon_from_tesla(SIField::new(lo)).unwrap();
            let e_hi = epsilon_from_tesla(SIField::new(hi)).unwrap();
            proptest::prop_assert!(e_hi <= e_lo);
        }
    }
}
