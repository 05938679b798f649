//! Momentum-space amplitudes of the localized Gaussian packet in a uniform
//! field along z.
//!
//! Everything here is pointwise: callers choose the momentum nodes (see
//! [`crate::quadrature`]). Momenta are treated as commuting numbers and the
//! Hermite factors h are positive scalars, which is the regime in which the
//! reduced packet is derived.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{DimensionlessParams, Spin};

/// A four-spinor in the Dirac representation.
pub type Spinor = [Complex64; 4];

/// Kinetic momentum in spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumPoint {
    pub pi: f64,
    pub theta: f64,
    pub phi: f64,
}

impl MomentumPoint {
    pub fn new(pi: f64, theta: f64, phi: f64) -> Self {
        Self { pi, theta, phi }
    }

    /// Builds a point from cartesian components.
    pub fn from_cartesian(px: f64, py: f64, pz: f64) -> Self {
        let pi = (px * px + py * py + pz * pz).sqrt();
        let theta = if pi == 0.0 { 0.0 } else { (pz / pi).clamp(-1.0, 1.0).acos() };
        let phi = py.atan2(px).rem_euclid(2.0 * PI);
        Self { pi, theta, phi }
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.pi * st * cp, self.pi * st * sp, self.pi * ct]
    }

    /// π₊ = π_x + iπ_y.
    pub fn pi_plus(&self) -> Complex64 {
        let [x, y, _] = self.cartesian();
        Complex64::new(x, y)
    }

    /// π₋ = π_x − iπ_y.
    pub fn pi_minus(&self) -> Complex64 {
        self.pi_plus().conj()
    }

    pub fn pi_z(&self) -> f64 {
        self.pi * self.theta.cos()
    }
}

/// Gaussian momentum profile of width π_o = 2/r_o.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianProfile {
    pub pi0: f64,
}

impl GaussianProfile {
    pub fn new(pi0: f64) -> Self {
        Self { pi0 }
    }

    pub fn from_params(params: &DimensionlessParams) -> Self {
        Self::new(2.0 / params.r0_over_lambda)
    }

    /// f(π/π_o) = (2/(π̄π_o²))^{3/4} exp(−(π/π_o)²).
    pub fn value(&self, pi: f64) -> f64 {
        let norm = (2.0 / (PI * self.pi0 * self.pi0)).powf(0.75);
        let u = pi / self.pi0;
        norm * (-u * u).exp()
    }
}

pub fn gaussian_profile_value(p: &MomentumPoint, g: &GaussianProfile) -> f64 {
    g.value(p.pi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergySign {
    Positive,
    Negative,
}

/// The field-modified k-factors.
///
/// `k1` multiplies π in the spin-down positive and spin-up negative
/// columns, `k2` in the other two. `k` is the common value both reduce to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KFactors {
    pub k1: f64,
    pub k2: f64,
    pub k: f64,
}

impl KFactors {
    /// Both factors set to an arbitrary common value.
    pub fn uniform(k: f64) -> Self {
        Self { k1: k, k2: k, k }
    }
}

/// K₁ = 1/(2 − Ω), K₂ = 1/(2 + Ω), K = 1/2 with Ω = ω_c/2 = −ε.
pub fn k_factors(params: &DimensionlessParams) -> Result<KFactors> {
    params.validate()?;
    let big_omega = params.big_omega();
    Ok(KFactors {
        k1: 1.0 / (2.0 - big_omega),
        k2: 1.0 / (2.0 + big_omega),
        k: 0.5,
    })
}

/// A column of the packet expansion, without its scalar weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorAmplitude {
    pub components: Spinor,
    pub energy_sign: EnergySign,
    pub spin: Spin,
    pub at: MomentumPoint,
}

impl SpinorAmplitude {
    pub fn scaled(mut self, weight: Complex64) -> Self {
        for c in &mut self.components {
            *c *= weight;
        }
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn column(p: &MomentumPoint, spin: Spin, energy_sign: EnergySign, k1: f64, k2: f64) -> Spinor {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let pz = Complex64::new(p.pi_z(), 0.0);
    let pp = p.pi_plus();
    let pm = p.pi_minus();
    match (energy_sign, spin) {
        (EnergySign::Positive, Spin::Up) => [one, zero, pz * k2, pp * k2],
        (EnergySign::Positive, Spin::Down) => [zero, one, pm * k1, -pz * k1],
        (EnergySign::Negative, Spin::Up) => [-pz * k1, -pp * k1, one, zero],
        (EnergySign::Negative, Spin::Down) => [-pm * k2, pz * k2, zero, one],
    }
}

/// Column of the packet expansion with unit leading coefficient, using the
/// common factor `k.k` in place of K₁ and K₂.
pub fn build_spinor(
    p: &MomentumPoint,
    spin: Spin,
    energy_sign: EnergySign,
    k: &KFactors,
) -> SpinorAmplitude {
    SpinorAmplitude {
        components: column(p, spin, energy_sign, k.k, k.k),
        energy_sign,
        spin,
        at: *p,
    }
}

/// Same column with the distinct K₁ and K₂ kept.
pub fn build_spinor_unreduced(
    p: &MomentumPoint,
    spin: Spin,
    energy_sign: EnergySign,
    k: &KFactors,
) -> SpinorAmplitude {
    SpinorAmplitude {
        components: column(p, spin, energy_sign, k.k1, k.k2),
        energy_sign,
        spin,
        at: *p,
    }
}

/// Scalar Hermite-function amplitudes at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HAmplitudes {
    pub up_pos: f64,
    pub up_neg: f64,
    pub down_pos: f64,
    pub down_neg: f64,
}

impl Default for HAmplitudes {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl HAmplitudes {
    pub fn uniform(h: f64) -> Self {
        Self {
            up_pos: h,
            up_neg: h,
            down_pos: h,
            down_neg: h,
        }
    }

    fn product(&self) -> f64 {
        self.up_pos * self.up_neg * self.down_pos * self.down_neg
    }
}

/// The weights 𝓐, 𝓑, 𝓒, 𝓓 of the four columns and their common denominator Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub gamma: Complex64,
}

impl PacketCoefficients {
    /// The rough forms: 𝓐 = f/h↑₊, 𝓑 = 0, 𝓒 = −Kπ_z f/h↑₋, 𝓓 = −Kπ₊ f/h↓₋.
    pub fn rough(p: &MomentumPoint, k: f64, h: &HAmplitudes, f: f64) -> Self {
        Self {
            a: Complex64::new(f / h.up_pos, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(-k * p.pi_z() * f / h.up_neg, 0.0),
            d: -p.pi_plus() * (k * f / h.down_neg),
            gamma: Complex64::new(h.product(), 0.0),
        }
    }

    /// Largest componentwise deviation from `other`, excluding Γ.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        [
            (self.a - other.a).norm(),
            (self.b - other.b).norm(),
            (self.c - other.c).norm(),
            (self.d - other.d).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Exact weights of the four columns for the spin-up electron initial state,
/// with momenta treated as commuting numbers.
pub fn exact_packet_coefficients(
    p: &MomentumPoint,
    k: &KFactors,
    h: &HAmplitudes,
    f: f64,
) -> Result<PacketCoefficients> {
    let (hup, hun, hdp, hdn) = (h.up_pos, h.up_neg, h.down_pos, h.down_neg);
    let (k1, k2) = (k.k1, k.k2);
    let pz = Complex64::new(p.pi_z(), 0.0);
    let pp = p.pi_plus();
    let pm = p.pi_minus();
    let one = Complex64::new(1.0, 0.0);

    let gamma = one * (hup * hun * hdp * hdn)
        + pz * pz * pm * pp * (hup * hdp * k1 * k1 * k2 * k2 * hdn * hun)
        + pz * pz * pm * pp * (hun * hdn * k1 * k1 * k2 * k2 * hdp * hup)
        + pz * pz * (hup * hun * hdp * hdn * k1 * k1)
        + pz * pz * pz * pz * (hup * hun * hdp * hdn * k1 * k1 * k2 * k2)
        + pz * pz * (hup * hun * hdp * hdn * k2 * k2)
        + pm * pp * (hup * hdn * k1 * k2 * hdp * hun)
        + pm * pm * pp * pp * (k1 * k1 * k2 * k2 * hdp * hdn * hun * hup)
        + pp * pm * (hun * hdp * k1 * k2 * hup * hdn);
    if gamma.norm() < 1e-300 {
        return Err(Error::DegenerateDenominator(gamma.norm()));
    }

    let a = (one * (hun * hdp * hdn)
        + pz * pz * (hun * hdp * hdn * k1 * k1)
        + pm * pp * (hdn * k1 * k2 * hdp * hun))
        / gamma
        * f;
    let b = (-(pp * pz) * (hdn * k2 * k2 * hun * hup) + pz * pp * (hun * hdn * k1 * k2 * hup))
        / gamma
        * f;
    let c = -(pm * pz * pp * (k1 * k1 * k2 * hdp * hdn * hup)
        + pz * pz * pz * (hup * hdp * hdn * k1 * k1 * k2)
        + pz * (hup * hdp * hdn * k2))
        / gamma
        * f;
    let d = -(pz * pz * pp * (hup * hdp * k1 * k2 * k2 * hun)
        + pp * pm * pp * (k1 * k2 * k2 * hup * hdp * hun)
        + pp * (hun * hdp * k2 * hup))
        / gamma
        * f;

    Ok(PacketCoefficients { a, b, c, d, gamma })
}

/// Coherent sum 𝓐C₊↑ + 𝓑C₊↓ + 𝓒C₋↑ + 𝓓C₋↓ at t = 0, with K₁ and K₂ kept.
pub fn packet_spinor(p: &MomentumPoint, k: &KFactors, co: &PacketCoefficients) -> Spinor {
    let cols = [
        (co.a, Spin::Up, EnergySign::Positive),
        (co.b, Spin::Down, EnergySign::Positive),
        (co.c, Spin::Up, EnergySign::Negative),
        (co.d, Spin::Down, EnergySign::Negative),
    ];
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (w, spin, sign) in cols {
        let col = build_spinor_unreduced(p, spin, sign, k).scaled(w);
        for (o, c) in out.iter_mut().zip(col.components) {
            *o += c;
        }
    }
    out
}

/// Solves Σ h·weight·column = (f, 0, 0, 0) directly for the four weights.
///
/// Agrees with [`exact_packet_coefficients`] when K₁ = K₂; otherwise the two
/// differ at order (K₁ − K₂)π². `gamma` holds the determinant of the system.
pub fn solve_packet_coefficients(
    p: &MomentumPoint,
    k: &KFactors,
    h: &HAmplitudes,
    f: f64,
) -> Result<PacketCoefficients> {
    let cols = [
        (h.up_pos, Spin::Up, EnergySign::Positive),
        (h.down_pos, Spin::Down, EnergySign::Positive),
        (h.up_neg, Spin::Up, EnergySign::Negative),
        (h.down_neg, Spin::Down, EnergySign::Negative),
    ];
    let mut m = Matrix4::<Complex64>::zeros();
    for (j, (hj, spin, sign)) in cols.into_iter().enumerate() {
        let col = build_spinor_unreduced(p, spin, sign, k).components;
        for i in 0..4 {
            m[(i, j)] = col[i] * hj;
        }
    }
    let det = m.determinant();
    if det.norm() < 1e-300 {
        return Err(Error::DegenerateDenominator(det.norm()));
    }
    let rhs = Vector4::new(
        Complex64::new(f, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    );
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or(Error::DegenerateDenominator(det.norm()))?;
    Ok(PacketCoefficients {
        a: x[0],
        b: x[1],
        c: x[2],
        d: x[3],
        gamma: det,
    })
}

/// One term of the reduced packet: a spinor weighted by f and the angular
/// rate of its time factor exp(−i·rate·t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketTerm {
    pub spinor: Spinor,
    pub rate: f64,
    pub energy_sign: EnergySign,
    pub spin: Spin,
}

/// The three surviving terms of the reduced spin-up electron packet at one
/// node, to first order in π/2mc.
///
/// Returned in the order: positive-energy spin-up, negative-energy spin-up,
/// negative-energy spin-down.
pub fn reduced_packet_terms(
    p: &MomentumPoint,
    params: &DimensionlessParams,
    f: f64,
) -> [PacketTerm; 3] {
    let k = 0.5;
    let zero = Complex64::new(0.0, 0.0);
    let fc = Complex64::new(f, 0.0);
    let pz = Complex64::new(p.pi_z(), 0.0);
    let pp = p.pi_plus();
    let (up_pos, up_neg) = weak_field_frequencies(params.epsilon, Spin::Up);
    let (_, down_neg) = weak_field_frequencies(params.epsilon, Spin::Down);
    [
        PacketTerm {
            spinor: [fc, zero, pz * k * f, pp * k * f],
            rate: up_pos,
            energy_sign: EnergySign::Positive,
            spin: Spin::Up,
        },
        PacketTerm {
            spinor: [zero, zero, -pz * k * f, zero],
            rate: up_neg,
            energy_sign: EnergySign::Negative,
            spin: Spin::Up,
        },
        PacketTerm {
            spinor: [zero, zero, zero, -pp * k * f],
            rate: down_neg,
            energy_sign: EnergySign::Negative,
            spin: Spin::Down,
        },
    ]
}

/// A Landau level in a field with coupling `ce_b` = c·e·B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauLevel {
    pub n: u32,
    pub l: i64,
    pub p_z: f64,
    pub s_z: f64,
    pub ce_b: f64,
}

impl LandauLevel {
    pub fn validate(&self) -> Result<()> {
        let n = i64::from(self.n);
        if self.l < -n || self.l > n || (n - self.l) % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "l = {} not in {{-n, -n+2, ..., n}} for n = {}",
                self.l, self.n
            )));
        }
        if self.s_z != 0.5 && self.s_z != -0.5 {
            return Err(Error::InvalidParameter(format!(
                "s_z = {} must be +1/2 or -1/2",
                self.s_z
            )));
        }
        if !self.p_z.is_finite() || !self.ce_b.is_finite() {
            return Err(Error::InvalidParameter("non-finite p_z or ceB".into()));
        }
        Ok(())
    }

    /// n − l + 1 − 2s_z.
    pub fn level_index(&self) -> f64 {
        f64::from(self.n) - self.l as f64 + 1.0 - 2.0 * self.s_z
    }
}

/// E = +√(1 + p_z² + ceB(n − l + 1 − 2s_z)).
pub fn landau_energy(level: &LandauLevel) -> Result<f64> {
    level.validate()?;
    let e2 = 1.0 + level.p_z * level.p_z + level.ce_b * level.level_index();
    if e2 < 0.0 {
        return Err(Error::ImaginaryEnergy(e2));
    }
    Ok(e2.sqrt())
}

/// Phase rates of the positive- and negative-energy components of a given
/// spin: (ω + Ωσ, −(ω − Ωσ)) with ω = 1 and Ω = −ε.
///
/// A component with rate r evolves as exp(−i·r·t).
pub fn weak_field_frequencies(epsilon: f64, spin: Spin) -> (f64, f64) {
    let omega = 1.0;
    let big_omega = -epsilon;
    let sigma = spin.sign();
    (omega + big_omega * sigma, -(omega - big_omega * sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::Charge;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn gaussian_peak_value() {
        let g = GaussianProfile::new(1.0);
        let oracle = (2.0 / std::f64::consts::PI).powf(0.75);
        assert!((g.value(0.0) - oracle).abs() < 1e-15);
        assert!((g.value(0.0) - 0.7127).abs() < 1e-4);
        assert!(g.value(40.0) < 1e-300);
    }

    #[test]
    fn cartesian_round_trip() {
        let p = MomentumPoint::new(0.3, 1.1, 4.0);
        let [x, y, z] = p.cartesian();
        assert!(((x * x + y * y + z * z).sqrt() - 0.3).abs() < 1e-12);
        let q = MomentumPoint::from_cartesian(x, y, z);
        assert!((q.pi - p.pi).abs() < 1e-15);
        assert!((q.theta - p.theta).abs() < 1e-12);
        assert!((q.phi - p.phi).abs() < 1e-12);
    }

    #[test]
    fn k_factor_examples() {
        let k = k_factors(&DimensionlessParams::with_epsilon(0.0)).unwrap();
        assert_eq!((k.k1, k.k2, k.k), (0.5, 0.5, 0.5));

        let k = k_factors(&DimensionlessParams::with_epsilon(-1e-3)).unwrap();
        assert!((k.k1 - 1.0 / 1.999).abs() < 1e-15);
        assert!((k.k2 - 1.0 / 2.001).abs() < 1e-15);
        // K₁ − K₂ ≈ Ω/2 = −ε/2
        assert!((k.k1 - k.k2 - 5e-4).abs() < 1e-9);

        let k = k_factors(&DimensionlessParams::with_epsilon(-0.05)).unwrap();
        assert!(k.k2 < k.k && k.k < k.k1);

        assert!(k_factors(&DimensionlessParams::with_epsilon(-0.2)).is_err());
    }

    #[test]
    fn spinor_examples() {
        let k = KFactors::uniform(0.5);
        let s = build_spinor(&MomentumPoint::new(0.0, 0.0, 0.0), Spin::Up, EnergySign::Positive, &k);
        assert_eq!(s.components, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        let pz = MomentumPoint::from_cartesian(0.0, 0.0, 1.0);
        let s = build_spinor(&pz, Spin::Up, EnergySign::Positive, &k);
        let expect = [c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)];
        assert!(s.components.iter().zip(expect).all(|(a, b)| close(*a, b, 1e-15)));

        let px = MomentumPoint::from_cartesian(1.0, 0.0, 0.0);
        let s = build_spinor(&px, Spin::Down, EnergySign::Negative, &k);
        let expect = [c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(s.components.iter().zip(expect).all(|(a, b)| close(*a, b, 1e-15)));
    }

    #[test]
    fn opposite_energy_columns_are_orthogonal_without_field() {
        let k = k_factors(&DimensionlessParams::with_epsilon(0.0)).unwrap();
        for &(pi, theta, phi) in &[(0.1, 0.3, 0.2), (0.05, 2.0, 5.0), (0.3, 1.57, 3.1)] {
            let p = MomentumPoint::new(pi, theta, phi);
            for spin in [Spin::Up, Spin::Down] {
                let u = build_spinor_unreduced(&p, spin, EnergySign::Positive, &k);
                let w = build_spinor_unreduced(&p, spin, EnergySign::Negative, &k);
                let inner: Complex64 = u
                    .components
                    .iter()
                    .zip(w.components.iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                assert!(inner.norm() < 1e-10, "{spin:?}: {inner}");
            }
        }
    }

    #[test]
    fn exact_coefficients_at_rest() {
        let k = KFactors::uniform(0.5);
        let p = MomentumPoint::new(0.0, 0.0, 0.0);
        let co = exact_packet_coefficients(&p, &k, &HAmplitudes::default(), 0.7).unwrap();
        assert!(close(co.a, c(0.7, 0.0), 1e-15));
        assert!(close(co.b, c(0.0, 0.0), 1e-15));
        assert!(close(co.c, c(0.0, 0.0), 1e-15));
        assert!(close(co.d, c(0.0, 0.0), 1e-15));
        assert!(close(co.gamma, c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn b_vanishes_when_k_factors_agree() {
        let k = KFactors::uniform(0.5);
        for &(pi, theta, phi) in &[(0.1, 0.3, 0.2), (0.4, 2.0, 5.0), (1.0, 0.9, 1.0)] {
            let p = MomentumPoint::new(pi, theta, phi);
            let co = exact_packet_coefficients(&p, &k, &HAmplitudes::default(), 1.0).unwrap();
            assert!(co.b.norm() == 0.0 || co.b.norm() < 1e-17, "{}", co.b);
        }
    }

    #[test]
    fn b_is_first_order_in_field() {
        let k = KFactors {
            k1: 0.49975,
            k2: 0.50025,
            k: 0.5,
        };
        let p = MomentumPoint::from_cartesian(0.0, 0.0, 0.1);
        let co = exact_packet_coefficients(&p, &k, &HAmplitudes::default(), 1.0).unwrap();
        assert!(co.b.norm() <= 1e-4);

        // with transverse momentum B ∝ (K₁ − K₂)·π_z·π₊
        let p = MomentumPoint::from_cartesian(0.05, 0.02, 0.1);
        let co = exact_packet_coefficients(&p, &k, &HAmplitudes::default(), 1.0).unwrap();
        assert!(co.b.norm() > 0.0 && co.b.norm() <= 1e-4);
    }

    #[test]
    fn exact_coefficients_approach_rough_forms_at_small_momentum() {
        let k = KFactors::uniform(0.5);
        let h = HAmplitudes::default();
        for &pi in &[1e-2, 1e-3] {
            let p = MomentumPoint::new(pi, 0.7, 1.3);
            let exact = exact_packet_coefficients(&p, &k, &h, 1.0).unwrap();
            let rough = PacketCoefficients::rough(&p, 0.5, &h, 1.0);
            // dropped terms are O((π/2)²) relative to the leading ones
            assert!(exact.max_deviation(&rough) <= 0.5 * pi * pi, "{pi}");
        }
    }

    #[test]
    fn non_unit_h_amplitudes_follow_rough_scaling() {
        let k = KFactors::uniform(0.5);
        let h = HAmplitudes {
            up_pos: 2.0,
            up_neg: 0.5,
            down_pos: 1.5,
            down_neg: 0.8,
        };
        let p = MomentumPoint::new(0.0, 0.0, 0.0);
        let co = exact_packet_coefficients(&p, &k, &h, 1.0).unwrap();
        assert!(close(co.a * h.up_pos, c(1.0, 0.0), 1e-14));
    }

    #[test]
    fn coefficients_rebuild_the_initial_state_when_k_factors_agree() {
        for k in [KFactors::uniform(0.5), KFactors::uniform(0.49)] {
            for &(pi, theta, phi) in &[(0.1, 0.3, 0.2), (0.4, 2.0, 5.0), (1.2, 0.9, 1.0), (0.0, 0.0, 0.0)] {
                let p = MomentumPoint::new(pi, theta, phi);
                let co = exact_packet_coefficients(&p, &k, &HAmplitudes::default(), 0.8).unwrap();
                let psi = packet_spinor(&p, &k, &co);
                assert!(close(psi[0], c(0.8, 0.0), 1e-14), "{psi:?}");
                for x in &psi[1..] {
                    assert!(x.norm() < 1e-14, "{psi:?}");
                }
            }
        }
    }

    #[test]
    fn printed_coefficients_miss_the_direct_solve_at_order_k_split() {
        // the closed forms and the direct solve differ by O((K₁ − K₂)π²)
        let params = DimensionlessParams::with_epsilon(-0.03);
        let k = k_factors(&params).unwrap();
        let h = HAmplitudes::default();
        for &(pi, theta, phi) in &[(0.1, 0.3, 0.2), (0.4, 2.0, 5.0), (0.05, 0.9, 1.0)] {
            let p = MomentumPoint::new(pi, theta, phi);
            let printed = exact_packet_coefficients(&p, &k, &h, 1.0).unwrap();
            let solved = solve_packet_coefficients(&p, &k, &h, 1.0).unwrap();
            let dev = printed.max_deviation(&solved);
            assert!(dev <= 2.0 * (k.k1 - k.k2).abs() * pi * pi, "{pi}: {dev}");

            let psi = packet_spinor(&p, &k, &solved);
            assert!(close(psi[0], c(1.0, 0.0), 1e-14));
            assert!(psi[1..].iter().all(|x| x.norm() < 1e-14));
        }
    }

    #[test]
    fn direct_solve_honours_h_amplitudes() {
        let k = KFactors { k1: 0.51, k2: 0.49, k: 0.5 };
        let h = HAmplitudes { up_pos: 2.0, up_neg: 0.5, down_pos: 1.5, down_neg: 0.8 };
        let p = MomentumPoint::new(0.3, 1.0, 2.0);
        let co = solve_packet_coefficients(&p, &k, &h, 1.0).unwrap();
        let weighted = PacketCoefficients {
            a: co.a * h.up_pos,
            b: co.b * h.down_pos,
            c: co.c * h.up_neg,
            d: co.d * h.down_neg,
            gamma: co.gamma,
        };
        let psi = packet_spinor(&p, &k, &weighted);
        assert!(close(psi[0], c(1.0, 0.0), 1e-14));
        assert!(psi[1..].iter().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn degenerate_gamma_is_reported() {
        let k = KFactors::uniform(0.5);
        let p = MomentumPoint::new(0.1, 0.5, 0.5);
        let h = HAmplitudes::uniform(0.0);
        assert!(matches!(
            exact_packet_coefficients(&p, &k, &h, 1.0),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn landau_examples() {
        let rest = LandauLevel {
            n: 0,
            l: 0,
            p_z: 0.0,
            s_z: 0.5,
            ce_b: 0.0,
        };
        assert_eq!(landau_energy(&rest).unwrap(), 1.0);

        let aligned = LandauLevel {
            n: 2,
            l: 2,
            p_z: 0.0,
            s_z: 0.5,
            ce_b: 0.37,
        };
        assert!((landau_energy(&aligned).unwrap() - 1.0).abs() < 1e-15);

        let excited = LandauLevel {
            n: 1,
            l: -1,
            p_z: 0.0,
            s_z: -0.5,
            ce_b: 0.01,
        };
        assert_eq!(excited.level_index(), 4.0);
        assert!((landau_energy(&excited).unwrap() - 1.04f64.sqrt()).abs() < 1e-15);
        assert!((landau_energy(&excited).unwrap() - 1.0198).abs() < 1e-4);
    }

    #[test]
    fn landau_rejects_bad_levels() {
        let bad_l = LandauLevel {
            n: 2,
            l: 1,
            p_z: 0.0,
            s_z: 0.5,
            ce_b: 0.1,
        };
        assert!(landau_energy(&bad_l).is_err());
        let imaginary = LandauLevel {
            n: 3,
            l: -3,
            p_z: 0.0,
            s_z: -0.5,
            ce_b: -1.0,
        };
        assert!(matches!(landau_energy(&imaginary), Err(Error::ImaginaryEnergy(_))));
    }

    #[test]
    fn landau_monotone_in_level_index() {
        let mut levels = Vec::new();
        for n in 0..6u32 {
            for l in (-(n as i64)..=n as i64).step_by(2) {
                for s_z in [0.5, -0.5] {
                    levels.push(LandauLevel {
                        n,
                        l,
                        p_z: 0.2,
                        s_z,
                        ce_b: 0.03,
                    });
                }
            }
        }
        levels.sort_by(|a, b| a.level_index().total_cmp(&b.level_index()));
        let energies: Vec<f64> = levels.iter().map(|l| landau_energy(l).unwrap()).collect();
        assert!(energies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn weak_field_examples() {
        assert_eq!(weak_field_frequencies(0.0, Spin::Up), (1.0, -1.0));
        assert_eq!(weak_field_frequencies(0.0, Spin::Down), (1.0, -1.0));
        let (p, n) = weak_field_frequencies(-1e-3, Spin::Up);
        assert!((p - 1.001).abs() < 1e-15 && (n + 0.999).abs() < 1e-15);
        let (p, n) = weak_field_frequencies(-1e-3, Spin::Down);
        assert!((p - 0.999).abs() < 1e-15 && (n + 1.001).abs() < 1e-15);
    }

    #[test]
    fn reduced_packet_is_initial_state_at_t0() {
        // the coherent sum of the three terms is (f, 0, 0, 0)
        let params = DimensionlessParams::with_epsilon(-1e-3).with_charge(Charge::Electron);
        let p = MomentumPoint::new(0.2, 0.8, 2.5);
        let terms = reduced_packet_terms(&p, &params, 0.9);
        let mut sum = [Complex64::new(0.0, 0.0); 4];
        for t in &terms {
            for (s, x) in sum.iter_mut().zip(t.spinor) {
                *s += x;
            }
        }
        assert!(close(sum[0], c(0.9, 0.0), 1e-15));
        for s in &sum[1..] {
            assert!(s.norm() < 1e-15);
        }
    }
}
