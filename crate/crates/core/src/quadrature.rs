//! Gauss–Legendre rules and the spherical momentum grid used for packet
//! integrals.

use std::f64::consts::PI;

use crate::dirac_packet::MomentumPoint;

/// Nodes and weights of an n-point Gauss–Legendre rule on [a, b].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n from the Chebyshev guesses.
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        assert!(n > 0, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, z);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = mid - half * z;
            nodes[n - 1 - i] = mid + half * z;
            weights[i] = half * w;
            weights[n - 1 - i] = half * w;
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Tensor grid over momentum space in spherical coordinates: Gauss–Legendre
/// in u = π/π_o and θ, uniform trapezoid (spectrally exact for periodic
/// integrands) in φ.
#[derive(Debug, Clone)]
pub struct SphericalGrid {
    pub pi0: f64,
    pub radial: GaussLegendre,
    pub polar: GaussLegendre,
    pub n_phi: usize,
}

/// Node counts and radial cutoff of a [`SphericalGrid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSize {
    pub n_radial: usize,
    pub n_polar: usize,
    pub n_phi: usize,
    pub u_max: f64,
}

impl Default for GridSize {
    fn default() -> Self {
        Self {
            n_radial: 96,
            n_polar: 64,
            n_phi: 64,
            u_max: 8.0,
        }
    }
}

impl SphericalGrid {
    pub fn new(pi0: f64, size: GridSize) -> Self {
        Self {
            pi0,
            radial: GaussLegendre::new(size.n_radial, 0.0, size.u_max),
            polar: GaussLegendre::new(size.n_polar, 0.0, PI),
            n_phi: size.n_phi,
        }
    }

    /// ∫ g(π) d³π.
    pub fn integrate(&self, g: impl Fn(&MomentumPoint) -> f64) -> f64 {
        let dphi = 2.0 * PI / self.n_phi as f64;
        let jac = self.pi0.powi(3);
        let mut total = 0.0;
        for (&u, &wu) in self.radial.nodes.iter().zip(&self.radial.weights) {
            let pi = u * self.pi0;
            for (&theta, &wt) in self.polar.nodes.iter().zip(&self.polar.weights) {
                let w = wu * wt * u * u * theta.sin() * dphi * jac;
                let mut ring = 0.0;
                for k in 0..self.n_phi {
                    ring += g(&MomentumPoint::new(pi, theta, k as f64 * dphi));
                }
                total += w * ring;
            }
        }
        total
    }

    /// ∫∫ g(π, θ) dπ dθ without any Jacobian.
    pub fn integrate_radial_polar(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (&u, &wu) in self.radial.nodes.iter().zip(&self.radial.weights) {
            let pi = u * self.pi0;
            for (&theta, &wt) in self.polar.nodes.iter().zip(&self.polar.weights) {
                total += wu * wt * g(pi, theta);
            }
        }
        total * self.pi0
    }
}

/// Uniform-node trapezoid rule over one period [0, 2π).
pub fn periodic_trapezoid(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|k| f(k as f64 * h)).sum::<f64>() * h
}
