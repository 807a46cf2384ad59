//! Analytic mesh motions `x = χ(X, t)` and their exact time derivatives.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Axis-aligned reference box the motion is defined over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDomain {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl BoxDomain {
    pub fn length(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionSpec {
    Static,
    /// Sinusoidal-in-time displacement of the geometry nodes,
    /// `d_k = A_k sin(ωt) Π_m sin(2π(X_m - lo_m)/L_m + π/4)`.
    ///
    /// The profile is periodic over the box, so periodic images move together.
    CornerSinusoid { amplitude: [f64; 3], angular_frequency: f64 },
    /// `d_k = A sin(ωt) Π_m sin(2π κ_m (X_m - lo_m)/L_m)` for every component.
    StandingWave {
        amplitude: f64,
        wavenumbers: [f64; 3],
        angular_frequency: f64,
    },
    /// Piston plane `x_p(t) = x_p0 + u_p t` inside the channel; the x-coordinate
    /// of every node blends linearly between the piston and the fixed outer
    /// boundary on its side. `y` and `z` are static.
    PistonChannel { piston_speed: f64, piston_start: f64 },
}

impl MotionSpec {
    /// Default corner motion: 5% of the element edge per axis, `ω = 2π`.
    pub fn corner_sinusoid_default(domain: &BoxDomain, cells: [usize; 3]) -> Self {
        let amplitude = [0, 1, 2].map(|d| 0.05 * domain.length(d) / cells[d] as f64);
        MotionSpec::CornerSinusoid {
            amplitude,
            angular_frequency: 2.0 * PI,
        }
    }

    pub fn is_static(&self) -> bool {
        matches!(self, MotionSpec::Static)
    }

    /// Every motion is `x = X + f(t) Φ(X)`; this is `Φ(X)`.
    pub fn displacement_shape(&self, domain: &BoxDomain, x_ref: [f64; 3]) -> [f64; 3] {
        let profile = |wavenumbers: [f64; 3], phase: f64| -> f64 {
            (0..3)
                .map(|m| {
                    let s = (x_ref[m] - domain.lower[m]) / domain.length(m);
                    (2.0 * PI * wavenumbers[m] * s + phase).sin()
                })
                .product()
        };
        match *self {
            MotionSpec::Static => [0.0; 3],
            MotionSpec::CornerSinusoid { amplitude, .. } => {
                let shape = profile([1.0; 3], 0.25 * PI);
                amplitude.map(|a| a * shape)
            }
            MotionSpec::StandingWave {
                amplitude, wavenumbers, ..
            } => [amplitude * profile(wavenumbers, 0.0); 3],
            MotionSpec::PistonChannel {
                piston_speed,
                piston_start,
            } => {
                let (lo, hi) = (domain.lower[0], domain.upper[0]);
                let xr = x_ref[0];
                let w = if xr <= piston_start {
                    (xr - lo) / (piston_start - lo)
                } else {
                    (hi - xr) / (hi - piston_start)
                };
                [w * piston_speed, 0.0, 0.0]
            }
        }
    }

    /// `(f(t), f'(t))`.
    pub fn time_factor(&self, t: f64) -> (f64, f64) {
        match *self {
            MotionSpec::Static => (0.0, 0.0),
            MotionSpec::CornerSinusoid { angular_frequency, .. } | MotionSpec::StandingWave { angular_frequency, .. } => {
                let (s, c) = (angular_frequency * t).sin_cos();
                (s, angular_frequency * c)
            }
            MotionSpec::PistonChannel { .. } => (t, 1.0),
        }
    }

    /// Position and mesh velocity of the reference point `x_ref` at time `t`.
    pub fn sample(&self, domain: &BoxDomain, x_ref: [f64; 3], t: f64) -> ([f64; 3], [f64; 3]) {
        let phi = self.displacement_shape(domain, x_ref);
        let (f, fdot) = self.time_factor(t);
        (
            [0, 1, 2].map(|k| x_ref[k] + f * phi[k]),
            phi.map(|p| fdot * p),
        )
    }

    /// Position of the moving internal wall, if any.
    pub fn piston_position(&self, t: f64) -> Option<f64> {
        match *self {
            MotionSpec::PistonChannel {
                piston_speed,
                piston_start,
            } => Some(piston_start + piston_speed * t),
            _ => None,
        }
    }
}
