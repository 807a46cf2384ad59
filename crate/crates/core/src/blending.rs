//! Element-wise convex blending coefficients and their face values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{FaceKind, Mesh};
use crate::physics::{GasModel, Primitive};
use crate::sbp::SbpOperator;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlendError {
    #[error("fixed blending coefficient {0} outside [0, 1]")]
    FixedOutOfRange(f64),
    #[error("random blending range [{0}, {1}) is not inside [0, 1]")]
    RandomRange(f64, f64),
    #[error("indicator bounds require 0 <= alpha_min < alpha_max <= 1")]
    IndicatorBounds,
}

/// Parameters of the modal-energy shock indicator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndicatorParams {
    pub alpha_max: f64,
    pub alpha_min: f64,
    /// Logistic sharpness `s`.
    pub sharpness: f64,
    /// Threshold scale; `T = threshold_scale · 10^(-1.8 (N+1)^0.25)`.
    pub threshold_scale: f64,
    /// Neighbour propagation factor for the smoothing pass.
    pub smoothing: f64,
}

impl Default for IndicatorParams {
    fn default() -> Self {
        Self {
            alpha_max: 0.5,
            alpha_min: 1e-3,
            sharpness: ((1.0 - 1e-4) / 1e-4_f64).ln(),
            threshold_scale: 0.5,
            smoothing: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlendMode {
    Fixed { value: f64 },
    /// Uniform samples in `[low, high)`. The seed is taken from the run
    /// configuration, not from this table.
    Random {
        low: f64,
        high: f64,
        #[serde(skip)]
        seed: u64,
    },
    Indicator(IndicatorParams),
}

impl BlendMode {
    pub fn validate(&self) -> Result<(), BlendError> {
        match *self {
            BlendMode::Fixed { value } if !(0.0..=1.0).contains(&value) => Err(BlendError::FixedOutOfRange(value)),
            BlendMode::Random { low, high, .. } if !(0.0 <= low && low <= high && high <= 1.0) => {
                Err(BlendError::RandomRange(low, high))
            }
            BlendMode::Indicator(p) if !(0.0 <= p.alpha_min && p.alpha_min < p.alpha_max && p.alpha_max <= 1.0) => {
                Err(BlendError::IndicatorBounds)
            }
            _ => Ok(()),
        }
    }
}

/// Blending coefficients for every element and face.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendField {
    pub alpha: Vec<f64>,
    /// Indexed like [`Mesh::faces`].
    pub face_alpha: Vec<f64>,
}

impl BlendField {
    pub fn uniform(mesh: &Mesh, value: f64) -> Self {
        Self::from_elements(mesh, vec![value; mesh.n_elements()])
    }

    /// Derives the face coefficients as the max over the adjacent elements.
    pub fn from_elements(mesh: &Mesh, alpha: Vec<f64>) -> Self {
        let face_alpha = mesh
            .faces
            .iter()
            .map(|f| match (f.minus, f.plus) {
                (Some(m), Some(p)) => face_alpha(alpha[m], alpha[p]),
                (Some(e), None) | (None, Some(e)) => alpha[e],
                (None, None) => 0.0,
            })
            .collect();
        Self { alpha, face_alpha }
    }

    pub fn min(&self) -> f64 {
        self.alpha.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The unique face coefficient shared by both sides.
pub fn face_alpha(alpha_left: f64, alpha_right: f64) -> f64 {
    alpha_left.max(alpha_right)
}

/// Orthonormal Legendre Vandermonde inverse, mapping nodal to modal values.
#[derive(Debug, Clone)]
pub struct ModalTransform {
    n: usize,
    inverse: Vec<Vec<f64>>,
}

impl ModalTransform {
    pub fn new(sbp: &SbpOperator) -> Self {
        let n = sbp.n_nodes();
        let mut v = vec![vec![0.0; n]; n];
        for (i, &x) in sbp.nodes.iter().enumerate() {
            let mut p_prev = 1.0;
            let mut p = x;
            for j in 0..n {
                let pj = match j {
                    0 => 1.0,
                    1 => x,
                    _ => {
                        let jf = j as f64;
                        let next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
                        p_prev = p;
                        p = next;
                        next
                    }
                };
                v[i][j] = pj * ((2.0 * j as f64 + 1.0) / 2.0).sqrt();
            }
        }
        Self {
            n,
            inverse: invert(v),
        }
    }

    /// 3-D modal coefficients of a nodal tensor field.
    pub fn modal(&self, nodal: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut a = nodal.to_vec();
        for d in 0..3 {
            let stride = n.pow(d as u32);
            let mut out = vec![0.0; a.len()];
            for base in 0..a.len() {
                let i = (base / stride) % n;
                let root = base - i * stride;
                let mut acc = 0.0;
                for l in 0..n {
                    acc += self.inverse[i][l] * a[root + l * stride];
                }
                out[base] = acc;
            }
            a = out;
        }
        a
    }
}

fn invert(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap_or(col);
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col];
        for j in 0..n {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for j in 0..n {
                        m[r][j] -= f * m[col][j];
                        inv[r][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    inv
}

/// Modal-energy indicator on the nodal `ρ·p` product, before neighbour
/// smoothing.
pub fn indicator_alpha(prims: &[Primitive], modal: &ModalTransform, degree: usize, params: &IndicatorParams) -> f64 {
    let n = degree + 1;
    let ind: Vec<f64> = prims.iter().map(|w| w.rho * w.p).collect();
    let m = modal.modal(&ind);
    let (mut total, mut clip1, mut clip2) = (0.0, 0.0, 0.0);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let e = m[i + n * (j + n * k)].powi(2);
                total += e;
                let top = i.max(j).max(k);
                if top + 1 < n {
                    clip1 += e;
                }
                if top + 2 < n {
                    clip2 += e;
                }
            }
        }
    }
    let mut energy = if total > 0.0 { (total - clip1) / total } else { 0.0 };
    if degree >= 2 && clip1 > 0.0 {
        energy = energy.max((clip1 - clip2) / clip1);
    }
    let threshold = params.threshold_scale * 10f64.powf(-1.8 * ((degree + 1) as f64).powf(0.25));
    let mut alpha = 1.0 / (1.0 + (-params.sharpness / threshold * (energy - threshold)).exp());
    if alpha < params.alpha_min {
        alpha = 0.0;
    } else if alpha > 1.0 - params.alpha_min {
        alpha = 1.0;
    }
    alpha.min(params.alpha_max)
}

/// Evaluates the blending field for the current state.
///
/// `prims` holds the primitive variables of every node, element-major.
pub fn assign_alpha(
    mode: &BlendMode,
    mesh: &Mesh,
    sbp: &SbpOperator,
    prims: &[Primitive],
    _gas: &GasModel,
) -> Result<BlendField, BlendError> {
    mode.validate()?;
    let ne = mesh.n_elements();
    let alpha = match *mode {
        BlendMode::Fixed { value } => vec![value; ne],
        BlendMode::Random { seed, low, high } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..ne)
                .map(|_| if high > low { rng.gen_range(low..high) } else { low })
                .collect()
        }
        BlendMode::Indicator(params) => {
            let npe = sbp.n_nodes().pow(3);
            let modal = ModalTransform::new(sbp);
            let raw: Vec<f64> = (0..ne)
                .map(|e| indicator_alpha(&prims[e * npe..(e + 1) * npe], &modal, sbp.degree, &params))
                .collect();
            let mut smoothed = raw.clone();
            for f in &mesh.faces {
                if let (Some(m), Some(p), FaceKind::Interior) = (f.minus, f.plus, f.kind) {
                    smoothed[m] = smoothed[m].max(params.smoothing * raw[p]);
                    smoothed[p] = smoothed[p].max(params.smoothing * raw[m]);
                }
            }
            smoothed
        }
    };
    Ok(BlendField::from_elements(mesh, alpha))
}
