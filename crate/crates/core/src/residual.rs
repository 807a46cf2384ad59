//! Element-local inputs and outputs shared by the DG and subcell kernels.

use crate::mesh::ElementGeometry;
use crate::physics::{EulerState, Primitive};

/// Nodal solution and geometry of one element, read-only.
#[derive(Debug, Clone, Copy)]
pub struct ElementInput<'a> {
    pub states: &'a [EulerState],
    pub prims: &'a [Primitive],
    pub geometry: &'a ElementGeometry,
}

/// Numerical fluxes on one element face, oriented towards `+ξ_d` and
/// indexed by face point `a + (N+1)·b`.
#[derive(Debug, Clone, Copy)]
pub struct FaceTrace<'a> {
    pub flux: &'a [EulerState],
    pub gcl: &'a [f64],
}

/// `faces[d][side]`, `side = 0` at `ξ_d = -1`.
#[derive(Debug, Clone, Copy)]
pub struct ElementFaces<'a> {
    pub faces: [[FaceTrace<'a>; 2]; 3],
}

/// Contributions to `d(J·u)/dt` and `dJ/dt` at every node of an element,
/// already divided by the mass matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementResidual {
    pub state: Vec<EulerState>,
    pub jac: Vec<f64>,
}

impl ElementResidual {
    pub fn zeros(n_nodes: usize) -> Self {
        Self {
            state: vec![EulerState::ZERO; n_nodes],
            jac: vec![0.0; n_nodes],
        }
    }

    pub fn add_scaled(&mut self, a: f64, other: &ElementResidual) {
        for (s, o) in self.state.iter_mut().zip(&other.state) {
            for c in 0..5 {
                s.0[c] += a * o.0[c];
            }
        }
        for (s, o) in self.jac.iter_mut().zip(&other.jac) {
            *s += a * o;
        }
    }

    /// Largest nodal deviation from `other` over state and Jacobian parts.
    pub fn max_difference(&self, other: &ElementResidual) -> f64 {
        let s = self
            .state
            .iter()
            .zip(&other.state)
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max);
        let j = self
            .jac
            .iter()
            .zip(&other.jac)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        s.max(j)
    }
}
