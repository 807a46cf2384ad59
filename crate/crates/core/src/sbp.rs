//! Legendre–Gauss–Lobatto collocation and the diagonal-norm
//! summation-by-parts operators built on it.
//!
//! With nodes `ξ_0 = -1 < … < ξ_N = 1` and weights `ω`, the operator set is
//! `M = diag(ω)`, `D_ij = ℓ_j'(ξ_i)`, `Q = M D` and `B = diag(-1, 0, …, 0, 1)`;
//! the defining identity is `Q + Qᵀ = B`.

use thiserror::Error;

/// Highest polynomial degree accepted anywhere in the solver.
pub const MAX_DEGREE: usize = 15;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("polynomial degree must be at least 1 (the subcell grid needs two nodes)")]
    DegreeZero,
    #[error("polynomial degree {0} exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooHigh(usize),
    #[error("interpolation nodes {0} and {1} coincide")]
    DuplicateNodes(usize, usize),
    #[error("Newton iteration for Gauss-Lobatto node {0} did not converge")]
    NoConvergence(usize),
}

/// Legendre polynomial `P_N(x)` together with the Lobatto polynomial
/// `q = P_{N+1} - P_{N-1}` and its derivative.
fn lobatto_poly(n: usize, x: f64) -> (f64, f64, f64) {
    let mut l_prev = 1.0;
    let mut l = x;
    let mut dl_prev = 0.0;
    let mut dl = 1.0;
    for k in 2..=n {
        let kf = k as f64;
        let l_next = ((2.0 * kf - 1.0) * x * l - (kf - 1.0) * l_prev) / kf;
        let dl_next = dl_prev + (2.0 * kf - 1.0) * l;
        l_prev = l;
        l = l_next;
        dl_prev = dl;
        dl = dl_next;
    }
    let kf = (n + 1) as f64;
    let l_next = ((2.0 * kf - 1.0) * x * l - (kf - 1.0) * l_prev) / kf;
    let dl_next = dl_prev + (2.0 * kf - 1.0) * l;
    (l, l_next - l_prev, dl_next - dl_prev)
}

/// Gauss–Lobatto nodes (ascending) and weights for degree `n`.
///
/// The interior nodes are the roots of `(1 - ξ²) P_N'(ξ)`, found by Newton
/// iteration from Chebyshev–Lobatto starting guesses and mirrored so the set
/// is exactly symmetric.
pub fn gauss_lobatto(n: usize) -> Result<(Vec<f64>, Vec<f64>), OperatorError> {
    if n == 0 {
        return Err(OperatorError::DegreeZero);
    }
    if n > MAX_DEGREE {
        return Err(OperatorError::DegreeTooHigh(n));
    }
    let nf = n as f64;
    let mut nodes = vec![0.0; n + 1];
    let mut weights = vec![0.0; n + 1];
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    weights[0] = 2.0 / (nf * (nf + 1.0));
    weights[n] = weights[0];
    for j in 1..(n + 1) / 2 {
        let mut x = -(std::f64::consts::PI * j as f64 / nf).cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (_, q, dq) = lobatto_poly(n, x);
            let delta = -q / dq;
            x += delta;
            if delta.abs() <= NEWTON_TOL * x.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(OperatorError::NoConvergence(j));
        }
        let (l, _, _) = lobatto_poly(n, x);
        nodes[j] = x;
        nodes[n - j] = -x;
        weights[j] = 2.0 / (nf * (nf + 1.0) * l * l);
        weights[n - j] = weights[j];
    }
    if n % 2 == 0 {
        let (l, _, _) = lobatto_poly(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (nf * (nf + 1.0) * l * l);
    }
    Ok((nodes, weights))
}

/// Chebyshev–Lobatto points `-cos(πj/n)`, used for geometry nodes.
pub fn chebyshev_lobatto(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.0];
    }
    let mut pts: Vec<f64> = (0..=n)
        .map(|j| -(std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect();
    pts[0] = -1.0;
    pts[n] = 1.0;
    for j in 0..=n / 2 {
        let v = 0.5 * (pts[n - j] - pts[j]);
        pts[j] = -v;
        pts[n - j] = v;
    }
    if n % 2 == 0 {
        pts[n / 2] = 0.0;
    }
    pts
}

/// Barycentric weights `λ_j = 1 / Π_{k≠j} (x_j - x_k)`.
pub fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>, OperatorError> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let d = nodes[j] - nodes[k];
            if d == 0.0 {
                return Err(OperatorError::DuplicateNodes(j.min(k), j.max(k)));
            }
            w[j] *= d;
        }
        w[j] = 1.0 / w[j];
    }
    Ok(w)
}

/// Derivative matrix `D_ij = ℓ_j'(ξ_i)` in barycentric form; the diagonal is
/// the negative off-diagonal row sum so that `D` annihilates constants.
pub fn derivative_matrix(nodes: &[f64]) -> Result<Vec<Vec<f64>>, OperatorError> {
    let lambda = barycentric_weights(nodes)?;
    let n = nodes.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                d[i][j] = lambda[j] / lambda[i] / (nodes[i] - nodes[j]);
                diag -= d[i][j];
            }
        }
        d[i][i] = diag;
    }
    Ok(d)
}

/// Values of all Lagrange basis polynomials of `nodes` at `x`.
///
/// Returns the exact cardinal vector when `x` coincides with a node.
pub fn lagrange_basis(nodes: &[f64], bary: &[f64], x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nodes.len()];
    if let Some(i) = nodes.iter().position(|&xi| xi == x) {
        out[i] = 1.0;
        return out;
    }
    let mut denom = 0.0;
    for (j, (&xj, &lj)) in nodes.iter().zip(bary).enumerate() {
        let t = lj / (x - xj);
        out[j] = t;
        denom += t;
    }
    for v in &mut out {
        *v /= denom;
    }
    out
}

/// Interpolation matrix `V_ij = ℓ_j(targets_i)` from `nodes` to `targets`.
pub fn interpolation_matrix(nodes: &[f64], targets: &[f64]) -> Result<Vec<Vec<f64>>, OperatorError> {
    let bary = barycentric_weights(nodes)?;
    Ok(targets.iter().map(|&x| lagrange_basis(nodes, &bary, x)).collect())
}

/// Barycentric Lagrange interpolation of nodal `values` at `x`.
pub fn lagrange_eval(nodes: &[f64], values: &[f64], x: f64) -> Result<f64, OperatorError> {
    let bary = barycentric_weights(nodes)?;
    let basis = lagrange_basis(nodes, &bary, x);
    Ok(basis.iter().zip(values).map(|(b, v)| b * v).sum())
}

/// The collocated Gauss–Lobatto SBP operator of degree `N`.
#[derive(Debug, Clone)]
pub struct SbpOperator {
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub barycentric: Vec<f64>,
    /// `D[i][j] = ℓ_j'(ξ_i)`.
    pub derivative: Vec<Vec<f64>>,
    /// `Q = M D`.
    pub q: Vec<Vec<f64>>,
}

impl SbpOperator {
    pub fn new(degree: usize) -> Result<Self, OperatorError> {
        let (nodes, weights) = gauss_lobatto(degree)?;
        let barycentric = barycentric_weights(&nodes)?;
        let derivative = derivative_matrix(&nodes)?;
        let q = derivative
            .iter()
            .zip(&weights)
            .map(|(row, &w)| row.iter().map(|d| w * d).collect())
            .collect();
        Ok(Self {
            degree,
            nodes,
            weights,
            barycentric,
            derivative,
            q,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.degree + 1
    }

    /// Diagonal of the mass matrix.
    pub fn mass(&self) -> &[f64] {
        &self.weights
    }

    /// Diagonal entry `B_ii` of the boundary matrix.
    pub fn boundary(&self, i: usize) -> f64 {
        if i == 0 {
            -1.0
        } else if i == self.degree {
            1.0
        } else {
            0.0
        }
    }

    /// `max_ij |Q + Qᵀ - B|`.
    pub fn sbp_defect(&self) -> f64 {
        let n = self.n_nodes();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let b = if i == j { self.boundary(i) } else { 0.0 };
                worst = worst.max((self.q[i][j] + self.q[j][i] - b).abs());
            }
        }
        worst
    }

    /// Applies `D` to nodal values.
    pub fn differentiate(&self, values: &[f64]) -> Vec<f64> {
        self.derivative
            .iter()
            .map(|row| row.iter().zip(values).map(|(d, v)| d * v).sum())
            .collect()
    }

    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let basis = lagrange_basis(&self.nodes, &self.barycentric, x);
        basis.iter().zip(values).map(|(b, v)| b * v).sum()
    }
}

/// Builds the SBP operator of degree `n`; see [`SbpOperator::new`].
pub fn build_sbp(n: usize) -> Result<SbpOperator, OperatorError> {
    SbpOperator::new(n)
}
