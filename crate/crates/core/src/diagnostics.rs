//! Integral quantities, error norms and convergence rates.

use crate::operator::Solution;
use crate::physics::{entropy_quantities, EulerState, GasModel, StateError};
use crate::sbp::SbpOperator;

/// Tensor-product quadrature weight of every node of one element.
pub fn node_weights(sbp: &SbpOperator) -> Vec<f64> {
    let n = sbp.n_nodes();
    let w = &sbp.weights;
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                out.push(w[i] * w[j] * w[k]);
            }
        }
    }
    out
}

/// `Σ ω J u` for each conserved variable.
pub fn conserved_totals(sol: &Solution, weights: &[f64]) -> [f64; 5] {
    let npe = weights.len();
    let mut t = [0.0; 5];
    for (i, q) in sol.ju.iter().enumerate() {
        let w = weights[i % npe];
        for c in 0..5 {
            t[c] += w * q.0[c];
        }
    }
    t
}

/// `Σ ω J S` with the evolved Jacobian.
pub fn total_entropy(sol: &Solution, weights: &[f64], gas: &GasModel) -> Result<f64, StateError> {
    let npe = weights.len();
    let mut s = 0.0;
    for (i, (q, &j)) in sol.ju.iter().zip(&sol.jac).enumerate() {
        let u = *q * (1.0 / j);
        s += weights[i % npe] * j * entropy_quantities(&u, gas)?.entropy;
    }
    Ok(s)
}

/// `sqrt(Σ ωJ (u - u_ref)² / Σ ωJ)` per variable, with `u_ref` sampled at
/// the node positions `x`.
pub fn l2_error(
    sol: &Solution,
    positions: &[[f64; 3]],
    weights: &[f64],
    reference: impl Fn([f64; 3]) -> EulerState,
) -> [f64; 5] {
    let npe = weights.len();
    let mut acc = [0.0; 5];
    let mut vol = 0.0;
    for (i, (q, &j)) in sol.ju.iter().zip(&sol.jac).enumerate() {
        let wj = weights[i % npe] * j;
        let d = *q * (1.0 / j) - reference(positions[i]);
        for c in 0..5 {
            acc[c] += wj * d.0[c] * d.0[c];
        }
        vol += wj;
    }
    acc.map(|a| (a / vol).sqrt())
}

/// Observed order between consecutive refinement levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eoc {
    Slope(f64),
    /// Both errors vanish; no rate is defined.
    Exact,
}

impl Eoc {
    pub fn slope(self) -> Option<f64> {
        match self {
            Eoc::Slope(s) => Some(s),
            Eoc::Exact => None,
        }
    }
}

/// `ln(e_k / e_{k+1}) / ln(h_k / h_{k+1})`.
pub fn eoc(errors: &[f64], widths: &[f64]) -> Vec<Eoc> {
    errors
        .windows(2)
        .zip(widths.windows(2))
        .map(|(e, h)| {
            if e[0] == 0.0 && e[1] == 0.0 {
                Eoc::Exact
            } else {
                Eoc::Slope((e[0] / e[1]).ln() / (h[0] / h[1]).ln())
            }
        })
        .collect()
}

/// One output event.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub time: f64,
    /// Step that led to this sample; zero for the initial row.
    pub dt: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub totals: [f64; 5],
    pub entropy: f64,
    /// Per-variable error against the exact solution, when one is known.
    pub l2: Option<[f64; 5]>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSeries {
    pub rows: Vec<DiagnosticsRow>,
}

pub const CSV_HEADER: &str = "step,time,dt,alpha_min,alpha_max,mass,momentum_x,momentum_y,momentum_z,energy,entropy,entropy_change,l2_rho,l2_rho_v1,l2_rho_v2,l2_rho_v3,l2_rho_e";

/// Round-trip formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl DiagnosticsSeries {
    /// `Δ_S(t) = S(t) - S(0)` for every row.
    pub fn integral_entropy_error(&self) -> Vec<f64> {
        integral_entropy_error(self)
    }

    pub fn csv_row(&self, idx: usize) -> String {
        let r = &self.rows[idx];
        let mut f = vec![
            r.step.to_string(),
            fmt17(r.time),
            fmt17(r.dt),
            fmt17(r.alpha_min),
            fmt17(r.alpha_max),
        ];
        f.extend(r.totals.iter().map(|&v| fmt17(v)));
        f.push(fmt17(r.entropy));
        f.push(fmt17(r.entropy - self.rows[0].entropy));
        match r.l2 {
            Some(e) => f.extend(e.iter().map(|&v| fmt17(v))),
            None => f.extend(std::iter::repeat_n(String::new(), 5)),
        }
        f.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for i in 0..self.rows.len() {
            s.push_str(&self.csv_row(i));
            s.push('\n');
        }
        s
    }

    /// Largest relative change of each conserved total against the first row.
    pub fn max_relative_drift(&self) -> [f64; 5] {
        let Some(first) = self.rows.first() else {
            return [0.0; 5];
        };
        let mut out = [0.0f64; 5];
        for r in &self.rows {
            for c in 0..5 {
                let scale = first.totals[c].abs().max(first.totals[0].abs()).max(f64::MIN_POSITIVE);
                out[c] = out[c].max((r.totals[c] - first.totals[c]).abs() / scale);
            }
        }
        out
    }
}

pub fn integral_entropy_error(series: &DiagnosticsSeries) -> Vec<f64> {
    let Some(first) = series.rows.first() else {
        return Vec::new();
    };
    series.rows.iter().map(|r| r.entropy - first.entropy).collect()
}
