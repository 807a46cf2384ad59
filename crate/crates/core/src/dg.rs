//! Flux-differencing DGSEM operator on moving meshes: contravariant
//! two-point fluxes, the volume term `-(2Q ∘ F♯) 1`, the surface coupling
//! through `B`, and their discrete geometric conservation law counterparts.

use crate::mesh::geometry::{dot3, line_node};
use crate::physics::{ale_flux_consistent, ec_ale_flux, primitives, EulerState, GasModel, StateError};
use crate::residual::{ElementFaces, ElementInput, ElementResidual};
use crate::sbp::SbpOperator;

/// Nodes per line supported by the stack buffers of the kernels.
const MAX_LINE: usize = 16;

#[inline]
fn avg3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

/// `{{Ja}}·(f♯ - {{ν}} q♯)` for one reference direction, given the
/// direction's contravariant vectors `ja_i`, `ja_j` at the two nodes.
pub fn contravariant_two_point_flux(
    qi: &EulerState,
    qj: &EulerState,
    ja_i: [f64; 3],
    ja_j: [f64; 3],
    nu_i: [f64; 3],
    nu_j: [f64; 3],
    gas: &GasModel,
) -> Result<EulerState, StateError> {
    let l = primitives(qi, gas)?;
    let r = primitives(qj, gas)?;
    let a = avg3(ja_i, ja_j);
    Ok(ec_ale_flux(&l, &r, gas, a, gcl_two_point_flux(ja_i, ja_j, nu_i, nu_j)))
}

/// `ν♯ = {{Ja}}·{{ν}}`.
pub fn gcl_two_point_flux(ja_i: [f64; 3], ja_j: [f64; 3], nu_i: [f64; 3], nu_j: [f64; 3]) -> f64 {
    dot3(avg3(ja_i, ja_j), avg3(nu_i, nu_j))
}

/// Adds `scale · M⁻¹[-(2Q ∘ F♯) 1]` and `scale · M⁻¹[(2Q ∘ ν♯) 1]`.
///
/// The diagonal `Q_ii` terms only survive at the two boundary nodes, where
/// they cancel against the consistent-flux part of the surface term; the
/// fused hot path skips both.
pub(crate) fn volume_kernel(
    input: &ElementInput,
    sbp: &SbpOperator,
    gas: &GasModel,
    include_diagonal: bool,
    scale: f64,
    out: &mut ElementResidual,
) {
    let n = sbp.n_nodes();
    let geo = input.geometry;
    // 2 D_ij · scale, row-major.
    let mut coef = [0.0; MAX_LINE * MAX_LINE];
    for i in 0..n {
        for j in 0..n {
            coef[i * n + j] = 2.0 * sbp.derivative[i][j] * scale;
        }
    }
    let mut idx = [0usize; MAX_LINE];
    let mut ja = [[0.0; 3]; MAX_LINE];
    let mut nu = [[0.0; 3]; MAX_LINE];
    for d in 0..3 {
        for b in 0..n {
            for a in 0..n {
                for i in 0..n {
                    idx[i] = line_node(n, d, i, a, b);
                    ja[i] = geo.metrics[idx[i]][d];
                    nu[i] = geo.velocities[idx[i]];
                }
                for i in 0..n {
                    let ni = idx[i];
                    let wi = &input.prims[ni];
                    if include_diagonal {
                        let a_nu = dot3(ja[i], nu[i]);
                        let f = ale_flux_consistent(&input.states[ni], wi, ja[i], a_nu);
                        let c = coef[i * n + i];
                        for k in 0..5 {
                            out.state[ni].0[k] -= c * f.0[k];
                        }
                        out.jac[ni] += c * a_nu;
                    }
                    let mut acc = EulerState::ZERO;
                    let mut acc_j = 0.0;
                    for j in (i + 1)..n {
                        let nj = idx[j];
                        let jm = avg3(ja[i], ja[j]);
                        let a_nu = dot3(jm, avg3(nu[i], nu[j]));
                        let f = ec_ale_flux(wi, &input.prims[nj], gas, jm, a_nu);
                        let ci = coef[i * n + j];
                        let cj = coef[j * n + i];
                        for k in 0..5 {
                            acc.0[k] += ci * f.0[k];
                            out.state[nj].0[k] -= cj * f.0[k];
                        }
                        acc_j += ci * a_nu;
                        out.jac[nj] += cj * a_nu;
                    }
                    for k in 0..5 {
                        out.state[ni].0[k] -= acc.0[k];
                    }
                    out.jac[ni] += acc_j;
                }
            }
        }
    }
}

/// Adds `scale · M⁻¹[-B (F* - F♯_ii)]` and the GCL analogue at the
/// boundary node layers. With `subtract_consistent = false` the `F♯_ii`
/// part is omitted, which is also the surface term of the subcell operator.
pub(crate) fn surface_kernel(
    input: &ElementInput,
    faces: &ElementFaces,
    sbp: &SbpOperator,
    subtract_consistent: bool,
    scale: f64,
    out: &mut ElementResidual,
) {
    let n = sbp.n_nodes();
    let geo = input.geometry;
    for d in 0..3 {
        for side in 0..2 {
            let (p, bii) = if side == 0 { (0, -1.0) } else { (n - 1, 1.0) };
            let c = scale * bii / sbp.weights[p];
            let trace = &faces.faces[d][side];
            for b in 0..n {
                for a in 0..n {
                    let node = line_node(n, d, p, a, b);
                    let fp = a + n * b;
                    let mut f = trace.flux[fp];
                    let mut g = trace.gcl[fp];
                    if subtract_consistent {
                        let ja = geo.metrics[node][d];
                        let a_nu = dot3(ja, geo.velocities[node]);
                        f = f - ale_flux_consistent(&input.states[node], &input.prims[node], ja, a_nu);
                        g -= a_nu;
                    }
                    for k in 0..5 {
                        out.state[node].0[k] -= c * f.0[k];
                    }
                    out.jac[node] += c * g;
                }
            }
        }
    }
}

/// DG volume contribution, including the `Q_ii` boundary diagonal.
pub fn dg_volume_residual(input: &ElementInput, sbp: &SbpOperator, gas: &GasModel) -> ElementResidual {
    let mut out = ElementResidual::zeros(input.states.len());
    volume_kernel(input, sbp, gas, true, 1.0, &mut out);
    out
}

/// DG surface contribution `-B (F* - F♯_ii)` and its GCL counterpart.
pub fn dg_surface_residual(input: &ElementInput, faces: &ElementFaces, sbp: &SbpOperator) -> ElementResidual {
    let mut out = ElementResidual::zeros(input.states.len());
    surface_kernel(input, faces, sbp, true, 1.0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::physical_flux_normal;

    const GAS: GasModel = GasModel { gamma: 1.4 };

    #[test]
    fn contravariant_consistency_and_symmetry() {
        let q = EulerState::from_primitive(1.3, [0.2, -0.1, 0.4], 2.0, &GAS);
        let r = EulerState::from_primitive(0.8, [-0.3, 0.2, 0.1], 1.1, &GAS);
        let ja = [0.3, 0.1, -0.05];
        let f = contravariant_two_point_flux(&q, &q, ja, ja, [0.0; 3], [0.0; 3], &GAS).unwrap();
        let g = physical_flux_normal(&q, &GAS, ja).unwrap();
        for c in 0..5 {
            assert!((f[c] - g[c]).abs() < 1e-14);
        }
        let (ja2, nu1, nu2) = ([0.25, 0.0, 0.1], [0.1, 0.2, 0.0], [-0.2, 0.1, 0.3]);
        let a = contravariant_two_point_flux(&q, &r, ja, ja2, nu1, nu2, &GAS).unwrap();
        let b = contravariant_two_point_flux(&r, &q, ja2, ja, nu2, nu1, &GAS).unwrap();
        assert!((a - b).max_abs() < 1e-15 * (1.0 + a.max_abs()));
        // Constant state, arbitrary metrics and velocities.
        let c = contravariant_two_point_flux(&q, &q, ja, ja2, nu1, nu2, &GAS).unwrap();
        let abar = avg3(ja, ja2);
        let fq = physical_flux_normal(&q, &GAS, abar).unwrap();
        let s = dot3(abar, avg3(nu1, nu2));
        for k in 0..5 {
            assert!((c[k] - (fq[k] - s * q[k])).abs() < 1e-14);
        }
    }

    #[test]
    fn gcl_flux_cases() {
        let ja = [0.3, 0.1, -0.05];
        assert_eq!(gcl_two_point_flux(ja, [1.0, 2.0, 3.0], [0.0; 3], [0.0; 3]), 0.0);
        let nu = [0.2, -0.4, 1.0];
        assert!((gcl_two_point_flux(ja, ja, nu, nu) - dot3(ja, nu)).abs() < 1e-16);
        let (a, b) = ([0.1, 0.5, 0.2], [0.7, -0.1, 0.0]);
        assert!((gcl_two_point_flux(ja, a, nu, b) - gcl_two_point_flux(a, ja, b, nu)).abs() < 1e-16);
    }
}
