//! Compressible Euler state algebra for a calorically perfect gas, the
//! entropy pair, and the pointwise flux functions used by the volume,
//! surface and subcell operators.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Local-series switch for the logarithmic mean, in `ζ = ((a-b)/(a+b))²`.
const LOG_MEAN_SERIES_SWITCH: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("non-positive density {0:e}")]
    NonPositiveDensity(f64),
    #[error("non-positive pressure {0:e}")]
    NonPositivePressure(f64),
    #[error("logarithmic mean of non-positive arguments ({0:e}, {1:e})")]
    NonPositiveMean(f64, f64),
}

/// Conserved variables `(ρ, ρv₁, ρv₂, ρv₃, ρe)`. Flux vectors share the type.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerState(pub [f64; 5]);

impl EulerState {
    pub const ZERO: EulerState = EulerState([0.0; 5]);

    pub fn density(&self) -> f64 {
        self.0[0]
    }

    pub fn momentum(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn energy(&self) -> f64 {
        self.0[4]
    }

    pub fn dot(&self, other: &EulerState) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn from_primitive(rho: f64, v: [f64; 3], p: f64, gas: &GasModel) -> Self {
        let kinetic = 0.5 * rho * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        EulerState([rho, rho * v[0], rho * v[1], rho * v[2], p / (gas.gamma - 1.0) + kinetic])
    }
}

impl Index<usize> for EulerState {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for EulerState {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for EulerState {
    type Output = EulerState;
    fn add(mut self, rhs: EulerState) -> EulerState {
        self += rhs;
        self
    }
}

impl AddAssign for EulerState {
    fn add_assign(&mut self, rhs: EulerState) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for EulerState {
    type Output = EulerState;
    fn sub(mut self, rhs: EulerState) -> EulerState {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl Mul<EulerState> for f64 {
    type Output = EulerState;
    fn mul(self, mut rhs: EulerState) -> EulerState {
        for a in rhs.0.iter_mut() {
            *a *= self;
        }
        rhs
    }
}

impl Mul<f64> for EulerState {
    type Output = EulerState;
    fn mul(self, rhs: f64) -> EulerState {
        rhs * self
    }
}

/// Calorically perfect gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    pub gamma: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

impl GasModel {
    pub fn new(gamma: f64) -> Option<Self> {
        (gamma > 1.0 && gamma.is_finite()).then_some(Self { gamma })
    }

    pub fn sound_speed(&self, rho: f64, p: f64) -> f64 {
        (self.gamma * p / rho).sqrt()
    }
}

/// Primitive variables plus the derived quantities the two-point fluxes need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub v: [f64; 3],
    pub p: f64,
    /// Inverse temperature `β = ρ / (2p)`.
    pub beta: f64,
    /// `|v|²`.
    pub v2: f64,
}

impl Primitive {
    /// `None` unless `ρ > 0` and `p > 0`.
    pub fn from_values(rho: f64, v: [f64; 3], p: f64) -> Option<Self> {
        if !(rho > 0.0 && p > 0.0) || !v.iter().all(|x| x.is_finite()) {
            return None;
        }
        Some(Self {
            rho,
            v,
            p,
            beta: 0.5 * rho / p,
            v2: v[0] * v[0] + v[1] * v[1] + v[2] * v[2],
        })
    }

    pub fn sound_speed(&self, gas: &GasModel) -> f64 {
        gas.sound_speed(self.rho, self.p)
    }

    fn normal_velocity(&self, n: [f64; 3]) -> f64 {
        self.v[0] * n[0] + self.v[1] * n[1] + self.v[2] * n[2]
    }
}

/// Density, velocity and pressure of a conserved state.
pub fn primitives(q: &EulerState, gas: &GasModel) -> Result<Primitive, StateError> {
    let rho = q.0[0];
    if !(rho > 0.0) {
        return Err(StateError::NonPositiveDensity(rho));
    }
    let inv = 1.0 / rho;
    let v = [q.0[1] * inv, q.0[2] * inv, q.0[3] * inv];
    let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let p = (gas.gamma - 1.0) * (q.0[4] - 0.5 * rho * v2);
    if !(p > 0.0) {
        return Err(StateError::NonPositivePressure(p));
    }
    Ok(Primitive {
        rho,
        v,
        p,
        beta: 0.5 * rho / p,
        v2,
    })
}

fn unit(k: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[k] = 1.0;
    e
}

fn flux_from_primitive(q: &EulerState, w: &Primitive, n: [f64; 3]) -> EulerState {
    let vn = w.normal_velocity(n);
    EulerState([
        q.0[0] * vn,
        q.0[1] * vn + w.p * n[0],
        q.0[2] * vn + w.p * n[1],
        q.0[3] * vn + w.p * n[2],
        (q.0[4] + w.p) * vn,
    ])
}

/// Physical flux `f_k` for direction `k ∈ {0, 1, 2}`.
pub fn physical_flux(q: &EulerState, gas: &GasModel, k: usize) -> Result<EulerState, StateError> {
    physical_flux_normal(q, gas, unit(k))
}

/// Physical flux contracted with an arbitrary (not necessarily unit) vector.
pub fn physical_flux_normal(q: &EulerState, gas: &GasModel, n: [f64; 3]) -> Result<EulerState, StateError> {
    let w = primitives(q, gas)?;
    Ok(flux_from_primitive(q, &w, n))
}

/// Entropy function, entropy variables and entropy flux potential of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    /// `S = -ρ s / (γ-1)` with `s = ln(p ρ^{-γ})`.
    pub entropy: f64,
    /// `w = ∂S/∂q`.
    pub variables: EulerState,
    /// `ψ_k = ρ v_k`.
    pub potential: [f64; 3],
}

pub fn entropy_quantities(q: &EulerState, gas: &GasModel) -> Result<EntropyPair, StateError> {
    let w = primitives(q, gas)?;
    Ok(entropy_from_primitive(&w, gas))
}

pub(crate) fn entropy_from_primitive(w: &Primitive, gas: &GasModel) -> EntropyPair {
    let g = gas.gamma;
    let s = w.p.ln() - g * w.rho.ln();
    let rho_over_p = w.rho / w.p;
    EntropyPair {
        entropy: -w.rho * s / (g - 1.0),
        variables: EulerState([
            (g - s) / (g - 1.0) - 0.5 * rho_over_p * w.v2,
            rho_over_p * w.v[0],
            rho_over_p * w.v[1],
            rho_over_p * w.v[2],
            -rho_over_p,
        ]),
        potential: [w.rho * w.v[0], w.rho * w.v[1], w.rho * w.v[2]],
    }
}

/// Logarithmic mean `(a - b) / (ln a - ln b)`, continuous at `a = b`.
pub fn log_mean(a: f64, b: f64) -> Result<f64, StateError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(StateError::NonPositiveMean(a, b));
    }
    Ok(log_mean_unchecked(a, b))
}

#[inline]
pub(crate) fn log_mean_unchecked(a: f64, b: f64) -> f64 {
    let f = (a - b) / (a + b);
    let u = f * f;
    if u < LOG_MEAN_SERIES_SWITCH {
        0.5 * (a + b) / (1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u / 7.0)))
    } else {
        (a - b) / (a / b).ln()
    }
}

/// Shared averages of the Chandrashekar two-point construction.
struct ChandrashekarMeans {
    rho_ln: f64,
    v: [f64; 3],
    p_hat: f64,
    energy: f64,
}

#[inline]
fn chandrashekar_means(l: &Primitive, r: &Primitive, gas: &GasModel) -> ChandrashekarMeans {
    let rho_ln = log_mean_unchecked(l.rho, r.rho);
    let beta_ln = log_mean_unchecked(l.beta, r.beta);
    let v = [
        0.5 * (l.v[0] + r.v[0]),
        0.5 * (l.v[1] + r.v[1]),
        0.5 * (l.v[2] + r.v[2]),
    ];
    let v2_bar = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let p_hat = 0.5 * (l.rho + r.rho) / (l.beta + r.beta);
    let energy = rho_ln * (0.5 / ((gas.gamma - 1.0) * beta_ln) + v2_bar - 0.25 * (l.v2 + r.v2));
    ChandrashekarMeans { rho_ln, v, p_hat, energy }
}

/// Entropy-conservative ALE two-point flux `f♯·a - a_ν q♯`.
///
/// `a` is the (averaged) contravariant or area-scaled normal vector and
/// `a_nu` the matching mesh-velocity contraction. The result is symmetric in
/// `(l, r)`, reduces to `f·a - a_ν q` for `l = r`, and satisfies
/// `[[w]]·F = a·[[ψ]] - a_ν [[ρ]]`.
#[inline]
pub fn ec_ale_flux(l: &Primitive, r: &Primitive, gas: &GasModel, a: [f64; 3], a_nu: f64) -> EulerState {
    let m = chandrashekar_means(l, r, gas);
    let va = m.v[0] * a[0] + m.v[1] * a[1] + m.v[2] * a[2];
    let rel = va - a_nu;
    let mass = m.rho_ln * rel;
    EulerState([
        mass,
        mass * m.v[0] + m.p_hat * a[0],
        mass * m.v[1] + m.p_hat * a[1],
        mass * m.v[2] + m.p_hat * a[2],
        m.energy * rel + m.p_hat * va,
    ])
}

/// Chandrashekar entropy-conservative, kinetic-energy-preserving flux `f♯_k`.
pub fn ec_two_point_flux(
    qi: &EulerState,
    qj: &EulerState,
    gas: &GasModel,
    k: usize,
) -> Result<EulerState, StateError> {
    let l = primitives(qi, gas)?;
    let r = primitives(qj, gas)?;
    Ok(ec_ale_flux(&l, &r, gas, unit(k), 0.0))
}

/// State function `q♯` paired with the averaged mesh velocity in the ALE
/// term; satisfies `[[w]]·q♯ = [[ρ]] = [[wᵀq - S]]`.
pub fn ale_state_function(qi: &EulerState, qj: &EulerState, gas: &GasModel) -> Result<EulerState, StateError> {
    let l = primitives(qi, gas)?;
    let r = primitives(qj, gas)?;
    let m = chandrashekar_means(&l, &r, gas);
    Ok(EulerState([
        m.rho_ln,
        m.rho_ln * m.v[0],
        m.rho_ln * m.v[1],
        m.rho_ln * m.v[2],
        m.energy,
    ]))
}

/// Largest relative signal speed `max |v·n - ν_n| + c` over two states.
#[inline]
pub(crate) fn interface_wave_speed(l: &Primitive, r: &Primitive, gas: &GasModel, n: [f64; 3], nu_n: f64) -> f64 {
    let sl = (l.normal_velocity(n) - nu_n).abs() + l.sound_speed(gas);
    let sr = (r.normal_velocity(n) - nu_n).abs() + r.sound_speed(gas);
    sl.max(sr)
}

/// Rusanov flux on a moving interface with unit normal `n` and normal mesh
/// velocity `nu_n`, built on the arithmetic mean of the ALE fluxes.
pub fn rusanov_flux(
    ql: &EulerState,
    qr: &EulerState,
    gas: &GasModel,
    n: [f64; 3],
    nu_n: f64,
) -> Result<EulerState, StateError> {
    let l = primitives(ql, gas)?;
    let r = primitives(qr, gas)?;
    let fl = flux_from_primitive(ql, &l, n);
    let fr = flux_from_primitive(qr, &r, n);
    let lambda = interface_wave_speed(&l, &r, gas, n, nu_n);
    let mut out = EulerState::ZERO;
    for c in 0..5 {
        out.0[c] = 0.5 * (fl.0[c] + fr.0[c] - nu_n * (ql.0[c] + qr.0[c])) - 0.5 * lambda * (qr.0[c] - ql.0[c]);
    }
    Ok(out)
}

/// Entropy-conservative ALE flux with Rusanov dissipation added, scaled
/// by the area-weighted normal `a` (`|a| = J_f`).
#[inline]
pub(crate) fn ec_rusanov_flux(
    ql: &EulerState,
    qr: &EulerState,
    l: &Primitive,
    r: &Primitive,
    gas: &GasModel,
    a: [f64; 3],
    a_nu: f64,
) -> EulerState {
    let mut f = ec_ale_flux(l, r, gas, a, a_nu);
    let area = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let n = [a[0] / area, a[1] / area, a[2] / area];
    let lambda = interface_wave_speed(l, r, gas, n, a_nu / area) * area;
    for c in 0..5 {
        f.0[c] -= 0.5 * lambda * (qr.0[c] - ql.0[c]);
    }
    f
}

/// Arithmetic-mean Rusanov flux scaled by the area-weighted normal `a`.
#[inline]
pub(crate) fn average_rusanov_flux(
    ql: &EulerState,
    qr: &EulerState,
    l: &Primitive,
    r: &Primitive,
    gas: &GasModel,
    a: [f64; 3],
    a_nu: f64,
) -> EulerState {
    let fl = flux_from_primitive(ql, l, a);
    let fr = flux_from_primitive(qr, r, a);
    let area = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let n = [a[0] / area, a[1] / area, a[2] / area];
    let lambda = interface_wave_speed(l, r, gas, n, a_nu / area) * area;
    let mut out = EulerState::ZERO;
    for c in 0..5 {
        out.0[c] = 0.5 * (fl.0[c] + fr.0[c] - a_nu * (ql.0[c] + qr.0[c])) - 0.5 * lambda * (qr.0[c] - ql.0[c]);
    }
    out
}

/// Interface flux family used on element faces and subcell interfaces.
///
/// `Central` is the entropy-conservative two-point flux alone; `Rusanov`
/// adds local Lax–Friedrichs dissipation to it. `RusanovAverage` is the
/// classical form built on the arithmetic mean of the ALE fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericalFlux {
    Central,
    Rusanov,
    RusanovAverage,
}

impl NumericalFlux {
    /// Flux through an interface with area-weighted normal `a` (pointing
    /// from `l` to `r`) and mesh-velocity contraction `a_nu = ν·a`.
    #[inline]
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        self,
        ql: &EulerState,
        qr: &EulerState,
        l: &Primitive,
        r: &Primitive,
        gas: &GasModel,
        a: [f64; 3],
        a_nu: f64,
    ) -> EulerState {
        match self {
            NumericalFlux::Central => ec_ale_flux(l, r, gas, a, a_nu),
            NumericalFlux::Rusanov => ec_rusanov_flux(ql, qr, l, r, gas, a, a_nu),
            NumericalFlux::RusanovAverage => average_rusanov_flux(ql, qr, l, r, gas, a, a_nu),
        }
    }
}

/// Pointwise ALE flux `f·a - a_ν q`.
#[inline]
pub(crate) fn ale_flux_consistent(q: &EulerState, w: &Primitive, a: [f64; 3], a_nu: f64) -> EulerState {
    let mut f = flux_from_primitive(q, w, a);
    for c in 0..5 {
        f.0[c] -= a_nu * q.0[c];
    }
    f
}

/// Reflects the velocity relative to a wall moving with `nu`, keeping `ρ`, `p`.
pub fn reflect_state(w: &Primitive, n: [f64; 3], nu: [f64; 3], gas: &GasModel) -> EulerState {
    let rel = (w.v[0] - nu[0]) * n[0] + (w.v[1] - nu[1]) * n[1] + (w.v[2] - nu[2]) * n[2];
    let v = [w.v[0] - 2.0 * rel * n[0], w.v[1] - 2.0 * rel * n[1], w.v[2] - 2.0 * rel * n[2]];
    EulerState::from_primitive(w.rho, v, w.p, gas)
}

/// `|(v - ν)·a| + c |a|` for a metric direction vector `a`.
pub fn max_wave_speed(q: &EulerState, gas: &GasModel, nu: [f64; 3], a: [f64; 3]) -> Result<f64, StateError> {
    let w = primitives(q, gas)?;
    Ok(wave_speed_from_primitive(&w, gas, nu, a))
}

#[inline]
pub(crate) fn wave_speed_from_primitive(w: &Primitive, gas: &GasModel, nu: [f64; 3], a: [f64; 3]) -> f64 {
    let rel = (w.v[0] - nu[0]) * a[0] + (w.v[1] - nu[1]) * a[1] + (w.v[2] - nu[2]) * a[2];
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    rel.abs() + w.sound_speed(gas) * norm
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAS: GasModel = GasModel { gamma: 1.4 };

    fn piston_state() -> EulerState {
        EulerState([1.0, 0.0, 0.0, 0.0, 25.0 / 14.0])
    }

    fn free_stream() -> EulerState {
        EulerState([1.0, 0.3, 0.3, 0.3, 44.7775])
    }

    #[test]
    fn primitive_recovery() {
        let w = primitives(&piston_state(), &GAS).unwrap();
        assert!((w.p - 5.0 / 7.0).abs() < 1e-15);
        let w = primitives(&free_stream(), &GAS).unwrap();
        assert!((w.p - 17.857).abs() < 1e-12);
        assert_eq!(w.v, [0.3, 0.3, 0.3]);
        let doubled = 2.0 * free_stream();
        let w2 = primitives(&doubled, &GAS).unwrap();
        assert!((w2.p - 2.0 * 17.857).abs() < 1e-12);
        assert_eq!(w2.v, w.v);
    }

    #[test]
    fn invalid_states_reported() {
        assert!(matches!(
            primitives(&EulerState([0.0, 0.0, 0.0, 0.0, 1.0]), &GAS),
            Err(StateError::NonPositiveDensity(_))
        ));
        assert!(matches!(
            primitives(&EulerState([1.0, 2.0, 0.0, 0.0, 1.0]), &GAS),
            Err(StateError::NonPositivePressure(_))
        ));
    }

    #[test]
    fn primitive_round_trip() {
        let q = free_stream();
        let w = primitives(&q, &GAS).unwrap();
        let back = EulerState::from_primitive(w.rho, w.v, w.p, &GAS);
        for c in 0..5 {
            assert!((back[c] - q[c]).abs() <= 1e-14 * q[c].abs().max(1.0));
        }
    }

    #[test]
    fn physical_fluxes() {
        let f = physical_flux(&piston_state(), &GAS, 0).unwrap();
        assert_eq!(f.0[0], 0.0);
        assert!((f.0[1] - 5.0 / 7.0).abs() < 1e-15);
        assert_eq!(&f.0[2..], &[0.0, 0.0, 0.0]);
        let f = physical_flux(&free_stream(), &GAS, 0).unwrap();
        let expect = [0.3, 0.09 + 17.857, 0.09, 0.09, 0.3 * (44.7775 + 17.857)];
        for c in 0..5 {
            assert!((f[c] - expect[c]).abs() < 1e-12, "{c}: {} {}", f[c], expect[c]);
        }
        // Axis permutation equivariance.
        let q = EulerState([1.2, 0.1, -0.4, 0.7, 5.0]);
        let f0 = physical_flux(&q, &GAS, 0).unwrap();
        let qp = EulerState([1.2, -0.4, 0.1, 0.7, 5.0]);
        let f1 = physical_flux(&qp, &GAS, 1).unwrap();
        assert_eq!(f0[0], f1[0]);
        assert_eq!(f0[1], f1[2]);
        assert_eq!(f0[2], f1[1]);
        assert_eq!(f0[3], f1[3]);
        assert_eq!(f0[4], f1[4]);
    }

    #[test]
    fn reference_entropy_is_zero() {
        let q = EulerState::from_primitive(1.0, [0.0; 3], 1.0, &GAS);
        let e = entropy_quantities(&q, &GAS).unwrap();
        assert_eq!(e.entropy, 0.0);
        assert_eq!(e.potential, [0.0; 3]);
    }

    #[test]
    fn log_mean_values() {
        assert_eq!(log_mean(3.7, 3.7).unwrap(), 3.7);
        assert!((log_mean(1.0, 2.0).unwrap() - 1.0 / 2f64.ln()).abs() < 1e-15);
        // Series oracle: L(1, 1+ε) = 1 + ε/2 - ε²/12 + …
        let eps = 1e-12;
        let l = log_mean(1.0, 1.0 + eps).unwrap();
        assert!(l.is_finite());
        assert!((l - (1.0 + eps / 2.0)).abs() < 1e-13);
        assert!(log_mean(0.0, 1.0).is_err());
        assert!(log_mean(-1.0, 1.0).is_err());
    }

    #[test]
    fn log_mean_continuity_across_switch() {
        // Across the series/direct boundary the two branches agree closely.
        for &r in &[1.0199, 1.0201, 1.5, 1.001] {
            let a = log_mean_unchecked(2.0, 2.0 * r);
            let exact = (2.0 * r - 2.0) / (r.ln());
            assert!((a - exact).abs() <= 1e-14 * exact);
        }
    }

    #[test]
    fn ec_flux_consistency() {
        let q = piston_state();
        for k in 0..3 {
            let a = ec_two_point_flux(&q, &q, &GAS, k).unwrap();
            let b = physical_flux(&q, &GAS, k).unwrap();
            for c in 0..5 {
                assert!((a[c] - b[c]).abs() < 1e-15);
            }
        }
        let q = ale_state_function(&free_stream(), &free_stream(), &GAS).unwrap();
        for c in 0..5 {
            assert!((q[c] - free_stream()[c]).abs() <= 1e-13 * free_stream()[c].abs());
        }
    }

    #[test]
    fn rusanov_cases() {
        let q = free_stream();
        let n = [0.6, 0.0, 0.8];
        let f = rusanov_flux(&q, &q, &GAS, n, 0.0).unwrap();
        let g = physical_flux_normal(&q, &GAS, n).unwrap();
        for c in 0..5 {
            assert!((f[c] - g[c]).abs() < 1e-13);
        }
        // Interface moving with the fluid: only pressure work remains.
        let vn = 0.3 * (0.6 + 0.8);
        let f = rusanov_flux(&q, &q, &GAS, n, vn).unwrap();
        let p = 17.857;
        let expect = [0.0, p * 0.6, 0.0, p * 0.8, p * vn];
        for c in 0..5 {
            assert!((f[c] - expect[c]).abs() < 1e-12, "{c}: {}", f[c]);
        }
        let f = rusanov_flux(&piston_state(), &piston_state(), &GAS, [1.0, 0.0, 0.0], 0.0).unwrap();
        assert!((f[1] - 5.0 / 7.0).abs() < 1e-15);
        assert_eq!([f[0], f[2], f[3], f[4]], [0.0; 4]);
    }

    #[test]
    fn wave_speeds() {
        let s = max_wave_speed(&piston_state(), &GAS, [0.0; 3], [1.0, 0.0, 0.0]).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        let q = free_stream();
        let c = GAS.sound_speed(1.0, 17.857);
        let a = [0.3, -1.0, 2.0];
        let s = max_wave_speed(&q, &GAS, [0.3; 3], a).unwrap();
        let norm = (0.09f64 + 1.0 + 4.0).sqrt();
        assert!((s - c * norm).abs() < 1e-13);
        let s2 = max_wave_speed(&q, &GAS, [0.0; 3], [0.6, -2.0, 4.0]).unwrap();
        let s1 = max_wave_speed(&q, &GAS, [0.0; 3], a).unwrap();
        assert!((s2 - 2.0 * s1).abs() < 1e-13);
    }
}
