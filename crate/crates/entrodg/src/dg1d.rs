//! One-dimensional nodal DG spatial discretization: mesh, numerical fluxes,
//! residual assembly (collocated or over-integrated, standard or
//! pressure-equilibrium-preserving modified interpolation), and artificial
//! viscosity.
//!
//! The semi-discretization is written so that `dy/dt = rhs`; the element
//! average evolves only through the interface numerical fluxes, which is what
//! the limiting theory relies on.

use thiserror::Error;

use crate::basis::{gauss_legendre_rule, legendre_shifted};
use crate::state::{self, ENER, MOM, SPECIES};
use crate::thermo::{GasModel, ThermoError, R0};
use crate::{Basis, Float};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DgError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("modified pressure not positive: {0}")]
    NonpositiveModifiedPressure(Float),
    #[error("wave-speed estimates are not ordered: s_l={0}, s_r={1}")]
    WaveSpeedFailure(Float, Float),
}

/// Boundary treatment of the 1D domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    /// Slip walls: the ghost state mirrors the interior state with negated
    /// velocity, so the wall mass/species/energy flux vanishes.
    Wall,
}

/// Uniform 1D mesh.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    pub x_min: Float,
    pub x_max: Float,
    pub n_elem: usize,
    pub h: Float,
    pub bc: BoundaryKind,
}

impl Mesh1D {
    pub fn new(x_min: Float, x_max: Float, n_elem: usize, bc: BoundaryKind) -> Self {
        assert!(n_elem > 0 && x_max > x_min);
        Self {
            x_min,
            x_max,
            n_elem,
            h: (x_max - x_min) / n_elem as Float,
            bc,
        }
    }

    /// Physical coordinate of reference point `xi` in element `e`.
    #[inline]
    pub fn x_at(&self, e: usize, xi: Float) -> Float {
        self.x_min + (e as Float + xi) * self.h
    }
}

/// Interface numerical flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxKind {
    #[default]
    Hllc,
    /// Local Lax-Friedrichs.
    Llf,
}

/// Volume-term flux evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterpMode {
    /// Collocation at the solution nodes (`n_c = n_b`); pressure equilibrium
    /// is maintained trivially.
    #[default]
    Collocation,
    /// Gauss-Legendre over-integration with `n_q` points.
    OverIntegrated { n_q: usize, modified: bool },
}

/// Artificial-viscosity configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvConfig {
    pub c_av: Float,
    /// Enables the modal-decay shock sensor contribution `S_AV`.
    pub sensor: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResidualOptions {
    pub flux: FluxKind,
    pub interp: InterpMode,
}

/// Nodal DG solution storage: `y[(e * n_nodes + j) * m ..][..m]`, plus a
/// temperature cache used to warm-start the energy inversions.
#[derive(Debug, Clone)]
pub struct Solution {
    pub n_elem: usize,
    pub n_nodes: usize,
    pub m: usize,
    pub y: Vec<Float>,
    pub t_cache: Vec<Float>,
}

impl Solution {
    pub fn zeros(n_elem: usize, n_nodes: usize, m: usize) -> Self {
        Self {
            n_elem,
            n_nodes,
            m,
            y: vec![0.0; n_elem * n_nodes * m],
            t_cache: vec![1000.0; n_elem * n_nodes],
        }
    }

    #[inline]
    pub fn node(&self, e: usize, j: usize) -> &[Float] {
        let o = (e * self.n_nodes + j) * self.m;
        &self.y[o..o + self.m]
    }

    #[inline]
    pub fn node_mut(&mut self, e: usize, j: usize) -> &mut [Float] {
        let o = (e * self.n_nodes + j) * self.m;
        &mut self.y[o..o + self.m]
    }

    #[inline]
    pub fn elem(&self, e: usize) -> &[Float] {
        let o = e * self.n_nodes * self.m;
        &self.y[o..o + self.n_nodes * self.m]
    }

    #[inline]
    pub fn elem_mut(&mut self, e: usize) -> &mut [Float] {
        let o = e * self.n_nodes * self.m;
        &mut self.y[o..o + self.n_nodes * self.m]
    }

    /// Quadrature element average into `out`.
    pub fn elem_average(&self, e: usize, basis: &Basis, out: &mut [Float]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n_nodes {
            let w = basis.weights()[j];
            for (o, v) in out.iter_mut().zip(self.node(e, j)) {
                *o += w * v;
            }
        }
    }
}

/// Per-node derived quantities used by flux evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Derived {
    pub t: Float,
    pub v: Float,
    pub p: Float,
    pub c_sound: Float,
}

/// Computes temperature, velocity, pressure, and sound speed of a state.
pub fn derive(model: &GasModel, y: &[Float], t_guess: Option<Float>) -> Result<Derived, DgError> {
    let rho = state::density(model, y);
    let t = state::temperature(model, y, t_guess)?;
    let p = model.pressure(&y[SPECIES..], t);
    let c_sound = model.sound_speed(&y[SPECIES..], t)?;
    Ok(Derived {
        t,
        v: y[MOM] / rho,
        p,
        c_sound,
    })
}

/// Physical convective flux `(rho v^2 + P, v (rho e_t + P), v C_i)`.
#[inline]
pub fn physical_flux(y: &[Float], d: &Derived, out: &mut [Float]) {
    out[MOM] = y[MOM] * d.v + d.p;
    out[ENER] = d.v * (y[ENER] + d.p);
    for i in SPECIES..y.len() {
        out[i] = d.v * y[i];
    }
}

fn hllc_core(
    yl: &[Float],
    dl: &Derived,
    yr: &[Float],
    dr: &Derived,
    model: &GasModel,
    out: &mut [Float],
) -> Result<(), DgError> {
    let rho_l = state::density(model, yl);
    let rho_r = state::density(model, yr);
    // Davis wave-speed estimates.
    let s_l = (dl.v - dl.c_sound).min(dr.v - dr.c_sound);
    let s_r = (dl.v + dl.c_sound).max(dr.v + dr.c_sound);
    if !(s_l < s_r) {
        return Err(DgError::WaveSpeedFailure(s_l, s_r));
    }
    if s_l >= 0.0 {
        physical_flux(yl, dl, out);
        return Ok(());
    }
    if s_r <= 0.0 {
        physical_flux(yr, dr, out);
        return Ok(());
    }
    let ql = rho_l * (s_l - dl.v);
    let qr = rho_r * (s_r - dr.v);
    let s_star = (dr.p - dl.p + dl.v * ql - dr.v * qr) / (ql - qr);
    let (y_k, d_k, s_k, q_k) = if s_star >= 0.0 {
        (yl, dl, s_l, ql)
    } else {
        (yr, dr, s_r, qr)
    };
    physical_flux(y_k, d_k, out);
    // Star state: each conserved quantity scaled into the contact region.
    let factor = (s_k - d_k.v) / (s_k - s_star);
    let rho_k = state::density(model, y_k);
    let rho_star = rho_k * factor;
    let mom_star = rho_star * s_star;
    let e_star = rho_star
        * (y_k[ENER] / rho_k + (s_star - d_k.v) * (s_star + d_k.p / (rho_k * (s_k - d_k.v))));
    out[MOM] += s_k * (mom_star - y_k[MOM]);
    out[ENER] += s_k * (e_star - y_k[ENER]);
    for i in SPECIES..y_k.len() {
        out[i] += s_k * (y_k[i] * factor - y_k[i]);
    }
    Ok(())
}

fn llf_core(
    yl: &[Float],
    dl: &Derived,
    yr: &[Float],
    dr: &Derived,
    model: &GasModel,
    out: &mut [Float],
    scratch: &mut [Float],
) {
    let lambda = (dl.v.abs() + dl.c_sound).max(dr.v.abs() + dr.c_sound);
    physical_flux(yl, dl, out);
    physical_flux(yr, dr, scratch);
    let _ = model;
    for i in 0..out.len() {
        out[i] = 0.5 * (out[i] + scratch[i]) - 0.5 * lambda * (yr[i] - yl[i]);
    }
}

/// Oriented interface flux `F_dagger(y_l, y_r, n)` for `n = +-1`.
///
/// Satisfies consistency `F_dagger(y, y, n) = F(y) n` and conservation
/// `F_dagger(y_l, y_r, 1) = -F_dagger(y_r, y_l, -1)` by construction.
pub fn interface_flux(
    model: &GasModel,
    kind: FluxKind,
    yl: &[Float],
    yr: &[Float],
    n: Float,
    out: &mut [Float],
) -> Result<(), DgError> {
    let (a, b) = if n >= 0.0 { (yl, yr) } else { (yr, yl) };
    let da = derive(model, a, None)?;
    let db = derive(model, b, None)?;
    match kind {
        FluxKind::Hllc => hllc_core(a, &da, b, &db, model, out)?,
        FluxKind::Llf => {
            let mut scratch = vec![0.0; out.len()];
            llf_core(a, &da, b, &db, model, out, &mut scratch);
        }
    }
    if n < 0.0 {
        out.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(())
}

/// HLLC flux with the rightward normal (spec-facing wrapper).
pub fn hllc_flux(
    model: &GasModel,
    yl: &[Float],
    yr: &[Float],
    n: Float,
    out: &mut [Float],
) -> Result<(), DgError> {
    interface_flux(model, FluxKind::Hllc, yl, yr, n, out)
}

/// Local Lax-Friedrichs flux (spec-facing wrapper).
pub fn llf_flux(
    model: &GasModel,
    yl: &[Float],
    yr: &[Float],
    n: Float,
    out: &mut [Float],
) -> Result<(), DgError> {
    interface_flux(model, FluxKind::Llf, yl, yr, n, out)
}

/// Nodal pressures of an element (nodal interpolation is evaluation).
pub fn interpolated_pressure(
    model: &GasModel,
    elem: &[Float],
    m: usize,
    t_guesses: &[Float],
    out: &mut [Float],
) -> Result<(), DgError> {
    for (j, chunk) in elem.chunks_exact(m).enumerate() {
        let guess = t_guesses.get(j).copied();
        let d = derive(model, chunk, guess)?;
        out[j] = d.p;
    }
    Ok(())
}

/// Modified state: keeps momentum and concentrations, rebuilds the energy
/// from the interpolated pressure via `T~ = P~ / (R0 sum C_i)`.
///
/// At solution nodes `P~ = P(y)` and the modified state equals `y`.
pub fn modified_state(
    model: &GasModel,
    y: &[Float],
    p_tilde: Float,
    out: &mut [Float],
) -> Result<(), DgError> {
    if !(p_tilde > 0.0) {
        return Err(DgError::NonpositiveModifiedPressure(p_tilde));
    }
    let c = &y[SPECIES..];
    let c_sum: Float = c.iter().sum();
    let t_tilde = p_tilde / (R0 * c_sum);
    let rho = model.density(c);
    let rho_u = model.rho_u(c, t_tilde)?;
    out.copy_from_slice(y);
    out[ENER] = rho_u + 0.5 * y[MOM] * y[MOM] / rho;
    Ok(())
}

/// Scratch buffers reused across residual assemblies.
#[derive(Debug, Clone)]
pub struct DgScratch {
    derived: Vec<Derived>,
    nodal_flux: Vec<Float>,
    face_flux: Vec<Float>,
    tmp_state: Vec<Float>,
    tmp_state2: Vec<Float>,
    tmp_flux: Vec<Float>,
    grad: Vec<Float>,
    nodal_p: Vec<Float>,
    pub av_nu: Vec<Float>,
}

impl DgScratch {
    pub fn new(n_elem: usize, n_nodes: usize, m: usize) -> Self {
        Self {
            derived: vec![Derived::default(); n_elem * n_nodes],
            nodal_flux: vec![0.0; n_elem * n_nodes * m],
            face_flux: vec![0.0; (n_elem + 1) * m],
            tmp_state: vec![0.0; m],
            tmp_state2: vec![0.0; m],
            tmp_flux: vec![0.0; m],
            grad: vec![0.0; n_nodes * m],
            nodal_p: vec![0.0; n_nodes],
            av_nu: vec![0.0; n_elem],
        }
    }
}

/// Summary of an assembly pass.
#[derive(Debug, Clone, Copy, Default)]
pub struct AssemblyInfo {
    /// Maximum nodal `|v| + c`.
    pub lambda_max: Float,
    /// Maximum elemental artificial viscosity.
    pub nu_max: Float,
}

/// Ghost state for a boundary face; `left` selects the domain side.
fn boundary_state(sol: &Solution, bc: BoundaryKind, left: bool, out: &mut [Float]) {
    let n = sol.n_nodes;
    match (bc, left) {
        (BoundaryKind::Periodic, true) => out.copy_from_slice(sol.node(sol.n_elem - 1, n - 1)),
        (BoundaryKind::Periodic, false) => out.copy_from_slice(sol.node(0, 0)),
        (BoundaryKind::Wall, true) => {
            out.copy_from_slice(sol.node(0, 0));
            out[MOM] = -out[MOM];
        }
        (BoundaryKind::Wall, false) => {
            out.copy_from_slice(sol.node(sol.n_elem - 1, n - 1));
            out[MOM] = -out[MOM];
        }
    }
}

/// Assembles `dy/dt` for the transport operator into `rhs`.
///
/// The volume term is the collocated strong form by default; over-integrated
/// modes quadrature the weak form with either interpolated conservative
/// states or the pressure-interpolating modified states. Surface terms use
/// the endpoint numerical fluxes. Optional artificial viscosity adds an
/// element-local dissipation term that leaves element averages untouched.
pub fn assemble_residual(
    model: &GasModel,
    mesh: &Mesh1D,
    basis: &Basis,
    sol: &mut Solution,
    opts: &ResidualOptions,
    av: Option<&AvConfig>,
    scratch: &mut DgScratch,
    rhs: &mut [Float],
) -> Result<AssemblyInfo, DgError> {
    let n = sol.n_nodes;
    let m = sol.m;
    let ne = sol.n_elem;
    let h = mesh.h;
    let mut info = AssemblyInfo::default();

    // Pass 1: per-node derived quantities and physical fluxes.
    for e in 0..ne {
        for j in 0..n {
            let idx = e * n + j;
            let y = &sol.y[idx * m..(idx + 1) * m];
            let d = derive(model, y, Some(sol.t_cache[idx]))?;
            sol.t_cache[idx] = d.t;
            scratch.derived[idx] = d;
            info.lambda_max = info.lambda_max.max(d.v.abs() + d.c_sound);
            physical_flux(y, &d, &mut scratch.nodal_flux[idx * m..(idx + 1) * m]);
        }
    }

    // Pass 2: interface fluxes, oriented left-to-right.
    let n_faces = ne + 1;
    for f in 0..n_faces {
        let (yl, dl): (&[Float], Derived) = if f == 0 {
            boundary_state(sol, mesh.bc, true, &mut scratch.tmp_state);
            let d = derive(model, &scratch.tmp_state, Some(sol.t_cache[0]))?;
            (&scratch.tmp_state, d)
        } else {
            let idx = (f - 1) * n + (n - 1);
            (sol.node(f - 1, n - 1), scratch.derived[idx])
        };
        let (yr, dr): (&[Float], Derived) = if f == n_faces - 1 {
            boundary_state(sol, mesh.bc, false, &mut scratch.tmp_state2);
            let d = derive(model, &scratch.tmp_state2, Some(sol.t_cache[(ne - 1) * n + n - 1]))?;
            (&scratch.tmp_state2, d)
        } else {
            let idx = f * n;
            (sol.node(f, 0), scratch.derived[idx])
        };
        let out = &mut scratch.face_flux[f * m..(f + 1) * m];
        match opts.flux {
            FluxKind::Hllc => hllc_core(yl, &dl, yr, &dr, model, out)?,
            FluxKind::Llf => llf_core(yl, &dl, yr, &dr, model, out, &mut scratch.tmp_flux),
        }
    }

    // Over-integration tables if requested.
    let over = match opts.interp {
        InterpMode::Collocation => None,
        InterpMode::OverIntegrated { n_q, modified } => {
            let (xi, wq) = gauss_legendre_rule::<Float>(n_q);
            // Basis values and derivatives at the quadrature points.
            let mut eval = vec![0.0; n_q * n];
            let mut deriv = vec![0.0; n_q * n];
            let mut row = vec![0.0; n];
            for (q, &x) in xi.iter().enumerate() {
                basis.eval_lagrange(x, &mut row);
                eval[q * n..(q + 1) * n].copy_from_slice(&row);
                for j in 0..n {
                    deriv[q * n + j] = lagrange_derivative(basis, j, x);
                }
            }
            Some((xi, wq, eval, deriv, modified))
        }
    };

    rhs.iter_mut().for_each(|v| *v = 0.0);

    // Pass 3: per-element volume + surface terms.
    for e in 0..ne {
        let rhs_e = &mut rhs[e * n * m..(e + 1) * n * m];
        match &over {
            None => {
                // Strong form: dy_i -= (1/h) sum_j D_ij F_j.
                for i in 0..n {
                    for j in 0..n {
                        let d_ij = basis.d(i, j);
                        if d_ij != 0.0 {
                            let fj = &scratch.nodal_flux[(e * n + j) * m..(e * n + j + 1) * m];
                            for k in 0..m {
                                rhs_e[i * m + k] -= d_ij * fj[k] / h;
                            }
                        }
                    }
                }
                // Surface corrections at the endpoints.
                let g_left = &scratch.face_flux[e * m..(e + 1) * m];
                let f_1 = &scratch.nodal_flux[(e * n) * m..(e * n + 1) * m];
                let w_1 = basis.weights()[0];
                for k in 0..m {
                    rhs_e[k] -= (f_1[k] - g_left[k]) / (h * w_1);
                }
                let g_right = &scratch.face_flux[(e + 1) * m..(e + 2) * m];
                let f_n = &scratch.nodal_flux[(e * n + n - 1) * m..(e * n + n) * m];
                let w_n = basis.weights()[n - 1];
                for k in 0..m {
                    rhs_e[(n - 1) * m + k] -= (g_right[k] - f_n[k]) / (h * w_n);
                }
            }
            Some((_, wq, eval, deriv, modified)) => {
                // Weak form: h w_i dy_i = sum_q w_q F_q phi_i'(xi_q)
                //                        - G_right delta_{i,n-1} + G_left delta_{i,0}.
                if *modified {
                    interpolated_pressure(
                        model,
                        sol.elem(e),
                        m,
                        &sol.t_cache[e * n..(e + 1) * n],
                        &mut scratch.nodal_p,
                    )?;
                }
                for (q, &w_quad) in wq.iter().enumerate() {
                    // Interpolate the state to the quadrature point.
                    scratch.tmp_state.iter_mut().for_each(|v| *v = 0.0);
                    for j in 0..n {
                        let phi = eval[q * n + j];
                        let yj = sol.node(e, j);
                        for k in 0..m {
                            scratch.tmp_state[k] += phi * yj[k];
                        }
                    }
                    let d = if *modified {
                        let p_tilde: Float = (0..n)
                            .map(|j| eval[q * n + j] * scratch.nodal_p[j])
                            .sum();
                        modified_state(model, &scratch.tmp_state.clone(), p_tilde, &mut scratch.tmp_state)?;
                        let rho = state::density(model, &scratch.tmp_state);
                        Derived {
                            t: 0.0,
                            v: scratch.tmp_state[MOM] / rho,
                            p: p_tilde,
                            c_sound: 0.0,
                        }
                    } else {
                        derive(model, &scratch.tmp_state, None)?
                    };
                    physical_flux(&scratch.tmp_state, &d, &mut scratch.tmp_flux);
                    for i in 0..n {
                        let dphi = deriv[q * n + i];
                        if dphi != 0.0 {
                            let scale = w_quad * dphi;
                            for k in 0..m {
                                rhs_e[i * m + k] += scale * scratch.tmp_flux[k];
                            }
                        }
                    }
                }
                let g_left = scratch.face_flux[e * m..(e + 1) * m].to_vec();
                let g_right = scratch.face_flux[(e + 1) * m..(e + 2) * m].to_vec();
                for k in 0..m {
                    rhs_e[k] += g_left[k];
                    rhs_e[(n - 1) * m + k] -= g_right[k];
                }
                for i in 0..n {
                    let scale = 1.0 / (h * basis.weights()[i]);
                    for k in 0..m {
                        rhs_e[i * m + k] *= scale;
                    }
                }
            }
        }
    }

    // Artificial viscosity: element-local dissipation with BR1-averaged
    // gradients; contributes nothing to element averages.
    if let Some(cfg) = av {
        apply_artificial_viscosity(model, mesh, basis, sol, cfg, scratch, rhs, &mut info)?;
    } else {
        scratch.av_nu.iter_mut().for_each(|v| *v = 0.0);
    }

    Ok(info)
}

/// Derivative of Lagrange basis function `j` at an arbitrary point.
fn lagrange_derivative(basis: &Basis, j: usize, x: Float) -> Float {
    // Differentiate the barycentric interpolant of the unit vector e_j.
    let nodes = basis.nodes();
    let n = nodes.len();
    // l_j(x) = prod_{k != j} (x - x_k) / (x_j - x_k);
    // l_j'(x) = l_j(x) * sum_{k != j} 1/(x - x_k) away from nodes.
    for (i, &xi) in nodes.iter().enumerate() {
        if (x - xi).abs() < 1e-14 {
            return basis.d(i, j);
        }
    }
    let mut lj = 1.0;
    for k in 0..n {
        if k != j {
            lj *= (x - nodes[k]) / (nodes[j] - nodes[k]);
        }
    }
    let s: Float = (0..n).filter(|&k| k != j).map(|k| 1.0 / (x - nodes[k])).sum();
    lj * s
}

fn apply_artificial_viscosity(
    model: &GasModel,
    mesh: &Mesh1D,
    basis: &Basis,
    sol: &Solution,
    cfg: &AvConfig,
    scratch: &mut DgScratch,
    rhs: &mut [Float],
    info: &mut AssemblyInfo,
) -> Result<(), DgError> {
    let n = sol.n_nodes;
    let m = sol.m;
    let ne = sol.n_elem;
    let h = mesh.h;
    let p = basis.degree();

    for e in 0..ne {
        // Strong-form convective residual d/dx F(y) at the nodes.
        let mut indicator: Float = 0.0;
        for i in 0..n {
            let mut res = vec![0.0; m];
            for j in 0..n {
                let d_ij = basis.d(i, j);
                if d_ij != 0.0 {
                    let fj = &scratch.nodal_flux[(e * n + j) * m..(e * n + j + 1) * m];
                    for k in 0..m {
                        res[k] += d_ij * fj[k] / h;
                    }
                }
            }
            // dT/dy . res / T at this node.
            let idx = e * n + i;
            let y = sol.node(e, i);
            let d = scratch.derived[idx];
            let c = &y[SPECIES..];
            let rho_cv = model.rho_cv_unchecked(c, d.t);
            let mut dot = -d.v * res[MOM] + res[ENER];
            for (i_sp, sp) in model.species().iter().enumerate() {
                let u_molar = sp.w * model.internal_energy_species(i_sp, d.t)?;
                dot += (0.5 * d.v * d.v * sp.w - u_molar) * res[SPECIES + i_sp];
            }
            indicator = indicator.max((dot / (rho_cv * d.t)).abs());
        }
        let s_av = if cfg.sensor {
            modal_decay_sensor(model, basis, sol, e)
        } else {
            0.0
        };
        let nu = (cfg.c_av + s_av) * h * h / (p as Float + 1.0) * indicator;
        scratch.av_nu[e] = nu;
        info.nu_max = info.nu_max.max(nu);
        if nu == 0.0 {
            continue;
        }

        // BR1 gradient: broken derivative plus face-average lift.
        for i in 0..n {
            for k in 0..m {
                let mut g = 0.0;
                for j in 0..n {
                    g += basis.d(i, j) * sol.node(e, j)[k];
                }
                scratch.grad[i * m + k] = g / h;
            }
        }
        {
            // Left face average {y} from the neighbor's right endpoint.
            let mut ghost = vec![0.0; m];
            let neighbor_l: &[Float] = if e == 0 {
                boundary_state(sol, mesh.bc, true, &mut ghost);
                &ghost
            } else {
                sol.node(e - 1, n - 1)
            };
            let w_1 = basis.weights()[0];
            for k in 0..m {
                let avg = 0.5 * (neighbor_l[k] + sol.node(e, 0)[k]);
                scratch.grad[k] -= (avg - sol.node(e, 0)[k]) / (h * w_1);
            }
            let mut ghost_r = vec![0.0; m];
            let neighbor_r: &[Float] = if e == ne - 1 {
                boundary_state(sol, mesh.bc, false, &mut ghost_r);
                &ghost_r
            } else {
                sol.node(e + 1, 0)
            };
            let w_n = basis.weights()[n - 1];
            for k in 0..m {
                let avg = 0.5 * (neighbor_r[k] + sol.node(e, n - 1)[k]);
                scratch.grad[(n - 1) * m + k] += (avg - sol.node(e, n - 1)[k]) / (h * w_n);
            }
        }
        // Dissipative volume term: dy_i -= (1/(h w_i)) sum_j w_j nu g_j D_ji.
        let rhs_e = &mut rhs[e * n * m..(e + 1) * n * m];
        for i in 0..n {
            let scale = 1.0 / (h * basis.weights()[i]);
            for j in 0..n {
                let d_ji = basis.d(j, i);
                if d_ji != 0.0 {
                    let coeff = basis.weights()[j] * nu * d_ji * scale;
                    for k in 0..m {
                        rhs_e[i * m + k] -= coeff * scratch.grad[j * m + k];
                    }
                }
            }
        }
    }
    Ok(())
}

/// Modal-decay shock sensor: fraction of the density's discrete Legendre
/// energy in the top mode, mapped smoothly to `[0, 1]`.
fn modal_decay_sensor(model: &GasModel, basis: &Basis, sol: &Solution, e: usize) -> Float {
    let n = sol.n_nodes;
    let p = basis.degree();
    if p == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut top = 0.0;
    for k in 0..=p {
        let mut c_k = 0.0;
        for j in 0..n {
            let rho = state::density(model, sol.node(e, j));
            c_k += basis.weights()[j] * rho * legendre_shifted(k, basis.nodes()[j]);
        }
        c_k *= 2.0 * k as Float + 1.0;
        let energy = c_k * c_k / (2.0 * k as Float + 1.0);
        total += energy;
        if k == p {
            top = energy;
        }
    }
    if total <= 0.0 {
        return 0.0;
    }
    let ratio = (top / total).max(1e-300);
    let x = ratio.log10();
    let s0 = -4.0 - 4.25 * (p as Float).log10();
    let kappa = 1.0;
    if x < s0 - kappa {
        0.0
    } else if x > s0 + kappa {
        1.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * (x - s0) / (2.0 * kappa)).sin())
    }
}
