//! Reaction rates, equilibrium constants, species production rates, and the
//! chemical source term.
//!
//! Rate parameters are in SI-kmol units: concentrations in kmol/m^3, rate
//! constants in the matching m^3/kmol powers, activation energies in J/kmol.
//! Reverse rates of reversible reactions come from the equilibrium constant,
//! which ties the kinetics to the thermodynamic data and makes the chemical
//! entropy production nonpositive.

use thiserror::Error;

use crate::state::{ENER, MOM, SPECIES};
use crate::thermo::{GasModel, ThermoError, P_REF, R0};
use crate::Float;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KineticsError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
}

/// Modified Arrhenius parameters `k = A T^b exp(-E / (R0 T))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrheniusRate {
    pub a: Float,
    pub b: Float,
    /// Activation energy [J/kmol], nonnegative.
    pub e: Float,
}

impl ArrheniusRate {
    #[inline]
    pub fn eval(&self, t: Float) -> Float {
        let mut k = self.a;
        if self.b != 0.0 {
            k *= t.powf(self.b);
        }
        if self.e != 0.0 {
            k *= (-self.e / (R0 * t)).exp();
        }
        k
    }
}

/// Blending function for pressure-dependent reactions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FalloffBlend {
    Lindemann,
    Troe {
        alpha: Float,
        t3: Float,
        t1: Float,
        t2: Option<Float>,
    },
}

impl FalloffBlend {
    /// Broadening factor `F(T, P_r)`.
    pub fn factor(&self, t: Float, pr: Float) -> Float {
        match *self {
            FalloffBlend::Lindemann => 1.0,
            FalloffBlend::Troe { alpha, t3, t1, t2 } => {
                let fcent = (1.0 - alpha) * (-t / t3).exp()
                    + alpha * (-t / t1).exp()
                    + t2.map_or(0.0, |v| (-v / t).exp());
                let log_fc = fcent.max(1e-300).log10();
                if log_fc == 0.0 {
                    return 1.0;
                }
                let c1 = -0.4 - 0.67 * log_fc;
                let c2 = 0.75 - 1.27 * log_fc;
                let c3 = 0.14;
                let log_pr = pr.max(1e-300).log10();
                let x = (log_pr + c1) / (c2 - c3 * (log_pr + c1));
                let log_f = log_fc / (1.0 + x * x);
                (10.0 as Float).powf(log_f)
            }
        }
    }
}

/// Rate-law variants.
#[derive(Debug, Clone, PartialEq)]
pub enum RateLaw {
    Arrhenius(ArrheniusRate),
    /// Rate of progress is scaled by the collider sum `sum alpha_i C_i`.
    ThreeBody {
        rate: ArrheniusRate,
        /// Dense per-species efficiencies (default 1.0).
        efficiencies: Vec<Float>,
    },
    /// Unimolecular/recombination falloff: `k = k_inf (P_r/(1+P_r)) F`.
    Falloff {
        low: ArrheniusRate,
        high: ArrheniusRate,
        efficiencies: Vec<Float>,
        blend: FalloffBlend,
    },
    /// Chemically activated bimolecular: `k = k_0 (1/(1+P_r)) F`.
    ChemicallyActivated {
        low: ArrheniusRate,
        high: ArrheniusRate,
        efficiencies: Vec<Float>,
        blend: FalloffBlend,
    },
}

impl RateLaw {
    fn efficiencies(&self) -> Option<&[Float]> {
        match self {
            RateLaw::Arrhenius(_) => None,
            RateLaw::ThreeBody { efficiencies, .. }
            | RateLaw::Falloff { efficiencies, .. }
            | RateLaw::ChemicallyActivated { efficiencies, .. } => Some(efficiencies),
        }
    }
}

/// A single (possibly reversible) reaction with sparse stoichiometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    /// Canonical equation text, kept for diagnostics and serialization.
    pub equation: String,
    /// Forward stoichiometric coefficients (species index, nu).
    pub nu_f: Vec<(usize, Float)>,
    /// Reverse stoichiometric coefficients.
    pub nu_r: Vec<(usize, Float)>,
    pub reversible: bool,
    pub rate: RateLaw,
    /// Hard-coded reverse rate. Overrides the equilibrium-constant route and
    /// in general breaks the entropy-production sign guarantee.
    pub explicit_reverse: Option<ArrheniusRate>,
    /// Net coefficients `nu_r - nu_f`, sparse.
    pub nu_net: Vec<(usize, Float)>,
    /// `sum_i nu_i` for the equilibrium-constant pressure factor.
    pub sum_nu: Float,
}

impl Reaction {
    pub fn new(
        equation: impl Into<String>,
        nu_f: Vec<(usize, Float)>,
        nu_r: Vec<(usize, Float)>,
        reversible: bool,
        rate: RateLaw,
    ) -> Self {
        let mut net: Vec<(usize, Float)> = Vec::new();
        for &(i, nu) in &nu_r {
            net.push((i, nu));
        }
        for &(i, nu) in &nu_f {
            if let Some(entry) = net.iter_mut().find(|(j, _)| *j == i) {
                entry.1 -= nu;
            } else {
                net.push((i, -nu));
            }
        }
        net.retain(|&(_, nu)| nu != 0.0);
        net.sort_by_key(|&(i, _)| i);
        let sum_nu = net.iter().map(|&(_, nu)| nu).sum();
        Self {
            equation: equation.into(),
            nu_f,
            nu_r,
            reversible,
            rate,
            explicit_reverse: None,
            nu_net: net,
            sum_nu,
        }
    }

    pub fn with_explicit_reverse(mut self, rate: ArrheniusRate) -> Self {
        self.explicit_reverse = Some(rate);
        self
    }
}

/// A reaction set over a fixed species ordering.
#[derive(Debug, Clone, Default)]
pub struct Mechanism {
    pub reactions: Vec<Reaction>,
}

impl Mechanism {
    pub fn n_reactions(&self) -> usize {
        self.reactions.len()
    }
}

/// Reusable per-thread buffers for rate evaluation.
#[derive(Debug, Clone)]
pub struct KineticsScratch {
    molar_h: Vec<Float>,
    molar_s0: Vec<Float>,
}

impl KineticsScratch {
    pub fn new(ns: usize) -> Self {
        Self {
            molar_h: vec![0.0; ns],
            molar_s0: vec![0.0; ns],
        }
    }
}

/// `c^nu` with the `0^0 = 1` convention and fast paths for small integers.
#[inline]
fn cpow(c: Float, nu: Float) -> Float {
    if nu == 0.0 {
        1.0
    } else if nu == 1.0 {
        c
    } else if nu == 2.0 {
        c * c
    } else if c == 0.0 {
        0.0
    } else if nu.fract() == 0.0 && nu.abs() <= 8.0 {
        c.powi(nu as i32)
    } else {
        c.powf(nu)
    }
}

#[inline]
fn collider_sum(efficiencies: &[Float], c: &[Float]) -> Float {
    efficiencies
        .iter()
        .zip(c)
        .map(|(&a, &ci)| a * ci)
        .sum()
}

/// Forward rate constant, including the pressure-dependence machinery for
/// falloff and chemically activated reactions. Three-body reactions return
/// the bare Arrhenius value; the collider sum enters the rate of progress.
pub fn forward_rate(rxn: &Reaction, t: Float, c: &[Float]) -> Float {
    match &rxn.rate {
        RateLaw::Arrhenius(rate) | RateLaw::ThreeBody { rate, .. } => rate.eval(t),
        RateLaw::Falloff {
            low,
            high,
            efficiencies,
            blend,
        } => {
            let k0 = low.eval(t);
            let kinf = high.eval(t);
            let pr = k0 / kinf * collider_sum(efficiencies, c);
            kinf * (pr / (1.0 + pr)) * blend.factor(t, pr)
        }
        RateLaw::ChemicallyActivated {
            low,
            high,
            efficiencies,
            blend,
        } => {
            let k0 = low.eval(t);
            let kinf = high.eval(t);
            let pr = k0 / kinf * collider_sum(efficiencies, c);
            k0 * (1.0 / (1.0 + pr)) * blend.factor(t, pr)
        }
    }
}

/// Equilibrium constant
/// `K_e = exp(-dG'/(R0 T)) (P_ref/(R0 T))^{sum nu}` in concentration units.
pub fn equilibrium_constant(
    model: &GasModel,
    rxn: &Reaction,
    t: Float,
) -> Result<Float, KineticsError> {
    let ns = model.n_species();
    let mut scratch = KineticsScratch::new(ns);
    model.molar_h_s0_into(t, &mut scratch.molar_h, &mut scratch.molar_s0)?;
    Ok(equilibrium_constant_cached(rxn, t, &scratch))
}

#[inline]
fn equilibrium_constant_cached(rxn: &Reaction, t: Float, scratch: &KineticsScratch) -> Float {
    let mut dg = 0.0;
    for &(i, nu) in &rxn.nu_net {
        dg += nu * (scratch.molar_h[i] - t * scratch.molar_s0[i]);
    }
    (-dg / (R0 * t)).exp() * cpow(P_REF / (R0 * t), rxn.sum_nu)
}

/// Equilibrium constant through the reduced potentials,
/// `K_e = exp(-sum nu_i W_i mu_i^u)`; requires positive concentrations.
///
/// Algebraically equal to [`equilibrium_constant`]; kept as a second route.
pub fn equilibrium_constant_via_potentials(
    model: &GasModel,
    rxn: &Reaction,
    c: &[Float],
    t: Float,
) -> Result<Float, KineticsError> {
    let pots = model.gibbs_and_potentials(c, t)?;
    let mut acc = 0.0;
    for &(i, nu) in &rxn.nu_net {
        acc += nu * model.species()[i].w * pots.mu_u[i];
    }
    Ok((-acc).exp())
}

/// Rate of progress `q_j` of one reaction [kmol/(m^3 s)].
pub fn rate_of_progress(
    model: &GasModel,
    rxn: &Reaction,
    c: &[Float],
    t: Float,
) -> Result<Float, KineticsError> {
    let ns = model.n_species();
    let mut scratch = KineticsScratch::new(ns);
    model.molar_h_s0_into(t, &mut scratch.molar_h, &mut scratch.molar_s0)?;
    Ok(rate_of_progress_cached(rxn, c, t, &scratch))
}

fn rate_of_progress_cached(
    rxn: &Reaction,
    c: &[Float],
    t: Float,
    scratch: &KineticsScratch,
) -> Float {
    let kf = forward_rate(rxn, t, c);
    let mut fwd = kf;
    for &(i, nu) in &rxn.nu_f {
        fwd *= cpow(c[i], nu);
    }
    let mut q = fwd;
    let kr = if let Some(rev) = &rxn.explicit_reverse {
        Some(rev.eval(t))
    } else if rxn.reversible {
        Some(kf / equilibrium_constant_cached(rxn, t, scratch))
    } else {
        None
    };
    if let Some(kr) = kr {
        let mut bwd = kr;
        for &(i, nu) in &rxn.nu_r {
            bwd *= cpow(c[i], nu);
        }
        q -= bwd;
    }
    if let RateLaw::ThreeBody { efficiencies, .. } = &rxn.rate {
        q *= collider_sum(efficiencies, c);
    }
    q
}

/// Species production rates `omega_i = sum_j nu_ij q_j` [kmol/(m^3 s)].
pub fn production_rates(
    model: &GasModel,
    mech: &Mechanism,
    c: &[Float],
    t: Float,
    scratch: &mut KineticsScratch,
    omega: &mut [Float],
) -> Result<(), KineticsError> {
    model.molar_h_s0_into(t, &mut scratch.molar_h, &mut scratch.molar_s0)?;
    omega.iter_mut().for_each(|w| *w = 0.0);
    for rxn in &mech.reactions {
        let q = rate_of_progress_cached(rxn, c, t, scratch);
        for &(i, nu) in &rxn.nu_net {
            omega[i] += nu * q;
        }
    }
    Ok(())
}

/// Chemical source term `S(y) = (0, 0, omega_1, ..., omega_ns)` for a
/// conservative state; momentum and total-energy components are exactly zero.
pub fn source_term(
    model: &GasModel,
    mech: &Mechanism,
    y: &[Float],
    t_guess: Option<Float>,
    scratch: &mut KineticsScratch,
    out: &mut [Float],
) -> Result<(), KineticsError> {
    let c = &y[SPECIES..];
    let rho = model.density(c);
    let rho_u = y[ENER] - 0.5 * y[MOM] * y[MOM] / rho;
    let t = model.temperature_from_energy(c, rho_u, t_guess)?;
    out[MOM] = 0.0;
    out[ENER] = 0.0;
    let (head, tail) = out.split_at_mut(SPECIES);
    debug_assert_eq!(head.len(), SPECIES);
    production_rates(model, mech, c, t, scratch, tail)
}

/// Signed chemical entropy production `sum_i W_i omega_i g_i / T`; for
/// mechanisms whose reverse rates come from the equilibrium constant this is
/// nonpositive. Species with zero concentration are skipped (their
/// contribution through `rho s` follows the `0 log 0 = 0` convention).
pub fn entropy_production(
    model: &GasModel,
    mech: &Mechanism,
    c: &[Float],
    t: Float,
    scratch: &mut KineticsScratch,
) -> Result<Float, KineticsError> {
    let ns = model.n_species();
    let mut omega = vec![0.0; ns];
    production_rates(model, mech, c, t, scratch, &mut omega)?;
    let mut acc = 0.0;
    for i in 0..ns {
        if c[i] > 0.0 {
            let h = model.enthalpy_species(i, t)?;
            let s = model.entropy_species(i, t, c[i])?;
            acc += model.species()[i].w * omega[i] * (h - t * s) / t;
        }
    }
    Ok(acc)
}

/// Scale for judging the entropy-production sign numerically:
/// `sum_i |W_i omega_i g_i / T|`.
pub fn entropy_production_scale(
    model: &GasModel,
    mech: &Mechanism,
    c: &[Float],
    t: Float,
    scratch: &mut KineticsScratch,
) -> Result<Float, KineticsError> {
    let ns = model.n_species();
    let mut omega = vec![0.0; ns];
    production_rates(model, mech, c, t, scratch, &mut omega)?;
    let mut acc = 0.0;
    for i in 0..ns {
        if c[i] > 0.0 {
            let h = model.enthalpy_species(i, t)?;
            let s = model.entropy_species(i, t, c[i])?;
            acc += (model.species()[i].w * omega[i] * (h - t * s) / t).abs();
        }
    }
    Ok(acc)
}
