//! Thermally perfect gas thermodynamics from NASA-7 polynomials.
//!
//! Species store the dimensionless 7-coefficient fits per temperature range;
//! mass-specific polynomial coefficients for `cp`, `u`, and `s^o` are cached
//! at construction. Mixture properties are mass-weighted sums over species,
//! with the `0 log 0 = 0` convention for absent species in `rho s`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::Float;

/// Universal gas constant [J/(kmol K)].
pub const R0: Float = 8314.4621;
/// Reference temperature [K].
pub const T_REF: Float = 298.15;
/// Reference pressure, 1 atm [Pa].
pub const P_REF: Float = 101325.0;

/// Reference concentration `P_ref / (R0 T_ref)` [kmol/m^3].
pub fn c_ref() -> Float {
    P_REF / (R0 * T_REF)
}

/// Concentrations below this are treated as exactly zero in `rho s`
/// to avoid log underflow.
pub const CONC_ZERO: Float = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("temperature {t} K outside valid range [{lo}, {hi}] K (species {species})")]
    TemperatureOutOfRange {
        species: String,
        t: Float,
        lo: Float,
        hi: Float,
    },
    #[error("mixture has no species with positive concentration")]
    EmptyMixture,
    #[error("temperature inversion: target {target} J/m^3 at or below the shifted floor {floor}")]
    NoBracket { target: Float, floor: Float },
    #[error("temperature inversion did not converge within {0} iterations")]
    MaxIterations(usize),
    #[error("species {0} has zero concentration; reduced potential undefined")]
    ZeroConcentration(String),
}

/// Gas-model construction failures (raised at load time).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("duplicate species {0}")]
    DuplicateSpecies(String),
    #[error("species {0}: no thermodynamic ranges")]
    NoRanges(String),
    #[error("species {species}: ranges not contiguous at {t} K")]
    RangesNotContiguous { species: String, t: Float },
    #[error("species {species}: {what} discontinuous at {t} K (relative mismatch {rel:e})")]
    Discontinuous {
        species: String,
        what: &'static str,
        t: Float,
        rel: Float,
    },
    #[error("species {species}: cp <= R at {t} K (cv must be positive)")]
    NonpositiveCv { species: String, t: Float },
    #[error("species {species}: shifted internal energy not positive at {t} K")]
    NonpositiveShiftedEnergy { species: String, t: Float },
    #[error("model must contain at least one species")]
    Empty,
}

/// Out-of-range temperature handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RangePolicy {
    /// Hard error outside the covered range.
    #[default]
    Strict,
    /// Evaluate at the clamped temperature and count the event.
    Clamp,
}

/// One temperature range of a NASA-7 fit, with cached mass-specific
/// polynomial coefficients.
#[derive(Debug, Clone)]
pub struct NasaRange {
    pub t_lo: Float,
    pub t_hi: Float,
    /// Dimensionless NASA-7 coefficients `a1..a7`.
    pub a: [Float; 7],
    /// `cp_i(T) = sum_k cp[k] T^k` [J/(kg K)].
    cp: [Float; 5],
    /// `u_i(T) = sum_k u[k] T^k` [J/kg]; `u[0]` is the integration constant.
    u: [Float; 6],
    /// `s_i^o(T) = s_ln ln T + sum_k s_poly[k] T^{k+1} + s_const` [J/(kg K)].
    s_ln: Float,
    s_poly: [Float; 4],
    s_const: Float,
}

impl NasaRange {
    fn new(t_lo: Float, t_hi: Float, a: [Float; 7], r_i: Float) -> Self {
        let cp = [a[0] * r_i, a[1] * r_i, a[2] * r_i, a[3] * r_i, a[4] * r_i];
        let u = [
            a[5] * r_i,
            (a[0] - 1.0) * r_i,
            a[1] / 2.0 * r_i,
            a[2] / 3.0 * r_i,
            a[3] / 4.0 * r_i,
            a[4] / 5.0 * r_i,
        ];
        let s_ln = a[0] * r_i;
        let s_poly = [
            a[1] * r_i,
            a[2] / 2.0 * r_i,
            a[3] / 3.0 * r_i,
            a[4] / 4.0 * r_i,
        ];
        let s_const = a[6] * r_i;
        Self {
            t_lo,
            t_hi,
            a,
            cp,
            u,
            s_ln,
            s_poly,
            s_const,
        }
    }

    #[inline]
    pub fn cp(&self, t: Float) -> Float {
        let c = &self.cp;
        c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])))
    }

    #[inline]
    pub fn internal_energy(&self, t: Float) -> Float {
        let c = &self.u;
        c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))))
    }

    /// Species entropy at the reference pressure.
    #[inline]
    pub fn entropy_ref(&self, t: Float) -> Float {
        let c = &self.s_poly;
        self.s_ln * t.ln() + t * (c[0] + t * (c[1] + t * (c[2] + t * c[3]))) + self.s_const
    }

    /// Coefficients of the mass-specific internal-energy polynomial
    /// `u_i(T) = sum_{k=0}^{5} b_k T^k`.
    #[inline]
    pub fn energy_poly(&self) -> &[Float; 6] {
        &self.u
    }
}

/// Species thermodynamic data.
#[derive(Debug, Clone)]
pub struct SpeciesThermo {
    pub name: String,
    /// Molecular weight [kg/kmol].
    pub w: Float,
    /// Element -> atom count.
    pub composition: Vec<(String, Float)>,
    pub ranges: Vec<NasaRange>,
    r_i: Float,
    /// Integration constant of the lowest range; the shifted internal
    /// energy subtracts this per unit partial density.
    u_floor: Float,
}

impl SpeciesThermo {
    /// Builds a species from dimensionless NASA-7 coefficients per range.
    ///
    /// Ranges must be ordered and contiguous.
    pub fn new(
        name: impl Into<String>,
        w: Float,
        composition: Vec<(String, Float)>,
        ranges: Vec<(Float, Float, [Float; 7])>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if ranges.is_empty() {
            return Err(ModelError::NoRanges(name));
        }
        let r_i = R0 / w;
        let built: Vec<NasaRange> = ranges
            .into_iter()
            .map(|(lo, hi, a)| NasaRange::new(lo, hi, a, r_i))
            .collect();
        for k in 1..built.len() {
            if (built[k].t_lo - built[k - 1].t_hi).abs() > 1e-9 * built[k].t_lo.abs() {
                return Err(ModelError::RangesNotContiguous {
                    species: name,
                    t: built[k].t_lo,
                });
            }
        }
        let u_floor = built[0].u[0];
        Ok(Self {
            name,
            w,
            composition,
            ranges: built,
            r_i,
            u_floor,
        })
    }

    /// Specific gas constant `R0 / W_i` [J/(kg K)].
    #[inline]
    pub fn r_specific(&self) -> Float {
        self.r_i
    }

    /// Integration constant `b_{i0}` subtracted by the shifted internal energy.
    #[inline]
    pub fn energy_shift(&self) -> Float {
        self.u_floor
    }

    #[inline]
    pub fn t_min(&self) -> Float {
        self.ranges[0].t_lo
    }

    #[inline]
    pub fn t_max(&self) -> Float {
        self.ranges[self.ranges.len() - 1].t_hi
    }

    /// Index of the range containing `t` (clamped to the outermost ranges).
    #[inline]
    pub fn range_index(&self, t: Float) -> usize {
        let n = self.ranges.len();
        for (k, r) in self.ranges.iter().enumerate() {
            if t <= r.t_hi || k == n - 1 {
                return k;
            }
        }
        unreachable!()
    }

    fn atoms_of(&self, element: &str) -> Float {
        self.composition
            .iter()
            .find(|(e, _)| e == element)
            .map(|(_, n)| *n)
            .unwrap_or(0.0)
    }
}

/// Mixture-level property bundle returned by [`GasModel::mixture_props`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureProps {
    /// Density [kg/m^3].
    pub rho: Float,
    /// Mass-specific internal energy [J/kg].
    pub u: Float,
    /// Mass-specific enthalpy [J/kg].
    pub h: Float,
    /// Mass-specific entropy [J/(kg K)].
    pub s: Float,
    pub cp: Float,
    pub cv: Float,
    pub gamma: Float,
}

/// Per-species Gibbs data from [`GasModel::gibbs_and_potentials`].
#[derive(Debug, Clone)]
pub struct GibbsPotentials {
    /// Mass-specific Gibbs function `g_i = h_i - T s_i` [J/kg].
    pub g: Vec<Float>,
    /// Reduced potential `mu_i = g_i / (R0 T)`.
    pub mu: Vec<Float>,
    /// `mu_i^u = mu_i - (1/W_i) ln C_i`; independent of `C_i`.
    pub mu_u: Vec<Float>,
}

/// Immutable thermodynamic model for a gas mixture.
#[derive(Debug)]
pub struct GasModel {
    species: Vec<SpeciesThermo>,
    index: HashMap<String, usize>,
    /// Ordered list of chemical elements appearing in the species.
    elements: Vec<String>,
    /// `atoms[e * ns + i]` = atoms of element `e` in species `i`.
    atoms: Vec<Float>,
    /// Intersection of all species temperature windows.
    t_min: Float,
    t_max: Float,
    policy: RangePolicy,
    clamp_events: AtomicU64,
}

impl Clone for GasModel {
    fn clone(&self) -> Self {
        Self {
            species: self.species.clone(),
            index: self.index.clone(),
            elements: self.elements.clone(),
            atoms: self.atoms.clone(),
            t_min: self.t_min,
            t_max: self.t_max,
            policy: self.policy,
            clamp_events: AtomicU64::new(self.clamp_events.load(Ordering::Relaxed)),
        }
    }
}

impl GasModel {
    /// Builds and validates a model: unique names, contiguous ranges,
    /// property continuity at range junctions (1e-6 relative), positive `cv`
    /// and positive shifted internal energy sampled over the covered window.
    pub fn new(species: Vec<SpeciesThermo>) -> Result<Self, ModelError> {
        if species.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut index = HashMap::new();
        for (i, sp) in species.iter().enumerate() {
            if index.insert(sp.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateSpecies(sp.name.clone()));
            }
        }
        for sp in &species {
            validate_species(sp)?;
        }
        let mut elements: Vec<String> = Vec::new();
        for sp in &species {
            for (e, _) in &sp.composition {
                if !elements.contains(e) {
                    elements.push(e.clone());
                }
            }
        }
        let ns = species.len();
        let mut atoms = vec![0.0; elements.len() * ns];
        for (e_idx, e) in elements.iter().enumerate() {
            for (i, sp) in species.iter().enumerate() {
                atoms[e_idx * ns + i] = sp.atoms_of(e);
            }
        }
        let t_min = species
            .iter()
            .map(|s| s.t_min())
            .fold(Float::MIN, Float::max);
        let t_max = species
            .iter()
            .map(|s| s.t_max())
            .fold(Float::MAX, Float::min);
        Ok(Self {
            species,
            index,
            elements,
            atoms,
            t_min,
            t_max,
            policy: RangePolicy::Strict,
            clamp_events: AtomicU64::new(0),
        })
    }

    pub fn with_policy(mut self, policy: RangePolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn policy(&self) -> RangePolicy {
        self.policy
    }

    /// Number of clamp events recorded under [`RangePolicy::Clamp`].
    pub fn clamp_events(&self) -> u64 {
        self.clamp_events.load(Ordering::Relaxed)
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    pub fn species(&self) -> &[SpeciesThermo] {
        &self.species
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    /// Atoms of element `e` (by index) in species `i`.
    #[inline]
    pub fn atom_count(&self, e: usize, i: usize) -> Float {
        self.atoms[e * self.species.len() + i]
    }

    /// Common temperature window of all species.
    pub fn t_window(&self) -> (Float, Float) {
        (self.t_min, self.t_max)
    }

    /// Clamps `t` into the covered window according to the range policy.
    #[inline]
    fn admit_t(&self, t: Float, species: usize) -> Result<Float, ThermoError> {
        if t >= self.t_min && t <= self.t_max {
            return Ok(t);
        }
        match self.policy {
            RangePolicy::Clamp => {
                self.clamp_events.fetch_add(1, Ordering::Relaxed);
                Ok(t.clamp(self.t_min, self.t_max))
            }
            RangePolicy::Strict => Err(ThermoError::TemperatureOutOfRange {
                species: self.species[species].name.clone(),
                t,
                lo: self.t_min,
                hi: self.t_max,
            }),
        }
    }

    /// Mass-specific heat at constant pressure of species `i` [J/(kg K)].
    pub fn cp_species(&self, i: usize, t: Float) -> Result<Float, ThermoError> {
        let t = self.admit_t(t, i)?;
        let sp = &self.species[i];
        Ok(sp.ranges[sp.range_index(t)].cp(t))
    }

    /// `cv_i = cp_i - R_i` [J/(kg K)].
    pub fn cv_species(&self, i: usize, t: Float) -> Result<Float, ThermoError> {
        Ok(self.cp_species(i, t)? - self.species[i].r_i)
    }

    /// Mass-specific internal energy of species `i` [J/kg].
    pub fn internal_energy_species(&self, i: usize, t: Float) -> Result<Float, ThermoError> {
        let t = self.admit_t(t, i)?;
        let sp = &self.species[i];
        Ok(sp.ranges[sp.range_index(t)].internal_energy(t))
    }

    /// Mass-specific enthalpy `h_i = u_i + R_i T` [J/kg].
    pub fn enthalpy_species(&self, i: usize, t: Float) -> Result<Float, ThermoError> {
        Ok(self.internal_energy_species(i, t)? + self.species[i].r_i * t)
    }

    /// Species entropy at reference pressure, `s_i^o(T)` [J/(kg K)].
    pub fn entropy_ref_species(&self, i: usize, t: Float) -> Result<Float, ThermoError> {
        let t = self.admit_t(t, i)?;
        let sp = &self.species[i];
        Ok(sp.ranges[sp.range_index(t)].entropy_ref(t))
    }

    /// Species entropy `s_i = s_i^o - R_i log(P_i / P_ref)` with partial
    /// pressure `P_i = C_i R0 T` [J/(kg K)].
    ///
    /// For `C_i = 0` returns `s_i^o(T)`; the value is only ever consumed
    /// through `rho_i s_i` where the `0 log 0 = 0` convention applies.
    pub fn entropy_species(&self, i: usize, t: Float, c_i: Float) -> Result<Float, ThermoError> {
        let s0 = self.entropy_ref_species(i, t)?;
        if c_i <= CONC_ZERO {
            return Ok(s0);
        }
        let p_i = c_i * R0 * t;
        Ok(s0 - self.species[i].r_i * (p_i / P_REF).ln())
    }

    /// The concentration form of the species entropy,
    /// `s_ref^o + int cv/tau - R_i log(C_i / C_ref)`.
    ///
    /// Algebraically identical to [`Self::entropy_species`]; kept as an
    /// independent evaluation route.
    pub fn entropy_species_concentration_form(
        &self,
        i: usize,
        t: Float,
        c_i: Float,
    ) -> Result<Float, ThermoError> {
        let s0 = self.entropy_ref_species(i, t)?;
        if c_i <= CONC_ZERO {
            return Ok(s0);
        }
        let r_i = self.species[i].r_i;
        Ok(s0 - r_i * (t / T_REF).ln() - r_i * (c_i / c_ref()).ln())
    }

    /// Mixture pressure `P = R0 T sum C_i` [Pa].
    #[inline]
    pub fn pressure(&self, c: &[Float], t: Float) -> Float {
        R0 * t * c.iter().sum::<Float>()
    }

    /// Mixture density `rho = sum W_i C_i` [kg/m^3].
    #[inline]
    pub fn density(&self, c: &[Float]) -> Float {
        c.iter()
            .zip(&self.species)
            .map(|(&ci, sp)| ci * sp.w)
            .sum()
    }

    /// Volumetric internal energy `rho u = sum W_i C_i u_i(T)` [J/m^3].
    pub fn rho_u(&self, c: &[Float], t: Float) -> Result<Float, ThermoError> {
        let t0 = self.admit_t(t, 0)?;
        Ok(self.rho_u_unchecked(c, t0))
    }

    #[inline]
    pub(crate) fn rho_u_unchecked(&self, c: &[Float], t: Float) -> Float {
        let mut acc = 0.0;
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0.0 {
                let sp = &self.species[i];
                acc += ci * sp.w * sp.ranges[sp.range_index(t)].internal_energy(t);
            }
        }
        acc
    }

    /// Volumetric heat capacity `rho cv = sum W_i C_i cv_i(T)` [J/(m^3 K)].
    #[inline]
    pub(crate) fn rho_cv_unchecked(&self, c: &[Float], t: Float) -> Float {
        let mut acc = 0.0;
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0.0 {
                let sp = &self.species[i];
                acc += ci * sp.w * (sp.ranges[sp.range_index(t)].cp(t) - sp.r_i);
            }
        }
        acc
    }

    /// Volumetric entropy `rho s = sum W_i C_i s_i` with `0 log 0 = 0`
    /// [J/(m^3 K)].
    pub fn rho_s(&self, c: &[Float], t: Float) -> Result<Float, ThermoError> {
        let t = self.admit_t(t, 0)?;
        let mut acc = 0.0;
        for (i, &ci) in c.iter().enumerate() {
            if ci > CONC_ZERO {
                let sp = &self.species[i];
                let s0 = sp.ranges[sp.range_index(t)].entropy_ref(t);
                let s = s0 - sp.r_i * (ci * R0 * t / P_REF).ln();
                acc += ci * sp.w * s;
            }
        }
        Ok(acc)
    }

    /// Shifted volumetric internal energy `rho u* = rho u - sum rho_i b_{i0}`
    /// [J/m^3]; positive iff `T > 0`.
    pub fn shifted_internal_energy(&self, c: &[Float], t: Float) -> Result<Float, ThermoError> {
        Ok(self.rho_u(c, t)? - self.energy_floor(c))
    }

    /// The linear part `sum rho_i b_{i0}` subtracted by the shifted energy.
    #[inline]
    pub fn energy_floor(&self, c: &[Float]) -> Float {
        c.iter()
            .zip(&self.species)
            .map(|(&ci, sp)| ci * sp.w * sp.u_floor)
            .sum()
    }

    /// Inverts `rho u(C, T) = rho_u_target` for `T`.
    ///
    /// Newton iteration from `guess` (or 1000 K) with a 200 K step cap and
    /// bisection fallback on the covered window; the residual is monotone
    /// because `cv > 0`.
    pub fn temperature_from_energy(
        &self,
        c: &[Float],
        rho_u_target: Float,
        guess: Option<Float>,
    ) -> Result<Float, ThermoError> {
        const MAX_ITER: usize = 100;
        let floor = self.energy_floor(c);
        if rho_u_target <= floor {
            return Err(ThermoError::NoBracket {
                target: rho_u_target,
                floor,
            });
        }
        if self.density(c) <= 0.0 {
            return Err(ThermoError::EmptyMixture);
        }
        let tol = 1e-10 * rho_u_target.abs().max(1e-3);
        let (mut lo, mut hi) = (self.t_min, self.t_max);
        let f_lo = self.rho_u_unchecked(c, lo) - rho_u_target;
        if f_lo > 0.0 {
            if f_lo <= tol {
                return Ok(lo);
            }
            return match self.policy {
                RangePolicy::Clamp => {
                    self.clamp_events.fetch_add(1, Ordering::Relaxed);
                    Ok(lo)
                }
                RangePolicy::Strict => Err(ThermoError::TemperatureOutOfRange {
                    species: String::from("mixture"),
                    t: lo,
                    lo: self.t_min,
                    hi: self.t_max,
                }),
            };
        }
        let f_hi = self.rho_u_unchecked(c, hi) - rho_u_target;
        if f_hi < 0.0 {
            if -f_hi <= tol {
                return Ok(hi);
            }
            return match self.policy {
                RangePolicy::Clamp => {
                    self.clamp_events.fetch_add(1, Ordering::Relaxed);
                    Ok(hi)
                }
                RangePolicy::Strict => Err(ThermoError::TemperatureOutOfRange {
                    species: String::from("mixture"),
                    t: hi,
                    lo: self.t_min,
                    hi: self.t_max,
                }),
            };
        }
        let mut t = guess.unwrap_or(1000.0).clamp(lo, hi);
        for _ in 0..MAX_ITER {
            let f = self.rho_u_unchecked(c, t) - rho_u_target;
            if f.abs() <= tol {
                return Ok(t);
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let dfdt = self.rho_cv_unchecked(c, t);
            let mut step = -f / dfdt;
            if step.abs() > 200.0 {
                step = 200.0 * step.signum();
            }
            let mut t_next = t + step;
            if !(t_next > lo && t_next < hi) {
                t_next = 0.5 * (lo + hi);
            }
            if (t_next - t).abs() <= 1e-13 * t.max(1.0) {
                return Ok(t_next);
            }
            t = t_next;
        }
        Err(ThermoError::MaxIterations(MAX_ITER))
    }

    /// Mass-weighted mixture properties at `(C, T)`.
    pub fn mixture_props(&self, c: &[Float], t: Float) -> Result<MixtureProps, ThermoError> {
        let rho = self.density(c);
        if rho <= 0.0 {
            return Err(ThermoError::EmptyMixture);
        }
        let t = self.admit_t(t, 0)?;
        let mut rho_u = 0.0;
        let mut rho_cp = 0.0;
        let mut r_mix = 0.0;
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0.0 {
                let sp = &self.species[i];
                let rg = &sp.ranges[sp.range_index(t)];
                let w_ci = ci * sp.w;
                rho_u += w_ci * rg.internal_energy(t);
                rho_cp += w_ci * rg.cp(t);
                r_mix += w_ci * sp.r_i;
            }
        }
        let rho_s = self.rho_s(c, t)?;
        let cp = rho_cp / rho;
        let cv = cp - r_mix / rho;
        let u = rho_u / rho;
        Ok(MixtureProps {
            rho,
            u,
            h: u + r_mix / rho * t,
            s: rho_s / rho,
            cp,
            cv,
            gamma: cp / cv,
        })
    }

    /// Frozen sound speed `c = sqrt(gamma P / rho)` [m/s].
    pub fn sound_speed(&self, c: &[Float], t: Float) -> Result<Float, ThermoError> {
        let props = self.mixture_props(c, t)?;
        let p = self.pressure(c, t);
        Ok((props.gamma * p / props.rho).sqrt())
    }

    /// Per-species Gibbs function and reduced chemical potentials.
    ///
    /// `mu_i^u` requires `C_i > 0`.
    pub fn gibbs_and_potentials(
        &self,
        c: &[Float],
        t: Float,
    ) -> Result<GibbsPotentials, ThermoError> {
        let ns = self.species.len();
        let mut g = vec![0.0; ns];
        let mut mu = vec![0.0; ns];
        let mut mu_u = vec![0.0; ns];
        for i in 0..ns {
            if c[i] <= 0.0 {
                return Err(ThermoError::ZeroConcentration(self.species[i].name.clone()));
            }
            let h = self.enthalpy_species(i, t)?;
            let s = self.entropy_species(i, t, c[i])?;
            g[i] = gibbs_from(h, s, t);
            mu[i] = g[i] / (R0 * t);
            mu_u[i] = mu[i] - (c[i].ln()) / self.species[i].w;
        }
        Ok(GibbsPotentials { g, mu, mu_u })
    }

    /// Molar reference-state enthalpy and entropy (`W_i h_i`, `W_i s_i^o`)
    /// for all species, written into the provided slices.
    pub(crate) fn molar_h_s0_into(
        &self,
        t: Float,
        h_out: &mut [Float],
        s_out: &mut [Float],
    ) -> Result<(), ThermoError> {
        let t = self.admit_t(t, 0)?;
        for (i, sp) in self.species.iter().enumerate() {
            let rg = &sp.ranges[sp.range_index(t)];
            h_out[i] = sp.w * (rg.internal_energy(t) + sp.r_i * t);
            s_out[i] = sp.w * rg.entropy_ref(t);
        }
        Ok(())
    }
}

/// `g = h - T s`.
#[inline]
pub fn gibbs_from(h: Float, s: Float, t: Float) -> Float {
    h - t * s
}

fn validate_species(sp: &SpeciesThermo) -> Result<(), ModelError> {
    // Continuity of cp, h, s at interior junctions: 1e-6 relative.
    for k in 1..sp.ranges.len() {
        let t = sp.ranges[k].t_lo;
        let (lo, hi) = (&sp.ranges[k - 1], &sp.ranges[k]);
        let checks: [(&'static str, Float, Float); 3] = [
            ("cp", lo.cp(t), hi.cp(t)),
            ("h", lo.internal_energy(t), hi.internal_energy(t)),
            ("s", lo.entropy_ref(t), hi.entropy_ref(t)),
        ];
        for (what, a, b) in checks {
            let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-30);
            if rel > 1e-6 {
                return Err(ModelError::Discontinuous {
                    species: sp.name.clone(),
                    what,
                    t,
                    rel,
                });
            }
        }
    }
    // cv > 0 and u(T) > b_{i0} sampled over the covered window.
    let (t_min, t_max) = (sp.t_min(), sp.t_max());
    let n_samples = 200;
    for k in 0..=n_samples {
        let t = t_min + (t_max - t_min) * k as Float / n_samples as Float;
        let rg = &sp.ranges[sp.range_index(t)];
        if rg.cp(t) <= sp.r_i {
            return Err(ModelError::NonpositiveCv {
                species: sp.name.clone(),
                t,
            });
        }
        if rg.internal_energy(t) <= sp.u_floor && t > t_min {
            return Err(ModelError::NonpositiveShiftedEnergy {
                species: sp.name.clone(),
                t,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Calorically perfect fabricated species: `cp = a0 R_i` everywhere.
    fn constant_cp_species(name: &str, w: Float, a0: Float) -> SpeciesThermo {
        SpeciesThermo::new(
            name,
            w,
            vec![("X".into(), 1.0)],
            vec![(100.0, 4500.0, [a0, 0.0, 0.0, 0.0, 0.0, 1000.0, 2.0])],
        )
        .unwrap()
    }

    /// GRI-style H2 fit used for junction-continuity checks.
    fn h2_species() -> SpeciesThermo {
        SpeciesThermo::new(
            "H2",
            2.016,
            vec![("H".into(), 2.0)],
            vec![
                (
                    100.0,
                    1000.0,
                    [
                        2.34433112,
                        7.98052075e-3,
                        -1.9478151e-5,
                        2.01572094e-8,
                        -7.37611761e-12,
                        -917.935173,
                        0.683010238,
                    ],
                ),
                (
                    1000.0,
                    4500.0,
                    [
                        3.3372792,
                        -4.94024731e-5,
                        4.99456778e-7,
                        -1.79566394e-10,
                        2.00255376e-14,
                        -950.158922,
                        -3.20502331,
                    ],
                ),
            ],
        )
        .unwrap()
    }

    fn single_species_model(sp: SpeciesThermo) -> GasModel {
        GasModel::new(vec![sp]).unwrap()
    }

    #[test]
    fn constant_cp_is_flat() {
        let m = single_species_model(constant_cp_species("X", 30.0, 3.5));
        let r_i = R0 / 30.0;
        let a = m.cp_species(0, 300.0).unwrap();
        let b = m.cp_species(0, 2000.0).unwrap();
        assert!((a - 3.5 * r_i).abs() < 1e-9);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn junction_continuity_of_h2() {
        let m = single_species_model(h2_species());
        let sp = &m.species()[0];
        let t = 1000.0;
        for (what, a, b) in [
            ("cp", sp.ranges[0].cp(t), sp.ranges[1].cp(t)),
            (
                "u",
                sp.ranges[0].internal_energy(t),
                sp.ranges[1].internal_energy(t),
            ),
            (
                "s",
                sp.ranges[0].entropy_ref(t),
                sp.ranges[1].entropy_ref(t),
            ),
        ] {
            let rel = (a - b).abs() / a.abs().max(b.abs());
            assert!(rel < 1e-6, "{what}: rel mismatch {rel:e}");
        }
    }

    #[test]
    fn cp_minus_cv_is_r() {
        let m = single_species_model(h2_species());
        let r_i = m.species()[0].r_specific();
        for t in [150.0, 300.0, 999.0, 1001.0, 2500.0, 4400.0] {
            let cp = m.cp_species(0, t).unwrap();
            let cv = m.cv_species(0, t).unwrap();
            assert!((cp - cv - r_i).abs() < 1e-9 * cp.abs());
        }
    }

    #[test]
    fn h_minus_u_is_rt() {
        let m = single_species_model(h2_species());
        let r_i = m.species()[0].r_specific();
        for t in [200.0, 700.0, 1500.0, 3000.0] {
            let h = m.enthalpy_species(0, t).unwrap();
            let u = m.internal_energy_species(0, t).unwrap();
            assert!((h - u - r_i * t).abs() < 1e-9 * h.abs());
        }
    }

    #[test]
    fn du_dt_matches_cv_by_finite_difference() {
        let m = single_species_model(h2_species());
        for t in [250.0, 600.0, 1200.0, 3200.0] {
            let dt = t * 1e-6;
            let fd = (m.internal_energy_species(0, t + dt).unwrap()
                - m.internal_energy_species(0, t - dt).unwrap())
                / (2.0 * dt);
            let cv = m.cv_species(0, t).unwrap();
            assert!((fd - cv).abs() / cv.abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn constant_cp_energy_is_linear() {
        let a0 = 4.2;
        let m = single_species_model(constant_cp_species("X", 25.0, a0));
        let r_i = R0 / 25.0;
        let u_ref = m.internal_energy_species(0, T_REF).unwrap();
        for t in [300.0, 1700.0, 4000.0] {
            let u = m.internal_energy_species(0, t).unwrap();
            let expect = (a0 * r_i - r_i) * (t - T_REF);
            assert!((u - u_ref - expect).abs() < 1e-8 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn out_of_range_strict_and_clamp() {
        let strict = single_species_model(h2_species());
        assert!(matches!(
            strict.cp_species(0, 6000.0),
            Err(ThermoError::TemperatureOutOfRange { .. })
        ));
        let clamped = single_species_model(h2_species()).with_policy(RangePolicy::Clamp);
        let at_cap = clamped.cp_species(0, 4500.0).unwrap();
        assert_eq!(clamped.cp_species(0, 6000.0).unwrap(), at_cap);
        assert_eq!(clamped.clamp_events(), 1);
    }

    #[test]
    fn entropy_reference_pressure() {
        let m = single_species_model(h2_species());
        let t = 700.0;
        // P_i = P_ref at this concentration: the log term vanishes.
        let c_at_pref = P_REF / (R0 * t);
        let s = m.entropy_species(0, t, c_at_pref).unwrap();
        let s0 = m.entropy_ref_species(0, t).unwrap();
        assert!((s - s0).abs() < 1e-9 * s0.abs());
    }

    #[test]
    fn entropy_two_formulas_agree() {
        let m = single_species_model(h2_species());
        let mut rng = 123456789u64;
        let mut next = || {
            rng = rng
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (rng >> 11) as Float / (1u64 << 53) as Float
        };
        for _ in 0..100 {
            let t = 150.0 + 4000.0 * next();
            let c = 1e-6 * (1e8 as Float).powf(next());
            let a = m.entropy_species(0, t, c).unwrap();
            let b = m.entropy_species_concentration_form(0, t, c).unwrap();
            assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()), "t={t} c={c}");
        }
    }

    #[test]
    fn doubling_concentration_drops_entropy_by_r_ln2() {
        let m = single_species_model(h2_species());
        let r_i = m.species()[0].r_specific();
        let s1 = m.entropy_species(0, 900.0, 0.02).unwrap();
        let s2 = m.entropy_species(0, 900.0, 0.04).unwrap();
        assert!((s1 - s2 - r_i * 2.0_f64.ln()).abs() < 1e-9 * s1.abs());
    }

    #[test]
    fn mixture_single_species_matches_species() {
        let m = single_species_model(h2_species());
        let t = 1100.0;
        let props = m.mixture_props(&[0.3], t).unwrap();
        assert!((props.u - m.internal_energy_species(0, t).unwrap()).abs() < 1e-9 * props.u.abs());
        assert!((props.s - m.entropy_species(0, t, 0.3).unwrap()).abs() < 1e-9 * props.s.abs());
        assert!((props.cp - m.cp_species(0, t).unwrap()).abs() < 1e-12 * props.cp.abs());
    }

    #[test]
    fn rho_s_permutation_invariant() {
        let a = constant_cp_species("A", 10.0, 3.0);
        let b = constant_cp_species("B", 40.0, 4.0);
        let m1 = GasModel::new(vec![a.clone(), b.clone()]).unwrap();
        let m2 = GasModel::new(vec![b, a]).unwrap();
        let t = 800.0;
        let s1 = m1.rho_s(&[0.1, 0.7], t).unwrap();
        let s2 = m2.rho_s(&[0.7, 0.1], t).unwrap();
        assert!((s1 - s2).abs() < 1e-12 * s1.abs());
    }

    #[test]
    fn rho_u_linear_in_concentrations() {
        let m = single_species_model(h2_species());
        let t = 1300.0;
        let one = m.rho_u(&[0.2], t).unwrap();
        let two = m.rho_u(&[0.4], t).unwrap();
        assert!((two - 2.0 * one).abs() < 1e-12 * two.abs());
    }

    #[test]
    fn pressure_values() {
        let m = single_species_model(h2_species());
        assert!((m.pressure(&[1.0], 1000.0) - 8.3144621e6).abs() < 1e-8);
        assert_eq!(m.pressure(&[0.0], 1000.0), 0.0);
        let m2 = GasModel::new(vec![
            constant_cp_species("A", 10.0, 3.0),
            constant_cp_species("B", 40.0, 4.0),
        ])
        .unwrap();
        let c = [0.3, 0.9];
        let total = m2.pressure(&c, 400.0);
        let parts: Float = c.iter().map(|&ci| ci * R0 * 400.0).sum();
        assert!((total - parts).abs() < 1e-9 * total);
    }

    #[test]
    fn shifted_energy_positive_and_vanishing() {
        let m = single_species_model(h2_species());
        assert!(m.shifted_internal_energy(&[0.5], 300.0).unwrap() > 0.0);

        // Constant-cv fabricated species: rho u* = rho (a0 - 1) R_i T -> 0.
        let a0 = 3.0;
        let cc = single_species_model(constant_cp_species("X", 20.0, a0));
        let r_i = R0 / 20.0;
        for t in [100.0, 150.0, 400.0] {
            let got = cc.shifted_internal_energy(&[0.1], t).unwrap();
            let expect = 0.1 * 20.0 * (a0 - 1.0) * r_i * t;
            assert!((got - expect).abs() < 1e-8 * expect);
        }
    }

    #[test]
    fn shifted_energy_invariant_under_b0_shift() {
        let base = constant_cp_species("X", 20.0, 3.0);
        let mut a = [3.0, 0.0, 0.0, 0.0, 0.0, 1000.0, 2.0];
        a[5] += 123.4; // shift the integration constant
        let shifted = SpeciesThermo::new(
            "X",
            20.0,
            vec![("X".into(), 1.0)],
            vec![(100.0, 4500.0, a)],
        )
        .unwrap();
        let m1 = single_species_model(base);
        let m2 = single_species_model(shifted);
        let v1 = m1.shifted_internal_energy(&[0.25], 777.0).unwrap();
        let v2 = m2.shifted_internal_energy(&[0.25], 777.0).unwrap();
        assert!((v1 - v2).abs() < 1e-9 * v1.abs());
    }

    #[test]
    fn temperature_round_trip() {
        let m = GasModel::new(vec![h2_species(), constant_cp_species("B", 32.0, 3.7)]).unwrap();
        let mut rng = 42u64;
        let mut next = || {
            rng = rng
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (rng >> 11) as Float / (1u64 << 53) as Float
        };
        for _ in 0..50 {
            let t = 150.0 + 4200.0 * next();
            let c = [1e-4 + next(), 1e-4 + next()];
            let e = m.rho_u(&c, t).unwrap();
            let t_back = m.temperature_from_energy(&c, e, None).unwrap();
            assert!((t_back - t).abs() / t < 1e-8, "t={t} got {t_back}");
        }
    }

    #[test]
    fn temperature_constant_cv_exact() {
        let a0 = 4.0;
        let m = single_species_model(constant_cp_species("X", 20.0, a0));
        let r_i = R0 / 20.0;
        let cv = (a0 - 1.0) * r_i;
        let c = [0.2];
        let u_ref = m.internal_energy_species(0, T_REF).unwrap();
        let target_t = 1234.5;
        let rho = 0.2 * 20.0;
        let rho_u = rho * (u_ref + cv * (target_t - T_REF));
        let t = m.temperature_from_energy(&c, rho_u, None).unwrap();
        assert!((t - target_t).abs() < 1e-8 * target_t);
    }

    #[test]
    fn temperature_floor_is_no_bracket() {
        let m = single_species_model(constant_cp_species("X", 20.0, 3.0));
        let c = [0.2];
        let floor = m.energy_floor(&c);
        assert!(matches!(
            m.temperature_from_energy(&c, floor, None),
            Err(ThermoError::NoBracket { .. })
        ));
    }

    #[test]
    fn sound_speed_calorically_perfect() {
        // gamma = 1.4 from cp = 3.5 R.
        let m = single_species_model(constant_cp_species("AIR", 28.97, 3.5));
        let r_i = R0 / 28.97;
        let c = m.sound_speed(&[0.04], 300.0).unwrap();
        let expect = (1.4 * r_i * 300.0).sqrt();
        assert!((c - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn sound_speed_intensive() {
        let m = GasModel::new(vec![h2_species(), constant_cp_species("B", 32.0, 3.7)]).unwrap();
        let c1 = m.sound_speed(&[0.1, 0.3], 900.0).unwrap();
        let c2 = m.sound_speed(&[0.4, 1.2], 900.0).unwrap();
        assert!((c1 - c2).abs() < 1e-10 * c1);
    }

    #[test]
    fn reduced_potential_independent_of_concentration() {
        let m = single_species_model(h2_species());
        let t = 1500.0;
        let a = m.gibbs_and_potentials(&[0.05], t).unwrap();
        let b = m.gibbs_and_potentials(&[0.5], t).unwrap();
        assert!((a.mu_u[0] - b.mu_u[0]).abs() < 1e-12 * a.mu_u[0].abs());
        assert!(matches!(
            m.gibbs_and_potentials(&[0.0], t),
            Err(ThermoError::ZeroConcentration(_))
        ));
    }

    #[test]
    fn gibbs_identities() {
        // g = h - T s as a bare identity: s = h/T gives g = 0, and with
        // s = 0, g/(R0 T) = h/(R0 T) scales as 1/T for constant h.
        let (h, t) = (5.0e6, 800.0);
        assert_eq!(gibbs_from(h, h / t, t), 0.0);
        let mu1 = gibbs_from(h, 0.0, 500.0) / (R0 * 500.0);
        let mu2 = gibbs_from(h, 0.0, 1000.0) / (R0 * 1000.0);
        assert!((mu1 - 2.0 * mu2).abs() < 1e-12 * mu1.abs());
    }

    #[test]
    fn validation_rejects_nonpositive_cv() {
        let bad = SpeciesThermo::new(
            "BAD",
            20.0,
            vec![("X".into(), 1.0)],
            vec![(100.0, 4500.0, [0.9, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])],
        )
        .unwrap();
        assert!(matches!(
            GasModel::new(vec![bad]),
            Err(ModelError::NonpositiveCv { .. })
        ));
    }

    #[test]
    fn validation_rejects_discontinuous_fit() {
        let bad = SpeciesThermo::new(
            "BAD",
            20.0,
            vec![("X".into(), 1.0)],
            vec![
                (100.0, 1000.0, [3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
                (1000.0, 4500.0, [3.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            ],
        )
        .unwrap();
        assert!(matches!(
            GasModel::new(vec![bad]),
            Err(ModelError::Discontinuous { .. })
        ));
    }

    #[test]
    fn duplicate_species_rejected() {
        let a = constant_cp_species("A", 10.0, 3.0);
        let b = constant_cp_species("A", 12.0, 3.0);
        assert!(matches!(
            GasModel::new(vec![a, b]),
            Err(ModelError::DuplicateSpecies(_))
        ));
    }
}
