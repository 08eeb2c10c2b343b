//! Conservative-state algebra for the 1D reacting Euler equations.
//!
//! A state vector is a slice `[rho v, rho e_t, C_1, ..., C_ns]`. Admissibility
//! is membership in the set `G_sigma`: positive density, nonnegative
//! concentrations, positive shifted internal energy (equivalent to `T > 0`),
//! and `rho s - rho sigma >= 0`.

use thiserror::Error;

use crate::thermo::{GasModel, ThermoError, R0};
use crate::Float;

/// Index of the momentum density component.
pub const MOM: usize = 0;
/// Index of the total-energy density component.
pub const ENER: usize = 1;
/// Offset of the first species concentration.
pub const SPECIES: usize = 2;

/// Default strict-positivity floor for density and shifted internal energy.
pub const DEFAULT_EPS: Float = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("state has nonpositive density {0}")]
    NonpositiveDensity(Float),
}

/// Number of conservative components for a model (`ns + 2`).
#[inline]
pub fn n_components(model: &GasModel) -> usize {
    model.n_species() + 2
}

#[inline]
pub fn concentrations(y: &[Float]) -> &[Float] {
    &y[SPECIES..]
}

/// Density `rho = sum W_i C_i` of a state.
#[inline]
pub fn density(model: &GasModel, y: &[Float]) -> Float {
    model.density(&y[SPECIES..])
}

/// Velocity `rho v / rho`.
#[inline]
pub fn velocity(model: &GasModel, y: &[Float]) -> Float {
    y[MOM] / density(model, y)
}

/// Volumetric internal energy `rho u = rho e_t - (rho v)^2 / (2 rho)`.
#[inline]
pub fn rho_internal_energy(model: &GasModel, y: &[Float]) -> Float {
    let rho = density(model, y);
    y[ENER] - 0.5 * y[MOM] * y[MOM] / rho
}

/// Shifted volumetric internal energy `rho u*`, linear in the state apart
/// from the kinetic term; no temperature solve involved.
#[inline]
pub fn shifted_energy(model: &GasModel, y: &[Float]) -> Float {
    rho_internal_energy(model, y) - model.energy_floor(&y[SPECIES..])
}

/// Temperature of a conservative state (Newton inversion, warm-startable).
#[inline]
pub fn temperature(model: &GasModel, y: &[Float], guess: Option<Float>) -> Result<Float, ThermoError> {
    model.temperature_from_energy(&y[SPECIES..], rho_internal_energy(model, y), guess)
}

/// Primitive description: velocity, temperature, concentrations.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveState {
    pub v: Float,
    pub t: Float,
    pub c: Vec<Float>,
}

impl PrimitiveState {
    /// Builds the composition from pressure, temperature, and mass fractions.
    pub fn from_pressure_mass_fractions(
        model: &GasModel,
        v: Float,
        t: Float,
        p: Float,
        mass_fractions: &[(&str, Float)],
    ) -> Option<Self> {
        let ns = model.n_species();
        let mut y_frac = vec![0.0; ns];
        for (name, yk) in mass_fractions {
            y_frac[model.species_index(name)?] = *yk;
        }
        // rho = P / (R0 T sum(Y_i / W_i))
        let inv_w: Float = y_frac
            .iter()
            .zip(model.species())
            .map(|(yk, sp)| yk / sp.w)
            .sum();
        let rho = p / (R0 * t * inv_w);
        let c = y_frac
            .iter()
            .zip(model.species())
            .map(|(yk, sp)| rho * yk / sp.w)
            .collect();
        Some(Self { v, t, c })
    }

    /// Builds the composition from pressure, temperature, and mole ratios
    /// (not necessarily normalized).
    pub fn from_pressure_mole_ratios(
        model: &GasModel,
        v: Float,
        t: Float,
        p: Float,
        mole_ratios: &[(&str, Float)],
    ) -> Option<Self> {
        let ns = model.n_species();
        let total: Float = mole_ratios.iter().map(|(_, x)| x).sum();
        let c_total = p / (R0 * t);
        let mut c = vec![0.0; ns];
        for (name, x) in mole_ratios {
            c[model.species_index(name)?] = c_total * x / total;
        }
        Some(Self { v, t, c })
    }
}

/// Conservative state from primitives: `rho e_t = rho u + rho v^2 / 2`.
pub fn conservative_from_primitive(
    model: &GasModel,
    prim: &PrimitiveState,
) -> Result<Vec<Float>, ThermoError> {
    let rho = model.density(&prim.c);
    let rho_u = model.rho_u(&prim.c, prim.t)?;
    let mut y = vec![0.0; prim.c.len() + 2];
    y[MOM] = rho * prim.v;
    y[ENER] = rho_u + 0.5 * rho * prim.v * prim.v;
    y[SPECIES..].copy_from_slice(&prim.c);
    Ok(y)
}

/// Primitives from a conservative state.
pub fn primitive_from_conservative(
    model: &GasModel,
    y: &[Float],
    t_guess: Option<Float>,
) -> Result<PrimitiveState, StateError> {
    let rho = density(model, y);
    if rho <= 0.0 {
        return Err(StateError::NonpositiveDensity(rho));
    }
    let t = temperature(model, y, t_guess)?;
    Ok(PrimitiveState {
        v: y[MOM] / rho,
        t,
        c: y[SPECIES..].to_vec(),
    })
}

/// Mass-specific mixture entropy `s = rho s / rho` of a state.
pub fn specific_entropy(model: &GasModel, y: &[Float]) -> Result<Float, StateError> {
    let rho = density(model, y);
    if rho <= 0.0 {
        return Err(StateError::NonpositiveDensity(rho));
    }
    let t = temperature(model, y, None)?;
    Ok(model.rho_s(&y[SPECIES..], t)? / rho)
}

/// `rho s` of a state at a known temperature (hot-path variant).
#[inline]
pub fn rho_entropy_at(model: &GasModel, y: &[Float], t: Float) -> Result<Float, ThermoError> {
    model.rho_s(&y[SPECIES..], t)
}

/// Maximum wave-speed estimate `|v| + c` of a state.
pub fn wave_speed(model: &GasModel, y: &[Float], t: Float) -> Result<Float, ThermoError> {
    let c = model.sound_speed(&y[SPECIES..], t)?;
    let rho = density(model, y);
    Ok((y[MOM] / rho).abs() + c)
}

/// Entropy variables `v = dU/dy` for `U = -rho s` and the state ordering
/// `(rho v, rho e_t, C_i)`:
/// `(v/T, -1/T, W_i (g_i - v^2/2) / T)`. Requires `C_i > 0` and `T > 0`.
pub fn entropy_variables(model: &GasModel, y: &[Float]) -> Result<Vec<Float>, StateError> {
    let rho = density(model, y);
    if rho <= 0.0 {
        return Err(StateError::NonpositiveDensity(rho));
    }
    let t = temperature(model, y, None)?;
    let v = y[MOM] / rho;
    let c = &y[SPECIES..];
    let mut out = vec![0.0; y.len()];
    out[MOM] = v / t;
    out[ENER] = -1.0 / t;
    for (i, sp) in model.species().iter().enumerate() {
        if c[i] <= 0.0 {
            return Err(StateError::Thermo(ThermoError::ZeroConcentration(
                sp.name.clone(),
            )));
        }
        let h = model.enthalpy_species(i, t)?;
        let s = model.entropy_species(i, t, c[i])?;
        let g = h - t * s;
        out[SPECIES + i] = sp.w * (g - 0.5 * v * v) / t;
    }
    Ok(out)
}

/// Entropy potential `U_pot = v^T y - U` with `U = -rho s`.
///
/// Computed from the self-consistent pair rather than a closed form; for this
/// state ordering it evaluates to `P/T = R0 sum C_i`.
pub fn entropy_potential(model: &GasModel, y: &[Float]) -> Result<Float, StateError> {
    let vars = entropy_variables(model, y)?;
    let t = temperature(model, y, None)?;
    let rho_s = model.rho_s(&y[SPECIES..], t)?;
    let vy: Float = vars.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok(vy + rho_s)
}

/// Which admissibility condition failed first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    Density,
    Concentration(usize),
    ShiftedEnergy,
    Entropy,
    /// Temperature solve failed while evaluating the entropy constraint.
    TemperatureSolve,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Density => write!(f, "density"),
            Violation::Concentration(i) => write!(f, "concentration[{i}]"),
            Violation::ShiftedEnergy => write!(f, "shifted internal energy"),
            Violation::Entropy => write!(f, "entropy bound"),
            Violation::TemperatureSolve => write!(f, "temperature solve"),
        }
    }
}

/// Result of the `G_sigma` membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub ok: bool,
    pub violation: Option<Violation>,
}

impl Admissibility {
    fn pass() -> Self {
        Self {
            ok: true,
            violation: None,
        }
    }

    fn fail(v: Violation) -> Self {
        Self {
            ok: false,
            violation: Some(v),
        }
    }
}

/// Tests `y` for membership in `G_sigma` with strict-positivity floor `eps`:
/// `rho > eps`, `C_i >= 0`, `rho u* > eps`, `chi_sigma = rho s - rho sigma >= 0`.
///
/// Total: never errors; a failed temperature solve reports inadmissibility.
pub fn is_admissible(model: &GasModel, y: &[Float], sigma: Float, eps: Float) -> Admissibility {
    let rho = density(model, y);
    if !(rho > eps) {
        return Admissibility::fail(Violation::Density);
    }
    for (i, &ci) in y[SPECIES..].iter().enumerate() {
        if !(ci >= 0.0) {
            return Admissibility::fail(Violation::Concentration(i));
        }
    }
    if !(shifted_energy(model, y) > eps) {
        return Admissibility::fail(Violation::ShiftedEnergy);
    }
    let t = match temperature(model, y, None) {
        Ok(t) => t,
        Err(_) => return Admissibility::fail(Violation::TemperatureSolve),
    };
    match model.rho_s(&y[SPECIES..], t) {
        Ok(rho_s) if rho_s - rho * sigma >= 0.0 => Admissibility::pass(),
        Ok(_) => Admissibility::fail(Violation::Entropy),
        Err(_) => Admissibility::fail(Violation::TemperatureSolve),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism;
    use crate::thermo::P_REF;

    fn model() -> GasModel {
        mechanism::load_builtin().unwrap().0
    }

    fn rng_stream(seed: u64) -> impl FnMut() -> Float {
        let mut s = seed;
        move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as Float / (1u64 << 53) as Float
        }
    }

    fn random_state(model: &GasModel, next: &mut impl FnMut() -> Float) -> Vec<Float> {
        let ns = model.n_species();
        let t = 300.0 + 3000.0 * next();
        let v = 600.0 * (next() - 0.5);
        let c: Vec<Float> = (0..ns).map(|_| 1e-4 + 0.05 * next()).collect();
        conservative_from_primitive(model, &PrimitiveState { v, t, c }).unwrap()
    }

    #[test]
    fn zero_velocity_energy_is_internal() {
        let m = model();
        let prim = PrimitiveState {
            v: 0.0,
            t: 800.0,
            c: vec![0.01; m.n_species()],
        };
        let y = conservative_from_primitive(&m, &prim).unwrap();
        let rho_u = m.rho_u(&prim.c, prim.t).unwrap();
        assert_eq!(y[ENER], rho_u);
    }

    #[test]
    fn primitive_round_trip() {
        let m = model();
        let mut next = rng_stream(7);
        for _ in 0..100 {
            let y = random_state(&m, &mut next);
            let prim = primitive_from_conservative(&m, &y, None).unwrap();
            let back = conservative_from_primitive(&m, &prim).unwrap();
            for (a, b) in y.iter().zip(&back) {
                let scale = a.abs().max(b.abs()).max(1e-30);
                assert!((a - b).abs() / scale < 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn shock_tube_left_state_density() {
        // Pure He at 10 atm, 300 K: rho = P W / (R0 T).
        let m = model();
        let prim = PrimitiveState::from_pressure_mass_fractions(
            &m,
            0.0,
            300.0,
            10.0 * P_REF,
            &[("HE", 1.0)],
        )
        .unwrap();
        let y = conservative_from_primitive(&m, &prim).unwrap();
        let w_he = m.species()[m.species_index("HE").unwrap()].w;
        let expect = 10.0 * P_REF * w_he / (R0 * 300.0);
        assert!((density(&m, &y) - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn entropy_matches_species_formula_for_pure_gas() {
        let m = model();
        let i = m.species_index("O2").unwrap();
        let t = 300.0;
        let c_o2 = P_REF / (R0 * t);
        let mut c = vec![0.0; m.n_species()];
        c[i] = c_o2;
        let y = conservative_from_primitive(&m, &PrimitiveState { v: 0.0, t, c }).unwrap();
        let s = specific_entropy(&m, &y).unwrap();
        let s_direct = m.entropy_species(i, t, c_o2).unwrap();
        assert!((s - s_direct).abs() < 1e-9 * s.abs());
    }

    #[test]
    fn entropy_invariant_under_velocity_sign() {
        let m = model();
        let mut next = rng_stream(11);
        let y = random_state(&m, &mut next);
        let mut flipped = y.clone();
        flipped[MOM] = -flipped[MOM];
        let a = specific_entropy(&m, &y).unwrap();
        let b = specific_entropy(&m, &flipped).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn absent_species_slot_does_not_change_entropy() {
        let m = model();
        let i = m.species_index("N2").unwrap();
        let t = 500.0;
        let mut c = vec![0.0; m.n_species()];
        c[i] = 0.03;
        let y = conservative_from_primitive(&m, &PrimitiveState { v: 10.0, t, c }).unwrap();
        let s = specific_entropy(&m, &y).unwrap();
        // Same physical state expressed in a model with just N2.
        let small = mechanism::subset(&model(), &mechanism::load_builtin().unwrap().1, &["N2"])
            .unwrap()
            .0;
        let ys =
            conservative_from_primitive(&small, &PrimitiveState { v: 10.0, t, c: vec![0.03] })
                .unwrap();
        let ss = specific_entropy(&small, &ys).unwrap();
        assert!((s - ss).abs() < 1e-10 * s.abs());
    }

    #[test]
    fn entropy_variable_energy_slot() {
        let m = model();
        let mut next = rng_stream(13);
        let y = random_state(&m, &mut next);
        let t = temperature(&m, &y, None).unwrap();
        let vars = entropy_variables(&m, &y).unwrap();
        assert!((vars[ENER] + 1.0 / t).abs() < 1e-12 / t);
    }

    #[test]
    fn entropy_potential_closed_form() {
        // v^T y - U evaluates to P/T = R0 sum C_i for this entropy pair.
        let m = model();
        let mut next = rng_stream(17);
        for _ in 0..20 {
            let y = random_state(&m, &mut next);
            let pot = entropy_potential(&m, &y).unwrap();
            let expect = R0 * y[SPECIES..].iter().sum::<Float>();
            assert!(
                (pot - expect).abs() < 1e-9 * expect.abs(),
                "{pot} vs {expect}"
            );
        }
    }

    #[test]
    fn entropy_variables_match_gradient_of_u() {
        let m = model();
        let mut next = rng_stream(19);
        for _ in 0..20 {
            let y = random_state(&m, &mut next);
            let vars = entropy_variables(&m, &y).unwrap();
            for k in 0..y.len() {
                let scale = y[k].abs().max(1e-3);
                let dh = 1e-6 * scale;
                let mut yp = y.clone();
                yp[k] += dh;
                let mut ym = y.clone();
                ym[k] -= dh;
                let u_of = |yy: &[Float]| -> Float {
                    let t = temperature(&m, yy, None).unwrap();
                    -m.rho_s(&yy[SPECIES..], t).unwrap()
                };
                let fd = (u_of(&yp) - u_of(&ym)) / (2.0 * dh);
                let denom = vars[k].abs().max(1e-6);
                assert!(
                    (fd - vars[k]).abs() / denom < 1e-5,
                    "component {k}: fd {fd} vs {}",
                    vars[k]
                );
            }
        }
    }

    #[test]
    fn admissibility_examples() {
        let m = model();
        let mut next = rng_stream(23);
        let y = random_state(&m, &mut next);
        let s = specific_entropy(&m, &y).unwrap();
        assert!(is_admissible(&m, &y, s - 1.0, DEFAULT_EPS).ok);

        let mut bad = y.clone();
        bad[SPECIES] = -1e-8;
        let res = is_admissible(&m, &bad, s - 1.0, DEFAULT_EPS);
        assert!(!res.ok);
        assert_eq!(res.violation, Some(Violation::Concentration(0)));

        // Boundary inclusion: sigma exactly equal to the state's entropy.
        let res = is_admissible(&m, &y, s, DEFAULT_EPS);
        assert!(res.ok, "closed inequality must include the boundary");
    }

    #[test]
    fn quasi_concavity_of_specific_entropy() {
        let m = model();
        let mut next = rng_stream(29);
        for _ in 0..50 {
            let y1 = random_state(&m, &mut next);
            let y2 = random_state(&m, &mut next);
            let s1 = specific_entropy(&m, &y1).unwrap();
            let s2 = specific_entropy(&m, &y2).unwrap();
            for _ in 0..4 {
                let beta = next();
                let mix: Vec<Float> = y1
                    .iter()
                    .zip(&y2)
                    .map(|(a, b)| beta * a + (1.0 - beta) * b)
                    .collect();
                let sm = specific_entropy(&m, &mix).unwrap();
                assert!(
                    sm >= s1.min(s2) - 1e-12 * s1.abs().max(s2.abs()),
                    "beta={beta}: {sm} < min({s1}, {s2})"
                );
            }
        }
    }
}
