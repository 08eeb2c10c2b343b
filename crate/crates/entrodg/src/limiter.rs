//! Positivity-preserving and entropy limiting: convex weights, the
//! four-step linear-scaling limiter, and global/local entropy bounds.
//!
//! Each step contracts the nodal values toward the element average, which is
//! preserved exactly. Steps 1-3 are the positivity-preserving limiter
//! (density, concentrations, shifted internal energy); step 4 enforces the
//! entropy constraint `chi = rho s - rho s_b >= 0`.

use thiserror::Error;

use crate::dg1d::{BoundaryKind, Solution};
use crate::state::{self, SPECIES};
use crate::thermo::GasModel;
use crate::{Basis, Float};

/// Division guard: denominators below this collapse the element to its
/// average (theta = 0), the safe limit of the scaling formula.
const THETA_DENOM_GUARD: Float = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimiterError {
    #[error("element {elem}: average inadmissible ({what}); upstream CFL or flux violation")]
    AverageInadmissible { elem: usize, what: String },
}

/// Endpoint weights of the element-average convex decomposition.
///
/// With Gauss-Lobatto nodes the endpoints are quadrature points, so
/// `theta_L = theta_R` = endpoint weight and the interior weights are the
/// interior quadrature weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexWeights {
    pub theta_l: Float,
    pub theta_r: Float,
}

impl ConvexWeights {
    #[inline]
    pub fn min(&self) -> Float {
        self.theta_l.min(self.theta_r)
    }
}

pub fn convex_weights(basis: &Basis) -> ConvexWeights {
    let w = basis.weights();
    ConvexWeights {
        theta_l: w[0],
        theta_r: w[w.len() - 1],
    }
}

/// Which limiter stages run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimiterKind {
    None,
    /// Steps 1-3: density, concentrations, shifted internal energy.
    PositivityPreserving,
    /// Steps 1-4, including the entropy constraint.
    #[default]
    Entropy,
}

/// Entropy-bound selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundMode {
    /// Minimum nodal entropy of the initial condition, evaluated once.
    GlobalInitial,
    /// Minimum nodal entropy of the current solution, updated every step.
    Global,
    /// Relaxed three-element stencil minimum from the previous step,
    /// optionally floored by the initial global bound.
    #[default]
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    pub kind: LimiterKind,
    pub bound: BoundMode,
    /// Relaxation parameter `c` of the local bound.
    pub relax_c: Float,
    /// Combine the local bound with the initial global bound as a floor.
    pub global_floor: bool,
    /// Strict-positivity floor for density and shifted internal energy.
    pub eps: Float,
}

impl Default for LimiterConfig {
    fn default() -> Self {
        Self {
            kind: LimiterKind::Entropy,
            bound: BoundMode::Local,
            relax_c: 1.0,
            global_floor: false,
            eps: state::DEFAULT_EPS,
        }
    }
}

/// What the limiter did to one element.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LimiterOutcome {
    /// Scaling factors of the four steps (1.0 when a step did not trigger).
    pub theta: [Float; 4],
    pub activated: bool,
    /// True if any of steps 1-3 triggered.
    pub positivity_activated: bool,
    /// True if step 4 triggered.
    pub entropy_activated: bool,
}

/// Applies the four-step linear-scaling limiter to one element, in place.
///
/// `avg` must be the element average (it is preserved exactly); `t_guesses`
/// warm-start the temperature solves of the entropy stage. When
/// `enforce_entropy` is false only the positivity steps run.
#[allow(clippy::too_many_arguments)]
pub fn limit_element(
    model: &GasModel,
    elem: &mut [Float],
    m: usize,
    avg: &[Float],
    s_b: Float,
    eps: Float,
    enforce_entropy: bool,
    t_guesses: &[Float],
    elem_index: usize,
) -> Result<LimiterOutcome, LimiterError> {
    let n = elem.len() / m;
    let mut outcome = LimiterOutcome {
        theta: [1.0; 4],
        ..Default::default()
    };

    // Step 1: density positivity, scaling concentrations about their average.
    let rho_avg = model.density(&avg[SPECIES..]);
    let mut rho_min = Float::MAX;
    for j in 0..n {
        rho_min = rho_min.min(model.density(&elem[j * m + SPECIES..(j + 1) * m]));
    }
    if rho_min <= eps {
        if !(rho_avg > eps) {
            return Err(LimiterError::AverageInadmissible {
                elem: elem_index,
                what: format!("average density {rho_avg} <= eps"),
            });
        }
        let denom = rho_avg - rho_min;
        let theta = if denom < THETA_DENOM_GUARD {
            0.0
        } else {
            (rho_avg - eps) / denom
        };
        outcome.theta[0] = theta;
        for j in 0..n {
            for k in SPECIES..m {
                let c = &mut elem[j * m + k];
                *c = avg[k] + theta * (*c - avg[k]);
            }
        }
    }

    // Step 2: nonnegative concentrations. A single uniform theta (the
    // minimum over violating species) keeps every species average intact.
    let mut theta2: Float = 1.0;
    for i in SPECIES..m {
        let mut c_min = Float::MAX;
        for j in 0..n {
            c_min = c_min.min(elem[j * m + i]);
        }
        if c_min < 0.0 {
            let c_avg = avg[i];
            if c_avg < 0.0 {
                return Err(LimiterError::AverageInadmissible {
                    elem: elem_index,
                    what: format!("average concentration [{}] = {c_avg} < 0", i - SPECIES),
                });
            }
            let denom = c_avg - c_min;
            let theta = if denom < THETA_DENOM_GUARD {
                0.0
            } else {
                c_avg / denom
            };
            theta2 = theta2.min(theta);
        }
    }
    if theta2 < 1.0 {
        outcome.theta[1] = theta2;
        for j in 0..n {
            for k in SPECIES..m {
                let c = &mut elem[j * m + k];
                *c = avg[k] + theta2 * (*c - avg[k]);
            }
        }
    }

    // Step 3: positive shifted internal energy, scaling the full state.
    let mut e_min = Float::MAX;
    for j in 0..n {
        e_min = e_min.min(state::shifted_energy(model, &elem[j * m..(j + 1) * m]));
    }
    if e_min <= eps {
        let e_avg = state::shifted_energy(model, avg);
        if !(e_avg > eps) {
            return Err(LimiterError::AverageInadmissible {
                elem: elem_index,
                what: format!("average shifted internal energy {e_avg} <= eps"),
            });
        }
        let denom = e_avg - e_min;
        let theta = if denom < THETA_DENOM_GUARD {
            0.0
        } else {
            (e_avg - eps) / denom
        };
        outcome.theta[2] = theta;
        for j in 0..n {
            for k in 0..m {
                let v = &mut elem[j * m + k];
                *v = avg[k] + theta * (*v - avg[k]);
            }
        }
    }

    // Step 4: entropy constraint chi = rho s - rho s_b >= 0.
    if enforce_entropy {
        let chi = |y: &[Float], guess: Option<Float>| -> Option<Float> {
            let t = state::temperature(model, y, guess).ok()?;
            let rho_s = model.rho_s(&y[SPECIES..], t).ok()?;
            Some(rho_s - model.density(&y[SPECIES..]) * s_b)
        };
        let mut chi_min = Float::MAX;
        let mut solvable = true;
        for j in 0..n {
            match chi(&elem[j * m..(j + 1) * m], t_guesses.get(j).copied()) {
                Some(v) => chi_min = chi_min.min(v),
                None => {
                    solvable = false;
                    break;
                }
            }
        }
        if !solvable || chi_min < 0.0 {
            let chi_avg = chi(avg, t_guesses.first().copied()).ok_or_else(|| {
                LimiterError::AverageInadmissible {
                    elem: elem_index,
                    what: "temperature solve failed on the element average".into(),
                }
            })?;
            if chi_avg < 0.0 {
                return Err(LimiterError::AverageInadmissible {
                    elem: elem_index,
                    what: format!("average entropy below bound (chi = {chi_avg})"),
                });
            }
            let theta = if !solvable {
                // A node left the thermodynamic table: collapse to average.
                0.0
            } else {
                let denom = chi_avg - chi_min;
                if denom < THETA_DENOM_GUARD {
                    0.0
                } else {
                    chi_avg / denom
                }
            };
            outcome.theta[3] = theta;
            for j in 0..n {
                for k in 0..m {
                    let v = &mut elem[j * m + k];
                    *v = avg[k] + theta * (*v - avg[k]);
                }
            }
        }
    }

    outcome.positivity_activated = outcome.theta[..3].iter().any(|&t| t < 1.0);
    outcome.entropy_activated = outcome.theta[3] < 1.0;
    outcome.activated = outcome.positivity_activated || outcome.entropy_activated;
    Ok(outcome)
}

/// Minimum nodal specific entropy over the whole solution.
pub fn entropy_bound_global(model: &GasModel, sol: &Solution) -> Float {
    let mut s_min = Float::MAX;
    for e in 0..sol.n_elem {
        for j in 0..sol.n_nodes {
            if let Some(s) = nodal_entropy(model, sol, e, j) {
                s_min = s_min.min(s);
            }
        }
    }
    s_min
}

/// Per-element minimum nodal entropy, written into `out`.
pub fn elementwise_min_entropy(model: &GasModel, sol: &Solution, out: &mut [Float]) {
    for e in 0..sol.n_elem {
        let mut s_min = Float::MAX;
        for j in 0..sol.n_nodes {
            if let Some(s) = nodal_entropy(model, sol, e, j) {
                s_min = s_min.min(s);
            }
        }
        out[e] = s_min;
    }
}

/// Relaxed local entropy bound
/// `s_b = c * min over the three-element nodal stencil`, with wall ghosts
/// mirroring the interior (equal entropy) and periodic wraparound.
/// With `floor`, returns `max(floor, local bound)`.
pub fn entropy_bound_local(
    elem_min: &[Float],
    bc: BoundaryKind,
    c_relax: Float,
    floor: Option<Float>,
    out: &mut [Float],
) {
    let ne = elem_min.len();
    for e in 0..ne {
        let left = match (e, bc) {
            (0, BoundaryKind::Periodic) => elem_min[ne - 1],
            (0, BoundaryKind::Wall) => elem_min[0],
            _ => elem_min[e - 1],
        };
        let right = match (e, bc) {
            (e, BoundaryKind::Periodic) if e == ne - 1 => elem_min[0],
            (e, BoundaryKind::Wall) if e == ne - 1 => elem_min[ne - 1],
            _ => elem_min[e + 1],
        };
        let mut s_b = c_relax * left.min(elem_min[e]).min(right);
        if let Some(f) = floor {
            s_b = s_b.max(f);
        }
        out[e] = s_b;
    }
}

/// Specific entropy of one node; `None` if the state is not evaluable.
pub fn nodal_entropy(model: &GasModel, sol: &Solution, e: usize, j: usize) -> Option<Float> {
    let y = sol.node(e, j);
    let rho = state::density(model, y);
    if rho <= 0.0 {
        return None;
    }
    let guess = sol.t_cache[e * sol.n_nodes + j];
    let t = state::temperature(model, y, Some(guess)).ok()?;
    Some(model.rho_s(&y[SPECIES..], t).ok()? / rho)
}
