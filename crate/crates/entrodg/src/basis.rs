//! Gauss-Lobatto collocation basis on the reference interval `[0, 1]`.
//!
//! The same operators serve the spatial DG discretization and the temporal
//! DG-in-time integrator: a diagonal mass matrix `M = diag(w)`, the nodal
//! differentiation matrix `D`, and `Q = M D`, which satisfy the
//! summation-by-parts identity `Q + Q^T = B = diag(-1, 0, ..., 0, 1)`.

use thiserror::Error;

use crate::numeric::Scalar;

/// Maximum supported polynomial degree.
pub const MAX_DEGREE: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BasisError {
    #[error("unsupported polynomial degree {0} (supported: 1..={MAX_DEGREE})")]
    UnsupportedOrder(usize),
}

/// Nodal Gauss-Lobatto basis of degree `p` on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Basis<S> {
    p: usize,
    nodes: Vec<S>,
    weights: Vec<S>,
    /// Row-major differentiation matrix: `diff[i * n + j] = l_j'(xi_i)`.
    diff: Vec<S>,
    /// Barycentric weights of the node set.
    bary: Vec<S>,
}

impl<S: Scalar> Basis<S> {
    /// Builds the degree-`p` Gauss-Lobatto collocation operators.
    pub fn gauss_lobatto(p: usize) -> Result<Self, BasisError> {
        if p < 1 || p > MAX_DEGREE {
            return Err(BasisError::UnsupportedOrder(p));
        }
        let (nodes, weights) = gauss_lobatto_rule(p + 1);
        let bary = barycentric_weights(&nodes);
        let diff = differentiation_matrix(&nodes, &bary);
        Ok(Self {
            p,
            nodes,
            weights,
            diff,
            bary,
        })
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn n_nodes(&self) -> usize {
        self.p + 1
    }

    /// Nodes on `[0, 1]`, ascending; endpoints are included.
    pub fn nodes(&self) -> &[S] {
        &self.nodes
    }

    /// Quadrature weights; they sum to one.
    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `l_j'(xi_i)` stored row-major.
    pub fn diff(&self) -> &[S] {
        &self.diff
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> S {
        self.diff[i * self.n_nodes() + j]
    }

    /// `Q = M D`.
    pub fn q(&self, i: usize, j: usize) -> S {
        self.weights[i] * self.d(i, j)
    }

    /// Evaluates all Lagrange basis functions at `xi`, writing into `out`.
    pub fn eval_lagrange(&self, xi: S, out: &mut [S]) {
        debug_assert_eq!(out.len(), self.n_nodes());
        // Exact-node hit: the barycentric formula would divide by zero.
        for (j, &xj) in self.nodes.iter().enumerate() {
            if xi == xj {
                out.iter_mut().for_each(|v| *v = S::zero());
                out[j] = S::one();
                return;
            }
        }
        let mut denom = S::zero();
        for (j, &xj) in self.nodes.iter().enumerate() {
            let t = self.bary[j] / (xi - xj);
            out[j] = t;
            denom += t;
        }
        out.iter_mut().for_each(|v| *v = *v / denom);
    }

    /// Interpolates nodal values to `xi`.
    pub fn interpolate(&self, nodal: &[S], xi: S) -> S {
        let n = self.n_nodes();
        debug_assert_eq!(nodal.len(), n);
        let mut basis = vec![S::zero(); n];
        self.eval_lagrange(xi, &mut basis);
        let mut acc = S::zero();
        for j in 0..n {
            acc += basis[j] * nodal[j];
        }
        acc
    }
}

/// Gauss-Lobatto nodes and weights on `[0, 1]` for `n >= 2` points.
///
/// Weights are normalized to sum to one.
pub fn gauss_lobatto_rule<S: Scalar>(n: usize) -> (Vec<S>, Vec<S>) {
    assert!(n >= 2);
    let m = n - 1; // Legendre index of the generating polynomial P_m
    let mut x = vec![S::zero(); n];
    x[0] = -S::one();
    x[n - 1] = S::one();
    let pi = S::c(std::f64::consts::PI);
    for i in 1..n - 1 {
        // Chebyshev-Gauss-Lobatto initial guess, refined by Newton on P_m'.
        let mut xi = -(pi * S::from_usize(i).unwrap() / S::from_usize(m).unwrap()).cos();
        for _ in 0..100 {
            let (pm, dpm) = legendre_with_derivative(m, xi);
            // P_m'' from the Legendre differential equation.
            let one = S::one();
            let d2pm = (S::c(2.0) * xi * dpm
                - S::from_usize(m).unwrap() * S::from_usize(m + 1).unwrap() * pm)
                / (one - xi * xi);
            let step = dpm / d2pm;
            xi = xi - step;
            if step.abs() <= S::epsilon() * S::c(4.0) {
                break;
            }
        }
        x[i] = xi;
    }
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nn = S::from_usize(n).unwrap();
    let mm = S::from_usize(m).unwrap();
    let mut w = vec![S::zero(); n];
    for i in 0..n {
        let (pm, _) = legendre_with_derivative(m, x[i]);
        w[i] = S::c(2.0) / (mm * nn * pm * pm);
    }
    // Map [-1, 1] -> [0, 1].
    let half = S::c(0.5);
    for i in 0..n {
        x[i] = (x[i] + S::one()) * half;
        w[i] = w[i] * half;
    }
    (x, w)
}

/// Gauss-Legendre nodes and weights on `[0, 1]` for `n >= 1` points.
///
/// Weights sum to one; the rule is exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre_rule<S: Scalar>(n: usize) -> (Vec<S>, Vec<S>) {
    assert!(n >= 1);
    let mut x = vec![S::zero(); n];
    let mut w = vec![S::zero(); n];
    let pi = S::c(std::f64::consts::PI);
    let nn = S::from_usize(n).unwrap();
    for i in 0..n {
        let k = S::from_usize(i).unwrap();
        let mut xi = -((pi * (k + S::c(0.75))) / (nn + S::c(0.5))).cos();
        for _ in 0..100 {
            let (pn, dpn) = legendre_with_derivative(n, xi);
            let step = pn / dpn;
            xi = xi - step;
            if step.abs() <= S::epsilon() * S::c(4.0) {
                break;
            }
        }
        let (_, dpn) = legendre_with_derivative(n, xi);
        x[i] = xi;
        w[i] = S::c(2.0) / ((S::one() - xi * xi) * dpn * dpn);
    }
    let half = S::c(0.5);
    for i in 0..n {
        x[i] = (x[i] + S::one()) * half;
        w[i] = w[i] * half;
    }
    (x, w)
}

/// Legendre polynomial `P_m` and its derivative at `x` in `[-1, 1]`.
pub fn legendre_with_derivative<S: Scalar>(m: usize, x: S) -> (S, S) {
    if m == 0 {
        return (S::one(), S::zero());
    }
    let mut pm1 = S::one();
    let mut pm = x;
    for k in 1..m {
        let kk = S::from_usize(k).unwrap();
        let next = ((S::c(2.0) * kk + S::one()) * x * pm - kk * pm1)
            / (kk + S::one());
        pm1 = pm;
        pm = next;
    }
    let denom = x * x - S::one();
    let dpm = if denom.abs() < S::epsilon() {
        // Endpoint values: P_m'(+-1) = (+-1)^{m-1} m (m + 1) / 2.
        let mm = S::from_usize(m).unwrap();
        let sign = if m % 2 == 0 { -S::one() } else { S::one() };
        let mag = mm * (mm + S::one()) * S::c(0.5);
        if x > S::zero() {
            mag
        } else {
            sign * mag
        }
    } else {
        S::from_usize(m).unwrap() * (x * pm - pm1) / denom
    };
    (pm, dpm)
}

/// Shifted Legendre polynomial `P_k` evaluated at `xi` in `[0, 1]`.
pub fn legendre_shifted<S: Scalar>(k: usize, xi: S) -> S {
    let x = S::c(2.0) * xi - S::one();
    legendre_with_derivative(k, x).0
}

fn barycentric_weights<S: Scalar>(nodes: &[S]) -> Vec<S> {
    let n = nodes.len();
    let mut w = vec![S::one(); n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                w[j] = w[j] / (nodes[j] - nodes[k]);
            }
        }
    }
    w
}

fn differentiation_matrix<S: Scalar>(nodes: &[S], bary: &[S]) -> Vec<S> {
    let n = nodes.len();
    let mut d = vec![S::zero(); n * n];
    for i in 0..n {
        let mut row_sum = S::zero();
        for j in 0..n {
            if i != j {
                let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                row_sum += v;
            }
        }
        d[i * n + i] = -row_sum;
    }
    d
}
