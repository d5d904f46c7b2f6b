//! Additive middle convolution of the rank-2 system and its integer-parameter variants.

use crate::analytic::{LinearOde, RationalSystem, Series, SystemGerm};
use crate::error::{Error, Result};
use crate::fuchsian::{
    build_system, residue_diagonals, weights, FuchsianSystem, HeunParams, ScalarODE2, SystemState, ThetaParams,
};
use crate::num_core::{cr, kernel_basis, rank, CMatrix, CPoly, CRational, CVector, C64};
use crate::weyl::{mc_kappa1_map, mc_kappa2_map, ExtParams};

const RANK_TOL: f64 = 1e-9;

/// Block residues `B_p` of the convolution with parameter `nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionSystem {
    pub nu: C64,
    pub b0: CMatrix,
    pub b1: CMatrix,
    pub bt: CMatrix,
    pub t: C64,
}

impl ConvolutionSystem {
    pub fn residues(&self) -> [&CMatrix; 3] {
        [&self.b0, &self.b1, &self.bt]
    }

    pub fn to_rational(&self) -> RationalSystem {
        RationalSystem::new(vec![cr(0.0), cr(1.0), self.t], vec![self.b0.clone(), self.b1.clone(), self.bt.clone()])
    }
}

/// Convolution residues for residues `a[p]` of any common size: `B_p` has
/// the row block `p` equal to `(A_1, ..., A_p + nu, ..., A_m)` and zeros elsewhere.
pub fn convolution_residues(a: &[CMatrix], nu: C64) -> Vec<CMatrix> {
    let m = a.len();
    let n = a.first().map_or(0, |x| x.nrows());
    (0..m)
        .map(|p| {
            let mut b = CMatrix::zeros(m * n, m * n);
            for (q, aq) in a.iter().enumerate() {
                let mut blk = aq.clone();
                if q == p {
                    blk += CMatrix::identity(n, n) * nu;
                }
                b.view_mut((p * n, q * n), (n, n)).copy_from(&blk);
            }
            b
        })
        .collect()
}

pub fn convolution_matrices(sys: &FuchsianSystem, nu: C64) -> ConvolutionSystem {
    let a = [sys.a0.clone(), sys.a1.clone(), sys.at.clone()];
    let mut b = convolution_residues(&a, nu).into_iter();
    ConvolutionSystem {
        nu,
        b0: b.next().unwrap_or_default(),
        b1: b.next().unwrap_or_default(),
        bt: b.next().unwrap_or_default(),
        t: sys.t,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSubspaces {
    pub l_basis: Vec<CVector>,
    pub k_basis: Vec<CVector>,
    pub quotient_dim: usize,
}

fn embed(block: usize, v: &CVector, blocks: usize) -> CVector {
    let n = v.len();
    let mut out = CVector::zeros(n * blocks);
    out.rows_mut(block * n, n).copy_from(v);
    out
}

fn subspaces_of(a: &[CMatrix], nu: C64) -> InvariantSubspaces {
    let m = a.len();
    let n = a.first().map_or(0, |x| x.nrows());
    let scale = a.iter().map(|x| x.norm()).fold(1.0, f64::max);
    let mut l_basis = vec![];
    for (p, ap) in a.iter().enumerate() {
        for v in kernel_basis(&(ap / cr(scale)), RANK_TOL) {
            l_basis.push(embed(p, &v, m));
        }
    }
    let b = convolution_residues(a, nu);
    let mut stacked = CMatrix::zeros(m * m * n, m * n);
    for (p, bp) in b.iter().enumerate() {
        stacked.view_mut((p * m * n, 0), (m * n, m * n)).copy_from(&(bp / cr(scale)));
    }
    let k_basis = kernel_basis(&stacked, RANK_TOL);
    let cols: Vec<CVector> = l_basis.iter().chain(&k_basis).cloned().collect();
    let r = if cols.is_empty() { 0 } else { rank(&CMatrix::from_columns(&cols), RANK_TOL) };
    InvariantSubspaces { l_basis, k_basis, quotient_dim: m * n - r }
}

/// `L = (+) Ker(A_p)` placed in block `p`, `K = cap Ker(B_p)`, and the
/// dimension of the quotient by `K + L`. Kernels are computed numerically.
pub fn invariant_subspaces(sys: &FuchsianSystem, _theta: &ThetaParams, nu: C64) -> InvariantSubspaces {
    subspaces_of(&[sys.a0.clone(), sys.a1.clone(), sys.at.clone()], nu)
}

/// Spanning vectors of `L_0, L_1, L_t` for the parameterized residues:
/// `(w_p, u_p + theta_p)` in block `p`.
pub fn displayed_l_vectors(theta: &ThetaParams, state: &SystemState) -> Result<[CVector; 3]> {
    let w = weights(state)?.as_array();
    let u = residue_diagonals(theta, state)?;
    let th = [theta.theta0, theta.theta1, theta.thetat];
    Ok([0, 1, 2].map(|p| embed(p, &CVector::from_vec(vec![w[p], u[p] + th[p]]), 3)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeS {
    pub s: CMatrix,
    pub lambda_tilde: C64,
}

const TINY: f64 = 1e-14;

pub fn gauge_s(theta: &ThetaParams, state: &SystemState) -> Result<GaugeS> {
    let (k1, k2) = (theta.kappa1(), theta.kappa2());
    if k1.norm() <= TINY || k2.norm() <= TINY {
        return Err(Error::GaugeUndefined("kappa1 kappa2 = 0".into()));
    }
    let l = state.finite_lambda()?;
    let (t, mu, k) = (state.t, state.mu, state.k);
    let w = weights(state)?;
    if w.is_degenerate() {
        return Err(Error::GaugeUndefined("a weight vanishes".into()));
    }
    let u = residue_diagonals(theta, state)?;
    let ext = ExtParams::new(*theta, l, mu, t);
    let lt = mc_kappa2_map(&ext).map_err(|e| Error::GaugeUndefined(format!("lambda~ undefined: {e}")))?.lambda;
    let s41 = (mu * (l - t) + k1) / (k * k1);
    let s61 = t * (mu * (l - 1.0) + k1) / (k * k1);
    let s42 = (lt - l) / (l * (l - 1.0) * k2);
    let s62 = t * (lt - l) / (l * (l - t) * k2);
    let z = cr(0.0);
    let o = cr(1.0);
    #[rustfmt::skip]
    let s = CMatrix::from_row_slice(6, 6, &[
        z,   z,   z, w.w0,             z,                  z,
        z,   z,   o, u[0] + theta.theta0, z,               z,
        z,   z,   z, z,                w.w1,               z,
        s41, s42, o, z,                u[1] + theta.theta1, z,
        z,   z,   z, z,                z,                  w.wt,
        s61, s62, o, z,                z,                  u[2] + theta.thetat,
    ]);
    let d = s.determinant();
    let scale = s.norm().powi(6).max(1.0);
    if !d.is_finite() || d.norm() <= 1e-13 * scale {
        return Err(Error::GaugeUndefined(format!("det S = {d}")));
    }
    Ok(GaugeS { s, lambda_tilde: lt })
}

/// `k^2 (lambda~ - lambda) / (t (1 - t) kappa2)`, the closed form of `det S`.
pub fn det_s_closed_form(theta: &ThetaParams, state: &SystemState, lambda_tilde: C64) -> Result<C64> {
    let l = state.finite_lambda()?;
    let t = state.t;
    Ok(state.k * state.k * (lambda_tilde - l) / (t * (1.0 - t) * theta.kappa2()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiddleConvolution {
    pub params: ExtParams,
    /// Upper-left 2x2 blocks of `S^{-1} B_p S`.
    pub system: FuchsianSystem,
    /// The full conjugated residues `S^{-1} B_p S`.
    pub conjugated: [CMatrix; 3],
    pub gauge: GaugeS,
}

impl MiddleConvolution {
    /// `sum_p S^{-1} B_p S / (z - p)`.
    pub fn eval(&self, z: C64) -> CMatrix {
        let t = self.system.t;
        &self.conjugated[0] / z + &self.conjugated[1] / (z - 1.0) + &self.conjugated[2] / (z - t)
    }
}

pub fn middle_convolution_kappa2(theta: &ThetaParams, state: &SystemState) -> Result<MiddleConvolution> {
    let l = state.finite_lambda()?;
    let params = mc_kappa2_map(&ExtParams::new(*theta, l, state.mu, state.t))?;
    let gauge = gauge_s(theta, state)?;
    let sys = build_system(theta, state)?;
    let conv = convolution_matrices(&sys, theta.kappa2());
    let si = gauge.s.clone().try_inverse().ok_or_else(|| Error::GaugeUndefined("S is singular".into()))?;
    let conjugated = conv.residues().map(|b| &si * b * &gauge.s);
    let blk = |m: &CMatrix| m.view((0, 0), (2, 2)).into_owned();
    let system = FuchsianSystem::new(state.t, blk(&conjugated[0]), blk(&conjugated[1]), blk(&conjugated[2]))?;
    Ok(MiddleConvolution { params, system, conjugated, gauge })
}

/// The conjugated coefficient matrix in closed form at `z`: the upper-left
/// block is the system of the mapped parameters with the same `k`, the
/// first two columns below it and the diagonal are explicit.
pub fn displayed_conjugate(theta: &ThetaParams, state: &SystemState, z: C64) -> Result<CMatrix> {
    let l = state.finite_lambda()?;
    let (t, k) = (state.t, state.k);
    let (k1, k2) = (theta.kappa1(), theta.kappa2());
    let p = mc_kappa2_map(&ExtParams::new(*theta, l, state.mu, t))?;
    let target = build_system(&p.theta, &SystemState::new(t, p.lambda, p.mu, k))?;
    let u0 = residue_diagonals(theta, state)?[0];
    let mut m = CMatrix::zeros(6, 6);
    m.view_mut((0, 0), (2, 2)).copy_from(&target.eval(z));
    m[(2, 0)] = -(u0 + theta.theta0) * theta.thetainf * t / (k * k1 * l * z);
    m[(2, 1)] = p.lambda / (l * z);
    m[(3, 0)] = t / (k * l * z);
    m[(4, 0)] = (1.0 - t) / (k * (l - 1.0) * (z - 1.0));
    m[(5, 0)] = t * (t - 1.0) / (k * (l - t) * (z - t));
    m[(3, 3)] = k2 / z;
    m[(4, 4)] = k2 / (z - 1.0);
    m[(5, 5)] = k2 / (z - t);
    Ok(m)
}

/// An integrand `f(w, Y(w), Y'(w))` for a source solution `Y`.
pub type IntegrandFn = Box<dyn Fn(C64, &CVector, &CVector) -> C64 + Send + Sync>;

/// Integrands against `(z - w)^nu`, one per target component.
pub struct TransformKernels {
    pub nu: C64,
    pub integrands: Vec<IntegrandFn>,
}

impl std::fmt::Debug for TransformKernels {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformKernels").field("nu", &self.nu).field("components", &self.integrands.len()).finish()
    }
}

/// Prefactor `kappa2 lambda (lambda-1)(lambda-t) / (k (lambda - lambda~))` of
/// the second component.
fn second_prefactor(theta: &ThetaParams, state: &SystemState) -> Result<(C64, C64)> {
    let l = state.finite_lambda()?;
    let k1 = theta.kappa1();
    if k1.norm() <= TINY {
        return Err(Error::KernelUndefined("kappa1 = 0".into()));
    }
    let lt = mc_kappa2_map(&ExtParams::new(*theta, l, state.mu, state.t))
        .map_err(|e| Error::KernelUndefined(e.to_string()))?
        .lambda;
    if (lt - l).norm() <= TINY {
        return Err(Error::KernelUndefined("lambda~ = lambda".into()));
    }
    let c = theta.kappa2() * l * (l - 1.0) * (l - state.t) / (state.k * (l - lt));
    Ok((c, l))
}

/// Integrands for the convolution with `nu = kappa2`, acting on solutions
/// `Y = (y1, y2)` of the source system.
pub fn transform_integrands_kappa2(theta: &ThetaParams, state: &SystemState) -> Result<TransformKernels> {
    let (c, l) = second_prefactor(theta, state)?;
    let mu = state.mu;
    let k1 = theta.kappa1();
    Ok(TransformKernels {
        nu: theta.kappa2(),
        integrands: vec![
            Box::new(|_, _, dy| dy[0]),
            Box::new(move |w, y, dy| c * ((dy[0] - mu * y[0]) / (l - w) + mu / k1 * dy[0])),
        ],
    })
}

/// `y1(w) (z - w)^{kappa2 - 1}`, the scalar transform on the first component.
pub fn scalar_integrand_kappa2(theta: &ThetaParams) -> TransformKernels {
    TransformKernels { nu: theta.kappa2() - 1.0, integrands: vec![Box::new(|_, y, _| y[0])] }
}

/// Integrands for the convolution with `nu = kappa1`, acting on solutions
/// `Y = (y1, y2)` of the source system.
pub fn transform_integrands_kappa1(theta: &ThetaParams, state: &SystemState) -> Result<TransformKernels> {
    let l = state.finite_lambda()?;
    let (k1, k2) = (theta.kappa1(), theta.kappa2());
    if k2.norm() <= TINY {
        return Err(Error::KernelUndefined("kappa2 = 0".into()));
    }
    let lt = mc_kappa1_map(&ExtParams::new(*theta, l, state.mu, state.t))
        .map_err(|e| Error::KernelUndefined(e.to_string()))?
        .lambda;
    let c2 = -theta.thetainf / k2;
    Ok(TransformKernels {
        nu: k1,
        integrands: vec![
            Box::new(move |w, y, dy| (k1 * y[0] + (w - lt) * dy[0]) / (w - l)),
            Box::new(move |_, _, dy| c2 * dy[1]),
        ],
    })
}

/// How a transform with parameter `kappa` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformRoute {
    /// `kappa = -n`, `n > 0`: repeated differentiation.
    Derivative(u32),
    /// `kappa = n > 0`: loops starting and ending at `w = z`.
    CpLoop(u32),
    Pochhammer,
}

pub fn transform_route(kappa: C64) -> TransformRoute {
    let r = kappa.re.round();
    if (kappa - cr(r)).norm() > 1e-12 {
        return TransformRoute::Pochhammer;
    }
    match r as i64 {
        n if n < 0 => TransformRoute::Derivative((-n) as u32),
        n if n > 0 => TransformRoute::CpLoop(n as u32),
        _ => TransformRoute::Pochhammer,
    }
}

fn negative_integer(x: C64, what: &str) -> Result<u32> {
    match transform_route(x) {
        TransformRoute::Derivative(n) => Ok(n),
        _ if x.norm() <= TINY => Ok(0),
        _ => Err(Error::WrongBranch(format!("{what} = {x} is not a nonpositive integer"))),
    }
}

/// Which parameter the differential transform uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Kappa1,
    Kappa2,
}

/// Differential form of the transforms at a nonpositive integer parameter,
/// applied to a series solution `(y1, y2)` of the source system. Returns the
/// series of the target solution and the target parameters.
pub fn derivative_transform(
    theta: &ThetaParams,
    state: &SystemState,
    germ: &SystemGerm,
    branch: Branch,
) -> Result<([Series; 2], ExtParams)> {
    let l = state.finite_lambda()?;
    let ext = ExtParams::new(*theta, l, state.mu, state.t);
    let y1 = germ.component(0);
    let y2 = germ.component(1);
    match branch {
        Branch::Kappa2 => {
            let n = negative_integer(theta.kappa2(), "kappa2")? as usize;
            if n == 0 {
                return Ok(([y1, y2], ext));
            }
            let p = mc_kappa2_map(&ext)?;
            let (c, l) = second_prefactor(theta, state)?;
            let d1 = y1.derivative();
            let bracket =
                d1.add(&y1.scale(-state.mu))?.div_vanishing_at(l)?.add(&d1.scale(state.mu / theta.kappa1()))?;
            Ok(([y1.nth_derivative(n), bracket.nth_derivative(n - 1).scale(c)], p))
        }
        Branch::Kappa1 => {
            let n = negative_integer(theta.kappa1(), "kappa1")? as usize;
            if n == 0 {
                return Ok(([y1, y2], ext));
            }
            let p = mc_kappa1_map(&ext)?;
            let lt = p.lambda;
            let inner = y1
                .scale(theta.kappa1())
                .add(&y1.derivative().mul_poly(&CPoly::linear(lt)))?
                .div_vanishing_at(l)?
                .scale(cr(-1.0));
            if theta.kappa2().norm() <= TINY {
                return Err(Error::KernelUndefined("kappa2 = 0".into()));
            }
            let c2 = -theta.thetainf / theta.kappa2();
            Ok(([inner.nth_derivative(n - 1), y2.nth_derivative(n).scale(c2)], p))
        }
    }
}

fn relative_window(terms: &[&Series], order: usize) -> Result<f64> {
    let base = terms[0];
    let mut sum = Series::new(base.base, base.exponent, vec![cr(0.0); order.max(1)]);
    for s in terms {
        sum = sum.add(s)?;
    }
    let len = terms.iter().map(|s| s.len()).min().unwrap_or(0);
    if sum.len() < order.min(len) {
        return Err(Error::InvalidInput("series too short for the requested order".into()));
    }
    let n = order.min(sum.len());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let scale = terms.iter().map(|s| coeff_aligned(s, &sum, i)).fold(0.0, f64::max);
        let r = sum.coeffs[i].norm();
        if scale > 0.0 {
            worst = worst.max(r / scale);
        } else if r > 0.0 {
            worst = f64::INFINITY;
        }
    }
    Ok(worst)
}

fn coeff_aligned(s: &Series, reference: &Series, i: usize) -> f64 {
    let d = (s.exponent - reference.exponent).re.round() as i64;
    let j = i as i64 - d;
    if j < 0 {
        0.0
    } else {
        s.coeffs.get(j as usize).map_or(0.0, |x| x.norm())
    }
}

/// Coefficientwise relative residual of `Y' = A(z) Y` cleared of
/// denominators, over the first `order` coefficients.
pub fn system_series_residual(sys: &RationalSystem, y: &[Series], order: usize) -> Result<f64> {
    let n = sys.dim();
    if y.len() != n {
        return Err(Error::InvalidInput("series count does not match the system size".into()));
    }
    let den = CPoly::from_roots(cr(1.0), &sys.poles);
    let cofactors: Vec<CPoly> = sys
        .poles
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let others: Vec<C64> = sys.poles.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p).collect();
            CPoly::from_roots(cr(1.0), &others)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut terms = vec![y[i].derivative().mul_poly(&den).scale(cr(-1.0))];
        for (r, cof) in sys.residues.iter().zip(&cofactors) {
            for (j, yj) in y.iter().enumerate() {
                if r[(i, j)] != cr(0.0) {
                    terms.push(yj.mul_poly(cof).scale(r[(i, j)]));
                }
            }
        }
        let refs: Vec<&Series> = terms.iter().collect();
        worst = worst.max(relative_window(&refs, order)?);
    }
    Ok(worst)
}

/// Coefficientwise relative residual of `y'' + p1 y' + p2 y = 0` cleared of
/// denominators, over the first `order` coefficients.
pub fn scalar_series_residual(ode: &ScalarODE2, y: &Series, order: usize) -> Result<f64> {
    let d1 = ode.p1.den();
    let d2 = ode.p2.den();
    let a = y.nth_derivative(2).mul_poly(&d1.mul(&d2));
    let b = y.derivative().mul_poly(&ode.p1.num().mul(&d2));
    let c = y.mul_poly(&ode.p2.num().mul(&d1));
    relative_window(&[&a, &b, &c], order)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorCheck {
    pub max_residual: f64,
    pub source_residual: f64,
}

/// Checks that the vector of `n`-th derivatives of `y_i(z) / (z - p)` solves
/// the convolution system with `nu = -1 - n`, for a series solution `germ`
/// of `sys` with any size and any number of finite poles.
pub fn verify_convolution_vector(
    sys: &RationalSystem,
    nu: C64,
    germ: &SystemGerm,
    samples: &[C64],
) -> Result<VectorCheck> {
    let n = match transform_route(nu) {
        TransformRoute::Derivative(m) => (m - 1) as usize,
        _ => return Err(Error::WrongBranch(format!("nu = {nu} is not a negative integer"))),
    };
    let dim = sys.dim();
    let comps: Vec<Series> = (0..dim).map(|i| germ.component(i)).collect();
    let mut source: f64 = 0.0;
    for z in samples {
        let y = CVector::from_iterator(dim, comps.iter().map(|s| s.eval(*z)));
        let dy = CVector::from_iterator(dim, comps.iter().map(|s| s.derivative().eval(*z)));
        let ay = sys.eval(*z)? * &y;
        source = source.max((&dy - &ay).norm() / (dy.norm() + ay.norm()).max(1e-300));
    }
    if source > 1e-8 {
        return Err(Error::BadGerm(source));
    }
    let mut u_series = vec![];
    for p in &sys.poles {
        for s in &comps {
            let divided = if (p - germ.base).norm() == 0.0 {
                Series::new(s.base, s.exponent - 1.0, s.coeffs.clone())
            } else {
                s.mul_rational(&CRational::simple_pole(cr(1.0), *p))?
            };
            u_series.push(divided.nth_derivative(n));
        }
    }
    let big = RationalSystem::new(sys.poles.clone(), convolution_residues(&sys.residues, nu));
    let m = u_series.len();
    let mut worst: f64 = 0.0;
    for z in samples {
        let u = CVector::from_iterator(m, u_series.iter().map(|s| s.eval(*z)));
        let du = CVector::from_iterator(m, u_series.iter().map(|s| s.derivative().eval(*z)));
        let bu = big.eval(*z)? * &u;
        worst = worst.max((&du - &bu).norm() / (du.norm() + bu.norm()).max(1e-300));
    }
    Ok(VectorCheck { max_residual: worst, source_residual: source })
}

/// Parameters of the Heun equation whose solutions are mapped by the Euler
/// kernel `(z - w)^{-eta}` to solutions of `target`; `eta` must be one of
/// `alpha`, `beta`.
pub fn heun_euler_source(target: &HeunParams, eta: C64) -> Result<HeunParams> {
    let h = target;
    let root = (eta - h.alpha) * (eta - h.beta);
    if root.norm() > 1e-10 * (1.0 + h.alpha.norm() * h.beta.norm()) {
        return Err(Error::InvalidInput(format!("eta = {eta} is neither alpha nor beta")));
    }
    let s = 1.0 - eta;
    HeunParams::new(
        h.gamma + s,
        h.delta + s,
        h.epsilon + s,
        2.0 - eta,
        -2.0 * eta + h.alpha + h.beta + 1.0,
        h.q + s * (h.epsilon + h.delta * h.t + (h.gamma - eta) * (h.t + 1.0)),
        h.t,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num_core::c;

    fn draw() -> (ThetaParams, SystemState) {
        (
            ThetaParams::from_array([c(0.31, 0.12), c(-0.22, 0.4), c(0.17, -0.3), c(0.73, 0.05)]),
            SystemState::new(c(2.3, 0.4), c(0.41, 0.27), c(0.6, -0.35), c(1.2, 0.3)),
        )
    }

    #[test]
    fn zero_nu_row_block() {
        let (th, st) = draw();
        let sys = build_system(&th, &st).unwrap();
        let b = convolution_matrices(&sys, cr(0.0));
        assert_eq!(b.b0.view((0, 2), (2, 2)).into_owned(), sys.a1);
        assert!(b.b0.view((2, 0), (4, 6)).iter().all(|x| *x == cr(0.0)));
        assert!((b.b0.trace() - th.theta0).norm() < 1e-12);
    }

    #[test]
    fn s42_example() {
        let th = ThetaParams::from_array([cr(0.0), cr(0.0), cr(0.0), cr(2.0)]);
        let st = SystemState::new(cr(2.0), cr(0.5), cr(1.0), cr(1.0));
        let g = gauge_s(&th, &st).unwrap();
        assert!((g.lambda_tilde - 1.5).norm() < 1e-14);
        assert!((g.s[(3, 1)] - 4.0).norm() < 1e-13);
    }

    #[test]
    fn quotient_dimensions() {
        let (th, st) = draw();
        let sys = build_system(&th, &st).unwrap();
        assert_eq!(invariant_subspaces(&sys, &th, th.kappa2()).quotient_dim, 2);
        assert_eq!(invariant_subspaces(&sys, &th, th.kappa1()).quotient_dim, 2);
        assert_eq!(invariant_subspaces(&sys, &th, th.kappa2() + 1e-3).quotient_dim, 3);
    }

    #[test]
    fn routes() {
        assert_eq!(transform_route(cr(-2.0)), TransformRoute::Derivative(2));
        assert_eq!(transform_route(cr(3.0)), TransformRoute::CpLoop(3));
        assert_eq!(transform_route(c(0.5, 0.1)), TransformRoute::Pochhammer);
    }
}
