//! The parameterized rank-2 system with singular points {0, 1, t, inf}, its
//! scalar reduction and Heun normal forms.

use crate::analytic::RationalSystem;
use crate::error::{Error, Result};
use crate::num_core::{cr, mat2, near, CMatrix, CPoly, CRational, C64, GUARD};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    pub theta0: C64,
    pub theta1: C64,
    pub thetat: C64,
    pub thetainf: C64,
}

impl ThetaParams {
    pub fn new(theta0: C64, theta1: C64, thetat: C64, thetainf: C64) -> Self {
        Self { theta0, theta1, thetat, thetainf }
    }

    pub fn from_array(a: [C64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn as_array(&self) -> [C64; 4] {
        [self.theta0, self.theta1, self.thetat, self.thetainf]
    }

    pub fn kappa1(&self) -> C64 {
        (self.thetainf - self.theta0 - self.theta1 - self.thetat) * 0.5
    }

    pub fn kappa2(&self) -> C64 {
        -(self.thetainf + self.theta0 + self.theta1 + self.thetat) * 0.5
    }

    /// Every exponent shifted by `nu`.
    pub fn shifted(&self, nu: C64) -> Self {
        Self::new(self.theta0 + nu, self.theta1 + nu, self.thetat + nu, self.thetainf + nu)
    }

    /// Exponent at the finite singular point with index 0, 1, 2 (= t).
    pub fn at(&self, p: usize) -> C64 {
        [self.theta0, self.theta1, self.thetat][p]
    }
}

pub fn kappas(theta: &ThetaParams) -> (C64, C64) {
    (theta.kappa1(), theta.kappa2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda {
    Finite(C64),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    pub t: C64,
    pub lambda: Lambda,
    pub mu: C64,
    pub k: C64,
}

impl SystemState {
    pub fn new(t: C64, lambda: C64, mu: C64, k: C64) -> Self {
        Self { t, lambda: Lambda::Finite(lambda), mu, k }
    }

    pub fn validate(&self) -> Result<()> {
        if near(self.k, cr(0.0)) {
            return Err(Error::InvalidInput("k must be nonzero".into()));
        }
        if near(self.t, cr(0.0)) || near(self.t, cr(1.0)) {
            return Err(Error::InvalidInput("t must avoid {0, 1}".into()));
        }
        if !(self.t.is_finite() && self.mu.is_finite() && self.k.is_finite()) {
            return Err(Error::InvalidInput("non-finite state".into()));
        }
        Ok(())
    }

    pub fn finite_lambda(&self) -> Result<C64> {
        match self.lambda {
            Lambda::Finite(l) => Ok(l),
            Lambda::Infinity => Err(Error::UseInfinityRealization),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub w0: C64,
    pub w1: C64,
    pub wt: C64,
}

impl Weights {
    pub fn as_array(&self) -> [C64; 3] {
        [self.w0, self.w1, self.wt]
    }

    /// Some weight sits inside the guard band of zero.
    pub fn is_degenerate(&self) -> bool {
        self.as_array().iter().any(|w| w.norm() <= GUARD)
    }
}

pub fn weights(state: &SystemState) -> Result<Weights> {
    state.validate()?;
    let l = state.finite_lambda()?;
    let (t, k) = (state.t, state.k);
    Ok(Weights { w0: k * l / t, w1: -k * (l - 1.0) / (t - 1.0), wt: k * (l - t) / (t * (t - 1.0)) })
}

/// Diagonal entries `u0, u1, ut` of the residues.
pub fn residue_diagonals(theta: &ThetaParams, state: &SystemState) -> Result<[C64; 3]> {
    let l = state.finite_lambda()?;
    let t = state.t;
    let mu = state.mu;
    let (t0, t1, tt, ti) = (theta.theta0, theta.theta1, theta.thetat, theta.thetainf);
    let k1 = theta.kappa1();
    let q = l * (l - 1.0) * (l - t) * mu * mu;
    let u0 = -t0
        + l / (t * ti)
            * (q + (2.0 * k1 * (l - 1.0) * (l - t) - t1 * (l - t) - t * tt * (l - 1.0)) * mu
                + k1 * (k1 * (l - t - 1.0) - t1 - t * tt));
    let u1 = -t1
        - (l - 1.0) / ((t - 1.0) * ti)
            * (q + (2.0 * k1 * (l - 1.0) * (l - t) + (ti - t1) * (l - t) - t * tt * (l - 1.0)) * mu
                + k1 * (k1 * (l - t + 1.0) + t0 - (t - 1.0) * tt));
    let ut = -tt
        + (l - t) / (t * (t - 1.0) * ti)
            * (q + (2.0 * k1 * (l - 1.0) * (l - t) - t1 * (l - t) + t * (ti - tt) * (l - 1.0)) * mu
                + k1 * (k1 * (l - t + 1.0) + t0 + (t - 1.0) * (ti - tt)));
    Ok([u0, u1, ut])
}

/// `A = [[u + theta, -w], [u (u + theta) / w, -u]]`.
pub fn residue_matrix(u: C64, w: C64, theta: C64) -> CMatrix {
    mat2(u + theta, -w, u * (u + theta) / w, -u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuchsianSystem {
    pub t: C64,
    pub a0: CMatrix,
    pub a1: CMatrix,
    pub at: CMatrix,
}

impl FuchsianSystem {
    pub fn new(t: C64, a0: CMatrix, a1: CMatrix, at: CMatrix) -> Result<Self> {
        for m in [&a0, &a1, &at] {
            if m.shape() != (2, 2) {
                return Err(Error::InvalidInput("residues must be 2x2".into()));
            }
            if !m.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidInput("non-finite residue entry".into()));
            }
        }
        Ok(Self { t, a0, a1, at })
    }

    pub fn poles(&self) -> [C64; 3] {
        [cr(0.0), cr(1.0), self.t]
    }

    pub fn residues(&self) -> [&CMatrix; 3] {
        [&self.a0, &self.a1, &self.at]
    }

    /// `A_inf = -(A0 + A1 + At)`.
    pub fn a_inf(&self) -> CMatrix {
        -(&self.a0 + &self.a1 + &self.at)
    }

    pub fn eval(&self, z: C64) -> CMatrix {
        &self.a0 / z + &self.a1 / (z - 1.0) + &self.at / (z - self.t)
    }

    /// Entry `(i, j)` of `A(z)` as a rational function.
    pub fn entry(&self, i: usize, j: usize) -> CRational {
        self.poles()
            .iter()
            .zip(self.residues())
            .fold(CRational::zero(), |acc, (p, m)| acc.add(&CRational::simple_pole(m[(i, j)], *p)))
    }

    /// `G^{-1} A_p G` for every residue.
    pub fn conjugate(&self, g: &CMatrix) -> Result<Self> {
        let gi = g.clone().try_inverse().ok_or_else(|| Error::InvalidInput("singular gauge".into()))?;
        Self::new(self.t, &gi * &self.a0 * g, &gi * &self.a1 * g, &gi * &self.at * g)
    }

    pub fn to_rational(&self) -> RationalSystem {
        RationalSystem::new(self.poles().to_vec(), vec![self.a0.clone(), self.a1.clone(), self.at.clone()])
    }
}

fn check_generic(theta: &ThetaParams, state: &SystemState) -> Result<C64> {
    state.validate()?;
    let l = state.finite_lambda()?;
    if near(l, cr(0.0)) {
        return Err(Error::UseLineRealization("lambda = 0".into()));
    }
    if near(l, cr(1.0)) {
        return Err(Error::UseLineRealization("lambda = 1".into()));
    }
    if near(l, state.t) {
        return Err(Error::UseLineRealization("lambda = t".into()));
    }
    if theta.thetainf.norm() <= GUARD {
        return Err(Error::DegenerateThetaInf);
    }
    Ok(l)
}

pub fn build_system(theta: &ThetaParams, state: &SystemState) -> Result<FuchsianSystem> {
    check_generic(theta, state)?;
    let w = weights(state)?;
    let u = residue_diagonals(theta, state)?;
    let th = [theta.theta0, theta.theta1, theta.thetat];
    let ws = w.as_array();
    let m: Vec<CMatrix> = (0..3).map(|p| residue_matrix(u[p], ws[p], th[p])).collect();
    FuchsianSystem::new(state.t, m[0].clone(), m[1].clone(), m[2].clone())
}

/// Relative residual of the defining relations (linear relations for the
/// weights and residue diagonals, the quadratic constraint, and a11(lambda) = mu).
pub fn construction_residual(theta: &ThetaParams, state: &SystemState, sys: &FuchsianSystem) -> Result<f64> {
    let l = state.finite_lambda()?;
    let t = state.t;
    let (k1, k2) = kappas(theta);
    let w = [-sys.a0[(0, 1)], -sys.a1[(0, 1)], -sys.at[(0, 1)]];
    let u = [-sys.a0[(1, 1)], -sys.a1[(1, 1)], -sys.at[(1, 1)]];
    let th = [theta.theta0, theta.theta1, theta.thetat];
    let scale = 1.0 + w.iter().chain(u.iter()).map(|x| x.norm()).fold(0.0, f64::max);
    let mut r: Vec<C64> = vec![
        w[0] + w[1] + w[2],
        w[0] * (t + 1.0) + w[1] * t + w[2] - state.k,
        u[0] + u[1] + u[2] - k2,
        (u[0] + th[0]) + (u[1] + th[1]) + (u[2] + th[2]) + k1,
        w[0] * t - state.k * l,
        (0..3).map(|p| u[p] * (u[p] + th[p]) / w[p]).sum::<C64>(),
        sys.entry(0, 0).eval(l)? - state.mu,
    ];
    // a12(z) = -k (z - lambda) / (z (z-1) (z-t)): zero at lambda
    r.push(sys.entry(0, 1).num().eval(l) / (1.0 + l.norm()).powi(2));
    let a_inf = sys.a_inf();
    r.push(a_inf[(0, 0)] - k1);
    r.push(a_inf[(1, 1)] - k2);
    r.push(a_inf[(0, 1)]);
    r.push(a_inf[(1, 0)]);
    Ok(r.iter().map(|x| x.norm()).fold(0.0, f64::max) / scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarODE2 {
    pub p1: CRational,
    pub p2: CRational,
    pub hamiltonian: Option<C64>,
}

impl ScalarODE2 {
    pub fn new(p1: CRational, p2: CRational) -> Self {
        Self { p1, p2, hamiltonian: None }
    }

    pub fn eval(&self, z: C64) -> Result<(C64, C64)> {
        Ok((self.p1.eval(z)?, self.p2.eval(z)?))
    }

    /// Relative residual of `y'' + p1 y' + p2 y` at `z`.
    pub fn residual(&self, y: C64, dy: C64, d2y: C64, z: C64) -> Result<f64> {
        let (a, b) = self.eval(z)?;
        let terms = [d2y, a * dy, b * y];
        let scale: f64 = terms.iter().map(|x| x.norm()).sum();
        let s: C64 = terms.iter().sum();
        Ok(if scale == 0.0 { 0.0 } else { s.norm() / scale })
    }

    /// Finite singular points (distinct poles of p1 or p2).
    pub fn singular_points(&self) -> Vec<C64> {
        let mut out = self.p1.distinct_poles();
        for p in self.p2.distinct_poles() {
            if !out.iter().any(|q| (q - p).norm() <= 1e-9 * (1.0 + p.norm())) {
                out.push(p);
            }
        }
        out
    }

    /// Equation satisfied by `v` where `y = (z - a) v`.
    pub fn gauge_linear(&self, a: C64) -> Self {
        let lg = CRational::simple_pole(cr(1.0), a);
        let p1 = self.p1.add(&lg.scale(cr(2.0)));
        let p2 = self.p2.add(&self.p1.mul(&lg));
        Self { p1, p2, hamiltonian: None }
    }
}

pub fn reduce_to_scalar(sys: &FuchsianSystem) -> Result<ScalarODE2> {
    let a11 = sys.entry(0, 0);
    let a12 = sys.entry(0, 1);
    let a21 = sys.entry(1, 0);
    let a22 = sys.entry(1, 1);
    let scale = sys.residues().iter().map(|m| crate::num_core::max_abs(m)).fold(0.0, f64::max);
    let a12max = [sys.a0[(0, 1)], sys.a1[(0, 1)], sys.at[(0, 1)]].iter().map(|x| x.norm()).fold(0.0, f64::max);
    if a12.is_zero() || a12max <= 1e-13 * (1.0 + scale) {
        return Err(Error::FirstOrderReducible);
    }
    let l12 = a12.derivative().div(&a12)?;
    let p1 = a11.add(&a22).add(&l12).neg();
    let p2 = a11.mul(&a22).sub(&a12.mul(&a21)).sub(&a11.derivative()).add(&a11.mul(&l12));
    Ok(ScalarODE2::new(p1, p2))
}

/// The Hamiltonian attached to `(lambda, mu)`.
pub fn hamiltonian(theta: &ThetaParams, state: &SystemState) -> Result<C64> {
    let l = state.finite_lambda()?;
    let (t, mu) = (state.t, state.mu);
    let (k1, k2) = kappas(theta);
    let (t0, t1, tt) = (theta.theta0, theta.theta1, theta.thetat);
    Ok((l * (l - 1.0) * (l - t) * mu * mu
        - (t0 * (l - 1.0) * (l - t) + t1 * l * (l - t) + (tt - 1.0) * l * (l - 1.0)) * mu
        + k1 * (k2 + 1.0) * (l - t))
        / (t * (t - 1.0)))
}

/// The scalar equation for the first component, written directly in terms
/// of `(lambda, mu)` and the Hamiltonian.
pub fn scalar_ode_of_parameters(theta: &ThetaParams, state: &SystemState) -> Result<ScalarODE2> {
    state.validate()?;
    let l = state.finite_lambda()?;
    let t = state.t;
    if near(l, cr(0.0)) || near(l, cr(1.0)) || near(l, t) {
        return Err(Error::UseLineRealization("lambda on a fixed singular point".into()));
    }
    let h = hamiltonian(theta, state)?;
    let (k1, k2) = kappas(theta);
    let z0 = cr(0.0);
    let z1 = cr(1.0);
    let p1 = CRational::simple_pole(1.0 - theta.theta0, z0)
        .add(&CRational::simple_pole(1.0 - theta.theta1, z1))
        .add(&CRational::simple_pole(1.0 - theta.thetat, t))
        .add(&CRational::simple_pole(cr(-1.0), l));
    let p2 = CRational::from_factored(CPoly::constant(k1 * (k2 + 1.0)), vec![z0, z1])
        .add(&CRational::from_factored(CPoly::constant(l * (l - 1.0) * state.mu), vec![z0, z1, l]))
        .add(&CRational::from_factored(CPoly::constant(-t * (t - 1.0) * h), vec![z0, z1, t]));
    Ok(ScalarODE2 { p1, p2, hamiltonian: Some(h) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunParams {
    pub gamma: C64,
    pub delta: C64,
    pub epsilon: C64,
    pub alpha: C64,
    pub beta: C64,
    pub q: C64,
    pub t: C64,
}

const FUCHS_TOL: f64 = 1e-8;

/// Order a pair by (real part, imaginary part).
pub fn canonical_pair(a: C64, b: C64) -> (C64, C64) {
    let key = |x: C64| (x.re, x.im);
    if key(a) <= key(b) {
        (a, b)
    } else {
        (b, a)
    }
}

impl HeunParams {
    pub fn new(gamma: C64, delta: C64, epsilon: C64, alpha: C64, beta: C64, q: C64, t: C64) -> Result<Self> {
        let (alpha, beta) = canonical_pair(alpha, beta);
        let h = Self { gamma, delta, epsilon, alpha, beta, q, t };
        let d = h.fuchs_defect();
        if d > FUCHS_TOL {
            return Err(Error::NotHeunShaped(format!("Fuchs relation violated by {d:e}")));
        }
        if near(t, cr(0.0)) || near(t, cr(1.0)) {
            return Err(Error::InvalidInput("t must avoid {0, 1}".into()));
        }
        Ok(h)
    }

    /// Parameters from `alpha beta` and the Fuchs relation.
    pub fn from_product(gamma: C64, delta: C64, epsilon: C64, ab: C64, q: C64, t: C64) -> Result<Self> {
        let s = gamma + delta + epsilon - 1.0;
        let disc = (s * s - 4.0 * ab).sqrt();
        Self::new(gamma, delta, epsilon, (s - disc) * 0.5, (s + disc) * 0.5, q, t)
    }

    pub fn fuchs_defect(&self) -> f64 {
        (self.gamma + self.delta + self.epsilon - self.alpha - self.beta - 1.0).norm()
    }

    pub fn to_ode(&self) -> ScalarODE2 {
        let t = self.t;
        let p1 = CRational::simple_pole(self.gamma, cr(0.0))
            .add(&CRational::simple_pole(self.delta, cr(1.0)))
            .add(&CRational::simple_pole(self.epsilon, t));
        let p2 = CRational::from_factored(CPoly::new(vec![-self.q, self.alpha * self.beta]), vec![cr(0.0), cr(1.0), t]);
        ScalarODE2::new(p1, p2)
    }

    /// Maximum parameter distance, with the `{alpha, beta}` pair compared as
    /// a set.
    pub fn distance(&self, o: &Self) -> f64 {
        let ab = ((self.alpha - o.alpha).norm().max((self.beta - o.beta).norm()))
            .min((self.alpha - o.beta).norm().max((self.beta - o.alpha).norm()));
        [self.gamma - o.gamma, self.delta - o.delta, self.epsilon - o.epsilon, self.q - o.q, self.t - o.t]
            .iter()
            .map(|x| x.norm())
            .fold(ab, f64::max)
    }
}

pub fn heun_normal_form(ode: &ScalarODE2) -> Result<HeunParams> {
    let sing = ode.singular_points();
    let close = |a: C64, b: C64| (a - b).norm() <= 1e-9 * (1.0 + b.norm());
    let others: Vec<C64> = sing.iter().copied().filter(|p| !close(*p, cr(0.0)) && !close(*p, cr(1.0))).collect();
    match others.len() {
        1 => heun_normal_form_at(ode, others[0]),
        0 => Err(Error::NotHeunShaped("cannot locate the third finite singular point".into())),
        n => Err(Error::NotHeunShaped(format!("{} finite singular points besides 0 and 1", n))),
    }
}

/// As `heun_normal_form`, with the third singular point given.
pub fn heun_normal_form_at(ode: &ScalarODE2, t: C64) -> Result<HeunParams> {
    let pts = [cr(0.0), cr(1.0), t];
    let close = |a: C64, b: C64| (a - b).norm() <= 1e-9 * (1.0 + b.norm());
    for p in ode.singular_points() {
        if !pts.iter().any(|q| close(p, *q)) {
            return Err(Error::NotHeunShaped(format!("extra singular point at {p}")));
        }
    }
    let mut res = [cr(0.0); 3];
    for (i, p) in pts.iter().enumerate() {
        res[i] = ode.p1.residue(*p).map_err(|_| Error::NotHeunShaped("p1 has a higher-order pole".into()))?;
    }
    let partial = pts.iter().zip(res).fold(CRational::zero(), |acc, (p, r)| acc.add(&CRational::simple_pole(r, *p)));
    let rest = ode.p1.sub(&partial);
    let scale = 1.0 + res.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if rest.num().coeffs().iter().any(|x| x.norm() > 1e-9 * scale) {
        return Err(Error::NotHeunShaped("p1 is not a sum of simple fractions".into()));
    }
    let cub = CRational::poly(CPoly::from_roots(cr(1.0), &pts));
    let lin = ode.p2.mul(&cub);
    let nscale = 1.0 + lin.num().coeffs().iter().map(|x| x.norm()).fold(0.0, f64::max);
    if !lin.poles().is_empty() || lin.num().coeffs().iter().skip(2).any(|x| x.norm() > 1e-9 * nscale) {
        return Err(Error::NotHeunShaped("p2 z(z-1)(z-t) is not affine".into()));
    }
    let ab = lin.num().coeff(1);
    let q = -lin.num().coeff(0);
    HeunParams::from_product(res[0], res[1], res[2], ab, q, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num_core::c;

    #[test]
    fn kappa_examples() {
        let th = ThetaParams::from_array([cr(1.0); 4]);
        assert_eq!(kappas(&th), (cr(-1.0), cr(-2.0)));
    }

    #[test]
    fn weights_example() {
        let s = SystemState::new(cr(2.0), cr(0.5), cr(1.0), cr(1.0));
        let w = weights(&s).unwrap();
        assert!((w.w0 - 0.25).norm() < 1e-15);
        assert!((w.w1 - 0.5).norm() < 1e-15);
        assert!((w.wt + 0.75).norm() < 1e-15);
        let s = SystemState::new(cr(3.0), cr(0.0), cr(1.0), cr(2.0));
        assert!(weights(&s).unwrap().is_degenerate());
    }

    #[test]
    fn hamiltonian_example() {
        let th = ThetaParams::from_array([cr(0.0), cr(0.0), cr(0.0), cr(2.0)]);
        let s = SystemState::new(cr(2.0), cr(0.5), cr(1.0), cr(1.0));
        assert!((hamiltonian(&th, &s).unwrap() - 1.0 / 16.0).norm() < 1e-15);
    }

    #[test]
    fn line_lambda_is_rejected() {
        let th = ThetaParams::from_array([c(0.1, 0.0), cr(0.2), cr(0.3), cr(0.7)]);
        let s = SystemState::new(cr(2.0), cr(1.0), cr(1.0), cr(1.0));
        assert!(matches!(build_system(&th, &s), Err(Error::UseLineRealization(_))));
        let s = SystemState { lambda: Lambda::Infinity, ..s };
        assert_eq!(build_system(&th, &s), Err(Error::UseInfinityRealization));
        let th0 = ThetaParams::from_array([cr(0.1), cr(0.2), cr(0.3), cr(0.0)]);
        let s = SystemState::new(cr(2.0), cr(0.5), cr(1.0), cr(1.0));
        assert_eq!(build_system(&th0, &s), Err(Error::DegenerateThetaInf));
    }

    #[test]
    fn heun_extraction_example() {
        // theta = (1,1,1,1), mu = 0, t = 2 on the line lambda = 0
        let h = HeunParams::from_product(cr(-1.0), cr(0.0), cr(0.0), cr(1.0), cr(0.0), cr(2.0)).unwrap();
        let back = heun_normal_form(&h.to_ode()).unwrap();
        assert!(back.distance(&h) < 1e-12);
        assert!((back.alpha + 1.0).norm() < 1e-7 && (back.beta + 1.0).norm() < 1e-7);
    }

    #[test]
    fn fuchs_violation_rejected() {
        let r = HeunParams::new(cr(0.5), cr(0.5), cr(0.5), cr(0.1), cr(0.2), cr(0.0), cr(2.0));
        assert!(matches!(r, Err(Error::NotHeunShaped(_))));
    }

    #[test]
    fn first_order_reducible() {
        let d = mat2(cr(0.3), cr(0.0), cr(0.0), cr(0.1));
        let sys = FuchsianSystem::new(cr(2.0), d.clone(), d.clone(), d).unwrap();
        assert_eq!(reduce_to_scalar(&sys), Err(Error::FirstOrderReducible));
    }
}
