//! Numerical checks of the integral representations: a source solution is
//! continued onto a Pochhammer or `C_p` contour, convolved with the kernel,
//! and the result is substituted into the target equation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::contour::Integrand;
use super::{
    continue_solution, contour_transform, frobenius_series, indicial_roots, parallel_map, system_frobenius,
    threads_from_env, Base, Contour, ContourOptions, Kernel, LinearOde, Path, Point, RationalSystem, StepOptions,
};
use crate::error::{Error, Result};
use crate::fuchsian::{build_system, scalar_ode_of_parameters, HeunParams, ScalarODE2, SystemState, ThetaParams};
use crate::mcv::{
    heun_euler_source, scalar_integrand_kappa2, transform_integrands_kappa1, transform_integrands_kappa2,
    TransformKernels,
};
use crate::num_core::{c, cr, CVector, C64};
use crate::sic::{heun_on_line, Line};
use crate::weyl::{mc_kappa1_map, mc_kappa2_map, ExtParams};

/// The integral representations that can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    /// System convolution with exponent `kappa2` (Pochhammer).
    SystemKappa2,
    /// Scalar first-component convolution with exponent `kappa2 - 1`.
    ScalarKappa2,
    /// System convolution with exponent `kappa1`.
    SystemKappa1,
    /// Euler transform between Heun equations.
    HeunEuler,
    /// System convolution over `C_p` for positive integer `kappa2`.
    SystemKappa2Integer,
    /// Euler transform over `C_p` for non-positive integer `eta`.
    HeunEulerInteger,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [
        TheoremId::SystemKappa2,
        TheoremId::ScalarKappa2,
        TheoremId::SystemKappa1,
        TheoremId::HeunEuler,
        TheoremId::SystemKappa2Integer,
        TheoremId::HeunEulerInteger,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremId::SystemKappa2 => "system-kappa2",
            TheoremId::ScalarKappa2 => "scalar-kappa2",
            TheoremId::SystemKappa1 => "system-kappa1",
            TheoremId::HeunEuler => "heun-euler",
            TheoremId::SystemKappa2Integer => "system-kappa2-integer",
            TheoremId::HeunEulerInteger => "heun-euler-integer",
        }
    }

    /// Integer variants integrate over `C_p` instead of a Pochhammer contour.
    pub fn uses_cp(&self) -> bool {
        matches!(self, TheoremId::SystemKappa2Integer | TheoremId::HeunEulerInteger)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown theorem id {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Parameter draws per end point.
    pub draws: usize,
    /// Sample points `z` per draw.
    pub samples: usize,
    pub points: Vec<Point>,
    pub tol: f64,
    pub threads: usize,
    pub contour: ContourOptions,
    pub step: StepOptions,
    /// Nodes of the circle used for `z`-derivatives of `C_p` integrals.
    pub cauchy_nodes: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            draws: 2,
            samples: 2,
            points: vec![Point::Finite(cr(0.0)), Point::Finite(cr(1.0))],
            tol: 1e-6,
            threads: threads_from_env(),
            contour: ContourOptions::default(),
            step: StepOptions::default(),
            cauchy_nodes: 16,
        }
    }
}

/// Residuals of one parameter draw.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub theta: ThetaParams,
    pub state: SystemState,
    pub p: Point,
    pub z: Vec<C64>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub theorem: TheoremId,
    pub parameters: Vec<CaseReport>,
    pub max_residual: f64,
    pub samples: usize,
    pub elapsed: Duration,
}

impl ResidualReport {
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.max_residual.is_finite() && self.max_residual <= tol {
            Ok(())
        } else {
            Err(Error::VerificationFailure { residual: self.max_residual, threshold: tol })
        }
    }

    fn merge(theorem: TheoremId, cases: Vec<CaseReport>, elapsed: Duration) -> Self {
        let max_residual = cases.iter().flat_map(|c| c.residuals.iter().copied()).fold(0.0, nan_max);
        let samples = cases.iter().map(|c| c.residuals.len()).sum();
        Self { theorem, parameters: cases, max_residual, samples, elapsed }
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

enum Source {
    System(RationalSystem),
    Scalar(ScalarODE2),
}

impl Source {
    fn ode(&self) -> &dyn LinearOde {
        match self {
            Source::System(s) => s,
            Source::Scalar(s) => s,
        }
    }

    /// A Frobenius solution at 0 evaluated at a point of its disk in the
    /// direction of `toward`. The exponent is the least integral one, so the
    /// solution is not single-valued about 0.
    fn anchor(&self, toward: C64) -> Result<(C64, CVector)> {
        let dir = if toward.norm() > 0.0 { toward / toward.norm() } else { cr(1.0) };
        match self {
            Source::System(s) => {
                let i = s
                    .poles
                    .iter()
                    .position(|p| p.norm() == 0.0)
                    .ok_or_else(|| Error::InvalidInput("no pole at 0".into()))?;
                let ev =
                    s.residues[i].clone().eigenvalues().ok_or_else(|| Error::InvalidInput("no eigenvalues".into()))?;
                let e = pick_exponent(ev[0], ev[1]);
                let g = system_frobenius(s, i, e, 60)?;
                let a = dir * (0.4 * g.radius_hint).min(0.3);
                Ok((a, g.eval(a)))
            }
            Source::Scalar(s) => {
                let (r1, r2) = indicial_roots(s, Base::Finite(cr(0.0)))?;
                let e = pick_exponent(r1, r2);
                let g = frobenius_series(s, Base::Finite(cr(0.0)), e, 60)?;
                let a = dir * (0.4 * g.radius_hint).min(0.3);
                let (y, dy) = g.eval(a);
                Ok((a, CVector::from_vec(vec![y, dy])))
            }
        }
    }

    /// Value at `w`, continued from the anchor along a straight line.
    fn value_at(&self, w: C64, step: &StepOptions) -> Result<CVector> {
        let (a, y) = self.anchor(w)?;
        continue_solution(self.ode(), &y, &Path::line(a, w), step)
    }
}

fn pick_exponent(a: C64, b: C64) -> C64 {
    if int_dist(a) >= int_dist(b) {
        a
    } else {
        b
    }
}

enum Target {
    System(RationalSystem),
    Scalar(ScalarODE2),
}

impl Target {
    fn max_deriv(&self) -> usize {
        match self {
            Target::System(_) => 1,
            Target::Scalar(_) => 2,
        }
    }

    /// `vals[i][m]`: `m`-th derivative of component `i` at `z`.
    fn residual(&self, z: C64, vals: &[Vec<C64>]) -> Result<f64> {
        match self {
            Target::System(s) => {
                let y = CVector::from_iterator(vals.len(), vals.iter().map(|v| v[0]));
                let dy = CVector::from_iterator(vals.len(), vals.iter().map(|v| v[1]));
                let ay = s.eval(z)? * &y;
                let scale = dy.norm() + ay.norm();
                Ok(if scale == 0.0 { 0.0 } else { (dy - ay).norm() / scale })
            }
            Target::Scalar(s) => s.residual(vals[0][0], vals[0][1], vals[0][2], z),
        }
    }

    fn singularities(&self) -> Vec<C64> {
        match self {
            Target::System(s) => s.poles.clone(),
            Target::Scalar(s) => s.singular_points(),
        }
    }
}

enum Route {
    Pochhammer,
    Cp(u32),
}

struct Case {
    source: Source,
    kernels: TransformKernels,
    target: Target,
    route: Route,
    /// Points the contours keep clear of (all singular and removable points).
    avoid: Vec<C64>,
}

fn push_unique(v: &mut Vec<C64>, p: C64) {
    if !v.iter().any(|q| (q - p).norm() <= 1e-12 * (1.0 + p.norm())) {
        v.push(p);
    }
}

/// The `eta` of the Euler transform: the exponent at infinity equal to `kappa2 + 1`.
fn euler_eta(h: &HeunParams, theta: &ThetaParams) -> C64 {
    let want = theta.kappa2() + 1.0;
    if (h.alpha - want).norm() <= (h.beta - want).norm() {
        h.alpha
    } else {
        h.beta
    }
}

fn integer_of(x: C64, what: &str) -> Result<i64> {
    let n = x.re.round();
    if (x - n).norm() > 1e-9 {
        return Err(Error::WrongBranch(format!("{what} = {x} is not an integer")));
    }
    Ok(n as i64)
}

fn build_case(id: TheoremId, theta: &ThetaParams, state: &SystemState) -> Result<Case> {
    let l = state.finite_lambda()?;
    let t = state.t;
    let src_sys = build_system(theta, state)?.to_rational();
    let mut avoid = vec![cr(0.0), cr(1.0), t];
    let system_target = |e: ExtParams| -> Result<Target> {
        let st = SystemState::new(t, e.lambda, e.mu, state.k);
        Ok(Target::System(build_system(&e.theta, &st)?.to_rational()))
    };
    let ext = ExtParams::new(*theta, l, state.mu, t);
    let case = match id {
        TheoremId::SystemKappa2 | TheoremId::SystemKappa2Integer => {
            let e = mc_kappa2_map(&ext)?;
            push_unique(&mut avoid, l);
            push_unique(&mut avoid, e.lambda);
            let route = if id == TheoremId::SystemKappa2 {
                Route::Pochhammer
            } else {
                let n = integer_of(theta.kappa2(), "kappa2")?;
                if n < 1 {
                    return Err(Error::WrongBranch(format!("kappa2 = {n} is not positive")));
                }
                Route::Cp(n as u32)
            };
            Case {
                source: Source::System(src_sys),
                kernels: transform_integrands_kappa2(theta, state)?,
                target: system_target(e)?,
                route,
                avoid,
            }
        }
        TheoremId::ScalarKappa2 => {
            let e = mc_kappa2_map(&ext)?;
            push_unique(&mut avoid, l);
            push_unique(&mut avoid, e.lambda);
            let st = SystemState::new(t, e.lambda, e.mu, state.k);
            Case {
                source: Source::System(src_sys),
                kernels: scalar_integrand_kappa2(theta),
                target: Target::Scalar(scalar_ode_of_parameters(&e.theta, &st)?),
                route: Route::Pochhammer,
                avoid,
            }
        }
        TheoremId::SystemKappa1 => {
            let e = mc_kappa1_map(&ext)?;
            push_unique(&mut avoid, l);
            push_unique(&mut avoid, e.lambda);
            Case {
                source: Source::System(src_sys),
                kernels: transform_integrands_kappa1(theta, state)?,
                target: system_target(e)?,
                route: Route::Pochhammer,
                avoid,
            }
        }
        TheoremId::HeunEuler | TheoremId::HeunEulerInteger => {
            let target = heun_on_line(theta, t, Line::L0, state.mu)?.heun;
            let eta = euler_eta(&target, theta);
            let source = heun_euler_source(&target, eta)?;
            let route = if id == TheoremId::HeunEuler {
                Route::Pochhammer
            } else {
                let n = integer_of(eta, "eta")?;
                if n > 0 {
                    return Err(Error::WrongBranch(format!("eta = {n} is positive")));
                }
                Route::Cp((-n) as u32)
            };
            let kernels: TransformKernels =
                TransformKernels { nu: -eta, integrands: vec![Box::new(|_, y: &CVector, _: &CVector| y[0])] };
            Case {
                source: Source::Scalar(source.to_ode()),
                kernels,
                target: Target::Scalar(target.to_ode()),
                route,
                avoid,
            }
        }
    };
    for p in case.target.singularities() {
        if !case.avoid.iter().any(|q| (q - p).norm() < 1e-9) {
            return Err(Error::InvalidInput(format!("unexpected target singularity {p}")));
        }
    }
    Ok(case)
}

impl Case {
    fn integrands(&self) -> Vec<Integrand<'_>> {
        self.kernels.integrands.iter().map(|f| f.as_ref() as Integrand).collect()
    }

    fn pochhammer_values(&self, z: C64, p: Point, opts: &VerifyOptions, deriv: usize) -> Result<Vec<Vec<C64>>> {
        let contour = Contour::pochhammer(&self.avoid, z, p, &opts.contour)?;
        let y0 = self.source.value_at(contour.base(), &opts.step)?;
        let k = contour_transform(
            self.source.ode(),
            &contour,
            &y0,
            z,
            Kernel::Power(self.kernels.nu),
            &self.integrands(),
            deriv,
            &opts.step,
        )?;
        Ok(k.values)
    }

    fn cp_value(&self, z: C64, p: Point, n: u32, opts: &VerifyOptions) -> Result<Vec<C64>> {
        let contour = Contour::cp_loop(&self.avoid, z, p, &opts.contour)?;
        let y0 = self.source.value_at(z, &opts.step)?;
        let k = contour_transform(
            self.source.ode(),
            &contour,
            &y0,
            z,
            Kernel::Integer(n),
            &self.integrands(),
            0,
            &opts.step,
        )?;
        Ok(k.values.into_iter().map(|v| v[0]).collect())
    }

    /// `C_p` integrals and their `z`-derivatives from a trapezoidal Cauchy
    /// formula on a small circle about `z` (the contour moves with `z`).
    fn cp_values(&self, z: C64, p: Point, n: u32, opts: &VerifyOptions, deriv: usize) -> Result<Vec<Vec<C64>>> {
        let nodes = opts.cauchy_nodes.max(deriv + 4);
        let d = self.avoid.iter().map(|q| (z - q).norm()).fold(f64::INFINITY, f64::min);
        let rho = 0.05 * d;
        let mut out = vec![vec![cr(0.0); deriv + 1]; self.kernels.integrands.len()];
        for j in 0..nodes {
            let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
            let f = self.cp_value(z + rho * e, p, n, opts)?;
            for (o, fv) in out.iter_mut().zip(&f) {
                let mut factor = cr(1.0);
                for (m, slot) in o.iter_mut().enumerate() {
                    *slot += fv * factor;
                    factor *= e.inv() * (m as f64 + 1.0) / rho;
                }
            }
        }
        for o in out.iter_mut() {
            for slot in o.iter_mut() {
                *slot /= nodes as f64;
            }
        }
        Ok(out)
    }

    fn residual_at(&self, z: C64, p: Point, opts: &VerifyOptions) -> Result<f64> {
        let deriv = self.target.max_deriv();
        let vals = match self.route {
            Route::Pochhammer => self.pochhammer_values(z, p, opts, deriv)?,
            Route::Cp(n) => self.cp_values(z, p, n, opts, deriv)?,
        };
        if vals.iter().flatten().all(|v| v.norm() == 0.0) {
            return Err(Error::QuadratureError(format!("transform vanishes identically at z = {z}")));
        }
        self.target.residual(z, &vals)
    }
}

/// Check one representation for fixed parameters at the given sample points.
pub fn verify_integral_theorem(
    id: TheoremId,
    theta: &ThetaParams,
    state: &SystemState,
    p: Point,
    zs: &[C64],
    opts: &VerifyOptions,
) -> Result<ResidualReport> {
    let start = Instant::now();
    let case = build_case(id, theta, state)?;
    let rs: Vec<Result<f64>> = parallel_map(zs, opts.threads, |z| case.residual_at(*z, p, opts));
    let residuals = rs.into_iter().collect::<Result<Vec<f64>>>()?;
    let report = CaseReport { theta: *theta, state: *state, p, z: zs.to_vec(), residuals };
    Ok(ResidualReport::merge(id, vec![report], start.elapsed()))
}

/// Check one representation on seeded random parameter draws.
pub fn verify_seeded(id: TheoremId, opts: &VerifyOptions) -> Result<ResidualReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cases = vec![];
    for i in 0..opts.draws {
        let (theta, state) = draw_parameters(id, &mut rng, i)?;
        let avoid = build_case(id, &theta, &state)?.avoid;
        let zs = sample_points(&mut rng, &avoid, opts.samples);
        for p in &opts.points {
            let r = verify_integral_theorem(id, &theta, &state, *p, &zs, opts)?;
            cases.extend(r.parameters);
        }
    }
    Ok(ResidualReport::merge(id, cases, start.elapsed()))
}

fn cx<R: Rng>(rng: &mut R, center: C64, re: f64, im: f64) -> C64 {
    center + c(rng.gen_range(-re..=re), rng.gen_range(-im..=im))
}

fn int_dist(x: C64) -> f64 {
    (x - x.re.round()).norm()
}

/// Seeded parameters suited to `id`. The integer variants alternate the
/// forced integer over the draw index.
pub fn draw_parameters<R: Rng>(id: TheoremId, rng: &mut R, index: usize) -> Result<(ThetaParams, SystemState)> {
    let forced_k2 = match id {
        TheoremId::SystemKappa2Integer => Some(1.0 + (index % 2) as f64),
        TheoremId::HeunEulerInteger => Some(-1.0 - (index % 2) as f64),
        _ => None,
    };
    for _ in 0..10_000 {
        let t0 = cx(rng, cr(0.0), 0.45, 0.2);
        let t1 = cx(rng, cr(0.0), 0.45, 0.2);
        let tt = cx(rng, cr(0.0), 0.45, 0.2);
        let ti = match forced_k2 {
            Some(k) => -2.0 * k - t0 - t1 - tt,
            None => cx(rng, cr(0.3), 0.6, 0.2),
        };
        let theta = ThetaParams::new(t0, t1, tt, ti);
        let (k1, k2) = (theta.kappa1(), theta.kappa2());
        if [t0, t1, tt, ti].iter().any(|x| int_dist(*x) < 0.1) || int_dist(k1) < 0.1 {
            continue;
        }
        if forced_k2.is_none() && (int_dist(k2) < 0.1 || k2.re.abs() > 0.9 || int_dist(k1 - k2) < 0.05) {
            continue;
        }
        let state = SystemState::new(
            cx(rng, c(2.3, 0.0), 0.3, 0.4),
            cx(rng, c(1.4, 0.45), 0.15, 0.1),
            cx(rng, cr(0.0), 0.6, 0.6),
            cx(rng, cr(1.0), 0.3, 0.3),
        );
        if state.mu.norm() < 0.15 {
            continue;
        }
        let Ok(case) = build_case(id, &theta, &state) else { continue };
        let a = &case.avoid;
        let spread = a
            .iter()
            .enumerate()
            .flat_map(|(i, p)| a[i + 1..].iter().map(move |q| (p - q).norm()))
            .fold(f64::INFINITY, f64::min);
        if spread >= 0.2 && a.iter().all(|p| p.norm() < 4.0) {
            return Ok((theta, state));
        }
    }
    Err(Error::InvalidInput(format!("no admissible parameter draw for {id}")))
}

/// Sample points in the lower half plane, clear of `avoid`.
pub fn sample_points<R: Rng>(rng: &mut R, avoid: &[C64], n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = cx(rng, c(0.5, -0.35), 0.35, 0.12);
        if avoid.iter().chain(out.iter()).all(|p| (z - p).norm() >= 0.15) {
            out.push(z);
        }
    }
    out
}
