//! Charts of the space of initial conditions, the eight exceptional lines,
//! Heun equations on those lines and explicit Fuchsian realizations there.

use crate::error::{Error, Result};
use crate::fuchsian::{
    build_system, heun_normal_form_at, kappas, reduce_to_scalar, residue_matrix, scalar_ode_of_parameters,
    FuchsianSystem, HeunParams, ScalarODE2, SystemState, ThetaParams,
};
use crate::num_core::{circle_mean, cr, mat2, CMatrix, C64, GUARD};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    U0,
    U1,
    U2,
    U3,
    U4,
    Uinf,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Chart::U0 => "U0",
            Chart::U1 => "U1",
            Chart::U2 => "U2",
            Chart::U3 => "U3",
            Chart::U4 => "U4",
            Chart::Uinf => "Uinf",
        };
        f.write_str(s)
    }
}

impl FromStr for Chart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "U0" => Chart::U0,
            "U1" => Chart::U1,
            "U2" => Chart::U2,
            "U3" => Chart::U3,
            "U4" => Chart::U4,
            "Uinf" => Chart::Uinf,
            _ => return Err(Error::InvalidInput(format!("unknown chart {s}"))),
        })
    }
}

/// A point `(q_i, p_i)` of one chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SICPoint {
    pub chart: Chart,
    pub c1: C64,
    pub c2: C64,
}

impl SICPoint {
    pub fn new(chart: Chart, c1: C64, c2: C64) -> Self {
        Self { chart, c1, c2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Line {
    L0,
    L1,
    Lt,
    Linf,
    L0s,
    L1s,
    Lts,
    Linfs,
}

impl Line {
    pub const ALL: [Line; 8] = [Line::L0, Line::L1, Line::Lt, Line::Linf, Line::L0s, Line::L1s, Line::Lts, Line::Linfs];

    pub fn is_starred(&self) -> bool {
        matches!(self, Line::L0s | Line::L1s | Line::Lts | Line::Linfs)
    }

    /// The point of the line with the given coordinate.
    pub fn point(&self, t: C64, coord: C64) -> SICPoint {
        let z = cr(0.0);
        match self {
            Line::L0 => SICPoint::new(Chart::U0, z, coord),
            Line::L1 => SICPoint::new(Chart::U0, cr(1.0), coord),
            Line::Lt => SICPoint::new(Chart::U0, t, coord),
            Line::Linf => SICPoint::new(Chart::Uinf, z, coord),
            Line::L0s => SICPoint::new(Chart::U1, coord, z),
            Line::L1s => SICPoint::new(Chart::U2, coord, z),
            Line::Lts => SICPoint::new(Chart::U3, coord, z),
            Line::Linfs => SICPoint::new(Chart::U4, coord, z),
        }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Line::L0 => "L0",
            Line::L1 => "L1",
            Line::Lt => "Lt",
            Line::Linf => "Linf",
            Line::L0s => "L0s",
            Line::L1s => "L1s",
            Line::Lts => "Lts",
            Line::Linfs => "Linfs",
        };
        f.write_str(s)
    }
}

impl FromStr for Line {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Line::ALL
            .iter()
            .copied()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown line {s}")))
    }
}

fn nonzero(x: C64, what: &str) -> Result<C64> {
    if x.norm() <= 1e-14 {
        Err(Error::TransitionUndefined(format!("{what} = 0")))
    } else {
        Ok(x)
    }
}

/// Transition between two directly glued charts.
pub fn chart_transition(p: &SICPoint, target: Chart, theta: &ThetaParams, t: C64) -> Result<SICPoint> {
    use Chart::*;
    let (q, pp) = (p.c1, p.c2);
    let (k1, _) = kappas(theta);
    let out = match (p.chart, target) {
        (a, b) if a == b => (q, pp),
        (U0, Uinf) => {
            let q0 = nonzero(q, "q0")?;
            (q0.inv(), (-k1 - q0 * pp) * q0)
        }
        (Uinf, U0) => {
            let qi = nonzero(q, "q_inf")?;
            (qi.inv(), (-k1 - qi * pp) * qi)
        }
        (U0, U1) => {
            let p0 = nonzero(pp, "p0")?;
            ((theta.theta0 - q * p0) * p0, p0.inv())
        }
        (U1, U0) => {
            let p1 = nonzero(pp, "p1")?;
            ((theta.theta0 - q * p1) * p1, p1.inv())
        }
        (U0, U2) => {
            let p0 = nonzero(pp, "p0")?;
            ((theta.theta1 - (q - 1.0) * p0) * p0, p0.inv())
        }
        (U2, U0) => {
            let p2 = nonzero(pp, "p2")?;
            (1.0 + (theta.theta1 - q * p2) * p2, p2.inv())
        }
        (U0, U3) => {
            let p0 = nonzero(pp, "p0")?;
            ((theta.thetat - (q - t) * p0) * p0, p0.inv())
        }
        (U3, U0) => {
            let p3 = nonzero(pp, "p3")?;
            (t + (theta.thetat - q * p3) * p3, p3.inv())
        }
        (Uinf, U4) => {
            let pi = nonzero(pp, "p_inf")?;
            ((1.0 - theta.thetainf - q * pi) * pi, pi.inv())
        }
        (U4, Uinf) => {
            let p4 = nonzero(pp, "p4")?;
            ((1.0 - theta.thetainf - q * p4) * p4, p4.inv())
        }
        (a, b) => return Err(Error::NoGluing(a.to_string(), b.to_string())),
    };
    Ok(SICPoint::new(target, out.0, out.1))
}

fn parent(c: Chart) -> Option<Chart> {
    match c {
        Chart::U0 => None,
        Chart::U4 => Some(Chart::Uinf),
        _ => Some(Chart::U0),
    }
}

fn ancestors(c: Chart) -> Vec<Chart> {
    let mut v = vec![c];
    while let Some(p) = parent(*v.last().expect("nonempty")) {
        v.push(p);
    }
    v
}

/// Transition along the gluing tree (through `U0`, and `Uinf` for `U4`).
pub fn route(p: &SICPoint, target: Chart, theta: &ThetaParams, t: C64) -> Result<SICPoint> {
    let up = ancestors(p.chart);
    let down = ancestors(target);
    let i = up.iter().position(|c| down.contains(c)).expect("tree has a root");
    let j = down.iter().position(|c| *c == up[i]).expect("common ancestor");
    let mut cur = *p;
    for c in up[1..=i].iter().chain(down[..j].iter().rev()) {
        cur = chart_transition(&cur, *c, theta, t)?;
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stratum {
    GenericU0,
    OnLine(Line),
}

const ON_LINE: f64 = 1e-10;

/// Stratum of a point; points not on a line of their own chart are
/// classified through their image in `U0`.
pub fn classify_point(p: &SICPoint, theta: &ThetaParams, t: C64) -> Stratum {
    let z = |x: C64| x.norm() <= ON_LINE;
    match p.chart {
        Chart::U0 => {
            if z(p.c1) {
                Stratum::OnLine(Line::L0)
            } else if z(p.c1 - 1.0) {
                Stratum::OnLine(Line::L1)
            } else if z(p.c1 - t) {
                Stratum::OnLine(Line::Lt)
            } else {
                Stratum::GenericU0
            }
        }
        Chart::Uinf if z(p.c1) => Stratum::OnLine(Line::Linf),
        Chart::U1 if z(p.c2) => Stratum::OnLine(Line::L0s),
        Chart::U2 if z(p.c2) => Stratum::OnLine(Line::L1s),
        Chart::U3 if z(p.c2) => Stratum::OnLine(Line::Lts),
        Chart::U4 if z(p.c2) => Stratum::OnLine(Line::Linfs),
        Chart::U4 => match chart_transition(p, Chart::Uinf, theta, t) {
            Ok(q) => classify_point(&q, theta, t),
            Err(_) => Stratum::GenericU0,
        },
        _ => match chart_transition(p, Chart::U0, theta, t) {
            Ok(q) => classify_point(&q, theta, t),
            Err(_) => Stratum::GenericU0,
        },
    }
}

/// Heun data of the scalar equation on a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineHeun {
    pub heun: HeunParams,
    /// `v1 = (z - a)^gauge_exponent y1` with `a` the fixed point of the line.
    pub gauge_exponent: i32,
    pub gauge_point: Option<C64>,
    /// The accessory parameter does not depend on the line coordinate.
    pub degenerate_accessory: bool,
}

/// `dq / dcoord` on each line.
pub fn accessory_slope(theta: &ThetaParams, t: C64, line: Line) -> C64 {
    match line {
        Line::L0 => -t * theta.theta0,
        Line::L1 => -(1.0 - t) * theta.theta1,
        Line::Lt => -t * (t - 1.0) * theta.thetat,
        Line::Linf => theta.thetainf - 1.0,
        Line::L0s => -t,
        Line::L1s => t - 1.0,
        Line::Lts => t * (1.0 - t),
        Line::Linfs => cr(-1.0),
    }
}

pub fn heun_on_line(theta: &ThetaParams, t: C64, line: Line, coord: C64) -> Result<LineHeun> {
    let (k1, k2) = kappas(theta);
    let (t0, t1, tt) = (theta.theta0, theta.theta1, theta.thetat);
    let one = cr(1.0);
    let slope = accessory_slope(theta, t, line);
    let (g, d, e, ab, q, gp) = match line {
        Line::L0 => (-t0, one - t1, one - tt, k1 * (k2 + 1.0), slope * coord, None),
        Line::L1 => (one - t0, -t1, one - tt, k1 * (k2 + 1.0), k1 * (k2 + 1.0) + slope * coord, None),
        Line::Lt => (one - t0, one - t1, -tt, k1 * (k2 + 1.0), t * k1 * (k2 + 1.0) + slope * coord, None),
        Line::Linf => (
            one - t0,
            one - t1,
            one - tt,
            k1 * (k2 + 2.0),
            slope * coord + k1 * (t * (k2 + tt + 1.0) + k2 + t1 + 1.0),
            None,
        ),
        Line::L0s => (
            2.0 - t0,
            one - t1,
            one - tt,
            (k1 + 1.0) * (k2 + 2.0),
            slope * coord + (t0 - 1.0) * (t * (t1 - 1.0) + tt - 1.0),
            Some(cr(0.0)),
        ),
        Line::L1s => {
            let ab = (k1 + 1.0) * (k2 + 2.0);
            (
                one - t0,
                2.0 - t1,
                one - tt,
                ab,
                ab + slope * coord - (t1 - 1.0) * ((1.0 - t) * (t0 - 1.0) + tt - 1.0),
                Some(cr(1.0)),
            )
        }
        Line::Lts => {
            let ab = (k1 + 1.0) * (k2 + 2.0);
            (
                one - t0,
                one - t1,
                2.0 - tt,
                ab,
                t * ab + slope * coord - (tt - 1.0) * ((t - 1.0) * (t0 - 1.0) + t * (t1 - 1.0)),
                Some(t),
            )
        }
        Line::Linfs => (
            one - t0,
            one - t1,
            one - tt,
            (k1 + 1.0) * (k2 + 1.0),
            slope * coord + (k2 + 1.0) * (t * (k1 + tt) + k1 + t1),
            None,
        ),
    };
    let heun = HeunParams::from_product(g, d, e, ab, q, t)?;
    Ok(LineHeun {
        heun,
        gauge_exponent: if gp.is_some() { -1 } else { 0 },
        gauge_point: gp,
        degenerate_accessory: slope.norm() <= GUARD,
    })
}

/// `(lambda, mu, k scale)` of the generic point approaching `line` as the
/// transverse chart coordinate `eps -> 0`.
pub fn approach_line(theta: &ThetaParams, t: C64, line: Line, coord: C64, eps: C64) -> (C64, C64, C64) {
    let (k1, _) = kappas(theta);
    let from_inf = |qi: C64, pi: C64| (qi.inv(), (-k1 - qi * pi) * qi, -qi);
    match line {
        Line::L0 => (eps, coord, cr(1.0)),
        Line::L1 => (1.0 + eps, coord, cr(1.0)),
        Line::Lt => (t + eps, coord, cr(1.0)),
        Line::L0s => ((theta.theta0 - coord * eps) * eps, eps.inv(), cr(1.0)),
        Line::L1s => (1.0 + (theta.theta1 - coord * eps) * eps, eps.inv(), cr(1.0)),
        Line::Lts => (t + (theta.thetat - coord * eps) * eps, eps.inv(), cr(1.0)),
        Line::Linf => from_inf(eps, coord),
        Line::Linfs => {
            let pi = eps.inv();
            let qi = (1.0 - theta.thetainf - coord * eps) * eps;
            from_inf(qi, pi)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub line: Line,
    pub max_residual: f64,
    pub samples: usize,
    pub degenerate: bool,
}

fn sample_points(t: C64, n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| {
            let a = 2.0 * std::f64::consts::PI * (j as f64 + 0.37) / n as f64;
            let r = 0.35 + 0.9 * ((j * 7 % n) as f64 / n as f64);
            cr(0.5) + (t - 0.5) * 0.3 + C64::from_polar(r, a)
        })
        .filter(|z| [cr(0.0), cr(1.0), t].iter().all(|p| (z - p).norm() > 0.1))
        .collect()
}

/// Compare the limit of the generic scalar equation onto `line` (with the
/// gauge of the line applied) against the Heun form of the line.
pub fn restriction_consistency(theta: &ThetaParams, t: C64, line: Line, coord: C64) -> Result<ConsistencyReport> {
    let lh = heun_on_line(theta, t, line, coord)?;
    let target = lh.heun.to_ode();
    let zs = sample_points(t, 24);
    let rad = 0.015;
    let mut worst: f64 = 0.0;
    for z in &zs {
        let v = circle_mean(rad, 64, |eps| {
            let (l, mu, _) = approach_line(theta, t, line, coord, eps);
            let st = SystemState::new(t, l, mu, cr(1.0));
            let ode = scalar_ode_of_parameters(theta, &st).expect("generic point near the line");
            let (a, b) = ode.eval(*z).expect("sample away from poles");
            let (a, b) = match lh.gauge_point {
                Some(g) => (a + 2.0 / (*z - g), b + a / (*z - g)),
                None => (a, b),
            };
            nalgebra::Vector2::new(a, b)
        });
        let (a, b) = target.eval(*z)?;
        let r = ((v[0] - a).norm() / (1.0 + a.norm())).max((v[1] - b).norm() / (1.0 + b.norm()));
        worst = worst.max(r);
    }
    if worst > 1e-8 {
        return Err(Error::ConsistencyFailure(worst));
    }
    Ok(ConsistencyReport { line, max_residual: worst, samples: zs.len(), degenerate: lh.degenerate_accessory })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineRealization {
    pub system: FuchsianSystem,
    pub gauge_exponent: i32,
    pub heun: HeunParams,
    pub free_param: C64,
    pub v: Option<C64>,
}

fn denom(x: C64, what: &str) -> Result<C64> {
    if x.norm() <= GUARD {
        Err(Error::DegenerateDenominator(what.into()))
    } else {
        Ok(x)
    }
}

/// Explicit Fuchsian system on a line: `theta_p` sits in the lower-right of
/// `A_p` on `L_p` and in the upper-left on `L*_p`.
pub fn realize_system_on_line(theta: &ThetaParams, t: C64, k: C64, line: Line, coord: C64) -> Result<LineRealization> {
    SystemState::new(t, cr(0.5), cr(0.0), k).validate()?;
    let (k1, k2) = kappas(theta);
    let (t0, t1, tt, ti) = (theta.theta0, theta.theta1, theta.thetat, theta.thetainf);
    if line == Line::Linfs {
        return Err(Error::NotRealizable(line.to_string()));
    }
    let kti = k * denom(ti, "theta_inf")?;
    let zero = cr(0.0);
    let lower = |v: C64, th: C64| mat2(zero, zero, v, th);
    let upper = |v: C64, th: C64| mat2(th, zero, v, zero);
    let (a0, a1, at, v): (CMatrix, CMatrix, CMatrix, Option<C64>) = match line {
        Line::L0 | Line::L0s => {
            let (w1, wt) = (k / (t - 1.0), -k / (t - 1.0));
            let (u1, ut, a0, v) = if line == Line::L0 {
                let d = denom(ti - t0, "theta_inf - theta0")?;
                let v = t0 * (t * (t0 - ti) * coord + k1 * (k1 + t1 + t * (k1 + tt))) / kti;
                let u1 = -t1 + (k * v / (t - 1.0) - k1 * (k1 + tt)) / d;
                let ut = -tt - (k * v / (t - 1.0) + k1 * (k1 + t1)) / d;
                (u1, ut, lower(v, t0), v)
            } else {
                let d = denom(ti + t0, "theta_inf + theta0")?;
                let v = (-t * (t0 + ti) * coord + t0 * (k1 + t0) * ((k2 + tt) + t * (k2 + t1))) / kti;
                let u1 = (k * v / (t - 1.0) - k2 * (k2 + tt)) / d;
                let ut = -(k * v / (t - 1.0) + k2 * (k2 + t1)) / d;
                (u1, ut, upper(v, t0), v)
            };
            (a0, residue_matrix(u1, w1, t1), residue_matrix(ut, wt, tt), Some(v))
        }
        Line::L1 | Line::L1s => {
            let (w0, wt) = (k / t, -k / t);
            let (u0, ut, a1, v) = if line == Line::L1 {
                let d = denom(ti - t1, "theta_inf - theta1")?;
                let v = t1 * ((1.0 - t) * (t1 - ti) * coord - k1 * (k1 + t0 + (1.0 - t) * (k1 + tt))) / kti;
                let u0 = -t0 + (k * v / t - k1 * (k1 + tt)) / d;
                let ut = -tt - (k * v / t + k1 * (k1 + t0)) / d;
                (u0, ut, lower(v, t1), v)
            } else {
                let d = denom(ti + t1, "theta_inf + theta1")?;
                let v = ((t - 1.0) * (t1 + ti) * coord - t1 * (k1 + t1) * ((k2 + tt) + (1.0 - t) * (k2 + t0))) / kti;
                let u0 = (k * v / t - k2 * (k2 + tt)) / d;
                let ut = -(k * v / t + k2 * (k2 + t0)) / d;
                (u0, ut, upper(v, t1), v)
            };
            (residue_matrix(u0, w0, t0), a1, residue_matrix(ut, wt, tt), Some(v))
        }
        Line::Lt | Line::Lts => {
            let (w0, w1) = (k, -k);
            let (u0, u1, at, v) = if line == Line::Lt {
                let d = denom(ti - tt, "theta_inf - thetat")?;
                let v = tt * (t * (t - 1.0) * (tt - ti) * coord - k1 * (t * (k1 + t0) + (t - 1.0) * (k1 + t1))) / kti;
                let u0 = -t0 + (k * v - k1 * (k1 + t1)) / d;
                let u1 = -t1 - (k * v + k1 * (k1 + t0)) / d;
                (u0, u1, lower(v, tt), v)
            } else {
                let d = denom(ti + tt, "theta_inf + thetat")?;
                let v = (t * (1.0 - t) * (tt + ti) * coord - tt * (k1 + tt) * (t * (k2 + t1) + (t - 1.0) * (k2 + t0)))
                    / kti;
                let u0 = (k * v - k2 * (k2 + t1)) / d;
                let u1 = -(k * v + k2 * (k2 + t0)) / d;
                (u0, u1, upper(v, tt), v)
            };
            (residue_matrix(u0, w0, t0), residue_matrix(u1, w1, t1), at, Some(v))
        }
        Line::Linf => {
            let l = coord;
            let (w0, w1, wt) = (-k / t, k / (t - 1.0), -k / (t * (t - 1.0)));
            let lt = l * l + (t1 + t * tt) * l + t * k1 * (k1 + t0);
            let u0 = -t0 - k1 + lt / (t * ti);
            let u1 = -t1 + (lt - ti * l) / ((1.0 - t) * ti);
            let ut = -tt + (lt - t * ti * l) / (t * (t - 1.0) * ti);
            (residue_matrix(u0, w0, t0), residue_matrix(u1, w1, t1), residue_matrix(ut, wt, tt), None)
        }
        Line::Linfs => unreachable!(),
    };
    let system = FuchsianSystem::new(t, a0, a1, at)?;
    let lh = heun_on_line(theta, t, line, coord)?;
    Ok(LineRealization { system, gauge_exponent: lh.gauge_exponent, heun: lh.heun, free_param: coord, v })
}

/// Heun parameters read back from a realized system (scalar reduction, then
/// the gauge of the line).
pub fn heun_of_realization(r: &LineRealization, line: Line) -> Result<HeunParams> {
    let ode: ScalarODE2 = reduce_to_scalar(&r.system)?;
    let t = r.system.t;
    let ode = match line {
        Line::L0s => ode.gauge_linear(cr(0.0)),
        Line::L1s => ode.gauge_linear(cr(1.0)),
        Line::Lts => ode.gauge_linear(t),
        _ => ode,
    };
    heun_normal_form_at(&ode, t)
}

/// Residue matrices of the generic system approaching `line`, obtained as a
/// circle mean in the transverse coordinate.
pub fn line_limit_of_generic(theta: &ThetaParams, t: C64, k: C64, line: Line, coord: C64) -> Result<FuchsianSystem> {
    let n = 64;
    let rad = 0.015;
    let mut fail = None;
    let m = circle_mean(rad, n, |eps| {
        let (l, mu, ks) = approach_line(theta, t, line, coord, eps);
        match build_system(theta, &SystemState::new(t, l, mu, k * ks)) {
            Ok(s) => {
                let mut big = CMatrix::zeros(2, 6);
                big.view_mut((0, 0), (2, 2)).copy_from(&s.a0);
                big.view_mut((0, 2), (2, 2)).copy_from(&s.a1);
                big.view_mut((0, 4), (2, 2)).copy_from(&s.at);
                big
            }
            Err(e) => {
                fail = Some(e);
                CMatrix::zeros(2, 6)
            }
        }
    });
    if let Some(e) = fail {
        return Err(e);
    }
    FuchsianSystem::new(
        t,
        m.view((0, 0), (2, 2)).into_owned(),
        m.view((0, 2), (2, 2)).into_owned(),
        m.view((0, 4), (2, 2)).into_owned(),
    )
}
