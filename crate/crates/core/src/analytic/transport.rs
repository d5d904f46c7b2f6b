use super::path::{Path, Segment};
use super::LinearOde;
use crate::error::{Error, Result};
use crate::num_core::{CMatrix, CVector, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    /// Step length as a fraction of the distance to the nearest obstacle.
    pub ratio: f64,
    pub max_terms: usize,
    /// Closest admissible approach to a singular point.
    pub guard: f64,
    /// Largest angle swept by one step along a circular arc.
    pub max_arc_angle: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { ratio: 0.4, max_terms: 120, guard: 1e-7, max_arc_angle: 0.5 }
    }
}

/// Local Taylor expansion `Y(center + x) = sum coeffs[k] x^k`.
pub(crate) struct Patch {
    pub center: C64,
    pub coeffs: Vec<CMatrix>,
}

impl Patch {
    pub fn eval(&self, z: C64) -> CMatrix {
        let x = z - self.center;
        let (r, c) = self.coeffs[0].shape();
        self.coeffs.iter().rev().fold(CMatrix::zeros(r, c), |acc, a| acc * x + a)
    }

    pub fn eval_with_derivative(&self, z: C64) -> (CMatrix, CMatrix) {
        let x = z - self.center;
        let (r, c) = self.coeffs[0].shape();
        let mut v = CMatrix::zeros(r, c);
        let mut d = CMatrix::zeros(r, c);
        for (k, a) in self.coeffs.iter().enumerate().rev() {
            v = v * x + a;
            if k >= 1 {
                d = d * x + a * C64::new(k as f64, 0.0);
            }
        }
        (v, d)
    }
}

fn make_patch<O: LinearOde + ?Sized>(
    ode: &O,
    center: C64,
    y: &CMatrix,
    radius: f64,
    opts: &StepOptions,
) -> Result<Patch> {
    let n = opts.max_terms;
    let a = ode.taylor(center, n)?;
    let mut coeffs: Vec<CMatrix> = vec![y.clone()];
    let mut peak = y.norm();
    let mut quiet = 0;
    for k in 0..n - 1 {
        let mut s = &a[0] * &coeffs[k];
        for j in 1..=k {
            s += &a[j] * &coeffs[k - j];
        }
        let next = s / C64::new((k + 1) as f64, 0.0);
        let size = next.norm() * radius.powi(k as i32 + 1);
        peak = peak.max(size);
        coeffs.push(next);
        if size <= 1e-18 * peak {
            quiet += 1;
            if quiet >= 3 && k >= 6 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(Patch { center, coeffs })
}

fn nearest(c: C64, pts: &[C64]) -> (f64, C64) {
    pts.iter().map(|p| ((c - p).norm(), *p)).fold((f64::INFINITY, c), |a, b| if b.0 < a.0 { b } else { a })
}

/// Walk `path` by Taylor steps starting from `y0`; `visit` sees every patch
/// with the parameter interval `[s0, s1]` of the current segment it covers.
/// `extra` points only shorten the steps.
pub(crate) fn walk<O, F>(
    ode: &O,
    path: &Path,
    y0: CMatrix,
    extra: &[C64],
    opts: &StepOptions,
    mut visit: F,
) -> Result<CMatrix>
where
    O: LinearOde + ?Sized,
    F: FnMut(&Patch, &Segment, f64, f64) -> Result<()>,
{
    let sing = ode.singularities();
    let mut obstacles = sing.clone();
    obstacles.extend_from_slice(extra);
    let mut y = y0;
    let mut steps = 0usize;
    for seg in &path.segments {
        let mut s = 0.0;
        while s < 1.0 {
            let c = seg.point(s);
            let (ds, near_sing) = nearest(c, &sing);
            if ds < opts.guard {
                return Err(Error::PathTooClose(near_sing));
            }
            let (d, _) = nearest(c, &obstacles);
            let d = if d < opts.guard { ds } else { d };
            let h = opts.ratio * d.min(2.5);
            let dsn = match *seg {
                Segment::Line { from, to } => {
                    let len = (to - from).norm();
                    if len == 0.0 {
                        1.0
                    } else {
                        h / len
                    }
                }
                Segment::Arc { radius, sweep, .. } => {
                    let ang = (2.0 * (h / (2.0 * radius)).min(1.0).asin()).min(opts.max_arc_angle);
                    ang / sweep.abs()
                }
            };
            let s1 = (s + dsn).min(1.0);
            let patch = make_patch(ode, c, &y, h, opts)?;
            visit(&patch, seg, s, s1)?;
            y = patch.eval(seg.point(s1));
            s = s1;
            steps += 1;
            if steps > 2_000_000 {
                return Err(Error::PathTooClose(c));
            }
        }
    }
    Ok(y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transport {
    pub endpoint: CVector,
    /// Maps the initial value to the final value.
    pub matrix: CMatrix,
}

pub fn integrate_system<O: LinearOde + ?Sized>(
    ode: &O,
    y0: &CVector,
    path: &Path,
    opts: &StepOptions,
) -> Result<Transport> {
    let n = ode.dim();
    let m = walk(ode, path, CMatrix::identity(n, n), &[], opts, |_, _, _, _| Ok(()))?;
    Ok(Transport { endpoint: &m * y0, matrix: m })
}

/// Value at the end of `path` of the solution with initial value `y0`.
pub fn continue_solution<O: LinearOde + ?Sized>(
    ode: &O,
    y0: &CVector,
    path: &Path,
    opts: &StepOptions,
) -> Result<CVector> {
    let y = CMatrix::from_column_slice(y0.len(), 1, y0.as_slice());
    let m = walk(ode, path, y, &[], opts, |_, _, _, _| Ok(()))?;
    Ok(m.column(0).into_owned())
}
