use super::path::{Contour, Path, Segment};
use super::transport::{integrate_system, StepOptions};
use super::LinearOde;
use crate::error::{Error, Result};
use crate::num_core::{CMatrix, CVector, C64};

/// Transport matrix of a fundamental system around the closed path of `contour`.
pub fn monodromy<O: LinearOde + ?Sized>(ode: &O, contour: &Contour, opts: &StepOptions) -> Result<CMatrix> {
    let p = &contour.path;
    if (p.start() - p.end()).norm() > 1e-10 * (1.0 + p.start().norm()) {
        return Err(Error::InvalidInput("monodromy needs a closed path".into()));
    }
    let n = ode.dim();
    Ok(integrate_system(ode, &CVector::zeros(n), p, opts)?.matrix)
}

fn loop_radius(p: C64, sing: &[C64]) -> f64 {
    0.25 * sing.iter().map(|q| (p - q).norm()).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min)
}

/// Simple counter-clockwise loops from `base` around every finite singular
/// point, in increasing argument of `p - base` measured from the direction
/// of the centroid. Returns the points and their transport matrices.
pub fn monodromy_loops<O: LinearOde + ?Sized>(ode: &O, base: C64, opts: &StepOptions) -> Result<Vec<(C64, CMatrix)>> {
    let sing = ode.singularities();
    let n = sing.len() as f64;
    let centroid = sing.iter().sum::<C64>() / n;
    let axis = centroid - base;
    let mut pts = sing.clone();
    pts.sort_by(|a, b| {
        let ka = ((a - base) / axis).arg();
        let kb = ((b - base) / axis).arg();
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out = vec![];
    for p in pts {
        let r = loop_radius(p, &sing);
        let seg = Segment::Line { from: base, to: p };
        for q in &sing {
            if *q != p && seg.distance_to(*q) < 1.5 * loop_radius(*q, &sing) {
                return Err(Error::PathTooClose(*q));
            }
        }
        let path = Path::simple_loop(base, p, r);
        let n = ode.dim();
        out.push((p, integrate_system(ode, &CVector::zeros(n), &path, opts)?.matrix));
    }
    Ok(out)
}

/// Relative mismatch between the transport around a large circle enclosing
/// every finite singular point and the ordered product of simple loops.
/// `base` must lie outside the convex hull of the singular points.
pub fn loop_relation_defect<O: LinearOde + ?Sized>(ode: &O, base: C64, opts: &StepOptions) -> Result<f64> {
    let loops = monodromy_loops(ode, base, opts)?;
    let n = ode.dim();
    // first loop applied first
    let prod = loops.iter().fold(CMatrix::identity(n, n), |acc, (_, m)| m * acc);
    let sing = ode.singularities();
    let centroid = sing.iter().sum::<C64>() / sing.len() as f64;
    let reach = sing.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max);
    let r = (reach * 1.5 + 0.5).min(0.9 * (base - centroid).norm()).max(reach * 1.2);
    let big = Path::big_loop(base, centroid, r);
    let t = integrate_system(ode, &CVector::zeros(n), &big, opts)?.matrix;
    Ok((&t - &prod).norm() / t.norm().max(1.0))
}
