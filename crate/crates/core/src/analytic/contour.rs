use super::path::{Contour, Segment};
use super::transport::{walk, Patch, StepOptions};
use super::LinearOde;
use crate::error::{Error, Result};
use crate::num_core::{cr, CMatrix, CVector, C64};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn rules() -> &'static [(Vec<f64>, Vec<f64>); 2] {
    static R: OnceLock<[(Vec<f64>, Vec<f64>); 2]> = OnceLock::new();
    R.get_or_init(|| [gauss_legendre(24), gauss_legendre(12)])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `(z - w)^nu` on the branch fixed at the contour start.
    Power(C64),
    /// `(z - w)^n`, single-valued.
    Integer(u32),
}

/// `values[i][m] = integral of f_i(w) d^m/dz^m (z - w)^nu dw`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelIntegrals {
    pub values: Vec<Vec<C64>>,
}

pub type Integrand<'a> = &'a (dyn Fn(C64, &CVector, &CVector) -> C64 + Sync);

fn falling(nu: C64, m: usize) -> C64 {
    (0..m).fold(cr(1.0), |a, j| a * (nu - j as f64))
}

struct Acc<'a> {
    z: C64,
    kernel: Kernel,
    integrands: &'a [Integrand<'a>],
    max_deriv: usize,
    log_ref: C64,
    w_ref: C64,
    total: Vec<Vec<C64>>,
}

impl Acc<'_> {
    fn log_at(&self, w: C64) -> Result<C64> {
        let ratio = (self.z - w) / (self.z - self.w_ref);
        if (ratio - 1.0).norm() >= 0.9 {
            return Err(Error::BranchError(format!("step too long near w = {w}")));
        }
        Ok(self.log_ref + ratio.ln())
    }

    fn kernels(&self, w: C64) -> Result<Vec<C64>> {
        match self.kernel {
            Kernel::Power(nu) => {
                let l = self.log_at(w)?;
                Ok((0..=self.max_deriv).map(|m| falling(nu, m) * ((nu - m as f64) * l).exp()).collect())
            }
            Kernel::Integer(n) => {
                Ok((0..=self.max_deriv)
                    .map(|m| {
                        if m as u32 > n {
                            cr(0.0)
                        } else {
                            falling(cr(n as f64), m) * (self.z - w).powu(n - m as u32)
                        }
                    })
                    .collect())
            }
        }
    }

    /// Integral over `[s0, s1]` of `seg` with rule `r`; also returns the
    /// absolute-value mass.
    fn rule(&self, patch: &Patch, seg: &Segment, s0: f64, s1: f64, r: usize) -> Result<(Vec<Vec<C64>>, f64)> {
        let (xs, ws) = &rules()[r];
        let half = 0.5 * (s1 - s0);
        let mid = 0.5 * (s1 + s0);
        let mut out = vec![vec![cr(0.0); self.max_deriv + 1]; self.integrands.len()];
        let mut mass = 0.0;
        for (x, wt) in xs.iter().zip(ws) {
            let s = mid + half * x;
            let w = seg.point(s);
            let dw = seg.tangent(s) * (half * wt);
            let (y, dy) = patch.eval_with_derivative(w);
            let y = y.column(0).into_owned();
            let dy = dy.column(0).into_owned();
            let ks = self.kernels(w)?;
            for (i, f) in self.integrands.iter().enumerate() {
                let fv = f(w, &y, &dy) * dw;
                mass += (fv * ks[0]).norm();
                for (m, k) in ks.iter().enumerate() {
                    out[i][m] += fv * k;
                }
            }
        }
        Ok((out, mass))
    }

    fn piece(&mut self, patch: &Patch, seg: &Segment, s0: f64, s1: f64, depth: usize) -> Result<()> {
        let (hi, mass) = self.rule(patch, seg, s0, s1, 0)?;
        let (lo, _) = self.rule(patch, seg, s0, s1, 1)?;
        let err =
            hi.iter().zip(&lo).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm())).fold(0.0, f64::max);
        let scale = hi.iter().flatten().map(|x| x.norm()).fold(mass, f64::max);
        if err <= 1e-10 * scale.max(1e-300) || err <= 1e-13 {
            for (t, h) in self.total.iter_mut().zip(hi) {
                for (a, b) in t.iter_mut().zip(h) {
                    *a += b;
                }
            }
            return Ok(());
        }
        if depth >= 12 {
            return Err(Error::QuadratureError(format!("no convergence near w = {}", seg.point(s0))));
        }
        let sm = 0.5 * (s0 + s1);
        self.piece(patch, seg, s0, sm, depth + 1)?;
        self.piece(patch, seg, sm, s1, depth + 1)
    }
}

/// Integrals of each `f_i(w, Y(w), Y'(w))` against the kernel and its first
/// `max_deriv` derivatives in `z`, where `Y` is the solution of `ode` with
/// value `y_start` at the contour start.
#[allow(clippy::too_many_arguments)]
pub fn contour_transform<O: LinearOde + ?Sized>(
    ode: &O,
    contour: &Contour,
    y_start: &CVector,
    z: C64,
    kernel: Kernel,
    integrands: &[Integrand],
    max_deriv: usize,
    opts: &StepOptions,
) -> Result<KernelIntegrals> {
    let start = contour.path.start();
    let power = matches!(kernel, Kernel::Power(_));
    if power && (start - z).norm() == 0.0 {
        return Err(Error::BranchError("non-integer kernel with the contour starting at w = z".into()));
    }
    let log0 = if power { (z - start).ln() } else { cr(0.0) };
    let mut acc = Acc {
        z,
        kernel,
        integrands,
        max_deriv,
        log_ref: log0,
        w_ref: start,
        total: vec![vec![cr(0.0); max_deriv + 1]; integrands.len()],
    };
    let extra: Vec<C64> = if power { vec![z] } else { vec![] };
    let y0 = CMatrix::from_column_slice(y_start.len(), 1, y_start.as_slice());
    walk(ode, &contour.path, y0, &extra, opts, |patch, seg, s0, s1| {
        acc.piece(patch, seg, s0, s1, 0)?;
        if power {
            let w1 = seg.point(s1);
            acc.log_ref = acc.log_at(w1)?;
            acc.w_ref = w1;
        }
        Ok(())
    })?;
    if power {
        let expected = contour
            .branch_log
            .iter()
            .find(|(p, _)| (p - z).norm() == 0.0)
            .map_or_else(|| contour.path.winding(z).round() as i64, |x| x.1);
        let drift = acc.log_ref - log0 - C64::new(0.0, 2.0 * PI * expected as f64);
        if drift.norm() > 1e-6 {
            return Err(Error::BranchError(format!("winding mismatch about z: {drift}")));
        }
    }
    Ok(KernelIntegrals { values: acc.total })
}
