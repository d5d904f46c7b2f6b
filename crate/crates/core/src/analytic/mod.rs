//! Series solutions, analytic continuation along paths, contour integrals
//! with branch tracking, monodromy and the integral-theorem harness.

mod contour;
mod monodromy;
mod path;
mod series;
mod transport;
pub mod verify;

pub use contour::Integrand;
pub use contour::{contour_transform, gauss_legendre, Kernel, KernelIntegrals};
pub use monodromy::{loop_relation_defect, monodromy, monodromy_loops};
pub use path::{BasePoint, Contour, ContourKind, ContourOptions, Path, Point, Segment};
pub use series::{frobenius_series, indicial_roots, system_frobenius, Base, FrobeniusGerm, Series, SystemGerm};
pub use transport::{continue_solution, integrate_system, StepOptions, Transport};
pub use verify::{
    draw_parameters, sample_points, verify_integral_theorem, verify_seeded, CaseReport, ResidualReport, TheoremId,
    VerifyOptions,
};

use crate::error::{Error, Result};
use crate::fuchsian::ScalarODE2;
use crate::num_core::{cr, CMatrix, CRational, C64};

/// `A(z) = sum_p R_p / (z - p)` of arbitrary size.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSystem {
    pub poles: Vec<C64>,
    pub residues: Vec<CMatrix>,
}

impl RationalSystem {
    pub fn new(poles: Vec<C64>, residues: Vec<CMatrix>) -> Self {
        Self { poles, residues }
    }

    pub fn residue_at_infinity(&self) -> CMatrix {
        let n = self.dim();
        -self.residues.iter().fold(CMatrix::zeros(n, n), |a, r| a + r)
    }
}

/// A linear system `Y' = A(z) Y` with isolated singularities.
pub trait LinearOde: Sync {
    fn dim(&self) -> usize;
    fn singularities(&self) -> Vec<C64>;
    fn eval(&self, z: C64) -> Result<CMatrix>;
    /// Taylor coefficients of `A(b + x)`.
    fn taylor(&self, b: C64, n: usize) -> Result<Vec<CMatrix>>;
}

impl LinearOde for RationalSystem {
    fn dim(&self) -> usize {
        self.residues.first().map_or(0, |m| m.nrows())
    }

    fn singularities(&self) -> Vec<C64> {
        self.poles.clone()
    }

    fn eval(&self, z: C64) -> Result<CMatrix> {
        let n = self.dim();
        let mut a = CMatrix::zeros(n, n);
        for (p, r) in self.poles.iter().zip(&self.residues) {
            if z == *p {
                return Err(Error::Pole(z));
            }
            a += r / (z - p);
        }
        Ok(a)
    }

    fn taylor(&self, b: C64, n: usize) -> Result<Vec<CMatrix>> {
        let d = self.dim();
        let mut out = vec![CMatrix::zeros(d, d); n];
        for (p, r) in self.poles.iter().zip(&self.residues) {
            let e = b - p;
            if e.norm() == 0.0 {
                return Err(Error::Pole(b));
            }
            // 1/(e + x) = sum (-1)^k x^k / e^{k+1}
            let inv = e.inv();
            let mut f = inv;
            for m in out.iter_mut() {
                *m += r * f;
                f *= -inv;
            }
        }
        Ok(out)
    }
}

/// First-order companion form `(y, y')' = [[0, 1], [-p2, -p1]] (y, y')`.
impl LinearOde for ScalarODE2 {
    fn dim(&self) -> usize {
        2
    }

    fn singularities(&self) -> Vec<C64> {
        self.singular_points()
    }

    fn eval(&self, z: C64) -> Result<CMatrix> {
        let (a, b) = ScalarODE2::eval(self, z)?;
        Ok(crate::num_core::mat2(cr(0.0), cr(1.0), -b, -a))
    }

    fn taylor(&self, b: C64, n: usize) -> Result<Vec<CMatrix>> {
        let t1 = self.p1.taylor(b, n)?;
        let t2 = self.p2.taylor(b, n)?;
        Ok((0..n)
            .map(|k| {
                let one = if k == 0 { cr(1.0) } else { cr(0.0) };
                crate::num_core::mat2(cr(0.0), one, -t2[k], -t1[k])
            })
            .collect())
    }
}

/// `r(1/s)` as a rational function of `s`.
pub(crate) fn compose_inverse(r: &CRational) -> CRational {
    use crate::num_core::CPoly;
    if r.is_zero() {
        return CRational::zero();
    }
    let num = r.num();
    let d = num.degree().unwrap_or(0);
    let rev: Vec<C64> = num.coeffs().iter().rev().copied().collect();
    let mut top = CPoly::new(rev);
    let mut poles = vec![];
    let mut scale = cr(1.0);
    for p in r.poles() {
        if p.norm() == 0.0 {
            // 1/(1/s) = s
            top = top.mul(&CPoly::new(vec![cr(0.0), cr(1.0)]));
        } else {
            // 1/(1/s - p) = s / (1 - p s) = -s / (p (s - 1/p))
            top = top.mul(&CPoly::new(vec![cr(0.0), cr(1.0)]));
            scale /= -p;
            poles.push(p.inv());
        }
    }
    // numerator carries s^{-d}
    for _ in 0..d {
        poles.push(cr(0.0));
    }
    CRational::from_factored(top.scale(scale), poles)
}

/// Run `f` over `items` on up to `threads` workers (0 = available parallelism).
pub fn parallel_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let n = if threads == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { threads }
        .min(items.len().max(1));
    if n <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(n);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| {
                let f = &f;
                s.spawn(move || c.iter().map(f).collect::<Vec<R>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Thread count from `HEUNMCV_THREADS` (unset or 0 = automatic).
pub fn threads_from_env() -> usize {
    std::env::var("HEUNMCV_THREADS").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}
