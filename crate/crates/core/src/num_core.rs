//! Complex polynomials, rational functions with factored denominators and
//! small dense linear algebra.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Inputs closer than this to an excluded locus are rejected.
pub const GUARD: f64 = 1e-8;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// True when `a` lies within the guard band of `b`.
pub fn near(a: C64, b: C64) -> bool {
    (a - b).norm() <= GUARD * (1.0 + b.norm())
}

pub fn mat2(a: C64, b: C64, c: C64, d: C64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Mean of `f` on a circle of radius `r` about zero; approximates `f(0)` for
/// `f` holomorphic on the closed disk.
pub fn circle_mean<T, F>(r: f64, n: usize, mut f: F) -> T
where
    F: FnMut(C64) -> T,
    T: std::ops::Add<Output = T> + std::ops::Mul<C64, Output = T>,
{
    let mut acc: Option<T> = None;
    for j in 0..n {
        let ang = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
        let v = f(C64::from_polar(r, ang));
        acc = Some(match acc {
            None => v,
            Some(a) => a + v,
        });
    }
    acc.expect("n > 0") * cr(1.0 / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

impl CPoly {
    /// Coefficients in increasing degree; trailing exact zeros are dropped.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|x| *x == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Drops leading coefficients below `rel` times the largest one.
    pub fn trimmed(&self, rel: f64) -> Self {
        let big = self.coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|x| x.norm() <= rel * big) && c.len() > 1 {
            c.pop();
        }
        Self::new(c)
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn constant(a: C64) -> Self {
        Self::new(vec![a])
    }

    /// The monic linear factor `z - r`.
    pub fn linear(r: C64) -> Self {
        Self::new(vec![-r, cr(1.0)])
    }

    pub fn from_roots(lead: C64, roots: &[C64]) -> Self {
        roots.iter().fold(Self::constant(lead), |p, r| p.mul(&Self::linear(*r)))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> C64 {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    /// Sum of |a_i| |z|^i, the natural scale of `eval(z)`.
    pub fn eval_scale(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(cr(-1.0)))
    }

    pub fn scale(&self, a: C64) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * a).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Coefficients of `p(b + x)` in powers of `x`.
    pub fn shift(&self, b: C64) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = a[j + 1] * b;
                a[j] += t;
            }
        }
        Self::new(a)
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or_else(|| Error::InvalidInput("division by the zero polynomial".into()))?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![C64::new(0.0, 0.0); r.len() - dd];
        let lead = d.lead();
        for i in (0..q.len()).rev() {
            let f = r[i + dd] / lead;
            q[i] = f;
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[i + j] -= f * dj;
            }
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Divide by `z - r`, dropping the remainder.
    pub fn deflate(&self, r: C64) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero();
        }
        let mut q = vec![C64::new(0.0, 0.0); n - 1];
        let mut acc = C64::new(0.0, 0.0);
        for i in (1..n).rev() {
            acc = acc * r + self.coeffs[i];
            q[i - 1] = acc;
        }
        Self::new(q)
    }

    /// All roots, by companion-matrix eigenvalues followed by Newton polishing.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let n = match self.degree() {
            None => return Err(Error::InvalidInput("roots of the zero polynomial".into())),
            Some(n) => n,
        };
        if n == 0 {
            return Ok(vec![]);
        }
        if n == 1 {
            return Ok(vec![-self.coeffs[0] / self.coeffs[1]]);
        }
        let lead = self.lead();
        let mut m = CMatrix::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = cr(1.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        let ev = m.schur().eigenvalues().ok_or_else(|| Error::InvalidInput("eigenvalue iteration failed".into()))?;
        let dp = self.derivative();
        Ok(ev
            .iter()
            .map(|&r0| {
                let mut r = r0;
                for _ in 0..3 {
                    let d = dp.eval(r);
                    if d.norm() == 0.0 {
                        break;
                    }
                    let step = self.eval(r) / d;
                    if !step.is_finite() || step.norm() > 1e-3 * (1.0 + r.norm()) {
                        break;
                    }
                    r -= step;
                }
                r
            })
            .collect())
    }
}

/// Rational function `num(z) / prod (z - p_i)` with the denominator kept in
/// factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct CRational {
    num: CPoly,
    poles: Vec<C64>,
}

const CANCEL_TOL: f64 = 1e-9;

fn same_point(a: C64, b: C64) -> bool {
    (a - b).norm() <= 1e-11 * (1.0 + a.norm().max(b.norm()))
}

impl CRational {
    /// General constructor; the denominator is factored numerically.
    pub fn new(num: CPoly, den: CPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let poles = den.roots()?;
        Ok(Self::from_factored(num.scale(den.lead().inv()), poles))
    }

    /// `num / prod (z - p)` over the given poles, normalized.
    pub fn from_factored(num: CPoly, poles: Vec<C64>) -> Self {
        let mut r = Self { num, poles };
        r.normalize(CANCEL_TOL);
        r
    }

    pub fn zero() -> Self {
        Self { num: CPoly::zero(), poles: vec![] }
    }

    pub fn constant(a: C64) -> Self {
        Self { num: CPoly::constant(a), poles: vec![] }
    }

    pub fn poly(p: CPoly) -> Self {
        Self { num: p, poles: vec![] }
    }

    /// `a / (z - p)`.
    pub fn simple_pole(a: C64, p: C64) -> Self {
        Self::from_factored(CPoly::constant(a), vec![p])
    }

    pub fn num(&self) -> &CPoly {
        &self.num
    }

    /// Monic denominator.
    pub fn den(&self) -> CPoly {
        CPoly::from_roots(cr(1.0), &self.poles)
    }

    /// Poles with multiplicity.
    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    /// Distinct poles.
    pub fn distinct_poles(&self) -> Vec<C64> {
        let mut out: Vec<C64> = vec![];
        for p in &self.poles {
            if !out.iter().any(|q| same_point(*p, *q)) {
                out.push(*p);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancel common linear factors: a pole `p` is cancelled when the numerator
    /// vanishes there to relative tolerance `tol`.
    pub fn normalize(&mut self, tol: f64) {
        if self.num.is_zero() {
            self.poles.clear();
            return;
        }
        loop {
            // measured at radius max(|p|, 1) so that a pole at 0 is not judged by a0 alone
            let hit = self.poles.iter().position(|p| {
                let s = self.num.eval_scale(C64::new(p.norm().max(1.0), 0.0));
                self.num.eval(*p).norm() <= tol * s
            });
            match hit {
                Some(i) if self.num.degree().unwrap_or(0) >= 1 => {
                    let p = self.poles.remove(i);
                    self.num = self.num.deflate(p);
                }
                _ => break,
            }
        }
        let lead_scale = self.num.coeffs().iter().fold(0.0f64, |a, x| a.max(x.norm()));
        if lead_scale == 0.0 {
            self.num = CPoly::zero();
            self.poles.clear();
        }
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let mut d = cr(1.0);
        for p in &self.poles {
            if same_point(z, *p) {
                return Err(Error::Pole(z));
            }
            d *= z - p;
        }
        let v = self.num.eval(z) / d;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Pole(z))
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(cr(-1.0))
    }

    pub fn scale(&self, a: C64) -> Self {
        if a == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self { num: self.num.scale(a), poles: self.poles.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut only_b = other.poles.clone();
        let mut only_a = vec![];
        for p in &self.poles {
            if let Some(j) = only_b.iter().position(|q| same_point(*p, *q)) {
                only_b.remove(j);
            } else {
                only_a.push(*p);
            }
        }
        let num = self
            .num
            .mul(&CPoly::from_roots(cr(1.0), &only_b))
            .add(&other.num.mul(&CPoly::from_roots(cr(1.0), &only_a)));
        let mut poles = self.poles.clone();
        poles.extend(only_b);
        Self::from_factored(num, poles)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&other.poles);
        Self::from_factored(self.num.mul(&other.num), poles)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::InvalidInput("division by the zero rational".into()));
        }
        let den = other.num.trimmed(1e-13);
        let zeros = den.roots()?;
        let mut poles = self.poles.clone();
        poles.extend(zeros);
        let num = self.num.mul(&CPoly::from_roots(den.lead().inv(), &other.poles));
        Ok(Self::from_factored(num, poles))
    }

    pub fn derivative(&self) -> Self {
        if self.poles.is_empty() {
            return Self::poly(self.num.derivative());
        }
        let den = CPoly::from_roots(cr(1.0), &self.poles);
        let num = self.num.derivative().mul(&den).sub(&self.num.mul(&den.derivative()));
        let mut poles = self.poles.clone();
        poles.extend_from_slice(&self.poles);
        Self::from_factored(num, poles)
    }

    /// Order of the pole at `p` (0 if regular).
    pub fn pole_order(&self, p: C64) -> usize {
        self.poles.iter().filter(|q| same_point(p, **q)).count()
    }

    /// `lim (z-p)^m r(z)` where `m` is the pole order at `p`.
    pub fn leading_at(&self, p: C64, m: usize) -> C64 {
        let mut skipped = 0;
        let mut d = cr(1.0);
        for q in &self.poles {
            if skipped < m && same_point(p, *q) {
                skipped += 1;
            } else {
                d *= p - q;
            }
        }
        if skipped < m {
            return C64::new(0.0, 0.0);
        }
        self.num.eval(p) / d
    }

    /// Residue at a pole of order at most one.
    pub fn residue(&self, p: C64) -> Result<C64> {
        match self.pole_order(p) {
            0 => Ok(C64::new(0.0, 0.0)),
            1 => Ok(self.leading_at(p, 1)),
            _ => Err(Error::NotRegularSingular(format!("pole of order >1 at {p}"))),
        }
    }

    /// Degree of numerator minus number of poles.
    pub fn degree_at_infinity(&self) -> Option<isize> {
        self.num.degree().map(|d| d as isize - self.poles.len() as isize)
    }

    /// `lim z^m r(z)` as `z -> infinity`.
    pub fn leading_at_infinity(&self, m: isize) -> C64 {
        match self.degree_at_infinity() {
            None => C64::new(0.0, 0.0),
            Some(d) if d + m == 0 => self.num.lead(),
            Some(d) if d + m < 0 => C64::new(0.0, 0.0),
            Some(_) => C64::new(f64::INFINITY, 0.0),
        }
    }

    /// First `n` Taylor coefficients at a regular point `b`.
    pub fn taylor(&self, b: C64, n: usize) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, a) in self.num.shift(b).coeffs().iter().enumerate().take(n) {
            out[i] = *a;
        }
        for p in &self.poles {
            let d = b - p;
            if same_point(b, *p) {
                return Err(Error::Pole(b));
            }
            let inv = d.inv();
            // multiply by 1/(d + x) = sum (-1)^k x^k / d^{k+1}
            let mut prev = C64::new(0.0, 0.0);
            for v in out.iter_mut() {
                let cur = (*v - prev) * inv;
                *v = cur;
                prev = cur;
            }
        }
        Ok(out)
    }
}

/// Orthonormal kernel basis by SVD; singular values below `tol * sigma_max`
/// count as zero.
pub fn kernel_basis(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let (rows, cols) = m.shape();
    let a = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, s| a.max(*s));
    let mut out = vec![];
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol * smax || smax == 0.0 {
            out.push(vt.row(i).transpose().map(|x| x.conj()));
        }
    }
    out
}

pub fn rank(m: &CMatrix, tol: f64) -> usize {
    m.ncols() - kernel_basis(m, tol).len()
}
