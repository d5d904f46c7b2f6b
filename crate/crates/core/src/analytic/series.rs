use super::{compose_inverse, RationalSystem};
use crate::error::{Error, Result};
use crate::fuchsian::ScalarODE2;
use crate::num_core::{cr, kernel_basis, CMatrix, CPoly, CRational, CVector, C64};

/// `(z - base)^exponent * sum coeffs[n] (z - base)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub base: C64,
    pub exponent: C64,
    pub coeffs: Vec<C64>,
}

fn near_int(x: C64) -> Option<i64> {
    let r = x.re.round();
    if (x - cr(r)).norm() < 1e-9 {
        Some(r as i64)
    } else {
        None
    }
}

impl Series {
    pub fn new(base: C64, exponent: C64, coeffs: Vec<C64>) -> Self {
        let mut s = Self { base, exponent, coeffs };
        s.fold_integer_exponent();
        s
    }

    /// Nonnegative integer exponents are absorbed into the coefficients.
    fn fold_integer_exponent(&mut self) {
        if let Some(m) = near_int(self.exponent) {
            if m >= 0 {
                let mut c = vec![cr(0.0); m as usize];
                c.extend_from_slice(&self.coeffs);
                self.coeffs = c;
                self.exponent = cr(0.0);
            }
        }
    }

    /// `self / (l - z)` for a series whose power part vanishes at `l`.
    /// Coefficient `m` is `a^{-m-1}` times the head sum `sum_{k<=m} c_k a^k`
    /// or minus the tail sum, `a = l - base`, whichever has less rounding
    /// and truncation error.
    pub fn div_vanishing_at(&self, l: C64) -> Result<Self> {
        let a = l - self.base;
        if a.norm() == 0.0 {
            return Err(Error::Pole(l));
        }
        let n = self.coeffs.len();
        let terms: Vec<C64> = self
            .coeffs
            .iter()
            .scan(cr(1.0), |pw, c| {
                let v = c * *pw;
                *pw *= a;
                Some(v)
            })
            .collect();
        let trunc = 10.0 * terms.iter().rev().take(3).map(|x| x.norm()).fold(0.0, f64::max);
        let mut tail = vec![(cr(0.0), 0.0); n + 1];
        for k in (0..n).rev() {
            tail[k] = (tail[k + 1].0 + terms[k], tail[k + 1].1 + terms[k].norm());
        }
        let (mut head, mut head_abs) = (cr(0.0), 0.0);
        let mut inv = a.inv();
        let mut out = Vec::with_capacity(n);
        for m in 0..n {
            head += terms[m];
            head_abs += terms[m].norm();
            let (t, t_abs) = tail[m + 1];
            let v = if head_abs * f64::EPSILON <= t_abs * f64::EPSILON + trunc { head } else { -t };
            out.push(v * inv);
            inv /= a;
        }
        Ok(Self { base: self.base, exponent: self.exponent, coeffs: out })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn derivative(&self) -> Self {
        if self.exponent == cr(0.0) {
            let c = self.coeffs.iter().enumerate().skip(1).map(|(n, a)| a * n as f64).collect();
            return Self { base: self.base, exponent: cr(0.0), coeffs: c };
        }
        let c = self.coeffs.iter().enumerate().map(|(n, a)| a * (self.exponent + n as f64)).collect();
        Self::new(self.base, self.exponent - 1.0, c)
    }

    pub fn nth_derivative(&self, m: usize) -> Self {
        (0..m).fold(self.clone(), |s, _| s.derivative())
    }

    pub fn scale(&self, a: C64) -> Self {
        Self { base: self.base, exponent: self.exponent, coeffs: self.coeffs.iter().map(|x| x * a).collect() }
    }

    /// Multiply by an analytic function given by Taylor coefficients at the base.
    pub fn mul_taylor(&self, t: &[C64]) -> Self {
        let n = self.coeffs.len();
        let c =
            (0..n).map(|i| (0..=i).map(|j| self.coeffs[j] * t.get(i - j).copied().unwrap_or_default()).sum()).collect();
        Self { base: self.base, exponent: self.exponent, coeffs: c }
    }

    pub fn mul_rational(&self, r: &CRational) -> Result<Self> {
        let t = r.taylor(self.base, self.coeffs.len())?;
        Ok(self.mul_taylor(&t))
    }

    pub fn mul_poly(&self, p: &CPoly) -> Self {
        let sh = p.shift(self.base);
        self.mul_taylor(sh.coeffs())
    }

    /// Sum of two series whose exponents differ by an integer; the result
    /// keeps the length of the shorter expansion.
    pub fn add(&self, o: &Self) -> Result<Self> {
        let d = near_int(o.exponent - self.exponent)
            .ok_or_else(|| Error::InvalidInput("series exponents differ by a non-integer".into()))?;
        let (lo, hi, shift) = if d >= 0 { (self, o, d as usize) } else { (o, self, (-d) as usize) };
        let n = lo.coeffs.len().min(hi.coeffs.len() + shift);
        let mut c = lo.coeffs[..n].to_vec();
        for (i, a) in hi.coeffs.iter().enumerate() {
            if i + shift < n {
                c[i + shift] += a;
            }
        }
        Ok(Self::new(lo.base, lo.exponent, c))
    }

    pub fn eval(&self, z: C64) -> C64 {
        let x = z - self.base;
        let s = self.coeffs.iter().rev().fold(cr(0.0), |acc, a| acc * x + a);
        if self.exponent == cr(0.0) {
            s
        } else {
            s * x.powc(self.exponent)
        }
    }

    /// Largest coefficient modulus.
    pub fn scale_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, x| a.max(x.norm()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Base {
    Finite(C64),
    Infinity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusGerm {
    pub base: Base,
    pub exponent: C64,
    pub coeffs: Vec<C64>,
    pub radius_hint: f64,
}

impl FrobeniusGerm {
    fn local(&self) -> Series {
        let b = match self.base {
            Base::Finite(b) => b,
            Base::Infinity => cr(0.0),
        };
        Series { base: b, exponent: self.exponent, coeffs: self.coeffs.clone() }
    }

    /// Value and derivative at `z` (principal branch of the power).
    pub fn eval(&self, z: C64) -> (C64, C64) {
        let s = self.local();
        let d = s.derivative();
        match self.base {
            Base::Finite(_) => (s.eval(z), d.eval(z)),
            Base::Infinity => {
                let w = z.inv();
                (s.eval(w), -w * w * d.eval(w))
            }
        }
    }
}

/// `(P0, Q0)` with indicial polynomial `s(s-1) + P0 s + Q0`, or an error at an
/// irregular point.
fn local_data(ode: &ScalarODE2, b: C64) -> Result<(CRational, CRational)> {
    if ode.p1.pole_order(b) > 1 || ode.p2.pole_order(b) > 2 {
        return Err(Error::NotRegularSingular(format!("{b}")));
    }
    let x = CRational::poly(CPoly::linear(b));
    let p = ode.p1.mul(&x);
    let q = ode.p2.mul(&x).mul(&x);
    Ok((p, q))
}

fn at_infinity(ode: &ScalarODE2) -> ScalarODE2 {
    let p1 = CRational::from_factored(CPoly::constant(cr(2.0)), vec![cr(0.0)])
        .sub(&compose_inverse(&ode.p1).mul(&CRational::from_factored(CPoly::constant(cr(1.0)), vec![cr(0.0); 2])));
    let p2 = compose_inverse(&ode.p2).mul(&CRational::from_factored(CPoly::constant(cr(1.0)), vec![cr(0.0); 4]));
    ScalarODE2::new(p1, p2)
}

pub fn indicial_roots(ode: &ScalarODE2, base: Base) -> Result<(C64, C64)> {
    let (ode, b) = match base {
        Base::Finite(b) => (ode.clone(), b),
        Base::Infinity => (at_infinity(ode), cr(0.0)),
    };
    let (p, q) = local_data(&ode, b)?;
    let p0 = p.eval(b)?;
    let q0 = q.eval(b)?;
    let bb = p0 - 1.0;
    let disc = (bb * bb - 4.0 * q0).sqrt();
    let (r1, r2) = crate::fuchsian::canonical_pair((-bb - disc) * 0.5, (-bb + disc) * 0.5);
    Ok((r1, r2))
}

fn radius_from(points: &[C64], b: C64) -> f64 {
    points.iter().map(|p| (p - b).norm()).filter(|d| *d > 1e-12).fold(f64::INFINITY, f64::min)
}

/// Frobenius solution with the given exponent. A resonant step whose
/// right-hand side vanishes is passed with a zero coefficient; otherwise
/// the solution carries a logarithm and `LogarithmicCase` is returned.
pub fn frobenius_series(ode: &ScalarODE2, base: Base, exponent: C64, n: usize) -> Result<FrobeniusGerm> {
    let (work, b) = match base {
        Base::Finite(b) => (ode.clone(), b),
        Base::Infinity => (at_infinity(ode), cr(0.0)),
    };
    let (p, q) = local_data(&work, b)?;
    let pt = p.taylor(b, n)?;
    let qt = q.taylor(b, n)?;
    let f = |s: C64| s * (s - 1.0) + pt[0] * s + qt[0];
    let fscale = 1.0 + exponent.norm().powi(2) + pt[0].norm() * exponent.norm() + qt[0].norm();
    if f(exponent).norm() > 1e-8 * fscale {
        return Err(Error::InvalidInput(format!("{exponent} is not an indicial root")));
    }
    let mut c = vec![cr(0.0); n];
    if n > 0 {
        c[0] = cr(1.0);
    }
    for m in 1..n {
        let mut rhs = cr(0.0);
        let mut rscale = 0.0;
        for k in 1..=m {
            let term = ((exponent + (m - k) as f64) * pt[k] + qt[k]) * c[m - k];
            rhs -= term;
            rscale += term.norm();
        }
        let fm = f(exponent + m as f64);
        let s = 1.0 + (exponent + m as f64).norm().powi(2);
        if fm.norm() <= 1e-9 * s {
            if rhs.norm() > 1e-8 * (1.0 + rscale) {
                return Err(Error::LogarithmicCase(exponent + m as f64));
            }
            c[m] = cr(0.0);
        } else {
            c[m] = rhs / fm;
        }
    }
    let mut sing = work.singular_points();
    sing.retain(|x| (x - b).norm() > 1e-12);
    let radius_hint = radius_from(&sing, b);
    Ok(FrobeniusGerm { base, exponent, coeffs: c, radius_hint })
}

/// Vector Frobenius solution at a pole of a rational system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemGerm {
    pub base: C64,
    pub exponent: C64,
    pub coeffs: Vec<CVector>,
    pub radius_hint: f64,
}

impl SystemGerm {
    pub fn eval(&self, z: C64) -> CVector {
        let x = z - self.base;
        let dim = self.coeffs[0].len();
        let s = self.coeffs.iter().rev().fold(CVector::zeros(dim), |acc, a| acc * x + a);
        if self.exponent == cr(0.0) {
            s
        } else {
            s * x.powc(self.exponent)
        }
    }

    /// Component `i` as a scalar series.
    pub fn component(&self, i: usize) -> Series {
        Series::new(self.base, self.exponent, self.coeffs.iter().map(|v| v[i]).collect())
    }
}

/// Solution `x^rho sum Y_n x^n` at the pole with index `pole` of `sys`;
/// `rho` must be an eigenvalue of the residue there.
pub fn system_frobenius(sys: &RationalSystem, pole: usize, exponent: C64, n: usize) -> Result<SystemGerm> {
    let b = *sys.poles.get(pole).ok_or_else(|| Error::InvalidInput("pole index out of range".into()))?;
    let r = &sys.residues[pole];
    let dim = r.nrows();
    let id = CMatrix::identity(dim, dim);
    let others = RationalSystem::new(
        sys.poles.iter().enumerate().filter(|(i, _)| *i != pole).map(|(_, p)| *p).collect(),
        sys.residues.iter().enumerate().filter(|(i, _)| *i != pole).map(|(_, m)| m.clone()).collect(),
    );
    let h = if others.poles.is_empty() {
        vec![CMatrix::zeros(dim, dim); n]
    } else {
        use super::LinearOde;
        others.taylor(b, n)?
    };
    let m0 = &id * exponent - r;
    let ker = kernel_basis(&m0, 1e-9);
    let y0 = ker
        .first()
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("{exponent} is not an eigenvalue of the residue")))?;
    let mut coeffs = vec![y0];
    for m in 1..n {
        let mut rhs = CVector::zeros(dim);
        for k in 0..m {
            rhs += &h[k] * &coeffs[m - 1 - k];
        }
        let a = &id * (exponent + m as f64) - r;
        let ys = match a.clone().lu().solve(&rhs) {
            Some(v) if v.iter().all(|x| x.is_finite()) && (&a * &v - &rhs).norm() <= 1e-9 * (1.0 + rhs.norm()) => v,
            _ => {
                let svd = a.clone().svd(true, true);
                let v = svd.solve(&rhs, 1e-10).map_err(|_| Error::LogarithmicCase(exponent + m as f64))?;
                if (&a * &v - &rhs).norm() > 1e-8 * (1.0 + rhs.norm()) {
                    return Err(Error::LogarithmicCase(exponent + m as f64));
                }
                v
            }
        };
        coeffs.push(ys);
    }
    let radius_hint = radius_from(&sys.poles, b);
    Ok(SystemGerm { base: b, exponent, coeffs, radius_hint })
}
