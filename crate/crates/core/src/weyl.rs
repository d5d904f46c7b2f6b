//! Affine Weyl group action on extended parameters and the two
//! parameter maps induced by middle convolution.

use crate::error::{Error, Result};
use crate::fuchsian::ThetaParams;
use crate::num_core::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtParams {
    pub theta: ThetaParams,
    pub lambda: C64,
    pub mu: C64,
    pub t: C64,
}

impl ExtParams {
    pub fn new(theta: ThetaParams, lambda: C64, mu: C64, t: C64) -> Self {
        Self { theta, lambda, mu, t }
    }

    /// Largest componentwise difference.
    pub fn distance(&self, o: &Self) -> f64 {
        let a = self.theta.as_array();
        let b = o.theta.as_array();
        (0..4)
            .map(|i| (a[i] - b[i]).norm())
            .chain([(self.lambda - o.lambda).norm(), (self.mu - o.mu).norm(), (self.t - o.t).norm()])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeylWord(pub Vec<u8>);

impl WeylWord {
    /// The word realizing the parameter map of the convolution with `nu = kappa2`.
    pub fn mc_kappa2() -> Self {
        Self(vec![0, 3, 4, 2, 0, 3, 4])
    }

    /// The same map with the second block reversed.
    pub fn mc_kappa2_alt() -> Self {
        Self(vec![0, 3, 4, 2, 4, 3, 0])
    }
}

const TINY: f64 = 1e-14;

fn guard(d: C64, generator: u8, position: usize) -> Result<C64> {
    if d.norm() <= TINY {
        Err(Error::GeneratorUndefined { generator, position })
    } else {
        Ok(d)
    }
}

fn generator_at(i: u8, p: &ExtParams, position: usize) -> Result<ExtParams> {
    let th = p.theta;
    let mut q = *p;
    match i {
        0 => {
            let d = guard(p.lambda - p.t, 0, position)?;
            q.theta.thetat = -th.thetat;
            q.mu = p.mu - th.thetat / d;
        }
        1 => {
            q.theta.thetainf = 2.0 - th.thetainf;
        }
        2 => {
            let m = guard(p.mu, 2, position)?;
            let k1 = th.kappa1();
            q.theta = ThetaParams::new(k1 + th.theta0, k1 + th.theta1, k1 + th.thetat, -th.kappa2());
            q.lambda = p.lambda + k1 / m;
        }
        3 => {
            let d = guard(p.lambda - 1.0, 3, position)?;
            q.theta.theta1 = -th.theta1;
            q.mu = p.mu - th.theta1 / d;
        }
        4 => {
            let d = guard(p.lambda, 4, position)?;
            q.theta.theta0 = -th.theta0;
            q.mu = p.mu - th.theta0 / d;
        }
        _ => return Err(Error::InvalidInput(format!("no generator s{i}"))),
    }
    Ok(q)
}

pub fn apply_generator(i: u8, p: &ExtParams) -> Result<ExtParams> {
    generator_at(i, p, 0)
}

/// Apply the letters left to right; errors carry the failing position.
pub fn apply_word(w: &WeylWord, p: &ExtParams) -> Result<ExtParams> {
    w.0.iter().enumerate().try_fold(*p, |acc, (pos, i)| generator_at(*i, &acc, pos))
}

fn nz(d: C64, what: &str) -> Result<C64> {
    if d.norm() <= TINY {
        Err(Error::MapUndefined(what.into()))
    } else {
        Ok(d)
    }
}

pub fn mc_kappa2_map(p: &ExtParams) -> Result<ExtParams> {
    let th = p.theta;
    let k2 = th.kappa2();
    if k2.norm() <= TINY {
        return Ok(*p);
    }
    let (l, t) = (p.lambda, p.t);
    let l0 = nz(l, "lambda")?;
    let l1 = nz(l - 1.0, "lambda - 1")?;
    let lt = nz(l - t, "lambda - t")?;
    let d = nz(
        p.mu - th.theta0 / l0 - th.theta1 / l1 - th.thetat / lt,
        "mu - theta0/lambda - theta1/(lambda-1) - thetat/(lambda-t)",
    )?;
    let lam = l - k2 / d;
    let a0 = nz(lam, "lambda~")?;
    let a1 = nz(lam - 1.0, "lambda~ - 1")?;
    let at = nz(lam - t, "lambda~ - t")?;
    let al = nz(l - lam, "lambda - lambda~")?;
    let mu = (k2 + th.theta0) / a0 + (k2 + th.theta1) / a1 + (k2 + th.thetat) / at + k2 / al;
    Ok(ExtParams::new(th.shifted(k2), lam, mu, t))
}

pub fn mc_kappa1_map(p: &ExtParams) -> Result<ExtParams> {
    if p.mu.norm() <= TINY {
        return Err(Error::MapUndefined("mu".into()));
    }
    apply_generator(2, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num_core::{c, cr};

    fn base() -> ExtParams {
        ExtParams::new(ThetaParams::from_array([cr(0.0), cr(0.0), cr(0.0), cr(2.0)]), cr(0.5), cr(1.0), cr(2.0))
    }

    #[test]
    fn s2_example() {
        let q = apply_generator(2, &base()).unwrap();
        assert!(q.theta.as_array().iter().all(|x| (x - 1.0).norm() < 1e-15));
        assert!((q.lambda - 1.5).norm() < 1e-15 && (q.mu - 1.0).norm() < 1e-15);
    }

    #[test]
    fn mc_kappa2_example() {
        let q = mc_kappa2_map(&base()).unwrap();
        let want = [-1.0, -1.0, -1.0, 1.0];
        for (a, b) in q.theta.as_array().iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!((q.lambda - 1.5).norm() < 1e-14);
        assert!((q.mu - 1.0 / 3.0).norm() < 1e-14);
    }

    #[test]
    fn undefined_generator_reports_position() {
        let p = ExtParams::new(
            ThetaParams::from_array([c(0.2, 0.0), cr(0.1), cr(0.3), cr(0.9)]),
            cr(2.0),
            cr(1.0),
            cr(2.0),
        );
        assert_eq!(
            apply_word(&WeylWord(vec![1, 3, 0]), &p),
            Err(Error::GeneratorUndefined { generator: 0, position: 2 })
        );
    }
}
