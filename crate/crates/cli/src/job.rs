use heunmcv::analytic::Point;
use heunmcv::fuchsian::{Lambda, SystemState, ThetaParams};
use heunmcv::num_core::CMatrix;
use heunmcv::{Error, Result, C64};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Complex number as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Cx(C64::new(re, im)))
    }
}

/// Row-major nested arrays of `[re, im]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix(pub CMatrix);

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Cx>> = self.0.row_iter().map(|r| r.iter().map(|x| Cx(*x)).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Cx>>::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if n == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(D::Error::custom("matrix rows must be non-empty and of equal length"));
        }
        Ok(Matrix(CMatrix::from_fn(n, m, |i, j| rows[i][j].0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSpec {
    pub theta0: Cx,
    pub theta1: Cx,
    pub thetat: Cx,
    pub thetainf: Cx,
}

impl ThetaSpec {
    pub fn params(&self) -> ThetaParams {
        ThetaParams::new(self.theta0.0, self.theta1.0, self.thetat.0, self.thetainf.0)
    }

    pub fn from_params(p: &ThetaParams) -> Self {
        Self { theta0: Cx(p.theta0), theta1: Cx(p.theta1), thetat: Cx(p.thetat), thetainf: Cx(p.thetainf) }
    }
}

/// `lambda` is `[re, im]` or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Finite(Cx),
    Named(PointName),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub t: Cx,
    pub lambda: LambdaSpec,
    pub mu: Cx,
    #[serde(default = "one")]
    pub k: Cx,
}

fn one() -> Cx {
    Cx(C64::new(1.0, 0.0))
}

impl StateSpec {
    pub fn state(&self) -> Result<SystemState> {
        let lambda = match self.lambda {
            LambdaSpec::Finite(l) => Lambda::Finite(l.0),
            LambdaSpec::Named(PointName::Inf) => Lambda::Infinity,
            LambdaSpec::Named(p) => {
                return Err(Error::InvalidInput(format!("lambda must be finite or \"inf\", got {p:?}")))
            }
        };
        let s = SystemState { t: self.t.0, lambda, mu: self.mu.0, k: self.k.0 };
        s.validate()?;
        Ok(s)
    }

    pub fn from_state(s: &SystemState) -> Self {
        let lambda = match s.lambda {
            Lambda::Finite(l) => LambdaSpec::Finite(Cx(l)),
            Lambda::Infinity => LambdaSpec::Named(PointName::Inf),
        };
        Self { t: Cx(s.t), lambda, mu: Cx(s.mu), k: Cx(s.k) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointName {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "t")]
    T,
    #[serde(rename = "inf")]
    Inf,
}

impl PointName {
    pub fn point(&self, t: C64) -> Point {
        match self {
            PointName::Zero => Point::Finite(C64::new(0.0, 0.0)),
            PointName::One => Point::Finite(C64::new(1.0, 0.0)),
            PointName::T => Point::Finite(t),
            PointName::Inf => Point::Infinity,
        }
    }
}

/// Residue matrices of a system with poles `0, 1, t`, as emitted by `build`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub t: Cx,
    pub a0: Matrix,
    pub a1: Matrix,
    pub at: Matrix,
    /// Checked against `-(a0 + a1 + at)` when present.
    pub a_inf: Option<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    /// Optional; must agree with the command given on the command line.
    pub command: Option<String>,
    pub theta: Option<ThetaSpec>,
    pub state: Option<StateSpec>,
    pub system: Option<SystemSpec>,
    /// Weyl word, generators applied left to right.
    pub word: Option<Vec<u8>>,
    /// Position of the third singular point when no state is given.
    pub t: Option<Cx>,
    pub k: Option<Cx>,
    pub line: Option<String>,
    pub coord: Option<Cx>,
    /// Sample points.
    pub z: Option<Vec<Cx>>,
    pub check_conjugate: Option<bool>,
    pub theorem: Option<String>,
    pub seed: Option<u64>,
    pub draws: Option<usize>,
    pub samples: Option<usize>,
    pub points: Option<Vec<PointName>>,
    pub loops: Option<Vec<PointName>>,
    pub base: Option<Cx>,
    pub z_radius: Option<f64>,
    pub tol: Option<f64>,
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("job: {e}")))
    }

    pub fn theta(&self) -> Result<ThetaParams> {
        self.theta.map(|t| t.params()).ok_or_else(|| Error::InvalidInput("missing field \"theta\"".into()))
    }

    pub fn t(&self) -> Result<C64> {
        self.t
            .or(self.state.map(|s| s.t))
            .or(self.system.as_ref().map(|s| s.t))
            .map(|t| t.0)
            .ok_or_else(|| Error::InvalidInput("missing field \"t\" (or \"state\")".into()))
    }

    pub fn k(&self) -> C64 {
        self.k.or(self.state.map(|s| s.k)).map_or(C64::new(1.0, 0.0), |k| k.0)
    }

    pub fn state(&self) -> Result<SystemState> {
        self.state.ok_or_else(|| Error::InvalidInput("missing field \"state\"".into()))?.state()
    }
}
