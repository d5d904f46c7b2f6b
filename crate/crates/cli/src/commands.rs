use std::f64::consts::PI;

use heunmcv::analytic::{
    integrate_system, loop_relation_defect, monodromy, verify_seeded, BasePoint, Contour, ContourOptions, Path, Point,
    ResidualReport, StepOptions, TheoremId, VerifyOptions,
};
use heunmcv::fuchsian::{
    build_system, construction_residual, reduce_to_scalar, scalar_ode_of_parameters, FuchsianSystem, HeunParams,
    ScalarODE2, SystemState, ThetaParams,
};
use heunmcv::mcv::{det_s_closed_form, displayed_conjugate, middle_convolution_kappa2};
use heunmcv::num_core::{max_abs, CMatrix, CRational, CVector};
use heunmcv::sic::{heun_of_realization, heun_on_line, realize_system_on_line, restriction_consistency, Line};
use heunmcv::weyl::{apply_word, mc_kappa1_map, mc_kappa2_map, ExtParams, WeylWord};
use heunmcv::{Error, Result, C64};
use serde_json::{json, Map, Value};

use crate::job::{JobSpec, Matrix, PointName, StateSpec, ThetaSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Params,
    Build,
    Reduce,
    Restrict,
    Mcv,
    VerifyIntegral,
    Monodromy,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Params => "params",
            Command::Build => "build",
            Command::Reduce => "reduce",
            Command::Restrict => "restrict",
            Command::Mcv => "mcv",
            Command::VerifyIntegral => "verify-integral",
            Command::Monodromy => "monodromy",
        }
    }

    fn default_tol(&self) -> f64 {
        match self {
            Command::Build | Command::Reduce => 1e-9,
            Command::Restrict | Command::Mcv => 1e-8,
            Command::Monodromy => 1e-7,
            Command::Params | Command::VerifyIntegral => 1e-6,
        }
    }
}

/// Command-line overrides of job fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub theorem: Option<String>,
}

/// JSON output, plus the failed check if any residual exceeded its tolerance.
#[derive(Debug)]
pub struct Outcome {
    pub output: Value,
    pub failure: Option<Error>,
}

fn cx(x: C64) -> Value {
    json!([x.re, x.im])
}

fn mat(m: &CMatrix) -> Value {
    serde_json::to_value(Matrix(m.clone())).expect("matrix serializes")
}

fn theta_json(t: &ThetaParams) -> Value {
    serde_json::to_value(ThetaSpec::from_params(t)).expect("theta serializes")
}

fn ext_json(e: &ExtParams) -> Value {
    json!({"theta": theta_json(&e.theta), "lambda": cx(e.lambda), "mu": cx(e.mu), "t": cx(e.t)})
}

fn rational_json(r: &CRational) -> Value {
    json!({
        "numerator": r.num().coeffs().iter().map(|x| cx(*x)).collect::<Vec<_>>(),
        "poles": r.poles().iter().map(|x| cx(*x)).collect::<Vec<_>>(),
    })
}

fn heun_json(h: &HeunParams) -> Value {
    json!({
        "gamma": cx(h.gamma), "delta": cx(h.delta), "epsilon": cx(h.epsilon),
        "alpha": cx(h.alpha), "beta": cx(h.beta), "q": cx(h.q), "t": cx(h.t),
    })
}

fn system_json(s: &FuchsianSystem) -> Value {
    json!({"t": cx(s.t), "a0": mat(&s.a0), "a1": mat(&s.a1), "at": mat(&s.at), "a_inf": mat(&s.a_inf())})
}

/// Records residuals and the first one above `tol`.
struct Checks {
    tol: f64,
    map: Map<String, Value>,
    failure: Option<Error>,
}

impl Checks {
    fn new(tol: f64) -> Self {
        Self { tol, map: Map::new(), failure: None }
    }

    fn record(&mut self, name: &str, r: f64) {
        self.map.insert(name.into(), json!(r));
        if self.failure.is_none() && (r.is_nan() || r > self.tol) {
            self.failure = Some(Error::VerificationFailure { residual: r, threshold: self.tol });
        }
    }

    fn finish(self, mut out: Value) -> Outcome {
        out["residuals"] = Value::Object(self.map);
        out["tol"] = json!(self.tol);
        Outcome { output: out, failure: self.failure }
    }
}

fn default_samples(t: C64) -> Vec<C64> {
    vec![C64::new(0.37, 0.61), C64::new(-0.45, -0.3), C64::new(0.8, -0.55), t + C64::new(0.4, 0.7), C64::new(1.9, 1.3)]
}

fn samples(job: &JobSpec, t: C64) -> Vec<C64> {
    job.z.as_ref().map_or_else(|| default_samples(t), |v| v.iter().map(|x| x.0).collect())
}

fn ode_distance(a: &ScalarODE2, b: &ScalarODE2, zs: &[C64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for z in zs {
        let (a1, a2) = a.eval(*z)?;
        let (b1, b2) = b.eval(*z)?;
        worst = worst.max((a1 - b1).norm() / (1.0 + b1.norm())).max((a2 - b2).norm() / (1.0 + b2.norm()));
    }
    Ok(worst)
}

pub fn run(cmd: Command, job: &JobSpec, ov: &Overrides) -> Result<Outcome> {
    if let Some(c) = &job.command {
        if c != cmd.name() {
            return Err(Error::InvalidInput(format!("job is for {c:?}, not {:?}", cmd.name())));
        }
    }
    let tol = ov.tol.or(job.tol).unwrap_or_else(|| cmd.default_tol());
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    let mut checks = Checks::new(tol);
    let out = match cmd {
        Command::Params => params(job)?,
        Command::Build => build(job, &mut checks)?,
        Command::Reduce => reduce(job, &mut checks)?,
        Command::Restrict => restrict(job, &mut checks)?,
        Command::Mcv => mcv(job, &mut checks)?,
        Command::VerifyIntegral => verify_integral(job, ov, &mut checks)?,
        Command::Monodromy => monodromy_cmd(job, &mut checks)?,
    };
    let mut out = out;
    out["command"] = json!(cmd.name());
    Ok(checks.finish(out))
}

fn params(job: &JobSpec) -> Result<Value> {
    let th = job.theta()?;
    let mut out = json!({"kappa1": cx(th.kappa1()), "kappa2": cx(th.kappa2())});
    if let Some(w) = &job.word {
        let st = job.state()?;
        let ext = ExtParams::new(th, st.finite_lambda()?, st.mu, st.t);
        out["word"] = json!(w);
        out["word_image"] = ext_json(&apply_word(&WeylWord(w.clone()), &ext)?);
    }
    Ok(out)
}

fn build(job: &JobSpec, checks: &mut Checks) -> Result<Value> {
    let (th, st) = (job.theta()?, job.state()?);
    let sys = build_system(&th, &st)?;
    checks.record("construction", construction_residual(&th, &st, &sys)?);
    Ok(json!({"system": system_json(&sys)}))
}

fn reduce(job: &JobSpec, checks: &mut Checks) -> Result<Value> {
    let ode = match (&job.system, job.theta) {
        (Some(s), _) => {
            let sys = FuchsianSystem::new(s.t.0, s.a0.0.clone(), s.a1.0.clone(), s.at.0.clone())?;
            if let Some(ai) = &s.a_inf {
                let d = max_abs(&(&ai.0 - sys.a_inf()));
                if ai.0.shape() != (2, 2) || d > 1e-9 * (1.0 + max_abs(&ai.0)) {
                    return Err(Error::InvalidInput("a_inf disagrees with -(a0 + a1 + at)".into()));
                }
            }
            reduce_to_scalar(&sys)?
        }
        (None, Some(_)) => {
            let (th, st) = (job.theta()?, job.state()?);
            let direct = scalar_ode_of_parameters(&th, &st)?;
            let via = reduce_to_scalar(&build_system(&th, &st)?)?;
            checks.record("reduction", ode_distance(&via, &direct, &samples(job, st.t))?);
            direct
        }
        (None, None) => return Err(Error::InvalidInput("reduce needs \"system\" or \"theta\" and \"state\"".into())),
    };
    let t = job.t()?;
    let values: Result<Vec<Value>> = samples(job, t)
        .into_iter()
        .map(|z| {
            let (a, b) = ode.eval(z)?;
            Ok(json!({"z": cx(z), "p1": cx(a), "p2": cx(b)}))
        })
        .collect();
    Ok(json!({
        "p1": rational_json(&ode.p1),
        "p2": rational_json(&ode.p2),
        "singular_points": ode.singular_points().into_iter().map(cx).collect::<Vec<_>>(),
        "hamiltonian": ode.hamiltonian.map(cx),
        "values": values?,
    }))
}

fn restrict(job: &JobSpec, checks: &mut Checks) -> Result<Value> {
    let th = job.theta()?;
    let t = job.t()?;
    let line: Line =
        job.line.as_deref().ok_or_else(|| Error::InvalidInput("missing field \"line\"".into()))?.parse()?;
    let coord = job.coord.ok_or_else(|| Error::InvalidInput("missing field \"coord\"".into()))?.0;
    let lh = heun_on_line(&th, t, line, coord)?;
    checks.record("fuchs", lh.heun.fuchs_defect());
    match restriction_consistency(&th, t, line, coord) {
        Ok(r) => checks.record("consistency", r.max_residual),
        Err(Error::ConsistencyFailure(r)) => checks.record("consistency", r),
        Err(e) => return Err(e),
    }
    let realization = match realize_system_on_line(&th, t, job.k(), line, coord) {
        Ok(r) => {
            let h = heun_of_realization(&r, line)?;
            checks.record("realization_heun", h.distance(&lh.heun));
            json!({
                "system": system_json(&r.system),
                "gauge_exponent": r.gauge_exponent,
                "free_param": cx(r.free_param),
                "v": r.v.map(cx),
                "heun": heun_json(&h),
            })
        }
        Err(Error::NotRealizable(m)) => json!({"not_realizable": m}),
        Err(e) => return Err(e),
    };
    Ok(json!({
        "line": line.to_string(),
        "heun": heun_json(&lh.heun),
        "gauge_exponent": lh.gauge_exponent,
        "gauge_point": lh.gauge_point.map(cx),
        "degenerate_accessory": lh.degenerate_accessory,
        "realization": realization,
    }))
}

fn mcv(job: &JobSpec, checks: &mut Checks) -> Result<Value> {
    let (th, st) = (job.theta()?, job.state()?);
    let ext = ExtParams::new(th, st.finite_lambda()?, st.mu, st.t);
    let m2 = mc_kappa2_map(&ext)?;
    let mut out = json!({
        "kappa1": cx(th.kappa1()),
        "kappa2": cx(th.kappa2()),
        "theta_tilde": theta_json(&m2.theta),
        "lambda_tilde": cx(m2.lambda),
        "mu_tilde": cx(m2.mu),
    });
    if let Ok(m1) = mc_kappa1_map(&ext) {
        out["kappa1_image"] = ext_json(&m1);
    }
    if job.check_conjugate.unwrap_or(false) {
        let mc = middle_convolution_kappa2(&th, &st)?;
        let mut worst: f64 = 0.0;
        for z in samples(job, st.t) {
            let want = mc.eval(z);
            let shown = displayed_conjugate(&th, &st, z)?;
            worst = worst.max(max_abs(&(&shown - &want)) / (1.0 + max_abs(&want)));
        }
        checks.record("displayed_conjugate", worst);
        let target = build_system(&m2.theta, &SystemState::new(st.t, m2.lambda, m2.mu, st.k))?;
        let block = [(&mc.system.a0, &target.a0), (&mc.system.a1, &target.a1), (&mc.system.at, &target.at)]
            .iter()
            .map(|(a, b)| max_abs(&(*a - *b)) / (1.0 + max_abs(b)))
            .fold(0.0, f64::max);
        checks.record("block_vs_build", block);
        let det = mc.gauge.s.determinant();
        let closed = det_s_closed_form(&th, &st, mc.gauge.lambda_tilde)?;
        checks.record("det_s", (det - closed).norm() / (1.0 + closed.norm()));
        out["system"] = system_json(&mc.system);
        out["det_s"] = cx(det);
    }
    Ok(out)
}

fn verify_integral(job: &JobSpec, ov: &Overrides, checks: &mut Checks) -> Result<Value> {
    let id: TheoremId = ov
        .theorem
        .as_deref()
        .or(job.theorem.as_deref())
        .ok_or_else(|| Error::InvalidInput("missing theorem id (\"theorem\" or --theorem)".into()))?
        .parse()?;
    let seed = ov
        .seed
        .or(job.seed)
        .ok_or_else(|| Error::InvalidInput("verification jobs need a seed (\"seed\" or --seed)".into()))?;
    let mut opts = VerifyOptions { seed, ..VerifyOptions::default() };
    if let Some(d) = job.draws {
        opts.draws = d;
    }
    if let Some(s) = job.samples {
        opts.samples = s;
    }
    if let Some(ps) = &job.points {
        if ps.contains(&PointName::T) {
            return Err(Error::InvalidInput("end point \"t\" is drawn per case; use 0, 1 or inf".into()));
        }
        opts.points = ps.iter().map(|p| p.point(C64::new(0.0, 0.0))).collect();
    }
    opts.contour.z_radius = job.z_radius;
    let r = verify_seeded(id, &opts)?;
    checks.record("max", r.max_residual);
    Ok(report_json(&r, seed))
}

fn point_json(p: &Point) -> Value {
    match p {
        Point::Finite(x) => cx(*x),
        Point::Infinity => json!("inf"),
    }
}

pub fn report_json(r: &ResidualReport, seed: u64) -> Value {
    let cases: Vec<Value> = r
        .parameters
        .iter()
        .map(|c| {
            json!({
                "theta": theta_json(&c.theta),
                "state": serde_json::to_value(StateSpec::from_state(&c.state)).expect("state serializes"),
                "p": point_json(&c.p),
                "z": c.z.iter().map(|x| cx(*x)).collect::<Vec<_>>(),
                "residuals": c.residuals,
            })
        })
        .collect();
    json!({
        "theorem": r.theorem.name(),
        "seed": seed,
        "parameters": cases,
        "max_residual": r.max_residual,
        "samples": r.samples,
        "elapsed": r.elapsed.as_secs_f64(),
    })
}

fn set_distance(a: &[C64], b: &[C64]) -> f64 {
    let d = |x: &C64, y: &C64| (x - y).norm();
    (d(&a[0], &b[0]).max(d(&a[1], &b[1]))).min(d(&a[0], &b[1]).max(d(&a[1], &b[0])))
}

fn phase(x: C64) -> C64 {
    (C64::new(0.0, 2.0 * PI) * x).exp()
}

fn monodromy_cmd(job: &JobSpec, checks: &mut Checks) -> Result<Value> {
    let (th, st) = (job.theta()?, job.state()?);
    let sys = build_system(&th, &st)?.to_rational();
    let sing = [C64::new(0.0, 0.0), C64::new(1.0, 0.0), st.t];
    let step = StepOptions::default();
    let copts = ContourOptions { base: job.base.map_or(BasePoint::Auto, |b| BasePoint::At(b.0)), z_radius: None };
    let loops = job.loops.clone().unwrap_or(vec![PointName::Zero, PointName::One, PointName::T]);
    let centroid = sing.iter().sum::<C64>() / 3.0;
    let reach = sing.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max);
    let far = centroid + C64::new(0.0, 2.0 * reach + 1.0);
    let mut worst: f64 = 0.0;
    let mut out = vec![];
    for name in loops {
        let (m, expected, base) = match name.point(st.t) {
            Point::Finite(p) => {
                let k = Contour::simple_loop(&sing, p, &copts)?;
                let e = th.at(sing.iter().position(|q| *q == p).expect("loop about a pole"));
                (monodromy(&sys, &k, &step)?, [C64::new(1.0, 0.0), phase(e)], k.base())
            }
            Point::Infinity => {
                // positive loop about all finite poles
                let o = job.base.map_or(far, |b| b.0);
                let path = Path::big_loop(o, centroid, (1.5 * reach + 0.5).min(0.9 * (o - centroid).norm()));
                let t = integrate_system(&sys, &CVector::zeros(2), &path, &step)?.matrix;
                (t, [phase(-th.kappa1()), phase(-th.kappa2())], o)
            }
        };
        let ev = m.clone().eigenvalues().ok_or_else(|| Error::InvalidInput("no eigenvalues".into()))?;
        let ev = [ev[0], ev[1]];
        worst = worst.max(set_distance(&ev, &expected));
        out.push(json!({
            "around": name,
            "base": cx(base),
            "matrix": mat(&m),
            "eigenvalues": ev.iter().map(|x| cx(*x)).collect::<Vec<_>>(),
            "expected_eigenvalues": expected.iter().map(|x| cx(*x)).collect::<Vec<_>>(),
        }));
    }
    checks.record("exponents", worst);
    checks.record("loop_relation", loop_relation_defect(&sys, far, &step)?);
    Ok(json!({"loops": out}))
}
