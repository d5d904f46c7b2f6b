use crate::error::{Error, Result};
use crate::num_core::{c, cr, C64};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line {
        from: C64,
        to: C64,
    },
    /// Arc `center + radius e^{i(start + s sweep)}`, `s` in [0, 1].
    Arc {
        center: C64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Segment {
    pub fn point(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc { center, radius, start, sweep } => center + C64::from_polar(radius, start + s * sweep),
        }
    }

    /// `dw/ds`.
    pub fn tangent(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => C64::i() * C64::from_polar(radius, start + s * sweep) * sweep,
        }
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(1.0)
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, start, sweep } => {
                Segment::Arc { center, radius, start: start + sweep, sweep: -sweep }
            }
        }
    }

    /// Distance from `p` to the segment.
    pub fn distance_to(&self, p: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let l2 = d.norm_sqr();
                if l2 == 0.0 {
                    return (p - from).norm();
                }
                let s = ((p - from) * d.conj()).re / l2;
                (p - self.point(s.clamp(0.0, 1.0))).norm()
            }
            Segment::Arc { center, radius, start, sweep } => {
                let ang = (p - center).arg();
                // the nearest point is on the arc if the angle is covered
                let lo = start.min(start + sweep);
                let span = sweep.abs();
                let mut rel = (ang - lo).rem_euclid(2.0 * PI);
                if span >= 2.0 * PI {
                    rel = 0.0;
                }
                if rel <= span {
                    ((p - center).norm() - radius).abs()
                } else {
                    (p - self.start()).norm().min((p - self.end()).norm())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Path {
    pub segments: Vec<Segment>,
}

impl Path {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for w in segments.windows(2) {
            if (w[0].end() - w[1].start()).norm() > 1e-12 * (1.0 + w[0].end().norm()) {
                return Err(Error::InvalidInput("path segments are not contiguous".into()));
            }
        }
        Ok(Self { segments })
    }

    pub fn line(from: C64, to: C64) -> Self {
        Self { segments: vec![Segment::Line { from, to }] }
    }

    pub fn start(&self) -> C64 {
        self.segments.first().map_or(cr(0.0), |s| s.start())
    }

    pub fn end(&self) -> C64 {
        self.segments.last().map_or(cr(0.0), |s| s.end())
    }

    pub fn then(&self, other: &Path) -> Path {
        let mut s = self.segments.clone();
        s.extend_from_slice(&other.segments);
        Path { segments: s }
    }

    pub fn reversed(&self) -> Path {
        Path { segments: self.segments.iter().rev().map(|s| s.reversed()).collect() }
    }

    pub fn distance_to(&self, p: C64) -> f64 {
        self.segments.iter().map(|s| s.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Net winding number about `p`, by accumulated argument.
    pub fn winding(&self, p: C64) -> f64 {
        let mut total = 0.0;
        for seg in &self.segments {
            let n = 256;
            let mut prev = seg.start() - p;
            for j in 1..=n {
                let cur = seg.point(j as f64 / n as f64) - p;
                total += (cur / prev).arg();
                prev = cur;
            }
        }
        total / (2.0 * PI)
    }

    /// Loop from `o`: straight to the circle of radius `r` about `p`, once
    /// around counter-clockwise, and back.
    pub fn simple_loop(o: C64, p: C64, r: f64) -> Path {
        let dir = o - p;
        let ang = dir.arg();
        let touch = p + C64::from_polar(r, ang);
        Path {
            segments: vec![
                Segment::Line { from: o, to: touch },
                Segment::Arc { center: p, radius: r, start: ang, sweep: 2.0 * PI },
                Segment::Line { from: touch, to: o },
            ],
        }
    }

    /// Counter-clockwise circle of radius `r` about `center`, entered from `o`.
    pub fn big_loop(o: C64, center: C64, r: f64) -> Path {
        Self::simple_loop(o, center, r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(C64),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourKind {
    SimpleLoop(Point),
    Pochhammer { z: C64, p: Point },
    CpLoop { z: C64, p: Point },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasePoint {
    /// Pick automatically, starting from `1/3 + i/2`.
    Auto,
    At(C64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions {
    pub base: BasePoint,
    /// Radius of the circles about `w = z`; default `min(1e-2, dist/4)`.
    pub z_radius: Option<f64>,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { base: BasePoint::Auto, z_radius: None }
    }
}

/// Oriented contour with the winding number of its path about every tracked
/// branch point.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub kind: ContourKind,
    pub path: Path,
    pub branch_log: Vec<(C64, i64)>,
}

fn min_dist(p: C64, others: &[C64]) -> f64 {
    others.iter().map(|q| (p - q).norm()).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min)
}

fn base_candidates() -> Vec<C64> {
    let mut v = vec![c(1.0 / 3.0, 0.5)];
    for r in [0.5, 0.8, 1.3, 2.0, 3.0] {
        for j in 0..16 {
            v.push(c(0.5, 0.0) + C64::from_polar(r, 2.0 * PI * (j as f64 + 0.25) / 16.0));
        }
    }
    v
}

struct Planner {
    singular: Vec<C64>,
    tracked: Vec<C64>,
}

impl Planner {
    /// Circle radius about `p`, a quarter of the distance to every other tracked point.
    fn radius(&self, p: C64) -> f64 {
        0.25 * min_dist(p, &self.tracked)
    }

    /// Loops from `o` to the given centers stay clear of every other tracked point.
    fn clear(&self, o: C64, centers: &[(C64, f64)]) -> bool {
        for q in &self.tracked {
            if (o - q).norm() < 0.05 * (1.0 + q.norm()) {
                return false;
            }
        }
        for (p, _) in centers {
            let seg = Segment::Line { from: o, to: *p };
            for q in &self.tracked {
                if (q - p).norm() == 0.0 {
                    continue;
                }
                let rq = self.radius(*q);
                if seg.distance_to(*q) < 1.5 * rq.max(1e-3) {
                    return false;
                }
            }
        }
        true
    }

    fn base(&self, opt: &ContourOptions, centers: &[(C64, f64)]) -> Result<C64> {
        match opt.base {
            BasePoint::At(o) => Ok(o),
            BasePoint::Auto => base_candidates()
                .into_iter()
                .find(|o| self.clear(*o, centers))
                .ok_or_else(|| Error::PathTooClose(centers.first().map_or(cr(0.0), |x| x.0))),
        }
    }
}

fn winding_table(path: &Path, pts: &[C64]) -> Vec<(C64, i64)> {
    pts.iter().map(|p| (*p, path.winding(*p).round() as i64)).collect()
}

impl Contour {
    /// `gamma_p` about a finite singular point, based at `o`.
    pub fn simple_loop(singular: &[C64], p: C64, opt: &ContourOptions) -> Result<Contour> {
        let pl = Planner { singular: singular.to_vec(), tracked: singular.to_vec() };
        let r = pl.radius(p);
        let o = pl.base(opt, &[(p, r)])?;
        let path = Path::simple_loop(o, p, r);
        let branch_log = winding_table(&path, &pl.singular);
        Ok(Contour { kind: ContourKind::SimpleLoop(Point::Finite(p)), path, branch_log })
    }

    /// Loop around the point at infinity: the reversed composite
    /// `gamma_{p_n}^{-1} ... gamma_{p_1}^{-1}` of the finite loops.
    fn infinity_loop(pl: &Planner, o: C64) -> Path {
        let mut path = Path::default();
        for p in pl.singular.iter().rev() {
            path = path.then(&Path::simple_loop(o, *p, pl.radius(*p)).reversed());
        }
        path
    }

    /// Pochhammer commutator `gamma_z gamma_p gamma_z^{-1} gamma_p^{-1}`.
    pub fn pochhammer(singular: &[C64], z: C64, p: Point, opt: &ContourOptions) -> Result<Contour> {
        let mut tracked = singular.to_vec();
        tracked.push(z);
        let pl = Planner { singular: singular.to_vec(), tracked };
        let rz_default = 0.25 * min_dist(z, singular);
        let rz = opt.z_radius.unwrap_or(rz_default.min(1e-2)).min(rz_default);
        let mut centers = vec![(z, rz)];
        match p {
            Point::Finite(pp) => centers.push((pp, pl.radius(pp))),
            Point::Infinity => centers.extend(singular.iter().map(|q| (*q, pl.radius(*q)))),
        }
        let o = pl.base(opt, &centers)?;
        let gz = Path::simple_loop(o, z, rz);
        let gp = match p {
            Point::Finite(pp) => Path::simple_loop(o, pp, pl.radius(pp)),
            Point::Infinity => Self::infinity_loop(&pl, o),
        };
        let path = gz.then(&gp).then(&gz.reversed()).then(&gp.reversed());
        let branch_log = winding_table(&path, &pl.tracked);
        Ok(Contour { kind: ContourKind::Pochhammer { z, p }, path, branch_log })
    }

    /// Loop starting and ending at `w = z`, encircling `p` once.
    pub fn cp_loop(singular: &[C64], z: C64, p: Point, _opt: &ContourOptions) -> Result<Contour> {
        let pl = Planner { singular: singular.to_vec(), tracked: singular.to_vec() };
        let path = match p {
            Point::Finite(pp) => {
                for q in singular {
                    if (q - pp).norm() > 0.0
                        && (Segment::Line { from: z, to: pp }).distance_to(*q) < 1.5 * pl.radius(*q)
                    {
                        return Err(Error::PathTooClose(*q));
                    }
                }
                Path::simple_loop(z, pp, pl.radius(pp))
            }
            Point::Infinity => Self::infinity_loop(&pl, z),
        };
        let branch_log = winding_table(&path, &pl.singular);
        Ok(Contour { kind: ContourKind::CpLoop { z, p }, path, branch_log })
    }

    pub fn base(&self) -> C64 {
        self.path.start()
    }
}
