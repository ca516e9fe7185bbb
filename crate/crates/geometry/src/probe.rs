//! Probe functions `φ(θ) = π₂(Φ^{M+K}(θ − Mω, ∞))` and the shape of their
//! small-value set `{θ ∈ I : |φ(θ)| ≤ 2λ^{−3/4}}`.
//!
//! `φ` is followed in homogeneous coordinates `(u0, u1)` that are only ever
//! rescaled by positive powers of two, so the sign of
//! `q = u1² − ε²u0²` is a continuous function of `θ` even across the poles of
//! `φ`, and `{q ≤ 0}` is exactly `{|φ| ≤ ε}`.
//!
//! Next to a pole the band `|φ| ≤ ε` is usually far narrower than the
//! spacing of floating-point `θ`. There `φ` is taken in the shadowing form
//! `φ = S − H/G`: `S` is the `(K − 1)`-step slope from `(θ + ω, ∞)`, `H > 0`
//! the inverse squared slope product along that orbit and `G = r − w` the
//! offset of the slope `r` reached over `θ + ω`. Across a cell of width `refine_tol` holding a
//! zero of `G`, `S` and `H` are constant to working precision and `G` is
//! linear, so the band is solved for in closed form in `u = H/G`.

use std::fmt::Write as _;

use qpc_core::{wrap, Arc, CircleSet, CocycleParams, ProjPoint};
use qpc_dynamics::shadow_decompose;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Refinement levels below the initial grid spacing in the band `|φ| ≤ 2ε`.
const BAND_LEVELS: u32 = 6;
/// Points used to resample a wide arc of the small-value set.
const ARC_SAMPLES: usize = 33;
/// A single arc on which `|φ|` dips below `ε` by at most this fraction of
/// `ε` is a tangency, i.e. a point up to rounding.
const POINT_DEPTH: f64 = 1e-8;
/// Cap on refinement evaluations per arc of `I`, as a multiple of `grid`.
const EVAL_BUDGET: usize = 256;
/// Width in `θ` to which a cell holding a pole of the model is refined. `G`
/// is linear to about `|G″/G′|·10⁻⁹` at this width, while the slope `G′`
/// taken across it carries a rounding error near `10⁻⁷` relative.
const POLE_CELL: f64 = 1e-9;

/// Shape of the small-value set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    /// No point of `I` has `|φ| ≤ ε`.
    Empty,
    /// A tangency: one arc on which `|φ|` only touches `ε`.
    Point,
    /// One arc.
    SingleInterval,
    /// Two arcs.
    TwoIntervals,
}

/// Which continuation the shape allows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Two monotone arcs of opposite slope, each mapped onto `[−ε, ε]`.
    BranchI,
    /// One arc whose endpoint values agree (`φ(a) = φ(b) = ±ε`).
    BranchII,
    /// Empty set or a single point: nothing left to follow.
    Stop,
}

/// Direction of a single-arc probe: `Upward` when both endpoint values are
/// `+ε` (the graph dips into the band from above), `Downward` for `−ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bend {
    /// Endpoint values `+ε`.
    Upward,
    /// Endpoint values `−ε`.
    Downward,
}

/// Measured derivative data on the arcs of the small-value set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivStats {
    /// `min |φ′|` over all arcs, `∞` when there are none.
    pub min_abs_deriv: f64,
    /// `max |φ′|` over all arcs.
    pub max_abs_deriv: f64,
    /// `max |φ″|` over arcs wide enough to resample.
    pub max_abs_second: f64,
    /// Per arc: `+1` increasing, `−1` decreasing, `0` not monotone.
    pub slope_signs: Vec<i8>,
    /// Per arc: `(φ(a), φ(b))` at the refined endpoints.
    pub endpoint_values: Vec<(f64, f64)>,
    /// Per arc: smallest `|φ|` seen.
    pub min_abs_value: Vec<f64>,
    /// Per arc: whether it was solved from the pole model.
    pub pole_resolved: Vec<bool>,
}

/// The local form `φ = S − H/G` near a pole, with `G = num/den`. `G` is
/// `r − w` for the slope `r = num/den + w` reached at the split step, whose
/// homogeneous denominator `den` is continuous in `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleModel {
    /// The split step `j`: `G` is formed from the slope after `j` of the
    /// `M + K` steps.
    pub split: usize,
    /// `S`, the slope reached by the reference orbit started at `∞` over
    /// the base point after the split.
    pub s: f64,
    /// `log H`.
    pub log_h: f64,
    /// Numerator of `G`; its zeros are the poles of `φ`.
    pub num: f64,
    /// Denominator of `G`.
    pub den: f64,
}

impl PoleModel {
    fn g(&self) -> f64 {
        self.num / self.den
    }
}

/// One evaluation of a probe function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    /// `φ(θ)`.
    pub phi: ProjPoint,
    /// Pole models at increasing split steps.
    pub models: Vec<PoleModel>,
}

impl From<ProjPoint> for ProbeSample {
    fn from(phi: ProjPoint) -> Self {
        Self { phi, models: Vec::new() }
    }
}

/// The sampled probe and its small-value set, before classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeScan {
    /// `(θ, φ(θ))` in order along each arc of `I`, including refinements.
    pub samples: Vec<(f64, f64)>,
    /// The arcs of `{θ ∈ I : |φ(θ)| ≤ ε}` in order and unmerged: the two
    /// arcs beside a pole may be closer together than float spacing.
    pub arcs: Vec<Arc>,
    /// The same set as a [`CircleSet`].
    pub j_next: CircleSet,
    /// Derivative data on `arcs`.
    pub deriv_stats: DerivStats,
    /// Threshold `ε`.
    pub eps: f64,
    /// Endpoint tolerance used for the small-value set.
    pub refine_tol: f64,
    /// Reasons the scan could not be resolved (boundary contact, an
    /// exhausted refinement budget), in the order found.
    pub issues: Vec<String>,
}

/// A classified probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    /// `(θ, φ(θ))` in order along each arc of `I`, including refinements.
    pub samples: Vec<(f64, f64)>,
    /// The arcs of the small-value set, unmerged.
    pub arcs: Vec<Arc>,
    /// `{θ ∈ I : |φ(θ)| ≤ ε}` up to `refine_tol`.
    pub j_next: CircleSet,
    /// Shape of the small-value set.
    pub shape: Shape,
    /// Continuation allowed by the shape.
    pub branch: Branch,
    /// Bend of a [`Branch::BranchII`] probe.
    pub bend: Option<Bend>,
    /// Derivative data on `arcs`.
    pub deriv_stats: DerivStats,
    /// Threshold `ε`.
    pub eps: f64,
}

impl ProbeResult {
    /// CSV with header `theta,phi,in_J_next`.
    #[must_use]
    pub fn to_csv(&self) -> String {
        samples_csv(&self.samples, &self.j_next)
    }
}

impl ProbeScan {
    /// CSV with header `theta,phi,in_J_next`.
    #[must_use]
    pub fn to_csv(&self) -> String {
        samples_csv(&self.samples, &self.j_next)
    }

    /// Classify the small-value set.
    ///
    /// * no arcs: [`Shape::Empty`], [`Branch::Stop`];
    /// * one arc with endpoint values of equal sign on which `|φ|` stays
    ///   within a relative `10⁻⁸` of `ε`, or no longer than `4·refine_tol`:
    ///   [`Shape::Point`], [`Branch::Stop`];
    /// * any other arc with endpoint values of equal sign:
    ///   [`Branch::BranchII`];
    /// * two monotone arcs of opposite slope, each with endpoint values of
    ///   opposite sign: [`Branch::BranchI`].
    ///
    /// Anything else, and any recorded scan issue, is
    /// [`GeometryError::UnresolvedShape`].
    pub fn classify(self) -> Result<ProbeResult, GeometryError> {
        let n_arcs = self.arcs.len();
        let unresolved = |reason: String| GeometryError::UnresolvedShape { reason, n_arcs };
        if let Some(issue) = self.issues.first() {
            return Err(unresolved(issue.clone()));
        }
        let stats = &self.deriv_stats;
        let sign = |x: f64| if x >= 0.0 { 1 } else { -1 };
        let (shape, branch, bend) = match n_arcs {
            0 => (Shape::Empty, Branch::Stop, None),
            1 => {
                let (a, b) = stats.endpoint_values[0];
                if sign(a) != sign(b) {
                    return Err(unresolved(format!(
                        "single arc crosses the band monotonically (endpoint values {a:e}, {b:e})"
                    )));
                }
                let tangency = self.eps - stats.min_abs_value[0] <= POINT_DEPTH * self.eps;
                if tangency || self.arcs[0].len <= 4.0 * self.refine_tol {
                    (Shape::Point, Branch::Stop, None)
                } else {
                    let bend = if a > 0.0 { Bend::Upward } else { Bend::Downward };
                    (Shape::SingleInterval, Branch::BranchII, Some(bend))
                }
            }
            2 => {
                for (i, &(a, b)) in stats.endpoint_values.iter().enumerate() {
                    if sign(a) == sign(b) {
                        return Err(unresolved(format!(
                            "arc {i} of two does not cross the band (endpoint values {a:e}, {b:e})"
                        )));
                    }
                }
                let s = &stats.slope_signs;
                if s[0] == 0 || s[1] == 0 || s[0] == s[1] {
                    return Err(unresolved(format!("slope signs {s:?} are not opposite and monotone")));
                }
                (Shape::TwoIntervals, Branch::BranchI, None)
            }
            _ => return Err(unresolved(format!("{n_arcs} arcs where at most two are allowed"))),
        };
        Ok(ProbeResult {
            samples: self.samples,
            arcs: self.arcs,
            j_next: self.j_next,
            shape,
            branch,
            bend,
            deriv_stats: self.deriv_stats,
            eps: self.eps,
        })
    }
}

fn samples_csv(samples: &[(f64, f64)], j: &CircleSet) -> String {
    let mut out = String::from("theta,phi,in_J_next\n");
    for &(t, v) in samples {
        let _ = writeln!(out, "{t},{v},{}", u8::from(j.contains(t)));
    }
    out
}

/// The slope over `θ` after `m` steps from `(θ − mω, ∞)`, and `θ` as
/// reached by the rotation.
fn incoming(params: &CocycleParams, theta: f64, m: usize) -> (ProjPoint, f64) {
    let mut t = wrap(theta - (m as f64 * params.omega).rem_euclid(1.0));
    let mut p = ProjPoint::INFINITY;
    for _ in 0..m {
        p = p.step(params.v(t));
        t = wrap(t + params.omega);
    }
    (p, t)
}

fn advance(params: &CocycleParams, mut p: ProjPoint, mut t: f64, k: usize) -> ProjPoint {
    for _ in 0..k {
        p = p.step(params.v(t));
        t = wrap(t + params.omega);
    }
    p
}

/// `π₂(Φ^{M+K}(θ − Mω, ∞))` as a projective point.
#[must_use]
pub fn phi(params: &CocycleParams, theta: f64, m: usize, k: usize) -> ProjPoint {
    let (s0, t) = incoming(params, theta, m);
    advance(params, s0, t, k)
}

/// `φ(θ)` together with its pole models. Split `j` writes
/// `φ = S − H/(r_j − w)`, where `r_j` is the slope after `j` of the `M + K`
/// steps and `S`, `H`, `w` come from the reference orbit of `(θ_j, ∞)` over
/// the remaining steps. Splits are taken at every step of the last `K` but
/// the final one, and at the earlier steps where `|r_j| < 1`, which are the
/// only places where the following slope can pass through `∞`. A split is
/// left out when its reference orbit passes too close to zero at its last
/// step or when `S` is infinite.
#[must_use]
pub fn probe_sample(params: &CocycleParams, theta: f64, m: usize, k: usize) -> ProbeSample {
    let n = m + k;
    let mut t = wrap(theta - (m as f64 * params.omega).rem_euclid(1.0));
    let mut r = ProjPoint::INFINITY;
    let mut models = Vec::new();
    for j in 1..=n {
        r = r.step(params.v(t));
        t = wrap(t + params.omega);
        if j == n || (j <= m && r.abs() >= 1.0) {
            continue;
        }
        let split = shadow_decompose(params, t, n - j - 1).ok().and_then(|d| {
            let s = d.r_next.to_f64();
            (s.is_finite() && d.w.is_finite()).then_some(PoleModel {
                split: j,
                s,
                log_h: d.log_h,
                num: r.u1() - d.w * r.u0(),
                den: r.u0(),
            })
        });
        models.extend(split);
    }
    ProbeSample { phi: r, models }
}

/// Probe of the cocycle over `I` with `ε = 2λ^{−3/4}`.
pub fn probe(
    params: &CocycleParams,
    interval: &CircleSet,
    m: usize,
    k: usize,
    grid: usize,
    refine_tol: f64,
) -> Result<ProbeResult, GeometryError> {
    scan(params, interval, m, k, grid, refine_tol)?.classify()
}

/// The unclassified scan behind [`probe`].
pub fn scan(
    params: &CocycleParams,
    interval: &CircleSet,
    m: usize,
    k: usize,
    grid: usize,
    refine_tol: f64,
) -> Result<ProbeScan, GeometryError> {
    if m == 0 || k == 0 {
        return Err(GeometryError::InvalidParameter(format!("M = {m} and K = {k} must be >= 1")));
    }
    let eps = 2.0 * params.lp(-0.75);
    scan_fn(|t| probe_sample(params, t, m, k), interval, eps, grid, refine_tol)
}

/// Classify `{θ ∈ I : |f(θ)| ≤ ε}` for an arbitrary probe function.
pub fn probe_fn<F, P>(f: F, interval: &CircleSet, eps: f64, grid: usize, refine_tol: f64) -> Result<ProbeResult, GeometryError>
where
    F: Fn(f64) -> P + Sync,
    P: Into<ProbeSample>,
{
    scan_fn(f, interval, eps, grid, refine_tol)?.classify()
}

/// One evaluated point: position `s ∈ [0, 1]` along the arc and the sample.
#[derive(Clone)]
struct Pt {
    s: f64,
    p: ProjPoint,
    models: Vec<PoleModel>,
}

impl Pt {
    fn inside(&self, eps: f64) -> bool {
        let (u0, u1) = (self.p.u0(), self.p.u1());
        u1 * u1 - eps * eps * u0 * u0 <= 0.0
    }

    fn value(&self) -> f64 {
        self.p.to_f64()
    }
}

/// Whether `φ` changes sign between `a` and `b` without passing through a
/// pole, so that a zero lies between them.
fn zero_between(a: &Pt, b: &Pt) -> bool {
    let sa = a.p.u0() * a.p.u1();
    let sb = b.p.u0() * b.p.u1();
    (sa > 0.0) != (sb > 0.0) && a.p.u0() * b.p.u0() > 0.0
}

/// The pole model for the cell from `a` to `b`, if it places a zero of `G`
/// there. The latest split whose slope stays finite across the cell is
/// used: every sub-float event of the orbit before it is then absorbed in a
/// smooth slope, and every event after it in the model's pole.
fn pole_between(a: &Pt, b: &Pt) -> Option<(PoleModel, PoleModel)> {
    let (ma, mb) = a.models.iter().rev().find_map(|ma| {
        let mb = b.models.iter().find(|mb| mb.split == ma.split)?;
        (ma.den * mb.den > 0.0).then_some((*ma, *mb))
    })?;
    ((ma.num > 0.0) != (mb.num > 0.0)).then_some((ma, mb))
}

/// Whether both homogeneous coordinates change sign between `a` and `b`
/// with no pole of the model to account for it: a zero and a pole of `φ`
/// lie between them.
fn turn_between(a: &Pt, b: &Pt) -> bool {
    a.p.u0() * b.p.u0() < 0.0 && a.p.u1() * b.p.u1() < 0.0 && pole_between(a, b).is_none()
}

/// The scan behind [`probe_fn`].
pub fn scan_fn<F, P>(f: F, interval: &CircleSet, eps: f64, grid: usize, refine_tol: f64) -> Result<ProbeScan, GeometryError>
where
    F: Fn(f64) -> P + Sync,
    P: Into<ProbeSample>,
{
    if grid < 3 {
        return Err(GeometryError::InvalidParameter(format!("grid = {grid} < 3")));
    }
    if !(eps > 0.0 && refine_tol > 0.0) {
        return Err(GeometryError::InvalidParameter("eps and refine_tol must be positive".into()));
    }
    let mut samples = Vec::new();
    let mut runs: Vec<Run> = Vec::new();
    let mut issues = Vec::new();
    for arc in interval.arcs() {
        let at = |s: f64| {
            let x: ProbeSample = f(arc.at(s)).into();
            Pt {
                s,
                p: x.phi,
                models: x.models,
            }
        };
        let initial: Vec<Pt> = (0..grid)
            .into_par_iter()
            .map(|i| at(i as f64 / (grid - 1) as f64))
            .collect();
        let tol_s = refine_tol / arc.len.max(f64::MIN_POSITIVE);
        let band_s = 1.0 / ((grid - 1) as f64 * f64::from(1u32 << BAND_LEVELS));
        let pole_s = (POLE_CELL / arc.len.max(f64::MIN_POSITIVE)).max(tol_s);
        let widths = Widths {
            band: band_s.max(tol_s),
            zero: tol_s,
            pole: pole_s,
        };
        let pts = refine(&at, initial, eps, widths, grid * EVAL_BUDGET, &mut issues);

        if pts[0].inside(eps) || pts[pts.len() - 1].inside(eps) {
            issues.push(format!("small-value set reaches the boundary of the arc at {:.6}", arc.lo));
        }
        let mut tracer = Tracer {
            arc: *arc,
            eps,
            open: None,
            done: Vec::new(),
            issues: Vec::new(),
        };
        if pts[0].inside(eps) {
            tracer.open_at(arc.lo, pts[0].value(), false);
        }
        for w in pts.windows(2) {
            if let Some(models) = pole_between(&w[0], &w[1]) {
                tracer.pole_cell(&w[0], &w[1], models);
            } else {
                tracer.direct_cell(&at, &w[0], &w[1], tol_s);
            }
        }
        tracer.close(pts[pts.len() - 1].value());
        runs.extend(tracer.done);
        issues.extend(tracer.issues);
        samples.extend(pts.iter().map(|p| (arc.at(p.s), p.value())));
    }
    let deriv_stats = run_stats(&f, &runs);
    let arcs: Vec<Arc> = runs.iter().map(|r| Arc::new(r.lo, r.len)).collect();
    let j_next = CircleSet::from_arcs(arcs.iter().copied());
    Ok(ProbeScan {
        samples,
        arcs,
        j_next,
        deriv_stats,
        eps,
        refine_tol,
        issues,
    })
}

/// Target cell widths, as fractions of the arc of `I`.
#[derive(Clone, Copy)]
struct Widths {
    /// Cells touching `|φ| ≤ 2ε` but not wholly inside the band.
    band: f64,
    /// Cells holding a zero of `φ` with both ends outside the band.
    zero: f64,
    /// Cells holding a pole of the model.
    pole: f64,
}

/// Midpoint refinement, level by level, of every cell that is wider than
/// its target in [`Widths`]. A sign change of `φ` left in a cell wider than
/// `refine_tol` is recorded as an issue.
fn refine<G>(at: &G, mut pts: Vec<Pt>, eps: f64, widths: Widths, budget: usize, issues: &mut Vec<String>) -> Vec<Pt>
where
    G: Fn(f64) -> Pt + Sync,
{
    let wide = 2.0 * eps;
    let mut spent = 0;
    loop {
        let mids: Vec<f64> = pts
            .windows(2)
            .filter_map(|w| {
                let (a, b) = (&w[0], &w[1]);
                let h = b.s - a.s;
                let near = (a.p.abs() <= wide || b.p.abs() <= wide) && !(a.inside(eps) && b.inside(eps));
                let hidden = (zero_between(a, b) || turn_between(a, b)) && !a.inside(eps) && !b.inside(eps);
                let pole = pole_between(a, b).is_some();
                ((near && h > widths.band) || (hidden && h > widths.zero) || (pole && h > widths.pole))
                    .then_some(0.5 * (a.s + b.s))
            })
            .collect();
        if mids.is_empty() {
            break;
        }
        if spent + mids.len() > budget {
            issues.push(format!("refinement budget of {budget} evaluations exhausted"));
            break;
        }
        spent += mids.len();
        let new: Vec<Pt> = mids.par_iter().map(|&s| at(s)).collect();
        pts.extend(new);
        pts.sort_by(|a, b| a.s.total_cmp(&b.s));
    }
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if zero_between(a, b) && !a.inside(eps) && !b.inside(eps) && b.s - a.s > widths.zero {
            issues.push(format!(
                "zero crossing between samples {:e} apart is not separated from the band",
                (b.s - a.s)
            ));
        }
        if turn_between(a, b) && !a.inside(eps) && !b.inside(eps) {
            issues.push(format!(
                "a zero and a pole of the probe lie between samples {:e} apart",
                (b.s - a.s)
            ));
        }
    }
    pts
}

/// Boundary of `{|φ| ≤ ε}` between `out` (outside) and `inn` (inside).
fn bisect_boundary<G: Fn(f64) -> Pt>(at: &G, mut out: Pt, mut inn: Pt, eps: f64, tol_s: f64) -> Pt {
    for _ in 0..200 {
        if (inn.s - out.s).abs() <= tol_s {
            break;
        }
        let mid = at(0.5 * (out.s + inn.s));
        if mid.inside(eps) {
            inn = mid;
        } else {
            out = mid;
        }
    }
    inn
}

/// An arc of the small-value set as it is traced.
#[derive(Clone, Debug)]
struct Run {
    lo: f64,
    len: f64,
    start_val: f64,
    end_val: f64,
    up: bool,
    down: bool,
    min_d: f64,
    max_d: f64,
    min_abs: f64,
    pole: bool,
}

impl Run {
    /// Extend by a monotone piece of length `len` from `v0` to `v1`.
    fn piece(&mut self, len: f64, v0: f64, v1: f64) {
        self.len += len;
        self.end_val = v1;
        if v1 > v0 {
            self.up = true;
        } else if v1 < v0 {
            self.down = true;
        }
        if len > 0.0 {
            let d = (v1 - v0).abs() / len;
            self.min_d = self.min_d.min(d);
            self.max_d = self.max_d.max(d);
        }
        if (v0 > 0.0) != (v1 > 0.0) {
            self.min_abs = 0.0;
        }
        self.min_abs = self.min_abs.min(v0.abs()).min(v1.abs());
    }

    /// Record the exact `|φ′|` range of a piece.
    fn derivs(&mut self, lo: f64, hi: f64) {
        self.min_d = self.min_d.min(lo);
        self.max_d = self.max_d.max(hi);
    }
}

/// Left-to-right tracer of the runs inside one arc of `I`.
struct Tracer {
    arc: Arc,
    eps: f64,
    open: Option<Run>,
    done: Vec<Run>,
    issues: Vec<String>,
}

impl Tracer {
    fn open_at(&mut self, theta: f64, val: f64, pole: bool) {
        self.open = Some(Run {
            lo: theta,
            len: 0.0,
            start_val: val,
            end_val: val,
            up: false,
            down: false,
            min_d: f64::INFINITY,
            max_d: 0.0,
            min_abs: val.abs(),
            pole,
        });
    }

    fn run(&mut self) -> &mut Run {
        self.open.as_mut().expect("an open run")
    }

    fn close(&mut self, val: f64) {
        if let Some(mut r) = self.open.take() {
            if r.len == 0.0 {
                r.end_val = val;
                r.min_abs = r.min_abs.min(val.abs());
            }
            self.done.push(r);
        }
    }

    fn direct_cell<G: Fn(f64) -> Pt>(&mut self, at: &G, a: &Pt, b: &Pt, tol_s: f64) {
        let eps = self.eps;
        let l = self.arc.len;
        match (a.inside(eps), b.inside(eps)) {
            (true, true) => {
                if self.open.is_none() {
                    self.open_at(self.arc.at(a.s), a.value(), false);
                }
                self.run().piece((b.s - a.s) * l, a.value(), b.value());
            }
            (false, true) => {
                self.close(a.value());
                let x = bisect_boundary(at, a.clone(), b.clone(), eps, tol_s);
                self.open_at(self.arc.at(x.s), x.value(), false);
                self.run().piece((b.s - x.s) * l, x.value(), b.value());
            }
            (true, false) => {
                let x = bisect_boundary(at, b.clone(), a.clone(), eps, tol_s);
                if self.open.is_none() {
                    self.open_at(self.arc.at(a.s), a.value(), false);
                }
                self.run().piece((x.s - a.s) * l, a.value(), x.value());
                self.close(x.value());
            }
            (false, false) if zero_between(a, b) => {
                self.close(a.value());
                self.linear_crossing(a, b);
            }
            (false, false) => self.close(a.value()),
        }
    }

    /// A cell of width at most `refine_tol` across which `φ` changes sign
    /// with both ends outside the band: the band is narrower than the cell
    /// and is placed by linear interpolation.
    fn linear_crossing(&mut self, a: &Pt, b: &Pt) {
        let (va, vb) = (a.value(), b.value());
        let slope = (vb - va) / ((b.s - a.s) * self.arc.len);
        let v0 = self.eps.copysign(va);
        self.open_at(self.arc.at(a.s) + (v0 - va) / slope, v0, false);
        let len = 2.0 * self.eps / slope.abs();
        let r = self.run();
        r.piece(len, v0, -v0);
        r.derivs(slope.abs(), slope.abs());
        self.close(-v0);
    }

    /// A cell holding a zero of `G`. Along the cell `u = H/G` runs
    /// monotonically from `u_a` out to `sgn(G_a)·∞`, then in from
    /// `sgn(G_b)·∞` to `u_b`, and `φ = S − u` lies in the band exactly when
    /// `u ∈ [S − ε, S + ε]`. Distances follow from `G` being linear:
    /// `|Δθ| = H·|1/u₁ − 1/u₂|/|G′|`, and `|φ′| = u²|G′|/H`.
    fn pole_cell(&mut self, a: &Pt, b: &Pt, (ma, mb): (PoleModel, PoleModel)) {
        let (ga, gb) = (ma.g(), mb.g());
        let theta_a = self.arc.at(a.s);
        let dg = (gb - ga) / ((b.s - a.s) * self.arc.len);
        if !(dg.is_finite() && dg != 0.0 && ga.is_finite() && gb.is_finite()) {
            self.direct_fallback(a, b);
            return;
        }
        let s = 0.5 * (ma.s + mb.s);
        let log_h = 0.5 * (ma.log_h + mb.log_h);
        let (lo_u, hi_u) = (s - self.eps, s + self.eps);
        let ln_dg = dg.abs().ln();
        let eps = self.eps;
        let val = |u: f64| {
            if u == lo_u {
                eps
            } else if u == hi_u {
                -eps
            } else {
                s - u
            }
        };
        let u_of = |g: f64| g.signum() * (log_h - g.abs().ln()).exp();
        let dist = |u1: f64, u2: f64| (log_h + (1.0 / u1 - 1.0 / u2).abs().ln() - ln_dg).exp();
        let theta_of = |u: f64| theta_a + (u.signum() * (log_h - u.abs().ln()).exp() - ga) / dg;
        let deriv = |u: f64| (2.0 * u.abs().ln() + ln_dg - log_h).exp();
        let derivs = |u1: f64, u2: f64| (deriv(u1.abs().min(u2.abs())), deriv(u1.abs().max(u2.abs())));

        // The model crosses zero where u = S; the direct ends must agree on
        // the parity of the zero count.
        let (ua, ub) = (u_of(ga), u_of(gb));
        let on_ray = |u0: f64| u0.signum() == s.signum() && u0.abs() <= s.abs();
        let zeros = usize::from(on_ray(ua)) + usize::from(on_ray(ub));
        if (zeros % 2 == 1) != (a.p.u1() * b.p.u1() < 0.0) {
            self.issues.push(format!(
                "pole model predicts {zeros} zeros where direct evaluation disagrees near {theta_a:.12}"
            ));
        }

        // Outward from a to the pole.
        match (self.open.is_some(), band_on_ray(ua, lo_u, hi_u)) {
            (was_open, Some((e, x))) => {
                if !was_open {
                    self.open_at(theta_of(e), val(e), true);
                }
                let (dl, dh) = derivs(e, x);
                let r = self.run();
                r.pole = true;
                r.piece(dist(e, x), val(e), val(x));
                r.derivs(dl, dh);
                self.close(val(x));
            }
            (true, None) => self.close(a.value()),
            (false, None) => {}
        }

        // Inward from the pole to b: the ray is traversed from its far end.
        if let Some((e, x)) = band_on_ray(ub, lo_u, hi_u) {
            self.open_at(theta_of(x), val(x), true);
            let (dl, dh) = derivs(e, x);
            let r = self.run();
            r.piece(dist(x, e), val(x), val(e));
            r.derivs(dl, dh);
            if e != ub {
                self.close(val(e));
            }
        }
        match (self.open.is_some(), b.inside(self.eps)) {
            (true, false) => self.close(b.value()),
            (false, true) => self.open_at(self.arc.at(b.s), b.value(), false),
            _ => {}
        }
    }

    /// A pole cell whose model is unusable, traced from its ends only.
    fn direct_fallback(&mut self, a: &Pt, b: &Pt) {
        let eps = self.eps;
        match (a.inside(eps), b.inside(eps)) {
            (true, true) => {
                let l = self.arc.len;
                if self.open.is_none() {
                    self.open_at(self.arc.at(a.s), a.value(), false);
                }
                self.run().piece((b.s - a.s) * l, a.value(), b.value());
            }
            (false, true) => self.open_at(self.arc.at(b.s), b.value(), false),
            (true, false) => self.close(a.value()),
            (false, false) => {}
        }
    }
}

/// The part of the ray from `u0` to `sgn(u0)·∞` inside `[lo, hi]`, as
/// `(point nearest u0, point farthest from u0)`.
fn band_on_ray(u0: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if u0 > 0.0 {
        let (a, b) = (u0.max(lo), hi);
        (a <= b).then_some((a, b))
    } else {
        let (a, b) = (lo, u0.min(hi));
        (a <= b).then_some((b, a))
    }
}

/// Per-arc statistics. Arcs traced only through direct cells and wide
/// enough to resample are resampled for slope signs and second differences.
fn run_stats<F, P>(f: &F, runs: &[Run]) -> DerivStats
where
    F: Fn(f64) -> P + Sync,
    P: Into<ProbeSample>,
{
    let mut st = DerivStats {
        min_abs_deriv: f64::INFINITY,
        ..DerivStats::default()
    };
    for r in runs {
        let mut sign = match (r.up, r.down) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        };
        let (mut min_d, mut max_d, mut min_abs) = (r.min_d, r.max_d, r.min_abs);
        let spacing = f64::EPSILON * r.lo.abs().max(1.0);
        if !r.pole && r.len > 1e3 * spacing * ARC_SAMPLES as f64 {
            let arc = Arc::new(r.lo, r.len);
            let vals: Vec<f64> = (0..ARC_SAMPLES)
                .into_par_iter()
                .map(|i| {
                    let x: ProbeSample = f(arc.at(i as f64 / (ARC_SAMPLES - 1) as f64)).into();
                    x.phi.to_f64()
                })
                .collect();
            let h = r.len / (ARC_SAMPLES - 1) as f64;
            let diffs: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
            sign = if diffs.iter().all(|&d| d > 0.0) {
                1
            } else if diffs.iter().all(|&d| d < 0.0) {
                -1
            } else {
                0
            };
            for d in &diffs {
                min_d = min_d.min((d / h).abs());
                max_d = max_d.max((d / h).abs());
            }
            for w in diffs.windows(2) {
                st.max_abs_second = st.max_abs_second.max(((w[1] - w[0]) / (h * h)).abs());
            }
            min_abs = vals.iter().fold(min_abs, |m, v| m.min(v.abs()));
        }
        st.min_abs_deriv = st.min_abs_deriv.min(min_d);
        st.max_abs_deriv = st.max_abs_deriv.max(max_d);
        st.slope_signs.push(sign);
        st.endpoint_values.push((r.start_val, r.end_val));
        st.min_abs_value.push(min_abs);
        st.pole_resolved.push(r.pole);
    }
    st
}
