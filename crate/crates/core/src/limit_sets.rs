//! Forward and backward limit sets, the exact affine limit interval, the
//! cores C+/C-, elementary detection, and the non-semidiscreteness inference
//! rule (a backward limit point interior to the forward limit set).

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::circle::{
    angle_dist, arc_image, merge_points_to_arcs, normalize_angle, Arc, ArcUnion, BoundaryPoint,
    PointHull,
};
use crate::error::{Error, Result};
use crate::exact::ExactAffine;
use crate::moebius::{FixedPoints, MoebiusMap};
use crate::scalar::{s, Scalar};
use crate::words::{enumerate_words, Word};

/// How a limit-set approximation was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitMethod {
    /// Attracting fixed points of hyperbolic words (non-elementary tuples).
    FixedPoints,
    /// Orbit of the base point i, projected to the boundary, augmented with
    /// word fixed points (elementary tuples).
    OrbitClosure,
}

/// One sample point of a limit set with its provenance.
#[derive(Debug, Clone)]
pub struct LimitPoint<T> {
    pub point: BoundaryPoint<T>,
    /// Word owning the point: the fixed-point witness, or the orbit word.
    pub word: Word,
    /// True when the point is a projected orbit image rather than a fixed
    /// point of its word.
    pub from_orbit: bool,
}

/// A finite approximation of a limit set with its interval hull.
#[derive(Debug, Clone)]
pub struct LimitSetApprox<T> {
    pub points: Vec<LimitPoint<T>>,
    pub depth: usize,
    pub gap: T,
    pub method: LimitMethod,
    pub hull: PointHull<T>,
}

impl<T: Scalar> LimitSetApprox<T> {
    /// Every non-orbit point must re-validate as the attracting fixed point
    /// of its witness word, within 1e-9.
    pub fn validate(&self, gens: &[MoebiusMap<T>]) -> bool {
        self.points.iter().all(|lp| {
            if lp.from_orbit {
                return true;
            }
            match lp.word.evaluate(gens).fixed_points() {
                FixedPoints::Hyperbolic { attracting, .. } => {
                    angle_dist(attracting, lp.point.theta()) < s::<T>(1e-9)
                }
                _ => false,
            }
        })
    }
}

/// Forward limit set approximation at the given word depth, hull clustered
/// at the given angular gap.
pub fn forward_limit_set<T: Scalar>(
    gens: &[MoebiusMap<T>],
    depth: usize,
    gap: T,
    budget: u64,
) -> Result<LimitSetApprox<T>> {
    let elementary = !matches!(elementary_check(gens), ElementaryStatus::NonElementary);
    let mut points: Vec<LimitPoint<T>> = Vec::new();
    if elementary {
        // Orbit of the base point i; images that reach within 1e-3 of the
        // boundary (disc model) are projected radially onto it.
        enumerate_words(gens, depth, budget, |w, p| {
            let (u, v) = p.apply_half_plane(T::zero(), T::one());
            if let Some(bp) = project_to_boundary(u, v) {
                points.push(LimitPoint { point: bp, word: w.clone(), from_orbit: true });
            }
            true
        })?;
    }
    // Attracting fixed points of hyperbolic words. For non-elementary tuples
    // this IS the limit set (closure); for elementary ones they are still
    // orbit accumulation points and sharpen the orbit-closure hull.
    enumerate_words(gens, depth, budget, |w, p| {
        if let FixedPoints::Hyperbolic { attracting, .. } = p.fixed_points() {
            points.push(LimitPoint {
                point: BoundaryPoint::from_angle(attracting),
                word: w.clone(),
                from_orbit: false,
            });
        }
        true
    })?;
    if points.is_empty() {
        return Err(Error::PreconditionFailed(
            "no hyperbolic words and no boundary-accumulating orbit up to depth".into(),
        ));
    }
    let bps: Vec<BoundaryPoint<T>> = points.iter().map(|lp| lp.point).collect();
    let hull = merge_points_to_arcs(&bps, gap)?;
    Ok(LimitSetApprox {
        points,
        depth,
        gap,
        method: if elementary { LimitMethod::OrbitClosure } else { LimitMethod::FixedPoints },
        hull,
    })
}

/// Backward limit set: the forward limit set of the inverted tuple (witness
/// words index into the inverted tuple).
pub fn backward_limit_set<T: Scalar>(
    gens: &[MoebiusMap<T>],
    depth: usize,
    gap: T,
    budget: u64,
) -> Result<LimitSetApprox<T>> {
    let inv: Vec<MoebiusMap<T>> = gens.iter().map(|g| g.inverse()).collect();
    forward_limit_set(&inv, depth, gap, budget)
}

/// Project `u + iv` radially to the boundary in the disc model, when it lies
/// within 1e-3 of the boundary circle; `None` when it is too interior.
fn project_to_boundary<T: Scalar>(u: T, v: T) -> Option<BoundaryPoint<T>> {
    // Cayley transform w = (z - i)/(z + i); |w| -> 1 at the boundary.
    let den = u * u + (v + T::one()) * (v + T::one());
    let wr = (u * u + v * v - T::one()) / den;
    let wi = -(s::<T>(2.0)) * u / den;
    let norm2 = wr * wr + wi * wi;
    if norm2 < (T::one() - s::<T>(1e-3)) * (T::one() - s::<T>(1e-3)) {
        return None;
    }
    // Radial projection is w/|w| = e^(i phi); the boundary real is
    // -cot(phi/2), i.e. chart angle theta = -phi/2 mod pi.
    let phi = wi.atan2(wr);
    Some(BoundaryPoint::from_angle(normalize_angle(-phi / s::<T>(2.0))))
}

/// Exact forward limit interval `[d/(1-c), inf]` for the pair
/// `f = az` (a > 1), `g = cz + d` (0 < c < 1) with `d/(1-c) > 0`.
pub fn affine_limit_interval(f: &ExactAffine, g: &ExactAffine) -> Result<BigRational> {
    if !f.kappa.is_zero() {
        return Err(Error::PreconditionFailed("first map must fix 0 (b = 0)".into()));
    }
    if f.lambda_value() <= BigRational::one() {
        return Err(Error::PreconditionFailed("first dilation must exceed 1".into()));
    }
    let c = g.lambda_value();
    if c >= BigRational::one() {
        return Err(Error::PreconditionFailed("second dilation must be below 1".into()));
    }
    let lo = &g.kappa / (BigRational::one() - &c);
    if lo <= BigRational::zero() {
        return Err(Error::PreconditionFailed(
            "d/(1-c) must be positive (the interval must avoid the repelling point 0)".into(),
        ));
    }
    Ok(lo)
}

/// Position of `p` along the arc `j`, measured from its start.
fn arc_pos<T: Scalar>(j: &Arc<T>, p: BoundaryPoint<T>) -> T {
    normalize_angle(p.theta() - j.start_angle())
}

/// For `f` fixing `x`, `g` fixing `y`, with the interval `(x, y)` mapped
/// strictly inside itself by both: does the limit set fill all of `[x, y]`?
/// True exactly when `g(x) <= f(y)` (non-strict). The comparison is made in
/// the angle chart along the arc of `(x, y)`, so it is meaningful even when
/// the interval is a neighborhood of infinity.
pub fn ls_inter_full_interval<T: Scalar>(
    f: &MoebiusMap<T>,
    g: &MoebiusMap<T>,
    x: BoundaryPoint<T>,
    y: BoundaryPoint<T>,
) -> Result<bool> {
    let tol = s::<T>(1e-10);
    if f.apply(x).dist(&x) > tol {
        return Err(Error::PreconditionFailed("first map must fix x".into()));
    }
    if g.apply(y).dist(&y) > tol {
        return Err(Error::PreconditionFailed("second map must fix y".into()));
    }
    // the arc of the interval (x, y): runs from the angle of y to that of x
    let j = Arc::new(y, x)?;
    for (m, name) in [(f, "first"), (g, "second")] {
        let img = arc_image(m, &j)?;
        let mut off = normalize_angle(img.start_angle() - j.start_angle());
        if off >= T::PI() - tol {
            off = T::zero();
        }
        let inside = off + img.length() <= j.length() + tol;
        let proper = off > tol || j.length() - img.length() > tol;
        if !(inside && proper) {
            return Err(Error::PreconditionFailed(format!(
                "{name} map does not send (x,y) strictly inside itself"
            )));
        }
    }
    // along j, increasing position means decreasing real value, so
    // g(x) <= f(y) becomes pos(g(x)) >= pos(f(y)) up to tolerance
    let pgx = arc_pos(&j, g.apply(x));
    let pfy = arc_pos(&j, f.apply(y));
    Ok(pgx >= pfy - tol)
}

/// One removed complement component of a core, with the opposite-side limit
/// point that removed it.
#[derive(Debug, Clone)]
pub struct RemovedGap<T> {
    pub gap: Arc<T>,
    pub witness: BoundaryPoint<T>,
    pub word: Word,
}

/// One side of a core computation.
#[derive(Debug, Clone)]
pub struct CoreSide<T> {
    /// The core as an arc union; `None` when it is the whole circle.
    pub arcs: Option<ArcUnion<T>>,
    pub whole_circle: bool,
    pub removed: Vec<RemovedGap<T>>,
}

/// The forward and backward cores.
#[derive(Debug, Clone)]
pub struct CoreSet<T> {
    pub forward: CoreSide<T>,
    pub backward: CoreSide<T>,
}

const POINT_EPS: f64 = 1e-9;

fn core_side<T: Scalar>(own: &LimitSetApprox<T>, other: &LimitSetApprox<T>) -> Result<CoreSide<T>> {
    if own.hull.whole_circle {
        return Ok(CoreSide { arcs: None, whole_circle: true, removed: Vec::new() });
    }
    let hull = own.hull.to_arc_union(s::<T>(POINT_EPS))?;
    let mut removed = Vec::new();
    let mut kept: Vec<Arc<T>> = Vec::new();
    for gap in hull.complement_gaps() {
        // pick the removing witness with the shortest word, ties by letters
        let mut witness: Option<&LimitPoint<T>> = None;
        for lp in &other.points {
            if gap.contains(lp.point) {
                let replace = match witness {
                    None => true,
                    Some(w) => {
                        (lp.word.len(), &lp.word.letters) < (w.word.len(), &w.word.letters)
                    }
                };
                if replace {
                    witness = Some(lp);
                }
            }
        }
        match witness {
            Some(lp) => removed.push(RemovedGap {
                gap,
                witness: lp.point,
                word: lp.word.clone(),
            }),
            None => kept.push(gap),
        }
    }
    if removed.is_empty() {
        // no complement component meets the other limit set: core = circle
        return Ok(CoreSide { arcs: None, whole_circle: true, removed });
    }
    let mut arcs: Vec<Arc<T>> = hull.arcs().to_vec();
    arcs.extend(kept);
    Ok(CoreSide { arcs: Some(ArcUnion::new(arcs)?), whole_circle: false, removed })
}

/// Cores: each side is the circle minus the complement components of its own
/// hull that contain a point of the opposite limit set.
pub fn compute_cores<T: Scalar>(
    fwd: &LimitSetApprox<T>,
    bwd: &LimitSetApprox<T>,
) -> Result<CoreSet<T>> {
    Ok(CoreSet {
        forward: core_side(fwd, bwd)?,
        backward: core_side(bwd, fwd)?,
    })
}

/// Elementary detection outcome.
#[derive(Debug, Clone)]
pub enum ElementaryStatus<T> {
    /// Every generator fixes this boundary point.
    CommonBoundaryFixed(BoundaryPoint<T>),
    /// Every generator fixes this interior point `(x, y)`, `y > 0`.
    CommonInteriorFixed { x: T, y: T },
    /// Every generator fixes or swaps this boundary pair.
    InvariantPair(BoundaryPoint<T>, BoundaryPoint<T>),
    NonElementary,
}

const ELEM_TOL: f64 = 1e-9;

fn fixes_boundary<T: Scalar>(g: &MoebiusMap<T>, p: BoundaryPoint<T>) -> bool {
    g.apply(p).dist(&p) < s::<T>(ELEM_TOL)
}

/// Exact-intersection elementary check: a common boundary fixed point, a
/// common interior fixed point, or a setwise-invariant boundary pair.
pub fn elementary_check<T: Scalar>(gens: &[MoebiusMap<T>]) -> ElementaryStatus<T> {
    let non_id: Vec<&MoebiusMap<T>> = gens.iter().filter(|g| !g.is_identity()).collect();
    if non_id.is_empty() {
        // the trivial tuple fixes everything
        return ElementaryStatus::CommonInteriorFixed { x: T::zero(), y: T::one() };
    }
    // candidate boundary points from the first non-identity generator
    let mut boundary_candidates: Vec<BoundaryPoint<T>> = Vec::new();
    match non_id[0].fixed_points() {
        FixedPoints::Hyperbolic { attracting, repelling, .. } => {
            boundary_candidates.push(BoundaryPoint::from_angle(attracting));
            boundary_candidates.push(BoundaryPoint::from_angle(repelling));
        }
        FixedPoints::Parabolic { boundary } => {
            boundary_candidates.push(BoundaryPoint::from_angle(boundary));
        }
        _ => {}
    }
    for p in &boundary_candidates {
        if non_id.iter().all(|g| fixes_boundary(g, *p)) {
            return ElementaryStatus::CommonBoundaryFixed(*p);
        }
    }
    // common interior point: all generators elliptic about the same center
    if let FixedPoints::Elliptic { x, y } = non_id[0].fixed_points() {
        let all = non_id.iter().all(|g| match g.fixed_points() {
            FixedPoints::Elliptic { x: x2, y: y2 } => {
                (x - x2).abs() < s::<T>(ELEM_TOL) && (y - y2).abs() < s::<T>(ELEM_TOL)
            }
            _ => false,
        });
        if all {
            return ElementaryStatus::CommonInteriorFixed { x, y };
        }
    }
    // invariant-pair scan over all pairs of generator boundary fixed points
    let mut all_boundary: Vec<BoundaryPoint<T>> = Vec::new();
    for g in &non_id {
        match g.fixed_points() {
            FixedPoints::Hyperbolic { attracting, repelling, .. } => {
                all_boundary.push(BoundaryPoint::from_angle(attracting));
                all_boundary.push(BoundaryPoint::from_angle(repelling));
            }
            FixedPoints::Parabolic { boundary } => {
                all_boundary.push(BoundaryPoint::from_angle(boundary));
            }
            _ => {}
        }
    }
    let tol = s::<T>(1e-10);
    for i in 0..all_boundary.len() {
        for j in (i + 1)..all_boundary.len() {
            let (p, q) = (all_boundary[i], all_boundary[j]);
            if p.dist(&q) < tol {
                continue;
            }
            let ok = non_id.iter().all(|g| {
                let (ip, iq) = (g.apply(p), g.apply(q));
                (ip.dist(&p) < tol && iq.dist(&q) < tol)
                    || (ip.dist(&q) < tol && iq.dist(&p) < tol)
            });
            if ok {
                return ElementaryStatus::InvariantPair(p, q);
            }
        }
    }
    ElementaryStatus::NonElementary
}

/// Structured conclusion: a backward limit point sits in the interior of the
/// forward limit set, so (under the recorded assumptions) the semigroup is
/// not semidiscrete.
#[derive(Debug, Clone)]
pub struct NotSemidiscreteConclusion<T> {
    pub point: BoundaryPoint<T>,
    /// Word whose attracting fixed point approximates the forward side near
    /// the witness.
    pub fwd_word: Word,
    /// Word (over the inverted tuple) owning the backward witness point.
    pub bwd_word: Word,
    /// Side conditions used but not certified.
    pub assumptions: Vec<String>,
}

/// Fire when a backward limit point lies in the interior of a forward hull
/// component by at least the hull gap. The inference's side conditions
/// (non-elementary, not a discrete group) are recorded as assumptions when
/// they could not be certified.
pub fn nonsd_inference<T: Scalar>(
    fwd: &LimitSetApprox<T>,
    bwd: &LimitSetApprox<T>,
    elementary: bool,
    inverse_free_depth: Option<usize>,
) -> Option<NotSemidiscreteConclusion<T>> {
    let margin = fwd.gap;
    // qualifying backward points, best-first: shortest word, then letters
    let mut cands: Vec<&LimitPoint<T>> = bwd.points.iter().collect();
    cands.sort_by(|a, b| {
        (a.word.len(), &a.word.letters, a.from_orbit)
            .cmp(&(b.word.len(), &b.word.letters, b.from_orbit))
    });
    let interior = |p: BoundaryPoint<T>| -> bool {
        if fwd.hull.whole_circle {
            return true;
        }
        fwd.hull.components.iter().any(|h| {
            if h.point_like {
                return false;
            }
            let len = normalize_angle(h.end - h.start);
            let off = normalize_angle(p.theta() - h.start);
            off >= margin && off <= len - margin
        })
    };
    let witness = cands.into_iter().find(|lp| interior(lp.point))?;
    // nearest forward sample point supplies the forward witness word
    let fwd_word = fwd
        .points
        .iter()
        .min_by(|a, b| {
            a.point
                .dist(&witness.point)
                .partial_cmp(&b.point.dist(&witness.point))
                .unwrap()
                .then_with(|| (a.word.len(), &a.word.letters).cmp(&(b.word.len(), &b.word.letters)))
        })?
        .word
        .clone();
    let mut assumptions = Vec::new();
    if elementary {
        assumptions.push("non-elementary hypothesis not verified (tuple is elementary)".into());
    }
    match inverse_free_depth {
        Some(d) => assumptions.push(format!(
            "not a discrete group: assumed, no inverse pair found up to word length {d}"
        )),
        None => assumptions.push("not a discrete group: assumed, inverse scan not run".into()),
    }
    Some(NotSemidiscreteConclusion {
        point: witness.point,
        fwd_word,
        bwd_word: witness.word.clone(),
        assumptions,
    })
}
