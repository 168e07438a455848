//! Geometry of the boundary circle RP^1 (the extended real line).
//!
//! A boundary point is the projective direction `[cos t : sin t]` with angle
//! `t` in `[0, pi)`, i.e. the extended real `cot t`; `t = 0` is the point at
//! infinity. Working in the angle chart removes every special case at
//! infinity. Note that `cot` is decreasing, so increasing angle sweeps the
//! real line downwards.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::scalar::{s, Scalar};

/// Arcs shorter than this are rejected as degenerate.
pub const DEGENERATE_LEN: f64 = 1e-14;

/// Reduce an angle to `[0, pi)`.
pub fn normalize_angle<T: Scalar>(x: T) -> T {
    let pi = T::PI();
    let mut t = x % pi;
    if t < T::zero() {
        t = t + pi;
    }
    if t >= pi {
        t = t - pi;
    }
    t
}

/// Distance between two angles on the circle of circumference pi.
pub fn angle_dist<T: Scalar>(a: T, b: T) -> T {
    let d = normalize_angle(a - b);
    d.min(T::PI() - d)
}

/// A point of RP^1 in the angle chart.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BoundaryPoint<T> {
    theta: T,
}

impl<T: Scalar> BoundaryPoint<T> {
    pub fn from_angle(theta: T) -> Self {
        BoundaryPoint { theta: normalize_angle(theta) }
    }

    /// The point with homogeneous coordinates `[x : y]`.
    pub fn from_direction(x: T, y: T) -> Self {
        Self::from_angle(y.atan2(x))
    }

    /// From an extended real; infinities of either sign map to angle zero.
    pub fn from_real(x: T) -> Self {
        if x.is_infinite() {
            BoundaryPoint { theta: T::zero() }
        } else {
            Self::from_direction(x, T::one())
        }
    }

    pub fn infinity() -> Self {
        BoundaryPoint { theta: T::zero() }
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// The extended real `cot theta`.
    pub fn to_real(&self) -> T {
        let sn = self.theta.sin();
        if sn.abs() < s::<T>(DEGENERATE_LEN) {
            T::infinity()
        } else {
            self.theta.cos() / sn
        }
    }

    pub fn dist(&self, other: &Self) -> T {
        angle_dist(self.theta, other.theta)
    }
}

impl<T: Scalar> MoebiusMap<T> {
    /// Boundary action: apply the map to a point of RP^1 via the linear
    /// action on homogeneous coordinates.
    pub fn apply(&self, p: BoundaryPoint<T>) -> BoundaryPoint<T> {
        let (a, b, c, d) = self.coeffs();
        let (x, y) = (p.theta.cos(), p.theta.sin());
        BoundaryPoint::from_direction(a * x + b * y, c * x + d * y)
    }
}

/// An open arc of RP^1: the points swept from `start` to `end` in the
/// direction of increasing angle, wrapping mod pi. Length lies in `(0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc<T> {
    start: T,
    end: T,
}

impl<T: Scalar> Arc<T> {
    pub fn new(start: BoundaryPoint<T>, end: BoundaryPoint<T>) -> Result<Self> {
        Self::from_angles(start.theta, end.theta)
    }

    pub fn from_angles(start: T, end: T) -> Result<Self> {
        let start = normalize_angle(start);
        let end = normalize_angle(end);
        let len = normalize_angle(end - start);
        if len < s::<T>(DEGENERATE_LEN) {
            return Err(Error::DegenerateArc {
                len: len.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Arc { start, end })
    }

    /// The bounded real interval `(lo, hi)`, not containing infinity.
    pub fn interval(lo: T, hi: T) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::PreconditionFailed("interval needs finite lo < hi".into()));
        }
        // cot is decreasing, so the arc runs from the angle of hi up to lo's.
        Self::new(BoundaryPoint::from_real(hi), BoundaryPoint::from_real(lo))
    }

    /// The complement interval through infinity: all x with x < lo or x > hi,
    /// plus infinity itself.
    pub fn exterior(lo: T, hi: T) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::PreconditionFailed("exterior needs finite lo < hi".into()));
        }
        Self::new(BoundaryPoint::from_real(lo), BoundaryPoint::from_real(hi))
    }

    pub fn start(&self) -> BoundaryPoint<T> {
        BoundaryPoint { theta: self.start }
    }

    pub fn end(&self) -> BoundaryPoint<T> {
        BoundaryPoint { theta: self.end }
    }

    pub fn start_angle(&self) -> T {
        self.start
    }

    pub fn end_angle(&self) -> T {
        self.end
    }

    pub fn length(&self) -> T {
        normalize_angle(self.end - self.start)
    }

    pub fn midpoint(&self) -> BoundaryPoint<T> {
        BoundaryPoint::from_angle(self.start + self.length() / s::<T>(2.0))
    }

    /// Open containment.
    pub fn contains(&self, p: BoundaryPoint<T>) -> bool {
        let off = normalize_angle(p.theta - self.start);
        T::zero() < off && off < self.length()
    }

    /// Closed containment with slack `tol` at both endpoints.
    pub fn contains_closed(&self, p: BoundaryPoint<T>, tol: T) -> bool {
        let off = normalize_angle(p.theta - self.start);
        off <= self.length() + tol || off >= T::PI() - tol
    }

    /// Does the closed arc `[start - margin, end + margin]` lie inside the
    /// open arc `other`? Strict at both ends.
    pub fn inside_with_margin(&self, other: &Arc<T>, margin: T) -> bool {
        let fat = self.length() + margin + margin;
        if fat >= T::PI() {
            return false;
        }
        let off = normalize_angle(self.start - margin - other.start);
        off > T::zero() && off + fat < other.length()
    }

    pub fn fatten(&self, margin: T) -> Result<Self> {
        let fat = self.length() + margin + margin;
        if fat >= T::PI() {
            return Err(Error::CoversCircle);
        }
        Self::from_angles(self.start - margin, self.end + margin)
    }
}

/// Image of an open arc under a Mobius map. Endpoints are mapped through the
/// projective action; since positive-determinant maps preserve the circle's
/// orientation, the image is the arc swept from the image of `start` to the
/// image of `end`. The midpoint image confirms this on non-collapsed arcs.
pub fn arc_image<T: Scalar>(m: &MoebiusMap<T>, a: &Arc<T>) -> Result<Arc<T>> {
    if a.length() < s::<T>(DEGENERATE_LEN) {
        return Err(Error::DegenerateArc {
            len: a.length().to_f64().unwrap_or(f64::NAN),
        });
    }
    let p = m.apply(a.start());
    let q = m.apply(a.end());
    // No interior-sample disambiguation is needed: a positive-determinant
    // linear map preserves the cyclic order of directions, so the image arc
    // always runs from the image of `start` to the image of `end`.
    let img = Arc::new(p, q)?;
    // A strongly contracting map can collapse the image below roundoff; when
    // the endpoint images land in reversed numerical order the sweep flips to
    // a near-full arc. Collapse shows as an inconsistency between the swept
    // length and the observed spread: the midpoint image glued to both
    // endpoints bounds the true image diameter, so a much longer sweep is a
    // flip. (A genuine near-full arc has its midpoint ~pi/2 from the ends.)
    let mid = m.apply(a.midpoint());
    if mid.dist(&p) < s::<T>(1e-9) && mid.dist(&q) < s::<T>(1e-9) && img.length() > s::<T>(1e-8) {
        return Err(Error::DegenerateArc {
            len: p.dist(&q).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(img)
}

/// A finite union of open arcs with pairwise disjoint closures, sorted by
/// start angle.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcUnion<T> {
    arcs: Vec<Arc<T>>,
}

impl<T: Scalar> ArcUnion<T> {
    /// Normalize a list of arcs into a union: sort, merge any arcs whose
    /// closures meet, and reject a union covering the whole circle.
    pub fn new(arcs: Vec<Arc<T>>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::EmptyInput);
        }
        let pi = T::PI();
        // Unroll the circle: each arc as (start, start + length) plus a copy
        // shifted by pi, then a single linear merge sweep. Touching closures
        // merge. This handles wrap-around clusters uniformly.
        let mut iv: Vec<(T, T)> = Vec::with_capacity(2 * arcs.len());
        for a in &arcs {
            let (st, en) = (a.start, a.start + a.length());
            iv.push((st, en));
            iv.push((st + pi, en + pi));
        }
        iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(T, T)> = Vec::with_capacity(iv.len());
        for (st, en) in iv {
            match merged.last_mut() {
                Some(last) if st <= last.1 => {
                    if en > last.1 {
                        last.1 = en;
                    }
                }
                _ => merged.push((st, en)),
            }
        }
        if merged.iter().any(|&(st, en)| en - st >= pi) {
            return Err(Error::CoversCircle);
        }
        // Canonical representatives: intervals starting in [0, pi) that are
        // not already covered by the wrap of the final (spilling) cluster.
        let spill = merged
            .iter()
            .filter(|&&(st, en)| st < pi && en > pi)
            .map(|&(_, en)| en - pi)
            .fold(T::neg_infinity(), |m, x| m.max(x));
        let arcs = merged
            .into_iter()
            .filter(|&(st, _)| st < pi && st > spill)
            .map(|(st, en)| Arc::from_angles(st, en))
            .collect::<Result<Vec<_>>>()?;
        if arcs.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(ArcUnion { arcs })
    }

    pub fn single(a: Arc<T>) -> Self {
        ArcUnion { arcs: vec![a] }
    }

    pub fn arcs(&self) -> &[Arc<T>] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn total_length(&self) -> T {
        self.arcs
            .iter()
            .fold(T::zero(), |acc, a| acc + a.length())
    }

    pub fn contains(&self, p: BoundaryPoint<T>) -> bool {
        self.arcs.iter().any(|a| a.contains(p))
    }

    pub fn contains_closed(&self, p: BoundaryPoint<T>, tol: T) -> bool {
        self.arcs.iter().any(|a| a.contains_closed(p, tol))
    }

    /// Union with another collection of arcs.
    pub fn union_with(&self, extra: &[Arc<T>]) -> Result<Self> {
        let mut all = self.arcs.clone();
        all.extend_from_slice(extra);
        Self::new(all)
    }

    pub fn fatten(&self, margin: T) -> Result<Self> {
        let fat = self
            .arcs
            .iter()
            .map(|a| a.fatten(margin))
            .collect::<Result<Vec<_>>>()?;
        Self::new(fat)
    }

    /// The open complementary gaps, one between each pair of consecutive
    /// arcs (wrapping around).
    pub fn complement_gaps(&self) -> Vec<Arc<T>> {
        let n = self.arcs.len();
        let mut gaps = Vec::with_capacity(n);
        for i in 0..n {
            let a = &self.arcs[i];
            let b = &self.arcs[(i + 1) % n];
            if let Ok(g) = Arc::from_angles(a.end, b.start) {
                gaps.push(g);
            }
        }
        gaps
    }

    /// Image of every arc under a map, renormalized.
    pub fn image(&self, m: &MoebiusMap<T>) -> Result<Self> {
        let imgs = self
            .arcs
            .iter()
            .map(|a| arc_image(m, a))
            .collect::<Result<Vec<_>>>()?;
        Self::new(imgs)
    }

    /// Minimum angular distance from `p` to the union's closure; zero when
    /// `p` lies in an arc's closure.
    pub fn distance_to(&self, p: BoundaryPoint<T>) -> T {
        self.arcs
            .iter()
            .map(|a| {
                if a.contains_closed(p, T::zero()) {
                    T::zero()
                } else {
                    p.dist(&a.start()).min(p.dist(&a.end()))
                }
            })
            .fold(T::infinity(), |m, d| m.min(d))
    }
}

/// Is the closure of `inner`, fattened by `margin` on both sides of every
/// arc, contained in the open `outer`? With `margin = 0` this tests
/// closure-in-interior exactly (so no set is strictly inside itself).
pub fn strictly_inside<T: Scalar>(inner: &ArcUnion<T>, outer: &ArcUnion<T>, margin: T) -> bool {
    inner
        .arcs
        .iter()
        .all(|a| outer.arcs.iter().any(|o| a.inside_with_margin(o, margin)))
}

/// One component of a point hull: the minimal closed arc spanning a cluster
/// of sample points. Zero-extent clusters are kept, flagged `point_like`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullArc<T> {
    pub start: T,
    pub end: T,
    pub point_like: bool,
}

impl<T: Scalar> HullArc<T> {
    pub fn length(&self) -> T {
        normalize_angle(self.end - self.start)
    }

    /// The component as an open arc, widening point-like components
    /// symmetrically by `eps`.
    pub fn to_arc(&self, eps: T) -> Result<Arc<T>> {
        if self.point_like {
            Arc::from_angles(self.start - eps, self.end + eps)
        } else {
            Arc::from_angles(self.start, self.end)
        }
    }
}

/// Hull of a finite point sample: clusters split at angular gaps larger than
/// the gap parameter. When no gap exceeds it, the hull is the whole circle.
#[derive(Debug, Clone, PartialEq)]
pub struct PointHull<T> {
    pub components: Vec<HullArc<T>>,
    pub whole_circle: bool,
}

impl<T: Scalar> PointHull<T> {
    pub fn to_arc_union(&self, eps: T) -> Result<ArcUnion<T>> {
        if self.whole_circle {
            return Err(Error::CoversCircle);
        }
        let arcs = self
            .components
            .iter()
            .map(|h| h.to_arc(eps))
            .collect::<Result<Vec<_>>>()?;
        ArcUnion::new(arcs)
    }
}

/// Sort points by angle and split the circular sequence at gaps wider than
/// `gap`; each cluster becomes its minimal closed arc hull.
pub fn merge_points_to_arcs<T: Scalar>(
    points: &[BoundaryPoint<T>],
    gap: T,
) -> Result<PointHull<T>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pi = T::PI();
    let mut th: Vec<T> = points.iter().map(|p| p.theta).collect();
    th.sort_by(|a, b| a.partial_cmp(b).unwrap());
    th.dedup_by(|a, b| (*a - *b).abs() < s::<T>(DEGENERATE_LEN));
    let n = th.len();
    // Gap after index i (circular; the last gap wraps through pi).
    let gap_after = |i: usize| -> T {
        if i + 1 < n {
            th[i + 1] - th[i]
        } else {
            th[0] + pi - th[n - 1]
        }
    };
    let cut: Vec<usize> = (0..n).filter(|&i| gap_after(i) > gap).collect();
    if cut.is_empty() {
        return Ok(PointHull { components: Vec::new(), whole_circle: true });
    }
    let mut components = Vec::with_capacity(cut.len());
    for w in 0..cut.len() {
        // Cluster starts after cut[w] and ends at cut[(w+1) % len].
        let start_idx = (cut[w] + 1) % n;
        let end_idx = cut[(w + 1) % cut.len()];
        let start = th[start_idx];
        let end = th[end_idx];
        let point_like = angle_dist(start, end) < s::<T>(DEGENERATE_LEN);
        components.push(HullArc { start, end, point_like });
    }
    components.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap());
    Ok(PointHull { components, whole_circle: false })
}

fn extended_real_json<T: Scalar>(p: BoundaryPoint<T>) -> serde_json::Value {
    let x = p.to_real().to_f64().unwrap_or(f64::NAN);
    if x.is_finite() && x.abs() < 1e15 {
        serde_json::json!(x)
    } else {
        serde_json::json!("inf")
    }
}

impl<T: Scalar> Serialize for Arc<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(2))?;
        seq.serialize_element(&extended_real_json(self.start()))?;
        seq.serialize_element(&extended_real_json(self.end()))?;
        seq.end()
    }
}

impl<T: Scalar> Serialize for ArcUnion<T> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(self.arcs.len()))?;
        for a in &self.arcs {
            seq.serialize_element(a)?;
        }
        seq.end()
    }
}
