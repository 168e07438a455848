//! Certification of uniform hyperbolicity via multicones, lower spectral
//! radius estimation, rank-one (invariant interval) tests, and the semigroup
//! Jorgensen inequality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circle::{strictly_inside, Arc, ArcUnion, BoundaryPoint, normalize_angle};
use crate::error::{Error, Result};
use crate::moebius::{FixedPoints, MapClass, MoebiusMap};
use crate::scalar::{s, Scalar};
use crate::words::{enumerate_words, Word, WordWitness, DEFAULT_NODE_BUDGET};

/// A verified invariant multicone: every generator maps its closure, fattened
/// by `margin`, strictly inside the (open) multicone.
#[derive(Debug, Clone)]
pub struct MulticoneCertificate<T> {
    pub multicone: ArcUnion<T>,
    pub margin: T,
    pub per_generator_images: Vec<ArcUnion<T>>,
    pub word_depth_used: usize,
}

/// Why a multicone search gave up or refuted.
#[derive(Debug, Clone)]
pub enum MulticoneFailure<T> {
    /// Some generator is not hyperbolic, so no exponential norm growth.
    NonHyperbolicGenerator { index: usize, class: MapClass },
    /// Attracting and repelling fixed-point sets come within tolerance of
    /// each other; the witnesses are the words owning the two points.
    LimitSetsTouch {
        point: BoundaryPoint<T>,
        fwd_word: Word,
        bwd_word: Word,
    },
    /// Resource bounds hit; strictly "unknown", never "not hyperbolic".
    Budget { detail: String },
}

/// Outcome of [`find_multicone`].
#[derive(Debug, Clone)]
pub enum MulticoneOutcome<T> {
    Certified(MulticoneCertificate<T>),
    Failure(MulticoneFailure<T>),
}

/// A named obstruction to uniform hyperbolicity.
#[derive(Debug, Clone)]
pub enum NegativeCertificate<T> {
    EllipticWord(WordWitness<T>),
    IdentityApproach(WordWitness<T>),
    LimitSetIntersection {
        point: BoundaryPoint<T>,
        fwd_word: Word,
        bwd_word: Word,
    },
    NonHyperbolicGenerator { index: usize },
}

/// Search parameters for [`find_multicone`].
#[derive(Debug, Clone)]
pub struct MulticoneConfig {
    /// Fixed points of all hyperbolic words up to this length seed the cone.
    pub seed_depth: usize,
    /// Number of halvings in the seed radius schedule.
    pub schedule_len: usize,
    /// Iteration cap per radius.
    pub max_iter: usize,
    /// Certification margin (angle) for the final containment check.
    pub margin: f64,
    /// Abort a radius when the union grows past this many components.
    pub component_cap: usize,
    /// Attracting/repelling sets closer than this refute separation.
    pub touch_tol: f64,
    /// Growth below this per iteration counts as stable.
    pub stability_tol: f64,
    pub node_budget: u64,
}

impl Default for MulticoneConfig {
    fn default() -> Self {
        MulticoneConfig {
            seed_depth: 6,
            schedule_len: 20,
            max_iter: 64,
            margin: 1e-7,
            component_cap: 64,
            touch_tol: 1e-6,
            stability_tol: 1e-9,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Attracting and repelling fixed points of every hyperbolic word up to
/// `depth`, each tagged with its witness word.
pub fn word_fixed_points<T: Scalar>(
    gens: &[MoebiusMap<T>],
    depth: usize,
    budget: u64,
) -> Result<(Vec<(BoundaryPoint<T>, Word)>, Vec<(BoundaryPoint<T>, Word)>)> {
    let mut att = Vec::new();
    let mut rep = Vec::new();
    enumerate_words(gens, depth, budget, |w, p| {
        if let FixedPoints::Hyperbolic { attracting, repelling, .. } = p.fixed_points() {
            att.push((BoundaryPoint::from_angle(attracting), w.clone()));
            rep.push((BoundaryPoint::from_angle(repelling), w.clone()));
        }
        true
    })?;
    Ok((att, rep))
}

/// Deterministic multicone search: seed balls around the attracting fixed
/// points of short words, iterate the union with all generator images until
/// stable, retry with halved radii, and verify the result with a margin.
pub fn find_multicone<T: Scalar>(
    gens: &[MoebiusMap<T>],
    cfg: &MulticoneConfig,
) -> Result<MulticoneOutcome<T>> {
    if gens.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, g) in gens.iter().enumerate() {
        let class = g.class();
        if class != MapClass::Hyperbolic {
            return Ok(MulticoneOutcome::Failure(
                MulticoneFailure::NonHyperbolicGenerator { index: i, class },
            ));
        }
    }
    let (att, rep) = word_fixed_points(gens, cfg.seed_depth, cfg.node_budget)?;
    // minimum separation between the attracting and repelling sets
    let mut min_d = T::infinity();
    let mut touch: Option<(BoundaryPoint<T>, Word, Word)> = None;
    for (p, wf) in &att {
        for (q, wb) in &rep {
            let d = p.dist(q);
            if d < min_d {
                min_d = d;
                touch = Some((*p, wf.clone(), wb.clone()));
            }
        }
    }
    if min_d < s::<T>(cfg.touch_tol) {
        let (point, fwd_word, bwd_word) = touch.unwrap();
        return Ok(MulticoneOutcome::Failure(MulticoneFailure::LimitSetsTouch {
            point,
            fwd_word,
            bwd_word,
        }));
    }

    let r0 = min_d / s::<T>(2.0);
    let margin = s::<T>(cfg.margin);
    'radius: for j in 0..cfg.schedule_len {
        let r = r0 * s::<T>(half_pow(j));
        let seeds: Vec<Arc<T>> = att
            .iter()
            .filter_map(|(p, _)| Arc::from_angles(p.theta() - r, p.theta() + r).ok())
            .collect();
        let mut m = match ArcUnion::new(seeds) {
            Ok(u) => u,
            Err(_) => continue 'radius,
        };
        for _ in 0..cfg.max_iter {
            let mut next = m.clone();
            for g in gens {
                next = match next.union_with(match m.image(g) {
                    Ok(img) => img,
                    Err(_) => continue 'radius,
                }
                .arcs())
                {
                    Ok(u) => u,
                    Err(_) => continue 'radius,
                };
            }
            if next.len() > cfg.component_cap {
                continue 'radius;
            }
            if rep
                .iter()
                .any(|(q, _)| next.distance_to(*q) < s::<T>(1e-12))
            {
                continue 'radius;
            }
            let stable = match m.fatten(s::<T>(cfg.stability_tol)) {
                Ok(fat) => next
                    .arcs()
                    .iter()
                    .all(|a| fat.arcs().iter().any(|o| {
                        let off = normalize_angle(a.start_angle() - o.start_angle());
                        let off = if off >= T::PI() - s::<T>(1e-12) { T::zero() } else { off };
                        off + a.length() <= o.length() + s::<T>(1e-12)
                    })),
                Err(_) => false,
            };
            if stable {
                m = next;
                // certify with the requested margin
                let mut images = Vec::with_capacity(gens.len());
                for g in gens {
                    let img = match m.image(g) {
                        Ok(i) => i,
                        Err(_) => continue 'radius,
                    };
                    if !strictly_inside(&img, &m, margin) {
                        continue 'radius;
                    }
                    images.push(img);
                }
                return Ok(MulticoneOutcome::Certified(MulticoneCertificate {
                    multicone: m,
                    margin,
                    per_generator_images: images,
                    word_depth_used: cfg.seed_depth,
                }));
            }
            m = next;
        }
    }
    Ok(MulticoneOutcome::Failure(MulticoneFailure::Budget {
        detail: "radius schedule exhausted without a stable invariant union".into(),
    }))
}

fn half_pow(j: usize) -> f64 {
    let mut x = 1.0;
    for _ in 0..j {
        x *= 0.5;
    }
    x
}

/// Independent re-check of a multicone certificate: containment with the
/// stated margin for every generator, plus a fixed-seed sample of 10^3
/// random words of length <= 30, each of which must map the closed multicone
/// into the open multicone.
pub fn verify_multicone<T: Scalar>(
    gens: &[MoebiusMap<T>],
    cert: &MulticoneCertificate<T>,
) -> bool {
    for g in gens {
        match cert.multicone.image(g) {
            Ok(img) => {
                if !strictly_inside(&img, &cert.multicone, cert.margin) {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    for _ in 0..1000 {
        let len = rng.gen_range(1..=30usize);
        let mut p = MoebiusMap::identity();
        for _ in 0..len {
            let i = rng.gen_range(0..gens.len());
            p = gens[i].compose(&p);
        }
        for a in cert.multicone.arcs() {
            match crate::circle::arc_image(&p, a) {
                Ok(img) => {
                    if !strictly_inside(&ArcUnion::single(img), &cert.multicone, T::zero()) {
                        return false;
                    }
                }
                // a long contracting word can collapse the arc below the
                // degeneracy threshold; containment then reduces to point
                // membership of the (coincident) endpoint images
                Err(Error::DegenerateArc { .. }) => {
                    for q in [a.start(), a.end(), a.midpoint()] {
                        if !cert.multicone.contains(p.apply(q)) {
                            return false;
                        }
                    }
                }
                Err(_) => return false,
            }
        }
    }
    true
}

/// Per-length minimal norm roots and the best periodic upper bound for the
/// lower spectral radius.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralEstimate {
    /// `(L, min over |w| = L of norm(A_w)^(1/L))`
    pub per_length: Vec<(usize, f64)>,
    /// `min over visited words of spectral_radius(A_w)^(1/|w|)`
    pub periodic_upper: f64,
}

/// Exhaustive minimum of spectral-norm roots per length up to `l_max`, and
/// the spectral-radius root minimum over all visited products.
pub fn lower_spectral_estimate<T: Scalar>(
    gens: &[MoebiusMap<T>],
    l_max: usize,
    budget: u64,
) -> Result<SpectralEstimate> {
    let mut per_length = vec![f64::INFINITY; l_max];
    let mut periodic_upper = f64::INFINITY;
    enumerate_words(gens, l_max, budget, |w, p| {
        let l = w.len();
        let norm = p.spectral_norm().to_f64().unwrap_or(f64::INFINITY);
        let root = norm.powf(1.0 / l as f64);
        if root < per_length[l - 1] {
            per_length[l - 1] = root;
        }
        let rho = p.spectral_radius().to_f64().unwrap_or(f64::INFINITY);
        let rho_root = rho.powf(1.0 / l as f64);
        if rho_root < periodic_upper {
            periodic_upper = rho_root;
        }
        true
    })?;
    Ok(SpectralEstimate {
        per_length: per_length.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect(),
        periodic_upper,
    })
}

const RANK_ONE_TOL: f64 = 1e-9;

/// Is the open arc `inner` a subset of the open arc `outer`? Shared
/// endpoints are allowed (open sets), proper equality is not checked here.
fn open_subset<T: Scalar>(inner: &Arc<T>, outer: &Arc<T>, tol: T) -> bool {
    let mut off = normalize_angle(inner.start_angle() - outer.start_angle());
    if off >= T::PI() - tol {
        off = T::zero();
    }
    off + inner.length() <= outer.length() + tol
}

fn arcs_equal<T: Scalar>(a: &Arc<T>, b: &Arc<T>, tol: T) -> bool {
    crate::circle::angle_dist(a.start_angle(), b.start_angle()) < tol
        && (a.length() - b.length()).abs() < tol
}

/// Search for a single open interval J mapped strictly inside itself by
/// every generator (strict: f(J) a subset of J and f(J) != J). Candidate
/// endpoints are the generators' boundary fixed points plus the midpoint of
/// every gap between circularly consecutive ones; candidates are tried in a
/// canonical (sorted-angle) order and the first success is returned.
///
/// The invariance check itself is exact (it is the defining property), so
/// enlarging the candidate set beyond fixed-point endpoints cannot produce
/// false positives; it only finds intervals whose maximal representative has
/// endpoints between fixed points.
pub fn rank_one_test<T: Scalar>(gens: &[MoebiusMap<T>]) -> Option<Arc<T>> {
    let mut angles: Vec<T> = Vec::new();
    for g in gens {
        match g.fixed_points() {
            FixedPoints::Hyperbolic { attracting, repelling, .. } => {
                angles.push(attracting);
                angles.push(repelling);
            }
            FixedPoints::Parabolic { boundary } => angles.push(boundary),
            _ => {}
        }
    }
    if angles.is_empty() {
        return None;
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| crate::circle::angle_dist(*a, *b) < s::<T>(1e-12));
    // midpoints of the circular gaps between consecutive fixed points
    let n = angles.len();
    let mut cands = angles.clone();
    for i in 0..n {
        let a = angles[i];
        let b = if i + 1 < n { angles[i + 1] } else { angles[0] + T::PI() };
        if b - a > s::<T>(1e-9) {
            cands.push(normalize_angle((a + b) / s::<T>(2.0)));
        }
    }
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let tol = s::<T>(RANK_ONE_TOL);
    for &p in &cands {
        for &q in &cands {
            let j = match Arc::from_angles(p, q) {
                Ok(j) => j,
                Err(_) => continue,
            };
            let ok = gens.iter().all(|g| match crate::circle::arc_image(g, &j) {
                Ok(img) => open_subset(&img, &j, tol) && !arcs_equal(&img, &j, tol),
                Err(_) => false,
            });
            if ok {
                return Some(j);
            }
        }
    }
    None
}

/// The semigroup Jorgensen quantity `||tr f|^2 - 4| + ||tr [f,g]| - 2|` and
/// whether it meets the bound 1 (it may fail only for rank-one pairs).
pub fn jorgensen_check<T: Scalar>(f: &MoebiusMap<T>, g: &MoebiusMap<T>) -> (T, bool) {
    let tf = f.trace_abs();
    let tc = f.commutator(g).trace_abs();
    let value = (tf * tf - s::<T>(4.0)).abs() + (tc - s::<T>(2.0)).abs();
    (value, value >= T::one())
}

fn boundary_fixed_angles<T: Scalar>(m: &MoebiusMap<T>) -> Vec<T> {
    match m.fixed_points() {
        FixedPoints::Hyperbolic { attracting, repelling, .. } => vec![attracting, repelling],
        FixedPoints::Parabolic { boundary } => vec![boundary],
        _ => vec![],
    }
}

/// Is the pair antiparallel, i.e. does it fail to have a common strictly
/// invariant interval? Defined only for hyperbolic/parabolic pairs with no
/// common boundary fixed point.
pub fn antiparallel_check<T: Scalar>(f: &MoebiusMap<T>, g: &MoebiusMap<T>) -> Result<bool> {
    for (m, name) in [(f, "first"), (g, "second")] {
        match m.class() {
            MapClass::Hyperbolic | MapClass::Parabolic => {}
            c => {
                return Err(Error::InvalidClass(format!(
                    "{name} map is {c:?}; antiparallel needs hyperbolic or parabolic"
                )))
            }
        }
    }
    let fa = boundary_fixed_angles(f);
    let ga = boundary_fixed_angles(g);
    for a in &fa {
        for b in &ga {
            if crate::circle::angle_dist(*a, *b) < s::<T>(1e-9) {
                return Err(Error::CommonFixedPoint);
            }
        }
    }
    Ok(rank_one_test(&[f.clone(), g.clone()]).is_none())
}

impl<T: Scalar> From<MulticoneFailure<T>> for Option<NegativeCertificate<T>> {
    fn from(f: MulticoneFailure<T>) -> Self {
        match f {
            MulticoneFailure::NonHyperbolicGenerator { index, .. } => {
                Some(NegativeCertificate::NonHyperbolicGenerator { index })
            }
            MulticoneFailure::LimitSetsTouch { point, fwd_word, bwd_word } => {
                Some(NegativeCertificate::LimitSetIntersection { point, fwd_word, bwd_word })
            }
            MulticoneFailure::Budget { .. } => None,
        }
    }
}
