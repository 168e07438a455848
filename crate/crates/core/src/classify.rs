//! The locus classifier: orchestrates the multicone search, elliptic-word
//! search, inverse-freeness scan, semidiscreteness refutation, limit sets and
//! cores into a single three-valued report per tuple, plus a consistency
//! crosscheck of the mutual-exclusion rules between the loci.

use serde_json::{json, Value};

use crate::circle::Arc;
use crate::error::{Error, Result};
use crate::hyperbolicity::{
    find_multicone, lower_spectral_estimate, rank_one_test, verify_multicone, MulticoneCertificate,
    MulticoneConfig, MulticoneOutcome, NegativeCertificate, SpectralEstimate,
};
use crate::limit_sets::{
    backward_limit_set, compute_cores, elementary_check, forward_limit_set, nonsd_inference,
    CoreSet, ElementaryStatus, LimitSetApprox, NotSemidiscreteConclusion,
};
use crate::moebius::{MapClass, MoebiusMap};
use crate::scalar::{s, Scalar};
use crate::words::{
    certify_no_elliptic_affine, find_elliptic_or_identity, inverse_free_violation,
    refute_semidiscrete, AffineCertOutcome, ExactAffineTuple, ExactCertificate, RefuteConfig,
    Word, WordWitness, WitnessKind, DEFAULT_NODE_BUDGET,
};

/// Membership in the uniformly hyperbolic locus.
#[derive(Debug, Clone)]
pub enum HyperbolicityStatus<T> {
    CertifiedYes(MulticoneCertificate<T>),
    CertifiedNo(NegativeCertificate<T>),
    Unknown,
}

/// Membership in the locus of semigroups containing an elliptic element (or
/// the identity).
#[derive(Debug, Clone)]
pub enum EllipticStatus<T> {
    Witness(WordWitness<T>),
    /// Exact certificate: absent at every word length.
    CertifiedNo(ExactCertificate),
    /// Absent only up to the searched depth.
    NoneUpToDepth(usize),
}

/// Whether the semigroup contains an inverse pair.
#[derive(Debug, Clone)]
pub enum InverseFreeStatus<T> {
    Violation(WordWitness<T>),
    /// The exact no-identity certificate also rules out inverse pairs.
    CertifiedFree(ExactCertificate),
    NoViolationUpToDepth(usize),
}

/// Whether semidiscreteness has been refuted.
#[derive(Debug, Clone)]
pub enum SemidiscreteStatus<T> {
    /// A word close to (but not at) the identity; the inference-based
    /// refutation rides along when it also fired.
    RefutedWitness {
        witness: WordWitness<T>,
        inference: Option<NotSemidiscreteConclusion<T>>,
    },
    RefutedByInference(NotSemidiscreteConclusion<T>),
    NoRefutationUpToBudget,
}

impl<T> SemidiscreteStatus<T> {
    pub fn refuted(&self) -> bool {
        !matches!(self, SemidiscreteStatus::NoRefutationUpToBudget)
    }
}

/// Membership in the pathological locus: elementary, inverse-free,
/// elliptic-free, not semidiscrete.
#[derive(Debug, Clone)]
pub enum PStatus {
    Yes { evidence: Vec<String> },
    No { reason: String },
    Unknown,
}

/// The assembled per-tuple report.
#[derive(Debug, Clone)]
pub struct LociReport<T> {
    pub generator_classes: Vec<MapClass>,
    pub elementary: ElementaryStatus<T>,
    pub in_h: HyperbolicityStatus<T>,
    pub in_e: EllipticStatus<T>,
    pub inverse_free: InverseFreeStatus<T>,
    pub semidiscrete: SemidiscreteStatus<T>,
    pub rank_one: Option<Arc<T>>,
    pub in_p: PStatus,
    pub spectral: Option<SpectralEstimate>,
    pub cores: Option<CoreSet<T>>,
    /// Stages that fell back or were skipped, never silently.
    pub notes: Vec<String>,
}

/// Depth and budget knobs for [`classify`].
#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    /// Elliptic/identity word search depth.
    pub word_depth: usize,
    /// Inverse-pair scan depth.
    pub inverse_depth: usize,
    /// Limit-set word depth.
    pub limit_depth: usize,
    /// Angular clustering gap for limit-set hulls.
    pub gap: f64,
    pub multicone: MulticoneConfig,
    pub refute: RefuteConfig,
    /// Maximum word length in the lower-spectral-radius table.
    pub spectral_len: usize,
    pub node_budget: u64,
}

impl ClassifyConfig {
    /// Fast preset for batch runs.
    pub fn quick() -> Self {
        ClassifyConfig {
            word_depth: 8,
            inverse_depth: 6,
            limit_depth: 8,
            gap: 0.02,
            multicone: MulticoneConfig::default(),
            refute: RefuteConfig { max_len: 16, ..RefuteConfig::default() },
            spectral_len: 6,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    /// Deeper searches; strictly extends `quick` (same beam width and
    /// enumeration order, larger depths), so certified statuses can only be
    /// confirmed, and open ones resolved, never flipped.
    pub fn thorough() -> Self {
        ClassifyConfig {
            word_depth: 12,
            inverse_depth: 8,
            limit_depth: 10,
            gap: 0.02,
            multicone: MulticoneConfig::default(),
            refute: RefuteConfig::default(),
            spectral_len: 8,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig::quick()
    }
}

/// Run `f` at the largest depth <= `depth` that fits the node budget.
/// Returns the depth actually used; `None` result only when even depth 1 is
/// over budget.
fn with_depth_backoff<V>(
    mut depth: usize,
    notes: &mut Vec<String>,
    name: &str,
    f: impl Fn(usize) -> Result<V>,
) -> Result<(usize, Option<V>)> {
    let requested = depth;
    loop {
        match f(depth) {
            Ok(v) => {
                if depth < requested {
                    notes.push(format!("{name}: depth reduced {requested} -> {depth} to fit the node budget"));
                }
                return Ok((depth, Some(v)));
            }
            Err(Error::BudgetExceeded { .. }) if depth > 1 => depth -= 1,
            Err(Error::BudgetExceeded { nodes, budget }) => {
                notes.push(format!("{name}: budget exceeded ({nodes} nodes > {budget})"));
                return Ok((depth, None));
            }
            Err(e) => return Err(e),
        }
    }
}

fn remap_word(w: &Word, index_map: &[usize]) -> Word {
    Word::new(
        w.letters
            .iter()
            .map(|&l| index_map[(l - 1) as usize] as u8 + 1)
            .collect(),
    )
}

/// Full classification pipeline: per-generator classes, elementary check,
/// exact affine certification (when an exact description is supplied),
/// elliptic/identity search, inverse scan, multicone search, limit sets and
/// cores with the non-semidiscreteness inference, rank-one test,
/// semidiscreteness refutation, and the spectral table. The report passes
/// [`sdc_crosscheck`] before it is returned.
pub fn classify<T: Scalar>(
    gens: &[MoebiusMap<T>],
    exact: Option<&ExactAffineTuple>,
    cfg: &ClassifyConfig,
) -> Result<LociReport<T>> {
    if gens.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut notes: Vec<String> = Vec::new();
    let generator_classes: Vec<MapClass> = gens.iter().map(|g| g.class()).collect();
    let elementary = elementary_check(gens);
    let is_elementary = !matches!(elementary, ElementaryStatus::NonElementary);

    // exact affine certification when applicable
    let mut exact_cert: Option<ExactCertificate> = None;
    let mut exact_identity: Option<Word> = None;
    if let Some(tuple) = exact {
        if tuple.maps.len() == gens.len() {
            match certify_no_elliptic_affine(tuple)? {
                AffineCertOutcome::Certified(c) => exact_cert = Some(c),
                AffineCertOutcome::Refuted { word } => exact_identity = Some(word),
                AffineCertOutcome::Inapplicable { reason } => {
                    notes.push(format!("exact certificate inapplicable: {reason}"));
                }
            }
        } else {
            notes.push("exact description has a different arity; ignored".into());
        }
    }

    // elliptic / identity words
    let in_e = if let Some(c) = &exact_cert {
        EllipticStatus::CertifiedNo(c.clone())
    } else if let Some(w) = &exact_identity {
        EllipticStatus::Witness(WordWitness {
            product: w.evaluate(gens),
            word: w.clone(),
            kind: WitnessKind::Identity,
        })
    } else {
        let (d, found) = with_depth_backoff(cfg.word_depth, &mut notes, "elliptic search", |d| {
            find_elliptic_or_identity(gens, d, cfg.node_budget)
        })?;
        match found {
            Some(Some(w)) => EllipticStatus::Witness(w),
            Some(None) => EllipticStatus::NoneUpToDepth(d),
            None => EllipticStatus::NoneUpToDepth(0),
        }
    };

    // inverse pairs
    let (inverse_free, inv_scan_depth) = if let Some(c) = &exact_cert {
        // an inverse pair concatenates to an identity word, which the
        // certificate excludes at every length
        (InverseFreeStatus::CertifiedFree(c.clone()), Some(cfg.inverse_depth))
    } else {
        let (d, found) = with_depth_backoff(cfg.inverse_depth, &mut notes, "inverse scan", |d| {
            inverse_free_violation(gens, d, cfg.node_budget)
        })?;
        match found {
            Some(Some(w)) => (InverseFreeStatus::Violation(w), None),
            Some(None) => (InverseFreeStatus::NoViolationUpToDepth(d), Some(d)),
            None => (InverseFreeStatus::NoViolationUpToDepth(0), None),
        }
    };

    // uniform hyperbolicity
    let in_h = match &in_e {
        EllipticStatus::Witness(w) => {
            let neg = match w.kind {
                WitnessKind::Elliptic => NegativeCertificate::EllipticWord(w.clone()),
                _ => NegativeCertificate::IdentityApproach(w.clone()),
            };
            HyperbolicityStatus::CertifiedNo(neg)
        }
        _ => match find_multicone(gens, &cfg.multicone) {
            Ok(MulticoneOutcome::Certified(c)) => {
                if verify_multicone(gens, &c) {
                    HyperbolicityStatus::CertifiedYes(c)
                } else {
                    notes.push("multicone certificate failed independent verification".into());
                    HyperbolicityStatus::Unknown
                }
            }
            Ok(MulticoneOutcome::Failure(f)) => match Option::<NegativeCertificate<T>>::from(f) {
                Some(neg) => HyperbolicityStatus::CertifiedNo(neg),
                None => HyperbolicityStatus::Unknown,
            },
            Err(Error::BudgetExceeded { nodes, budget }) => {
                notes.push(format!("multicone search: budget exceeded ({nodes} > {budget})"));
                HyperbolicityStatus::Unknown
            }
            Err(e) => return Err(e),
        },
    };
    let certified_uh = matches!(in_h, HyperbolicityStatus::CertifiedYes(_));

    // limit sets, cores, and the non-semidiscreteness inference; a certified
    // multicone already implies semidiscreteness, so the refutation stages
    // are skipped in that case
    let mut cores: Option<CoreSet<T>> = None;
    let mut inference: Option<NotSemidiscreteConclusion<T>> = None;
    if !certified_uh {
        let lims = (|| -> Result<(LimitSetApprox<T>, LimitSetApprox<T>)> {
            let fwd = forward_limit_set(gens, cfg.limit_depth, s(cfg.gap), cfg.node_budget)?;
            let bwd = backward_limit_set(gens, cfg.limit_depth, s(cfg.gap), cfg.node_budget)?;
            Ok((fwd, bwd))
        })();
        match lims {
            Ok((fwd, bwd)) => {
                cores = match compute_cores(&fwd, &bwd) {
                    Ok(c) => Some(c),
                    Err(e) => {
                        notes.push(format!("cores unavailable: {e}"));
                        None
                    }
                };
                inference = nonsd_inference(&fwd, &bwd, is_elementary, inv_scan_depth);
                if fwd.hull.whole_circle && gens.len() > 2 {
                    // the whole-circle hull makes every backward point an
                    // interior witness; a pair sub-tuple (whose limit set is
                    // contained in the full one) localizes a sharper witness
                    'pairs: for i in 0..gens.len() {
                        for j in (i + 1)..gens.len() {
                            let sub = vec![gens[i].clone(), gens[j].clone()];
                            let sfwd = match forward_limit_set(
                                &sub,
                                cfg.limit_depth,
                                s(cfg.gap),
                                cfg.node_budget,
                            ) {
                                Ok(f) if !f.hull.whole_circle => f,
                                _ => continue,
                            };
                            if let Some(mut c) =
                                nonsd_inference(&sfwd, &bwd, is_elementary, inv_scan_depth)
                            {
                                c.fwd_word = remap_word(&c.fwd_word, &[i, j]);
                                c.assumptions.push(format!(
                                    "forward hull restricted to the sub-tuple ({}, {}); its \
                                     limit set is contained in the full one",
                                    i + 1,
                                    j + 1
                                ));
                                inference = Some(c);
                                break 'pairs;
                            }
                        }
                    }
                }
            }
            Err(Error::BudgetExceeded { nodes, budget }) => {
                notes.push(format!("limit sets: budget exceeded ({nodes} > {budget})"));
            }
            Err(Error::PreconditionFailed(msg)) => {
                notes.push(format!("limit sets unavailable: {msg}"));
            }
            Err(e) => return Err(e),
        }
    }

    // rank one
    let rank_one = rank_one_test(gens);

    // semidiscreteness refutation
    let semidiscrete = if certified_uh {
        SemidiscreteStatus::NoRefutationUpToBudget
    } else {
        match refute_semidiscrete(gens, exact, &cfg.refute)? {
            Some(w) => SemidiscreteStatus::RefutedWitness { witness: w, inference },
            None => match inference {
                Some(c) => SemidiscreteStatus::RefutedByInference(c),
                None => SemidiscreteStatus::NoRefutationUpToBudget,
            },
        }
    };

    // spectral table
    let spectral = {
        let (_, est) = with_depth_backoff(cfg.spectral_len, &mut notes, "spectral table", |d| {
            lower_spectral_estimate(gens, d, cfg.node_budget)
        })?;
        est
    };

    // pathological locus
    let in_p = if matches!(elementary, ElementaryStatus::NonElementary) {
        PStatus::No { reason: "not elementary".into() }
    } else if matches!(in_e, EllipticStatus::Witness(_)) {
        PStatus::No { reason: "the semigroup contains an elliptic or identity word".into() }
    } else if matches!(inverse_free, InverseFreeStatus::Violation(_)) {
        PStatus::No { reason: "the semigroup contains an inverse pair".into() }
    } else if certified_uh {
        PStatus::No { reason: "uniformly hyperbolic, hence semidiscrete".into() }
    } else if semidiscrete.refuted() {
        let mut evidence = vec![format!("elementary: {:?}", elementary)];
        evidence.push(match &in_e {
            EllipticStatus::CertifiedNo(_) => {
                "elliptic-free: exact certificate, all word lengths".into()
            }
            EllipticStatus::NoneUpToDepth(d) => format!("elliptic-free up to word length {d}"),
            EllipticStatus::Witness(_) => unreachable!(),
        });
        evidence.push(match &inverse_free {
            InverseFreeStatus::CertifiedFree(_) => {
                "inverse-free: exact certificate, all word lengths".into()
            }
            InverseFreeStatus::NoViolationUpToDepth(d) => {
                format!("no inverse pair up to word length {d}")
            }
            InverseFreeStatus::Violation(_) => unreachable!(),
        });
        evidence.push(match &semidiscrete {
            SemidiscreteStatus::RefutedWitness { witness, .. } => format!(
                "semidiscreteness refuted by a length-{} identity-approaching word",
                witness.word.len()
            ),
            SemidiscreteStatus::RefutedByInference(c) => format!(
                "semidiscreteness refuted by a backward limit point interior to the forward \
                 limit set (under {} recorded assumptions)",
                c.assumptions.len()
            ),
            SemidiscreteStatus::NoRefutationUpToBudget => unreachable!(),
        });
        PStatus::Yes { evidence }
    } else {
        PStatus::Unknown
    };

    let report = LociReport {
        generator_classes,
        elementary,
        in_h,
        in_e,
        inverse_free,
        semidiscrete,
        rank_one,
        in_p,
        spectral,
        cores,
        notes,
    };
    let verdict = sdc_crosscheck(&report);
    if !verdict.consistent {
        return Err(Error::PreconditionFailed(format!(
            "internal inconsistency in the assembled report: {:?}",
            verdict.violations
        )));
    }
    Ok(report)
}

/// Outcome of [`sdc_crosscheck`].
#[derive(Debug, Clone)]
pub struct ConsistencyVerdict {
    pub consistent: bool,
    /// Every rule evaluated, in order.
    pub rules_fired: Vec<String>,
    /// The subset that failed.
    pub violations: Vec<String>,
}

/// Check the mutual-exclusion rules between the loci: uniform hyperbolicity
/// excludes elliptic words, inverse pairs, and refuted semidiscreteness; the
/// pathological locus excludes uniform hyperbolicity and rank one, and
/// requires its four defining conditions. Rules about the pathological locus
/// are suppressed for pairs, whose classification is complete separately and
/// not covered by these exclusions.
pub fn sdc_crosscheck<T: Scalar>(report: &LociReport<T>) -> ConsistencyVerdict {
    let n = report.generator_classes.len();
    let mut rules_fired = Vec::new();
    let mut violations = Vec::new();
    let mut rule = |name: &str, ok: bool| {
        rules_fired.push(name.to_string());
        if !ok {
            violations.push(name.to_string());
        }
    };
    let uh = matches!(report.in_h, HyperbolicityStatus::CertifiedYes(_));
    let elliptic = matches!(report.in_e, EllipticStatus::Witness(_));
    let inverse = matches!(report.inverse_free, InverseFreeStatus::Violation(_));
    let refuted = report.semidiscrete.refuted();
    let in_p = matches!(report.in_p, PStatus::Yes { .. });

    rule("uniform hyperbolicity excludes elliptic words", !(uh && elliptic));
    rule("uniform hyperbolicity excludes inverse pairs", !(uh && inverse));
    rule(
        "uniform hyperbolicity implies semidiscreteness (no refutation may coexist)",
        !(uh && refuted),
    );
    if n != 2 {
        rule("pathological locus excludes uniform hyperbolicity", !(in_p && uh));
        rule(
            "pathological locus excludes rank one (rank one lies in the closure of the \
             principal hyperbolic component)",
            !(in_p && report.rank_one.is_some()),
        );
        rule(
            "pathological locus requires an elementary tuple",
            !in_p || !matches!(report.elementary, ElementaryStatus::NonElementary),
        );
        rule("pathological locus requires elliptic-freeness", !(in_p && elliptic));
        rule("pathological locus requires inverse-freeness", !(in_p && inverse));
        rule("pathological locus requires refuted semidiscreteness", !in_p || refuted);
    }
    ConsistencyVerdict { consistent: violations.is_empty(), rules_fired, violations }
}

fn real_json<T: Scalar>(x: T) -> Value {
    let v = x.to_f64().unwrap_or(f64::NAN);
    if !v.is_finite() || v.abs() >= 1e15 {
        json!("inf")
    } else {
        json!(v)
    }
}

fn witness_json<T: Scalar>(w: &WordWitness<T>) -> Value {
    json!({ "word": w.word.letters, "kind": serde_json::to_value(&w.kind).unwrap() })
}

fn inference_json<T: Scalar>(c: &NotSemidiscreteConclusion<T>) -> Value {
    json!({
        "point": real_json(c.point.to_real()),
        "fwd_word": c.fwd_word.letters,
        "bwd_word": c.bwd_word.letters,
        "assumptions": c.assumptions,
    })
}

impl<T: Scalar> LociReport<T> {
    /// Deterministic JSON rendering of the report.
    pub fn to_json(&self) -> Value {
        let elementary = match &self.elementary {
            ElementaryStatus::CommonBoundaryFixed(p) => {
                json!({ "kind": "CommonBoundaryFixed", "point": real_json(p.to_real()) })
            }
            ElementaryStatus::CommonInteriorFixed { x, y } => json!({
                "kind": "CommonInteriorFixed", "x": real_json(*x), "y": real_json(*y)
            }),
            ElementaryStatus::InvariantPair(p, q) => json!({
                "kind": "InvariantPair",
                "points": [real_json(p.to_real()), real_json(q.to_real())],
            }),
            ElementaryStatus::NonElementary => json!({ "kind": "NonElementary" }),
        };
        let in_h = match &self.in_h {
            HyperbolicityStatus::CertifiedYes(c) => json!({
                "status": "CertifiedYes",
                "multicone": serde_json::to_value(&c.multicone).unwrap(),
                "margin": c.margin.to_f64(),
                "word_depth_used": c.word_depth_used,
            }),
            HyperbolicityStatus::CertifiedNo(neg) => {
                let cert = match neg {
                    NegativeCertificate::EllipticWord(w) => {
                        json!({ "kind": "EllipticWord", "witness": witness_json(w) })
                    }
                    NegativeCertificate::IdentityApproach(w) => {
                        json!({ "kind": "IdentityApproach", "witness": witness_json(w) })
                    }
                    NegativeCertificate::LimitSetIntersection { point, fwd_word, bwd_word } => {
                        json!({
                            "kind": "LimitSetIntersection",
                            "point": real_json(point.to_real()),
                            "fwd_word": fwd_word.letters,
                            "bwd_word": bwd_word.letters,
                        })
                    }
                    NegativeCertificate::NonHyperbolicGenerator { index } => {
                        json!({ "kind": "NonHyperbolicGenerator", "index": index })
                    }
                };
                json!({ "status": "CertifiedNo", "certificate": cert })
            }
            HyperbolicityStatus::Unknown => json!({ "status": "Unknown" }),
        };
        let in_e = match &self.in_e {
            EllipticStatus::Witness(w) => {
                json!({ "status": "Witness", "witness": witness_json(w) })
            }
            EllipticStatus::CertifiedNo(c) => json!({
                "status": "CertifiedNo",
                "certificate": serde_json::to_value(c).unwrap(),
            }),
            EllipticStatus::NoneUpToDepth(d) => {
                json!({ "status": "NoneUpToDepth", "depth": d })
            }
        };
        let inverse_free = match &self.inverse_free {
            InverseFreeStatus::Violation(w) => {
                json!({ "status": "Violation", "witness": witness_json(w) })
            }
            InverseFreeStatus::CertifiedFree(c) => json!({
                "status": "CertifiedFree",
                "certificate": serde_json::to_value(c).unwrap(),
            }),
            InverseFreeStatus::NoViolationUpToDepth(d) => {
                json!({ "status": "NoViolationUpToDepth", "depth": d })
            }
        };
        let semidiscrete = match &self.semidiscrete {
            SemidiscreteStatus::RefutedWitness { witness, inference } => json!({
                "status": "RefutedWitness",
                "witness": witness_json(witness),
                "inference": inference.as_ref().map(inference_json),
            }),
            SemidiscreteStatus::RefutedByInference(c) => {
                json!({ "status": "RefutedByInference", "inference": inference_json(c) })
            }
            SemidiscreteStatus::NoRefutationUpToBudget => {
                json!({ "status": "NoRefutationUpToBudget" })
            }
        };
        let in_p = match &self.in_p {
            PStatus::Yes { evidence } => json!({ "status": "Yes", "evidence": evidence }),
            PStatus::No { reason } => json!({ "status": "No", "reason": reason }),
            PStatus::Unknown => json!({ "status": "Unknown" }),
        };
        json!({
            "schema_version": 1,
            "generator_classes": serde_json::to_value(&self.generator_classes).unwrap(),
            "elementary": elementary,
            "in_H": in_h,
            "in_E": in_e,
            "inverse_free": inverse_free,
            "semidiscrete": semidiscrete,
            "rank_one": self.rank_one.as_ref().map(|a| serde_json::to_value(a).unwrap()),
            "in_P": in_p,
            "spectral": self.spectral.as_ref().map(|s| serde_json::to_value(s).unwrap()),
            "notes": self.notes,
        })
    }
}
