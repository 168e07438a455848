//! Scripted reproduction scenarios: each runs a fixed computation on a
//! pinned tuple and checks the results against frozen expectations, yielding
//! a pass/fail table plus the data needed to draw the matching figure.

use crate::circle::{angle_dist, ArcUnion, BoundaryPoint};
use crate::classify::{classify, ClassifyConfig, HyperbolicityStatus, PStatus};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, ExactAffine};
use crate::hyperbolicity::{
    find_multicone, jorgensen_check, rank_one_test, MulticoneConfig, MulticoneFailure,
    MulticoneOutcome,
};
use crate::limit_sets::{
    backward_limit_set, compute_cores, elementary_check, forward_limit_set, ls_inter_full_interval,
    nonsd_inference, ElementaryStatus, LimitSetApprox,
};
use crate::moebius::MoebiusMap;
use crate::words::{
    certify_no_elliptic_affine, refute_semidiscrete, AffineCertOutcome, ExactAffineTuple,
    RefuteConfig, WitnessKind, DEFAULT_NODE_BUDGET,
};

type M = MoebiusMap<f64>;
type P = BoundaryPoint<f64>;

/// One named expectation with its outcome.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a figure needs: the generators (axes), highlighted arc unions,
/// and marked boundary points.
#[derive(Debug, Clone, Default)]
pub struct Figure {
    pub gens: Vec<M>,
    pub unions: Vec<ArcUnion<f64>>,
    pub points: Vec<P>,
}

/// The result of one scenario run.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub scenario: String,
    pub checks: Vec<Check>,
    pub figure: Figure,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Plain-text pass/fail table.
    pub fn render_table(&self) -> String {
        let mut out = format!("scenario: {}\n", self.scenario);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {}", c.name));
            if !c.detail.is_empty() {
                out.push_str(&format!("  ({})", c.detail));
            }
            out.push('\n');
        }
        out
    }
}

pub const SCENARIO_NAMES: [&str; 7] = [
    "f0",
    "hump",
    "limitset",
    "ls-inter",
    "jorgensen-rank1",
    "antiparallel",
    "cores",
];

/// Run a scenario by name.
pub fn run_scenario(name: &str) -> Result<CheckReport> {
    match name {
        "f0" => scenario_f0(),
        "hump" => scenario_hump(),
        "limitset" => scenario_limitset(),
        "ls-inter" => scenario_ls_inter(),
        "jorgensen-rank1" => scenario_jorgensen_rank1(),
        "antiparallel" => scenario_antiparallel(),
        "cores" => scenario_cores(),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_string(), passed, detail }
}

fn aff(l: &str, k: &str) -> ExactAffine {
    ExactAffine::new(parse_rational(l).unwrap(), parse_rational(k).unwrap()).unwrap()
}

fn f0_gens() -> Vec<M> {
    vec![
        M::affine(2.0, 1.0).unwrap(),
        M::affine(1.0 / 3.0, 0.0).unwrap(),
        M::affine(5.0, -4.0).unwrap(),
    ]
}

fn f0_exact() -> ExactAffineTuple {
    ExactAffineTuple::new(vec![aff("2", "1"), aff("1/3", "0"), aff("5", "-4")]).unwrap()
}

fn hump_gens() -> Vec<M> {
    vec![M::affine(2.0, 0.0).unwrap(), M::affine(0.5, 1.0).unwrap()]
}

fn scenario_f0() -> Result<CheckReport> {
    let gens = f0_gens();
    let exact = f0_exact();
    let mut checks = Vec::new();

    let certified = matches!(certify_no_elliptic_affine(&exact)?, AffineCertOutcome::Certified(_));
    checks.push(check(
        "exact certificate: no elliptic element or identity at any word length",
        certified,
        String::new(),
    ));

    let witness = refute_semidiscrete(&gens, Some(&exact), &RefuteConfig::default())?;
    let (ok, detail) = match &witness {
        Some(w) => match w.kind {
            WitnessKind::IdentityApproach { distance } => (
                w.word.len() <= 9 && distance <= 0.25,
                format!("length {} at distance {distance:.4}", w.word.len()),
            ),
            _ => (false, format!("unexpected witness kind {:?}", w.kind)),
        },
        None => (false, "no witness found".into()),
    };
    checks.push(check(
        "identity-approaching word of length <= 9 at distance <= 0.25",
        ok,
        detail,
    ));

    let elem = elementary_check(&gens);
    let elem_ok = matches!(&elem, ElementaryStatus::CommonBoundaryFixed(p) if p.to_real().is_infinite());
    checks.push(check(
        "elementary with common fixed point at infinity",
        elem_ok,
        String::new(),
    ));

    // the sub-pair (g1, g2) has forward hull [0, inf]; the backward limit
    // point 1 (fixed by the inverse of the third generator) is interior
    let sub = vec![gens[0].clone(), gens[1].clone()];
    let sub_fwd = forward_limit_set(&sub, 12, 0.02, DEFAULT_NODE_BUDGET)?;
    let bwd = backward_limit_set(&gens, 6, 0.02, DEFAULT_NODE_BUDGET)?;
    let conclusion = nonsd_inference(&sub_fwd, &bwd, true, Some(6));
    let (ok, detail, wpoint) = match &conclusion {
        Some(c) => (
            c.point.dist(&P::from_real(1.0)) < 1e-6,
            format!("witness point {}", c.point.to_real()),
            Some(c.point),
        ),
        None => (false, "inference did not fire".into(), None),
    };
    checks.push(check("non-semidiscreteness inference fires at the point 1", ok, detail));

    let report = classify(&gens, Some(&f0_exact()), &ClassifyConfig::quick())?;
    checks.push(check(
        "classified in the pathological locus",
        matches!(report.in_p, PStatus::Yes { .. }),
        String::new(),
    ));

    let mut unions = Vec::new();
    if let Ok(u) = sub_fwd.hull.to_arc_union(1e-9) {
        unions.push(u);
    }
    let mut points = vec![];
    if let Some(p) = wpoint {
        points.push(p);
    }
    Ok(CheckReport {
        scenario: "f0".into(),
        checks,
        figure: Figure { gens, unions, points },
    })
}

fn scenario_hump() -> Result<CheckReport> {
    let gens = hump_gens();
    let mut checks = Vec::new();

    let outcome = find_multicone(&gens, &MulticoneConfig::default())?;
    let (ok, point) = match &outcome {
        MulticoneOutcome::Failure(MulticoneFailure::LimitSetsTouch { point, .. }) => {
            (point.to_real().is_infinite(), Some(*point))
        }
        _ => (false, None),
    };
    checks.push(check(
        "multicone search refutes separation: limit sets touch at infinity",
        ok,
        String::new(),
    ));

    let report = classify(&gens, None, &ClassifyConfig::quick())?;
    checks.push(check(
        "classifier marks the tuple outside the uniformly hyperbolic locus",
        matches!(report.in_h, HyperbolicityStatus::CertifiedNo(_)),
        String::new(),
    ));

    let refuted = refute_semidiscrete(&gens, None, &RefuteConfig::default())?;
    checks.push(check(
        "no identity-approaching word below the threshold (the pair is semidiscrete)",
        refuted.is_none(),
        String::new(),
    ));

    let fwd = forward_limit_set(&gens, 12, 0.02, DEFAULT_NODE_BUDGET)?;
    let mut unions = Vec::new();
    if let Ok(u) = fwd.hull.to_arc_union(1e-9) {
        unions.push(u);
    }
    let points = point.into_iter().collect();
    Ok(CheckReport {
        scenario: "hump".into(),
        checks,
        figure: Figure { gens, unions, points },
    })
}

fn scenario_limitset() -> Result<CheckReport> {
    let gens = hump_gens();
    let mut checks = Vec::new();
    let fwd = forward_limit_set(&gens, 14, 0.02, DEFAULT_NODE_BUDGET)?;
    let single = !fwd.hull.whole_circle && fwd.hull.components.len() == 1;
    checks.push(check(
        "forward limit hull is a single arc",
        single,
        format!("{} components", fwd.hull.components.len()),
    ));
    if single {
        let h = &fwd.hull.components[0];
        // expected arc of [2, inf]: from the angle of infinity (0) to the
        // angle of 2, sweeping through the reals above 2
        let lo = P::from_real(2.0).theta();
        let hi = 0.0;
        let ok = angle_dist(h.start, hi) < 0.05 && angle_dist(h.end, lo) < 0.05;
        checks.push(check(
            "hull endpoints within 0.05 rad of the arc of [2, inf]",
            ok,
            format!("start {:.4} (expected {hi:.4}), end {:.4} (expected {lo:.4})", h.start, h.end),
        ));
    } else {
        checks.push(check(
            "hull endpoints within 0.05 rad of the arc of [2, inf]",
            false,
            "hull not a single arc".into(),
        ));
    }
    let mut unions = Vec::new();
    if let Ok(u) = fwd.hull.to_arc_union(1e-9) {
        unions.push(u);
    }
    Ok(CheckReport {
        scenario: "limitset".into(),
        checks,
        figure: Figure { gens, unions, points: vec![P::from_real(2.0), P::infinity()] },
    })
}

/// Real limit points of an affine contracting pair inside [0, 1], sorted.
fn unit_interval_points(lims: &LimitSetApprox<f64>) -> Vec<f64> {
    let mut xs: Vec<f64> = lims
        .points
        .iter()
        .map(|lp| lp.point.to_real())
        .filter(|x| x.is_finite() && (-1e-9..=1.0 + 1e-9).contains(x))
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs
}

fn scenario_ls_inter() -> Result<CheckReport> {
    let mut checks = Vec::new();
    let f = M::affine(0.5, 0.0).unwrap();
    let g_fill = M::affine(0.5, 0.5).unwrap();
    let g_gap = M::affine(1.0 / 3.0, 2.0 / 3.0).unwrap();
    let x = P::from_real(0.0);
    let y = P::from_real(1.0);

    checks.push(check(
        "filling branch: g(x) <= f(y) so the limit set is all of [0, 1]",
        ls_inter_full_interval(&f, &g_fill, x, y)?,
        String::new(),
    ));

    let pair = vec![f.clone(), g_fill.clone()];
    let fwd = forward_limit_set(&pair, 12, 0.02, DEFAULT_NODE_BUDGET)?;
    let xs = unit_interval_points(&fwd);
    let mut max_gap: f64 = xs.first().copied().unwrap_or(1.0); // gap from 0
    for w in xs.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    max_gap = max_gap.max(1.0 - xs.last().copied().unwrap_or(0.0));
    checks.push(check(
        "depth-12 approximation fills [0, 1] within 0.01",
        max_gap < 0.01,
        format!("largest gap {max_gap:.5}"),
    ));

    checks.push(check(
        "gap branch: g(x) > f(y) so a gap remains",
        !ls_inter_full_interval(&f, &g_gap, x, y)?,
        String::new(),
    ));

    let pair = vec![f.clone(), g_gap.clone()];
    let fwd_gap = forward_limit_set(&pair, 12, 0.02, DEFAULT_NODE_BUDGET)?;
    let xs = unit_interval_points(&fwd_gap);
    let mut gap_lo = 0.0;
    let mut gap_hi = 0.0;
    for w in xs.windows(2) {
        if w[1] - w[0] > gap_hi - gap_lo {
            gap_lo = w[0];
            gap_hi = w[1];
        }
    }
    checks.push(check(
        "largest detected gap contains (0.55, 0.62)",
        gap_lo <= 0.55 + 0.01 && gap_hi >= 0.62 - 0.01,
        format!("gap ({gap_lo:.4}, {gap_hi:.4})"),
    ));

    let mut unions = Vec::new();
    if let Ok(u) = fwd_gap.hull.to_arc_union(1e-9) {
        unions.push(u);
    }
    Ok(CheckReport {
        scenario: "ls-inter".into(),
        checks,
        figure: Figure { gens: vec![f, g_gap], unions, points: vec![x, y] },
    })
}

fn scenario_jorgensen_rank1() -> Result<CheckReport> {
    let gens = hump_gens();
    let mut checks = Vec::new();

    let (value, satisfied) = jorgensen_check(&gens[0], &gens[1]);
    checks.push(check(
        "the pair violates the semigroup trace bound with value 1/2",
        (value - 0.5).abs() < 1e-9 && !satisfied,
        format!("value {value:.4}"),
    ));

    let j = rank_one_test(&gens);
    checks.push(check(
        "an invariant interval exists (rank one), explaining the violation",
        j.is_some(),
        match &j {
            Some(a) => format!(
                "interval ({}, {})",
                a.end().to_real(),
                a.start().to_real()
            ),
            None => String::new(),
        },
    ));

    // a pair satisfying the bound for contrast
    let f = M::affine(4.0, 0.0).unwrap();
    let t = M::affine(1.0, 1.0).unwrap();
    let (v2, ok2) = jorgensen_check(&f, &t);
    checks.push(check(
        "a non-rank-one style pair satisfies the bound",
        ok2 && (v2 - 2.25).abs() < 1e-9,
        format!("value {v2:.4}"),
    ));

    let unions = j.iter().map(|a| ArcUnion::single(a.clone())).collect();
    Ok(CheckReport {
        scenario: "jorgensen-rank1".into(),
        checks,
        figure: Figure { gens, unions, points: vec![] },
    })
}

fn scenario_antiparallel() -> Result<CheckReport> {
    let f = M::new(10.0, 12.0, 3.0, 10.0).unwrap();
    let g = M::new(5.0, -3.0, -3.0, 5.0).unwrap();
    let mut checks = Vec::new();
    checks.push(check(
        "both maps are hyperbolic",
        f.class() == crate::moebius::MapClass::Hyperbolic
            && g.class() == crate::moebius::MapClass::Hyperbolic,
        String::new(),
    ));
    checks.push(check(
        "no common strictly invariant interval (rank-one test returns none)",
        rank_one_test(&[f.clone(), g.clone()]).is_none(),
        String::new(),
    ));
    checks.push(check(
        "the antiparallel predicate holds",
        crate::hyperbolicity::antiparallel_check(&f, &g)?,
        String::new(),
    ));
    Ok(CheckReport {
        scenario: "antiparallel".into(),
        checks,
        figure: Figure { gens: vec![f, g], unions: vec![], points: vec![] },
    })
}

fn scenario_cores() -> Result<CheckReport> {
    let gens = hump_gens();
    let mut checks = Vec::new();
    let fwd = forward_limit_set(&gens, 12, 0.02, DEFAULT_NODE_BUDGET)?;
    let bwd = backward_limit_set(&gens, 12, 0.02, DEFAULT_NODE_BUDGET)?;
    let cores = compute_cores(&fwd, &bwd)?;

    let cf = cores.forward.arcs.clone();
    let fwd_ok = match &cf {
        Some(u) => {
            u.len() == 1 && u.contains(P::from_real(5.0)) && !u.contains(P::from_real(0.0))
        }
        None => false,
    };
    checks.push(check(
        "forward core is a single arc around [2, inf]",
        fwd_ok,
        String::new(),
    ));

    let cb = cores.backward.arcs.clone();
    let bwd_ok = cb.as_ref().map_or(false, |u| u.contains(P::from_real(-1.0)));
    checks.push(check("backward core covers the negative reals", bwd_ok, String::new()));

    let disjoint = match (&cf, &cb) {
        (Some(a), Some(b)) => [-5.0, -1.0, 3.0, 10.0].iter().all(|&x| {
            let p = P::from_real(x);
            !(a.contains(p) && b.contains(p))
        }),
        _ => false,
    };
    checks.push(check("core interiors are disjoint", disjoint, String::new()));

    let mut unions = Vec::new();
    if let Some(u) = cf {
        unions.push(u);
    }
    if let Some(u) = cb {
        unions.push(u);
    }
    Ok(CheckReport {
        scenario: "cores".into(),
        checks,
        figure: Figure { gens, unions, points: vec![] },
    })
}
