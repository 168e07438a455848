//! End-to-end acceptance suite: ten independent criteria, each printed as a
//! single PASS/FAIL line with its runtime. Run with `--nocapture` to see the
//! table on success; it is printed automatically on failure.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mobius_semigroups::circle::{angle_dist, arc_image, BoundaryPoint};
use mobius_semigroups::classify::{
    classify, ClassifyConfig, EllipticStatus, HyperbolicityStatus, InverseFreeStatus, PStatus,
};
use mobius_semigroups::exact::{parse_rational, ExactAffine};
use mobius_semigroups::hyperbolicity::{
    find_multicone, jorgensen_check, lower_spectral_estimate, rank_one_test, verify_multicone,
    MulticoneConfig, MulticoneFailure, MulticoneOutcome,
};
use mobius_semigroups::limit_sets::{
    backward_limit_set, compute_cores, elementary_check, forward_limit_set, ls_inter_full_interval,
    nonsd_inference, CoreSide, ElementaryStatus, LimitSetApprox,
};
use mobius_semigroups::words::{
    certify_no_elliptic_affine, refute_semidiscrete, AffineCertOutcome, ExactAffineTuple,
    RefuteConfig, WitnessKind, DEFAULT_NODE_BUDGET,
};
use mobius_semigroups::Map as M;

type P = BoundaryPoint<f64>;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn run(name: &'static str, limit: Duration, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t0 = Instant::now();
    let (ok, detail) = f();
    let elapsed = t0.elapsed();
    let passed = ok && elapsed <= limit;
    let detail = if elapsed > limit {
        format!("{detail}; OVER TIME LIMIT {limit:?}")
    } else {
        detail
    };
    Outcome { name, passed, detail, elapsed }
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

fn uh_pair() -> Vec<M> {
    vec![M::affine(4.0, 0.0).unwrap(), M::new(5.0, 4.0, 4.0, 5.0).unwrap()]
}

fn c01_f0_end_to_end() -> (bool, String) {
    let gens = f0_gens();
    let mut fails = Vec::new();

    if !matches!(
        certify_no_elliptic_affine(&f0_exact()),
        Ok(AffineCertOutcome::Certified(_))
    ) {
        fails.push("exact certificate missing".to_string());
    }

    match refute_semidiscrete(&gens, Some(&f0_exact()), &RefuteConfig::default()) {
        Ok(Some(w)) => match w.kind {
            WitnessKind::IdentityApproach { distance } => {
                if w.word.len() > 9 || distance > 0.25 {
                    fails.push(format!(
                        "witness length {} distance {distance:.4}",
                        w.word.len()
                    ));
                }
            }
            other => fails.push(format!("witness kind {other:?}")),
        },
        other => fails.push(format!("no identity-approach witness: {other:?}")),
    }

    if !matches!(
        elementary_check(&gens),
        ElementaryStatus::CommonBoundaryFixed(p) if p.to_real().is_infinite()
    ) {
        fails.push("not elementary at infinity".into());
    }

    let sub = vec![gens[0].clone(), gens[1].clone()];
    let sub_fwd = forward_limit_set(&sub, 12, 0.02, DEFAULT_NODE_BUDGET).unwrap();
    let bwd = backward_limit_set(&gens, 6, 0.02, DEFAULT_NODE_BUDGET).unwrap();
    match nonsd_inference(&sub_fwd, &bwd, true, Some(6)) {
        Some(c) if c.point.dist(&P::from_real(1.0)) < 1e-6 => {}
        other => fails.push(format!("inference witness {other:?}")),
    }

    match classify(&gens, Some(&f0_exact()), &ClassifyConfig::quick()) {
        Ok(r) if matches!(r.in_p, PStatus::Yes { .. }) => {}
        _ => fails.push("not classified pathological".into()),
    }

    (fails.is_empty(), fails.join("; "))
}

fn c02_limit_hull() -> (bool, String) {
    let fwd = forward_limit_set(&hump_gens(), 14, 0.02, DEFAULT_NODE_BUDGET).unwrap();
    if fwd.hull.whole_circle || fwd.hull.components.len() != 1 {
        return (false, format!("{} hull components", fwd.hull.components.len()));
    }
    let h = &fwd.hull.components[0];
    let lo = P::from_real(2.0).theta();
    let ds = angle_dist(h.start, 0.0);
    let de = angle_dist(h.end, lo);
    (
        ds < 0.05 && de < 0.05,
        format!("endpoint errors {ds:.4}, {de:.4} rad"),
    )
}

fn c03_interval_filling() -> (bool, String) {
    let f = M::affine(0.5, 0.0).unwrap();
    let g_fill = M::affine(0.5, 0.5).unwrap();
    let g_gap = M::affine(1.0 / 3.0, 2.0 / 3.0).unwrap();
    let x = P::from_real(0.0);
    let y = P::from_real(1.0);
    let mut fails = Vec::new();

    if !ls_inter_full_interval(&f, &g_fill, x, y).unwrap() {
        fails.push("filling branch rejected".to_string());
    }
    let pts = |gens: &[M]| -> Vec<f64> {
        let l = forward_limit_set(gens, 12, 0.02, DEFAULT_NODE_BUDGET).unwrap();
        let mut xs: Vec<f64> = l
            .points
            .iter()
            .map(|p| p.point.to_real())
            .filter(|v| v.is_finite() && (-1e-9..=1.0 + 1e-9).contains(v))
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs
    };
    let xs = pts(&[f.clone(), g_fill.clone()]);
    let mut max_gap = xs[0].max(1.0 - xs[xs.len() - 1]);
    for w in xs.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    if max_gap >= 0.01 {
        fails.push(format!("fill gap {max_gap:.4}"));
    }

    if ls_inter_full_interval(&f, &g_gap, x, y).unwrap() {
        fails.push("gap branch accepted".into());
    }
    let xs = pts(&[f, g_gap]);
    let (mut lo, mut hi) = (0.0, 0.0);
    for w in xs.windows(2) {
        if w[1] - w[0] > hi - lo {
            lo = w[0];
            hi = w[1];
        }
    }
    if !(lo <= 0.56 && hi >= 0.61) {
        fails.push(format!("gap ({lo:.3}, {hi:.3}) misses (0.55, 0.62)"));
    }
    (fails.is_empty(), fails.join("; "))
}

fn growth_slope(gens: &[M]) -> f64 {
    let est = lower_spectral_estimate(gens, 8, DEFAULT_NODE_BUDGET).unwrap();
    // least-squares slope of ln(min norm at length L) against L
    let pts: Vec<(f64, f64)> = est
        .per_length
        .iter()
        .map(|&(l, root)| (l as f64, l as f64 * root.ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn c04_multicone_soundness() -> (bool, String) {
    let mut fails = Vec::new();
    let mut detail = Vec::new();
    for (name, gens, expect_components) in [
        ("diagonal", vec![M::affine(2.0, 0.0).unwrap(), M::affine(3.0, 0.0).unwrap()], 1usize),
        ("crossed", uh_pair(), 1),
    ] {
        match find_multicone(&gens, &MulticoneConfig::default()) {
            Ok(MulticoneOutcome::Certified(c)) => {
                detail.push(format!("{name}: {} component(s)", c.multicone.len()));
                if c.multicone.len() != expect_components {
                    fails.push(format!(
                        "{name}: {} components, expected {expect_components}",
                        c.multicone.len()
                    ));
                }
                if !verify_multicone(&gens, &c) {
                    fails.push(format!("{name}: verification failed"));
                }
                let slope = growth_slope(&gens);
                detail.push(format!("{name} slope {slope:.3}"));
                if slope <= 0.05 {
                    fails.push(format!("{name}: growth slope {slope:.4}"));
                }
            }
            other => fails.push(format!("{name}: {other:?}")),
        }
    }
    (fails.is_empty(), if fails.is_empty() { detail.join("; ") } else { fails.join("; ") })
}

fn c05_negative_certification() -> (bool, String) {
    let mut fails = Vec::new();
    for (name, gens) in [("triplet", f0_gens()), ("pair", hump_gens())] {
        match find_multicone(&gens, &MulticoneConfig::default()) {
            Ok(MulticoneOutcome::Failure(MulticoneFailure::LimitSetsTouch { point, .. }))
                if point.to_real().is_infinite() => {}
            other => fails.push(format!("{name}: {other:?}")),
        }
        match classify(&gens, None, &ClassifyConfig::quick()) {
            Ok(r) if matches!(r.in_h, HyperbolicityStatus::CertifiedNo(_)) => {}
            _ => fails.push(format!("{name}: not certified-no")),
        }
    }
    (fails.is_empty(), fails.join("; "))
}

fn c06_trace_bound_and_rank_one() -> (bool, String) {
    let mut fails = Vec::new();
    let gens = hump_gens();
    let (value, satisfied) = jorgensen_check(&gens[0], &gens[1]);
    if (value - 0.5).abs() > 1e-9 || satisfied {
        fails.push(format!("bound value {value}"));
    }
    if rank_one_test(&gens).is_none() {
        fails.push("no invariant interval for the violating pair".into());
    }
    let f = M::new(10.0, 12.0, 3.0, 10.0).unwrap();
    let g = M::new(5.0, -3.0, -3.0, 5.0).unwrap();
    if rank_one_test(&[f, g]).is_some() {
        fails.push("antiparallel pair reported an invariant interval".into());
    }
    (fails.is_empty(), fails.join("; "))
}

fn random_map(rng: &mut ChaCha8Rng) -> M {
    loop {
        let a = rng.gen_range(-3.0..3.0);
        let b = rng.gen_range(-3.0..3.0);
        let c = rng.gen_range(-3.0..3.0);
        let d = rng.gen_range(-3.0..3.0);
        if a * d - b * c > 0.05 {
            return M::new(a, b, c, d).unwrap();
        }
    }
}

fn c07_commutator_trace() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_c07);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        // conjugating two affine maps by the same map gives a pair with a
        // common boundary fixed point
        let m = random_map(&mut rng);
        let a1 = M::affine(rng.gen_range(0.2..5.0), rng.gen_range(-2.0..2.0)).unwrap();
        let a2 = M::affine(rng.gen_range(0.2..5.0), rng.gen_range(-2.0..2.0)).unwrap();
        let h = a1.conjugate_by(&m);
        let k = a2.conjugate_by(&m);
        let t = h.commutator(&k).trace_abs();
        worst = worst.max((t - 2.0).abs());
    }
    if worst > 1e-9 {
        return (false, format!("worst |tr|-2 deviation {worst:.3e}"));
    }

    // exact rational check of the commutator's translation amount
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_c08);
    for _ in 0..200 {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let a = q(rng.gen_range(1..20), rng.gen_range(1..10));
        let b = q(rng.gen_range(-15..15), rng.gen_range(1..10));
        let c = q(rng.gen_range(1..20), rng.gen_range(1..10));
        let d = q(rng.gen_range(-15..15), rng.gen_range(1..10));
        let h = ExactAffine::new(a.clone(), b.clone()).unwrap();
        let k = ExactAffine::new(c.clone(), d.clone()).unwrap();
        let h_inv = ExactAffine::new(BigRational::one() / &a, -&b / &a).unwrap();
        let k_inv = ExactAffine::new(BigRational::one() / &c, -&d / &c).unwrap();
        let comm = h.compose(&k).compose(&h_inv).compose(&k_inv);
        let expected = (&a - BigRational::one()) * &d - (&c - BigRational::one()) * &b;
        if !comm.lambda_value().is_one() || comm.kappa != expected {
            return (false, format!("commutator mismatch at a={a} b={b} c={c} d={d}"));
        }
    }
    (true, format!("worst float deviation {worst:.2e}"))
}

fn c08_spectral_tables() -> (bool, String) {
    let mut fails = Vec::new();
    let est = lower_spectral_estimate(
        &[M::affine(2.0, 0.0).unwrap(), M::affine(3.0, 0.0).unwrap()],
        8,
        DEFAULT_NODE_BUDGET,
    )
    .unwrap();
    for (l, root) in &est.per_length {
        if (root - 2.0_f64.sqrt()).abs() > 1e-9 {
            fails.push(format!("diagonal pair length {l} root {root}"));
        }
    }
    let est = lower_spectral_estimate(
        &[M::affine(2.0, 0.0).unwrap(), M::affine(0.5, 0.0).unwrap()],
        2,
        DEFAULT_NODE_BUDGET,
    )
    .unwrap();
    if (est.per_length[1].1 - 1.0).abs() > 1e-12 {
        fails.push(format!("cancelling pair root {}", est.per_length[1].1));
    }
    let est = lower_spectral_estimate(&f0_gens(), 9, DEFAULT_NODE_BUDGET).unwrap();
    let root9 = est.per_length[8].1;
    if root9 > 1.02 {
        fails.push(format!("triplet length-9 root {root9}"));
    }
    (fails.is_empty(), if fails.is_empty() { format!("triplet root(9) = {root9:.5}") } else { fails.join("; ") })
}

fn random_uh_pair(rng: &mut ChaCha8Rng) -> Option<Vec<M>> {
    let g1 = M::affine(rng.gen_range(1.5..4.0), 0.0).unwrap().conjugate_by(&random_map(rng));
    let g2 = M::affine(rng.gen_range(1.5..4.0), 0.0).unwrap().conjugate_by(&random_map(rng));
    let gens = vec![g1, g2];
    match find_multicone(&gens, &MulticoneConfig::default()) {
        Ok(MulticoneOutcome::Certified(c)) if verify_multicone(&gens, &c) => Some(gens),
        _ => None,
    }
}

fn core_invariants(gens: &[M], gap: f64) -> Vec<String> {
    let mut fails = Vec::new();
    let fwd = match forward_limit_set(gens, 8, gap, DEFAULT_NODE_BUDGET) {
        Ok(f) => f,
        Err(e) => return vec![format!("forward limit set: {e}")],
    };
    let bwd = match backward_limit_set(gens, 8, gap, DEFAULT_NODE_BUDGET) {
        Ok(b) => b,
        Err(e) => return vec![format!("backward limit set: {e}")],
    };
    let cores = match compute_cores(&fwd, &bwd) {
        Ok(c) => c,
        Err(e) => return vec![format!("cores: {e}")],
    };
    let tol = 2.0 * gap;

    let side_checks = |side: &CoreSide<f64>, own: &LimitSetApprox<f64>, label: &str,
                       fails: &mut Vec<String>| {
        let arcs = match &side.arcs {
            Some(u) => u,
            None => return,
        };
        // core boundary points are near the limit set
        for a in arcs.arcs() {
            for p in [a.start(), a.end()] {
                let near = own.points.iter().any(|lp| lp.point.dist(&p) <= tol);
                if !near {
                    fails.push(format!("{label}: core endpoint far from the limit set"));
                }
            }
        }
        // the hull is contained in the core
        if let Ok(hull) = own.hull.to_arc_union(1e-9) {
            for a in hull.arcs() {
                for p in [a.start(), a.end(), a.midpoint()] {
                    if !arcs.contains_closed(p, tol) {
                        fails.push(format!("{label}: hull escapes the core"));
                    }
                }
            }
        }
    };
    side_checks(&cores.forward, &fwd, "forward", &mut fails);
    side_checks(&cores.backward, &bwd, "backward", &mut fails);

    // forward invariance of C+ under every generator, within gap
    if let Some(cf) = &cores.forward.arcs {
        for g in gens {
            for a in cf.arcs() {
                match arc_image(g, a) {
                    Ok(img) => {
                        for p in [img.start(), img.end(), img.midpoint()] {
                            if !cf.contains_closed(p, tol) {
                                fails.push("forward core not invariant".into());
                            }
                        }
                    }
                    Err(_) => {}
                }
            }
        }
    }
    // backward invariance of C- under every inverse
    if let Some(cb) = &cores.backward.arcs {
        for g in gens {
            let gi = g.inverse();
            for a in cb.arcs() {
                match arc_image(&gi, a) {
                    Ok(img) => {
                        for p in [img.start(), img.end(), img.midpoint()] {
                            if !cb.contains_closed(p, tol) {
                                fails.push("backward core not invariant".into());
                            }
                        }
                    }
                    Err(_) => {}
                }
            }
        }
    }
    // both cores have finitely many components, both nonempty
    if let (Some(cf), Some(cb)) = (&cores.forward.arcs, &cores.backward.arcs) {
        if cf.is_empty() || cb.is_empty() {
            fails.push("empty core".into());
        }
    }
    fails.dedup();
    fails
}

fn c09_core_invariants() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_c09);
    let mut tuples: Vec<Vec<M>> = vec![hump_gens()];
    let mut attempts = 0;
    while tuples.len() < 21 && attempts < 500 {
        attempts += 1;
        if let Some(gens) = random_uh_pair(&mut rng) {
            tuples.push(gens);
        }
    }
    if tuples.len() < 21 {
        return (false, format!("only {} certified tuples generated", tuples.len() - 1));
    }
    let mut fails = Vec::new();
    for (i, gens) in tuples.iter().enumerate() {
        let errs = core_invariants(gens, 0.02);
        if !errs.is_empty() {
            fails.push(format!("tuple {i}: {}", errs.join(", ")));
        }
    }
    (
        fails.is_empty(),
        if fails.is_empty() {
            format!("20 random certified tuples + the cancelling pair")
        } else {
            fails.join("; ")
        },
    )
}

fn corpus(seed: u64, count: usize) -> Vec<Vec<M>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = 2 + i % 2;
            (0..n).map(|_| random_map(&mut rng)).collect()
        })
        .collect()
}

fn certified_consistent(quick: &str, thorough: &str) -> bool {
    // a certified status may not flip; open statuses may resolve
    match quick {
        "CertifiedYes" | "CertifiedNo" | "Witness" | "Violation" | "CertifiedFree" => {
            quick == thorough
        }
        _ => true,
    }
}

fn c10_classifier_corpus() -> (bool, String) {
    let tuples = corpus(0xc0_c10, 200);
    let quick = ClassifyConfig::quick();
    let thorough = ClassifyConfig::thorough();
    let mut fails = Vec::new();
    for (i, gens) in tuples.iter().enumerate() {
        let rq = match classify(gens, None, &quick) {
            Ok(r) => r,
            Err(e) => {
                fails.push(format!("tuple {i} quick: {e}"));
                continue;
            }
        };
        let rt = match classify(gens, None, &thorough) {
            Ok(r) => r,
            Err(e) => {
                fails.push(format!("tuple {i} thorough: {e}"));
                continue;
            }
        };
        let tag_h = |r: &HyperbolicityStatus<f64>| match r {
            HyperbolicityStatus::CertifiedYes(_) => "CertifiedYes",
            HyperbolicityStatus::CertifiedNo(_) => "CertifiedNo",
            HyperbolicityStatus::Unknown => "Unknown",
        };
        let tag_e = |r: &EllipticStatus<f64>| match r {
            EllipticStatus::Witness(_) => "Witness",
            EllipticStatus::CertifiedNo(_) => "CertifiedNo",
            EllipticStatus::NoneUpToDepth(_) => "NoneUpToDepth",
        };
        let tag_i = |r: &InverseFreeStatus<f64>| match r {
            InverseFreeStatus::Violation(_) => "Violation",
            InverseFreeStatus::CertifiedFree(_) => "CertifiedFree",
            InverseFreeStatus::NoViolationUpToDepth(_) => "NoViolationUpToDepth",
        };
        for (label, a, b) in [
            ("in_H", tag_h(&rq.in_h), tag_h(&rt.in_h)),
            ("in_E", tag_e(&rq.in_e), tag_e(&rt.in_e)),
            ("inverse_free", tag_i(&rq.inverse_free), tag_i(&rt.inverse_free)),
        ] {
            if !certified_consistent(a, b) {
                fails.push(format!("tuple {i} {label}: {a} -> {b}"));
            }
        }
    }
    (
        fails.is_empty(),
        if fails.is_empty() { "200 tuples, both presets".into() } else { fails.join("; ") },
    )
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let outcomes = vec![
        run("01 affine triplet end to end", secs(10), c01_f0_end_to_end),
        run("02 limit hull of the cancelling pair is [2, inf]", secs(5), c02_limit_hull),
        run("03 interval filling criterion, both branches", secs(5), c03_interval_filling),
        run("04 multicone soundness and norm growth", secs(10), c04_multicone_soundness),
        run("05 negative certification at touching limit sets", secs(5), c05_negative_certification),
        run("06 trace bound coheres with rank one", secs(5), c06_trace_bound_and_rank_one),
        run("07 commutator trace of common-fixed-point pairs", secs(30), c07_commutator_trace),
        run("08 lower spectral radius tables", secs(10), c08_spectral_tables),
        run("09 core invariants on certified tuples", secs(120), c09_core_invariants),
        run("10 classifier corpus crosscheck and monotonicity", secs(300), c10_classifier_corpus),
    ];
    let mut all = true;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        let mut line = format!("{status}  criterion {}  [{:.2?}]", o.name, o.elapsed);
        if !o.detail.is_empty() {
            line.push_str(&format!("  ({})", o.detail));
        }
        println!("{line}");
        all &= o.passed;
    }
    assert!(all, "some acceptance criteria failed; see the table above");
}
