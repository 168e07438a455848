//! Command-line front end: tuple ingestion, certification and exploration
//! subcommands, JSON/CSV/SVG output, and one-shot scenario reproduction.
//!
//! Exit codes: 0 success, 1 failed checks (reproduce), 2 input/parse error,
//! 3 budget exhaustion with a partial report.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mobius_semigroups::circle::ArcUnion;
use mobius_semigroups::classify::{classify, ClassifyConfig};
use mobius_semigroups::error::Error;
use mobius_semigroups::hyperbolicity::{
    find_multicone, lower_spectral_estimate, verify_multicone, MulticoneConfig, MulticoneFailure,
    MulticoneOutcome,
};
use mobius_semigroups::limit_sets::{backward_limit_set, forward_limit_set, LimitSetApprox};
use mobius_semigroups::scenarios::{run_scenario, SCENARIO_NAMES};
use mobius_semigroups::svg::render_figure;
use mobius_semigroups::tuple_io::{parse_tuple_str, ParsedTuple};
use mobius_semigroups::words::{
    find_elliptic_or_identity, inverse_free_violation, refute_semidiscrete, RefuteConfig,
    WordWitness, DEFAULT_NODE_BUDGET,
};
#[derive(Parser)]
#[command(
    name = "mobius-semigroups",
    about = "Certify and explore finitely generated semigroups of real Mobius transformations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BudgetPreset {
    Quick,
    Thorough,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Forward,
    Backward,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a tuple into the parameter loci and write a full report.
    Classify {
        /// Tuple file: one map per line, `a b c d` for z -> (az+b)/(cz+d).
        tuple: PathBuf,
        #[arg(long, value_enum, default_value = "quick")]
        budget_preset: BudgetPreset,
        /// Output path for the JSON report (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for an invariant multicone certifying uniform hyperbolicity.
    Certify {
        tuple: PathBuf,
        /// Fixed points of words up to this length seed the multicone.
        #[arg(long, default_value_t = 6)]
        seed_depth: usize,
        /// Iteration cap per seed radius.
        #[arg(long, default_value_t = 64)]
        max_iter: usize,
        /// Certification margin in radians.
        #[arg(long, default_value_t = 1e-7)]
        margin: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Approximate forward/backward limit sets and their hulls.
    LimitSet {
        tuple: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        side: Side,
        /// Word depth of the approximation.
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Angular clustering gap for the hull.
        #[arg(long, default_value_t = 0.02)]
        gap: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write an SVG figure of the hulls and generator axes.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Word searches: elliptic/identity witnesses, inverse pairs, and
    /// identity-approaching words.
    Explore {
        tuple: PathBuf,
        /// Maximum word length.
        #[arg(long, default_value_t = 10)]
        max_len: usize,
        /// Beam width of the identity-approach search.
        #[arg(long, default_value_t = 512)]
        beam: usize,
        /// Identity-approach distance threshold.
        #[arg(long, default_value_t = 0.25)]
        threshold: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Per-length lower spectral radius table as CSV.
    Spectral {
        tuple: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-run a scripted scenario and print its pass/fail table.
    Reproduce {
        /// One of: f0, hump, limitset, ls-inter, jorgensen-rank1,
        /// antiparallel, cores.
        name: String,
        /// Output path for the matching SVG figure.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Parse { .. } | Error::EmptyInput | Error::UnknownScenario(_) => EXIT_PARSE,
                Error::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_PARSE,
            };
            ExitCode::from(code)
        }
    }
}

fn load_tuple(path: &PathBuf) -> Result<ParsedTuple, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_tuple_str(&text)
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, content).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn witness_json(w: &WordWitness<f64>) -> Value {
    let (a, b, c, d) = w.product.coeffs();
    let mut v = json!({
        "kind": serde_json::to_value(&w.kind).unwrap(),
        "letters": w.word.letters,
        "matrix": [[a, b], [c, d]],
    });
    if let mobius_semigroups::words::WitnessKind::IdentityApproach { distance } = w.kind {
        v["distance"] = json!(distance);
    }
    v
}

fn limit_set_json(l: &LimitSetApprox<f64>) -> Value {
    let hull: Value = if l.hull.whole_circle {
        json!("whole-circle")
    } else {
        match l.hull.to_arc_union(1e-9) {
            Ok(u) => serde_json::to_value(&u).unwrap(),
            Err(_) => json!(null),
        }
    };
    json!({
        "depth": l.depth,
        "gap": l.gap,
        "method": format!("{:?}", l.method),
        "point_count": l.points.len(),
        "hull": hull,
    })
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Classify { tuple, budget_preset, output } => {
            let parsed = load_tuple(&tuple)?;
            let cfg = match budget_preset {
                BudgetPreset::Quick => ClassifyConfig::quick(),
                BudgetPreset::Thorough => ClassifyConfig::thorough(),
            };
            let report = classify(&parsed.maps, parsed.exact.as_ref(), &cfg)?;
            let j = report.to_json();
            emit(&output, &serde_json::to_string_pretty(&j).unwrap())?;
            let budget_hit = report.notes.iter().any(|n| n.contains("budget exceeded"));
            Ok(if budget_hit { EXIT_BUDGET } else { 0 })
        }
        Command::Certify { tuple, seed_depth, max_iter, margin, output } => {
            let parsed = load_tuple(&tuple)?;
            let cfg = MulticoneConfig { seed_depth, max_iter, margin, ..MulticoneConfig::default() };
            let outcome = find_multicone(&parsed.maps, &cfg)?;
            let (j, code) = match outcome {
                MulticoneOutcome::Certified(c) => {
                    let verified = verify_multicone(&parsed.maps, &c);
                    let images: Vec<Value> = c
                        .per_generator_images
                        .iter()
                        .map(|u| serde_json::to_value(u).unwrap())
                        .collect();
                    (
                        json!({
                            "schema_version": 1,
                            "outcome": "certified",
                            "multicone": serde_json::to_value(&c.multicone).unwrap(),
                            "margin": c.margin,
                            "per_generator_images": images,
                            "word_depth_used": c.word_depth_used,
                            "verified": verified,
                        }),
                        0,
                    )
                }
                MulticoneOutcome::Failure(f) => {
                    let (detail, code) = match &f {
                        MulticoneFailure::Budget { detail } => (json!(detail), EXIT_BUDGET),
                        MulticoneFailure::NonHyperbolicGenerator { index, class } => (
                            json!({ "index": index, "class": format!("{class:?}") }),
                            0,
                        ),
                        MulticoneFailure::LimitSetsTouch { point, fwd_word, bwd_word } => (
                            json!({
                                "point": point.to_real(),
                                "fwd_word": fwd_word.letters,
                                "bwd_word": bwd_word.letters,
                            }),
                            0,
                        ),
                    };
                    let kind = match &f {
                        MulticoneFailure::Budget { .. } => "budget",
                        MulticoneFailure::NonHyperbolicGenerator { .. } => {
                            "non-hyperbolic-generator"
                        }
                        MulticoneFailure::LimitSetsTouch { .. } => "limit-sets-touch",
                    };
                    (
                        json!({
                            "schema_version": 1,
                            "outcome": "failure",
                            "kind": kind,
                            "detail": detail,
                        }),
                        code,
                    )
                }
            };
            emit(&output, &serde_json::to_string_pretty(&j).unwrap())?;
            Ok(code)
        }
        Command::LimitSet { tuple, side, depth, gap, output, svg } => {
            let parsed = load_tuple(&tuple)?;
            let mut j = json!({ "schema_version": 1 });
            let mut unions: Vec<ArcUnion<f64>> = Vec::new();
            let mut collect = |l: &LimitSetApprox<f64>| {
                if !l.hull.whole_circle {
                    if let Ok(u) = l.hull.to_arc_union(1e-9) {
                        unions.push(u);
                    }
                }
            };
            if matches!(side, Side::Forward | Side::Both) {
                let fwd = forward_limit_set(&parsed.maps, depth, gap, DEFAULT_NODE_BUDGET)?;
                j["forward"] = limit_set_json(&fwd);
                collect(&fwd);
            }
            if matches!(side, Side::Backward | Side::Both) {
                let bwd = backward_limit_set(&parsed.maps, depth, gap, DEFAULT_NODE_BUDGET)?;
                j["backward"] = limit_set_json(&bwd);
                collect(&bwd);
            }
            emit(&output, &serde_json::to_string_pretty(&j).unwrap())?;
            if let Some(path) = svg {
                let content = render_figure(&parsed.maps, &unions, &[]);
                fs::write(&path, content).map_err(|e| Error::Parse {
                    line: 0,
                    msg: format!("cannot write {}: {e}", path.display()),
                })?;
            }
            Ok(0)
        }
        Command::Explore { tuple, max_len, beam, threshold, output } => {
            let parsed = load_tuple(&tuple)?;
            let elliptic =
                find_elliptic_or_identity(&parsed.maps, max_len, DEFAULT_NODE_BUDGET)?;
            let inverse = inverse_free_violation(&parsed.maps, max_len, DEFAULT_NODE_BUDGET)?;
            let cfg = RefuteConfig {
                beam_width: beam,
                max_len,
                threshold,
                ..RefuteConfig::default()
            };
            let approach = refute_semidiscrete(&parsed.maps, parsed.exact.as_ref(), &cfg)?;
            let j = json!({
                "schema_version": 1,
                "max_len": max_len,
                "elliptic_or_identity": elliptic.as_ref().map(witness_json),
                "inverse_violation": inverse.as_ref().map(witness_json),
                "identity_approach": approach.as_ref().map(witness_json),
            });
            emit(&output, &serde_json::to_string_pretty(&j).unwrap())?;
            Ok(0)
        }
        Command::Spectral { tuple, max_len, output } => {
            let parsed = load_tuple(&tuple)?;
            let est = lower_spectral_estimate(&parsed.maps, max_len, DEFAULT_NODE_BUDGET)?;
            let mut csv = String::from("length,min_norm_root,periodic_upper\n");
            for (l, root) in &est.per_length {
                csv.push_str(&format!("{l},{root},{}\n", est.periodic_upper));
            }
            emit(&output, csv.trim_end())?;
            Ok(0)
        }
        Command::Reproduce { name, svg } => {
            let report = run_scenario(&name).map_err(|e| match e {
                Error::UnknownScenario(n) => Error::UnknownScenario(format!(
                    "{n} (known: {})",
                    SCENARIO_NAMES.join(", ")
                )),
                other => other,
            })?;
            print!("{}", report.render_table());
            if let Some(path) = svg {
                let content = render_figure(
                    &report.figure.gens,
                    &report.figure.unions,
                    &report.figure.points,
                );
                fs::write(&path, content).map_err(|e| Error::Parse {
                    line: 0,
                    msg: format!("cannot write {}: {e}", path.display()),
                })?;
            }
            Ok(if report.all_passed() { 0 } else { EXIT_CHECK_FAILED })
        }
    }
}
