//! Batch front door: parse germ files, run the symbolic pipelines, emit
//! reports, trees and orbit dumps.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use sepal::blowup::dot::{tree_to_dot, tree_to_json};
use sepal::classify::{self, ClassifyOptions};
use sepal::dynamics::{self, ConvergenceOptions, NumericMap, VivasDomain};
use sepal::error::Error;
use sepal::germs::{self, Diffeo};
use sepal::index;
use sepal::input::{self, GermObject, SourceFile};

#[derive(Parser)]
#[command(
    name = "sepal",
    about = "Exact blow-up, index and classification pipelines for plane germs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run this many input files in parallel.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Input germ files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Emit a JSON report to stdout instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct BindArgs {
    /// Numeric bindings NAME=FLOAT for tower generators.
    #[arg(long = "bind", value_parser = parse_bind)]
    bind: Vec<(String, f64)>,
}

fn parse_bind(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=FLOAT, got '{s}'"))?;
    let v: f64 = value
        .parse()
        .map_err(|e| format!("bad float '{value}': {e}"))?;
    Ok((name.to_string(), v))
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Print the infinitesimal generator jet of the map.
    Log {
        #[command(flatten)]
        common: CommonArgs,
        /// Certified total degree of the jet.
        #[arg(long)]
        order: Option<u32>,
    },
    /// List the characteristic directions with multiplicities and
    /// degeneracy flags.
    Chardirs {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Resolve the vector field (or the map's generator) and report the tree.
    Resolve {
        #[command(flatten)]
        common: CommonArgs,
        /// Depth guard for the blow-up cascade.
        #[arg(long, default_value_t = 16)]
        max_depth: u32,
        /// Write the tree in Graphviz DOT form.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Divisor index table of the first blow-up plus the identity validators.
    Index {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the main trichotomy for one characteristic direction.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        /// The direction, e.g. "[1:0]" or "[-c:1]".
        #[arg(long, required_unless_present = "along_divisor")]
        direction: Option<String>,
        /// Classify the germ along its pointwise-fixed divisor instead.
        #[arg(long)]
        along_divisor: bool,
        #[arg(long, default_value_t = 16)]
        max_depth: u32,
        /// Write the resolution tree in DOT form.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run the non-vanishing-index classifier for one direction.
    Abate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        direction: String,
        #[arg(long, default_value_t = 16)]
        max_depth: u32,
    },
    /// Iterate the map numerically and report orbit diagnostics.
    Orbit {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        bind: BindArgs,
        /// Start point "re1,re2" or "re1,im1,re2,im2".
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 10.0)]
        escape_radius: f64,
        /// Lift the orbit through this many blow-ups.
        #[arg(long, default_value_t = 0)]
        tangents: usize,
        /// Convergence tail length.
        #[arg(long, default_value_t = 50)]
        tail: usize,
        /// Convergence norm factor.
        #[arg(long, default_value_t = 1e-4)]
        factor: f64,
        /// Write the orbit as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sampled invariance, argument-drift and exponent checks on the
    /// saddle-node chart domain.
    Vivas {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        bind: BindArgs,
        /// Normal-shape integers "r,m,p".
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.3)]
        eta: f64,
        #[arg(long = "bigm", default_value_t = 2)]
        big_m: u32,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Exponent N for the asymptotic bound check.
        #[arg(long, default_value_t = 3)]
        exponent: u32,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let files = command_files(&cli.command);
    let mut status = ExitCode::SUCCESS;
    if cli.jobs > 1 && files.len() > 1 {
        let results: Vec<ExitCode> = std::thread::scope(|scope| {
            let handles: Vec<_> = files
                .iter()
                .map(|f| {
                    let cmd = cli.command.clone();
                    scope.spawn(move || run_file(&cmd, f))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("job panicked"))
                .collect()
        });
        for r in results {
            if r != ExitCode::SUCCESS {
                status = r;
            }
        }
    } else {
        for f in &files {
            let r = run_file(&cli.command, f);
            if r != ExitCode::SUCCESS {
                status = r;
            }
        }
    }
    status
}

fn command_files(c: &Command) -> Vec<PathBuf> {
    match c {
        Command::Log { common, .. }
        | Command::Chardirs { common }
        | Command::Resolve { common, .. }
        | Command::Index { common }
        | Command::Classify { common, .. }
        | Command::Abate { common, .. }
        | Command::Orbit { common, .. }
        | Command::Vivas { common, .. } => common.files.clone(),
    }
}

fn run_file(cmd: &Command, path: &PathBuf) -> ExitCode {
    match try_run(cmd, path) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: error: {e}", path.display());
            if e.is_inapplicability() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

/// Prepared map with blow-up directives applied, at a precision driven by
/// the tangency order.
fn prepared_map(sf: &SourceFile, requested: Option<u32>) -> Result<Diffeo, Error> {
    let probe = sf.prepared_map(requested.unwrap_or(8).max(8))?;
    let k1 = probe.tti_order()?;
    let order = requested.unwrap_or(4 * k1);
    if probe.prec().total.is_none_or(|t| t >= order) {
        return Ok(probe);
    }
    sf.prepared_map(order)
}

fn try_run(cmd: &Command, path: &PathBuf) -> Result<(), Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Internal(format!("cannot read {}: {e}", path.display())))?;
    let sf = input::parse_source(&text)?;
    match cmd {
        Command::Log { common, order } => {
            let f = prepared_map(&sf, *order)?;
            let n = order.unwrap_or(4 * f.tti_order()?);
            let x = germs::log(&f, n)?;
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": 1,
                        "command": "log",
                        "order": n,
                        "generator": {
                            "d1": x.comp1().to_string(),
                            "d2": x.comp2().to_string(),
                        },
                    })
                );
            } else {
                let (v1, v2) = x.vars();
                println!("X.d{v1} = {}", x.comp1());
                println!("X.d{v2} = {}", x.comp2());
            }
            Ok(())
        }
        Command::Chardirs { common } => {
            let f = prepared_map(&sf, None)?;
            let (_, dirs) = germs::characteristic_directions(&f)?;
            if common.json {
                let list: Vec<_> = dirs
                    .iter()
                    .map(|(p, m, d)| {
                        serde_json::json!({
                            "direction": p.canonical_text(),
                            "multiplicity": m,
                            "degenerate": d,
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({"schema": 1, "command": "chardirs", "directions": list})
                );
            } else {
                for (p, m, d) in &dirs {
                    println!(
                        "{} multiplicity {}{}",
                        p.canonical_text(),
                        m,
                        if *d { " degenerate" } else { "" }
                    );
                }
            }
            Ok(())
        }
        Command::Resolve {
            common,
            max_depth,
            dot,
        } => {
            let opts = ClassifyOptions {
                max_depth: *max_depth,
                ..Default::default()
            };
            let tree = match &sf.object {
                GermObject::Field(x) => sepal::blowup::resolve::resolve(
                    x,
                    &sepal::blowup::ResolveOptions {
                        max_depth: *max_depth,
                    },
                )?,
                GermObject::Map(_) => {
                    let f = prepared_map(&sf, None)?;
                    classify::generator_resolution(&f, &opts)?.0
                }
            };
            if let Some(p) = dot {
                std::fs::write(p, tree_to_dot(&tree))
                    .map_err(|e| Error::Internal(format!("cannot write DOT: {e}")))?;
            }
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({"schema": 1, "command": "resolve", "tree": tree_to_json(&tree)})
                );
            } else {
                println!("nodes: {}", tree.nodes.len());
                println!("depth: {}", tree.depth());
                for (id, leaf) in tree.leaves() {
                    println!(
                        "leaf {}: {}{}",
                        id.0,
                        leaf.class.label(),
                        if leaf.dicritical { " (dicritical)" } else { "" }
                    );
                }
            }
            Ok(())
        }
        Command::Index { common } => {
            let opts = ClassifyOptions::default();
            let run = |x: &germs::VectorField| {
                let (entries, sum) = index::divisor_index_sum(x)?;
                let report = index::validate_index_properties(x)?;
                Ok((entries, sum, report))
            };
            let (entries, sum, report) = match &sf.object {
                GermObject::Field(x) => run(x)?,
                GermObject::Map(_) => {
                    let f = prepared_map(&sf, None)?;
                    classify::with_generator(&f, &opts, run)?
                }
            };
            if common.json {
                let list: Vec<_> = entries
                    .iter()
                    .map(|e| {
                        serde_json::json!({
                            "factor": e.class.factor.as_ref().map(|f| f.to_string()),
                            "chart_value": e.class.chart_value.as_ref().map(|v| v.to_string()),
                            "conjugates": e.class.conjugates,
                            "index": e.value.to_string(),
                            "trace": e.trace.to_string(),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": 1,
                        "command": "index",
                        "divisor_indices": list,
                        "sum": sum.to_string(),
                        "properties_hold": report.all_hold,
                    })
                );
            } else {
                for e in &entries {
                    let loc = match &e.class.chart_value {
                        Some(v) => format!("t = {v}"),
                        None => "[0:1]".to_string(),
                    };
                    println!(
                        "{loc}: index {} (x{} conjugates, trace {})",
                        e.value, e.class.conjugates, e.trace
                    );
                }
                println!("sum: {sum}");
                println!("identities hold: {}", report.all_hold);
            }
            Ok(())
        }
        Command::Classify {
            common,
            direction,
            along_divisor,
            max_depth,
            dot,
        } => {
            let f = prepared_map(&sf, None)?;
            let opts = ClassifyOptions {
                max_depth: *max_depth,
                ..Default::default()
            };
            let report = if *along_divisor {
                classify::classify_along_divisor(&f, &opts)?
            } else {
                let d = direction.as_deref().expect("clap enforces direction");
                let v = input::parse_direction(d, &sf.tower)?;
                classify::classify_direction(&f, &v, &opts)?
            };
            if let (Some(p), Some(tree)) = (dot, report.tree.as_ref()) {
                std::fs::write(p, tree_to_dot(tree))
                    .map_err(|e| Error::Internal(format!("cannot write DOT: {e}")))?;
            }
            print_classification(common.json, &report);
            Ok(())
        }
        Command::Abate {
            common,
            direction,
            max_depth,
        } => {
            let f = prepared_map(&sf, None)?;
            let opts = ClassifyOptions {
                max_depth: *max_depth,
                ..Default::default()
            };
            let v = input::parse_direction(direction, &sf.tower)?;
            let report = classify::classify_abate(&f, &v, &opts)?;
            print_classification(common.json, &report);
            Ok(())
        }
        Command::Orbit {
            common,
            bind,
            start,
            steps,
            escape_radius,
            tangents,
            tail,
            factor,
            csv,
        } => {
            let f = prepared_map(&sf, None)?;
            let bindings: HashMap<String, f64> = bind.bind.iter().cloned().collect();
            let map = NumericMap::compile(&f, &bindings)?;
            let z0 = parse_start(start)?;
            let orbit = dynamics::iterate(&map, z0, *steps, *escape_radius)?;
            if let Some(p) = csv {
                std::fs::write(p, dynamics::orbit_to_csv(&orbit))
                    .map_err(|e| Error::Internal(format!("cannot write CSV: {e}")))?;
            }
            let conv = ConvergenceOptions {
                tail: *tail,
                factor: *factor,
            };
            let dir = dynamics::tangent_direction(&orbit, &conv);
            let lifts = if *tangents > 0 {
                dynamics::iterated_tangents(&orbit, *tangents, &conv).ok()
            } else {
                None
            };
            let last = orbit.last();
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": 1,
                        "command": "orbit",
                        "steps": steps,
                        "last": [last.0.re, last.0.im, last.1.re, last.1.im],
                        "tangent": dir.as_ref().ok().map(|((a, b), res)| serde_json::json!({
                            "direction": [a.re, a.im, b.re, b.im],
                            "residual": res,
                        })),
                        "iterated_tangents": lifts.as_ref().map(|ls| ls.iter().map(|l| serde_json::json!({
                            "chart": format!("{:?}", l.chart),
                            "value": [l.value.re, l.value.im],
                            "residual": l.residual,
                        })).collect::<Vec<_>>()),
                    })
                );
            } else {
                println!(
                    "last point: ({:.6e}{:+.6e}i, {:.6e}{:+.6e}i)",
                    last.0.re, last.0.im, last.1.re, last.1.im
                );
                match dir {
                    Ok(((a, b), res)) => println!(
                        "tangent direction: [{:.6}{:+.6}i : {:.6}{:+.6}i] residual {res:.3e}",
                        a.re, a.im, b.re, b.im
                    ),
                    Err(e) => println!("tangent direction: {e}"),
                }
                if let Some(ls) = lifts {
                    for (i, l) in ls.iter().enumerate() {
                        println!(
                            "level {}: chart {:?} value {:.6}{:+.6}i residual {:.3e}",
                            i + 1,
                            l.chart,
                            l.value.re,
                            l.value.im,
                            l.residual
                        );
                    }
                }
            }
            Ok(())
        }
        Command::Vivas {
            common,
            bind,
            shape,
            eps,
            delta,
            eta,
            big_m,
            samples,
            exponent,
            seed,
        } => {
            let f = prepared_map(&sf, None)?;
            let bindings: HashMap<String, f64> = bind.bind.iter().cloned().collect();
            let map = NumericMap::compile(&f, &bindings)?;
            let parts: Vec<u32> = shape
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|e| Error::Internal(format!("bad --shape: {e}")))?;
            let [r, m, p] = parts[..] else {
                return Err(Error::Internal("--shape needs r,m,p".into()));
            };
            let domain = VivasDomain {
                epsilon: *eps,
                delta: *delta,
                eta: *eta,
                big_m: *big_m,
                r,
                m,
                p,
            };
            let report = dynamics::vivas_checks(&map, &domain, *samples, *exponent, *seed)?;
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": 1,
                        "command": "vivas",
                        "samples_in_domain": report.samples_in_domain,
                        "invariant": report.invariant,
                        "invariance_rate": report.invariance_rate,
                        "margin": report.margin,
                        "empty_domain": report.empty_domain,
                        "arg_start": report.arg_start,
                        "arg_end": report.arg_end,
                        "exponent_slope": report.exponent_slope,
                        "exponent_n0": report.exponent_n0,
                        "exponent_constant": report.exponent_constant,
                    })
                );
            } else {
                if report.empty_domain {
                    println!("domain is empty for these parameters; nothing checked");
                    return Ok(());
                }
                println!(
                    "invariance: {}/{} ({:.2}%), margin {:.3e}",
                    report.invariant,
                    report.samples_in_domain,
                    100.0 * report.invariance_rate,
                    report.margin
                );
                println!(
                    "arg drift: {:.4} -> {:.4}",
                    report.arg_start, report.arg_end
                );
                println!(
                    "exponent: slope {:.3} (N = {exponent}), n0 = {:?}, C = {:.3e}",
                    report.exponent_slope, report.exponent_n0, report.exponent_constant
                );
            }
            Ok(())
        }
    }
}

fn parse_start(s: &str) -> Result<(Complex64, Complex64), Error> {
    let nums: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::Internal(format!("bad --start: {e}")))?;
    match nums[..] {
        [a, b] => Ok((Complex64::new(a, 0.0), Complex64::new(b, 0.0))),
        [a, ai, b, bi] => Ok((Complex64::new(a, ai), Complex64::new(b, bi))),
        _ => Err(Error::Internal(
            "--start needs 2 or 4 comma-separated floats".into(),
        )),
    }
}

fn print_classification(json: bool, report: &classify::ClassificationReport) {
    if json {
        println!("{}", classify::report_to_json(report));
        return;
    }
    println!("verdict: {}", report.verdict.label());
    println!("direction: {}", report.direction);
    println!("k: {}", report.k);
    println!("guaranteed invariant sets: {}", report.guaranteed);
    println!(
        "parabolic curve guaranteed: {}",
        report.parabolic_curve_guaranteed
    );
    println!(
        "foliated by parabolic curves: {}",
        report.foliated_by_curves
    );
    if let Some(c) = &report.fixed_curve {
        println!("fixed curve: {c}");
    }
    if let Some(w) = &report.witness {
        println!(
            "witness separatrix: node {} {:?} {:?} smooth={}",
            w.node.0, w.branch, w.strength, w.smooth
        );
    }
    if let Some(s) = &report.vivas {
        println!(
            "saddle-node shape: r={} m={} p={} a={} c={} at node {}",
            s.r, s.m, s.p, s.a, s.c, s.node.0
        );
    }
    for (name, value) in &report.indices {
        println!("index {name} = {value}");
    }
    for n in &report.notes {
        println!("note: {n}");
    }
}
