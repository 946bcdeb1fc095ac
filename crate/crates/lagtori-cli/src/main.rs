//! Command-line surface: classification queries, the verification suite,
//! quadrature experiments, germ comparisons, probe validation, and SVG
//! plots of the two moment polytopes.
//!
//! Exit codes: 0 all-pass, 1 any-fail (or runtime failure), 2 usage error.

mod svg;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use lagtori::classify::{classify_pq, classify_via_reduction, ClassificationOutcome};
use lagtori::germ::{germ_diagonal_fiber, germ_l_torus, germs_linearly_equivalent};
use lagtori::polytope::{
    case_region, p1_square, p2_polytope, rat_to_float, CaseRegion, PqCoord, XyCoord,
};
use lagtori::probe::{sigma_probe, validate_probe};
use lagtori::reduction::{
    enclosed_area_closed_form, enclosed_area_quadrature, half_abs_p_integral,
    sample_reduced_curve, sqrt_radius_integral,
};
use lagtori::suite::{run_suite, SuiteConfig, SuiteName};

#[derive(Parser)]
#[command(
    name = "lagtori",
    version,
    about = "Classify the torus fibers of the resolved degeneration of S2 x S2 and verify the formulas behind the classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for randomized samples (falls back to LAGTORI_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Grid density for suite checks (at least 4).
    #[arg(long, global = true, default_value_t = 8)]
    grid: usize,

    /// Tolerance override `check-name=value`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolytopeName {
    #[value(name = "P1", alias = "p1")]
    P1,
    #[value(name = "P2", alias = "p2")]
    P2,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the torus over a polytope point as a standard fiber or a
    /// non-product verdict.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<f64>,
        /// Also run the independent reduction route and report agreement.
        #[arg(long)]
        cross_check: bool,
    },
    /// Run a named verification suite and emit its report.
    Verify {
        /// One of: all, curves, reduction, appendix, classify, probes, germs.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Render a polytope (with optional marks, probe, classification arrow)
    /// as a standalone SVG.
    Plot {
        #[arg(long, value_enum)]
        polytope: PolytopeName,
        /// Marked point "x,y"; repeatable.
        #[arg(long = "mark", allow_hyphen_values = true)]
        marks: Vec<String>,
        /// Draw the vertical probe {p = a} (triangle chart only).
        #[arg(long, allow_hyphen_values = true)]
        probe: Option<f64>,
        /// Classify "p,q" and draw an arrow onto its fiber.
        #[arg(long, allow_hyphen_values = true)]
        arrow: Option<String>,
    },
    /// Validate a probe and print its description.
    Probe {
        /// Shorthand for the vertical probe {p = a} in the triangle.
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<f64>,
        #[arg(long, value_enum)]
        polytope: Option<PolytopeName>,
        /// Base point "x,y" on the boundary.
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        /// Integer direction "i,j".
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
    },
    /// Quadrature experiment: enclosed area and the intermediate integrals
    /// along the reduced curve at (p, q).
    Area {
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        /// Samples along the curve.
        #[arg(long, default_value_t = 4096)]
        n: usize,
        /// Also write the sampled curve as CSV rows theta,re,im.
        #[arg(long)]
        dump_curve: Option<PathBuf>,
    },
    /// Compare the displacement-energy germs of the diagonal torus at q and
    /// the diagonal fiber at xi.
    Germ {
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
    },
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected check-name=value, got '{s}'"))?;
    let value: f64 = value
        .parse()
        .map_err(|e| format!("bad tolerance value in '{s}': {e}"))?;
    Ok((name.to_string(), value))
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("{what}: expected 'a,b', got '{s}'"))?;
    let a = a.trim().parse().map_err(|e| format!("{what}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{what}: {e}"))?;
    Ok((a, b))
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn failure(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn resolve_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| {
            std::env::var("LAGTORI_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), std::io::Error> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match &cli.command {
        Command::Classify {
            x,
            y,
            p,
            q,
            cross_check,
        } => cmd_classify(&cli, *x, *y, *p, *q, *cross_check),
        Command::Verify { suite } => cmd_verify(&cli, suite),
        Command::Plot {
            polytope,
            marks,
            probe,
            arrow,
        } => cmd_plot(&cli, *polytope, marks, *probe, arrow.as_deref()),
        Command::Probe {
            sigma,
            polytope,
            base,
            dir,
        } => cmd_probe(&cli, *sigma, *polytope, base.as_deref(), dir.as_deref()),
        Command::Area { p, q, n, dump_curve } => cmd_area(&cli, *p, *q, *n, dump_curve.as_deref()),
        Command::Germ { q, xi } => cmd_germ(&cli, *q, *xi),
    }
}

fn cmd_classify(
    cli: &Cli,
    x: Option<f64>,
    y: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    cross_check: bool,
) -> ExitCode {
    let (xy, pq) = match (x, y, p, q) {
        (Some(x), Some(y), None, None) => {
            let xy = XyCoord::new(x, y);
            (xy, xy.to_pq())
        }
        (None, None, Some(p), Some(q)) => {
            let pq = PqCoord::new(p, q);
            (pq.to_xy(), pq)
        }
        _ => {
            return usage("provide exactly one input pair: --x with --y, or --p with --q");
        }
    };
    let outcome = match classify_pq(pq) {
        Ok(outcome) => outcome,
        Err(e) => return usage(e),
    };
    let mut doc = json!({
        "input": {"x": xy.x, "y": xy.y, "p": pq.p, "q": pq.q},
    });
    match outcome {
        ClassificationOutcome::StandardFiber { fiber, branch } => {
            doc["kind"] = json!("StandardFiber");
            doc["xi"] = json!(fiber.xi);
            doc["zeta"] = json!(fiber.zeta);
            doc["branch"] = serde_json::to_value(branch).unwrap();
            if cross_check {
                match classify_via_reduction(pq) {
                    Ok(via) => {
                        let delta = (via.xi - fiber.xi).abs().max((via.zeta - fiber.zeta).abs());
                        doc["cross_check"] = json!({
                            "xi": via.xi,
                            "zeta": via.zeta,
                            "max_delta": delta,
                            "agrees": delta <= 1e-10,
                        });
                    }
                    Err(e) => return failure(format!("cross-check failed: {e}")),
                }
            }
        }
        ClassificationOutcome::NonProduct { reason } => {
            doc["kind"] = json!("NonProduct");
            doc["reason"] = serde_json::to_value(reason).unwrap();
        }
    }
    match emit(&cli.out, &doc.to_string()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => failure(e),
    }
}

fn cmd_verify(cli: &Cli, suite: &str) -> ExitCode {
    let name = match SuiteName::from_str(suite) {
        Ok(name) => name,
        Err(e) => return usage(e),
    };
    if cli.grid < 4 {
        return usage("grid density must be at least 4");
    }
    let cfg = SuiteConfig {
        grid_density: cli.grid,
        seed: resolve_seed(cli.seed),
        tol_overrides: cli.tol.iter().cloned().collect::<BTreeMap<_, _>>(),
    };
    let report = run_suite(name, &cfg);
    for check in &report.checks {
        eprintln!(
            "{} {} (max_error {:.3e}, tolerance {:.1e}, {:.1} ms)",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.max_error,
            check.tolerance,
            check.runtime_ms
        );
    }
    eprintln!(
        "suite '{}': {} passed, {} failed in {:.0} ms (seed {})",
        report.suite, report.summary.passed, report.summary.failed, report.wall_ms, report.seed
    );
    let content = match cli.format {
        Format::Json => report.to_json_string(),
        Format::Csv => report.to_csv_string(),
    };
    if let Err(e) = emit(&cli.out, &content) {
        return failure(e);
    }
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_plot(
    cli: &Cli,
    which: PolytopeName,
    marks: &[String],
    probe: Option<f64>,
    arrow: Option<&str>,
) -> ExitCode {
    let Some(out) = &cli.out else {
        return usage("plot requires --out <file.svg>");
    };
    let mut plot = svg::Plot {
        outline: svg::polytope_outline(&match which {
            PolytopeName::P1 => p1_square(),
            PolytopeName::P2 => p2_polytope(),
        }),
        title: match which {
            PolytopeName::P1 => "P1: standard fiber labels (xi, zeta)".to_string(),
            PolytopeName::P2 => "P2: torus parameters (p, q)".to_string(),
        },
        ..Default::default()
    };
    for raw in marks {
        let (mx, my) = match parse_pair(raw, "--mark") {
            Ok(pair) => pair,
            Err(e) => return usage(e),
        };
        plot.marks.push((mx, my, format!("({mx}, {my})")));
    }
    if let Some(a) = probe {
        if which != PolytopeName::P2 {
            return usage("--probe draws {p = a}, which lives in P2");
        }
        let probe = match sigma_probe(a) {
            Ok(probe) => probe,
            Err(e) => return usage(e),
        };
        let base = (
            rat_to_float::<f64>(probe.base[0]),
            rat_to_float::<f64>(probe.base[1]),
        );
        let end = (
            rat_to_float::<f64>(probe.endpoint[0]),
            rat_to_float::<f64>(probe.endpoint[1]),
        );
        plot.segments.push((base, end, "#27ae60"));
        plot.marks.push((base.0, base.1, format!("base p={a}")));
        plot.marks.push((end.0, end.1, "exit".to_string()));
    }
    if let Some(raw) = arrow {
        let (ap, aq) = match parse_pair(raw, "--arrow") {
            Ok(pair) => pair,
            Err(e) => return usage(e),
        };
        let pq = PqCoord::new(ap, aq);
        let fiber = match classify_pq(pq) {
            Ok(outcome) => match outcome.fiber() {
                Some(fiber) => fiber,
                None => return usage("--arrow input is diagonal: it has no standard fiber image"),
            },
            Err(e) => return usage(e),
        };
        // Show both polytopes: the source lives in P2, the image in P1.
        plot.overlay = svg::polytope_outline(&match which {
            PolytopeName::P1 => p2_polytope(),
            PolytopeName::P2 => p1_square(),
        });
        plot.marks.push((ap, aq, format!("L({ap}, {aq})")));
        plot.marks.push((
            fiber.xi,
            fiber.zeta,
            format!("T({:.6}, {:.6})", fiber.xi, fiber.zeta),
        ));
        plot.arrows.push(((ap, aq), (fiber.xi, fiber.zeta)));
    }
    match emit(&Some(out.clone()), &svg::render(&plot)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => failure(e),
    }
}

fn cmd_probe(
    cli: &Cli,
    sigma: Option<f64>,
    polytope: Option<PolytopeName>,
    base: Option<&str>,
    dir: Option<&str>,
) -> ExitCode {
    let probe = match (sigma, polytope, base, dir) {
        (Some(a), None, None, None) => sigma_probe(a),
        (None, Some(which), Some(base), Some(dir)) => {
            let base = match parse_pair(base, "--base") {
                Ok(pair) => pair,
                Err(e) => return usage(e),
            };
            let dir = match parse_pair(dir, "--dir") {
                Ok((i, j)) if i.fract() == 0.0 && j.fract() == 0.0 => (i as i64, j as i64),
                Ok(_) => return usage("--dir must be an integer pair"),
                Err(e) => return usage(e),
            };
            let poly = match which {
                PolytopeName::P1 => p1_square(),
                PolytopeName::P2 => p2_polytope(),
            };
            validate_probe(&poly, [base.0, base.1], [dir.0, dir.1])
        }
        _ => {
            return usage(
                "provide either --sigma <a>, or --polytope with --base and --dir",
            )
        }
    };
    match probe {
        Ok(probe) => {
            let mut doc = probe.to_json();
            doc["valid"] = json!(true);
            match emit(&cli.out, &doc.to_string()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => failure(e),
            }
        }
        Err(e) => usage(e),
    }
}

fn cmd_area(cli: &Cli, p: f64, q: f64, n: usize, dump_curve: Option<&std::path::Path>) -> ExitCode {
    let pq = PqCoord::new(p, q);
    if n < 16 {
        return usage("need at least 16 samples");
    }
    let curve = match sample_reduced_curve(pq, n) {
        Ok(curve) => curve,
        Err(e) => return usage(e),
    };
    if let Some(path) = dump_curve {
        let mut buf = Vec::new();
        if let Err(e) = curve.to_csv(&mut buf) {
            return failure(e);
        }
        if let Err(e) = std::fs::write(path, buf) {
            return failure(e);
        }
    }
    let quad = match enclosed_area_quadrature(&curve, p) {
        Ok(v) => v,
        Err(e) => return failure(e),
    };
    let sqrt_int = sqrt_radius_integral(&curve, p).ok();
    let abs_int = half_abs_p_integral(&curve, p).ok();
    let region = case_region(pq);
    let closed = enclosed_area_closed_form(pq).ok();
    let doc = json!({
        "p": p,
        "q": q,
        "n": n,
        "region": format!("{region:?}"),
        "enclosed_area_quadrature": quad,
        "enclosed_area_closed_form": closed,
        "area_abs_error": closed.map(|c| (quad - c).abs()),
        "sqrt_radius_integral": sqrt_int,
        "sqrt_radius_closed_form": if region == CaseRegion::Case1 {
            Some(4.0 * std::f64::consts::PI * (q - 1.0))
        } else {
            None
        },
        "abs_p_integral": abs_int,
    });
    match emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => failure(e),
    }
}

fn cmd_germ(cli: &Cli, q: f64, xi: f64) -> ExitCode {
    let l_germ = match germ_l_torus(q) {
        Ok(g) => g,
        Err(e) => return usage(e),
    };
    let t_germ = match germ_diagonal_fiber(xi) {
        Ok(g) => g,
        Err(e) => return usage(e),
    };
    let doc = json!({
        "q": q,
        "xi": xi,
        "l_torus_germ": l_germ,
        "diagonal_fiber_germ": t_germ,
        "span_dims": [l_germ.gradient_span_dim(), t_germ.gradient_span_dim()],
        "linearly_equivalent": germs_linearly_equivalent(&l_germ, &t_germ),
    });
    match emit(&cli.out, &serde_json::to_string_pretty(&doc).unwrap()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => failure(e),
    }
}
