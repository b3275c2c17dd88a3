//! `ttheta`: divisor theory of tropical curves from the command line.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tropical_theta::discrete::{dhar_reduce, to_unit_model};
use tropical_theta::divisor::bits_of;
use tropical_theta::io::{self, divisor_file, format_rational, parse_rational, PointRecord};
use tropical_theta::orientation::{gamma_support, theta_characteristics, Orientation};
use tropical_theta::theta::{compute_kappa, pullback_divisor, theta_eval};
use tropical_theta::verify::{self, Check, VerifyOptions};
use tropical_theta::{Divisor, Error, JacPoint, Jacobian, MetricGraph, Point, Rational, Result};

use report::Report;

#[derive(Parser)]
#[command(name = "ttheta", version, about = "Exact divisor theory of tropical curves")]
struct Cli {
    /// Output format; JSON is the stable contract.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct CurveArg {
    /// Curve file (JSON).
    #[arg(long)]
    curve: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Vertices, edges, genus, canonical divisor.
    Info(CurveArg),
    /// Cycle basis and Gram matrix.
    Gram(CurveArg),
    /// Abel–Jacobi image of a divisor.
    AbelJacobi {
        #[command(flatten)]
        curve: CurveArg,
        /// Divisor file, or inline divisor JSON.
        #[arg(long)]
        divisor: String,
    },
    /// Linear equivalence of two divisors.
    LinEquiv {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        d1: String,
        #[arg(long)]
        d2: String,
    },
    /// Theta function value and maximizers at a point of Rᵍ.
    ThetaEval {
        #[command(flatten)]
        curve: CurveArg,
        /// Comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Riemann constant and the distinguished characteristic.
    Kappa(CurveArg),
    /// Corner divisor of p ↦ Θ(μ(p) − shift).
    Pullback {
        #[command(flatten)]
        curve: CurveArg,
        /// Comma-separated rationals; zero when omitted.
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
    },
    /// All 2^g theta characteristics.
    ThetaChars {
        #[command(flatten)]
        curve: CurveArg,
        /// Directory receiving one DOT file per class.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Chip-firing reduction of a divisor at a base point.
    Reduce {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        divisor: String,
        /// Vertex id or `edge@offset`; the curve basepoint when omitted.
        #[arg(long)]
        base: Option<String>,
    },
    /// Full invariant suite.
    Verify {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Oriented refined model in DOT.
    ExportDot {
        #[command(flatten)]
        curve: CurveArg,
        /// Class bits such as `101`; the basepoint orientation when omitted.
        #[arg(long)]
        gamma: Option<String>,
        /// Semicolon-separated source points instead of a class.
        #[arg(long, conflicts_with = "gamma")]
        sources: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli.command) {
        Ok(Output::Report(mut report)) => {
            if cli.timing {
                report.elapsed_ms = Some(start.elapsed().as_millis());
            }
            match cli.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("check failed: {}", c.name);
                }
                ExitCode::from(1)
            }
        }
        Ok(Output::Raw(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

enum Output {
    Report(Report),
    Raw(String),
}

fn load(arg: &CurveArg) -> Result<MetricGraph> {
    let text = std::fs::read_to_string(&arg.curve)
        .map_err(|e| Error::Parse(format!("{}: {e}", arg.curve.display())))?;
    io::load_curve(&text)
}

/// A path to a divisor file, or the JSON itself.
fn divisor_arg(graph: &MetricGraph, arg: &str) -> Result<Divisor> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    };
    io::load_divisor(&text, graph)
}

/// A vertex id, or `edge@offset`.
fn point_arg(graph: &MetricGraph, arg: &str) -> Result<Point> {
    if let Some(v) = graph.vertex_by_id(arg) {
        return Ok(Point::Vertex(v));
    }
    let record = match arg.rsplit_once('@') {
        Some((edge, offset)) => PointRecord::Edge {
            edge: edge.to_string(),
            offset: offset.to_string(),
        },
        None => PointRecord::Vertex {
            vertex: arg.to_string(),
        },
    };
    graph.resolve(&record.to_spec()?)
}

fn coords_arg(arg: &str, g: usize) -> Result<Vec<Rational>> {
    let coords = if arg.trim().is_empty() {
        Vec::new()
    } else {
        arg.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?
    };
    if coords.len() != g {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: coords.len(),
        });
    }
    Ok(coords)
}

fn rationals(v: &[Rational]) -> Value {
    json!(v.iter().map(format_rational).collect::<Vec<_>>())
}

fn jac_point(p: &JacPoint) -> Value {
    rationals(&p.coords)
}

fn divisor_json(graph: &MetricGraph, d: &Divisor) -> Value {
    serde_json::to_value(divisor_file(graph, d).divisor).expect("divisor serializes")
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn report(command: &str, graph: &MetricGraph, result: Value, checks: Vec<Check>) -> Output {
    Output::Report(Report {
        command: command.to_string(),
        curve: graph.name().map(str::to_string),
        result,
        checks,
        elapsed_ms: None,
    })
}

fn run(command: &Command) -> Result<Output> {
    match command {
        Command::Info(c) => {
            let g = load(c)?;
            let result = json!({
                "vertices": g.num_vertices(),
                "edges": g.num_edges(),
                "genus": g.genus(),
                "total_length": format_rational(&g.total_length()),
                "basepoint": g.point_label(g.basepoint()),
                "canonical": divisor_json(&g, &g.canonical_divisor()),
            });
            Ok(report("info", &g, result, vec![]))
        }
        Command::Gram(c) => {
            let g = load(c)?;
            let jac = Jacobian::new(&g);
            let basis: Vec<Value> = jac
                .form()
                .basis()
                .iter()
                .map(|cycle| {
                    json!(cycle
                        .support()
                        .map(|e| json!({"edge": g.edge(e).id, "coeff": cycle.0[e]}))
                        .collect::<Vec<_>>())
                })
                .collect();
            let gram = jac.form().gram();
            let rows: Vec<Value> = gram.to_rows().iter().map(|r| rationals(r)).collect();
            let result = json!({
                "basis": basis,
                "gram": rows,
                "determinant": format_rational(&gram.determinant()),
            });
            Ok(report("gram", &g, result, vec![verify::check_gram(&jac)]))
        }
        Command::AbelJacobi { curve, divisor } => {
            let g = load(curve)?;
            let d = divisor_arg(&g, divisor)?;
            let jac = Jacobian::new(&g);
            let image = jac.abel_jacobi(&d);
            let result = json!({
                "degree": d.degree(),
                "coords": jac_point(&image),
                "canonical": jac_point(&jac.canonical(&image)),
            });
            Ok(report("abel-jacobi", &g, result, vec![]))
        }
        Command::LinEquiv { curve, d1, d2 } => {
            let g = load(curve)?;
            let (a, b) = (divisor_arg(&g, d1)?, divisor_arg(&g, d2)?);
            let jac = Jacobian::new(&g);
            let delta = jac.canonical(&jac.abel_jacobi(&(&a - &b)));
            let result = json!({
                "equivalent": jac.lin_equiv(&a, &b),
                "degree_match": a.degree() == b.degree(),
                "jac_delta": jac_point(&delta),
            });
            Ok(report("lin-equiv", &g, result, vec![]))
        }
        Command::ThetaEval { curve, x } => {
            let g = load(curve)?;
            let jac = Jacobian::new(&g);
            let x = coords_arg(x, jac.genus())?;
            let value = theta_eval(&x, jac.form())?;
            let result = json!({
                "value": format_rational(&value.value),
                "argmax": value.argmax,
                "on_divisor": value.is_corner(),
            });
            Ok(report("theta-eval", &g, result, vec![]))
        }
        Command::Kappa(c) => {
            let g = load(c)?;
            let jac = Jacobian::new(&g);
            let kappa = compute_kappa(&jac)?;
            let doubles = kappa.doubles_to_canonical(&jac);
            let result = json!({
                "kappa": jac_point(&jac.canonical(&kappa.kappa)),
                "k0": jac_point(&jac.canonical(&kappa.k0)),
                "check_2k0_eq_muK": doubles,
            });
            Ok(report("kappa", &g, result, vec![Check::new("kappa_doubles_to_canonical", doubles)]))
        }
        Command::Pullback { curve, shift } => {
            let g = load(curve)?;
            let jac = Jacobian::new(&g);
            let shift = match shift {
                Some(s) => JacPoint::new(coords_arg(s, jac.genus())?),
                None => JacPoint::zero(jac.genus()),
            };
            let d = pullback_divisor(&jac, &shift)?;
            let result = json!({ "degree": d.degree(), "divisor": divisor_json(&g, &d) });
            Ok(report("pullback", &g, result, vec![]))
        }
        Command::ThetaChars { curve, dot } => {
            let g = load(curve)?;
            let jac = Jacobian::new(&g);
            let kappa = compute_kappa(&jac)?;
            let (rows, table) = theta_characteristics(&jac, &kappa)?;
            let mut records = Vec::with_capacity(rows.len());
            for r in &rows {
                let mut rec = json!({
                    "gamma": bits_string(&r.bits),
                    "divisor": divisor_json(&g, &r.divisor),
                    "class": jac_point(&jac.canonical(&r.class)),
                    "half_gamma": jac_point(&jac.canonical(&r.half_gamma)),
                    "effective": r.effective,
                });
                if let Some(dir) = dot {
                    let name = format!("gamma_{}", bits_string(&r.bits));
                    let path = dir.join(format!("{name}.dot"));
                    let text = orientation_for(&jac, &r.bits)?.to_dot(&name);
                    std::fs::create_dir_all(dir)
                        .and_then(|_| std::fs::write(&path, text))
                        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    rec["dot"] = json!(path.display().to_string());
                }
                records.push(rec);
            }
            let checks = vec![
                Check::new("characteristic_differences_are_half_gamma", table.difference_is_half_gamma),
                Check::new("characteristics_double_to_canonical", table.doubles_to_canonical),
                Check::new("exactly_one_non_effective", table.unique_non_effective),
                Check::new("characteristics_distinct", table.injective),
            ];
            Ok(report("theta-chars", &g, json!(records), checks))
        }
        Command::Reduce { curve, divisor, base } => {
            let g = load(curve)?;
            let d = divisor_arg(&g, divisor)?;
            let q = match base {
                Some(b) => point_arg(&g, b)?,
                None => g.basepoint().clone(),
            };
            let (model, chips) = to_unit_model(&g, &d, std::slice::from_ref(&q))?;
            let base_node = model.node_of(&q).expect("base lies on the grid");
            let reduced = dhar_reduce(&model, &chips, base_node);
            let result = json!({
                "reduced": divisor_json(&g, &model.to_divisor(&reduced)),
                "effective": d.degree() >= 0 && reduced[base_node] >= 0,
                "scale": model.scale().to_string(),
            });
            Ok(report("reduce", &g, result, vec![]))
        }
        Command::Verify { curve, seed } => {
            let g = load(curve)?;
            let opts = VerifyOptions {
                seed: *seed,
                ..VerifyOptions::default()
            };
            let summary = verify::verify(&g, &opts)?;
            let result = json!({
                "genus": summary.genus,
                "characteristics": summary.characteristics,
                "non_effective": summary.non_effective,
                "oracle": summary.oracle,
                "seed": seed,
            });
            Ok(report("verify", &g, result, summary.checks))
        }
        Command::ExportDot {
            curve,
            gamma,
            sources,
        } => {
            let g = load(curve)?;
            let jac = Jacobian::new(&g);
            let (name, orientation) = match (gamma, sources) {
                (Some(bits), _) => {
                    let bits = parse_bits(bits, jac.genus())?;
                    (format!("gamma_{}", bits_string(&bits)), orientation_for(&jac, &bits)?)
                }
                (None, Some(list)) => {
                    let pts = list
                        .split(';')
                        .map(|s| point_arg(&g, s.trim()))
                        .collect::<Result<Vec<_>>>()?;
                    ("sources".to_string(), Orientation::gradient(&g, &pts)?)
                }
                (None, None) => (
                    "basepoint".to_string(),
                    orientation_for(&jac, &bits_of(0, jac.genus()))?,
                ),
            };
            Ok(Output::Raw(orientation.to_dot(&name)))
        }
    }
}

fn parse_bits(s: &str, g: usize) -> Result<Vec<u8>> {
    let bits: Vec<u8> = s
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Parse(format!("not a bit string: {s:?}"))),
        })
        .collect::<Result<_>>()?;
    if bits.len() != g {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: bits.len(),
        });
    }
    Ok(bits)
}

/// Orientation behind a characteristic row: the basepoint flow for `γ = 0`.
fn orientation_for(jac: &Jacobian, bits: &[u8]) -> Result<Orientation> {
    let g = jac.graph();
    if bits.iter().all(|&b| b == 0) {
        Orientation::gradient(g, std::slice::from_ref(g.basepoint()))
    } else {
        Orientation::for_gamma(g, &gamma_support(bits, jac.form().basis(), g))
    }
}
