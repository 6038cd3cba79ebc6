mod format;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use matgauge::extension::{self, verify_direct_sum_family, verify_extension_counterexamples};
use matgauge::io::{self, ElementFile};
use matgauge::laws::{
    check_Linf_norm_laws, check_c_proper, check_gauge_axioms, check_matrix_compatible, check_normality,
    over_standard_spaces, GaugeFamily,
};
use matgauge::maxgauge::{check_dominance, uniqueness_probe};
use matgauge::unitization::{check_unitization_laws, order_unit_formula, UnitizationGauge};
use matgauge::{
    catalog, gauge_h, gauge_norm, gauge_u, linalg, nu_max, nu_max_diag_oracle, sample_element,
    CheckReport, ComplexMatrix, ConcreteGauge, Error, Functional, GaugeKind, LevelElement, OperatorSpace, SampleMode,
    SolverConfig, UnitizedElement,
};

use format::sig6;

const DEFAULT_TRIALS: usize = 200;

#[derive(Parser, Debug)]
#[command(name = "matgauge", version, about = "Matrix gauges on concrete operator spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Global {
    /// Slack tolerance for checks (default depends on the command)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Run seed; overrides the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random trials per check
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// JSON solver config; absent fields keep their defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Which {
    Nu,
    H,
    NuE,
    NuMax,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LawGauge {
    Nu,
    H,
    NuE,
    NuMax,
    U,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Law {
    MatrixCompatible,
    GaugeAxioms,
    CProper,
    Normality,
    LinfNorm,
    Unitization,
    Dominance,
    Uniqueness,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Example {
    DegenerateLine,
    TwoGenerator,
    LineFunctional,
    PairFunctional,
    PairFamily,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summarize a space: dimensions, representation, unit
    Info {
        #[arg(long)]
        space: PathBuf,
    },
    /// Evaluate gauges on an element (sampled from the seed when no element is given)
    Gauge {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Gauge-induced norm max(h(z), h(iz)) next to the spectral norm
    Norm {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: Option<PathBuf>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Maximal gauge, optionally cross-checked by the diagonal grid oracle
    NuMax {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: Option<PathBuf>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = catalog::ORACLE_GRID)]
        grid: usize,
    },
    /// Unitization gauge of (A, X); X is read from the element file's "X" field
    UnitizeGauge {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    /// Randomized law check, on a space or across the standard random spaces
    Check {
        #[arg(long, value_enum)]
        law: Law,
        #[arg(long)]
        space: Option<PathBuf>,
        /// Gauges for matrix-compatible, gauge-axioms and c-proper
        #[arg(long, value_enum, value_delimiter = ',', default_value = "nu,h,nu-e,u")]
        which: Vec<LawGauge>,
    },
    /// Real complete positivity / contractivity of a functional and its extension bound
    ExtensionCheck {
        #[arg(long)]
        functional: PathBuf,
        /// `ambient` or a comma-separated diagonal, e.g. 1,1,2
        #[arg(long, default_value = "ambient")]
        unit: String,
    },
    /// Regression suite over the bundled worked examples
    VerifyExamples {
        #[arg(long, value_enum, default_value_t = Example::All)]
        example: Example,
        #[arg(long, value_delimiter = ',', default_value = "3,4,10")]
        n: Vec<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Info { .. } => "info",
            Command::Gauge { .. } => "gauge",
            Command::Norm { .. } => "norm",
            Command::NuMax { .. } => "nu-max",
            Command::UnitizeGauge { .. } => "unitize-gauge",
            Command::Check { .. } => "check",
            Command::ExtensionCheck { .. } => "extension-check",
            Command::VerifyExamples { .. } => "verify-examples",
        }
    }

    fn inputs(&self) -> Vec<PathBuf> {
        let mut v = Vec::new();
        match self {
            Command::Info { space } => v.push(space.clone()),
            Command::UnitizeGauge { space, element } => v.extend([space.clone(), element.clone()]),
            Command::Gauge { space, element, .. } | Command::Norm { space, element, .. } | Command::NuMax { space, element, .. } => {
                v.push(space.clone());
                v.extend(element.clone());
            }
            Command::Check { space, .. } => v.extend(space.clone()),
            Command::ExtensionCheck { functional, .. } => v.push(functional.clone()),
            Command::VerifyExamples { .. } => {}
        }
        v
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    argv: Vec<String>,
    inputs: Vec<PathBuf>,
    config: SolverConfig,
    versions: Value,
    wall_clock_seconds: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Clean,
    Violated,
    Indeterminate,
}

struct Outcome {
    result: Value,
    text: String,
    verdict: Verdict,
}

impl Outcome {
    fn clean(result: Value, text: String) -> Self {
        Self {
            result,
            text,
            verdict: Verdict::Clean,
        }
    }
}

fn exit_for_error(e: &Error) -> u8 {
    match e {
        Error::Indeterminate { .. } | Error::SamplingExhausted { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let cfg = match resolve_config(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for_error(&e));
        }
    };
    match run(&cli.cmd, &cli.global, &cfg) {
        Ok(out) => {
            match cli.global.format {
                Format::Text => print!("{}", out.text),
                Format::Json => {
                    let manifest = RunManifest {
                        command: cli.cmd.name().to_string(),
                        argv: std::env::args().skip(1).collect(),
                        inputs: cli.cmd.inputs(),
                        config: cfg,
                        versions: json!({ "matgauge": env!("CARGO_PKG_VERSION") }),
                        wall_clock_seconds: started.elapsed().as_secs_f64(),
                    };
                    let doc = json!({ "manifest": manifest, "result": out.result });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
                }
            }
            ExitCode::from(match out.verdict {
                Verdict::Clean => 0,
                Verdict::Violated => 1,
                Verdict::Indeterminate => 3,
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for_error(&e))
        }
    }
}

fn resolve_config(g: &Global) -> matgauge::Result<SolverConfig> {
    let mut cfg = match &g.config {
        Some(p) => SolverConfig::from_json(&io::read_text(p)?).map_err(|e| io::with_file(e, p))?,
        None => SolverConfig::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("--tol must be nonnegative and finite, got {t}")));
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cmd: &Command, g: &Global, cfg: &SolverConfig) -> matgauge::Result<Outcome> {
    let trials = g.trials.unwrap_or(DEFAULT_TRIALS);
    match cmd {
        Command::Info { space } => info(&io::load_space(space)?),
        Command::Gauge {
            space,
            element,
            which,
            level,
        } => {
            let s = io::load_space(space)?;
            let z = element_or_sample(&s, element.as_deref(), *level, cfg)?.element;
            gauges(&s, &z, *which, cfg)
        }
        Command::Norm { space, element, level } => {
            let s = io::load_space(space)?;
            let z = element_or_sample(&s, element.as_deref(), *level, cfg)?.element;
            let norm = gauge_norm(&z);
            let spectral = linalg::spectral_norm(z.realized());
            Ok(Outcome::clean(
                json!({ "level": z.level(), "norm": norm, "spectral_norm": spectral }),
                format!("level: {}\nnorm: {}\nspectral norm: {}\n", z.level(), sig6(norm), sig6(spectral)),
            ))
        }
        Command::NuMax {
            space,
            element,
            level,
            oracle,
            grid,
        } => {
            let s = io::load_space(space)?;
            let z = element_or_sample(&s, element.as_deref(), *level, cfg)?.element;
            max_gauge(&s, &z, oracle.then_some(*grid), cfg)
        }
        Command::UnitizeGauge { space, element } => {
            let s = io::load_space(space)?;
            let ElementFile { element: a, x } = io::load_element(&s, element)?;
            let n = a.level();
            let e = UnitizedElement::new(a, x.unwrap_or_else(|| ComplexMatrix::zeros(n, n)))?;
            let u = gauge_u(&e, cfg);
            let cross = order_unit_formula(&e, cfg);
            Ok(Outcome::clean(
                json!({ "level": n, "u": u, "order_unit_formula": cross }),
                format!("level: {n}\nu: {}\norder-unit formula: {}\n", sig6(u), sig6(cross)),
            ))
        }
        Command::Check { law, space, which } => {
            let space = space.as_deref().map(io::load_space).transpose()?;
            let r = check(*law, space.as_ref(), which, trials, g.tol, cfg)?;
            Ok(report_outcome(r))
        }
        Command::ExtensionCheck { functional, unit } => extension_check(functional, unit, trials, g.tol.unwrap_or(1e-9), cfg),
        Command::VerifyExamples { example, n } => verify_examples(*example, n, trials, g.tol.unwrap_or(1e-9), cfg),
    }
}

fn report_outcome(r: CheckReport) -> Outcome {
    let verdict = if r.is_clean() { Verdict::Clean } else { Verdict::Violated };
    Outcome {
        text: format::report(&r),
        result: serde_json::to_value(&r).expect("serializable"),
        verdict,
    }
}

fn element_or_sample(space: &OperatorSpace, path: Option<&Path>, level: Option<usize>, cfg: &SolverConfig) -> matgauge::Result<ElementFile> {
    match path {
        Some(p) => {
            let file = io::load_element(space, p)?;
            if let Some(l) = level.filter(|&l| l != file.element.level()) {
                return Err(Error::InvalidArgument(format!(
                    "--level {l} does not match the element level {}",
                    file.element.level()
                )));
            }
            Ok(file)
        }
        None => Ok(ElementFile {
            element: sample_element(space, level.unwrap_or(1), cfg.seed, SampleMode::Generic)?,
            x: None,
        }),
    }
}

fn info(s: &OperatorSpace) -> matgauge::Result<Outcome> {
    let unit = s.designated_unit().map(|u| u.diagonal().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>());
    let order_unit = s.order_unit_coeffs().map(|c| c.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>());
    let repr = if s.is_diagonal() { "diagonal" } else { "full" };
    let self_adjoint = matgauge::star_closure(s).dim() == s.dim();
    let mut text = String::new();
    let _ = writeln!(text, "dimension: {}", s.dim());
    let _ = writeln!(text, "ambient dimension: {}", s.ambient_dim());
    let _ = writeln!(text, "representation: {repr}");
    let _ = writeln!(text, "self-adjoint: {self_adjoint}");
    let _ = writeln!(
        text,
        "unit: {}",
        match (s.unit_coeffs(), s.order_unit_coeffs()) {
            (Some(_), _) => "designated",
            (None, Some(_)) => "identity (in span)",
            (None, None) => "none",
        }
    );
    Ok(Outcome::clean(
        json!({
            "dimension": s.dim(),
            "ambient_dim": s.ambient_dim(),
            "representation": repr,
            "self_adjoint": self_adjoint,
            "unit_diagonal": unit,
            "order_unit_coeffs": order_unit,
        }),
        text,
    ))
}

fn gauges(s: &OperatorSpace, z: &LevelElement, which: Which, cfg: &SolverConfig) -> matgauge::Result<Outcome> {
    let kinds = match which {
        Which::Nu => vec![GaugeKind::Nu],
        Which::H => vec![GaugeKind::H],
        Which::NuE => vec![GaugeKind::NuE],
        Which::NuMax => vec![GaugeKind::NuMax],
        Which::All => vec![GaugeKind::Nu, GaugeKind::H, GaugeKind::NuE],
    };
    let mut values = serde_json::Map::new();
    let mut text = format!("level: {}\n", z.level());
    for k in kinds {
        let v = ConcreteGauge::new(s, k, cfg.clone()).eval(z)?;
        values.insert(k.name().to_string(), json!(v));
        let _ = writeln!(text, "{k}: {}", sig6(v));
    }
    Ok(Outcome::clean(json!({ "level": z.level(), "gauges": values }), text))
}

fn max_gauge(s: &OperatorSpace, z: &LevelElement, grid: Option<usize>, cfg: &SolverConfig) -> matgauge::Result<Outcome> {
    let r = nu_max(s, z, cfg)?;
    let mut text = format!("level: {}\nnu-max: {}\n", z.level(), sig6(r.value));
    let _ = writeln!(text, "iterations: {}\nconverged: {}", r.iterations, r.converged);
    let mut result = json!({
        "level": z.level(),
        "value": r.value,
        "iterations": r.iterations,
        "converged": r.converged,
        "witness": r.witness.as_ref().map(|p| p.coeffs().iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()),
    });
    if let Some(p) = &r.witness {
        // How accretive the witness is and how close it gets to the value.
        let accretivity = linalg::lambda_min(&p.real_part())?;
        let attained = gauge_h(&z.add(p)?);
        let _ = writeln!(text, "witness min eig Re(p): {}", sig6(accretivity));
        let _ = writeln!(text, "witness h(z+p): {}", sig6(attained));
        result["witness_min_eig"] = json!(accretivity);
        result["witness_h"] = json!(attained);
    }
    if let Some(grid) = grid {
        let o = nu_max_diag_oracle(s, z, grid)?;
        let _ = writeln!(text, "oracle: {}\noracle gap: {}", sig6(o), sig6((r.value - o).abs()));
        result["oracle"] = json!(o);
        result["oracle_gap"] = json!((r.value - o).abs());
    }
    let verdict = if r.converged { Verdict::Clean } else { Verdict::Indeterminate };
    Ok(Outcome { result, text, verdict })
}

fn default_law_tol(law: Law) -> f64 {
    match law {
        Law::Unitization => 1e-5,
        Law::Dominance | Law::Uniqueness => 1e-4,
        _ => 1e-8,
    }
}

fn check(law: Law, space: Option<&OperatorSpace>, which: &[LawGauge], trials: usize, tol: Option<f64>, cfg: &SolverConfig) -> matgauge::Result<CheckReport> {
    let law_tol = tol.unwrap_or(default_law_tol(law));
    let name = law.to_possible_value().expect("no skipped variants").get_name().to_string();
    let run = |s: &OperatorSpace, trials: usize, seed: u64| -> matgauge::Result<CheckReport> {
        match law {
            Law::MatrixCompatible | Law::GaugeAxioms | Law::CProper => {
                let mut merged = CheckReport::new(name.clone(), law_tol);
                for &w in which {
                    let r = match w {
                        LawGauge::U => {
                            let g = UnitizationGauge::new(s, cfg.clone(), cfg.level_cap);
                            run_family(law, &g, trials, seed, tol.unwrap_or(1e-5))?
                        }
                        _ => {
                            let kind = match w {
                                LawGauge::Nu => GaugeKind::Nu,
                                LawGauge::H => GaugeKind::H,
                                LawGauge::NuE => GaugeKind::NuE,
                                _ => GaugeKind::NuMax,
                            };
                            run_family(law, &ConcreteGauge::new(s, kind, cfg.clone()), trials, seed, law_tol)?
                        }
                    };
                    merged.absorb(r);
                }
                Ok(merged)
            }
            Law::Normality => check_normality(s, cfg.level_cap, trials, seed, law_tol),
            Law::LinfNorm => check_Linf_norm_laws(s, cfg.level_cap, trials, seed, law_tol),
            Law::Unitization => check_unitization_laws(s, trials, seed, cfg, law_tol),
            Law::Dominance => check_dominance(s, trials, seed, cfg, law_tol),
            Law::Uniqueness => uniqueness_probe(s, trials, seed, cfg, law_tol),
        }
    };
    match space {
        Some(s) => run(s, trials, cfg.seed),
        None => over_standard_spaces(&name, law_tol, trials, cfg.seed, run),
    }
}

fn run_family<G: GaugeFamily>(law: Law, g: &G, trials: usize, seed: u64, tol: f64) -> matgauge::Result<CheckReport> {
    let mut r = match law {
        Law::MatrixCompatible => check_matrix_compatible(g, trials, seed, tol)?,
        Law::GaugeAxioms => check_gauge_axioms(g, trials, seed, tol)?,
        _ => check_c_proper(g, trials, seed, tol)?,
    };
    r.law_name = g.name();
    // Gauges may run at different tolerances; keep each one's own figures.
    r.metrics.insert("max_slack".into(), r.max_slack);
    r.metrics.insert("tolerance".into(), r.tolerance);
    Ok(r)
}

fn parse_unit(arg: &str, d: usize) -> matgauge::Result<ComplexMatrix> {
    if arg == "ambient" {
        return Ok(ComplexMatrix::identity(d));
    }
    let diag = arg
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Error::InvalidArgument(format!("--unit `{arg}`: {e}")))?;
    if diag.len() != d {
        return Err(Error::InvalidArgument(format!("--unit needs {d} diagonal entries, got {}", diag.len())));
    }
    Ok(ComplexMatrix::from_real_diag(&diag))
}

fn extension_check(path: &Path, unit: &str, trials: usize, tol: f64, cfg: &SolverConfig) -> matgauge::Result<Outcome> {
    let ff = io::load_functional(path)?;
    let unit = parse_unit(unit, ff.space.ambient_dim())?;
    let f = Functional::new(&ff.space, ff.values)?;
    let cp = extension::is_real_cp(&f, cfg.level_cap, trials, cfg.seed, tol)?;
    let cc = extension::is_real_cc(&f, cfg.level_cap, trials, cfg.seed, tol)?;
    let bound = extension::extension_lower_bound(&f, &unit)?;
    let cpcc = cp.is_clean() && cc.is_clean();
    let obstructed = bound > 1.0 + tol;
    let certified = cpcc && obstructed;
    let mut text = String::new();
    let _ = writeln!(text, "real-cp: {}", if cp.is_clean() { "clean" } else { "VIOLATED" });
    let _ = writeln!(text, "real-cc: {}", if cc.is_clean() { "clean" } else { "VIOLATED" });
    if let Some(s) = cc.metrics.get("exact_sup") {
        let _ = writeln!(text, "exact level-1 contraction supremum: {}", sig6(*s));
    }
    let _ = writeln!(text, "extension lower bound at the unit: {}", sig6(bound));
    let _ = writeln!(
        text,
        "extension: {}",
        if certified {
            "IMPOSSIBLE (real-cpcc, yet every positive extension exceeds 1 at the unit)"
        } else if obstructed {
            "obstructed, but the functional is not real-cpcc"
        } else {
            "no obstruction found"
        }
    );
    let verdict = if certified || !cpcc { Verdict::Violated } else { Verdict::Clean };
    Ok(Outcome {
        result: json!({
            "real_cp": cp,
            "real_cc": cc,
            "lower_bound": bound,
            "non_extendable_certified": certified,
        }),
        text,
        verdict,
    })
}

fn verify_examples(which: Example, ns: &[usize], trials: usize, tol: f64, cfg: &SolverConfig) -> matgauge::Result<Outcome> {
    use Example::*;
    let selected: Vec<Example> = match which {
        All => vec![DegenerateLine, TwoGenerator, LineFunctional, PairFunctional, PairFamily],
        e => vec![e],
    };
    let mut text = String::new();
    let mut results = serde_json::Map::new();
    let mut clean = true;
    let mut tick = |r: &CheckReport, text: &mut String| {
        clean &= r.is_clean();
        let _ = writeln!(text, "  verdict: {}", if r.is_clean() { "clean" } else { "VIOLATED" });
        for v in r.violations.iter().take(5) {
            let _ = writeln!(text, "  violation: {}", v.witness);
        }
    };
    for e in selected {
        let name = e.to_possible_value().expect("named").get_name().to_string();
        let mut entries = Vec::new();
        match e {
            DegenerateLine => {
                let r = catalog::check_degenerate_line(cfg)?;
                let _ = writeln!(text, "{name}:");
                for k in ["nu_max", "oracle", "nu_e", "gap"] {
                    let _ = writeln!(text, "  {k} = {}", sig6(r.metrics[k]));
                }
                tick(&r, &mut text);
                entries.push(serde_json::to_value(&r).expect("serializable"));
            }
            TwoGenerator => {
                for &n in ns {
                    let r = catalog::check_two_generator(n, cfg)?;
                    let _ = writeln!(text, "{name} n={n}:");
                    for k in ["nu_max", "expected", "nu_max_dykstra", "oracle", "nu_e"] {
                        let _ = writeln!(text, "  {k} = {}", sig6(r.metrics[k]));
                    }
                    tick(&r, &mut text);
                    entries.push(serde_json::to_value(&r).expect("serializable"));
                }
            }
            LineFunctional | PairFunctional => {
                for &n in ns {
                    // Both functionals are certified together; the report covers both.
                    let (r, b) = verify_extension_counterexamples(n, cfg, trials, tol)?;
                    let _ = writeln!(text, "{name} n={n}:");
                    let bound = if e == LineFunctional { b.line_bound } else { b.pair_bound };
                    let _ = writeln!(text, "  lower bound = {}", sig6(bound));
                    if e == PairFunctional {
                        let _ = writeln!(text, "  contraction supremum = {}", sig6(b.pair_sup));
                    }
                    tick(&r, &mut text);
                    entries.push(json!({ "report": r, "bounds": b }));
                }
            }
            PairFamily => {
                let (r, bounds) = verify_direct_sum_family(ns, cfg, trials, tol)?;
                let _ = writeln!(text, "{name}:");
                for b in &bounds {
                    let _ = writeln!(text, "  n={}: bound = {}", b.n, sig6(b.pair_bound));
                }
                tick(&r, &mut text);
                entries.push(json!({ "report": r, "bounds": bounds }));
            }
            All => unreachable!(),
        }
        results.insert(name, Value::Array(entries));
    }
    let _ = writeln!(text, "overall: {}", if clean { "clean" } else { "VIOLATED" });
    Ok(Outcome {
        result: Value::Object(results),
        text,
        verdict: if clean { Verdict::Clean } else { Verdict::Violated },
    })
}
