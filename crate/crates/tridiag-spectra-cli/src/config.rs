//! Run configuration: command-line flags merged with an optional JSON
//! config file, with flags taking precedence key by key.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;
use tridiag_spectra::operators::{JacobiOperatorParams, QCase, QOperatorParams};

use crate::output::Value;

/// Operator case selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    /// Differential operator on (−1, 1) with Jacobi-polynomial data.
    Jacobi,
    /// Bounded q-difference operator on the lattice {qᵏ} (a-shift).
    Q1,
    /// Unbounded q-difference operator on the lattice {qᵏ} (b-shift).
    Q2,
}

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::Jacobi => "jacobi",
            Case::Q1 => "q1",
            Case::Q2 => "q2",
        }
    }
}

/// Verification suite for the `verify` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Tridiag,
    Recurrence,
    Identity,
    Eigenfunction,
    Biortho,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Tridiag => "tridiag",
            Suite::Recurrence => "recurrence",
            Suite::Identity => "identity",
            Suite::Eigenfunction => "eigenfunction",
            Suite::Biortho => "biortho",
            Suite::All => "all",
        }
    }
}

/// Report format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

/// Flags shared by every subcommand. Flags not used by a particular command
/// are accepted and ignored, so one config file can drive all four commands.
#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Operator case (required here or in the config file).
    #[arg(long, value_enum)]
    pub case: Option<Case>,

    /// Jacobi-case exponent α (> −1).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Jacobi-case exponent β (> −1).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Jacobi-case shift parameter δ (sets γ = −(α+δ+1)(β−δ+1)).
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Jacobi-case constant term γ, given directly instead of δ.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,

    /// q-case family parameter a.
    #[arg(long)]
    pub a: Option<f64>,
    /// q-case family parameter b.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// q-case auxiliary parameter c.
    #[arg(long)]
    pub c: Option<f64>,
    /// Lattice base q in (0, 1).
    #[arg(long)]
    pub q: Option<f64>,

    /// Largest coefficient index / polynomial degree (default 8).
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Finite-section size N (defaults: jacobi 800, q1 400, q2 600).
    #[arg(long)]
    pub size: Option<usize>,
    /// Lattice truncation K for q-case sums (default 300).
    #[arg(long)]
    pub lattice: Option<usize>,
    /// Verification suite (verify command; default all).
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Free geometric weight t for the general transform identity
    /// (default: both 0.1 and 0.5).
    #[arg(long)]
    pub t: Option<f64>,
    /// Number of interior θ grid points θ_j = jπ/(T+1) (default 9).
    #[arg(long = "theta-points")]
    pub theta_points: Option<usize>,
    /// Report format (default json).
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// JSON config file with the same keys as the long flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Absolute tolerance for off-band matrix elements (default 1e-10).
    #[arg(long = "tol-offband")]
    pub tol_offband: Option<f64>,
    /// Relative tolerance for in-band matrix elements (default 1e-10).
    #[arg(long = "tol-band-rel")]
    pub tol_band_rel: Option<f64>,
    /// Tolerance for predicted-point vs eigenvalue gaps (default 1e-8).
    #[arg(long = "tol-gap")]
    pub tol_gap: Option<f64>,
    /// Band dilation tolerance for containment checks (default 1e-3).
    #[arg(long = "tol-band-edge")]
    pub tol_band_edge: Option<f64>,
    /// Tolerance for the coefficient-recurrence match
    /// (default 1e-10 jacobi, 1e-11 q1).
    #[arg(long = "tol-recurrence")]
    pub tol_recurrence: Option<f64>,
    /// Absolute tolerance for the general transform identity (default 1e-12).
    #[arg(long = "tol-identity")]
    pub tol_identity: Option<f64>,
    /// Relative tolerance for the transform closed form (default 1e-10).
    #[arg(long = "tol-transform")]
    pub tol_transform: Option<f64>,
    /// Tolerance for direct-eigenfunction residuals (default 1e-10).
    #[arg(long = "tol-eigenfunction")]
    pub tol_eigenfunction: Option<f64>,
    /// Tolerance for the biorthogonality pairing (default 1e-7).
    #[arg(long = "tol-biortho")]
    pub tol_biortho: Option<f64>,
    /// Allowed negativity of the unbounded-case spectrum (default 1e-8).
    #[arg(long = "tol-positivity")]
    pub tol_positivity: Option<f64>,
    /// Allowed negativity of the dual-recurrence support probe
    /// (default 1e-6).
    #[arg(long = "tol-support")]
    pub tol_support: Option<f64>,
}

/// Config-file mirror of the long flags (dashed keys match flag names).
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    case: Option<String>,
    alpha: Option<f64>,
    beta: Option<f64>,
    delta: Option<f64>,
    gamma: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    q: Option<f64>,
    #[serde(rename = "n-max")]
    n_max: Option<usize>,
    size: Option<usize>,
    lattice: Option<usize>,
    suite: Option<String>,
    t: Option<f64>,
    #[serde(rename = "theta-points")]
    theta_points: Option<usize>,
    format: Option<String>,
    #[serde(rename = "tol-offband")]
    tol_offband: Option<f64>,
    #[serde(rename = "tol-band-rel")]
    tol_band_rel: Option<f64>,
    #[serde(rename = "tol-gap")]
    tol_gap: Option<f64>,
    #[serde(rename = "tol-band-edge")]
    tol_band_edge: Option<f64>,
    #[serde(rename = "tol-recurrence")]
    tol_recurrence: Option<f64>,
    #[serde(rename = "tol-identity")]
    tol_identity: Option<f64>,
    #[serde(rename = "tol-transform")]
    tol_transform: Option<f64>,
    #[serde(rename = "tol-eigenfunction")]
    tol_eigenfunction: Option<f64>,
    #[serde(rename = "tol-biortho")]
    tol_biortho: Option<f64>,
    #[serde(rename = "tol-positivity")]
    tol_positivity: Option<f64>,
    #[serde(rename = "tol-support")]
    tol_support: Option<f64>,
}

/// All tolerances after defaulting, echoed into every report.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub offband: f64,
    pub band_rel: f64,
    pub gap: f64,
    pub band_edge: f64,
    pub recurrence: f64,
    pub identity: f64,
    pub transform: f64,
    pub eigenfunction: f64,
    pub biortho: f64,
    pub positivity: f64,
    pub support: f64,
}

/// Resolved Jacobi-case setup; `delta` is kept when the user supplied the
/// shift parameter (the spectral prediction is sharper through it).
#[derive(Debug, Clone, Copy)]
pub struct JacobiSetup {
    pub params: JacobiOperatorParams,
    pub delta: Option<f64>,
}

/// Fully resolved run configuration.
#[derive(Debug)]
pub struct RunConfig {
    pub case: Case,
    pub jacobi: Option<JacobiSetup>,
    pub q: Option<QOperatorParams>,
    pub n_max: usize,
    pub size: usize,
    pub lattice: usize,
    pub suite: Suite,
    pub t: Option<f64>,
    pub theta_points: usize,
    pub format: OutputFormat,
    pub tol: Tolerances,
}

impl RunConfig {
    /// The Jacobi setup, for commands that already checked the case.
    pub fn jacobi(&self) -> &JacobiSetup {
        self.jacobi.as_ref().expect("jacobi case resolved")
    }

    /// The q-case operator parameters, for commands that already checked
    /// the case.
    pub fn q_params(&self) -> &QOperatorParams {
        self.q.as_ref().expect("q case resolved")
    }
}

fn parse_enum<T: ValueEnum>(value: &str, what: &str) -> Result<T, String> {
    T::from_str(value, false).map_err(|_| format!("unknown {what} `{value}` in config file"))
}

/// Merges flags over the optional config file and applies defaults and
/// validation. Every failure is a configuration error (exit code 2).
pub fn resolve(args: &CommonArgs) -> Result<RunConfig, String> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| format!("invalid config file {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };

    let case = match (args.case, &file.case) {
        (Some(case), _) => case,
        (None, Some(s)) => parse_enum(s, "case")?,
        (None, None) => return Err("missing required parameter `case`".to_owned()),
    };
    let suite = match (args.suite, &file.suite) {
        (Some(s), _) => s,
        (None, Some(s)) => parse_enum(s, "suite")?,
        (None, None) => Suite::All,
    };
    let format = match (args.format, &file.format) {
        (Some(f), _) => f,
        (None, Some(s)) => parse_enum(s, "format")?,
        (None, None) => OutputFormat::Json,
    };

    let pick = |flag: Option<f64>, file_value: Option<f64>| flag.or(file_value);
    let need = |value: Option<f64>, name: &str| {
        value.ok_or_else(|| format!("case {} requires parameter `{name}`", case.name()))
    };

    let mut jacobi = None;
    let mut q = None;
    match case {
        Case::Jacobi => {
            let alpha = need(pick(args.alpha, file.alpha), "alpha")?;
            let beta = need(pick(args.beta, file.beta), "beta")?;
            let delta = pick(args.delta, file.delta);
            let gamma = pick(args.gamma, file.gamma);
            let setup = match (delta, gamma) {
                (Some(_), Some(_)) => {
                    return Err("give `delta` or `gamma`, not both".to_owned());
                }
                (Some(d), None) => JacobiSetup {
                    params: JacobiOperatorParams::from_delta(alpha, beta, d)
                        .map_err(|e| e.to_string())?,
                    delta: Some(d),
                },
                (None, Some(g)) => JacobiSetup {
                    params: JacobiOperatorParams::from_gamma(alpha, beta, g)
                        .map_err(|e| e.to_string())?,
                    delta: None,
                },
                (None, None) => {
                    return Err("case jacobi requires `delta` or `gamma`".to_owned());
                }
            };
            jacobi = Some(setup);
        }
        Case::Q1 | Case::Q2 => {
            let a = need(pick(args.a, file.a), "a")?;
            let b = need(pick(args.b, file.b), "b")?;
            let c = need(pick(args.c, file.c), "c")?;
            let base = need(pick(args.q, file.q), "q")?;
            let shift = if case == Case::Q1 {
                QCase::ShiftA
            } else {
                QCase::ShiftB
            };
            q = Some(QOperatorParams::new(a, b, c, base, shift).map_err(|e| e.to_string())?);
        }
    }

    let size = args.size.or(file.size).unwrap_or(match case {
        Case::Jacobi => 800,
        Case::Q1 => 400,
        Case::Q2 => 600,
    });
    if size == 0 {
        return Err("`size` must be at least 1".to_owned());
    }
    let lattice = args.lattice.or(file.lattice).unwrap_or(300);
    if lattice < 3 {
        return Err("`lattice` must be at least 3".to_owned());
    }
    let theta_points = args.theta_points.or(file.theta_points).unwrap_or(9);
    if theta_points == 0 {
        return Err("`theta-points` must be at least 1".to_owned());
    }
    if let Some(t) = pick(args.t, file.t) {
        if !(t.abs() < 1.0) {
            return Err(format!("`t` must satisfy |t| < 1, got {t}"));
        }
    }

    let tol = Tolerances {
        offband: pick(args.tol_offband, file.tol_offband).unwrap_or(1e-10),
        band_rel: pick(args.tol_band_rel, file.tol_band_rel).unwrap_or(1e-10),
        gap: pick(args.tol_gap, file.tol_gap).unwrap_or(1e-8),
        band_edge: pick(args.tol_band_edge, file.tol_band_edge).unwrap_or(1e-3),
        recurrence: pick(args.tol_recurrence, file.tol_recurrence).unwrap_or(match case {
            Case::Jacobi => 1e-10,
            Case::Q1 | Case::Q2 => 1e-11,
        }),
        identity: pick(args.tol_identity, file.tol_identity).unwrap_or(1e-12),
        transform: pick(args.tol_transform, file.tol_transform).unwrap_or(1e-10),
        eigenfunction: pick(args.tol_eigenfunction, file.tol_eigenfunction).unwrap_or(1e-10),
        biortho: pick(args.tol_biortho, file.tol_biortho).unwrap_or(1e-7),
        positivity: pick(args.tol_positivity, file.tol_positivity).unwrap_or(1e-8),
        support: pick(args.tol_support, file.tol_support).unwrap_or(1e-6),
    };
    for (name, value) in [
        ("tol-offband", tol.offband),
        ("tol-band-rel", tol.band_rel),
        ("tol-gap", tol.gap),
        ("tol-band-edge", tol.band_edge),
        ("tol-recurrence", tol.recurrence),
        ("tol-identity", tol.identity),
        ("tol-transform", tol.transform),
        ("tol-eigenfunction", tol.eigenfunction),
        ("tol-biortho", tol.biortho),
        ("tol-positivity", tol.positivity),
        ("tol-support", tol.support),
    ] {
        if !(value > 0.0) {
            return Err(format!("`{name}` must be positive, got {value}"));
        }
    }

    Ok(RunConfig {
        case,
        jacobi,
        q,
        n_max: args.n_max.or(file.n_max).unwrap_or(8),
        size,
        lattice,
        suite,
        t: pick(args.t, file.t),
        theta_points,
        format,
        tol,
    })
}

/// The resolved configuration as a report value (stable key order, no
/// paths or environment data so reports stay byte-identical).
pub fn config_value(command: &'static str, cfg: &RunConfig) -> Value {
    let mut fields = vec![
        ("command", Value::Str(command.to_owned())),
        ("case", Value::Str(cfg.case.name().to_owned())),
    ];
    match (cfg.case, &cfg.jacobi, &cfg.q) {
        (Case::Jacobi, Some(setup), _) => {
            fields.push(("alpha", Value::Float(setup.params.alpha)));
            fields.push(("beta", Value::Float(setup.params.beta)));
            fields.push((
                "delta",
                setup.delta.map_or(Value::Null, Value::Float),
            ));
            fields.push(("gamma", Value::Float(setup.params.gamma)));
        }
        (_, _, Some(params)) => {
            fields.push(("a", Value::Float(params.a)));
            fields.push(("b", Value::Float(params.b)));
            fields.push(("c", Value::Float(params.c)));
            fields.push(("q", Value::Float(params.q)));
        }
        _ => {}
    }
    fields.push(("n_max", Value::Int(cfg.n_max as i64)));
    fields.push(("size", Value::Int(cfg.size as i64)));
    fields.push(("lattice", Value::Int(cfg.lattice as i64)));
    fields.push(("suite", Value::Str(cfg.suite.name().to_owned())));
    fields.push(("t", cfg.t.map_or(Value::Null, Value::Float)));
    fields.push(("theta_points", Value::Int(cfg.theta_points as i64)));
    fields.push(("format", Value::Str(cfg.format.name().to_owned())));
    fields.push((
        "tolerances",
        Value::Object(vec![
            ("offband", Value::Float(cfg.tol.offband)),
            ("band-rel", Value::Float(cfg.tol.band_rel)),
            ("gap", Value::Float(cfg.tol.gap)),
            ("band-edge", Value::Float(cfg.tol.band_edge)),
            ("recurrence", Value::Float(cfg.tol.recurrence)),
            ("identity", Value::Float(cfg.tol.identity)),
            ("transform", Value::Float(cfg.tol.transform)),
            ("eigenfunction", Value::Float(cfg.tol.eigenfunction)),
            ("biortho", Value::Float(cfg.tol.biortho)),
            ("positivity", Value::Float(cfg.tol.positivity)),
            ("support", Value::Float(cfg.tol.support)),
        ]),
    ));
    Value::Object(fields)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q1_args() -> CommonArgs {
        CommonArgs {
            case: Some(Case::Q1),
            a: Some(0.5),
            b: Some(0.0),
            c: Some(3.0),
            q: Some(0.5),
            ..CommonArgs::default()
        }
    }

    #[test]
    fn defaults_follow_the_case() {
        let cfg = resolve(&q1_args()).unwrap();
        assert_eq!(cfg.size, 400);
        assert_eq!(cfg.lattice, 300);
        assert_eq!(cfg.n_max, 8);
        assert_eq!(cfg.theta_points, 9);
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.tol.recurrence, 1e-11);

        let cfg = resolve(&CommonArgs {
            case: Some(Case::Jacobi),
            alpha: Some(0.0),
            beta: Some(0.0),
            delta: Some(0.0),
            ..CommonArgs::default()
        })
        .unwrap();
        assert_eq!(cfg.size, 800);
        assert_eq!(cfg.tol.recurrence, 1e-10);
        assert_eq!(cfg.jacobi().params.gamma, -1.0);
    }

    #[test]
    fn missing_parameters_are_reported_by_name() {
        let err = resolve(&CommonArgs {
            case: Some(Case::Q2),
            a: Some(0.5),
            ..CommonArgs::default()
        })
        .unwrap_err();
        assert!(err.contains("`b`"), "{err}");

        let err = resolve(&CommonArgs {
            case: Some(Case::Jacobi),
            alpha: Some(0.0),
            beta: Some(0.0),
            ..CommonArgs::default()
        })
        .unwrap_err();
        assert!(err.contains("delta"), "{err}");
    }

    #[test]
    fn delta_and_gamma_conflict() {
        let err = resolve(&CommonArgs {
            case: Some(Case::Jacobi),
            alpha: Some(0.0),
            beta: Some(0.0),
            delta: Some(1.0),
            gamma: Some(-1.0),
            ..CommonArgs::default()
        })
        .unwrap_err();
        assert!(err.contains("not both"), "{err}");
    }

    #[test]
    fn flag_overrides_are_rejected_when_invalid() {
        let mut args = q1_args();
        args.tol_gap = Some(-1.0);
        assert!(resolve(&args).unwrap_err().contains("tol-gap"));
        let mut args = q1_args();
        args.lattice = Some(2);
        assert!(resolve(&args).unwrap_err().contains("lattice"));
        let mut args = q1_args();
        args.t = Some(1.5);
        assert!(resolve(&args).unwrap_err().contains("|t| < 1"));
    }
}
