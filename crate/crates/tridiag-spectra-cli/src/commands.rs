//! The `coeffs`, `spectrum`, and `transform` subcommands.

use tridiag_spectra::families::FamilyData;
use tridiag_spectra::operators::GridFunction;
use tridiag_spectra::spectral::{
    compare_spectrum, predict_jacobi, predict_jacobi_deflated, predict_jacobi_from_gamma,
    predict_q1, predict_q2, truncated_spectrum, v_transform, v_transform_polynomial_closed_form,
    PredictionSource, SpectralPrediction,
};
use tridiag_spectra::tridiag::{closed_jacobi_coeffs, closed_q_coeffs, FamilyPair};

use crate::config::{config_value, Case, OutputFormat, RunConfig};
use crate::output::{csv_float, csv_row, Value};

/// Rendered report plus the overall verdict (exit code 1 when false).
pub struct CommandOutput {
    pub text: String,
    pub pass: bool,
}

fn source_name(source: PredictionSource) -> &'static str {
    match source {
        PredictionSource::JacobiOperator => "jacobi_operator",
        PredictionSource::JacobiDeflated => "jacobi_deflated",
        PredictionSource::BoundedQOperator => "bounded_q",
        PredictionSource::UnboundedQOperator => "unbounded_q",
    }
}

/// Coefficient pair (aₙ, bₙ) of the tridiagonal operator for the run's case.
pub fn closed_coeffs(cfg: &RunConfig, n: usize) -> Result<(f64, f64), String> {
    match cfg.case {
        Case::Jacobi => closed_jacobi_coeffs(&cfg.jacobi().params, n),
        Case::Q1 | Case::Q2 => closed_q_coeffs(cfg.q_params(), n),
    }
    .map_err(|e| e.to_string())
}

/// Closed-form spectral prediction for the run's case. A Jacobi run keeps
/// the sharper δ-based prediction when δ was given; a γ-only run falls back
/// to inverting the shift map (band-only when the inversion is complex).
pub fn prediction(cfg: &RunConfig) -> Result<SpectralPrediction, String> {
    match cfg.case {
        Case::Jacobi => {
            let setup = cfg.jacobi();
            let (alpha, beta) = (setup.params.alpha, setup.params.beta);
            match setup.delta {
                Some(d) if d == 1.0 + beta => predict_jacobi_deflated(alpha, beta),
                Some(d) => predict_jacobi(alpha, beta, d),
                None => predict_jacobi_from_gamma(alpha, beta, setup.params.gamma),
            }
        }
        Case::Q1 => predict_q1(cfg.q_params()),
        Case::Q2 => predict_q2(cfg.q_params()),
    }
    .map_err(|e| e.to_string())
}

/// Values of the degree-`n` orthonormal-family polynomial on the first
/// `k_count` lattice points q⁰, q¹, ….
pub fn lattice_polynomial(
    family: &FamilyData,
    n: usize,
    q: f64,
    k_count: usize,
) -> Result<GridFunction, String> {
    let mut values = Vec::with_capacity(k_count);
    for k in 0..k_count {
        values.push(family.eval(n, q.powi(k as i32)).map_err(|e| e.to_string())?);
    }
    GridFunction::new(values, q).map_err(|e| e.to_string())
}

/// `coeffs`: tabulate the connection pair (Aₙ, Bₙ) and the operator
/// coefficients (aₙ, bₙ) for n = 0 … n_max.
pub fn cmd_coeffs(cfg: &RunConfig) -> Result<CommandOutput, String> {
    let pair = match cfg.case {
        Case::Jacobi => {
            let p = &cfg.jacobi().params;
            FamilyPair::jacobi_shift(p.alpha, p.beta)
        }
        Case::Q1 => {
            let p = cfg.q_params();
            FamilyPair::q_shift_a(p.a, p.b, p.q)
        }
        Case::Q2 => {
            let p = cfg.q_params();
            FamilyPair::q_shift_b(p.a, p.b, p.q)
        }
    }
    .map_err(|e| e.to_string())?;

    let mut rows = Vec::with_capacity(cfg.n_max + 1);
    for n in 0..=cfg.n_max {
        let (conn_a, conn_b) = pair.connection(n).map_err(|e| e.to_string())?;
        let (a_gamma, b_gamma) = closed_coeffs(cfg, n)?;
        rows.push((n, conn_a, conn_b, a_gamma, b_gamma));
    }

    let text = match cfg.format {
        OutputFormat::Json => Value::Object(vec![
            ("config", config_value("coeffs", cfg)),
            (
                "rows",
                Value::Array(
                    rows.iter()
                        .map(|&(n, conn_a, conn_b, a_gamma, b_gamma)| {
                            Value::Object(vec![
                                ("n", Value::Int(n as i64)),
                                ("A", Value::Float(conn_a)),
                                ("B", Value::Float(conn_b)),
                                ("a_gamma", Value::Float(a_gamma)),
                                ("b_gamma", Value::Float(b_gamma)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ])
        .to_json(),
        OutputFormat::Csv => {
            let mut out = csv_row(&["n", "A", "B", "a_gamma", "b_gamma"].map(String::from));
            for &(n, conn_a, conn_b, a_gamma, b_gamma) in &rows {
                out.push_str(&csv_row(&[
                    n.to_string(),
                    csv_float(conn_a),
                    csv_float(conn_b),
                    csv_float(a_gamma),
                    csv_float(b_gamma),
                ]));
            }
            out
        }
    };
    Ok(CommandOutput { text, pass: true })
}

/// `spectrum`: eigenvalues of the size-N finite section of the operator,
/// compared against its closed-form prediction. Passes when every
/// eigenvalue is explained (inside a dilated band or near a predicted
/// point), every predicted point is matched within the gap tolerance, and,
/// for the unbounded case, nothing dips below −tol-positivity.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<CommandOutput, String> {
    let mut off = Vec::with_capacity(cfg.size.saturating_sub(1));
    let mut diag = Vec::with_capacity(cfg.size);
    for n in 0..cfg.size {
        let (a_n, b_n) = closed_coeffs(cfg, n)?;
        if n + 1 < cfg.size {
            off.push(a_n);
        }
        diag.push(b_n);
    }
    let predicted = prediction(cfg)?;
    let truncated = truncated_spectrum(&off, &diag, cfg.size).map_err(|e| e.to_string())?;
    let report = compare_spectrum(&predicted, &truncated, cfg.tol.band_edge);

    let explained = |x: f64| {
        predicted
            .continuous_bands
            .iter()
            .any(|&(lo, hi)| x >= lo - cfg.tol.band_edge && x <= hi + cfg.tol.band_edge)
            || predicted
                .discrete_points
                .iter()
                .any(|&p| (x - p).abs() <= cfg.tol.band_edge)
    };
    let unexplained: Vec<f64> = truncated
        .eigenvalues
        .iter()
        .copied()
        .filter(|&x| !explained(x))
        .collect();
    let matches_pass = report
        .discrete_matches
        .iter()
        .all(|m| m.gap <= cfg.tol.gap);
    let positivity_pass = cfg.case != Case::Q2 || report.min_eigenvalue >= -cfg.tol.positivity;
    let pass = unexplained.is_empty() && matches_pass && positivity_pass;

    let max_width = truncated
        .enclosure_widths
        .iter()
        .copied()
        .fold(0.0f64, f64::max);

    let text = match cfg.format {
        OutputFormat::Json => Value::Object(vec![
            ("config", config_value("spectrum", cfg)),
            ("source", Value::Str(source_name(predicted.source).to_owned())),
            (
                "bands",
                Value::Array(
                    predicted
                        .continuous_bands
                        .iter()
                        .map(|&(lo, hi)| {
                            Value::Array(vec![Value::Float(lo), Value::Float(hi)])
                        })
                        .collect(),
                ),
            ),
            (
                "discrete_points",
                Value::Array(
                    predicted
                        .discrete_points
                        .iter()
                        .map(|&p| Value::Float(p))
                        .collect(),
                ),
            ),
            (
                "matches",
                Value::Array(
                    report
                        .discrete_matches
                        .iter()
                        .map(|m| {
                            Value::Object(vec![
                                ("predicted", Value::Float(m.predicted)),
                                ("nearest", Value::Float(m.nearest)),
                                ("gap", Value::Float(m.gap)),
                                ("pass", Value::Bool(m.gap <= cfg.tol.gap)),
                            ])
                        })
                        .collect(),
                ),
            ),
            ("inside_band_fraction", Value::Float(report.inside_band_fraction)),
            ("min_eigenvalue", Value::Float(report.min_eigenvalue)),
            ("max_eigenvalue", Value::Float(report.max_eigenvalue)),
            ("max_enclosure_width", Value::Float(max_width)),
            ("unexplained_count", Value::Int(unexplained.len() as i64)),
            (
                "unexplained",
                Value::Array(
                    unexplained
                        .iter()
                        .take(20)
                        .map(|&x| Value::Float(x))
                        .collect(),
                ),
            ),
            (
                "eigenvalues",
                Value::Array(
                    truncated
                        .eigenvalues
                        .iter()
                        .map(|&x| Value::Float(x))
                        .collect(),
                ),
            ),
            ("pass", Value::Bool(pass)),
        ])
        .to_json(),
        OutputFormat::Csv => {
            let mut out = csv_row(&["record", "index", "x", "y", "z"].map(String::from));
            let blank = String::new;
            for (i, &(lo, hi)) in predicted.continuous_bands.iter().enumerate() {
                out.push_str(&csv_row(&[
                    "band".to_owned(),
                    i.to_string(),
                    csv_float(lo),
                    csv_float(hi),
                    blank(),
                ]));
            }
            for (i, &p) in predicted.discrete_points.iter().enumerate() {
                out.push_str(&csv_row(&[
                    "point".to_owned(),
                    i.to_string(),
                    csv_float(p),
                    blank(),
                    blank(),
                ]));
            }
            for (i, m) in report.discrete_matches.iter().enumerate() {
                out.push_str(&csv_row(&[
                    "match".to_owned(),
                    i.to_string(),
                    csv_float(m.predicted),
                    csv_float(m.nearest),
                    csv_float(m.gap),
                ]));
            }
            for (i, &x) in truncated.eigenvalues.iter().enumerate() {
                out.push_str(&csv_row(&[
                    "eigenvalue".to_owned(),
                    i.to_string(),
                    csv_float(x),
                    blank(),
                    blank(),
                ]));
            }
            for (i, &x) in unexplained.iter().enumerate() {
                out.push_str(&csv_row(&[
                    "unexplained".to_owned(),
                    i.to_string(),
                    csv_float(x),
                    blank(),
                    blank(),
                ]));
            }
            out.push_str(&csv_row(&[
                "summary".to_owned(),
                blank(),
                csv_float(report.min_eigenvalue),
                csv_float(report.max_eigenvalue),
                csv_float(report.inside_band_fraction),
            ]));
            out.push_str(&csv_row(&[
                "pass".to_owned(),
                blank(),
                (pass as u8).to_string(),
                blank(),
                blank(),
            ]));
            out
        }
    };
    Ok(CommandOutput { text, pass })
}

/// `transform`: tabulate the lattice transform of the degree-n_max
/// polynomial over a θ grid against its closed product form. Bounded
/// q-case only.
pub fn cmd_transform(cfg: &RunConfig) -> Result<CommandOutput, String> {
    if cfg.case != Case::Q1 {
        return Err(
            "the transform table applies to case q1 (bounded q-difference operator)".to_owned(),
        );
    }
    let params = cfg.q_params();
    let family = FamilyData::little_q_jacobi(params.a, params.b, params.q)
        .map_err(|e| e.to_string())?;
    let f = lattice_polynomial(&family, cfg.n_max, params.q, cfg.lattice)?;

    let mut rows = Vec::with_capacity(cfg.theta_points);
    let mut max_rel = 0.0f64;
    for j in 1..=cfg.theta_points {
        let theta = std::f64::consts::PI * j as f64 / (cfg.theta_points + 1) as f64;
        let (lhs, _tail) = v_transform(&f, params, theta.cos()).map_err(|e| e.to_string())?;
        let rhs = v_transform_polynomial_closed_form(params, cfg.n_max, theta)
            .map_err(|e| e.to_string())?;
        let abs_diff = (lhs - rhs).abs();
        let rel_diff = abs_diff / rhs.abs().max(1.0);
        max_rel = max_rel.max(rel_diff);
        rows.push((theta, lhs, rhs, abs_diff, rel_diff));
    }
    let pass = max_rel.is_finite() && max_rel <= cfg.tol.transform;

    let text = match cfg.format {
        OutputFormat::Json => Value::Object(vec![
            ("config", config_value("transform", cfg)),
            ("degree", Value::Int(cfg.n_max as i64)),
            (
                "rows",
                Value::Array(
                    rows.iter()
                        .map(|&(theta, lhs, rhs, abs_diff, rel_diff)| {
                            Value::Object(vec![
                                ("theta", Value::Float(theta)),
                                ("lhs", Value::Float(lhs)),
                                ("rhs", Value::Float(rhs)),
                                ("abs_diff", Value::Float(abs_diff)),
                                ("rel_diff", Value::Float(rel_diff)),
                            ])
                        })
                        .collect(),
                ),
            ),
            ("max_rel_diff", Value::Float(max_rel)),
            ("pass", Value::Bool(pass)),
        ])
        .to_json(),
        OutputFormat::Csv => {
            let mut out =
                csv_row(&["theta", "lhs", "rhs", "abs_diff", "rel_diff"].map(String::from));
            for &(theta, lhs, rhs, abs_diff, rel_diff) in &rows {
                out.push_str(&csv_row(&[
                    csv_float(theta),
                    csv_float(lhs),
                    csv_float(rhs),
                    csv_float(abs_diff),
                    csv_float(rel_diff),
                ]));
            }
            out
        }
    };
    Ok(CommandOutput { text, pass })
}
