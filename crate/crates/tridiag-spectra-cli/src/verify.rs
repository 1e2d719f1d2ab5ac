//! The `verify` subcommand: named checks grouped into suites, one
//! pass/fail/skip row per check, with the measured residual and the
//! tolerance it was held to.

use tridiag_spectra::families::FamilyData;
use tridiag_spectra::spectral::{
    biorthogonal_pair_check, direct_eigenfunction_q1, direct_recurrence_q2,
    eigenfunction_residual_q1, general_transform_sides, match_jacobi_deflated_recurrence,
    match_jacobi_recurrence, match_q_recurrence, predict_q1, truncated_spectrum, v_transform,
    v_transform_polynomial_closed_form,
};
use tridiag_spectra::tridiag::{jacobi_matrix_elements, q_matrix_elements};

use crate::commands::{closed_coeffs, lattice_polynomial, CommandOutput};
use crate::config::{config_value, Case, OutputFormat, RunConfig, Suite};
use crate::output::{csv_float, csv_row, Value};

/// One named check: what was claimed, what was measured, and the verdict
/// (`pass: None` means the check does not apply to the configured case).
struct CheckRow {
    name: &'static str,
    claim: &'static str,
    residual: Option<f64>,
    tolerance: Option<f64>,
    pass: Option<bool>,
    reason: String,
}

fn run_check(
    name: &'static str,
    claim: &'static str,
    tolerance: f64,
    body: impl FnOnce() -> Result<f64, String>,
) -> CheckRow {
    match body() {
        Ok(residual) if residual.is_finite() => CheckRow {
            name,
            claim,
            residual: Some(residual),
            tolerance: Some(tolerance),
            pass: Some(residual <= tolerance),
            reason: String::new(),
        },
        Ok(residual) => CheckRow {
            name,
            claim,
            residual: Some(residual),
            tolerance: Some(tolerance),
            pass: Some(false),
            reason: "residual is not finite".to_owned(),
        },
        Err(reason) => CheckRow {
            name,
            claim,
            residual: None,
            tolerance: Some(tolerance),
            pass: Some(false),
            reason,
        },
    }
}

fn skip_check(name: &'static str, claim: &'static str, reason: &str) -> CheckRow {
    CheckRow {
        name,
        claim,
        residual: None,
        tolerance: None,
        pass: None,
        reason: reason.to_owned(),
    }
}

const OFFBAND_CLAIM: &str =
    "matrix elements of the operator in the orthonormal basis vanish off the three central diagonals";
const BAND_CLAIM: &str = "the three central diagonals equal the closed coefficient formulas";

/// Matrix elements of the operator over the window n, m ≤ 12, computed
/// end-to-end (quadrature for the differential case, double-double lattice
/// sums for the q-cases), split into an off-band and an in-band check.
fn tridiag_checks(cfg: &RunConfig, checks: &mut Vec<CheckRow>) {
    const WINDOW: usize = 12;
    let elements = match cfg.case {
        Case::Jacobi => jacobi_matrix_elements(&cfg.jacobi().params, WINDOW),
        Case::Q1 | Case::Q2 => q_matrix_elements(cfg.q_params(), WINDOW, cfg.lattice),
    };
    let elements = match elements {
        Ok(elements) => elements,
        Err(e) => {
            let reason = e.to_string();
            checks.push(run_check("offband_elements", OFFBAND_CLAIM, cfg.tol.offband, || {
                Err(reason.clone())
            }));
            checks.push(run_check("band_elements", BAND_CLAIM, cfg.tol.band_rel, || {
                Err(reason)
            }));
            return;
        }
    };
    checks.push(run_check(
        "offband_elements",
        OFFBAND_CLAIM,
        cfg.tol.offband,
        || {
            let mut worst = 0.0f64;
            for (n, row) in elements.iter().enumerate() {
                for (m, &x) in row.iter().enumerate() {
                    if m > n + 1 || n > m + 1 {
                        worst = worst.max(x.abs());
                    }
                }
            }
            Ok(worst)
        },
    ));
    checks.push(run_check(
        "band_elements",
        BAND_CLAIM,
        cfg.tol.band_rel,
        || {
            let mut worst = 0.0f64;
            for n in 0..=WINDOW {
                let (a_n, b_n) = closed_coeffs(cfg, n)?;
                worst = worst.max((elements[n][n] - b_n).abs() / b_n.abs().max(1.0));
                if n < WINDOW {
                    let gap = (elements[n][n + 1] - a_n)
                        .abs()
                        .max((elements[n + 1][n] - a_n).abs());
                    worst = worst.max(gap / a_n.abs().max(1.0));
                }
            }
            Ok(worst)
        },
    ));
}

const WILSON_CLAIM: &str =
    "at half scale the coefficient pair matches the recurrence rates of a four-parameter hypergeometric family";
const DEFLATED_CLAIM: &str =
    "after splitting off the zero mode, the shifted coefficient pair matches a four-parameter recurrence";
const AW_CLAIM: &str =
    "the coefficient pair matches the recurrence rates of a four-parameter q-hypergeometric family";

/// Identification of the coefficient sequences with four-parameter
/// recurrence rates, over n ≤ 30.
fn recurrence_checks(cfg: &RunConfig, checks: &mut Vec<CheckRow>) {
    const N_MAX: usize = 30;
    match cfg.case {
        Case::Jacobi => {
            let setup = *cfg.jacobi();
            let (alpha, beta) = (setup.params.alpha, setup.params.beta);
            match setup.delta {
                Some(delta) => checks.push(run_check(
                    "wilson_recurrence_match",
                    WILSON_CLAIM,
                    cfg.tol.recurrence,
                    || match_jacobi_recurrence(alpha, beta, delta, N_MAX)
                        .map_err(|e| e.to_string()),
                )),
                None => checks.push(skip_check(
                    "wilson_recurrence_match",
                    WILSON_CLAIM,
                    "the four-parameter match needs the real shift parameter delta",
                )),
            }
            checks.push(run_check(
                "deflated_recurrence_match",
                DEFLATED_CLAIM,
                cfg.tol.recurrence,
                || match_jacobi_deflated_recurrence(alpha, beta, N_MAX).map_err(|e| e.to_string()),
            ));
        }
        Case::Q1 => checks.push(run_check(
            "askey_wilson_recurrence_match",
            AW_CLAIM,
            cfg.tol.recurrence,
            || match_q_recurrence(cfg.q_params(), N_MAX).map_err(|e| e.to_string()),
        )),
        Case::Q2 => checks.push(skip_check(
            "askey_wilson_recurrence_match",
            AW_CLAIM,
            "no four-parameter identification applies to the unbounded case",
        )),
    }
}

const CLOSED_FORM_CLAIM: &str =
    "the lattice transform of each basis polynomial equals its closed product form";
const GENERAL_CLAIM: &str =
    "the lattice overlap sum with a free geometric weight equals its closed product form";
const NOT_DIFFERENTIAL: &str = "q-lattice transforms do not apply to the differential case";

/// Transform identities on the q-lattice: the closed product form of the
/// transformed basis polynomials (bounded case) and the two-parameter
/// overlap identity with a free geometric weight (both q-cases).
fn identity_checks(cfg: &RunConfig, checks: &mut Vec<CheckRow>) {
    if cfg.case == Case::Jacobi {
        checks.push(skip_check("transform_closed_form", CLOSED_FORM_CLAIM, NOT_DIFFERENTIAL));
        checks.push(skip_check("general_transform", GENERAL_CLAIM, NOT_DIFFERENTIAL));
        return;
    }
    if cfg.case == Case::Q1 {
        checks.push(run_check(
            "transform_closed_form",
            CLOSED_FORM_CLAIM,
            cfg.tol.transform,
            || {
                let params = cfg.q_params();
                let family = FamilyData::little_q_jacobi(params.a, params.b, params.q)
                    .map_err(|e| e.to_string())?;
                let mut worst = 0.0f64;
                for n in 0..=8usize {
                    let f = lattice_polynomial(&family, n, params.q, cfg.lattice)?;
                    for j in 1..=10usize {
                        let theta = std::f64::consts::PI * j as f64 / 11.0;
                        let (lhs, _tail) =
                            v_transform(&f, params, theta.cos()).map_err(|e| e.to_string())?;
                        let rhs = v_transform_polynomial_closed_form(params, n, theta)
                            .map_err(|e| e.to_string())?;
                        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
                    }
                }
                Ok(worst)
            },
        ));
    } else {
        checks.push(skip_check(
            "transform_closed_form",
            CLOSED_FORM_CLAIM,
            "the closed product form applies to the bounded case only",
        ));
    }
    checks.push(run_check(
        "general_transform",
        GENERAL_CLAIM,
        cfg.tol.identity,
        || {
            let params = cfg.q_params();
            let t_values = cfg.t.map_or_else(|| vec![0.1, 0.5], |t| vec![t]);
            let mut worst = 0.0f64;
            for &t in &t_values {
                for (c2, d2) in [(0.6, -0.3), (0.9, 0.45)] {
                    for n in 0..=6usize {
                        for j in 1..=10usize {
                            let theta = std::f64::consts::PI * j as f64 / 11.0;
                            let (lhs, rhs) = general_transform_sides(
                                params.a,
                                params.b,
                                params.q,
                                c2,
                                d2,
                                t,
                                n,
                                theta,
                                cfg.lattice,
                            )
                            .map_err(|e| e.to_string())?;
                            worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
                        }
                    }
                }
            }
            Ok(worst)
        },
    ));
}

const DIRECT_CLAIM: &str =
    "direct lattice eigenfunctions satisfy the three-term difference equation at every interior point";
const DIAGONAL_CLAIM: &str = "the dual three-term recurrence has a positive diagonal";
const SUPPORT_CLAIM: &str =
    "finite sections of the dual recurrence are nonnegative after rescaling";

/// Eigenfunction-level checks: direct lattice eigenfunctions for the
/// bounded case; positivity of the dual recurrence and of its finite
/// sections for the unbounded case.
fn eigenfunction_checks(cfg: &RunConfig, checks: &mut Vec<CheckRow>) {
    match cfg.case {
        Case::Jacobi => checks.push(skip_check(
            "direct_eigenfunction_residual",
            DIRECT_CLAIM,
            "the lattice construction applies to the q-difference cases",
        )),
        Case::Q1 => checks.push(run_check(
            "direct_eigenfunction_residual",
            DIRECT_CLAIM,
            cfg.tol.eigenfunction,
            || {
                let params = cfg.q_params();
                let prediction = predict_q1(params).map_err(|e| e.to_string())?;
                let (lo, hi) = prediction.continuous_bands[0];
                let mut lambdas: Vec<f64> = (1..=5)
                    .map(|j| lo + (hi - lo) * j as f64 / 6.0)
                    .collect();
                lambdas.extend(prediction.discrete_points.iter().copied());
                let mut worst = 0.0f64;
                for &lambda in &lambdas {
                    let y = direct_eigenfunction_q1(params, lambda, cfg.lattice)
                        .map_err(|e| e.to_string())?;
                    worst = worst.max(eigenfunction_residual_q1(params, &y, lambda));
                }
                Ok(worst)
            },
        )),
        Case::Q2 => {
            checks.push(run_check(
                "dual_recurrence_positive_diagonal",
                DIAGONAL_CLAIM,
                0.0,
                || {
                    let params = cfg.q_params();
                    let mut min_diag = f64::INFINITY;
                    for k in 0..=50usize {
                        let (_, b_k) = direct_recurrence_q2(params, k).map_err(|e| e.to_string())?;
                        min_diag = min_diag.min(b_k);
                    }
                    Ok((-min_diag).max(0.0))
                },
            ));
            checks.push(run_check(
                "dual_recurrence_support",
                SUPPORT_CLAIM,
                cfg.tol.support,
                || {
                    let params = cfg.q_params();
                    let n = cfg.size.min(400);
                    let mut off = Vec::with_capacity(n);
                    let mut diag = Vec::with_capacity(n);
                    for k in 0..n {
                        let (a_k, b_k) = direct_recurrence_q2(params, k).map_err(|e| e.to_string())?;
                        off.push(a_k);
                        diag.push(b_k);
                    }
                    let spectrum =
                        truncated_spectrum(&off, &diag, n).map_err(|e| e.to_string())?;
                    // Eigenvalues of the dual section sit at (1−bq)·λ.
                    let scaled_min = spectrum.eigenvalues[0] / (1.0 - params.b * params.q);
                    Ok((-scaled_min).max(0.0))
                },
            ));
        }
    }
}

const BIORTHO_CLAIM: &str =
    "the scaled transform pairs are biorthogonal with the predicted norms";

/// Biorthogonality of the scaled transform pairs under the continuous
/// measure (bounded case, and only when all four transform parameters lie
/// inside the unit disc, so the measure has no point masses).
fn biortho_checks(cfg: &RunConfig, checks: &mut Vec<CheckRow>) {
    match cfg.case {
        Case::Jacobi => checks.push(skip_check(
            "transform_biorthogonality",
            BIORTHO_CLAIM,
            NOT_DIFFERENTIAL,
        )),
        Case::Q2 => checks.push(skip_check(
            "transform_biorthogonality",
            BIORTHO_CLAIM,
            "the pairing is built from the bounded-case transform",
        )),
        Case::Q1 => {
            let params = cfg.q_params();
            let s = (params.a * params.q).sqrt();
            let transform_params = [
                s,
                params.c * s,
                params.b / params.c * (params.q / params.a).sqrt(),
                s,
            ];
            if transform_params.iter().any(|t| t.abs() >= 1.0) {
                checks.push(skip_check(
                    "transform_biorthogonality",
                    BIORTHO_CLAIM,
                    "a transform parameter lies outside the unit disc, so the continuous measure alone does not close the pairing",
                ));
                return;
            }
            checks.push(run_check(
                "transform_biorthogonality",
                BIORTHO_CLAIM,
                cfg.tol.biortho,
                || {
                    let mut worst = 0.0f64;
                    for alpha in [0.8, 1.0, 1.25] {
                        if !(alpha > s && alpha < 1.0 / s) {
                            continue;
                        }
                        for n in 0..=5usize {
                            for m in 0..=5usize {
                                let gap = biorthogonal_pair_check(params, alpha, n, m)
                                    .map_err(|e| e.to_string())?;
                                worst = worst.max(gap);
                            }
                        }
                    }
                    Ok(worst)
                },
            ));
        }
    }
}

fn check_value(row: &CheckRow) -> Value {
    Value::Object(vec![
        ("name", Value::Str(row.name.to_owned())),
        ("claim", Value::Str(row.claim.to_owned())),
        ("residual", row.residual.map_or(Value::Null, Value::Float)),
        ("tolerance", row.tolerance.map_or(Value::Null, Value::Float)),
        ("pass", row.pass.map_or(Value::Null, Value::Bool)),
        ("skipped", Value::Bool(row.pass.is_none())),
        ("reason", Value::Str(row.reason.clone())),
    ])
}

/// `verify`: run the selected suites and report one row per check. Exit
/// code 1 when any executed check fails; skipped checks do not fail a run.
pub fn cmd_verify(cfg: &RunConfig) -> Result<CommandOutput, String> {
    let include = |suite: Suite| cfg.suite == Suite::All || cfg.suite == suite;
    let mut checks = Vec::new();
    if include(Suite::Tridiag) {
        tridiag_checks(cfg, &mut checks);
    }
    if include(Suite::Recurrence) {
        recurrence_checks(cfg, &mut checks);
    }
    if include(Suite::Identity) {
        identity_checks(cfg, &mut checks);
    }
    if include(Suite::Eigenfunction) {
        eigenfunction_checks(cfg, &mut checks);
    }
    if include(Suite::Biortho) {
        biortho_checks(cfg, &mut checks);
    }

    let passed = checks.iter().filter(|c| c.pass == Some(true)).count();
    let failed = checks.iter().filter(|c| c.pass == Some(false)).count();
    let skipped = checks.iter().filter(|c| c.pass.is_none()).count();
    let pass = failed == 0;

    let text = match cfg.format {
        OutputFormat::Json => Value::Object(vec![
            ("config", config_value("verify", cfg)),
            ("checks", Value::Array(checks.iter().map(check_value).collect())),
            (
                "summary",
                Value::Object(vec![
                    ("total", Value::Int(checks.len() as i64)),
                    ("passed", Value::Int(passed as i64)),
                    ("failed", Value::Int(failed as i64)),
                    ("skipped", Value::Int(skipped as i64)),
                    ("pass", Value::Bool(pass)),
                ]),
            ),
        ])
        .to_json(),
        OutputFormat::Csv => {
            let mut out = csv_row(
                &["name", "claim", "residual", "tolerance", "status", "reason"].map(String::from),
            );
            for row in &checks {
                let status = match row.pass {
                    Some(true) => "pass",
                    Some(false) => "fail",
                    None => "skip",
                };
                out.push_str(&csv_row(&[
                    row.name.to_owned(),
                    row.claim.to_owned(),
                    row.residual.map(csv_float).unwrap_or_default(),
                    row.tolerance.map(csv_float).unwrap_or_default(),
                    status.to_owned(),
                    row.reason.clone(),
                ]));
            }
            out
        }
    };
    Ok(CommandOutput { text, pass })
}
