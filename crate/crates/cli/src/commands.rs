//! Subcommand implementations producing run records.

use std::str::FromStr;

use morrey_core::constants::{c2_operational, c2_printed};
use morrey_core::{
    make_exponents, make_profile, norms_report, polya_szego_check,
    rearrange, sharpness_scan, volume_bound_diagnostics, Error, Exponents, NormsReport,
    ProfileDesignation, QuadratureSpec, QuotientKind, SharpConstants, VolumeBound, WarpedModel,
};
use serde_json::{json, Map, Value};

use crate::grid::Grid;
use crate::output::{Cell, Table};
use crate::{Bound, Cli, Command, Which};

/// What a subcommand hands back to `main`.
pub struct Outcome {
    pub record: Value,
    pub table: Table,
    pub exit_code: u8,
    pub warnings: Vec<String>,
}

#[derive(Debug)]
pub struct CliError(Error);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e)
    }
}

impl CliError {
    pub fn is_numerical(&self) -> bool {
        matches!(self.0, Error::NonConvergence { .. } | Error::Consistency(_))
    }

    pub fn exit_code(&self) -> u8 {
        if self.is_numerical() {
            2
        } else {
            1
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let spec = quadrature_spec(cli)?;
    let (name, inputs, out) = match &cli.command {
        Command::Constants { n, p } => {
            let inputs = json!({"n": n, "p": p});
            ("constants", inputs, constants(*n, *p)?)
        }
        Command::Quotient {
            model,
            profile,
            n,
            p,
            lambda,
            which,
        } => {
            let inputs = json!({"model": model, "profile": profile, "n": n, "p": p,
                "lambda": lambda, "which": which_name(*which)});
            ("quotient", inputs, quotient(model, profile, *n, *p, *lambda, *which, &spec)?)
        }
        Command::Scan {
            model,
            n,
            p,
            lambda_grid,
            which,
        } => {
            let inputs = json!({"model": model, "n": n, "p": p,
                "lambda_grid": grid_json(lambda_grid), "which": which_name(*which)});
            ("scan", inputs, scan(model, *n, *p, lambda_grid, *which, &spec)?)
        }
        Command::Rearrange {
            model,
            profile,
            n,
            p,
            lambda,
        } => {
            let inputs = json!({"model": model, "profile": profile, "n": n, "p": p, "lambda": lambda});
            ("rearrange", inputs, rearrangement(model, profile, *n, *p, *lambda, &spec)?)
        }
        Command::Volumes { model, rho_grid } => {
            let inputs = json!({"model": model, "rho_grid": grid_json(rho_grid)});
            ("volumes", inputs, volumes(model, rho_grid)?)
        }
        Command::Diagnose {
            model,
            n,
            p,
            c,
            which,
            lambda,
            rho_grid,
        } => {
            let m = parse_model(model, *n)?;
            let grid = rho_grid.clone().unwrap_or_else(|| default_rho_grid(&m));
            let lambdas = if lambda.is_empty() {
                [0.5, 1.0, 2.0].into_iter().filter(|&l| l <= m.r_max()).collect()
            } else {
                lambda.clone()
            };
            let bound = match which {
                Bound::Ms1 => VolumeBound::Ms1,
                Bound::Ms2 => VolumeBound::Ms2,
            };
            let inputs = json!({"model": model, "n": n, "p": p, "C": c, "which": bound.to_string(),
                "lambda": if bound == VolumeBound::Ms2 { json!(lambdas) } else { Value::Null },
                "rho_grid": grid_json(&grid)});
            ("diagnose", inputs, diagnose(&m, *n, *p, *c, bound, &grid, &lambdas, &spec)?)
        }
    };
    let Partial {
        results,
        mut diagnostics,
        table,
        exit_code,
        warnings,
    } = out;
    if let Value::Object(d) = &mut diagnostics {
        d.insert("quadrature".into(), spec_json(&spec));
    }
    let mut record = Map::new();
    record.insert("command".into(), json!(name));
    record.insert("diagnostics".into(), diagnostics);
    record.insert("inputs".into(), inputs);
    record.insert("results".into(), results);
    record.insert("version".into(), json!(VERSION));
    Ok(Outcome {
        record: Value::Object(record),
        table,
        exit_code,
        warnings,
    })
}

struct Partial {
    results: Value,
    diagnostics: Value,
    table: Table,
    exit_code: u8,
    warnings: Vec<String>,
}

impl Partial {
    fn ok(results: Value, diagnostics: Value, table: Table) -> Self {
        Partial {
            results,
            diagnostics,
            table,
            exit_code: 0,
            warnings: Vec::new(),
        }
    }
}

fn quadrature_spec(cli: &Cli) -> CliResult<QuadratureSpec> {
    let mut spec = QuadratureSpec::default();
    if let Some(a) = cli.abs_tol {
        spec.abs_tol = a;
    }
    if let Some(r) = cli.rel_tol {
        spec.rel_tol = r;
    }
    if let Some(k) = cli.max_refinements {
        spec.max_refinements = k;
    }
    spec.validate()?;
    Ok(spec)
}

fn spec_json(spec: &QuadratureSpec) -> Value {
    json!({"abs_tol": spec.abs_tol, "rel_tol": spec.rel_tol, "max_refinements": spec.max_refinements})
}

fn grid_json(g: &Grid) -> Value {
    json!({"start": g.start, "end": g.end, "count": g.count})
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::Q1 => "q1",
        Which::Q2 => "q2",
    }
}

fn which_kind(w: Which) -> QuotientKind {
    match w {
        Which::Q1 => QuotientKind::Q1,
        Which::Q2 => QuotientKind::Q2,
    }
}

fn parse_model(desig: &str, n: usize) -> CliResult<WarpedModel> {
    let m = WarpedModel::from_str(desig)?;
    if m.n() != n {
        return Err(Error::Domain(format!(
            "model {desig} has dimension {}, but --n is {n}",
            m.n()
        ))
        .into());
    }
    Ok(m)
}

fn exponents(n: usize, p: f64) -> CliResult<Exponents> {
    Ok(make_exponents(n, p)?)
}

fn default_rho_grid(m: &WarpedModel) -> Grid {
    Grid {
        start: 0.1,
        end: f64::min(5.0, 0.99 * m.r_max()),
        count: 50,
    }
}

fn constants(n: usize, p: f64) -> CliResult<Partial> {
    let e = exponents(n, p)?;
    let sc = SharpConstants::new(&e)?;
    let printed = c2_printed(&e)?;
    let operational = c2_operational(&e)?;
    let results = json!({"c1": sc.c1, "c2": sc.c2, "eta": e.eta(), "omega_n": sc.omega_n,
        "p_conj": e.p_conj()});
    let diagnostics = json!({"c2_operational": operational, "c2_printed": printed,
        "c2_relative_discrepancy": ((printed - operational) / operational).abs()});
    let mut t = Table::new(&["c1", "c2", "eta", "omega_n", "p_conj"]);
    t.push(vec![sc.c1.into(), sc.c2.into(), e.eta().into(), sc.omega_n.into(), e.p_conj().into()]);
    Ok(Partial::ok(results, diagnostics, t))
}

fn norms_json(r: &NormsReport) -> Value {
    json!({"sup_norm": r.sup_norm, "l1_norm": r.l1_norm, "grad_lp_norm": r.grad_lp_norm,
        "support_measure": r.support_measure, "q1": r.q1, "q2": r.q2})
}

fn norms_diagnostics(r: &NormsReport) -> Value {
    let d = &r.diagnostics;
    json!({"evaluations": d.evaluations, "refinements": d.refinements,
        "l1_error_bound": d.l1_error_bound, "grad_error_bound": d.grad_error_bound})
}

const NORM_HEADERS: [&str; 6] = ["sup_norm", "l1_norm", "grad_lp_norm", "support_measure", "q1", "q2"];

fn norms_row(r: &NormsReport) -> Vec<Cell> {
    vec![
        r.sup_norm.into(),
        r.l1_norm.into(),
        r.grad_lp_norm.into(),
        r.support_measure.into(),
        r.q1.into(),
        r.q2.into(),
    ]
}

fn quotient(
    model: &str,
    profile: &str,
    n: usize,
    p: f64,
    lambda: Option<f64>,
    which: Which,
    spec: &QuadratureSpec,
) -> CliResult<Partial> {
    let m = parse_model(model, n)?;
    let e = exponents(n, p)?;
    let d = ProfileDesignation::from_str(profile)?;
    let u = make_profile(&d, &e, lambda, &m)?;
    let r = norms_report(&u, &m, &e, spec)?;
    let selected = r.quotient(which_kind(which));
    let mut results = norms_json(&r);
    results["lambda"] = json!(u.lambda());
    results["quotient"] = json!(selected);
    let mut headers = vec!["lambda"];
    headers.extend(NORM_HEADERS);
    headers.push("quotient");
    let mut t = Table::new(&headers);
    let mut row = vec![Cell::Num(u.lambda())];
    row.extend(norms_row(&r));
    row.push(selected.into());
    t.push(row);
    Ok(Partial::ok(results, norms_diagnostics(&r), t))
}

fn scan(
    model: &str,
    n: usize,
    p: f64,
    grid: &Grid,
    which: Which,
    spec: &QuadratureSpec,
) -> CliResult<Partial> {
    let m = parse_model(model, n)?;
    let e = exponents(n, p)?;
    let lambdas = grid.points();
    let s = sharpness_scan(&m, &e, &lambdas, which_kind(which), spec)?;
    let margins = s.margins();
    let failures: Vec<Value> = s
        .errors
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.as_ref().map(|e| json!({"lambda": s.lambdas[i], "error": e.to_string()})))
        .collect();
    let results = json!({
        "lambdas": s.lambdas, "q_values": s.q_values, "margins": margins,
        "sharp_reference": s.sharp_reference, "limit_estimate": s.limit_estimate,
        "attainment": s.attainment.to_string(),
        "asymptotic_volume_ratio_estimate": s.asymptotic_volume_ratio,
        "upper_bound_probe": s.upper_bound_probe,
    });
    let diagnostics = json!({"failures": failures});
    let mut t = Table::new(&["lambda", "q", "margin", "status"]);
    for (i, err) in s.errors.iter().enumerate() {
        let status = if err.is_some() { "failed" } else { "ok" };
        t.push(vec![s.lambdas[i].into(), s.q_values[i].into(), margins[i].into(), status.into()]);
    }
    let mut out = Partial::ok(results, diagnostics, t);
    if let Some(err) = s.first_error() {
        out.exit_code = 2;
        out.warnings.push(format!("scan incomplete: {err}"));
    }
    Ok(out)
}

fn rearrangement(
    model: &str,
    profile: &str,
    n: usize,
    p: f64,
    lambda: Option<f64>,
    spec: &QuadratureSpec,
) -> CliResult<Partial> {
    let m = parse_model(model, n)?;
    let e = exponents(n, p)?;
    let d = ProfileDesignation::from_str(profile)?;
    let u = make_profile(&d, &e, lambda, &m)?;
    let (r, gaps) = if m.curvature_class().is_cartan_hadamard() {
        let ps = polya_szego_check(&u, &m, &e, spec)?;
        let gaps = json!({"delta_grad": ps.delta_grad, "delta_sup": ps.delta_sup, "delta_l1": ps.delta_l1});
        (ps.rearrangement, gaps)
    } else {
        (rearrange(&u, &m, &e, spec)?, Value::Null)
    };
    let results = json!({
        "lambda": u.lambda(), "lambda_star": r.lambda_star,
        "before": norms_json(&r.report_before), "after": norms_json(&r.report_after),
        "polya_szego": gaps,
    });
    let diagnostics = json!({"before": norms_diagnostics(&r.report_before),
        "after": norms_diagnostics(&r.report_after)});
    let mut headers = vec!["stage", "radius"];
    headers.extend(NORM_HEADERS);
    let mut t = Table::new(&headers);
    for (stage, radius, rep) in [
        ("before", u.lambda(), &r.report_before),
        ("after", r.lambda_star, &r.report_after),
    ] {
        let mut row = vec![stage.into(), radius.into()];
        row.extend(norms_row(rep));
        t.push(row);
    }
    let mut out = Partial::ok(results, diagnostics, t);
    if gaps.is_null() {
        out.warnings
            .push(format!("{} is not Cartan-Hadamard; gradient comparison skipped", m.label()));
    }
    Ok(out)
}

fn volumes(model: &str, grid: &Grid) -> CliResult<Partial> {
    let m = WarpedModel::from_str(model)?;
    let radii = grid.points();
    if let Some(&bad) = radii.iter().find(|&&r| !(r > 0.0 && r < m.r_max())) {
        return Err(Error::Domain(format!("radius {bad} outside (0, {})", m.r_max())).into());
    }
    let rep = m.volume_monotonicity_report(&radii)?;
    let gaps: Vec<f64> = radii
        .iter()
        .map(|&r| m.isoperimetric_gap(r))
        .collect::<Result<_, _>>()?;
    let results = json!({
        "radii": rep.radii, "volumes": rep.volumes, "ratios": rep.ratios,
        "isoperimetric_gaps": gaps,
        "verdict": rep.verdict.to_string(), "curvature_class": m.curvature_class().to_string(),
        "max_violation": rep.max_violation, "min_ratio": rep.min_ratio, "max_ratio": rep.max_ratio,
        "small_radius_ratio": rep.small_radius_ratio,
    });
    let diagnostics = json!({"max_decrease": rep.max_decrease, "max_increase": rep.max_increase});
    let mut t = Table::new(&["rho", "volume", "ratio", "isoperimetric_gap"]);
    for (i, gap) in gaps.iter().enumerate() {
        t.push(vec![rep.radii[i].into(), rep.volumes[i].into(), rep.ratios[i].into(), (*gap).into()]);
    }
    Ok(Partial::ok(results, diagnostics, t))
}

#[allow(clippy::too_many_arguments)]
fn diagnose(
    m: &WarpedModel,
    n: usize,
    p: f64,
    c: f64,
    which: VolumeBound,
    grid: &Grid,
    lambdas: &[f64],
    spec: &QuadratureSpec,
) -> CliResult<Partial> {
    let e = exponents(n, p)?;
    let radii = grid.points();
    let r = volume_bound_diagnostics(m, &e, c, which, &radii, lambdas, spec)?;
    let gaps: Vec<Value> = r
        .gap_integrals
        .iter()
        .map(|&(l, g)| json!({"lambda": l, "gap": g}))
        .collect();
    let results = json!({
        "factor": r.factor, "radii": r.radii, "margins": r.margins,
        "worst_margin": r.worst_margin, "worst_radius": r.worst_radius,
        "gap_integrals": gaps, "holds": r.holds(),
    });
    let diagnostics = json!({"gap_error_bounds": r.gap_error_bounds});
    let mut t = Table::new(&["quantity", "at", "value"]);
    for (rho, v) in r.radii.iter().zip(&r.margins) {
        t.push(vec!["margin".into(), (*rho).into(), (*v).into()]);
    }
    for &(l, g) in &r.gap_integrals {
        t.push(vec!["gap".into(), l.into(), g.into()]);
    }
    Ok(Partial::ok(results, diagnostics, t))
}
