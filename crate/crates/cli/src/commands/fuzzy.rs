use std::io::Write;
use std::path::Path;

use csq_core::fuzzy::{CoefficientTensor, FuzzySphere};
use csq_core::harmonics::spherical_harmonic;
use csq_core::operator;
use csq_core::quantizer::ClassicalObservable;
use csq_core::Complex64;

use super::run_err;
use crate::report::{fmt_float, value_to_json, Report, Value};
use crate::{CommandError, FuzzyAction, FuzzyArgs};

const DEFAULT_MAX_L: usize = 16;

/// Reads the CSQ_MAX_L cap; an unparsable value is a usage error rather than
/// a silent fallback.
fn max_l() -> Result<usize, CommandError> {
    match std::env::var("CSQ_MAX_L") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            CommandError::Usage(format!("CSQ_MAX_L must be a nonnegative integer, got {raw:?}"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_L),
        Err(e) => Err(CommandError::Usage(format!("CSQ_MAX_L unreadable: {e}"))),
    }
}

pub fn run(args: &FuzzyArgs) -> Result<Report, CommandError> {
    let cap = max_l()?;
    if args.big_l > cap {
        return Err(CommandError::Usage(format!(
            "--L {} exceeds the configured maximum CSQ_MAX_L = {cap}",
            args.big_l
        )));
    }
    let model = FuzzySphere::new(args.big_l).map_err(run_err)?;
    let mut rep = match &args.action {
        None => quantize_report(&model, args)?,
        Some(FuzzyAction::Madore) => madore_report(&model)?,
        Some(FuzzyAction::Truncation { ell }) => truncation_report(&model, *ell)?,
    };
    if let Some(path) = &args.export_tensor {
        let blocks = export_tensor(&model, path)?;
        rep.push("tensor_export", Value::Str(path.display().to_string()));
        rep.push("tensor_blocks", Value::Int(blocks as i64));
    }
    Ok(rep)
}

fn base_report(name: &str, model: &FuzzySphere) -> Report {
    let mut rep = Report::new(name);
    rep.push("L", Value::Int(model.big_l() as i64));
    rep.push("dim", Value::Int(model.dim() as i64));
    rep.push("radius", Value::Float(model.radius()));
    rep.push(
        "kappa",
        model.kappa().map_or(Value::Null, Value::Float),
    );
    rep
}

/// Parsed form of the --f observable.
enum ParsedObservable {
    Coordinate(usize),
    Harmonics(Vec<(usize, i64, Complex64)>),
}

fn parse_observable(raw: &str) -> Result<ParsedObservable, CommandError> {
    match raw {
        "x1" => return Ok(ParsedObservable::Coordinate(0)),
        "x2" => return Ok(ParsedObservable::Coordinate(1)),
        "x3" => return Ok(ParsedObservable::Coordinate(2)),
        _ => {}
    }
    let mut terms = Vec::new();
    for chunk in raw.split(';') {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let parts: Vec<&str> = chunk.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(CommandError::Usage(format!(
                "--f term {chunk:?} must be \"l,m,re,im\""
            )));
        }
        let ell: usize = parts[0]
            .parse()
            .map_err(|_| CommandError::Usage(format!("--f: bad degree {:?}", parts[0])))?;
        let m: i64 = parts[1]
            .parse()
            .map_err(|_| CommandError::Usage(format!("--f: bad order {:?}", parts[1])))?;
        if m.unsigned_abs() as usize > ell {
            return Err(CommandError::Usage(format!(
                "--f: order {m} exceeds degree {ell}"
            )));
        }
        let re: f64 = parts[2]
            .parse()
            .map_err(|_| CommandError::Usage(format!("--f: bad coefficient {:?}", parts[2])))?;
        let im: f64 = parts[3]
            .parse()
            .map_err(|_| CommandError::Usage(format!("--f: bad coefficient {:?}", parts[3])))?;
        terms.push((ell, m, Complex64::new(re, im)));
    }
    if terms.is_empty() {
        return Err(CommandError::Usage(format!(
            "--f {raw:?} is neither x1|x2|x3 nor a harmonic list \"l,m,re,im;...\""
        )));
    }
    Ok(ParsedObservable::Harmonics(terms))
}

fn quantize_report(model: &FuzzySphere, args: &FuzzyArgs) -> Result<Report, CommandError> {
    let raw = args.f.as_deref().unwrap_or("x3");
    let parsed = parse_observable(raw)?;
    let mut rep = base_report("fuzzy", model);
    rep.push("observable", Value::Str(raw.to_owned()));
    rep.residual(
        "identity",
        model.identity_residual().map_err(run_err)?,
        1e-10,
    );

    match parsed {
        ParsedObservable::Coordinate(i) => {
            let ops = model.coordinate_operators().map_err(run_err)?;
            rep.push("operator", Value::Matrix(ops[i].matrix().clone()));
            // Real observables must land on Hermitian matrices; measure the
            // defect on the raw (unsymmetrized) quantization.
            let obs = [
                ClassicalObservable::real("x1", |p| p.theta.sin() * p.phi.cos()),
                ClassicalObservable::real("x2", |p| p.theta.sin() * p.phi.sin()),
                ClassicalObservable::real("x3", |p| p.theta.cos()),
            ];
            let raw_matrix = model.quantize_complex(&obs[i]).map_err(run_err)?;
            rep.residual(
                "hermiticity",
                operator::hermitian_defect(&raw_matrix),
                1e-10,
            );
        }
        ParsedObservable::Harmonics(terms) => {
            let coeff_terms = terms.clone();
            let f = ClassicalObservable::complex("harmonic sum", move |p| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(ell, m, c) in &coeff_terms {
                    acc += spherical_harmonic(ell, m, p) * c;
                }
                acc
            });
            let direct = model.quantize_complex(&f).map_err(run_err)?;
            rep.push("operator", Value::Matrix(direct.clone()));
            rep.push(
                "hermiticity_defect",
                Value::Float(operator::hermitian_defect(&direct)),
            );
            // When every term sits under the cutoff, the tensor assembly must
            // reproduce the direct quadrature.
            if terms.iter().all(|&(ell, _, _)| ell <= model.big_l()) {
                let tensor = model.coefficient_tensor().map_err(run_err)?;
                let assembled = tensor.assemble(&terms).map_err(run_err)?;
                rep.residual(
                    "assembly",
                    operator::max_abs(&(assembled - direct)),
                    1e-10,
                );
            }
        }
    }
    Ok(rep)
}

fn madore_report(model: &FuzzySphere) -> Result<Report, CommandError> {
    let report = model.madore_compare().map_err(run_err)?;
    let (rho, radius_residual) = model.radius_relation().map_err(run_err)?;
    let big_l = model.big_l();

    let mut rep = base_report("fuzzy madore", model);
    rep.push("lambda", Value::Floats(report.lambdas.to_vec()));
    rep.push(
        "cs_scale",
        Value::Float(2.0 / (big_l + 2) as f64),
    );
    rep.push("radius_multiple", Value::Float(rho));

    rep.residual(
        "identity",
        model.identity_residual().map_err(run_err)?,
        1e-10,
    );
    let max_residual = report.residuals.iter().cloned().fold(0.0f64, f64::max);
    rep.residual("proportionality", max_residual, 1e-10);
    if big_l >= 1 {
        let expect = 2.0 / (big_l + 2) as f64;
        let dev = report
            .lambdas
            .iter()
            .map(|l| (l - expect).abs())
            .fold(0.0f64, f64::max);
        rep.residual("lambda-oracle", dev, 1e-10);
    }
    let radius_expect = big_l as f64 / (big_l + 2) as f64;
    rep.residual(
        "radius-oracle",
        (rho - radius_expect).abs().max(radius_residual),
        1e-10,
    );
    Ok(rep)
}

fn truncation_report(model: &FuzzySphere, ell: usize) -> Result<Report, CommandError> {
    let mut rep = base_report("fuzzy truncation", model);
    rep.push("ell", Value::Int(ell as i64));
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for m in -(ell as i64)..=(ell as i64) {
        let norm = model.truncation_norm(ell, m).map_err(run_err)?;
        worst = worst.max(norm);
        rows.push(vec![
            ("m".to_owned(), Value::Int(m)),
            ("norm".to_owned(), Value::Float(norm)),
        ]);
    }
    rep.push("norms", Value::Rows(rows));
    rep.push("max_norm", Value::Float(worst));
    rep.residual(
        "identity",
        model.identity_residual().map_err(run_err)?,
        1e-10,
    );
    if ell > model.big_l() {
        rep.residual("truncation", worst, 1e-10);
    }
    Ok(rep)
}

/// Writes the coefficient tensor; JSON when the path ends in .json, CSV with
/// columns l,m,i,j,re,im otherwise. Returns the number of (l,m) blocks.
fn export_tensor(model: &FuzzySphere, path: &Path) -> Result<usize, CommandError> {
    let tensor = model.coefficient_tensor().map_err(run_err)?;
    let as_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let body = if as_json {
        tensor_json(model, &tensor)
    } else {
        tensor_csv(&tensor)
    };
    let mut file = std::fs::File::create(path)
        .map_err(|e| CommandError::Run(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(body.as_bytes())
        .map_err(|e| CommandError::Run(format!("cannot write {}: {e}", path.display())))?;
    Ok(tensor.yhat_list().len())
}

fn tensor_json(model: &FuzzySphere, tensor: &CoefficientTensor) -> String {
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"L\": {},\n", model.big_l()));
    out.push_str("  \"blocks\": [");
    for (idx, (ell, m, matrix)) in tensor.yhat_list().into_iter().enumerate() {
        if idx > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "\n    {{\"l\": {ell}, \"m\": {m}, \"matrix\": {}}}",
            value_to_json(&Value::Matrix(matrix.clone()))
        ));
    }
    out.push_str("\n  ]\n}\n");
    out
}

fn tensor_csv(tensor: &CoefficientTensor) -> String {
    let mut out = String::from("l,m,i,j,re,im\n");
    for (ell, m, matrix) in tensor.yhat_list() {
        for i in 0..matrix.nrows() {
            for j in 0..matrix.ncols() {
                let z = matrix[(i, j)];
                out.push_str(&format!(
                    "{ell},{m},{i},{j},{},{}\n",
                    fmt_float(z.re),
                    fmt_float(z.im)
                ));
            }
        }
    }
    out
}
