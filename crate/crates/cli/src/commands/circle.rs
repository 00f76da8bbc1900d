use std::f64::consts::PI;

use csq_core::circle::CircleModel;
use csq_core::quad::Point;
use csq_core::quantizer;

use super::run_err;
use crate::report::{Report, Value};
use crate::{CircleArgs, CommandError};

pub fn run(args: &CircleArgs) -> Result<Report, CommandError> {
    if args.samples == 0 {
        return Err(CommandError::Usage("--samples must be at least 1".into()));
    }
    let model = CircleModel::new().map_err(run_err)?;
    let op = model.operator(args.a, args.b, args.d);
    let (lower, upper) = model.symbols(args.a, args.b, args.d);
    let numeric = quantizer::lower_symbol(model.frame(), &op).map_err(run_err)?;

    let mut rows = Vec::with_capacity(args.samples);
    let mut symbol_residual: f64 = 0.0;
    for k in 0..args.samples {
        let theta = 2.0 * PI * k as f64 / args.samples as f64;
        let p = Point::circle(theta);
        let lo = lower.eval(p);
        symbol_residual = symbol_residual.max((lo - numeric.eval(p)).norm());
        rows.push(vec![
            ("theta".to_owned(), Value::Float(theta)),
            ("lower".to_owned(), Value::Float(lo.re)),
            ("upper".to_owned(), Value::Float(upper.eval(p).re)),
        ]);
    }
    let back = model
        .quantize_upper(args.a, args.b, args.d)
        .map_err(run_err)?;

    let mut rep = Report::new("circle");
    rep.push("a", Value::Float(args.a));
    rep.push("b", Value::Float(args.b));
    rep.push("d", Value::Float(args.d));
    rep.push("operator", Value::Matrix(op.matrix().clone()));
    rep.push("samples", Value::Rows(rows));
    rep.residual(
        "identity",
        model.identity_residual().map_err(run_err)?,
        1e-10,
    );
    rep.residual("lower-symbol-match", symbol_residual, 1e-10);
    rep.residual("upper-roundtrip", back.max_abs_diff(&op), 1e-10);
    Ok(rep)
}
