use csq_core::verification::{run_all, Comparison, VerifyOptions};

use super::run_err;
use crate::report::{Report, Value};
use crate::{CommandError, VerifyArgs};

pub fn run(args: &VerifyArgs) -> Result<Report, CommandError> {
    let opts = VerifyOptions {
        tolerance_override: args.tol,
        filter: args.only.clone(),
    };
    let records = run_all(&opts).map_err(run_err)?;
    if records.is_empty() {
        return Err(CommandError::Usage(format!(
            "--only {:?} matched no checks",
            args.only.as_deref().unwrap_or("")
        )));
    }

    let mut rep = Report::new("verify");
    rep.push(
        "tolerance_override",
        args.tol.map_or(Value::Null, Value::Float),
    );
    rep.push(
        "filter",
        args.only
            .as_deref()
            .map_or(Value::Null, |s| Value::Str(s.to_owned())),
    );
    rep.push("checks_total", Value::Int(records.len() as i64));
    for r in &records {
        match r.comparison {
            Comparison::LessThan => rep.residual(&r.name, r.value, r.threshold),
            Comparison::GreaterThan => rep.floor(&r.name, r.value, r.threshold),
        }
    }
    Ok(rep)
}
