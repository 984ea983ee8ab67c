//! The `transform` subcommand: push an equation through a point
//! transformation and optionally check invariance of the rational
//! invariants at matched points.

use ode_invariants::expr::{print, Assignment};
use ode_invariants::jet::JetContext;
use ode_invariants::transform::{
    check_invariance, CheckedInvariant, InvarianceOptions, PointTransformPair, TransformError,
};
use serde_json::json;

use crate::input::{parse_bindings, parse_equation, unbound_params, CliError};
use crate::report::{emit_json, fmt_real};
use crate::TransformArgs;

fn map_transform_error(e: TransformError) -> CliError {
    match e {
        TransformError::SlopeDependent
        | TransformError::RoundTripFailed { .. }
        | TransformError::SingularJacobian => {
            CliError::input(format!("invalid transformation: {e}"))
        }
        other => CliError::numeric(other.to_string()),
    }
}

fn parse_check_list(spec: &str) -> Result<Vec<CheckedInvariant>, CliError> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(CheckedInvariant::all().to_vec());
    }
    let mut out = Vec::new();
    for part in spec.split(',') {
        let inv: CheckedInvariant = part
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("unknown invariant {part:?}")))?;
        if !out.contains(&inv) {
            out.push(inv);
        }
    }
    if out.is_empty() {
        return Err(CliError::input("empty --check list"));
    }
    Ok(out)
}

pub fn run(args: &TransformArgs) -> Result<(), CliError> {
    let eq = parse_equation(&args.f)?;
    let bindings = parse_bindings(&args.params)?;
    let mut params = Assignment::new();
    for (name, value) in &bindings {
        params.set(name, *value);
    }

    let coords = [
        ("--phi", &args.phi),
        ("--psi", &args.psi),
        ("--phi-inv", &args.phi_inv),
        ("--psi-inv", &args.psi_inv),
    ];
    let mut parsed = Vec::new();
    for (flag, src) in coords {
        let e = parse_equation(src)?;
        let missing = unbound_params(&e.f, &params);
        if !missing.is_empty() {
            return Err(CliError::input(format!(
                "{flag} uses unbound parameters {missing:?}; bind them with --param"
            )));
        }
        parsed.push(e.f);
    }
    let [phi, psi, phi_inv, psi_inv]: [_; 4] =
        parsed.try_into().expect("four coordinates");

    let pair = PointTransformPair::new(phi, psi, phi_inv, psi_inv, &params)
        .map_err(map_transform_error)?;
    let ctx = JetContext::new(eq.f.clone());
    let fbar = pair.pushforward(&ctx);

    let which = args.check.as_deref().map(parse_check_list).transpose()?;
    let check = which
        .map(|which| {
            let options = InvarianceOptions {
                seed: args.seed,
                samples: args.samples,
                tol: args.tol,
            };
            check_invariance(&ctx, &pair, &params, &which, &options)
        })
        .transpose()
        .map_err(map_transform_error)?;

    if args.json {
        let checks_json = check.as_ref().map(|c| {
            json!(c
                .comparisons
                .iter()
                .map(|cmp| {
                    json!({
                        "invariant": cmp.invariant.to_string(),
                        "points": cmp.points,
                        "skipped": cmp.skipped,
                        "max_relative_residual": cmp.max_relative_residual,
                        "ok": cmp.ok,
                    })
                })
                .collect::<Vec<_>>())
        });
        let doc = json!({
            "command": "transform",
            "f": print(&eq.f),
            "phi": print(pair.phi()),
            "psi": print(pair.psi()),
            "phi_inv": print(pair.phi_inv()),
            "psi_inv": print(pair.psi_inv()),
            "fbar": print(&fbar),
            "seed": args.seed,
            "samples": args.samples,
            "tol": args.tol,
            "checks": checks_json,
            "ok": check.as_ref().map(|c| c.ok()).unwrap_or(true),
        });
        emit_json(&doc);
        if let Some(c) = &check {
            if !c.ok() {
                return Err(CliError::CheckFailed);
            }
        }
        return Ok(());
    }

    println!("equation: y'' = {}", print(&eq.f));
    println!(
        "transformation: xbar = {}, ybar = {}",
        print(pair.phi()),
        print(pair.psi())
    );
    println!(
        "inverse: x = {}, y = {}",
        print(pair.phi_inv()),
        print(pair.psi_inv())
    );
    println!("fbar = {}", print(&fbar));
    if let Some(c) = &check {
        for cmp in &c.comparisons {
            println!(
                "check {}: {} points compared, {} skipped, max relative residual {} ... {}",
                cmp.invariant,
                cmp.points,
                cmp.skipped,
                fmt_real(cmp.max_relative_residual),
                if cmp.ok { "ok" } else { "FAILED" }
            );
        }
        if c.ok() {
            println!("invariance: ok");
        } else {
            println!("invariance: FAILED");
            return Err(CliError::CheckFailed);
        }
    }
    Ok(())
}
