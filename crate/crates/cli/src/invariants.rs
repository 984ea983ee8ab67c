//! The `invariants` subcommand: the two relative invariants in symbolic
//! form, plus every derived invariant evaluated at a requested point.

use std::collections::BTreeSet;

use num_complex::Complex64;
use ode_invariants::expr::{evaluate, print, Assignment, ExprRef};
use ode_invariants::invariants::{nu_exprs, rational_invariants, relative_invariants};
use ode_invariants::jet::JetContext;
use ode_invariants::sample::Sampler;
use serde_json::json;

use crate::input::{parse_bindings, parse_equation, parse_point, unbound_params, CliError};
use crate::report::{emit_json, fmt_complex, json_complex, json_complex_opt};
use crate::InvariantsArgs;

/// Evaluates `e`, mapping evaluation failures and non-finite results to
/// `None` so singular points print as `undefined` rather than aborting.
fn value_at(e: &ExprRef, at: &Assignment) -> Option<Complex64> {
    evaluate(e, at).ok().filter(|v| v.is_finite())
}

fn print_value(name: &str, v: Option<Complex64>) {
    match v {
        Some(v) => println!("{name} = {}", fmt_complex(v)),
        None => println!("{name} = undefined at this point"),
    }
}

pub fn run(args: &InvariantsArgs) -> Result<(), CliError> {
    let eq = parse_equation(&args.f)?;
    let bindings = parse_bindings(&args.params)?;
    let mut params = Assignment::new();
    for (name, value) in &bindings {
        params.set(name, *value);
    }

    let ctx = JetContext::new(eq.f.clone());
    let rel = relative_invariants(&ctx)
        .map_err(|e| CliError::numeric(e.to_string()))?;

    let point = args.at.as_deref().map(parse_point).transpose()?;
    let mut values = None;
    let mut sampled: Vec<(String, Complex64)> = Vec::new();
    if let Some([x, y, p]) = point {
        let t = ctx.t_values().map_err(|e| CliError::numeric(e.to_string()))?;
        let nus = nu_exprs(&t);
        let rat = rational_invariants(&t);

        let mut at = params.clone();
        at.set("x", x);
        at.set("y", y);
        at.set("p", p);
        let mut missing: BTreeSet<String> = BTreeSet::new();
        for e in nus.iter().chain([&rel.i1, &rel.i2, &rat.b1, &rat.b2, &rat.b3, &rat.r12]) {
            missing.extend(unbound_params(e, &at));
        }
        let mut sampler = Sampler::from_seed(args.seed);
        for name in missing {
            let v = sampler.annulus();
            at.set(&name, v);
            sampled.push((name, v));
        }

        let nu_values: Vec<Option<Complex64>> =
            nus.iter().map(|e| value_at(e, &at)).collect();
        values = Some((
            value_at(&rel.i1, &at),
            value_at(&rel.i2, &at),
            nu_values,
            [
                value_at(&rat.b1, &at),
                value_at(&rat.b2, &at),
                value_at(&rat.b3, &at),
            ],
            value_at(&rat.r12, &at),
        ));
    }

    if args.json {
        let at_json = point.map(|p| json!(p.iter().map(|z| json_complex(*z)).collect::<Vec<_>>()));
        let values_json = values.as_ref().map(|(i1, i2, nu, b, r12)| {
            json!({
                "i1": json_complex_opt(*i1),
                "i2": json_complex_opt(*i2),
                "nu": nu.iter().map(|v| json_complex_opt(*v)).collect::<Vec<_>>(),
                "b": b.iter().map(|v| json_complex_opt(*v)).collect::<Vec<_>>(),
                "r12": json_complex_opt(*r12),
            })
        });
        let doc = json!({
            "command": "invariants",
            "f": print(&eq.f),
            "i1": print(&rel.i1),
            "i2": print(&rel.i2),
            "bound_parameters": bindings
                .iter()
                .map(|(n, v)| (n.clone(), json_complex(*v)))
                .collect::<serde_json::Map<String, serde_json::Value>>(),
            "sampled_parameters": sampled
                .iter()
                .map(|(n, v)| (n.clone(), json_complex(*v)))
                .collect::<serde_json::Map<String, serde_json::Value>>(),
            "seed": args.seed,
            "at": at_json,
            "values": values_json,
        });
        emit_json(&doc);
        return Ok(());
    }

    println!("equation: y'' = {}", print(&eq.f));
    if !bindings.is_empty() {
        let shown: Vec<String> = bindings
            .iter()
            .map(|(n, v)| format!("{n} = {}", fmt_complex(*v)))
            .collect();
        println!("bound parameters: {}", shown.join(", "));
    }
    println!("I1 = {}", print(&rel.i1));
    println!("I2 = {}", print(&rel.i2));
    if let Some([x, y, p]) = point {
        println!(
            "at x = {}, y = {}, p = {}:",
            fmt_complex(x),
            fmt_complex(y),
            fmt_complex(p)
        );
        if !sampled.is_empty() {
            let shown: Vec<String> = sampled
                .iter()
                .map(|(n, v)| format!("{n} = {}", fmt_complex(*v)))
                .collect();
            println!(
                "sampled parameters (seed {}): {}",
                args.seed,
                shown.join(", ")
            );
        }
        let (i1, i2, nu, b, r12) = values.expect("computed with the point");
        print_value("I1", i1);
        print_value("I2", i2);
        for (k, v) in nu.iter().enumerate() {
            print_value(&format!("nu{}", k + 1), *v);
        }
        for (k, v) in b.iter().enumerate() {
            print_value(&format!("B{}", k + 1), *v);
        }
        print_value("R12", r12);
    }
    Ok(())
}
