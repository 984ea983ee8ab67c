//! The `classify` subcommand: equation class, invariant samples, rank,
//! and symmetry dimension.

use std::time::Instant;

use num_complex::Complex64;
use ode_invariants::expr::{evaluate, print, Assignment};
use ode_invariants::invariants::{
    classify, rational_invariants, ClassifyOptions, ClassifyReport, EquationClass,
    InvariantError, SymmetryDimension,
};
use ode_invariants::jet::JetContext;
use serde_json::json;

use crate::input::{parse_bindings, parse_equation, CliError};
use crate::report::{emit_json, fmt_complex, fmt_real, json_complex, mean_dev, MeanDev};
use crate::ClassifyArgs;

/// Maps sampling failures onto the numeric-failure exit path.
pub fn map_invariant_error(e: InvariantError) -> CliError {
    match e {
        InvariantError::NotEnoughValidPoints { needed, got } => CliError::numeric(format!(
            "all but {got} sample points were singular, {needed} needed; \
             try another --seed"
        )),
        other => CliError::numeric(other.to_string()),
    }
}

/// Evaluates `R12` at the points already accepted for the `B` samples.
pub fn r12_samples(ctx: &JetContext, report: &ClassifyReport) -> Vec<Complex64> {
    let Ok(t) = ctx.t_values() else {
        return Vec::new();
    };
    let r12 = rational_invariants(&t).r12;
    report
        .b_samples
        .iter()
        .filter_map(|s| evaluate(&r12, &s.at).ok())
        .filter(|v| v.is_finite())
        .collect()
}

pub fn run(args: &ClassifyArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let eq = parse_equation(&args.f)?;
    let bindings = parse_bindings(&args.params)?;
    let mut params = Assignment::new();
    for (name, value) in &bindings {
        params.set(name, *value);
    }
    let sampled: Vec<&String> = eq
        .params
        .iter()
        .filter(|n| params.get(n).is_none())
        .collect();

    let ctx = JetContext::new(eq.f.clone());
    let options = ClassifyOptions {
        seed: args.seed,
        samples: args.samples,
        tol: args.tol,
        ..ClassifyOptions::default()
    };
    let report = classify(&ctx, &params, &options).map_err(map_invariant_error)?;

    let b_stats: Option<[MeanDev; 3]> = if report.b_samples.is_empty() {
        None
    } else {
        let columns: Vec<Vec<Complex64>> = (0..3)
            .map(|k| report.b_samples.iter().map(|s| s.b[k]).collect())
            .collect();
        let mut stats = columns.iter().map(|c| mean_dev(c).expect("nonempty"));
        Some([
            stats.next().unwrap(),
            stats.next().unwrap(),
            stats.next().unwrap(),
        ])
    };
    let r12_stats = mean_dev(&r12_samples(&ctx, &report));
    let elapsed_ms = started.elapsed().as_millis();

    if args.json {
        let doc = json!({
            "command": "classify",
            "f": print(&eq.f),
            "bound_parameters": bindings
                .iter()
                .map(|(n, v)| (n.clone(), json_complex(*v)))
                .collect::<serde_json::Map<String, serde_json::Value>>(),
            "sampled_parameters": sampled,
            "seed": args.seed,
            "samples_requested": args.samples,
            "samples_accepted": report.b_samples.len(),
            "tol": args.tol,
            "class": report.class.to_string(),
            "i1_identically_zero": report.i1_vanishes,
            "i2_identically_zero": report.i2_vanishes,
            "b_mean": b_stats
                .as_ref()
                .map(|s| json!(s.iter().map(|m| json_complex(m.mean)).collect::<Vec<_>>())),
            "b_max_deviation": b_stats
                .as_ref()
                .map(|s| json!(s.iter().map(|m| m.max_dev).collect::<Vec<_>>())),
            "r12_mean": r12_stats.as_ref().map(|m| json_complex(m.mean)),
            "r12_max_deviation": r12_stats.as_ref().map(|m| m.max_dev),
            "rank": report.rank.as_ref().map(|r| r.rank),
            "rank_votes": report.rank.as_ref().map(|r| r.votes.clone()),
            "symmetry_dimension": report.symmetry_dimension.as_u8(),
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
    if !sampled.is_empty() {
        let names: Vec<&str> = sampled.iter().map(|s| s.as_str()).collect();
        println!(
            "sampled parameters (seed {}): {}",
            args.seed,
            names.join(", ")
        );
    }
    println!("class: {}", report.class);
    println!(
        "I1 identically zero: {}",
        if report.i1_vanishes { "yes" } else { "no" }
    );
    println!(
        "I2 identically zero: {}",
        if report.i2_vanishes { "yes" } else { "no" }
    );
    if report.class == EquationClass::FirstClass {
        println!(
            "samples: {} accepted of {} requested, seed {}, tol {}",
            report.b_samples.len(),
            args.samples,
            args.seed,
            fmt_real(args.tol)
        );
        if let Some(stats) = &b_stats {
            for (k, m) in stats.iter().enumerate() {
                println!(
                    "B{}: mean {}, max deviation {}",
                    k + 1,
                    fmt_complex(m.mean),
                    fmt_real(m.max_dev)
                );
            }
        }
        if let Some(m) = &r12_stats {
            println!(
                "R12: mean {}, max deviation {}",
                fmt_complex(m.mean),
                fmt_real(m.max_dev)
            );
        }
        if let Some(rank) = &report.rank {
            let votes: Vec<String> = rank.votes.iter().map(|v| v.to_string()).collect();
            println!("jacobian rank: {} (votes: {})", rank.rank, votes.join(" "));
        }
    }
    match report.symmetry_dimension {
        SymmetryDimension::Known(d) => println!("symmetry dimension: {d}"),
        SymmetryDimension::OutsideScope => {
            println!("symmetry dimension: outside the scope of this construction")
        }
    }
    println!("elapsed: {elapsed_ms} ms");
    Ok(())
}
