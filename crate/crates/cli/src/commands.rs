//! One function per subcommand.

use std::f64::consts::FRAC_PI_2;

use anyhow::Result;
use serde_json::Value;

use ctxgeom::analysis::{
    context_table, ncycle_asymptote, ncycle_scan, s2_total, verify_coarse_graining,
    verify_exactness, ExactnessReport, MonotonicityReport, DEFAULT_DIMS, DEFAULT_FAMILY_SIZES,
};
use ctxgeom::states::STATE_NAMES;
use ctxgeom::witnesses::{mu_bound, p_star, witness_report};
use ctxgeom::{
    build_chsh, build_kcbs, kcbs_mixing_state, named_state, sweep_state, ChshConfig, Scenario,
};

use crate::output::{object, Format, Json, Sink};

/// Points in the pure-state sweep `s in [0, pi/2]`.
pub const SWEEP_POINTS: usize = 91;
pub const DEFAULT_NS: [usize; 6] = [5, 7, 9, 11, 13, 15];

pub fn default_p_grid() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, p_star(), 0.75, 0.9, 1.0]
}

fn contexts_json(scenario: &Scenario, j: Json) -> Result<Value> {
    let rows = context_table(scenario)?
        .into_iter()
        .enumerate()
        .map(|(k, inv)| {
            let mu = mu_bound(inv.c_mu)?;
            Ok(object(vec![
                ("index", Value::from(k)),
                ("e", j.num(inv.e)),
                ("s2_bits", j.num(inv.s2_bits)),
                ("c_mu", j.num(inv.c_mu)),
                ("c_mu_sq", j.num(inv.c_mu * inv.c_mu)),
                ("saturated", Value::from(inv.saturated)),
                ("mu_bound_bits", j.num(mu.bits)),
                ("mu_trivial", Value::from(mu.trivial)),
                ("principal_angles", j.nums(&inv.principal_angles)),
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Value::Array(rows))
}

pub fn exactness_json(report: &ExactnessReport, j: Json) -> Value {
    let mechanism = serde_json::to_value(report.mechanism).unwrap_or(Value::Null);
    object(vec![
        (
            "total_ordered_pairs",
            Value::from(report.total_ordered_pairs),
        ),
        ("duplicate_count", Value::from(report.duplicate_count)),
        (
            "duplicate_contributions",
            j.nums(&report.duplicate_contributions),
        ),
        ("mechanism", mechanism),
        ("s2_total_bits", j.num(report.s2_total_bits)),
    ])
}

fn monotonicity_json(r: &MonotonicityReport, j: Json) -> Value {
    // Scientific notation keeps the tiny residuals readable at any precision.
    let sci = |x: f64| Value::String(format!("{x:.3e}"));
    object(vec![
        ("trials", Value::from(r.trials)),
        ("seed", Value::from(r.seed)),
        ("dims", Value::from(r.dims.clone())),
        ("family_sizes", Value::from(r.family_sizes.clone())),
        ("violations", Value::from(r.violations)),
        ("max_negative_delta", j.num(r.max_negative_delta)),
        ("equality_cases", Value::from(r.equality_cases)),
        (
            "equality_condition_failures",
            Value::from(r.equality_condition_failures),
        ),
        ("min_delta", j.num(r.min_delta)),
        ("max_cross_term_residual", sci(r.max_cross_term_residual)),
    ])
}

pub fn kcbs(sink: &Sink, format: Format, p_grid: &[f64]) -> Result<()> {
    let j = sink.json();
    let scenario = build_kcbs()?;
    let s2 = s2_total(&scenario)?;
    let ps = p_star();

    let mut grid_json = Vec::new();
    let mut fig1 = Vec::new();
    for &p in p_grid {
        let rho = kcbs_mixing_state(p)?;
        let w = witness_report(&scenario, &rho)?;
        let chi = w.chi.unwrap_or(f64::NAN);
        let cf = w.cf.unwrap_or(f64::NAN);
        fig1.push(vec![
            sink.fixed(p),
            sink.fixed(chi),
            sink.fixed(cf),
            sink.fixed(w.bc_max),
        ]);
        grid_json.push(object(vec![
            ("p", j.num(p)),
            ("chi", j.num(chi)),
            ("cf", j.num(cf)),
            ("bc_bits", j.nums(&w.bc_values)),
            ("bc_max_bits", j.num(w.bc_max)),
            ("d_total", j.num(w.d_total)),
        ]));
    }

    let mut states_json = Vec::new();
    let mut fig2b = Vec::new();
    for name in STATE_NAMES.iter().filter(|n| **n != "phi_plus") {
        let w = witness_report(&scenario, &named_state(name)?)?;
        fig2b.push(vec![name.to_string(), sink.fixed(w.d_total)]);
        states_json.push(object(vec![
            ("state", Value::from(*name)),
            ("chi", j.opt(w.chi)),
            ("cf", j.opt(w.cf)),
            ("bc_max_bits", j.num(w.bc_max)),
            ("d_per_context", j.nums(&w.d_per_context)),
            ("d_total", j.num(w.d_total)),
        ]));
    }

    let mut fig2a = Vec::with_capacity(SWEEP_POINTS);
    for i in 0..SWEEP_POINTS {
        let s = FRAC_PI_2 * i as f64 / (SWEEP_POINTS - 1) as f64;
        let w = witness_report(&scenario, &sweep_state(s)?)?;
        fig2a.push(vec![sink.fixed(s), sink.fixed(w.d_total)]);
    }

    let theta_deg = match scenario.params() {
        ctxgeom::ScenarioParams::NCycle(cfg) => cfg.theta_degrees(),
        _ => f64::NAN,
    };
    let summary = object(vec![
        ("scenario", Value::from("kcbs")),
        ("precision", Value::from(sink.precision)),
        ("theta_deg", j.num(theta_deg)),
        ("p_star", j.num(ps)),
        ("s2_total_bits", j.num(s2)),
        ("chi_nc", j.num(-3.0)),
        ("chi_ns", j.num(-5.0)),
        ("contexts", contexts_json(&scenario, j)?),
        (
            "exactness",
            exactness_json(&verify_exactness(&scenario)?, j),
        ),
        ("p_grid", Value::Array(grid_json)),
        ("states", Value::Array(states_json)),
    ]);
    sink.write_summary("kcbs_summary", &summary, format)?;

    let meta = [
        ("p_star", sink.fixed(ps)),
        ("s2_total_bits", sink.fixed(s2)),
    ];
    sink.write_csv("fig1.csv", &meta, &["p", "chi", "cf", "bc_max_bits"], &fig1)?;
    sink.write_csv("fig2a.csv", &meta, &["s", "D_total"], &fig2a)?;
    sink.write_csv("fig2b.csv", &meta, &["state", "D_total"], &fig2b)?;
    Ok(())
}

pub fn chsh(sink: &Sink, format: Format, regime: &str, config: ChshConfig) -> Result<()> {
    let j = sink.json();
    let scenario = build_chsh(config)?;
    let rho = named_state("phi_plus")?;
    let w = witness_report(&scenario, &rho)?;
    let summary = object(vec![
        ("scenario", Value::from("chsh")),
        ("regime", Value::from(regime)),
        ("precision", Value::from(sink.precision)),
        (
            "angles",
            j.nums(&[config.a0, config.b0, config.a1, config.b1]),
        ),
        ("state", Value::from("phi_plus")),
        ("chi", j.opt(w.chi)),
        ("cf", j.opt(w.cf)),
        ("chi_nc", j.num(2.0)),
        ("chi_ns", j.num(4.0)),
        ("bc_bits", j.nums(&w.bc_values)),
        ("bc_max_bits", j.num(w.bc_max)),
        ("d_per_context", j.nums(&w.d_per_context)),
        ("d_total", j.num(w.d_total)),
        ("mu_bound_scenario_bits", j.num(w.mu_bound_scenario_bits)),
        ("s2_total_bits", j.num(w.s2_total_bits)),
        ("contexts", contexts_json(&scenario, j)?),
        (
            "exactness",
            exactness_json(&verify_exactness(&scenario)?, j),
        ),
    ]);
    sink.write_summary("chsh_summary", &summary, format)?;
    Ok(())
}

pub fn ncycle(sink: &Sink, format: Format, ns: &[usize]) -> Result<()> {
    let rows = ncycle_scan(ns)?;
    let max_dev = rows
        .iter()
        .map(|r| r.c_mu_max_deviation)
        .fold(0.0, f64::max);
    match format {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        sink.fixed(r.theta_deg),
                        sink.fixed(r.e),
                        sink.fixed(r.s2_per_context),
                        sink.fixed(r.s2_total),
                        sink.fixed(r.n2_s2),
                    ]
                })
                .collect();
            let meta = [
                ("asymptote_n2_s2", sink.fixed(ncycle_asymptote())),
                ("c_mu_max_deviation", format!("{max_dev:.3e}")),
            ];
            let header = ["n", "theta_deg", "E", "S2_per_context", "S2_total", "n2_S2"];
            sink.write_csv("ncycle.csv", &meta, &header, &table)?;
        }
        Format::Json => {
            let j = sink.json();
            let table: Vec<Value> = rows
                .iter()
                .map(|r| {
                    object(vec![
                        ("n", Value::from(r.n)),
                        ("theta_deg", j.num(r.theta_deg)),
                        ("E", j.num(r.e)),
                        ("S2_per_context", j.num(r.s2_per_context)),
                        ("S2_total", j.num(r.s2_total)),
                        ("n2_S2", j.num(r.n2_s2)),
                        (
                            "c_mu_max_deviation",
                            Value::String(format!("{:.3e}", r.c_mu_max_deviation)),
                        ),
                    ])
                })
                .collect();
            let value = object(vec![
                ("asymptote_n2_s2", j.num(ncycle_asymptote())),
                ("rows", Value::Array(table)),
            ]);
            sink.write_json("ncycle.json", &value)?;
        }
    }
    Ok(())
}

pub fn verify(sink: &Sink, trials: usize, seed: u64) -> Result<()> {
    let j = sink.json();
    let kcbs = verify_exactness(&build_kcbs()?)?;
    let bell = verify_exactness(&build_chsh(ChshConfig::bell_optimal())?)?;
    let entropic = verify_exactness(&build_chsh(ChshConfig::entropic_optimal())?)?;
    let mono = verify_coarse_graining(trials, &DEFAULT_DIMS, &DEFAULT_FAMILY_SIZES, seed)?;
    let value = object(vec![
        (
            "exactness",
            object(vec![
                ("kcbs", exactness_json(&kcbs, j)),
                ("chsh_bell", exactness_json(&bell, j)),
                ("chsh_entropic", exactness_json(&entropic, j)),
            ]),
        ),
        ("monotonicity", monotonicity_json(&mono, j)),
    ]);
    sink.write_json("verify.json", &value)?;
    Ok(())
}
