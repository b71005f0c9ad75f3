use std::path::Path;

use clap::Parser;
use discord_core::correlated;
use discord_core::pair;
use discord_core::scan::{self, AxisSpec, ClassKind, CorrelatedPanel, DephasingCriterion};
use discord_core::validation::{self, Suite, ValidationConfig};
use discord_core::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{Cli, Command, ModelKind, Preset, Run, ScanArgs, TraceArgs, TransitionArgs, ValidateArgs};
use crate::output::{self, Cell, Metadata, Table};
use crate::CliError;

pub fn run(run: &Run, out: &Path) -> Result<(), CliError> {
    match &run.command {
        Command::Trace(a) => trace(a, run, out),
        Command::Transition(a) => transition(a, run, out),
        Command::Scan(a) => scan_cmd(a, run, out),
        Command::Figure(a) => {
            for (stem, command) in figure_presets(a.n) {
                let sub = Run { command, ..run.clone() };
                eprintln!("figure {}: {stem}", a.n);
                self::run(&sub, out)?;
            }
            Ok(())
        }
        Command::Validate(a) => validate(a, run, out),
    }
}

fn report(paths: Vec<std::path::PathBuf>) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn trace(a: &TraceArgs, run: &Run, out: &Path) -> Result<(), CliError> {
    let times = a.grid.times()?;
    let model = &a.model;
    let (triples, transition_time) = match model.model {
        ModelKind::Correlated => {
            let cfg = model.correlated()?;
            let triples = times
                .par_iter()
                .map(|&t| correlated::correlations_correlated(t, &cfg))
                .collect::<discord_core::Result<Vec<_>>>()?;
            let last = *times.last().expect("non-empty grid");
            let tt = if cfg.c > 0.0 { correlated::correlated_transition_time(&cfg, last)?.time() } else { None };
            (triples, tt)
        }
        _ => {
            let tr = pair::correlation_trace(model.m, &times, &model.stack()?)?;
            (tr.triples, tr.transition_time)
        }
    };
    let rows = times
        .iter()
        .zip(&triples)
        .map(|(t, x)| vec![Cell::Num(*t), Cell::Num(x.mutual_info), Cell::Num(x.classical), Cell::Num(x.discord)])
        .collect();
    let table = Table { header: vec!["t", "I", "C", "D"], rows };
    let meta = Metadata {
        model: model.model.name().into(),
        params: model.params()?,
        grid: serde_json::to_value(&a.grid).expect("grid serializes"),
        units: model.model.units().into(),
        results: json!({ "transition_time": transition_time }),
    };
    report(output::write_dataset(out, &a.name, &table, &meta, run)?);
    Ok(())
}

fn transition(a: &TransitionArgs, run: &Run, out: &Path) -> Result<(), CliError> {
    let model = &a.model;
    if !(a.horizon > 0.0 && a.horizon.is_finite()) {
        return Err(Error::param("horizon", "horizon must be positive").into());
    }
    let mut details = json!({});
    let verdict: Value = match model.model {
        ModelKind::Dephasing => {
            let deph = model.bath(1.0)?;
            let cls = scan::classify_dephasing_bath(&deph, model.m, a.horizon, DephasingCriterion::from(a.criterion))?;
            details = serde_json::to_value(&cls.evidence).expect("evidence serializes");
            match cls.kind {
                ClassKind::Frozen { transition_time } => json!(transition_time),
                ClassKind::TimeInvariant => json!("time-invariant"),
                ClassKind::Inconclusive => return Err(CliError::Numerical(format!("inconclusive: {details}"))),
            }
        }
        ModelKind::Correlated => {
            let cls = scan::classify_correlated(&model.correlated()?, a.horizon)?;
            details = serde_json::to_value(&cls.evidence).expect("evidence serializes");
            match cls.kind {
                ClassKind::Frozen { transition_time } => json!(transition_time),
                ClassKind::TimeInvariant => json!("time-invariant"),
                ClassKind::Inconclusive => return Err(CliError::Numerical(format!("inconclusive: {details}"))),
            }
        }
        ModelKind::Thermal | ModelKind::Combined => {
            if !(model.m > 0.0 && model.m < 1.0) {
                return Err(Error::param("m", "m must lie in (0,1)").into());
            }
            let times = discord_core::numeric::roots::linspace(0.0, a.horizon, a.points.max(2));
            match pair::branch_switch_time(model.m, &times, &model.stack()?)? {
                Some(t) => json!(t),
                None => json!("none"),
            }
        }
    };
    let result = json!({ "model": model.model.name(), "transition_time": verdict, "horizon": a.horizon });
    println!("{}", serde_json::to_string(&result).expect("serializes"));
    if run.format == crate::args::Format::Json || out != Path::new(".") {
        let meta = Metadata {
            model: model.model.name().into(),
            params: model.params()?,
            grid: json!({ "horizon": a.horizon }),
            units: model.model.units().into(),
            results: json!({ "transition_time": result["transition_time"], "evidence": details }),
        };
        std::fs::create_dir_all(out)?;
        let path = out.join("transition.json");
        std::fs::write(&path, output::pretty(&meta.to_json(run)))?;
    }
    Ok(())
}

fn axis(name: &str, lo: f64, hi: f64, n: usize, open: bool) -> AxisSpec {
    AxisSpec { name: name.into(), lo, hi, n, open_lower: open }
}

fn scan_cmd(a: &ScanArgs, run: &Run, out: &Path) -> Result<(), CliError> {
    let pick = |d: &AxisSpec, lo: Option<f64>, hi: Option<f64>, n: usize| {
        axis(&d.name, lo.unwrap_or(d.lo), hi.unwrap_or(d.hi), n, d.open_lower)
    };
    let (table, model, units, x, y, params) = match a.preset {
        Preset::Fig2a => {
            let x = pick(&axis("s", 0.5, 5.0, 0, false), a.x_lo, a.x_hi, a.nx);
            let y = pick(&axis("t", 0.0, 20.0, 0, false), a.y_lo, a.y_hi, a.ny);
            let map = scan::decoherence_landscape(&x, &y, a.m, a.normalization)?;
            let rows = map.iter().map(|(xv, yv, c)| vec![Cell::Num(xv), Cell::Num(yv), Cell::Text(c.label().into())]).collect();
            let params = json!({ "m": a.m, "normalization": a.normalization });
            (Table { header: vec!["x", "y", "label"], rows }, "dephasing", "omega_c t", x, y, params)
        }
        Preset::Fig2b => {
            let x = pick(&axis("s", 2.0, 5.0, 0, false), a.x_lo, a.x_hi, a.nx);
            let y = pick(&axis("m", 0.0, 0.5, 0, true), a.y_lo, a.y_hi, a.ny);
            let map = scan::dephasing_region(&x, &y, a.normalization, a.horizon, a.criterion.into())?;
            let params = json!({ "normalization": a.normalization, "horizon": a.horizon, "criterion": a.criterion });
            (region_table(&map), "dephasing", "omega_c t", x, y, params)
        }
        Preset::Fig7a | Preset::Fig7b | Preset::Fig7c | Preset::Fig7d => {
            let panel = match a.preset {
                Preset::Fig7a => CorrelatedPanel::OhmicityState,
                Preset::Fig7b => CorrelatedPanel::SqueezingState,
                Preset::Fig7c => CorrelatedPanel::SqueezingOhmicity,
                _ => CorrelatedPanel::CouplingState,
            };
            let (dx, dy) = panel.axes(8);
            let x = pick(&dx, a.x_lo, a.x_hi, a.nx);
            let y = pick(&dy, a.y_lo, a.y_hi, a.ny);
            let schedule = discord_core::correlated::InteractionSchedule::long();
            let map = scan::correlated_region(panel, &x, &y, schedule, a.horizon)?;
            let params = json!({ "fixed": map.metadata, "panel": panel });
            (region_table(&map), "correlated", "omega_c t", x, y, params)
        }
    };
    let meta = Metadata {
        model: model.into(),
        params,
        grid: json!({ "x": x, "y": y }),
        units: units.into(),
        results: json!({
            "labels": label_counts(&table),
        }),
    };
    report(output::write_dataset(out, &a.name, &table, &meta, run)?);
    Ok(())
}

fn region_table(map: &scan::RegionMap<scan::Classification>) -> Table {
    let rows = map.iter().map(|(x, y, c)| vec![Cell::Num(x), Cell::Num(y), Cell::Text(c.kind.label().into())]).collect();
    Table { header: vec!["x", "y", "label"], rows }
}

fn label_counts(table: &Table) -> Value {
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for row in &table.rows {
        if let Some(Cell::Text(l)) = row.last() {
            *counts.entry(l.clone()).or_default() += 1;
        }
    }
    json!(counts)
}

fn validate(a: &ValidateArgs, run: &Run, out: &Path) -> Result<(), CliError> {
    let suites = if a.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        a.suites
            .iter()
            .map(|s| Suite::parse(s).ok_or_else(|| Error::param("suite", format!("unknown suite {s}"))))
            .collect::<discord_core::Result<Vec<_>>>()?
    };
    if a.n == Some(0) {
        return Err(Error::param("n", "at least one case is required").into());
    }
    let cfg = ValidationConfig { seed: run.seed, n: a.n, kappa_form: a.kappa_form.into() };
    let report = validation::run(&suites, &cfg);
    for s in &report.suites {
        println!("{s}");
    }
    if out != Path::new(".") {
        std::fs::create_dir_all(out)?;
        let v = json!({ "run": run, "report": report, "version": env!("CARGO_PKG_VERSION") });
        std::fs::write(out.join("validation.json"), output::pretty(&v))?;
    }
    if report.passed() {
        println!("all suites passed");
        Ok(())
    } else {
        Err(CliError::Numerical("validation failed".into()))
    }
}

fn preset(stem: &str, args: &str) -> (String, Command) {
    let argv = std::iter::once("discord").chain(args.split_whitespace()).chain(["--name", stem]);
    let cli = Cli::try_parse_from(argv).expect("preset arguments parse");
    (stem.to_string(), cli.command.expect("preset names a command"))
}

/// Preset runs for each figure number; time axes in each model's unit.
pub fn figure_presets(n: u8) -> Vec<(String, Command)> {
    const DEPH: &str = "--model dephasing --alpha 0.01 --temp-scale 100 --m 0.1";
    const COMBINED: &str = "--model combined --R 0.01 --delta 50 --N 10 --m 0.1 --alpha 0.01 --temp-scale 100 --beta 1";
    match n {
        1 => vec![
            preset("fig1a", &format!("trace {DEPH} --s 2.5 --tmax 12")),
            preset("fig1b", &format!("trace {DEPH} --s 3.5 --tmax 12")),
        ],
        2 => vec![preset("fig2a", "scan --preset fig2a"), preset("fig2b", "scan --preset fig2b")],
        3 => {
            let base = "trace --model thermal --R 0.01 --m 0.1 --tmin 0.01 --tmax 100000 --spacing log";
            vec![
                preset("fig3_markov", &format!("{base} --delta 0 --N 0")),
                preset("fig3_detuned", &format!("{base} --delta 50 --N 0")),
                preset("fig3_thermal", &format!("{base} --delta 50 --N 10")),
            ]
        }
        4 => vec![
            preset("fig4a", &format!("trace {COMBINED} --s 2.5 --tmax 50")),
            preset("fig4a_inset", &format!("trace {COMBINED} --s 2.5 --tmax 1000")),
            preset("fig4b", &format!("trace {COMBINED} --s 3.5 --tmax 50")),
            preset("fig4b_inset", &format!("trace {COMBINED} --s 3.5 --tmax 1000")),
            preset(
                "fig4c",
                "trace --model combined --R 0.001 --delta 0 --N 10 --m 0.5 --s 2.5 --alpha 0.01 --temp-scale 100 --beta 1 --tmax 50",
            ),
        ],
        5 | 6 => {
            let (s, schedule, tmax) = if n == 5 { (1.0, "short", 50.0) } else { (2.5, "long", 200.0) };
            ["0", "0.5", "1"]
                .iter()
                .map(|r| {
                    preset(
                        &format!("fig{n}_r{r}"),
                        &format!("trace --model correlated --s {s} --c 0.1 --alpha 0.2 --r {r} --schedule {schedule} --tmax {tmax}"),
                    )
                })
                .collect()
        }
        _ => ["a", "b", "c", "d"]
            .iter()
            .map(|p| preset(&format!("fig7{p}"), &format!("scan --preset fig7{p}")))
            .collect(),
    }
}
