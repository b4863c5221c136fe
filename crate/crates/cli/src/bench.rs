//! Batch runs over instances, methods and seeds.
//!
//! One CSV row per `(instance, method, seed, rho)`; failures become rows with
//! an error message and the run continues. A per-method summary follows on
//! standard output, with the mean granted count and links per granted request.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use serde_json::json;

use rwap_core::io::write_atomic;

use crate::commands::{load_instance, resolve_weights, solve_with, SolveParams};
use crate::output::{plain, Format, Record};
use crate::MethodArg;

/// First line of every bench CSV. Bump the version when columns change.
pub const CSV_VERSION_LINE: &str = "# rwap bench csv v1";

pub const COLUMNS: [&str; 14] = [
    "instance",
    "method",
    "seed",
    "rho",
    "status",
    "granted",
    "links",
    "links_per_granted",
    "objective",
    "feasible",
    "repaired",
    "work",
    "wall_ms",
    "error",
];

#[derive(clap::Args)]
pub struct BenchArgs {
    pub instances: Vec<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodArg::Da, MethodArg::Rs])]
    pub methods: Vec<MethodArg>,
    /// Seeds `0..seeds` for the randomized methods.
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    #[arg(long, default_value_t = 100_000)]
    pub iterations: u64,
    #[arg(long, default_value_t = 8)]
    pub replicas: usize,
    #[arg(long, default_value_t = 7243)]
    pub budget: u64,
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Annealer penalties as offsets above beta; one summary row per offset.
    #[arg(long, value_delimiter = ',', default_values_t = [100])]
    pub rho_offsets: Vec<i64>,
    #[arg(long)]
    pub alpha: Option<i64>,
    #[arg(long)]
    pub beta: Option<i64>,
    /// Per-run CSV; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

struct Row {
    instance: String,
    method: &'static str,
    seed: u64,
    rho: Option<i64>,
    outcome: std::result::Result<RowResult, String>,
    wall_ms: u128,
}

struct RowResult {
    status: String,
    granted: usize,
    links: i64,
    links_per_granted: f64,
    objective: i64,
    feasible: bool,
    repaired: bool,
    work: u64,
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Da => "da",
        MethodArg::Rs => "rs",
        MethodArg::Exact => "exact",
        MethodArg::Bnb => "bnb",
    }
}

fn run_instance(path: &PathBuf, args: &BenchArgs, rows: &mut Vec<Row>) {
    let name = path.display().to_string();
    let loaded = load_instance(path).and_then(|inst| {
        let w = resolve_weights(&inst, args.alpha, args.beta)?;
        Ok((inst, w))
    });
    let (inst, w) = match loaded {
        Ok(pair) => pair,
        Err(e) => {
            rows.push(Row { instance: name, method: "load", seed: 0, rho: None, outcome: Err(format!("{e:#}")), wall_ms: 0 });
            return;
        }
    };
    for &method in &args.methods {
        let randomized = matches!(method, MethodArg::Da | MethodArg::Rs);
        let seeds = if randomized { 0..args.seeds.max(1) } else { 0..1 };
        let rhos: Vec<Option<i64>> = match method {
            MethodArg::Da => args.rho_offsets.iter().map(|o| Some(w.beta + o)).collect(),
            _ => vec![None],
        };
        for rho in rhos {
            for seed in seeds.clone() {
                let params = SolveParams {
                    method,
                    iterations: args.iterations,
                    replicas: args.replicas,
                    rho,
                    seed,
                    budget: args.budget,
                    node_limit: args.node_limit,
                };
                let started = Instant::now();
                let outcome = solve_with(&inst, &w, &params)
                    .map(|(report, _)| RowResult {
                        status: report.status.name().to_string(),
                        granted: report.granted.len(),
                        links: report.f_alpha,
                        links_per_granted: report.links_per_granted(),
                        objective: report.objective,
                        feasible: report.feasible,
                        repaired: report.repaired,
                        work: report.work,
                    })
                    .map_err(|e| format!("{e:#}"));
                rows.push(Row {
                    instance: name.clone(),
                    method: method_name(method),
                    seed,
                    rho,
                    outcome,
                    wall_ms: started.elapsed().as_millis(),
                });
            }
        }
    }
}

fn csv_text(rows: &[Row]) -> Result<Vec<u8>> {
    let mut buffer = format!("{CSV_VERSION_LINE}\n").into_bytes();
    {
        let mut writer = csv::Writer::from_writer(&mut buffer);
        writer.write_record(COLUMNS)?;
        for row in rows {
            let rho = row.rho.map(|r| r.to_string()).unwrap_or_default();
            let fields: Vec<String> = match &row.outcome {
                Ok(r) => vec![
                    row.instance.clone(),
                    row.method.to_string(),
                    row.seed.to_string(),
                    rho,
                    r.status.clone(),
                    r.granted.to_string(),
                    r.links.to_string(),
                    format!("{:.3}", r.links_per_granted),
                    r.objective.to_string(),
                    r.feasible.to_string(),
                    r.repaired.to_string(),
                    r.work.to_string(),
                    row.wall_ms.to_string(),
                    String::new(),
                ],
                Err(e) => {
                    let mut v = vec![row.instance.clone(), row.method.to_string(), row.seed.to_string(), rho];
                    v.extend(std::iter::repeat(String::new()).take(8));
                    v.push(row.wall_ms.to_string());
                    v.push(e.clone());
                    v
                }
            };
            writer.write_record(&fields)?;
        }
        writer.flush()?;
    }
    Ok(buffer)
}

/// Mean granted count and links per granted request per `(method, rho)`,
/// over successful rows.
fn summary(rows: &[Row]) -> Vec<Record> {
    let mut groups: BTreeMap<(&str, Option<i64>), Vec<&RowResult>> = BTreeMap::new();
    for row in rows {
        if let Ok(r) = &row.outcome {
            groups.entry((row.method, row.rho)).or_default().push(r);
        }
    }
    groups
        .into_iter()
        .map(|((method, rho), results)| {
            let count = results.len() as f64;
            let granted = results.iter().map(|r| r.granted as f64).sum::<f64>() / count;
            let links: i64 = results.iter().map(|r| r.links).sum();
            let grants: usize = results.iter().map(|r| r.granted).sum();
            let per_grant = if grants == 0 { 0.0 } else { links as f64 / grants as f64 };
            let feasible = results.iter().filter(|r| r.feasible).count();
            Record::new()
                .field("method", method)
                .field("rho", rho)
                .field("runs", results.len())
                .field("mean_granted", json!((granted * 100.0).round() / 100.0))
                .field("links_per_granted", json!((per_grant * 100.0).round() / 100.0))
                .field("table", format!("{granted:.1} ({per_grant:.1})"))
                .field("feasible_runs", feasible)
        })
        .collect()
}

fn print_summary(records: &[Record], format: Format) -> Result<()> {
    match format {
        Format::Json => {
            let doc: Vec<_> = records.iter().map(Record::to_json).collect();
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(std::io::stdout());
            writer.write_record(["method", "rho", "runs", "mean_granted", "links_per_granted", "table", "feasible_runs"])?;
            for r in records {
                let json = r.to_json();
                let obj = json.as_object().expect("record is an object");
                writer.write_record(obj.values().map(plain))?;
            }
            writer.flush()?;
        }
        Format::Text => {
            for (i, r) in records.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                r.print(Format::Text)?;
            }
        }
    }
    Ok(())
}

pub fn run(args: &BenchArgs) -> Result<ExitCode> {
    let mut rows = Vec::new();
    for path in &args.instances {
        run_instance(path, args, &mut rows);
    }
    let csv = csv_text(&rows)?;
    match &args.output {
        Some(path) => write_atomic(path, &csv)?,
        None => print!("{}", String::from_utf8(csv)?),
    }
    print_summary(&summary(&rows), args.format)?;
    let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
    if failures > 0 {
        eprintln!("{failures} runs failed");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
