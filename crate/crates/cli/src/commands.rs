use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use rwap_core::anneal::{solve_rwap_da_detailed, AnnealConfig, AnnealResult};
use rwap_core::conflicts::{build_conflict_sets, build_strong_groups, ConstraintCounts};
use rwap_core::gen::{generate, synth_topology};
use rwap_core::heuristic::{rs_heur, RsConfig};
use rwap_core::instance::{f_alpha, f_beta, granted_requests, ip_objective, verify_feasible, Network, SolutionFile};
use rwap_core::io::write_atomic;
use rwap_core::ip::{build_ip, ConflictSource};
use rwap_core::oracle::{branch_and_bound, brute_force_ip, ENUMERATION_CAP};
use rwap_core::qubo::{build_qubo, default_rho, rho_base};
use rwap_core::reduce::{mss_to_rwap, MssGraph};
use rwap_core::weights::{beta_base, compute_omega, m_value, Weights};
use rwap_core::{Instance, SolveReport};

use crate::output::{Format, Record};
use crate::{MethodArg, ModelArg, SolveArgs};

pub fn load_instance(path: &Path) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("loading instance {}", path.display()))
}

/// `alpha` defaults to 1 and `beta` to the base formula. Without a grantable
/// request the base formula is undefined and `beta` falls back to 1.
pub fn resolve_weights(instance: &Instance, alpha: Option<i64>, beta: Option<i64>) -> Result<Weights> {
    let alpha = alpha.unwrap_or(1);
    match beta {
        Some(beta) => Ok(Weights::explicit(alpha, beta)),
        None => match beta_base(instance, alpha) {
            Ok(w) => Ok(w),
            Err(rwap_core::Error::UndefinedM) => Ok(Weights::explicit(alpha, 1)),
            Err(e) => Err(e.into()),
        },
    }
}

fn parse_topology(source: &str, seed: u64) -> Result<Network> {
    if let Some(rest) = source.strip_prefix("synth:") {
        let (nodes, degree) = rest.split_once(',').context("expected synth:<nodes>,<edges per node>")?;
        let nodes: usize = nodes.trim().parse().context("node count")?;
        let degree: f64 = degree.trim().parse().context("edges per node")?;
        return Ok(synth_topology(nodes, degree, seed)?);
    }
    Network::load(source).with_context(|| format!("loading topology {source}"))
}

pub fn gen(topology: &str, wavelengths: usize, requests: usize, paths: usize, seed: u64, output: &Path) -> Result<ExitCode> {
    let network = parse_topology(topology, seed)?;
    let generated = generate(&network, wavelengths, requests, paths, seed)?;
    if !generated.short_pools.is_empty() {
        eprintln!("warning: {} requests have fewer than {paths} candidate paths", generated.short_pools.len());
    }
    generated.instance.save(output)?;
    println!(
        "{} requests, {} variables, {} links written to {}",
        generated.instance.request_count(),
        generated.instance.var_count(),
        network.link_count(),
        output.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn conflicts(path: &Path, format: Format) -> Result<ExitCode> {
    let inst = load_instance(path)?;
    let sets = build_conflict_sets(&inst);
    let counts = ConstraintCounts::new(&inst, &sets, &build_strong_groups(&inst));
    Record::new()
        .field("vars", counts.vars)
        .field("requests", counts.requests)
        .field("c1", counts.c1)
        .field("c2", counts.c2)
        .field("c3", counts.c3)
        .field("c4", counts.c4)
        .field("base_constraints", counts.base)
        .field("strong_constraints", counts.strong)
        .field("strong_constraints_emitted", counts.strong_emitted)
        .field("singleton_groups", counts.singleton_groups)
        .field("base_cons_per_var", round3(counts.base_ratio()))
        .field("strong_cons_per_var", round3(counts.strong_ratio()))
        .field("strong_emitted_cons_per_var", round3(counts.strong_emitted_ratio()))
        .print(format)?;
    Ok(ExitCode::SUCCESS)
}

fn round3(x: f64) -> Value {
    json!((x * 1000.0).round() / 1000.0)
}

pub fn weights(path: &Path, alpha: i64, tight: bool, format: Format) -> Result<ExitCode> {
    let inst = load_instance(path)?;
    let mut record = Record::new().field("alpha", alpha).field("m", m_value(&inst));
    match beta_base(&inst, alpha) {
        Ok(w) => record.push("beta_base", w.beta),
        Err(rwap_core::Error::UndefinedM) => record.push("beta_base", Value::Null),
        Err(e) => return Err(e.into()),
    }
    if tight {
        let report = compute_omega(&inst, &build_conflict_sets(&inst), ENUMERATION_CAP)?;
        record.push("omega_eq", report.omega_eq.map(|r| r.to_string()));
        record.push("omega_gt", report.omega_gt.map(|r| r.to_string()));
        record.push("beta_tight", report.beta_tight);
    }
    record.print(format)?;
    Ok(ExitCode::SUCCESS)
}

pub fn export_lp(path: &Path, model: ModelArg, alpha: Option<i64>, beta: Option<i64>, output: &Path) -> Result<ExitCode> {
    let inst = load_instance(path)?;
    let w = resolve_weights(&inst, alpha, beta)?;
    let lp = match model {
        ModelArg::Base => build_ip(&inst, ConflictSource::Pairs(&build_conflict_sets(&inst)), &w),
        ModelArg::Strong => build_ip(&inst, ConflictSource::Groups(&build_strong_groups(&inst)), &w),
    };
    lp.write_lp(output)?;
    println!("{} variables, {} rows written to {}", lp.var_names.len(), lp.constraints.len(), output.display());
    Ok(ExitCode::SUCCESS)
}

pub fn export_qubo(path: &Path, rho: Option<i64>, alpha: Option<i64>, beta: Option<i64>, output: &Path) -> Result<ExitCode> {
    let inst = load_instance(path)?;
    let w = resolve_weights(&inst, alpha, beta)?;
    let rho = rho.unwrap_or_else(|| rho_base(&inst, &w).value);
    if rho < 1 {
        bail!("rho must be at least 1");
    }
    let qubo = build_qubo(&inst, &build_conflict_sets(&inst), &w, rho);
    write_atomic(output, qubo.to_text().as_bytes())?;
    println!("{} variables, rho {rho}, written to {}", qubo.n(), output.display());
    Ok(ExitCode::SUCCESS)
}

/// Parameters shared by `solve` and `bench`.
pub struct SolveParams {
    pub method: MethodArg,
    pub iterations: u64,
    pub replicas: usize,
    pub rho: Option<i64>,
    pub seed: u64,
    pub budget: u64,
    pub node_limit: Option<u64>,
}

pub fn solve_with(inst: &Instance, w: &Weights, params: &SolveParams) -> Result<(SolveReport, Option<AnnealResult>)> {
    let conflicts = build_conflict_sets(inst);
    match params.method {
        MethodArg::Da => {
            let rho = params.rho.unwrap_or_else(|| default_rho(w));
            if rho < 1 {
                bail!("rho must be at least 1");
            }
            let qubo = build_qubo(inst, &conflicts, w, rho);
            let mut config = AnnealConfig::for_qubo(&qubo, params.iterations, params.seed);
            config.replicas = params.replicas;
            let (report, result) = solve_rwap_da_detailed(inst, w, rho, &config)?;
            Ok((report, Some(result)))
        }
        MethodArg::Rs => {
            let mut report = rs_heur(inst, &conflicts, &RsConfig::new(params.budget, params.seed))?;
            report.objective = ip_objective(inst, &report.solution, w.alpha, w.beta)?;
            Ok((report, None))
        }
        MethodArg::Exact => Ok((brute_force_ip(inst, &conflicts, w)?, None)),
        MethodArg::Bnb => Ok((branch_and_bound(inst, &build_strong_groups(inst), w, params.node_limit)?, None)),
    }
}

pub fn report_record(report: &SolveReport) -> Record {
    Record::new()
        .field("method", report.method.name())
        .field("status", report.status.name())
        .field("feasible", report.feasible)
        .field("repaired", report.repaired)
        .field("granted_count", report.granted.len())
        .field("granted", report.granted.clone())
        .field("objective", report.objective)
        .field("f_alpha", report.f_alpha)
        .field("f_beta", report.f_beta)
        .field("links_per_granted", round3(report.links_per_granted()))
        .field("lower_bound", report.lower_bound)
        .field("energy", report.energy)
        .field("work", report.work)
        .field("mixed_wavelengths", report.mixed_wavelengths)
        .field("bits", report.solution.to_bit_string())
}

fn write_trace(path: &Path, result: &AnnealResult) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["iteration", "best_energy"])?;
    for point in &result.trace {
        writer.write_record([point.iteration.to_string(), point.best_energy.to_string()])?;
    }
    write_atomic(path, &writer.into_inner()?)?;
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<ExitCode> {
    let inst = load_instance(&args.instance)?;
    let w = resolve_weights(&inst, args.alpha, args.beta)?;
    let params = SolveParams {
        method: args.method,
        iterations: args.iterations,
        replicas: args.replicas,
        rho: args.rho,
        seed: args.seed,
        budget: args.budget,
        node_limit: args.node_limit,
    };
    let (report, anneal) = solve_with(&inst, &w, &params)?;
    match (&args.trace, &anneal) {
        (Some(path), Some(result)) => write_trace(path, result)?,
        (Some(_), None) => eprintln!("warning: --trace applies to the annealer only"),
        _ => {}
    }
    if let Some(path) = &args.output {
        let file = SolutionFile::describe(&inst, &report.solution, w.alpha, w.beta)?;
        write_atomic(path, serde_json::to_string_pretty(&file)?.as_bytes())?;
    }
    report_record(&report).field("alpha", w.alpha).field("beta", w.beta).print(args.format)?;
    Ok(if report.feasible { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

pub fn verify(instance_path: &Path, solution_path: &Path, format: Format) -> Result<ExitCode> {
    let inst = load_instance(instance_path)?;
    let text = std::fs::read_to_string(solution_path).with_context(|| format!("reading {}", solution_path.display()))?;
    let file: SolutionFile = serde_json::from_str(&text).context("parsing solution file")?;
    let solution = file.solution()?;
    let verdict = verify_feasible(&inst, &build_conflict_sets(&inst), &solution)?;

    let mut mismatches = Vec::new();
    if granted_requests(&inst, &solution)? != file.granted {
        mismatches.push("granted");
    }
    if f_alpha(&inst, &solution)? != file.f_alpha {
        mismatches.push("f_alpha");
    }
    if f_beta(&inst, &solution)? != file.f_beta {
        mismatches.push("f_beta");
    }

    match format {
        Format::Json => {
            let doc = json!({
                "feasible": verdict.is_feasible(),
                "violations": verdict.violations,
                "mismatched_fields": mismatches,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Text | Format::Csv => {
            let record = Record::new()
                .field("feasible", verdict.is_feasible())
                .field("violations", verdict.violations.len())
                .field("mismatched_fields", mismatches.join(" "));
            record.print(format)?;
            if format == Format::Text {
                for v in &verdict.violations {
                    println!("  {v}");
                }
            }
        }
    }
    Ok(if verdict.is_feasible() && mismatches.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

pub fn reduce_mss(graph_path: &Path, output: &Path) -> Result<ExitCode> {
    let graph = MssGraph::load(graph_path).with_context(|| format!("loading graph {}", graph_path.display()))?;
    let inst = mss_to_rwap(&graph);
    inst.save(output)?;
    println!(
        "{} nodes, {} edges -> {} requests, {} links written to {}",
        graph.node_count(),
        graph.edges().len(),
        inst.request_count(),
        inst.network().link_count(),
        output.display()
    );
    Ok(ExitCode::SUCCESS)
}
