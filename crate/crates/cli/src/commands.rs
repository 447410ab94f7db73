// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;

use qrdp::accountant::simulate_rounds;
use qrdp::budget::{budget_sweep, exact_budget_two_sided, linspace, search_budget, BudgetRow};
use qrdp::channel::{audit_kraus, audit_noise, ChannelDocument};
use qrdp::fidelity::{utility_csv, utility_privacy_sweep};
use qrdp::measurement::PovmDocument;
use qrdp::report::{console_float, csv_float};
use qrdp::state::StateDocument;
use qrdp::{
    computational_basis_povm, intuitive_budget, qdp_epsilon, rdp_to_dp, AlphaGrid, DensityMatrix, NeighborPair,
    NoiseParam, NoiseSpec, WorkloadDocument,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::failure::CliError;
use crate::{BudgetArgs, CheckChannelArgs, ExactArgs, SimulateArgs, SweepArgs, UtilityArgs};

type CliResult<T = ()> = Result<T, CliError>;

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::document(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::document(format!("{}: {e}", path.display())))
}

fn read_state(path: &Path) -> CliResult<DensityMatrix> {
    let doc: StateDocument = read_json(path)?;
    doc.into_state()
        .map_err(|e| CliError::from_document(&path.display().to_string(), e))
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validated(spec: NoiseSpec) -> CliResult<NoiseSpec> {
    spec.validate()?;
    Ok(spec)
}

pub fn budget(args: BudgetArgs) -> CliResult {
    let spec = validated(args.noise.spec(args.mech))?;
    let eps = qdp_epsilon(&spec, args.d)?;
    let rdp = intuitive_budget(&spec, args.d, args.alpha)?;
    let mut out = format!(
        "mechanism={}\nd={}\neps_qdp={}\nalpha={}\neps_hat={}\n",
        spec.name(),
        args.d,
        console_float(eps),
        rdp.alpha,
        console_float(rdp.epsilon)
    );
    if let Some(delta) = args.delta {
        let dp = rdp_to_dp(rdp, delta)?;
        out.push_str(&format!("delta={delta}\neps_dp={}\n", console_float(dp.epsilon)));
    }
    emit(None, &out)
}

/// JSON description of a budget sweep.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpec {
    mechanism: NoiseSpec,
    param: NoiseParam,
    lo: f64,
    hi: f64,
    steps: usize,
    alphas: AlphaGrid,
    #[serde(default = "default_d")]
    d: f64,
}

fn default_d() -> f64 {
    0.1
}

fn sweep_csv(rows: &[BudgetRow]) -> String {
    let mut out = String::from("param,alpha,eps_hat\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", csv_float(r.param), r.alpha, csv_float(r.eps_hat)));
    }
    out
}

pub fn sweep(args: SweepArgs) -> CliResult {
    let text = fs::read_to_string(&args.spec).map_err(|e| CliError::usage(format!("{}: {e}", args.spec.display())))?;
    let spec: SweepSpec =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", args.spec.display())))?;
    if spec.steps == 0 {
        return Err(CliError::usage("steps must be at least 1"));
    }
    if !(spec.lo <= spec.hi) || (spec.steps > 1 && spec.lo == spec.hi) {
        return Err(CliError::usage(format!("invalid range [{}, {}]", spec.lo, spec.hi)));
    }
    if spec.mechanism.param(spec.param).is_none() {
        return Err(CliError::usage(format!(
            "{} has no parameter {}",
            spec.mechanism.name(),
            spec.param
        )));
    }
    let values = linspace(spec.lo, spec.hi, spec.steps);
    let rows = budget_sweep(&spec.mechanism, spec.param, &values, spec.d, spec.alphas.orders())?;
    emit(args.out.as_deref(), &sweep_csv(&rows))
}

pub fn exact(args: ExactArgs) -> CliResult {
    let spec = validated(args.noise.spec(args.mech))?;
    let rho = read_state(&args.rho)?;
    let sigma = read_state(&args.sigma)?;
    let povm = match &args.povm {
        Some(path) => {
            let doc: PovmDocument = read_json(path)?;
            doc.into_povm()
                .map_err(|e| CliError::from_document(&path.display().to_string(), e))?
        }
        None => computational_basis_povm(rho.dim()),
    };
    let pair = NeighborPair::new(rho, sigma, args.d).map_err(|e| CliError::from_document("state pair", e))?;
    let both = exact_budget_two_sided(&pair, &spec, &povm, args.alpha)?;
    let mut out = format!(
        "distance={}\nalpha={}\nforward={}\nreverse={}\nmax={}\n",
        console_float(pair.distance()),
        args.alpha,
        console_float(both.forward),
        console_float(both.reverse),
        console_float(both.max())
    );
    if args.search > 0 {
        let found = search_budget(&pair, &spec, args.alpha, args.search, args.seed)?;
        out.push_str(&format!(
            "search_best={}\nsearch_evaluations={}\n",
            console_float(found.best),
            found.evaluations
        ));
    }
    emit(None, &out)
}

pub fn utility(args: UtilityArgs) -> CliResult {
    let spec = validated(args.noise.spec(args.mech))?;
    let rho_ref = match &args.rho {
        Some(path) => read_state(path)?,
        None => DensityMatrix::from_real(2, &[0.3, 0.2, 0.2, 0.7])?,
    };
    if spec.param(args.param).is_none() {
        return Err(CliError::usage(format!("{} has no parameter {}", spec.name(), args.param)));
    }
    let rows = utility_privacy_sweep(
        &spec,
        args.param,
        args.lo,
        args.hi,
        args.steps,
        &rho_ref,
        args.d,
        args.grid.orders(),
    )?;
    emit(args.out.as_deref(), &utility_csv(&rows))
}

pub fn simulate(args: SimulateArgs) -> CliResult {
    let path = args.workload.display().to_string();
    let doc: WorkloadDocument = read_json(&args.workload)?;
    let workload = doc.into_workload().map_err(|e| CliError::from_document(&path, e))?;
    let report = simulate_rounds(&workload, &args.grid, args.delta, args.mode)?;
    if let Some(json) = &args.json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        emit(Some(json), &(text + "\n"))?;
    }
    emit(args.csv.as_deref(), &report.to_csv())?;
    if args.csv.is_some() {
        let summary = match report.final_round() {
            Some(last) => format!(
                "rounds={}\nbest_dp_eps={}\nbest_alpha={}\ndelta={}\n",
                report.rounds.len(),
                console_float(last.best_dp.epsilon),
                last.best_alpha,
                report.delta
            ),
            None => "rounds=0\n".to_string(),
        };
        emit(None, &summary)?;
    }
    Ok(())
}

pub fn check_channel(args: CheckChannelArgs) -> CliResult {
    let path = args.channel.display().to_string();
    let doc: ChannelDocument = read_json(&args.channel)?;
    let audit = match (&doc, doc.noise_spec()) {
        (ChannelDocument::Kraus { ops }, _) => audit_kraus(ops),
        (_, Some(spec)) => {
            let dim = match spec {
                NoiseSpec::Dep { dim, .. } => dim,
                _ => 2,
            };
            spec.validate().and_then(|_| audit_noise(&spec, dim))
        }
        (_, None) => unreachable!("only Kraus documents lack a mechanism"),
    }
    .map_err(|e| CliError::from_document(&path, e))?;
    let completeness = audit
        .completeness_deviation
        .map_or_else(|| "n/a".to_string(), |d| format!("{d:.3e}"));
    let verdict = if audit.passed { "pass" } else { "fail" };
    let out = format!(
        "dim={}\ncompleteness_deviation={completeness}\nmax_trace_deviation={:.3e}\nmin_output_eigenvalue={:.3e}\nprobes={}\nresult={verdict}\n",
        audit.dim, audit.max_trace_deviation, audit.min_output_eigenvalue, audit.probes
    );
    emit(None, &out)?;
    if audit.passed {
        Ok(())
    } else {
        Err(CliError::document(format!("{path}: channel failed the CPTP audit")))
    }
}
