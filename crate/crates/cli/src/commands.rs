use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use clap::Parser;
use serde::Serialize;
use serde_json::json;

use teledepth::applications::{
    adder_depth_table, adder_permutation, build_adder, build_decision_rule, build_neuron,
    build_qrom_word, parse_bitstring, pattern_permutation, qrom_permutation, AdderSpec,
    QromWordSpec, RuleSpec, Strategy,
};
use teledepth::circuit::{
    deserialize, resource_counts, serialize, toffoli_count, toffoli_depth, Circuit,
};
use teledepth::comparisons::comparison_table;
use teledepth::decomposer::{
    decompose_mct, defer_corrections, merge_conditionals, neighbor_layout, unitary_mct,
};
use teledepth::fidelity::{
    delta_fidelity, monotonicity_violations, read_sweep_csv, run_sweep_circuit, verify_against,
    verify_mct, write_csv, BranchMode, CheckBasis, Spacing, SweepError, SweepSpec, VerifyReport,
};
use teledepth::schedule::{
    build_schedule, epr_and_ancilla, i_max_closed_form, toffoli_count_formula,
};

use crate::manifest::{manifest_name, sha256_hex, strip_out, RunManifest};
use crate::{
    App, AppsArgs, Cli, Command, CompareArgs, DeltaArgs, MetricsArgs, ReplayArgs, SpacingArg,
    StrategyArg,
};
use crate::{SweepArgs, SynthArgs, VerifyArgs};

pub const VERIFY_FAILED: u8 = 1;
pub const USAGE: u8 = 2;
pub const CAP: u8 = 3;

/// Branch enumeration is used for application circuits up to this many measurements.
const EXHAUSTIVE_MEASUREMENTS: usize = 12;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: USAGE,
        error: error.into(),
    }
}

type Run<T> = Result<T, Failure>;

/// What a command produced, before anything is written.
struct Outcome {
    command: String,
    parameters: serde_json::Value,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    outputs: Vec<(String, Vec<u8>)>,
    stdout: String,
    code: u8,
}

impl Outcome {
    fn new(command: impl Into<String>, parameters: &impl Serialize) -> Self {
        Outcome {
            command: command.into(),
            parameters: serde_json::to_value(parameters).expect("arguments serialize"),
            seed: None,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            stdout: String::new(),
            code: 0,
        }
    }
}

pub fn run(cli: Cli, argv: &[String]) -> Run<u8> {
    let (outcome, out) = match cli.command {
        Command::Replay(args) => return replay(args),
        Command::Synth(a) => (synth(&a)?, a.out.out),
        Command::Verify(a) => (verify(&a)?, a.out.out),
        Command::Sweep(a) => (sweep(&a)?, a.out.out),
        Command::Compare(a) => (compare(&a)?, a.out.out),
        Command::Apps(a) => (apps(&a)?, a.out.out.clone()),
        Command::Metrics(a) => (metrics(&a)?, a.out.out),
        Command::Delta(a) => (delta(&a)?, a.out.out),
    };
    finalize(&outcome, &out, strip_out(argv))?;
    print!("{}", outcome.stdout);
    Ok(outcome.code)
}

/// Writes the outputs and the manifest into `out`.
fn finalize(outcome: &Outcome, out: &Path, argv: Vec<String>) -> Run<()> {
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(usage)?;
    let mut outputs = BTreeMap::new();
    for (name, bytes) in &outcome.outputs {
        let path = out.join(name);
        fs::write(&path, bytes)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(usage)?;
        outputs.insert(name.clone(), sha256_hex(bytes));
    }
    let manifest = RunManifest {
        command: outcome.command.clone(),
        argv,
        parameters: outcome.parameters.clone(),
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: outcome.inputs.clone(),
        outputs,
    };
    let path = out.join(manifest_name(&outcome.command));
    fs::write(&path, manifest.to_bytes())
        .with_context(|| format!("writing {}", path.display()))
        .map_err(usage)
}

fn read_input(outcome: &mut Outcome, path: &Path) -> Run<Vec<u8>> {
    let bytes = fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    outcome
        .inputs
        .insert(path.display().to_string(), sha256_hex(&bytes));
    Ok(bytes)
}

fn read_circuit(outcome: &mut Outcome, path: &Path) -> Run<Circuit> {
    let bytes = read_input(outcome, path)?;
    let text =
        String::from_utf8(bytes).map_err(|_| usage(anyhow!("{} is not UTF-8", path.display())))?;
    deserialize(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(usage)
}

fn to_json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s.into_bytes()
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Run<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).map_err(usage)?;
    Ok(buf)
}

fn summary(c: &Circuit) -> Run<serde_json::Value> {
    let depth = toffoli_depth(c).map_err(usage)?;
    let r = resource_counts(c);
    Ok(json!({
        "name": c.name(),
        "qubits": c.num_qubits(),
        "data_qubits": c.data_qubits().len(),
        "toffoli_depth": depth,
        "toffoli_count": toffoli_count(c),
        "ancillas": r.ancillas,
        "bell_pairs": r.bell_pairs,
        "measurements": r.measurements(),
        "conditional_gates": r.conditional_gates,
        "operations": c.ops().len(),
    }))
}

fn report_json(r: &VerifyReport) -> serde_json::Value {
    let counterexamples: Vec<_> = r
        .counterexamples
        .iter()
        .map(|c| {
            json!({
                "basis": match c.basis { CheckBasis::Z => "z", CheckBasis::Qft => "qft" },
                "input": c.input,
                "branch": c.branch,
                "expected": c.expected,
                "observed": c.observed,
                "probability": c.probability,
            })
        })
        .collect();
    json!({
        "passed": r.passed(),
        "measurements": r.measurements,
        "branches": r.branches,
        "impossible_branches": r.impossible_branches,
        "inputs": r.inputs,
        "checks": r.checks,
        "failures": r.failures,
        "counterexamples": counterexamples,
    })
}

fn report_text(name: &str, r: &VerifyReport) -> String {
    let mut s = format!(
        "{} {name}: {} inputs, {} branches ({} impossible), {} checks, {} failures\n",
        if r.passed() { "PASS" } else { "FAIL" },
        r.inputs,
        r.branches,
        r.impossible_branches,
        r.checks,
        r.failures
    );
    for c in &r.counterexamples {
        let _ = writeln!(
            s,
            "  {:?} basis: input {} branch {:#b}: expected {} observed {} (p = {:.6})",
            c.basis, c.input, c.branch, c.expected, c.observed, c.probability
        );
    }
    s
}

fn synth(a: &SynthArgs) -> Run<Outcome> {
    let n = a.n as usize;
    let mut c = decompose_mct(n).map_err(usage)?;
    if !a.no_defer {
        c = defer_corrections(&c).map_err(usage)?;
    }
    if a.merge {
        c = merge_conditionals(&c).map_err(usage)?;
    }
    if a.layout {
        c = neighbor_layout(&c).map_err(usage)?;
    }
    let mut o = Outcome::new("synth", a);
    let s = summary(&c)?;
    o.stdout = String::from_utf8(to_json_bytes(&s)).expect("utf-8");
    o.outputs
        .push((format!("{}.json", c.name()), serialize(&c).into_bytes()));
    Ok(o)
}

fn verify(a: &VerifyArgs) -> Run<Outcome> {
    let mut o = Outcome::new("verify", a);
    let c = read_circuit(&mut o, &a.circuit)?;
    let n = a.n as usize;
    let got = c.data_qubits().len();
    if got != n + 1 {
        return Err(usage(anyhow!(
            "circuit has {got} data qubits, -n {n} needs {}",
            n + 1
        )));
    }
    let mode = match &a.branches {
        None => BranchMode::default_for(n, a.seed),
        Some(s) => match s.parse::<BranchMode>().map_err(usage)? {
            BranchMode::Sample { count, .. } => BranchMode::Sample {
                count,
                seed: a.seed,
            },
            m => m,
        },
    };
    o.seed = Some(a.seed);
    let report = verify_mct(&c, n, mode).map_err(usage)?;
    o.stdout = report_text(c.name(), &report);
    o.outputs
        .push(("verify.json".into(), to_json_bytes(&report_json(&report))));
    o.code = if report.passed() { 0 } else { VERIFY_FAILED };
    Ok(o)
}

fn sweep(a: &SweepArgs) -> Run<Outcome> {
    let n = a.n as usize;
    let mut o = Outcome::new("sweep", a);
    o.seed = Some(a.seed);
    if !(a.min_rate > 0.0 && a.min_rate <= a.max_rate && a.max_rate <= 1.0) {
        return Err(usage(anyhow!(
            "rates must satisfy 0 < min-rate <= max-rate <= 1"
        )));
    }
    let circuit = match &a.circuit {
        Some(path) => read_circuit(&mut o, path)?,
        None if a.unitary => unitary_mct(n),
        None => defer_corrections(&decompose_mct(n).map_err(usage)?).map_err(usage)?,
    };
    let spec = SweepSpec {
        points: a.grid as usize,
        min_rate: a.min_rate,
        max_rate: a.max_rate,
        spacing: match a.spacing {
            SpacingArg::Geometric => Spacing::Geometric,
            SpacingArg::Linear => Spacing::Linear,
        },
        shots: a.shots,
        seed: a.seed,
        max_n: a.max_n as usize,
    };
    let grid = match run_sweep_circuit(&circuit, n, &spec) {
        Ok(g) => g,
        Err(SweepError::Cap(est)) => {
            return Err(Failure {
                code: CAP,
                error: anyhow!("resource estimate exceeds the cap: {est}"),
            })
        }
        Err(e) => return Err(usage(e)),
    };
    let violations = monotonicity_violations(&grid, 3.0);
    o.stdout = format!(
        "{}: {} cells, {} shots per input; monotonicity violations beyond 3 sigma: {}\n",
        circuit.name(),
        grid.rows.len(),
        a.shots,
        violations.len()
    );
    for v in &violations {
        let _ = writeln!(o.stdout, "  {v}");
    }
    o.outputs.push(("sweep.csv".into(), csv_bytes(&grid.rows)?));
    Ok(o)
}

fn compare(a: &CompareArgs) -> Run<Outcome> {
    let mut o = Outcome::new("compare", a);
    let rows = comparison_table(2..=a.n_max as usize);
    o.stdout = format!("{} rows for n in 2..={}\n", rows.len(), a.n_max);
    o.outputs.push(("compare.csv".into(), csv_bytes(&rows)?));
    Ok(o)
}

fn strategy(s: StrategyArg) -> Strategy {
    match s {
        StrategyArg::Unitary => Strategy::Unitary,
        StrategyArg::Teleport => Strategy::Teleport,
    }
}

fn bits(s: &str) -> Run<Vec<bool>> {
    parse_bitstring(s).map_err(usage)
}

fn apps(a: &AppsArgs) -> Run<Outcome> {
    let (name, circuit, expected) = match &a.app {
        App::Depths { q_min, q_max } => {
            if q_min > q_max {
                return Err(usage(anyhow!("--q-min must not exceed --q-max")));
            }
            let mut o = Outcome::new("apps-depths", a);
            let rows = adder_depth_table(*q_min as usize..=*q_max as usize).map_err(usage)?;
            o.stdout = format!("{} rows\n", rows.len());
            o.outputs
                .push(("adder_depths.csv".into(), csv_bytes(&rows)?));
            return Ok(o);
        }
        App::Adder { q, strategy: s } => {
            let q = *q as usize;
            (
                "adder",
                build_adder(AdderSpec {
                    q,
                    strategy: strategy(*s),
                })
                .map_err(usage)?,
                adder_permutation(q),
            )
        }
        App::Qrom {
            address,
            word,
            strategy: s,
        } => {
            let spec = QromWordSpec {
                address: bits(address)?,
                word: bits(word)?,
                strategy: strategy(*s),
            };
            let c = build_qrom_word(&spec).map_err(usage)?;
            ("qrom", c, qrom_permutation(&spec.address, &spec.word))
        }
        App::Neuron {
            features,
            strategy: s,
        } => {
            let f = *features as usize;
            (
                "neuron",
                build_neuron(f, strategy(*s)).map_err(usage)?,
                pattern_permutation(&vec![true; f]),
            )
        }
        App::Rule {
            pattern,
            strategy: s,
        } => {
            let spec = RuleSpec {
                pattern: bits(pattern)?,
                strategy: strategy(*s),
            };
            let c = build_decision_rule(&spec).map_err(usage)?;
            ("rule", c, pattern_permutation(&spec.pattern))
        }
    };
    let mut o = Outcome::new(format!("apps-{name}"), a);
    o.seed = Some(a.seed);
    let mode = if circuit.measurement_count() <= EXHAUSTIVE_MEASUREMENTS {
        BranchMode::Exhaustive
    } else {
        BranchMode::Sample {
            count: 256,
            seed: a.seed,
        }
    };
    let report = verify_against(&circuit, &expected, mode).map_err(usage)?;
    let mut s = summary(&circuit)?;
    s["verification"] = report_json(&report);
    o.stdout = report_text(circuit.name(), &report);
    o.outputs
        .push((format!("{name}.json"), serialize(&circuit).into_bytes()));
    o.outputs
        .push((format!("{name}.summary.json"), to_json_bytes(&s)));
    o.code = if report.passed() { 0 } else { VERIFY_FAILED };
    Ok(o)
}

fn metrics(a: &MetricsArgs) -> Run<Outcome> {
    let mut o = Outcome::new("metrics", a);
    let value = match (a.n, &a.circuit) {
        (Some(n), _) => {
            let n = n as usize;
            let schedule = build_schedule(n).map_err(usage)?;
            let (pairs, ancillas) = epr_and_ancilla(&schedule);
            let levels: Vec<_> = schedule
                .levels()
                .iter()
                .map(|l| json!({ "n": l.n, "m": l.m, "ell": l.ell }))
                .collect();
            let circuit = defer_corrections(&decompose_mct(n).map_err(usage)?).map_err(usage)?;
            json!({
                "n": n,
                "levels": levels,
                "i_max": schedule.i_max(),
                "i_max_closed_form": i_max_closed_form(n).map_err(usage)?,
                "toffoli_count_formula": toffoli_count_formula(&schedule),
                "bell_pairs": pairs,
                "ancillas": ancillas,
                "circuit": summary(&circuit)?,
            })
        }
        (None, Some(path)) => {
            let c = read_circuit(&mut o, path)?;
            summary(&c)?
        }
        (None, None) => unreachable!("clap requires one of -n and --circuit"),
    };
    let bytes = to_json_bytes(&value);
    o.stdout = String::from_utf8(bytes.clone()).expect("utf-8");
    o.outputs.push(("metrics.json".into(), bytes));
    Ok(o)
}

fn delta(a: &DeltaArgs) -> Run<Outcome> {
    let mut o = Outcome::new("delta", a);
    let ga = read_sweep_csv(&read_input(&mut o, &a.a)?[..]).map_err(usage)?;
    let gb = read_sweep_csv(&read_input(&mut o, &a.b)?[..]).map_err(usage)?;
    let rows = delta_fidelity(&ga, &gb).map_err(usage)?;
    o.stdout = format!("{} cells\n", rows.len());
    o.outputs.push(("delta.csv".into(), csv_bytes(&rows)?));
    Ok(o)
}

fn replay(args: ReplayArgs) -> Run<u8> {
    let recorded = RunManifest::read(&args.manifest).map_err(usage)?;
    let mut argv = vec!["teledepth".to_string()];
    argv.extend(recorded.argv.iter().cloned());
    argv.push("--out".into());
    argv.push(args.out.out.display().to_string());
    let cli = Cli::try_parse_from(&argv).map_err(usage)?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(usage(anyhow!("a manifest cannot record a replay")));
    }
    if recorded.version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by version {}, running {}",
            recorded.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let code = run(cli, &argv[1..])?;
    let fresh =
        RunManifest::read(&args.out.out.join(manifest_name(&recorded.command))).map_err(usage)?;
    let mut mismatches = Vec::new();
    for (label, old, new) in [
        ("input", &recorded.inputs, &fresh.inputs),
        ("output", &recorded.outputs, &fresh.outputs),
    ] {
        for name in old
            .keys()
            .chain(new.keys().filter(|k| !old.contains_key(*k)))
        {
            if old.get(name) != new.get(name) {
                mismatches.push(format!("{label} {name}"));
            }
        }
    }
    if mismatches.is_empty() {
        println!("replay matches: {} outputs identical", fresh.outputs.len());
        Ok(code)
    } else {
        for m in &mismatches {
            eprintln!("digest mismatch: {m}");
        }
        Ok(VERIFY_FAILED)
    }
}
