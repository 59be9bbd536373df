//! Subcommand implementations. Each takes document text and parameters and
//! returns a report, plus the produced document where there is one.

use graphqec::channel::{noise_from_matrix, random_noise, verify_theorem1, weyl_diagonal_noise};
use graphqec::ffield::Field;
use graphqec::graph::{
    check_admissible, check_t_error_correcting, search_graph, CodingGraph, SearchParams,
};
use graphqec::memory::{decoherence_time, simulate_memory, storing_time, DecoherenceModel};
use graphqec::oneway::{
    ablation_deviations, assemble_decoder, assemble_decoder_five, assemble_encoder,
    assemble_syndrome, roundtrip_deviation, syndrome_projection_deviation, verify_cor_decode,
    verify_cor_encode, verify_thm_measure, verify_thm_syndrome, OneWayProgram,
};
use graphqec::phase::PhaseVec;
use graphqec::scheme::{verify_kl, verify_scheme_conditions, Scheme};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::formats::{emit_program, to_pretty, GraphSpec, NoiseSpec, SchemeExport};
use crate::report::RunReport;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse {what}: {message}")]
    Parse { what: String, message: String },
    #[error("input rejected: {0}")]
    Rejected(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// A command's result: the report and, for document-producing commands,
/// the document.
#[derive(Debug)]
pub struct Output {
    pub report: RunReport,
    pub document: Option<String>,
}

/// Hash of the command name, its parameters and the contents of its input
/// files.
pub fn inputs_hash(command: &str, params: &[(&str, String)], files: &[&str]) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update(b"\n");
    for (k, v) in params {
        h.update(format!("{k}={v}\n").as_bytes());
    }
    for f in files {
        h.update((f.len() as u64).to_le_bytes());
        h.update(f.as_bytes());
    }
    hex::encode(h.finalize())
}

fn parse_graph(text: &str, d: Option<u32>) -> Result<CodingGraph, CliError> {
    let parse = |e: crate::formats::FormatError| CliError::Parse {
        what: "graph".into(),
        message: e.to_string(),
    };
    let spec = GraphSpec::parse(text).map_err(parse)?;
    if let Some(d) = d {
        if d != spec.d {
            return Err(CliError::Usage(format!(
                "--d {d} does not match the graph's d = {}",
                spec.d
            )));
        }
    }
    spec.to_graph().map_err(parse)
}

fn certified(g: CodingGraph, t: usize) -> Result<Scheme, CliError> {
    Scheme::build(g, t).map_err(|e| {
        CliError::Rejected(format!(
            "{e}; the graph is not certified for t = {t} (see `graphqec check-graph`)"
        ))
    })
}

pub fn check_graph(
    text: &str,
    d: Option<u32>,
    t: usize,
    tolerance: f64,
) -> Result<Output, CliError> {
    let g = parse_graph(text, d)?;
    let mut report = RunReport::new(
        "check-graph",
        inputs_hash(
            "check-graph",
            &[("t", t.to_string()), ("tolerance", tolerance.to_string())],
            &[text],
        ),
    );
    let adm = check_admissible(&g);
    report.require("admissible", adm.ok);
    let mut data = json!({
        "d": g.field().order(),
        "inputs": g.n_inputs(),
        "outputs": g.n_outputs(),
        "syndromes": g.n_syndromes(),
        "edges": g.edges().len(),
    });
    if let Some(f) = &adm.failure {
        data["admissibility_failure"] = json!(f.to_string());
    }
    if adm.ok {
        let tec = check_t_error_correcting(&g, t);
        report.require("t_error_correcting", tec.ok);
        report.observe("subsets_checked", tec.subsets_checked as f64);
        if let Some(w) = &tec.witness {
            data["witness"] = json!({
                "subset": w.subset_labels,
                "kernel_vector": w.kernel_vector.entries(),
            });
        }
        if tec.ok {
            let kl = verify_kl(&g, t).map_err(|e| CliError::Rejected(e.to_string()))?;
            report.check("kl", kl, tolerance);
        }
    }
    report.data = Some(data);
    Ok(Output {
        report,
        document: None,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct FindArgs {
    pub d: u32,
    pub inputs: usize,
    pub outputs: usize,
    pub t: usize,
    pub seed: u64,
    pub budget: u64,
}

pub fn find_graph(a: FindArgs) -> Result<Output, CliError> {
    let field = Field::new(a.d).map_err(|e| CliError::Usage(e.to_string()))?;
    let params = [
        ("d", a.d.to_string()),
        ("inputs", a.inputs.to_string()),
        ("outputs", a.outputs.to_string()),
        ("t", a.t.to_string()),
        ("seed", a.seed.to_string()),
        ("budget", a.budget.to_string()),
    ];
    let mut report = RunReport::new("find-graph", inputs_hash("find-graph", &params, &[]));
    let out = search_graph(&SearchParams {
        field,
        n_inputs: a.inputs,
        n_outputs: a.outputs,
        t: a.t,
        seed: a.seed,
        budget: a.budget,
    });
    report.require("found", out.graph.is_some());
    report.observe("examined", out.examined as f64);
    report.data = Some(json!({
        "exhaustive": out.exhaustive,
        "complete": out.complete,
    }));
    let document = out
        .graph
        .as_ref()
        .map(|g| to_pretty(&GraphSpec::from_graph(g)));
    Ok(Output { report, document })
}

pub fn build_scheme(text: &str, d: Option<u32>, t: usize) -> Result<Output, CliError> {
    let s = certified(parse_graph(text, d)?, t)?;
    let mut report = RunReport::new(
        "build-scheme",
        inputs_hash("build-scheme", &[("t", t.to_string())], &[text]),
    );
    let cond = verify_scheme_conditions(&s);
    report.check("linked_error_identity", cond.linked_deviation, 1e-9);
    report.require(
        "all_errors_tabulated",
        cond.tabulated_errors == s.errors().elements().len(),
    );
    report.observe("syndromes_used", cond.syndromes_used as f64);
    report.observe("leftover_syndromes", cond.leftover_syndromes as f64);
    Ok(Output {
        report,
        document: Some(to_pretty(&SchemeExport::from_scheme(&s))),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Kl,
    Thm1,
    Encode,
    Syndrome,
    Measure,
    Decode,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Kl => "kl",
            Suite::Thm1 => "thm1",
            Suite::Encode => "encode",
            Suite::Syndrome => "syndrome",
            Suite::Measure => "measure",
            Suite::Decode => "decode",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyArgs {
    pub t: usize,
    pub d: Option<u32>,
    pub suite: Suite,
    pub tolerance: f64,
    pub random_noise: usize,
    pub seed: u64,
}

enum Entry {
    Check(&'static str, f64),
    Observe(&'static str, f64),
}

fn suite_entries(
    s: &Scheme,
    suite: Suite,
    a: &VerifyArgs,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<Entry>, CliError> {
    let oneway = |e: graphqec::oneway::OneWayError| CliError::Rejected(e.to_string());
    Ok(match suite {
        Suite::Kl => vec![Entry::Check(
            "kl",
            verify_kl(s.graph(), s.t()).map_err(|e| CliError::Rejected(e.to_string()))?,
        )],
        Suite::Thm1 => thm1_entries(s, a, noise)?,
        Suite::Encode => vec![Entry::Check(
            "encode",
            verify_cor_encode(s.graph()).map_err(oneway)?,
        )],
        Suite::Syndrome => vec![
            Entry::Check("syndrome", verify_thm_syndrome(s).map_err(oneway)?),
            Entry::Check("syndrome.projection", syndrome_projection_deviation(s)),
        ],
        Suite::Measure => {
            let m = verify_thm_measure(s).map_err(oneway)?;
            vec![
                Entry::Check("measure.kraus", m.exact),
                Entry::Observe("measure.up_to_phase", m.up_to_phase),
                Entry::Observe("measure.outcomes", m.outcomes as f64),
            ]
        }
        Suite::Decode => {
            let (four, five) = verify_cor_decode(s).map_err(oneway)?;
            let singles: Vec<PhaseVec> = s.errors().elements().to_vec();
            let roundtrip = singles
                .par_iter()
                .map(|xi| roundtrip_deviation(s, xi))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(oneway)?
                .into_iter()
                .fold(0.0, f64::max);
            vec![
                Entry::Check("decode.four_step", four),
                Entry::Check("decode.five_step", five),
                Entry::Check("decode.roundtrip", roundtrip),
            ]
        }
        Suite::All => unreachable!("expanded by the caller"),
    })
}

fn thm1_entries(
    s: &Scheme,
    a: &VerifyArgs,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<Entry>, CliError> {
    if let Some(spec) = noise {
        let ch = spec
            .to_channel(s, a.tolerance.max(1e-9))
            .map_err(|e| CliError::Rejected(e.to_string()))?;
        let dev = verify_theorem1(s, &ch).map_err(|e| CliError::Rejected(e.to_string()))?;
        return Ok(vec![Entry::Check("thm1.noise", dev)]);
    }
    let nj = s.graph().n_outputs();
    let weyl = s
        .errors()
        .elements()
        .par_iter()
        .map(|xi| {
            let ch = weyl_diagonal_noise(s.field(), nj, &[(xi.clone(), 1.0)]).expect("unit weight");
            verify_theorem1(s, &ch).expect("weight within t")
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mixtures: Vec<_> = (0..a.random_noise)
        .map(|_| random_noise(s, &mut rng))
        .collect();
    let random = mixtures
        .par_iter()
        .map(|n| {
            let ch = noise_from_matrix(s, n, 1e-9).expect("random noise is a channel");
            verify_theorem1(s, &ch).expect("weight within t")
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    let mut out = vec![Entry::Check("thm1.weyl", weyl)];
    if a.random_noise > 0 {
        out.push(Entry::Check("thm1.random", random));
    }
    Ok(out)
}

pub fn verify(text: &str, noise_text: Option<&str>, a: &VerifyArgs) -> Result<Output, CliError> {
    let s = certified(parse_graph(text, a.d)?, a.t)?;
    let noise = noise_text
        .map(|n| {
            NoiseSpec::parse(n).map_err(|e| CliError::Parse {
                what: "noise".into(),
                message: e.to_string(),
            })
        })
        .transpose()?;
    let mut files = vec![text];
    files.extend(noise_text);
    let params = [
        ("t", a.t.to_string()),
        ("suite", a.suite.name().to_string()),
        ("tolerance", a.tolerance.to_string()),
        ("random_noise", a.random_noise.to_string()),
        ("seed", a.seed.to_string()),
    ];
    let mut report = RunReport::new("verify", inputs_hash("verify", &params, &files));
    let suites = match a.suite {
        Suite::All => vec![
            Suite::Kl,
            Suite::Thm1,
            Suite::Encode,
            Suite::Syndrome,
            Suite::Measure,
            Suite::Decode,
        ],
        one => vec![one],
    };
    let results: Vec<Result<Vec<Entry>, CliError>> = suites
        .par_iter()
        .map(|&suite| suite_entries(&s, suite, a, noise.as_ref()))
        .collect();
    for r in results {
        for e in r? {
            match e {
                Entry::Check(name, dev) => report.check(name, dev, a.tolerance),
                Entry::Observe(name, v) => report.observe(name, v),
            }
        }
    }
    if matches!(
        a.suite,
        Suite::All | Suite::Encode | Suite::Syndrome | Suite::Decode
    ) {
        let abl = ablation_deviations(&s).map_err(|e| CliError::Rejected(e.to_string()))?;
        report.observe("ablation.encoder", abl.encoder);
        report.observe("ablation.syndrome", abl.syndrome);
        report.observe("ablation.decoder", abl.decoder);
        report.observe("ablation.decoder_five", abl.decoder_five);
    }
    Ok(Output {
        report,
        document: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Encoder,
    Syndrome,
    Decoder,
    Decoder5,
}

impl Role {
    fn name(self) -> &'static str {
        match self {
            Role::Encoder => "encoder",
            Role::Syndrome => "syndrome",
            Role::Decoder => "decoder",
            Role::Decoder5 => "decoder5",
        }
    }
}

pub fn program(s: &Scheme, role: Role) -> Result<OneWayProgram, CliError> {
    Ok(match role {
        Role::Encoder => {
            assemble_encoder(s.graph()).map_err(|e| CliError::Rejected(e.to_string()))?
        }
        Role::Syndrome => assemble_syndrome(s),
        Role::Decoder => assemble_decoder(s),
        Role::Decoder5 => assemble_decoder_five(s),
    })
}

pub fn emit(text: &str, d: Option<u32>, t: usize, role: Role) -> Result<Output, CliError> {
    let s = certified(parse_graph(text, d)?, t)?;
    let prog = program(&s, role)?;
    let mut report = RunReport::new(
        "emit-program",
        inputs_hash(
            "emit-program",
            &[("t", t.to_string()), ("role", role.name().into())],
            &[text],
        ),
    );
    report.require("valid", prog.validate().is_ok());
    report.observe("steps", prog.steps.len() as f64);
    Ok(Output {
        report,
        document: Some(to_pretty(&emit_program(&prog))),
    })
}

#[derive(Clone, Debug)]
pub struct MemoryArgs {
    pub t: usize,
    pub d: Option<u32>,
    pub lambda: f64,
    pub cycle_time: f64,
    pub cycles: usize,
    pub threshold: f64,
    pub truncated: bool,
    pub scan: Vec<f64>,
    pub max_cycles: usize,
}

pub fn memory(text: &str, a: &MemoryArgs) -> Result<Output, CliError> {
    let s = certified(parse_graph(text, a.d)?, a.t)?;
    let rejected = |e: graphqec::memory::MemoryError| CliError::Rejected(e.to_string());
    let mut model =
        DecoherenceModel::new(s.field(), s.graph().n_outputs(), a.lambda).map_err(rejected)?;
    if a.truncated {
        model = model.truncated();
    }
    let params = [
        ("t", a.t.to_string()),
        ("lambda", a.lambda.to_string()),
        ("cycle_time", a.cycle_time.to_string()),
        ("cycles", a.cycles.to_string()),
        ("threshold", a.threshold.to_string()),
        ("truncated", a.truncated.to_string()),
        ("scan", format!("{:?}", a.scan)),
        ("max_cycles", a.max_cycles.to_string()),
    ];
    let mut report = RunReport::new(
        "simulate-memory",
        inputs_hash("simulate-memory", &params, &[text]),
    );
    let run = simulate_memory(&s, &model, a.cycle_time, a.cycles, a.threshold).map_err(rejected)?;
    report.check("residual.final", run.final_residual(), a.threshold);
    report.observe("free_decay.final", *run.free_decay.last().expect("k >= 1"));
    report.observe("bare_decay.final", *run.bare_decay.last().expect("k >= 1"));
    let decoherence = decoherence_time(&model, a.threshold).map_err(rejected)?;
    report.observe("decoherence_time", decoherence);
    let mut data = json!({
        "cycle_time": run.cycle_time,
        "cycles": run.cycles,
        "threshold": run.threshold,
        "residuals": run.residuals.iter().map(|r| r.proxy()).collect::<Vec<_>>(),
        "weyl_max": run.residuals.iter().map(|r| r.weyl_max).collect::<Vec<_>>(),
        "free_decay": run.free_decay,
        "bare_decay": run.bare_decay,
        "decoherence_time": decoherence,
    });
    if !a.scan.is_empty() {
        let points = a
            .scan
            .par_iter()
            .map(|&t_c| storing_time(&s, &model, a.threshold, &[t_c], a.max_cycles))
            .collect::<Result<Vec<_>, _>>()
            .map_err(rejected)?;
        let best = points
            .iter()
            .fold(
                None,
                |best: Option<&graphqec::memory::StoringReport>, p| match best {
                    Some(b) if b.storing_time >= p.storing_time => Some(b),
                    _ => Some(p),
                },
            )
            .expect("non-empty scan");
        let ceiling = points.iter().map(|p| p.ceiling).fold(0.0, f64::max);
        report.observe("storing_time", best.storing_time);
        report.observe("storing_ratio", best.ratio);
        data["storing"] = json!({
            "storing_time": best.storing_time,
            "cycle_time": best.cycle_time,
            "cycles": best.cycles,
            "decoherence_time": best.decoherence_time,
            "ratio": best.ratio,
            "ceiling": ceiling,
            "at_ceiling": best.storing_time >= ceiling,
        });
    }
    report.data = Some(data);
    Ok(Output {
        report,
        document: None,
    })
}
