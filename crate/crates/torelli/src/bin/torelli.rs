//! Command-line front end with JSON input and output, deterministic
//! traces, and exit codes that are part of the public contract:
//! `0` ok, `1` property-false, `2` input-error, `3` search-exhausted.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use torelli::contraction::{
    contract_via_rank_reduction, genus2_contract, verify_trace, ContractError, PathInComplex,
    SearchOpts, TraceJson,
};
use torelli::intlinalg::{SymplecticSpace, Vector};
use torelli::isocomplex::{enumerate_slice, farey_iso_check, Line, SliceJson};
use torelli::mapclass::{acts_trivially, birman_kernel_report, first_moved_basis_class, WordJson};
use torelli::psurface::{
    build_h1p, standard_capping, ClassJson, Label, PartitionedSurface,
};
use torelli::tsur::{is_tsur_morphism, retraction_map, EmbeddingCombinatorics};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "torelli", version, about = "Homology of partitioned surfaces, twist words, \
embeddings, isotropic-line complexes, and loop contraction", disable_help_subcommand = true)]
struct Cli {
    /// Print the JSON schema version and exit.
    #[arg(long)]
    schema_version: bool,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the rank and a free basis of the homology module of a surface.
    H1p {
        /// Surface JSON: {"genus", "boundaries", "partition"}.
        surface: PathBuf,
    },
    /// Decide whether a twist word acts trivially on the homology module.
    Torelli {
        surface: PathBuf,
        /// Word JSON: {"factors": [{"class", "exp"}], "assertions"}.
        word: PathBuf,
    },
    /// Check the two morphism conditions of an embedding and print the
    /// retraction map on partition blocks.
    Tsur {
        /// Embedding JSON: {"source", "target", "components"}.
        embedding: PathBuf,
        /// Source partition as inline JSON, e.g. "[[1,2],[3]]".
        #[arg(long)]
        p1: String,
        /// Target partition as inline JSON.
        #[arg(long)]
        p2: String,
    },
    /// Export a bounded slice of the isotropic-line complex.
    Complex {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        bound: u64,
        /// Optional submodule basis as inline JSON, e.g. "[[1,0,0,0],[0,0,1,0]]".
        #[arg(long)]
        w: Option<String>,
    },
    /// Compare the rank-2 isotropic slice against the Farey tessellation.
    Farey {
        /// Run the comparison (the only supported mode).
        #[arg(long)]
        check: bool,
        #[arg(long)]
        bound: u64,
    },
    /// Contract a loop in the complex, or replay and verify a move trace.
    Contract {
        /// Loop JSON: {"g", "closed", "vertices": [[...]]}.
        loop_file: PathBuf,
        /// Replay this trace against the loop instead of contracting.
        #[arg(long)]
        verify: Option<PathBuf>,
        /// Write the discovered move trace to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Cap on candidate sup-norms in link searches.
        #[arg(long)]
        bound: Option<u64>,
        /// Cap on moves spent by greedy strategies.
        #[arg(long)]
        budget: Option<usize>,
        /// Recorded in the output for reproducibility bookkeeping.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the matrix of the standard capping of a surface.
    Cap { surface: PathBuf },
    /// Report the kernel structure of capping off one boundary.
    Kernel {
        surface: PathBuf,
        #[arg(long)]
        boundary: Label,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    PropertyFalse,
    InputError,
    SearchExhausted,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::PropertyFalse => "property-false",
            Status::InputError => "input-error",
            Status::SearchExhausted => "search-exhausted",
        }
    }

    fn exit(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::PropertyFalse => 1,
            Status::InputError => 2,
            Status::SearchExhausted => 3,
        }
    }
}

struct Outcome {
    status: Status,
    payload: Value,
}

fn ok(payload: Value) -> Outcome {
    Outcome { status: Status::Ok, payload }
}

fn property_false(payload: Value) -> Outcome {
    Outcome { status: Status::PropertyFalse, payload }
}

fn input_error(message: impl std::fmt::Display) -> Outcome {
    Outcome { status: Status::InputError, payload: json!({ "error": message.to_string() }) }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Outcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| input_error(format!("malformed JSON in {}: {e}", path.display())))
}

fn parse_inline<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Outcome> {
    serde_json::from_str(text).map_err(|e| input_error(format!("malformed {what}: {e}")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LoopJson {
    g: usize,
    closed: bool,
    vertices: Vec<Vec<i64>>,
}

impl LoopJson {
    fn to_path(&self) -> Result<PathInComplex, ContractError> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Line::from_i64(v))
            .collect::<Result<Vec<_>, _>>()?;
        PathInComplex::new(self.g, self.closed, vertices)
    }
}

fn class_json(
    surface: &PartitionedSurface,
    v: &Vector,
) -> Result<ClassJson, Outcome> {
    ClassJson::from_vector(surface, v).map_err(|e| input_error(e))
}

fn run_h1p(surface: PathBuf) -> Result<Outcome, Outcome> {
    let surface: PartitionedSurface = read_json(&surface)?;
    surface.validate().map_err(|e| input_error(e))?;
    let module = build_h1p(&surface);
    let basis = module
        .basis
        .iter()
        .map(|b| class_json(&surface, b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ok(json!({ "rank": module.rank, "basis": basis })))
}

fn run_torelli(surface: PathBuf, word: PathBuf) -> Result<Outcome, Outcome> {
    let surface: PartitionedSurface = read_json(&surface)?;
    surface.validate().map_err(|e| input_error(e))?;
    let word_json: WordJson = read_json(&word)?;
    let word = word_json.to_word(&surface).map_err(|e| input_error(e))?;
    let module = build_h1p(&surface);
    if acts_trivially(&word, &module) {
        Ok(ok(json!({ "trivial": true })))
    } else {
        let (moved, image) = first_moved_basis_class(&word, &module)
            .expect("a non-trivial word moves some basis class");
        Ok(property_false(json!({
            "trivial": false,
            "moved_class": class_json(&surface, &moved)?,
            "image": class_json(&surface, &image)?,
        })))
    }
}

fn run_tsur(embedding: PathBuf, p1: String, p2: String) -> Result<Outcome, Outcome> {
    let emb: EmbeddingCombinatorics = read_json(&embedding)?;
    emb.validate().map_err(|e| input_error(e))?;
    let p1: Vec<Vec<Label>> = parse_inline(&p1, "--p1 partition")?;
    let p2: Vec<Vec<Label>> = parse_inline(&p2, "--p2 partition")?;
    let morphism = is_tsur_morphism(&emb, &p1, &p2).map_err(|e| input_error(e))?;
    if !morphism {
        return Ok(property_false(json!({ "morphism": false })));
    }
    let retraction = retraction_map(&emb, &p1, &p2).map_err(|e| input_error(e))?;
    Ok(ok(json!({ "morphism": true, "retraction": retraction })))
}

fn run_complex(g: usize, bound: u64, w: Option<String>) -> Result<Outcome, Outcome> {
    let w_basis: Option<Vec<Vec<i64>>> = match w {
        Some(text) => Some(parse_inline(&text, "--w basis")?),
        None => None,
    };
    let w_vectors: Option<Vec<Vector>> = w_basis.map(|rows| {
        rows.into_iter()
            .map(|r| r.into_iter().map(Into::into).collect())
            .collect()
    });
    let slice = enumerate_slice(g, bound, w_vectors.as_deref()).map_err(|e| input_error(e))?;
    let slice_json = SliceJson::from_slice(&slice).map_err(|e| input_error(e))?;
    Ok(ok(serde_json::to_value(slice_json).map_err(|e| input_error(e))?))
}

fn run_farey(bound: u64) -> Result<Outcome, Outcome> {
    let space = SymplecticSpace::new(2);
    let report = farey_iso_check(2, &[space.a(1), space.a(2)], bound)
        .map_err(|e| input_error(e))?;
    let passed = report.ok();
    let payload = serde_json::to_value(report).map_err(|e| input_error(e))?;
    if passed {
        Ok(ok(payload))
    } else {
        Ok(property_false(payload))
    }
}

fn run_contract(
    loop_file: PathBuf,
    verify: Option<PathBuf>,
    trace_out: Option<PathBuf>,
    bound: Option<u64>,
    budget: Option<usize>,
    seed: Option<u64>,
) -> Result<Outcome, Outcome> {
    let loop_json: LoopJson = read_json(&loop_file)?;
    let path = loop_json.to_path().map_err(|e| input_error(e))?;
    if let Some(trace_path) = verify {
        let trace_json: TraceJson = read_json(&trace_path)?;
        let trace = trace_json.to_trace().map_err(|e| input_error(e))?;
        let matches_loop = trace.initial == path;
        let replays = verify_trace(&trace);
        let payload = json!({
            "verified": matches_loop && replays,
            "trace_matches_loop": matches_loop,
            "trace_replays": replays,
        });
        return Ok(if matches_loop && replays { ok(payload) } else { property_false(payload) });
    }
    let mut opts = SearchOpts::default();
    if let Some(b) = bound {
        opts.max_bound = b.max(opts.base_bound);
    }
    if let Some(b) = budget {
        opts.budget = b;
    }
    let result = if path.g == 2 {
        genus2_contract(&path, &opts)
    } else {
        contract_via_rank_reduction(&path, &opts)
    };
    let trace = match result {
        Ok(t) => t,
        Err(ContractError::SearchExhausted(msg)) => {
            return Ok(Outcome {
                status: Status::SearchExhausted,
                payload: json!({ "error": msg }),
            })
        }
        Err(e) => return Err(input_error(e)),
    };
    let trace_json = TraceJson::from_trace(&trace).map_err(|e| input_error(e))?;
    let mut trace_file = Value::Null;
    if let Some(out) = trace_out {
        let text = serde_json::to_string(&trace_json).map_err(|e| input_error(e))?;
        fs::write(&out, text)
            .map_err(|e| input_error(format!("cannot write {}: {e}", out.display())))?;
        trace_file = json!(out.display().to_string());
    }
    Ok(ok(json!({
        "contracted": true,
        "moves": trace.moves.len(),
        "final_length": trace.final_path.len(),
        "seed": seed,
        "trace_file": trace_file,
    })))
}

fn run_cap(surface: PathBuf) -> Result<Outcome, Outcome> {
    let surface: PartitionedSurface = read_json(&surface)?;
    surface.validate().map_err(|e| input_error(e))?;
    let cap = standard_capping(&surface).map_err(|e| input_error(e))?;
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(cap.matrix.rows);
    for r in 0..cap.matrix.rows {
        rows.push(cap.matrix.row(r).iter().map(|x| x.to_string()).collect());
    }
    Ok(ok(json!({ "g_prime": cap.g_prime, "matrix": rows })))
}

fn run_kernel(surface: PathBuf, boundary: Label) -> Result<Outcome, Outcome> {
    let surface: PartitionedSurface = read_json(&surface)?;
    surface.validate().map_err(|e| input_error(e))?;
    let report = birman_kernel_report(&surface, boundary).map_err(|e| input_error(e))?;
    Ok(ok(serde_json::to_value(report).map_err(|e| input_error(e))?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.schema_version {
        println!("{}", json!({ "schema_version": SCHEMA_VERSION }));
        return ExitCode::from(0);
    }
    let Some(cmd) = cli.cmd else {
        eprintln!("a subcommand is required; see --help");
        return ExitCode::from(2);
    };
    let result = match cmd {
        Cmd::H1p { surface } => run_h1p(surface),
        Cmd::Torelli { surface, word } => run_torelli(surface, word),
        Cmd::Tsur { embedding, p1, p2 } => run_tsur(embedding, p1, p2),
        Cmd::Complex { g, bound, w } => run_complex(g, bound, w),
        Cmd::Farey { check: _, bound } => run_farey(bound),
        Cmd::Contract { loop_file, verify, trace, bound, budget, seed } => {
            run_contract(loop_file, verify, trace, bound, budget, seed)
        }
        Cmd::Cap { surface } => run_cap(surface),
        Cmd::Kernel { surface, boundary } => run_kernel(surface, boundary),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(o) => o,
    };
    let mut body = json!({
        "schema_version": SCHEMA_VERSION,
        "status": outcome.status.label(),
    });
    if let (Value::Object(map), Value::Object(extra)) = (&mut body, outcome.payload) {
        map.extend(extra);
    }
    println!("{body}");
    ExitCode::from(outcome.status.exit())
}
