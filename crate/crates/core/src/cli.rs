//! The `qsym` command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid mathematical
//! input, 3 internal invariant breach. With `--json`, failures are written
//! to stderr as a single JSON object.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::certify::{bound_for_type, certify, Verdict, C4_WITNESS_ORDER};
use crate::error::Error;
use crate::explore::{
    enumerate_atlas, scan_bound_tightness_streaming, scan_csv_record, write_atlas_csv, write_json_lines, AtlasEntry,
    ScanRow, SCAN_CSV_HEADER,
};
use crate::graph::{CirculantGraph, BRUTE_FORCE_MAX_VERTICES};
use crate::maximality::{check_2maximal_mod_p, check_2maximal_roots_of_unity, check_derived_properties_mod_p};
use crate::modular::{is_prime, subgroup_of_order, SubgroupOfUnits};
use crate::spectral::{
    eigenspace_partition, numeric_eigenvalue_clusters, verify_coset_eigenvalue_law, DEFAULT_TOLERANCE,
};
use crate::witness::{
    build_u_pq, extend_with_identity_tail, verify_commutation, verify_magic_unitary, MagicUnitaryWitness,
};

pub const TOLERANCE_ENV: &str = "QSYM_TOLERANCE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_INVARIANT_BREACH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qsym", version, about = "Quantum symmetry of circulant graphs on a prime number of vertices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Number of vertices.
    #[arg(long)]
    n: u64,
    /// Connection set as comma-separated residues, e.g. 1,4 (empty for no edges).
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multiplier group, type, exact spectrum and automorphism counts.
    Analyze(GraphArgs),
    /// Decide quantum symmetry and print a replayable certificate.
    Certify(GraphArgs),
    /// Check 2-maximality of a subgroup of Z_p^*.
    Maximal {
        #[arg(long)]
        p: u64,
        /// Use the unique subgroup of this order.
        #[arg(long, conflicts_with = "elements", required_unless_present = "elements")]
        order: Option<u64>,
        /// Use the subgroup with these elements.
        #[arg(long)]
        elements: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive 2-maximality check for the k-th roots of unity.
    Roots {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        json: bool,
    },
    /// Print 6^phi(k).
    Bound {
        #[arg(long)]
        k: u64,
    },
    /// Verify the block magic unitary against x4, c4 or xn:<n>.
    Witness {
        #[arg(long)]
        graph: String,
        /// 1-based vertex order, e.g. 1,3,2,4.
        #[arg(long)]
        order: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// All circulant graphs on p vertices up to multiplier equivalence.
    Atlas {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        csv: bool,
    },
    /// 2-maximality of the order-k subgroup for every prime up to pmax.
    Scan {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long)]
        out: Option<String>,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
}

impl Command {
    fn json(&self) -> bool {
        match self {
            Command::Analyze(g) | Command::Certify(g) => g.json,
            Command::Maximal { json, .. } | Command::Roots { json, .. } | Command::Witness { json, .. } => *json,
            _ => false,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(std::io::Error),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => EXIT_USAGE,
            Failure::Math(e) if e.is_invariant_breach() => EXIT_INVARIANT_BREACH,
            Failure::Math(_) => EXIT_INVALID_INPUT,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "Usage",
            Failure::Io(_) => "Io",
            Failure::Math(e) => e.kind(),
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Io(e) => e.to_string(),
            Failure::Math(e) => e.to_string(),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and executes one command.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let json = cli.command.json();
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let code = f.exit_code();
            let _ = if json {
                let v = json!({ "error": f.kind(), "message": f.message(), "exit_code": code });
                writeln!(err, "{v}")
            } else {
                writeln!(err, "error: {}", f.message())
            };
            code
        }
    }
}

fn parse_ints(text: &str, flag: &str) -> std::result::Result<Vec<i64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| Failure::Usage(format!("--{flag}: '{t}' is not an integer"))))
        .collect()
}

fn tolerance() -> std::result::Result<f64, Failure> {
    match std::env::var(TOLERANCE_ENV) {
        Err(_) => Ok(DEFAULT_TOLERANCE),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            Ok(t) => Err(Error::InvalidTolerance(t).into()),
            Err(_) => Err(Failure::Usage(format!("{TOLERANCE_ENV}: '{v}' is not a number"))),
        },
    }
}

fn graph_of(args: &GraphArgs) -> std::result::Result<CirculantGraph, Failure> {
    Ok(CirculantGraph::from_connection_set(args.n, parse_ints(&args.s, "s")?)?)
}

fn emit_json(out: &mut impl Write, v: &impl Serialize) -> Outcome {
    serde_json::to_writer(&mut *out, v).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn open_output(path: &Option<String>) -> std::result::Result<Option<BufWriter<File>>, Failure> {
    Ok(match path {
        Some(p) => Some(BufWriter::new(File::create(p)?)),
        None => None,
    })
}

fn dispatch(command: Command, out: &mut impl Write) -> Outcome {
    match command {
        Command::Analyze(args) => analyze(&graph_of(&args)?, args.json, out),
        Command::Certify(args) => {
            let c = certify(&graph_of(&args)?);
            if args.json {
                return emit_json(out, &c);
            }
            writeln!(out, "verdict: {:?}", c.verdict)?;
            for rule in &c.rules {
                writeln!(out, "  {}", serde_json::to_string(rule).map_err(std::io::Error::from)?)?;
            }
            for check in &c.invariant_checks {
                writeln!(out, "  check {}: {}", check.name, if check.passed { "ok" } else { "FAILED" })?;
            }
            Ok(())
        }
        Command::Maximal { p, order, elements, json } => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p).into());
            }
            let e = match (order, elements) {
                (Some(k), None) => subgroup_of_order(p, k)?,
                (None, Some(text)) => {
                    let xs = parse_ints(&text, "elements")?;
                    SubgroupOfUnits::new(p, xs.into_iter().map(|x| x.rem_euclid(p as i64) as u64))?
                }
                _ => return Err(Failure::Usage("exactly one of --order and --elements is required".into())),
            };
            let report = check_2maximal_mod_p(&e, p)?;
            let properties = check_derived_properties_mod_p(&e);
            if json {
                return emit_json(out, &json!({ "report": report, "derived_properties": properties }));
            }
            writeln!(out, "subgroup {:?} of Z_{p}^*", e.elements())?;
            writeln!(out, "2-maximal: {}", report.is_2maximal)?;
            writeln!(
                out,
                "solutions: {} ({} trivial, {} hexagonal, {} genuine)",
                report.counts.total, report.counts.trivial, report.counts.hexagonal, report.counts.genuine
            )?;
            if let Some(s) = report.first_genuine {
                writeln!(out, "first genuine: {:?}", s.quadruple())?;
            }
            let (a, b, c) = properties.as_triple();
            writeln!(out, "derived properties: excludes 2 and 3 {a}, midpoint {b}, weighted mean {c}")?;
            Ok(())
        }
        Command::Roots { k, json } => {
            let report = check_2maximal_roots_of_unity(k)?;
            if json {
                return emit_json(out, &report);
            }
            writeln!(out, "roots of unity of order {k}: 2-maximal {}", report.is_2maximal)?;
            writeln!(
                out,
                "solutions: {} ({} trivial, {} hexagonal, {} genuine)",
                report.counts.total, report.counts.trivial, report.counts.hexagonal, report.counts.genuine
            )?;
            Ok(())
        }
        Command::Bound { k } => {
            if k == 0 {
                return Err(Error::OddOrder(k).into());
            }
            writeln!(out, "{}", bound_for_type(k))?;
            Ok(())
        }
        Command::Witness { graph, order, json } => witness(&graph, order.as_deref(), json, out),
        Command::Atlas { p, out: path, csv } => {
            let entries = enumerate_atlas(p)?;
            match open_output(&path)? {
                Some(mut f) => write_atlas(&entries, csv, &mut f),
                None => write_atlas(&entries, csv, out),
            }
        }
        Command::Scan { k, pmax, out: path, csv, threads } => {
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(t) = threads {
                if t == 0 {
                    return Err(Failure::Usage("--threads must be positive".into()));
                }
                pool = pool.num_threads(t);
            }
            let pool = pool.build().map_err(|e| Failure::Usage(e.to_string()))?;
            match open_output(&path)? {
                Some(mut f) => scan(k, pmax, csv, &pool, &mut f),
                None => scan(k, pmax, csv, &pool, out),
            }
        }
    }
}

fn write_atlas(entries: &[AtlasEntry], csv: bool, out: &mut impl Write) -> Outcome {
    if csv {
        write_atlas_csv(entries, &mut *out)?;
    } else {
        write_json_lines(entries, out)?;
    }
    out.flush()?;
    Ok(())
}

/// Runs the scan on `pool` and writes each row on the calling thread as it
/// arrives.
fn scan(k: u64, pmax: u64, csv: bool, pool: &rayon::ThreadPool, out: &mut impl Write) -> Outcome {
    let (tx, rx) = std::sync::mpsc::channel::<ScanRow>();
    std::thread::scope(|scope| {
        let worker = scope.spawn(move || {
            pool.install(|| {
                scan_bound_tightness_streaming(k, pmax, |row| {
                    // A closed receiver means the writer failed; its error wins.
                    let _ = tx.send(row.clone());
                })
            })
        });
        let written = write_rows(rx, csv, out);
        let result = worker.join().expect("scan worker panicked");
        written?;
        result?;
        Ok(())
    })
}

fn write_rows(rows: std::sync::mpsc::Receiver<ScanRow>, csv: bool, out: &mut impl Write) -> Outcome {
    if csv {
        let mut w = csv::Writer::from_writer(&mut *out);
        w.write_record(SCAN_CSV_HEADER)?;
        w.flush()?;
        for row in rows {
            w.write_record(scan_csv_record(&row))?;
            w.flush()?;
        }
    } else {
        for row in rows {
            serde_json::to_writer(&mut *out, &row).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
    }
    Ok(())
}

fn analyze(g: &CirculantGraph, json: bool, out: &mut impl Write) -> Outcome {
    let e = g.multiplier_group();
    let mut v = json!({
        "n": g.n(),
        "S": g.connection_set(),
        "degree": g.degree(),
        "k": e.order(),
        "E": e.elements(),
    });
    let map = v.as_object_mut().expect("object");
    if is_prime(g.n()) {
        let tolerance = tolerance()?;
        let profile = eigenspace_partition(g)?;
        let classes: Vec<Value> = profile
            .classes
            .iter()
            .map(|c| json!({ "indices": c.indices, "eigenvalue": c.eigenvalue.to_string(), "coeffs": c.eigenvalue }))
            .collect();
        let law = verify_coset_eigenvalue_law(g)?;
        let clusters = numeric_eigenvalue_clusters(g, tolerance)?;
        map.insert("classes".into(), json!(profile.class_count()));
        map.insert("distinct_eigenvalues".into(), json!(profile.distinct_eigenvalue_count()));
        map.insert("eigenvalues".into(), Value::Array(classes));
        map.insert("coset_law".into(), serde_json::to_value(&law).map_err(std::io::Error::from)?);
        map.insert("numeric".into(), serde_json::to_value(&clusters).map_err(std::io::Error::from)?);
        map.insert("affine_automorphisms".into(), json!(g.affine_automorphism_count()?));
    }
    map.insert("affine_is_full_aut".into(), json!(g.affine_is_full_aut()));
    if g.n() <= BRUTE_FORCE_MAX_VERTICES {
        map.insert("brute_force_automorphisms".into(), json!(g.brute_force_automorphism_count()?));
    }
    if json {
        return emit_json(out, &v);
    }
    for (key, value) in v.as_object().expect("object") {
        if key == "eigenvalues" {
            for c in value.as_array().expect("array") {
                writeln!(out, "  f on {}: {}", c["indices"], c["eigenvalue"].as_str().unwrap_or_default())?;
            }
        } else {
            writeln!(out, "{key}: {value}")?;
        }
    }
    Ok(())
}

/// The witness and default vertex order for a `--graph` name.
fn witness_target(name: &str) -> std::result::Result<(CirculantGraph, MagicUnitaryWitness, Vec<u64>), Failure> {
    let (graph, w) = match name {
        "c4" => (CirculantGraph::cycle(4), build_u_pq()),
        "x4" => (CirculantGraph::empty(4), extend_with_identity_tail(&build_u_pq(), 4)?),
        _ => {
            let n = name
                .strip_prefix("xn:")
                .and_then(|t| t.parse::<u64>().ok())
                .ok_or_else(|| Failure::Usage(format!("--graph: expected x4, c4 or xn:<n>, got '{name}'")))?;
            if n < 4 {
                return Err(Error::CannotShrink { from: 4, to: n as usize }.into());
            }
            (CirculantGraph::empty(n), extend_with_identity_tail(&build_u_pq(), n as usize)?)
        }
    };
    let order = if name == "c4" { C4_WITNESS_ORDER.to_vec() } else { (0..graph.n()).collect() };
    Ok((graph, w, order))
}

fn witness(name: &str, order: Option<&str>, json: bool, out: &mut impl Write) -> Outcome {
    let (graph, w, default_order) = witness_target(name)?;
    let order = match order {
        None => default_order,
        Some(text) => parse_ints(text, "order")?
            .into_iter()
            .map(|x| if x >= 1 { Ok(x as u64 - 1) } else { Err(Error::InvalidPermutation(graph.n() as usize)) })
            .collect::<std::result::Result<Vec<u64>, Error>>()?,
    };
    let defect = verify_magic_unitary(&w).err();
    let commutes = verify_commutation(&w, &graph, &order)?;
    let pair = w.noncommuting_pair();
    let quantum = defect.is_none() && commutes && pair.is_some();
    if json {
        return emit_json(
            out,
            &json!({
                "graph": graph,
                "vertex_order": order,
                "magic_unitary": defect.is_none(),
                "defect": defect,
                "commutes": commutes,
                "noncommuting_pair": pair,
                "verdict": if quantum { Some(Verdict::HasQuantumSymmetry) } else { None },
                "witness": w,
            }),
        );
    }
    writeln!(out, "witness {} on {name}, vertex order {:?} (0-based)", w.label, order)?;
    match &defect {
        None => writeln!(out, "magic unitary: yes")?,
        Some(d) => writeln!(out, "magic unitary: no ({d})")?,
    }
    writeln!(out, "commutes with adjacency: {commutes}")?;
    match pair {
        Some([a, b]) => writeln!(out, "non-commuting entries: u{:?} and u{:?}", a, b)?,
        None => writeln!(out, "all entries commute")?,
    }
    Ok(())
}
