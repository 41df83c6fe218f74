use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};

use emitgen::bounds::{total_bound, BoundReport};
use emitgen::graphs::{
    isomorphic, parse_graph, path, ring, shor_encode_22, truncate_leaves, write_graph,
    EmissionOrdering, Graph,
};
use emitgen::search::{
    exhaustive, lifted, random, CellSelect, Collect, Execution, ExhaustiveConfig, HistogramDoc,
    LiftedConfig, Provenance, SearchConfig, SearchOutcome, VerifyConfig,
};
use emitgen::solver::{
    extract_graph, photonic_part, simulate, solve, verify, GenerationCircuit, OutcomeSource,
    DEFAULT_RANDOM_STREAMS,
};

use crate::manifest::{graph_hash, RunManifest};
use crate::{
    BoundsArgs, Cli, CliError, Command, Format, GraphArgs, GraphKind, Mode, OrderingArgs,
    SearchArgs, SolveArgs, VerifyArgs,
};

/// Ordered `key = value` report, rendered as text lines or one JSON object.
#[derive(Default)]
struct Report(Vec<(String, Value)>);

impl Report {
    fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.0.push((key.to_string(), value.into()));
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self
                .0
                .iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k} = {s}\n"),
                    other => format!("{k} = {other}\n"),
                })
                .collect(),
            Format::Structured => {
                let map: Map<String, Value> = self.0.iter().cloned().collect();
                serde_json::to_string_pretty(&Value::Object(map)).unwrap() + "\n"
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Graph(a) => cmd_graph(cli, a),
        Command::Solve(a) => cmd_solve(cli, a),
        Command::Search(a) => cmd_search(cli, a),
        Command::Verify(a) => cmd_verify(cli, a),
        Command::Bounds(a) => cmd_bounds(cli, a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Other(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    fs::write(&p, text).map_err(|e| CliError::Other(format!("{}: {e}", p.display())))?;
    Ok(p)
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    Ok(parse_graph(&read(path)?)?)
}

fn parse_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(|c: char| c == ',' || c.is_whitespace() || c == '[' || c == ']')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|e| CliError::Parse(format!("ordering entry `{s}`: {e}")))
        })
        .collect()
}

fn load_ordering(a: &OrderingArgs, n: usize) -> Result<EmissionOrdering, CliError> {
    let list = match (&a.ordering, &a.ordering_file) {
        (Some(s), _) => parse_list(s)?,
        (None, Some(p)) => {
            let text: String = read(p)?
                .lines()
                .filter(|l| !l.trim_start().starts_with('#'))
                .collect::<Vec<_>>()
                .join(" ");
            parse_list(&text)?
        }
        (None, None) => return Ok(EmissionOrdering::identity(n)),
    };
    Ok(if a.times {
        EmissionOrdering::from_vertex_times(&list)?
    } else {
        EmissionOrdering::from_one_based(&list)?
    })
}

fn execution(workers: usize) -> Execution {
    if workers == 1 {
        Execution::Serial
    } else {
        Execution::Parallel { workers }
    }
}

fn write_manifest(
    cli: &Cli,
    name: &str,
    command: &str,
    g: Option<&Graph>,
    start: Instant,
) -> Result<PathBuf, CliError> {
    let m = RunManifest::new(command, cli.seed, g, start.elapsed());
    write(&cli.output_dir, name, &m.to_json())
}

fn cmd_graph(cli: &Cli, a: &GraphArgs) -> Result<String, CliError> {
    let start = Instant::now();
    let size = || {
        a.arg
            .parse::<usize>()
            .map_err(|e| CliError::Parse(format!("size `{}`: {e}", a.arg)))
    };
    let g = match a.kind {
        GraphKind::Ring => ring(size()?)?,
        GraphKind::Path => path(size()?)?,
        GraphKind::Shor22 => shor_encode_22(&ring(size()?)?)?,
        GraphKind::Core => truncate_leaves(&shor_encode_22(&ring(size()?)?)?)?.graph,
        GraphKind::File => load_graph(Path::new(&a.arg))?,
    };
    let file = write(&cli.output_dir, &a.out, &write_graph(&g))?;
    write_manifest(
        cli,
        &format!("{}.manifest.json", a.out),
        "graph",
        Some(&g),
        start,
    )?;
    let mut r = Report::default();
    r.put("vertices", g.n_vertices());
    r.put("edges", g.n_edges());
    r.put("hadamards", g.hadamards().len());
    r.put("leaves", g.leaf_map().map_or(0, |m| m.len()));
    r.put("graph_hash", graph_hash(&g));
    r.put("file", file.display().to_string());
    Ok(r.render(cli.format))
}

fn bound_json(b: &BoundReport) -> Value {
    json!({
        "absorption": b.a_bound,
        "measurement": b.m_bound,
        "end": b.e_bound,
        "total": b.total,
    })
}

fn cmd_solve(cli: &Cli, a: &SolveArgs) -> Result<String, CliError> {
    let start = Instant::now();
    let g = load_graph(&a.graph)?;
    let o = load_ordering(&a.ordering, g.n_vertices())?;
    let sol = solve(&g, &o)?;
    let s = sol.stats;
    let file = write(&cli.output_dir, &a.out, &sol.circuit.to_text())?;
    let report = verify(&sol.circuit, &g, &o, cli.seed, DEFAULT_RANDOM_STREAMS)?;
    write_manifest(
        cli,
        &format!("{}.manifest.json", a.out),
        "solve",
        Some(&g),
        start,
    )?;

    let (np, ne) = (g.n_vertices() as u64, s.n_emitters as u64);
    let exact =
        total_bound(np, ne, Some(s.n_trm as u64)).map_err(|e| CliError::Other(e.to_string()))?;
    let agnostic = total_bound(np, ne, None).map_err(|e| CliError::Other(e.to_string()))?;
    let mut r = Report::default();
    r.put("ordering", json!(o.to_one_based()));
    r.put("emitters", s.n_emitters);
    r.put("cnots", s.cnot_count);
    r.put("n_trm", s.n_trm);
    r.put("absorption_cnots", s.absorption);
    r.put("measurement_cnots", s.measurement);
    r.put("end_cnots", s.end);
    r.put("bound_exact", bound_json(&exact));
    r.put("bound_agnostic", bound_json(&agnostic));
    r.put("within_bounds", s.within_bounds(g.n_vertices()));
    r.put("verified", report.passed);
    r.put("verify_streams", report.streams);
    r.put("dense_checked", report.dense_checked);
    r.put("circuit", file.display().to_string());
    let out = r.render(cli.format);
    if !report.passed {
        print!("{out}");
        return Err(CliError::Verification(report.failure.unwrap_or_default()));
    }
    Ok(out)
}

fn cmd_search(cli: &Cli, a: &SearchArgs) -> Result<String, CliError> {
    let start = Instant::now();
    let g = load_graph(&a.graph)?;
    let search = SearchConfig {
        execution: execution(cli.workers),
        collect: Collect::Best,
        verify: a.verify.then_some(VerifyConfig {
            seed: cli.seed,
            random_streams: DEFAULT_RANDOM_STREAMS,
        }),
        ..SearchConfig::default()
    };
    let exhaustive_cfg = |search: SearchConfig| ExhaustiveConfig {
        search,
        budget: a.budget,
        checkpoint: a.checkpoint.clone(),
        checkpoint_every: a.checkpoint_every,
        ..ExhaustiveConfig::default()
    };
    let hash = graph_hash(&g);
    let provenance = |mode: &str, samples: Option<u64>| Provenance {
        mode: mode.into(),
        seed: Some(cli.seed),
        samples,
        graph_hash: Some(hash.clone()),
        solver: search.solver,
    };

    let mut r = Report::default();
    let mut files = Vec::new();
    let (outcome, mode) = match a.mode {
        Mode::Exhaustive => (
            exhaustive(&g, &exhaustive_cfg(search.clone()))?,
            "exhaustive",
        ),
        Mode::Random => (random(&g, a.samples, cli.seed, &search)?, "random"),
        Mode::Lifted => {
            let mut core_search = search.clone();
            core_search.verify = None;
            let cfg = LiftedConfig {
                search: search.clone(),
                core: exhaustive_cfg(core_search),
                select: if a.cells.is_empty() {
                    CellSelect::Best
                } else {
                    CellSelect::Cells(a.cells.clone())
                },
                per_leaf: a.per_leaf,
            };
            let out = lifted(&g, &cfg)?;
            let core_doc = HistogramDoc::new(provenance("lifted_core", None), &out.core);
            files.push(write(
                &cli.output_dir,
                &format!("{}.core.tsv", a.name),
                &out.core.histogram.to_tsv(),
            )?);
            files.push(write(
                &cli.output_dir,
                &format!("{}.core.json", a.name),
                &core_doc.to_json(),
            )?);
            r.put("core_evaluated", out.core.evaluated);
            r.put("lifted_core_orderings", out.selected.len());
            if out.selected.is_empty() {
                r.put("notice", "no core ordering in the selected cells");
            }
            (out.full, "lifted")
        }
    };
    let samples = (a.mode == Mode::Random).then_some(a.samples);
    let doc = HistogramDoc::new(provenance(mode, samples), &outcome);
    files.push(write(
        &cli.output_dir,
        &format!("{}.tsv", a.name),
        &outcome.histogram.to_tsv(),
    )?);
    files.push(write(
        &cli.output_dir,
        &format!("{}.json", a.name),
        &doc.to_json(),
    )?);
    if a.emit_plot_data {
        let triples: String = outcome
            .histogram
            .cells()
            .iter()
            .map(|(&(e, c), cell)| format!("{e} {c} {}\n", cell.count))
            .collect();
        files.push(write(
            &cli.output_dir,
            &format!("{}.plot.dat", a.name),
            &triples,
        )?);
    }
    files.push(write_manifest(
        cli,
        &format!("{}.manifest.json", a.name),
        "search",
        Some(&g),
        start,
    )?);

    r.put("mode", mode);
    r.put("evaluated", outcome.evaluated);
    summarize(&mut r, &outcome);
    r.put(
        "files",
        json!(files
            .iter()
            .map(|f| f.display().to_string())
            .collect::<Vec<_>>()),
    );
    let out = r.render(cli.format);
    if outcome.verify_failures > 0 {
        print!("{out}");
        let (o, m) = outcome
            .first_failure
            .unwrap_or((EmissionOrdering::identity(0), String::new()));
        return Err(CliError::Verification(format!(
            "{} circuits failed verification; first {:?}: {m}",
            outcome.verify_failures,
            o.to_one_based()
        )));
    }
    Ok(out)
}

fn summarize(r: &mut Report, outcome: &SearchOutcome) {
    if let Some(((e, c), cell)) = outcome.histogram.best() {
        r.put(
            "best_cell",
            json!({"emitters": e, "cnots": c, "count": cell.count}),
        );
    }
    if let Ok(front) = outcome.histogram.pareto() {
        r.put(
            "pareto",
            json!(front
                .iter()
                .map(|&(e, c)| json!([e, c]))
                .collect::<Vec<_>>()),
        );
    }
    r.put("verified", outcome.verified);
    r.put("verify_failures", outcome.verify_failures);
    r.put("bound_violations", outcome.bound_violations);
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<String, CliError> {
    let g = load_graph(&a.graph)?;
    let circuit = GenerationCircuit::parse(&read(&a.circuit)?)?;
    let mut r = Report::default();
    r.put("photons", circuit.n_photons());
    r.put("emitters_declared", circuit.n_emitters());
    r.put("emitters_used", circuit.emitters_used());
    r.put("cnots", circuit.cnot_count());
    r.put("measurements", circuit.measurement_count());
    if a.up_to_isomorphism {
        if circuit.n_photons() != g.n_vertices() {
            return Err(CliError::Parse(format!(
                "circuit emits {} photons, graph has {} vertices",
                circuit.n_photons(),
                g.n_vertices()
            )));
        }
        let mut sources = vec![
            OutcomeSource::Constant(false),
            OutcomeSource::Constant(true),
        ];
        sources.extend((0..DEFAULT_RANDOM_STREAMS).map(|s| OutcomeSource::seeded(cli.seed, s)));
        let mut first = None;
        for mut src in sources {
            let t = simulate(&circuit, &mut src)?;
            let photons = photonic_part(&t, circuit.n_photons())?.canonical();
            match &first {
                None => first = Some(photons),
                Some(f) if *f != photons => {
                    print!("{}", r.render(cli.format));
                    return Err(CliError::Verification(
                        "photonic state depends on measurement outcomes".into(),
                    ));
                }
                Some(_) => {}
            }
        }
        let extracted = extract_graph(&first.expect("at least one stream"))
            .map_err(|e| CliError::Verification(e.to_string()))?;
        let iso = if a.ignore_hadamards {
            isomorphic(&skeleton(&extracted.graph)?, &skeleton(&g)?)
        } else {
            isomorphic(&extracted.graph, &g)
        };
        r.put("hadamards_produced", extracted.hadamards.len());
        r.put("isomorphic", iso.is_some());
        if let Some(p) = &iso {
            r.put(
                "mapping",
                json!(p.iter().map(|v| v + 1).collect::<Vec<_>>()),
            );
        }
        let out = r.render(cli.format);
        if iso.is_none() {
            print!("{out}");
            return Err(CliError::Verification(
                "produced graph is not isomorphic to the target".into(),
            ));
        }
        Ok(out)
    } else {
        let o = load_ordering(&a.ordering, g.n_vertices())?;
        let report = verify(&circuit, &g, &o, cli.seed, DEFAULT_RANDOM_STREAMS)?;
        r.put("verified", report.passed);
        r.put("streams", report.streams);
        r.put("dense_checked", report.dense_checked);
        let out = r.render(cli.format);
        if !report.passed {
            print!("{out}");
            return Err(CliError::Verification(report.failure.unwrap_or_default()));
        }
        Ok(out)
    }
}

fn skeleton(g: &Graph) -> Result<Graph, CliError> {
    Ok(Graph::from_edges(g.n_vertices(), &g.edges())?)
}

fn cmd_bounds(cli: &Cli, a: &BoundsArgs) -> Result<String, CliError> {
    let b = total_bound(a.np, a.ne, a.n_trm).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(match cli.format {
        Format::Text => b.to_text(),
        Format::Structured => serde_json::to_string_pretty(&b).unwrap() + "\n",
    })
}
