use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{Context, Result};
use mpr_core::evaluation::{
    alpha_sweep, build_motif_matrix, extract_features, ndcg_at_k_with, parse_alpha_grid, significance_test,
    write_features_tsv, write_ndcg_tsv, write_significance_tsv, write_sweep_tsv, IdcgMode, InstanceOptions, Method,
    NdcgRow, RelevanceTable, SignificanceConfig, SweepConfig, TTest,
};
use mpr_core::ranking::{
    combine, format_significant, rank_nodes, Baseline, CentralityOptions, CombinationMode, CombinationParams,
    PageRankParams, RankingParams,
};
use mpr_core::sampling::{census, z_scores, CensusMethod, MotifSearch, SamplingParams, DEFAULT_MAX_SUBGRAPHS};
use mpr_core::motif::MotifFamily;
use mpr_core::{density, load_edge_list, DirectedGraph, IngestStats, InstanceCounting, MotifId};

use crate::config::FileConfig;
use crate::{
    CensusArgs, CensusOptions, Cli, CombinationArgs, Command, EvalArgs, FeaturesArgs, GraphArgs, InputError,
    MotifArgs, MotifMatrixArgs, OutputArgs, PageRankArgs, RankArgs, StatsArgs, SweepArgs,
};

const DEFAULT_K: usize = 10;
const DEFAULT_ALPHA: f64 = 0.5;
const DEFAULT_ALPHA_GRID: &str = "0:1:0.1";

/// Settings shared by every subcommand, plus the provenance lines echoed
/// into output headers.
struct Ctx {
    file: FileConfig,
    seed: Option<u64>,
    reproducible: bool,
    header: Vec<String>,
}

impl Ctx {
    fn note(&mut self, key: &str, value: impl std::fmt::Display) {
        self.header.push(format!("{key}={value}"));
    }

    fn note_f(&mut self, key: &str, value: f64) {
        self.header.push(format!("{key}={}", format_significant(value, 12)));
    }

    fn seed(&mut self) -> Result<u64> {
        let seed = match self.seed.or(self.file.seed) {
            Some(s) => s,
            None if self.reproducible => {
                return Err(InputError("--reproducible needs --seed (or `seed` in the config file)".into()).into())
            }
            None => {
                let s: u64 = rand::random();
                log::warn!("no seed given; drew seed {s}");
                s
            }
        };
        self.seed = Some(seed);
        if !self.header.iter().any(|h| h.starts_with("seed=")) {
            self.note("seed", seed);
        }
        Ok(seed)
    }
}

fn parse<T>(what: &str, s: &str) -> Result<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| InputError(format!("invalid {what} {s:?}: {e}")).into())
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    if let Some(t) = cli.threads.or(file.threads) {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let mut ctx = Ctx {
        file,
        seed: cli.seed,
        reproducible: cli.reproducible,
        header: Vec::new(),
    };
    match cli.command {
        Command::Census(a) => cmd_census(&mut ctx, a),
        Command::MotifMatrix(a) => cmd_motif_matrix(&mut ctx, a),
        Command::Rank(a) => cmd_rank(&mut ctx, a),
        Command::Eval(a) => cmd_eval(&mut ctx, a),
        Command::Sweep(a) => cmd_sweep(&mut ctx, a),
        Command::Features(a) => cmd_features(&mut ctx, a),
        Command::Stats(a) => cmd_stats(&mut ctx, a),
    }
}

fn load_graph(ctx: &mut Ctx, args: &GraphArgs) -> Result<(DirectedGraph, IngestStats)> {
    let weighted = args.weighted || ctx.file.graph.weighted.unwrap_or(false);
    let file = File::open(&args.input).map_err(|e| InputError(format!("cannot open {}: {e}", args.input.display())))?;
    let (g, stats) = load_edge_list(BufReader::new(file), weighted)
        .map_err(|e| InputError(format!("{}: {e}", args.input.display())))?;
    if stats.self_loops_dropped > 0 {
        log::info!("dropped {} self-loops", stats.self_loops_dropped);
    }
    ctx.note("input", args.input.display());
    ctx.note("weighted", weighted);
    Ok((g, stats))
}

fn load_relevance(path: &Path) -> Result<RelevanceTable> {
    let file = File::open(path).map_err(|e| InputError(format!("cannot open {}: {e}", path.display())))?;
    RelevanceTable::load(BufReader::new(file)).map_err(|e| InputError(format!("{}: {e}", path.display())).into())
}

fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os("MPR_OUTPUT_DIR") {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_output(output: &OutputArgs, bytes: &[u8]) -> Result<Option<PathBuf>> {
    match &output.output {
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(None)
        }
        Some(p) => {
            let path = resolve_output(p);
            write_file(&path, bytes)?;
            Ok(Some(path))
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn census_method(ctx: &mut Ctx, opts: &CensusOptions, default: &str) -> Result<CensusMethod> {
    let c = ctx.file.census.clone();
    let name = opts.census.clone().or(c.method).unwrap_or_else(|| default.to_string());
    let method = match name.as_str() {
        "exact" => CensusMethod::Exact {
            max_subgraphs: opts.max_subgraphs.or(c.max_subgraphs).unwrap_or(DEFAULT_MAX_SUBGRAPHS),
        },
        "sampled" => CensusMethod::Sampled {
            num_samples: opts.samples.or(c.samples).unwrap_or(SamplingParams::DEFAULT_SAMPLES),
            seed: ctx.seed()?,
        },
        other => return Err(usage(format!("unknown census method {other:?} (expected exact or sampled)"))),
    };
    match method {
        CensusMethod::Exact { max_subgraphs } => {
            ctx.note("census", "exact");
            ctx.note("max_subgraphs", max_subgraphs);
        }
        CensusMethod::Sampled { num_samples, .. } => {
            ctx.note("census", "sampled");
            ctx.note("samples", num_samples);
        }
    }
    Ok(method)
}

fn pagerank_params(ctx: &mut Ctx, a: &PageRankArgs) -> Result<RankingParams> {
    let c = &ctx.file.pagerank;
    let defaults = PageRankParams::default();
    let pagerank = PageRankParams {
        damping: a.damping.or(c.damping).unwrap_or(defaults.damping),
        tolerance: a.tolerance.or(c.tolerance).unwrap_or(defaults.tolerance),
        max_iterations: a.max_iterations.or(c.max_iterations).unwrap_or(defaults.max_iterations),
    };
    pagerank.validate().map_err(|e| usage(e.to_string()))?;
    let cdef = CentralityOptions::default();
    let centrality = CentralityOptions {
        exact_node_cap: a.exact_node_cap.or(c.exact_node_cap).unwrap_or(cdef.exact_node_cap),
        pivots: a.pivots.or(c.pivots).unwrap_or(cdef.pivots),
        seed: 0,
    };
    ctx.note_f("damping", pagerank.damping);
    ctx.note_f("tolerance", pagerank.tolerance);
    ctx.note("max_iterations", pagerank.max_iterations);
    Ok(RankingParams { pagerank, centrality })
}

fn motif_id(ctx: &mut Ctx, a: &MotifArgs) -> Result<Option<MotifId>> {
    let Some(s) = a.motif.clone().or(ctx.file.combination.motif.clone()) else {
        return Ok(None);
    };
    let id: MotifId = parse("motif", &s)?;
    ctx.note("motif", id);
    Ok(Some(id))
}

fn instance_options(ctx: &mut Ctx, a: &MotifArgs, motif: MotifId) -> Result<InstanceOptions> {
    if motif.family() != MotifFamily::Sampled {
        return Ok(InstanceOptions::default());
    }
    let counting = match a.counting.clone().or(ctx.file.combination.counting.clone()) {
        Some(s) => parse::<InstanceCounting>("counting mode", &s)?,
        None => InstanceCounting::DirectEdgeOnly,
    };
    ctx.note(
        "counting",
        match counting {
            InstanceCounting::AnchorCooccur => "anchor",
            InstanceCounting::DirectEdgeOnly => "direct",
        },
    );
    let census = census_method(ctx, &a.census, "exact")?;
    Ok(InstanceOptions { counting, census })
}

fn combination(ctx: &mut Ctx, a: &CombinationArgs) -> Result<CombinationParams> {
    let mode = match a.mode.clone().or(ctx.file.combination.mode.clone()) {
        Some(s) => parse::<CombinationMode>("combination mode", &s)?,
        None => CombinationMode::Linear,
    };
    let alpha = a.alpha.or(ctx.file.combination.alpha).unwrap_or(DEFAULT_ALPHA);
    let p = CombinationParams::new(alpha, mode).map_err(|e| usage(e.to_string()))?;
    ctx.note("mode", mode);
    ctx.note_f("alpha", alpha);
    Ok(p)
}

fn ks(ctx: &mut Ctx, flag: &[usize]) -> Result<Vec<usize>> {
    let ks = if !flag.is_empty() {
        flag.to_vec()
    } else {
        ctx.file.eval.k.clone().unwrap_or_else(|| vec![DEFAULT_K])
    };
    if ks.contains(&0) {
        return Err(usage("K must be at least 1"));
    }
    ctx.note("k", ks.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    Ok(ks)
}

fn idcg(ctx: &mut Ctx, flag: &Option<String>) -> Result<IdcgMode> {
    let mode = match flag.clone().or(ctx.file.eval.idcg.clone()) {
        Some(s) => parse::<IdcgMode>("IDCG mode", &s)?,
        None => IdcgMode::Local,
    };
    ctx.note(
        "idcg",
        match mode {
            IdcgMode::Local => "local",
            IdcgMode::Global => "global",
        },
    );
    Ok(mode)
}

fn with_header(ctx: &Ctx, command: &str) -> Vec<String> {
    let mut h = vec![format!("command={command}")];
    h.extend(ctx.header.iter().cloned());
    h
}

fn cmd_census(ctx: &mut Ctx, a: CensusArgs) -> Result<()> {
    let (g, _) = load_graph(ctx, &a.graph)?;
    let n = a.n.or(ctx.file.census.n).unwrap_or(3);
    if !(3..=5).contains(&n) {
        return Err(usage(format!("-n {n}: subgraph size must be 3, 4 or 5")));
    }
    ctx.note("n", n);
    let method = census_method(ctx, &a.census, "sampled")?;
    let c = census(&g, n, method, a.instances.is_some())?;
    if let Some(d) = &c.diagnostic {
        log::warn!("{d}");
    }
    let z = if a.zscore {
        let search = MotifSearch {
            method,
            num_random: a.random_networks.or(ctx.file.census.random_networks).unwrap_or(100),
            swap_factor: a.swap_factor.or(ctx.file.census.swap_factor).unwrap_or(10.0),
            seed: ctx.seed()?,
        };
        ctx.note("random_networks", search.num_random);
        ctx.note_f("swap_factor", search.swap_factor);
        Some(z_scores(&g, &c, &search)?)
    } else {
        None
    };
    let mut buf = Vec::new();
    c.write_report(&mut buf, z.as_ref(), &with_header(ctx, "census"))?;
    write_output(&a.output, &buf)?;
    if let Some(p) = &a.instances {
        let mut buf = Vec::new();
        c.write_instances(&mut buf, g.nodes().ids())?;
        write_file(&resolve_output(p), &buf)?;
    }
    Ok(())
}

fn cmd_motif_matrix(ctx: &mut Ctx, a: MotifMatrixArgs) -> Result<()> {
    let (g, _) = load_graph(ctx, &a.graph)?;
    let motif = motif_id(ctx, &a.motif)?.ok_or_else(|| usage("--motif is required"))?;
    let opts = instance_options(ctx, &a.motif, motif)?;
    let g = if g.is_weighted() { g.binarize() } else { g };
    let wm = build_motif_matrix(&g, motif, &opts)?;
    let mut headers: Vec<String> = with_header(ctx, "motif-matrix").iter().map(|h| format!(" {h}")).collect();
    headers.push(format!("motif {}", wm.motif));
    headers.push(format!("symmetric {}", wm.symmetric));
    let mut buf = Vec::new();
    wm.matrix.write_coordinate(&mut buf, &headers)?;
    if let Some(path) = write_output(&a.output, &buf)? {
        let mut nodes = Vec::new();
        g.nodes().write_tsv(&mut nodes)?;
        let mut name = path.into_os_string();
        name.push(".nodes");
        write_file(Path::new(&name), &nodes)?;
    }
    Ok(())
}

fn method_scores(ctx: &mut Ctx, g: &DirectedGraph, a: &RankArgs) -> Result<Vec<f64>> {
    let params = pagerank_params(ctx, &a.pagerank)?;
    if let Some(b) = &a.baseline {
        if a.combination.alpha.is_some() || a.combination.mode.is_some() {
            return Err(usage("--alpha and --mode apply to motif rankings, not --baseline"));
        }
        let b: Baseline = parse("baseline", b)?;
        ctx.note("baseline", b);
        return Ok(Method::Baseline(b).scores(g, &params, &InstanceOptions::default())?);
    }
    let motif = motif_id(ctx, &a.motif)?.ok_or_else(|| usage("give --motif or --baseline"))?;
    let opts = instance_options(ctx, &a.motif, motif)?;
    let combination = combination(ctx, &a.combination)?;
    Ok(Method::Mpr { motif, combination }.scores(g, &params, &opts)?)
}

fn cmd_rank(ctx: &mut Ctx, a: RankArgs) -> Result<()> {
    let (g, _) = load_graph(ctx, &a.graph)?;
    let k = a.k.unwrap_or(DEFAULT_K);
    if k == 0 {
        return Err(usage("-k must be at least 1"));
    }
    ctx.note("k", k);
    let scores = method_scores(ctx, &g, &a)?;
    let ranking = rank_nodes(&scores, g.nodes(), k)?;
    let mut header = with_header(ctx, "rank");
    if let Some(w) = &ranking.warning {
        log::warn!("{w}");
        header.push(format!("warning={w}"));
    }
    let mut buf = Vec::new();
    ranking.write_tsv(&mut buf, &header)?;
    write_output(&a.output, &buf)?;
    Ok(())
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    names.iter().map(|s| parse::<Method>("method", s.trim())).collect()
}

fn cmd_eval(ctx: &mut Ctx, a: EvalArgs) -> Result<()> {
    let (g, _) = load_graph(ctx, &a.graph)?;
    let relevance = load_relevance(&a.relevance)?;
    ctx.note("relevance", a.relevance.display());
    let names = if !a.methods.is_empty() {
        a.methods.clone()
    } else {
        ctx.file.eval.methods.clone().unwrap_or_else(|| vec!["BPR".into()])
    };
    let methods = parse_methods(&names)?;
    ctx.note("methods", names.join(","));
    let ks = ks(ctx, &a.k)?;
    let idcg = idcg(ctx, &a.idcg)?;
    let params = pagerank_params(ctx, &a.pagerank)?;
    let kmax = *ks.iter().max().expect("non-empty");

    // Instance options only matter for sampled-class motifs.
    let opts = match methods.iter().find_map(|m| match m {
        Method::Mpr { motif, .. } if motif.family() == MotifFamily::Sampled => Some(*motif),
        _ => None,
    }) {
        Some(m) => instance_options(ctx, &a.motif, m)?,
        None => InstanceOptions::default(),
    };

    let mut rows = Vec::new();
    for m in &methods {
        let scores = m.scores(&g, &params, &opts)?;
        let ranking = rank_nodes(&scores, g.nodes(), kmax)?;
        for &k in &ks {
            let n = ndcg_at_k_with(&ranking, &relevance, k, idcg)?;
            if n.degenerate {
                log::warn!("{m} at K={k}: every retrieved node has zero relevance; NDCG set to 1");
            }
            if n.missing > 0 {
                log::info!("{m} at K={k}: {} retrieved nodes lack relevance scores", n.missing);
            }
            rows.push(NdcgRow {
                method: m.to_string(),
                k,
                ndcg: n.value,
            });
        }
    }

    let mut sig_block = None;
    if a.significance {
        let reference: Method = parse(
            "reference method",
            &a.reference.clone().or(ctx.file.eval.reference.clone()).unwrap_or_else(|| "BPR".into()),
        )?;
        let pairs: Vec<(Method, Method)> = methods.iter().filter(|m| **m != reference).map(|m| (*m, reference)).collect();
        if pairs.is_empty() {
            return Err(usage("--significance needs a method other than the reference"));
        }
        let test = match a.test.clone().or(ctx.file.eval.test.clone()) {
            Some(s) => parse::<TTest>("t-test", &s)?,
            None => TTest::Paired,
        };
        let cfg = SignificanceConfig {
            reps: a.reps.or(ctx.file.eval.reps).unwrap_or(30),
            fraction: a.fraction.or(ctx.file.eval.fraction).unwrap_or(0.8),
            ks: ks.clone(),
            seed: ctx.seed()?,
            test,
            idcg,
            ranking: params,
            instances: opts,
        };
        ctx.note("reference", reference);
        ctx.note("reps", cfg.reps);
        ctx.note_f("fraction", cfg.fraction);
        ctx.note("test", if test == TTest::Paired { "paired" } else { "welch" });
        sig_block = Some(significance_test(&g, &relevance, &pairs, &cfg)?);
    }

    let mut sweep_block = None;
    if let Some(grid) = &a.sweep_alpha {
        let alphas = parse_alpha_grid(grid).map_err(|e| usage(e.to_string()))?;
        let motif = motif_id(ctx, &a.motif)?.ok_or_else(|| usage("--sweep-alpha needs --motif"))?;
        let sweep_opts = instance_options(ctx, &a.motif, motif)?;
        let comb = combination(ctx, &a.combination)?;
        ctx.note("sweep_alpha", grid);
        let binary = g.binarize();
        let wm = build_motif_matrix(&binary, motif, &sweep_opts)?;
        let cfg = SweepConfig {
            mode: comb.mode,
            alphas,
            ks: ks.clone(),
            idcg,
            pagerank: params.pagerank,
        };
        sweep_block = Some(alpha_sweep(&binary, &wm, &relevance, &cfg)?);
    }

    let mut buf = Vec::new();
    write_ndcg_tsv(&mut buf, &rows, &with_header(ctx, "eval"))?;
    if let Some(sig) = sig_block {
        writeln!(buf)?;
        write_significance_tsv(&mut buf, &sig, &[])?;
    }
    if let Some(sweep) = sweep_block {
        writeln!(buf)?;
        write_sweep_tsv(&mut buf, &sweep, &[])?;
    }
    write_output(&a.output, &buf)?;
    Ok(())
}

fn cmd_sweep(ctx: &mut Ctx, a: SweepArgs) -> Result<()> {
    let (g, _) = load_graph(ctx, &a.graph)?;
    let relevance = load_relevance(&a.relevance)?;
    ctx.note("relevance", a.relevance.display());
    let motif = motif_id(ctx, &a.motif)?.ok_or_else(|| usage("--motif is required"))?;
    let opts = instance_options(ctx, &a.motif, motif)?;
    if a.combination.alpha.is_some() {
        return Err(usage("sweep takes its alpha values from --alphas"));
    }
    let mode = match a.combination.mode.clone().or(ctx.file.combination.mode.clone()) {
        Some(s) => parse::<CombinationMode>("combination mode", &s)?,
        None => CombinationMode::Linear,
    };
    ctx.note("mode", mode);
    let grid = a
        .alphas
        .clone()
        .or(ctx.file.eval.alphas.clone())
        .unwrap_or_else(|| DEFAULT_ALPHA_GRID.into());
    let alphas = parse_alpha_grid(&grid).map_err(|e| usage(e.to_string()))?;
    ctx.note("alphas", &grid);
    let ks = ks(ctx, &a.k)?;
    let idcg = idcg(ctx, &a.idcg)?;
    let params = pagerank_params(ctx, &a.pagerank)?;
    let binary = g.binarize();
    let wm = build_motif_matrix(&binary, motif, &opts)?;
    let cfg = SweepConfig {
        mode,
        alphas,
        ks,
        idcg,
        pagerank: params.pagerank,
    };
    let rows = alpha_sweep(&binary, &wm, &relevance, &cfg)?;
    let mut buf = Vec::new();
    write_sweep_tsv(&mut buf, &rows, &with_header(ctx, "sweep"))?;
    write_output(&a.output, &buf)?;
    Ok(())
}

fn cmd_features(ctx: &mut Ctx, a: FeaturesArgs) -> Result<()> {
    let (g, _) = load_graph(ctx, &a.graph)?;
    let params = pagerank_params(ctx, &a.pagerank)?;
    let binary = g.binarize();
    let matrix = match motif_id(ctx, &a.motif)? {
        None => {
            ctx.note("matrix", "W");
            binary.adjacency().clone()
        }
        Some(motif) => {
            let opts = instance_options(ctx, &a.motif, motif)?;
            let comb = combination(ctx, &a.combination)?;
            ctx.note("matrix", "H");
            let wm = build_motif_matrix(&binary, motif, &opts)?;
            combine(binary.adjacency(), &wm.matrix, &comb)?
        }
    };
    let rows = extract_features(&matrix, g.nodes(), &params.centrality)?;
    let mut buf = Vec::new();
    write_features_tsv(&mut buf, &rows, &with_header(ctx, "features"))?;
    write_output(&a.output, &buf)?;
    Ok(())
}

fn cmd_stats(ctx: &mut Ctx, a: StatsArgs) -> Result<()> {
    let (g, stats) = load_graph(ctx, &a.graph)?;
    let mut buf = Vec::new();
    for h in with_header(ctx, "stats") {
        writeln!(buf, "# {h}")?;
    }
    let dens = density(&g).map(|d| format_significant(d, 12)).unwrap_or_else(|_| "NA".into());
    writeln!(buf, "nodes\t{}", g.node_count())?;
    writeln!(buf, "edges\t{}", g.edge_count())?;
    writeln!(buf, "density\t{dens}")?;
    writeln!(buf, "reciprocated_edges\t{}", g.reciprocated_edge_count())?;
    writeln!(buf, "lines\t{}", stats.lines)?;
    writeln!(buf, "self_loops_dropped\t{}", stats.self_loops_dropped)?;
    writeln!(buf, "duplicate_edges\t{}", stats.duplicate_edges)?;
    write_output(&a.output, &buf)?;
    Ok(())
}
