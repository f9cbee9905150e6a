//! One handler per subcommand. Each returns its per-replicate table and
//! summary in memory; `main` decides where they go.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use stablematch_core::cost_process::{
    cdf_w, exact_total_moments, finite_mgf_complete, gumbel_cdf, limit_mgf_complete, typical_cost_sample,
    GraphKind,
};
use stablematch_core::matching::greedy_stable_matching;
use stablematch_core::perturbation::tail_replicate;
use stablematch_core::pwit::{rank_reference, sample_limit_rank};
use stablematch_core::special::{rank_one_probability, EULER_GAMMA};
use stablematch_core::stats::{ks_one_sample, moments_ci, pearson_corr_ci, Ecdf, Proportion};
use stablematch_core::{CostScale, StreamFamily, WeightedGraph};

use crate::args::{self, Command, Common, Engine, Kind, Scale};
use crate::experiments::{
    empirical_mgf, grid_stream, mean_se, overlap_replicate, par_map, sampled_graph, skeleton, tags,
    tree_sample, worst_trend_step, OverlapRow, GRID_REPS_LIMIT,
};
use crate::output::{Cell, Estimate, Provenance, Summary, Table};
use crate::verify;
use crate::CliError;

/// Everything one run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub provenance: Provenance,
    pub table: Table,
    pub summary: Summary,
    /// Additional files requested by flags, as `(path, contents)`.
    pub extra: Vec<(PathBuf, String)>,
    /// Human-readable report printed instead of the CSV when no CSV path
    /// is given (verify only).
    pub report: Option<String>,
}

impl RunOutput {
    pub fn csv(&self) -> String {
        self.table.render(&self.provenance)
    }

    pub fn json(&self, runtime_seconds: Option<f64>) -> String {
        self.summary.render_json(&self.provenance, runtime_seconds)
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SimulateCost(_) => "simulate-cost",
            Command::TypicalCost(_) => "typical-cost",
            Command::Rank(_) => "rank",
            Command::PwitRank(_) => "pwit-rank",
            Command::PwitTree(_) => "pwit-tree",
            Command::Overlap(_) => "overlap",
            Command::Tail(_) => "tail",
            Command::NoiseCorr(_) => "noise-corr",
            Command::Interlacing(_) => "interlacing",
            Command::Oracle(_) => "oracle",
            Command::DumpGraph(_) => "dump-graph",
            Command::Verify(_) => "verify",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::SimulateCost(a) => &a.common,
            Command::TypicalCost(a) => &a.common,
            Command::Rank(a) => &a.common,
            Command::PwitRank(a) => &a.common,
            Command::PwitTree(a) => &a.common,
            Command::Overlap(a) => &a.common,
            Command::Tail(a) => &a.common,
            Command::NoiseCorr(a) => &a.common,
            Command::Interlacing(a) => &a.common,
            Command::Oracle(a) => &a.common,
            Command::DumpGraph(a) => &a.common,
            Command::Verify(a) => &a.common,
        }
    }
}

/// Runs a subcommand on a pool of `--threads` workers.
pub fn run(command: &Command) -> Result<RunOutput, CliError> {
    match command.common().threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| usage(e.to_string()))?
            .install(|| dispatch(command)),
        None => dispatch(command),
    }
}

fn dispatch(command: &Command) -> Result<RunOutput, CliError> {
    match command {
        Command::SimulateCost(a) => simulate_cost(a),
        Command::TypicalCost(a) => typical_cost(a),
        Command::Rank(a) => rank(a),
        Command::PwitRank(a) => pwit_rank(a),
        Command::PwitTree(a) => pwit_tree(a),
        Command::Overlap(a) => overlap(a),
        Command::Tail(a) => tail(a),
        Command::NoiseCorr(a) => noise_corr(a),
        Command::Interlacing(a) => interlacing(a),
        Command::Oracle(a) => oracle(a),
        Command::DumpGraph(a) => dump_graph(a),
        Command::Verify(a) => verify::run_suite(a),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn provenance<T: Serialize>(name: &str, common: &Common, args: &T) -> Provenance {
    let mut config = json!({ "command": name });
    if let (Value::Object(dst), Ok(Value::Object(src))) = (&mut config, serde_json::to_value(args)) {
        dst.extend(src);
    }
    Provenance {
        seed: common.seed,
        config,
    }
}

fn check_reps(reps: u64) -> Result<(), CliError> {
    if reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    Ok(())
}

fn check_engine(engine: Engine, allowed: Engine, what: &str) -> Result<(), CliError> {
    if engine != allowed {
        return Err(usage(format!(
            "{what} needs --engine {}; {} does not apply",
            allowed.name(),
            engine.name()
        )));
    }
    Ok(())
}

fn check_eps(eps: &[f64]) -> Result<(), CliError> {
    if eps.is_empty() {
        return Err(usage("--eps grid is empty"));
    }
    if let Some(e) = eps.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(usage(format!("eps = {e} is outside [0, 1]")));
    }
    Ok(())
}

/// Validates an `n` grid of `K_{n,n}` instances against the edge budget.
fn check_n_grid(ns: &[usize], reps: u64) -> Result<(), CliError> {
    if ns.is_empty() {
        return Err(usage("--n grid is empty"));
    }
    if reps >= GRID_REPS_LIMIT {
        return Err(usage(format!("--reps must be below {GRID_REPS_LIMIT} for grid experiments")));
    }
    for &n in ns {
        WeightedGraph::bipartite(n)?;
    }
    Ok(())
}

fn graph_kind(kind: Kind, n: usize, allow_odd: bool) -> GraphKind {
    match kind {
        Kind::Bipartite => GraphKind::Bipartite(n),
        Kind::Complete => GraphKind::Complete { n, allow_odd },
    }
}

fn rank_cell(r: Option<impl Into<Cell>>) -> Cell {
    r.map(Into::into).unwrap_or_else(|| Cell::Text("inf".into()))
}

fn proportion(p: Proportion) -> Estimate {
    Estimate::with_se(p.value(), p.se(), p.trials)
}

fn within_3se(summary: &mut Summary, name: &str, value: f64, se: f64, target: f64) {
    let z = if se > 0.0 {
        (value - target).abs() / se
    } else if value == target {
        0.0
    } else {
        f64::INFINITY
    };
    summary.verdict(name, z, "|estimate - reference| / se <= 3", z <= 3.0);
}

fn simulate_cost(a: &args::SimulateCost) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    let kind = graph_kind(a.kind, a.n, a.allow_odd);
    match a.engine {
        Engine::FullGraph => drop(skeleton(kind)?),
        _ => kind.validate()?,
    }
    let family = StreamFamily::new(a.common.seed, tags::SIMULATE_COST);
    let totals = crate::experiments::totals(kind, a.engine, a.reps, family)?;

    let mut table = Table::new(&["replicate", "n", "kind", "engine", "total_cost"]);
    for (k, &c) in totals.iter().enumerate() {
        table.push(vec![k.into(), a.n.into(), a.kind.name().into(), a.engine.name().into(), c.into()]);
    }

    let mut summary = Summary::default();
    let exact = exact_total_moments(kind)?;
    summary.estimate("exact_mean", Estimate::exact(exact.mean));
    summary.estimate("exact_variance", Estimate::exact(exact.variance));
    if totals.len() >= 2 {
        let m = moments_ci(&totals)?;
        summary.estimate("mean", Estimate::with_se(m.mean, m.se_mean, m.count));
        summary.estimate("variance", Estimate::with_se(m.variance, m.se_variance, m.count));
        within_3se(&mut summary, "mean_matches_exact", m.mean, m.se_mean, exact.mean);
        let rel = (m.variance / exact.variance - 1.0).abs();
        summary.verdict("variance_within_5_percent", rel, "|variance / exact - 1| < 0.05", rel < 0.05);
    } else {
        summary.estimate("mean", Estimate::exact(totals[0]));
    }
    match kind {
        GraphKind::Bipartite(_) => {
            let centered: Vec<f64> = totals.iter().map(|c| c - exact.mean).collect();
            let d = ks_one_sample(&centered, |x| gumbel_cdf(x, -EULER_GAMMA, 1.0))?;
            summary.estimate("gumbel_ks_distance", Estimate::exact(d));
            summary.verdict("gumbel_ks_below_0.03", d, "< 0.03", d < 0.03);
        }
        GraphKind::Complete { n, .. } if n % 2 == 0 => {
            for t in [-1.0, -0.5, 0.5] {
                let (v, se) = empirical_mgf(&totals, exact.mean, t);
                summary.estimate(format!("mgf_t{t}"), Estimate::with_se(v, se, totals.len()));
                summary.estimate(format!("mgf_finite_t{t}"), Estimate::exact(finite_mgf_complete(n, t)?));
                summary.estimate(format!("mgf_limit_t{t}"), Estimate::exact(limit_mgf_complete(t)?));
            }
        }
        GraphKind::Complete { .. } => {}
    }
    Ok(RunOutput {
        provenance: provenance("simulate-cost", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}

fn typical_cost(a: &args::TypicalCost) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    if a.kind != Kind::Bipartite {
        return Err(usage("typical-cost is defined for --kind bipartite only"));
    }
    check_engine(a.engine, Engine::Exact, "typical-cost")?;
    GraphKind::Bipartite(a.n).validate()?;
    let family = StreamFamily::new(a.common.seed, tags::TYPICAL_COST);
    let draws = par_map(a.reps, |k| typical_cost_sample(a.n, &mut family.stream(k)))?;

    let mut table = Table::new(&["replicate", "n", "scaled_cost"]);
    for (k, &x) in draws.iter().enumerate() {
        table.push(vec![k.into(), a.n.into(), x.into()]);
    }
    let mut summary = Summary::default();
    let ecdf = Ecdf::new(&draws)?;
    let sorted = ecdf.sorted();
    summary.estimate("median", Estimate::exact(sorted[(sorted.len() - 1) / 2]));
    summary.estimate("reference_median", Estimate::exact(1.0));
    let d = ks_one_sample(&draws, cdf_w)?;
    summary.estimate("ks_distance", Estimate::exact(d));
    summary.verdict("ks_below_0.02", d, "< 0.02", d < 0.02);
    Ok(RunOutput {
        provenance: provenance("typical-cost", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}

fn rank(a: &args::Rank) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    check_engine(a.engine, Engine::FullGraph, "rank")?;
    let kind = graph_kind(a.kind, a.n, true);
    skeleton(kind)?;
    let family = StreamFamily::new(a.common.seed, tags::RANK);
    let ranks = par_map(a.reps, |k| crate::experiments::vertex_ranks(kind, &mut family.stream(k)))?;

    let mut table = Table::new(&["replicate", "n", "vertex", "rank"]);
    let mut fractions = Vec::with_capacity(ranks.len());
    for (k, rs) in ranks.iter().enumerate() {
        for (v, &r) in rs.iter().enumerate() {
            table.push(vec![k.into(), a.n.into(), v.into(), rank_cell(r)]);
        }
        fractions.push(rs.iter().filter(|&&r| r == Some(1)).count() as f64 / rs.len() as f64);
    }
    // Vertices of one graph are dependent; the standard error comes from
    // the spread of per-replicate fractions.
    let (p, se) = mean_se(&fractions);
    let mut summary = Summary::default();
    summary.estimate("p_rank_one", Estimate::with_se(p, se, fractions.len()));
    summary.estimate("reference_p_rank_one", Estimate::exact(rank_one_probability()));
    let gap = (p - 0.596).abs();
    summary.verdict("p_rank_one_within_0.02", gap, "|p - 0.596| <= 0.02", gap <= 0.02);
    Ok(RunOutput {
        provenance: provenance("rank", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}

fn pwit_rank(a: &args::PwitRank) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    if a.j_max == 0 || a.r_max == 0 {
        return Err(usage("--j-max and --r-max must be at least 1"));
    }
    if a.reference_reps < 2 {
        return Err(usage("--reference-reps must be at least 2"));
    }
    let family = StreamFamily::new(a.common.seed, tags::PWIT_RANK);
    let ranks = par_map(a.reps, |k| Ok(sample_limit_rank(&mut family.stream(k), a.j_max)))?;

    let mut table = Table::new(&["replicate", "rank"]);
    for (k, &r) in ranks.iter().enumerate() {
        table.push(vec![k.into(), rank_cell(r)]);
    }
    let mut summary = Summary::default();
    let trials = ranks.len();
    let p1 = Proportion::new(ranks.iter().filter(|&&r| r == Some(1)).count(), trials);
    let exact = rank_one_probability();
    summary.estimate("p_rank_one", proportion(p1));
    summary.estimate("reference_p_rank_one", Estimate::exact(exact));
    let gap = (p1.value() - exact).abs();
    summary.verdict("p_rank_one_within_0.005", gap, "|p - e E1(1)| <= 0.005", gap <= 0.005);
    summary.estimate(
        "unresolved",
        Estimate::exact(ranks.iter().filter(|r| r.is_none()).count() as f64),
    );
    for r in [10u64, 20] {
        let ge = Proportion::new(ranks.iter().filter(|x| x.is_none_or(|x| x >= r)).count(), trials);
        let scaled = r as f64 * ge.value();
        summary.estimate(
            format!("r_times_p_ge_r{r}"),
            Estimate::with_se(scaled, r as f64 * ge.se(), trials),
        );
        summary.verdict(
            format!("r_times_p_ge_r{r}_in_band"),
            scaled,
            "in [0.75, 1.30]",
            (0.75..=1.30).contains(&scaled),
        );
    }
    let reference = rank_reference(
        a.r_max,
        a.reference_reps,
        &mut StreamFamily::new(a.common.seed, tags::PWIT_REFERENCE).stream(0),
    )?;
    let count = reference.reps as usize;
    for row in &reference.rows {
        let r = row.r;
        summary.estimate(format!("reference_p_ge_r{r:02}"), Estimate::with_se(row.p_ge, row.se_ge, count));
        summary.estimate(format!("reference_p_gt_r{r:02}"), Estimate::with_se(row.p_gt, row.se_gt, count));
        summary.estimate(
            format!("reference_inverse_arrival_r{r:02}"),
            Estimate::with_se(row.inverse_arrival, row.se_inverse_arrival, count),
        );
    }
    Ok(RunOutput {
        provenance: provenance("pwit-rank", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}

fn pwit_tree(a: &args::PwitTree) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    if !(a.s > 0.0 && a.s.is_finite()) {
        return Err(usage("--s must be positive and finite"));
    }
    if a.node_cap == 0 {
        return Err(usage("--node-cap must be at least 1"));
    }
    let family = StreamFamily::new(a.common.seed, tags::PWIT_TREE);
    let samples = par_map(a.reps, |k| Ok(tree_sample(a.s, a.node_cap, &mut family.stream(k))?.1))?;

    let mut table = Table::new(&["replicate", "s", "size", "capped"]);
    for (k, t) in samples.iter().enumerate() {
        table.push(vec![k.into(), a.s.into(), t.size.into(), t.capped.into()]);
    }

    let mut summary = Summary::default();
    let uncapped: Vec<_> = samples.iter().filter(|t| !t.capped).collect();
    summary.estimate(
        "capped_fraction",
        proportion(Proportion::new(samples.len() - uncapped.len(), samples.len())),
    );
    if !uncapped.is_empty() {
        let sizes: Vec<f64> = uncapped.iter().map(|t| t.size as f64).collect();
        let (mean, se) = mean_se(&sizes);
        summary.estimate("mean_size", Estimate::with_se(mean, se, sizes.len()));
        summary.estimate("reference_mean_size", Estimate::exact(a.s.exp()));
        within_3se(&mut summary, "mean_size_matches", mean, se, a.s.exp());
        let mut factorial = 1.0;
        for k in 1..=4usize {
            factorial *= k as f64;
            let counts: Vec<f64> =
                uncapped.iter().map(|t| t.depth_counts.get(k).copied().unwrap_or(0) as f64).collect();
            let (mean, se) = mean_se(&counts);
            let reference = a.s.powi(k as i32) / factorial;
            summary.estimate(format!("mean_depth_{k}_count"), Estimate::with_se(mean, se, counts.len()));
            summary.estimate(format!("reference_depth_{k}_count"), Estimate::exact(reference));
            within_3se(&mut summary, &format!("depth_{k}_count_matches"), mean, se, reference);
        }

        let roots: Vec<_> = uncapped.iter().filter_map(|t| t.root).collect();
        let costs: Vec<f64> = roots.iter().map(|r| r.cost).collect();
        let trials = roots.len();
        let unmatched = Proportion::new(roots.iter().filter(|r| !r.matched()).count(), trials);
        summary.estimate("root_unmatched", proportion(unmatched));
        summary.estimate("reference_root_unmatched", Estimate::exact(1.0 / (1.0 + a.s)));
        let hi = a.s.min(5.0);
        let d = Ecdf::new(&costs)?.sup_distance_on(cdf_w, 0.0, hi);
        summary.estimate(format!("root_cost_sup_distance_0_to_{hi}"), Estimate::exact(d));
        let rank_one = Proportion::new(roots.iter().filter(|r| r.rank == Some(1)).count(), trials);
        summary.estimate("root_rank_one", proportion(rank_one));
    }

    let mut extra = Vec::new();
    let prov = provenance("pwit-tree", &a.common, a);
    if let Some(path) = &a.dump_tree {
        let (tree, _) = tree_sample(a.s, a.node_cap, &mut family.stream(0))?;
        let order = tree.preorder();
        let mut position = vec![0usize; tree.len()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let mut dump = Table::new(&["parent", "cost"]);
        for &v in &order {
            let parent = match tree.parent(v) {
                Some(p) => Cell::Int(position[p] as i64),
                None => Cell::Int(-1),
            };
            dump.push(vec![parent, tree.cost(v).into()]);
        }
        extra.push((path.clone(), dump.render(&prov)));
    }
    Ok(RunOutput {
        provenance: prov,
        table,
        summary,
        extra,
        report: None,
    })
}

fn eps_key(eps: f64) -> String {
    format!("{eps}")
}

fn overlap(a: &args::Overlap) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    check_engine(a.engine, Engine::FullGraph, "overlap")?;
    check_eps(&a.eps)?;
    WeightedGraph::bipartite(a.n)?;
    let family = StreamFamily::new(a.common.seed, tags::OVERLAP);
    let rows = par_map(a.reps, |k| overlap_replicate(a.n, &a.eps, &mut family.stream(k)))?;

    let mut table = Table::new(&["replicate", "n", "eps", "overlap", "c0", "ceps"]);
    for (k, rs) in rows.iter().enumerate() {
        for (&eps, r) in a.eps.iter().zip(rs) {
            table.push(vec![k.into(), a.n.into(), eps.into(), r.overlap.into(), r.c0.into(), r.ceps.into()]);
        }
    }

    let mut summary = Summary::default();
    let mut points = Vec::new();
    for (i, &eps) in a.eps.iter().enumerate() {
        let values: Vec<f64> = rows.iter().map(|rs| rs[i].overlap).collect();
        let (mean, se) = mean_se(&values);
        summary.estimate(format!("mean_overlap_eps{}", eps_key(eps)), Estimate::with_se(mean, se, values.len()));
        if eps > 0.0 && eps < 1.0 {
            summary.estimate(
                format!("implied_constant_eps{}", eps_key(eps)),
                Estimate::exact((1.0 / eps).ln() * (1.0 - mean)),
            );
        }
        if eps == 0.0 {
            let exact = values.iter().all(|&v| v == 1.0);
            summary.verdict("overlap_one_at_eps0", mean, "every replicate = 1", exact);
        }
        points.push((eps, mean, se));
    }
    points.sort_by(|x, y| x.0.total_cmp(&y.0));
    if points.len() >= 2 {
        let series: Vec<(f64, f64)> = points.iter().map(|p| (p.1, p.2)).collect();
        let worst = worst_trend_step(&series, false);
        summary.verdict("overlap_decreasing_in_eps", worst, "max increase / se < 3", worst < 3.0);
    }
    Ok(RunOutput {
        provenance: provenance("overlap", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}

fn tail(a: &args::Tail) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    check_engine(a.engine, Engine::FullGraph, "tail")?;
    check_eps(&[a.eps])?;
    check_n_grid(&a.n, a.reps)?;
    if a.m == 0 || a.n.iter().any(|&n| a.m > n) {
        return Err(usage("--m must be between 1 and every n of the grid"));
    }
    let family = StreamFamily::new(a.common.seed, tags::TAIL);
    let mut table =
        Table::new(&["replicate", "n", "m", "eps", "edges_survived", "vertex_disjoint", "edge_disjoint"]);
    let mut summary = Summary::default();
    let mut disjoint = Vec::new();
    let mut survived = Vec::new();
    for &n in &a.n {
        let outcomes = par_map(a.reps, |k| tail_replicate(n, a.m, a.eps, &mut grid_stream(family, n, k)))?;
        for (k, o) in outcomes.iter().enumerate() {
            table.push(vec![
                k.into(),
                n.into(),
                a.m.into(),
                a.eps.into(),
                o.edges_survived.into(),
                o.vertex_disjoint.into(),
                o.edge_disjoint.into(),
            ]);
        }
        let s = stablematch_core::perturbation::summarize_tail(&outcomes, a.m);
        summary.estimate(format!("none_survive_n{n}"), proportion(s.none_survive));
        summary.estimate(format!("all_survive_n{n}"), proportion(s.all_survive));
        summary.estimate(format!("vertex_disjoint_n{n}"), proportion(s.vertex_disjoint));
        summary.estimate(format!("edge_disjoint_n{n}"), proportion(s.edge_disjoint));
        disjoint.push((n, s.vertex_disjoint.value(), s.vertex_disjoint.se()));
        survived.push((n, s.all_survive.value(), s.all_survive.se()));
    }
    if a.n.len() >= 2 {
        for (name, points, increasing) in [
            ("vertex_disjoint_nondecreasing_in_n", &mut disjoint, true),
            ("survival_nonincreasing_in_n", &mut survived, false),
        ] {
            points.sort_by_key(|p| p.0);
            let series: Vec<(f64, f64)> = points.iter().map(|p| (p.1, p.2)).collect();
            let worst = worst_trend_step(&series, increasing);
            summary.verdict(name, worst, "max step against trend / se < 3", worst < 3.0);
        }
    }
    Ok(RunOutput {
        provenance: provenance("tail", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}

fn noise_corr(a: &args::NoiseCorr) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    check_engine(a.engine, Engine::FullGraph, "noise-corr")?;
    check_eps(&a.eps)?;
    check_n_grid(&a.n, a.reps)?;
    let family = StreamFamily::new(a.common.seed, tags::NOISE_CORR);
    let mut table = Table::new(&["replicate", "n", "eps", "c0", "ceps"]);
    let mut summary = Summary::default();
    // (n, eps, estimate) for the trend verdicts.
    let mut estimates = Vec::new();
    for &n in &a.n {
        let rows: Vec<Vec<OverlapRow>> =
            par_map(a.reps, |k| overlap_replicate(n, &a.eps, &mut grid_stream(family, n, k)))?;
        for (k, rs) in rows.iter().enumerate() {
            for (&eps, r) in a.eps.iter().zip(rs) {
                table.push(vec![k.into(), n.into(), eps.into(), r.c0.into(), r.ceps.into()]);
            }
        }
        for (i, &eps) in a.eps.iter().enumerate() {
            let pairs: Vec<(f64, f64)> = rows.iter().map(|rs| (rs[i].c0, rs[i].ceps)).collect();
            let key = format!("corr_n{n}_eps{}", eps_key(eps));
            match pearson_corr_ci(&pairs) {
                Ok(c) => {
                    summary.estimate(&key, Estimate::with_ci(c.correlation, c.ci, c.count));
                    estimates.push((n, eps, c));
                }
                Err(e) => summary.notes.push(format!("{key}: {e}")),
            }
        }
    }
    for &(n, eps, c) in &estimates {
        if eps == 0.0 {
            summary.verdict(format!("corr_one_n{n}_eps0"), c.correlation, "= 1", c.correlation == 1.0);
        } else if eps == 1.0 {
            summary.verdict(format!("ci_covers_zero_n{n}_eps1"), c.correlation, "0 in 95% CI", c.covers(0.0));
        }
    }
    let mut interior: Vec<f64> = a.eps.iter().copied().filter(|&e| e > 0.0 && e < 1.0).collect();
    interior.dedup();
    for eps in interior {
        let mut along: Vec<_> = estimates.iter().filter(|x| x.1 == eps).collect();
        along.sort_by_key(|x| x.0);
        if along.len() < 2 {
            continue;
        }
        let ok = along
            .windows(2)
            .all(|w| w[1].2.correlation <= w[0].2.correlation || w[1].2.ci.0 <= w[0].2.ci.1);
        let last = along.last().map_or(f64::NAN, |x| x.2.correlation);
        summary.verdict(
            format!("corr_decreasing_in_n_eps{}", eps_key(eps)),
            last,
            "each step decreases or the 95% CIs overlap",
            ok,
        );
    }
    Ok(RunOutput {
        provenance: provenance("noise-corr", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}

fn interlacing(a: &args::Interlacing) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    if a.n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    let kind = graph_kind(a.kind, a.n, true);
    skeleton(kind)?;
    let family = StreamFamily::new(a.common.seed, tags::INTERLACING);
    let violations =
        par_map(a.reps, |k| crate::experiments::interlacing_violations(kind, &mut family.stream(k)))?;

    let mut table = Table::new(&["replicate", "n", "vertex", "violations"]);
    let (mut checked, mut clean, mut total) = (0, 0, 0);
    for (k, vs) in violations.iter().enumerate() {
        for (u, &v) in vs.iter().enumerate() {
            table.push(vec![k.into(), a.n.into(), u.into(), v.into()]);
            checked += 1;
            clean += (v == 0) as usize;
            total += v;
        }
    }
    let mut summary = Summary::default();
    summary.estimate("violation_free_fraction", proportion(Proportion::new(clean, checked)));
    summary.verdict("interlacing_holds", total as f64, "no violations", total == 0);
    Ok(RunOutput {
        provenance: provenance("interlacing", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}

fn oracle(a: &args::Oracle) -> Result<RunOutput, CliError> {
    check_reps(a.reps)?;
    let kind = graph_kind(a.kind, a.n, true);
    skeleton(kind)?;
    let family = StreamFamily::new(a.common.seed, tags::ORACLE);
    let outcomes = par_map(a.reps, |k| crate::experiments::oracle_check(kind, &mut family.stream(k)))?;

    let mut table = Table::new(&["replicate", "n", "kind", "stable_count", "equals_greedy"]);
    for (k, o) in outcomes.iter().enumerate() {
        table.push(vec![
            k.into(),
            a.n.into(),
            a.kind.name().into(),
            o.stable_count.into(),
            o.equals_greedy.into(),
        ]);
    }
    let good = outcomes.iter().filter(|o| o.equals_greedy).count();
    let unique = Proportion::new(good, outcomes.len());
    let mut summary = Summary::default();
    summary.estimate("unique_and_greedy_fraction", proportion(unique));
    summary.verdict("unique_and_greedy", unique.value(), "= 1", good == outcomes.len());
    Ok(RunOutput {
        provenance: provenance("oracle", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}

fn dump_graph(a: &args::DumpGraph) -> Result<RunOutput, CliError> {
    let kind = graph_kind(a.kind, a.n, true);
    let scale = match a.scale {
        Scale::Unit => CostScale::UnitMean,
        Scale::MeanN => CostScale::MeanN,
    };
    let mut rng = StreamFamily::new(a.common.seed, tags::DUMP_GRAPH).stream(0);
    let g = sampled_graph(kind, scale, &mut rng)?;
    let run = greedy_stable_matching(&g)?;

    let mut table = Table::new(&["u", "v", "cost", "in_matching"]);
    let costs = g.costs()?;
    g.for_each_edge(|e, u, v| {
        let in_matching = run.matching.edge_of(u) == Some(e);
        table.push(vec![u.into(), v.into(), costs[e].into(), in_matching.into()]);
    });
    let mut summary = Summary::default();
    summary.estimate("total_cost", Estimate::exact(run.total_cost()));
    summary.estimate("matching_size", Estimate::exact(run.matching.len() as f64));
    Ok(RunOutput {
        provenance: provenance("dump-graph", &a.common, a),
        table,
        summary,
        extra: Vec::new(),
        report: None,
    })
}
