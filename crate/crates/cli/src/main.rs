use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::bail;
use clap::{Args, Parser, Subcommand};
use hyperseed::io::{read_seed_ids, write_result};
use hyperseed::{
    label_propagation, Backend, Dataset, DatasetPaths, ErrorKind, InfluenceModel, NodeId, Param,
    ResultDocument, SelectionConfig, TransitionMatrix,
};

#[derive(Parser)]
#[command(
    name = "hyperseed",
    version,
    about = "Budgeted seed selection on hypergraphs"
)]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a seed set and write the result document.
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Use the non-lazy reference greedy.
        #[arg(long)]
        naive: bool,
        /// Result document path.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print dataset and model statistics.
    Stats {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Score a seed set with label propagation.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        /// Result document or file with one node id per line.
        #[arg(long)]
        seeds: PathBuf,
        /// Label propagation steps.
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = Backend::Hoi)]
        backend: Backend,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Hyperedge list, one hyperedge per line.
    #[arg(long)]
    edges: PathBuf,
    /// Node features, `id,x1,x2,...` per line.
    #[arg(long)]
    features: PathBuf,
    /// Features are `id idx:value ...` lines.
    #[arg(long)]
    sparse_features: bool,
    /// Node labels, `id,class` per line.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// JSON `{"train": [...], "test": [...]}`.
    #[arg(long)]
    splits: Option<PathBuf>,
    /// Declared node ids, one per line.
    #[arg(long)]
    nodes: Option<PathBuf>,
}

impl DataArgs {
    fn load(&self) -> hyperseed::Result<Dataset> {
        Dataset::load(&DatasetPaths {
            hyperedges: self.edges.clone(),
            features: self.features.clone(),
            labels: self.labels.clone(),
            splits: self.splits.clone(),
            nodes: self.nodes.clone(),
            sparse_features: self.sparse_features,
        })
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 10)]
    budget: usize,
    /// Propagation steps.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Activation threshold, or `auto`.
    #[arg(long, default_value = "auto")]
    theta: Param,
    #[arg(long, default_value_t = 0.95)]
    theta_quantile: f64,
    /// Feature ball radius, or `auto`.
    #[arg(long, default_value = "auto")]
    radius: Param,
    #[arg(long, default_value_t = 0.05)]
    radius_quantile: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Weight of the coverage term against the diffusion term.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = Backend::Hoi)]
    backend: Backend,
    /// Restrict candidates to the train split.
    #[arg(long)]
    train_split: bool,
    /// Seed for distance sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    distance_samples: usize,
}

impl ModelArgs {
    fn config(&self, ds: &Dataset) -> anyhow::Result<SelectionConfig> {
        let candidate_pool = if self.train_split {
            let splits = ds.splits.as_ref().ok_or_else(|| {
                hyperseed::Error::MissingData("--train-split needs --splits".into())
            })?;
            Some(splits.train.clone())
        } else {
            None
        };
        Ok(SelectionConfig {
            budget: self.budget,
            k: self.k,
            alpha: self.alpha,
            theta: self.theta,
            theta_quantile: self.theta_quantile,
            radius: self.radius,
            radius_quantile: self.radius_quantile,
            beta: self.beta,
            gamma: self.gamma,
            backend: self.backend,
            candidate_pool,
            seed: self.seed,
            distance_samples: self.distance_samples,
        })
    }
}

fn select(
    data: &DataArgs,
    model: &ModelArgs,
    naive: bool,
    output: Option<&PathBuf>,
) -> anyhow::Result<()> {
    let start = Instant::now();
    let ds = data.load()?;
    let config = model.config(&ds)?;
    let built = InfluenceModel::build(ds.hypergraph.clone(), &ds.features, &config)?;
    let result = if naive {
        built.select_naive()?
    } else {
        built.select_lazy()?
    };
    let doc = ResultDocument::new(&result, &config, &ds.id_map);
    if let Some(path) = output {
        write_result(&doc, path)?;
    }
    let last = result.trace.last().expect("budget is at least 1");
    println!("budget     {}", config.budget);
    println!("seeds      {}", doc.seeds.join(" "));
    println!("objective  {}", last.objective);
    println!("moi        {}", last.moi);
    println!("edv        {}", last.edv);
    println!("wall time  {:.3}s", start.elapsed().as_secs_f64());
    Ok(())
}

fn summary(values: impl IntoIterator<Item = usize>) -> String {
    let v: Vec<usize> = values.into_iter().collect();
    if v.is_empty() {
        return "none".into();
    }
    let sum: usize = v.iter().sum();
    format!(
        "min {} mean {:.3} max {}",
        v.iter().min().unwrap(),
        sum as f64 / v.len() as f64,
        v.iter().max().unwrap()
    )
}

fn stats(data: &DataArgs, model: &ModelArgs) -> anyhow::Result<()> {
    let ds = data.load()?;
    let mut config = model.config(&ds)?;
    config.budget = 1;
    let g = &ds.hypergraph;
    println!("nodes               {}", g.num_nodes());
    println!("hyperedges          {}", g.num_edges());
    println!("feature dims        {}", ds.features.cols());
    println!("node degree         {}", summary(g.node_degrees()));
    println!("hyperedge size      {}", summary(g.edge_degrees()));
    println!(
        "isolated nodes      {}",
        g.node_degrees().iter().filter(|&&d| d == 0).count()
    );
    let built = InfluenceModel::build(ds.hypergraph.clone(), &ds.features, &config)?;
    println!("theta               {}", built.theta());
    println!("radius              {}", built.radius());
    let sizes: Vec<usize> = built
        .pool
        .iter()
        .map(|&u| built.activations.get(u).map_or(0, <[NodeId]>::len))
        .collect();
    let empty = sizes.iter().filter(|&&s| s == 0).count();
    println!("activation set size {}", summary(sizes.iter().copied()));
    println!("empty activation    {empty}/{}", sizes.len());
    println!(
        "feature ball size   {}",
        summary((0..g.num_nodes()).map(|u| built.balls.ball(u).len()))
    );
    Ok(())
}

fn evaluate(
    data: &DataArgs,
    seeds: &Path,
    steps: usize,
    alpha: f64,
    backend: Backend,
) -> anyhow::Result<()> {
    let ds = data.load()?;
    let labels = ds
        .labels
        .as_ref()
        .ok_or_else(|| hyperseed::Error::MissingData("evaluation needs --labels".into()))?;
    let ids = read_seed_ids(seeds)?;
    if ids.is_empty() {
        bail!(hyperseed::Error::MissingData(format!(
            "{}: no seeds",
            seeds.display()
        )));
    }
    let seed_nodes = ids
        .iter()
        .map(|id| {
            ds.id_map
                .dense(id)
                .ok_or_else(|| hyperseed::Error::MissingData(format!("unknown seed id `{id}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let eval_nodes: Vec<NodeId> = match &ds.splits {
        Some(s) if !s.test.is_empty() => s.test.clone(),
        _ => {
            let mut all: Vec<NodeId> = (0..ds.hypergraph.num_nodes()).collect();
            all.retain(|v| !seed_nodes.contains(v));
            if all.is_empty() {
                all = seed_nodes.clone();
            }
            all
        }
    };
    let t = TransitionMatrix::build(&ds.hypergraph, backend);
    let report = label_propagation(
        &t,
        labels,
        ds.classes.len(),
        &seed_nodes,
        &eval_nodes,
        steps,
        alpha,
    )?;
    println!("seeds       {}", seed_nodes.len());
    println!("eval nodes  {}", eval_nodes.len());
    println!("reached     {}", report.reached);
    println!("accuracy    {:.4}", report.accuracy);
    println!("train fit   {:.4}", report.train_fit);
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err
        .downcast_ref::<hyperseed::Error>()
        .map(hyperseed::Error::kind)
    {
        Some(ErrorKind::Parse) => 3,
        Some(ErrorKind::Data) => 4,
        Some(ErrorKind::Config) => 5,
        Some(ErrorKind::Io) => 6,
        None => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("could not size thread pool: {e}");
        }
    }
    let outcome = match &cli.command {
        Command::Select {
            data,
            model,
            naive,
            output,
        } => select(data, model, *naive, output.as_ref()),
        Command::Stats { data, model } => stats(data, model),
        Command::Evaluate {
            data,
            seeds,
            steps,
            alpha,
            backend,
        } => evaluate(data, seeds, *steps, *alpha, *backend),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
