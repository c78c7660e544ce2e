use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use gridiron_core::annotation::{cohen_kappa, evaluate, format_spans, load_dictionaries, load_spans, DictionaryAnnotator, MatchMode};
use gridiron_core::classifier::{evaluate_classifier, gradient_check, Activation, NetworkConfig, PlayerState};
use gridiron_core::config::PipelineConfig;
use gridiron_core::corpus::{build_query_plan, execute_with_broadening, week_window};
use gridiron_core::distribution::{curve, fit_best, format_fit_record, percentiles, registry, simulate, BAND, CURVE_POINTS, MIN_SAMPLE};
use gridiron_core::embedding::{analogy, keyword_neighbors, EmbeddingTable};
use gridiron_core::insights::{format_feature_rows, format_insights, parse_feature_rows, FeatureRow};
use gridiron_core::labeling::{format_labels, generate_labels, parse_injuries, parse_stats, player_sigmas};
use gridiron_core::pipeline::{classifier_dataset, projection_rows, train_state_classifier, train_tables, training_cutoff};
use gridiron_core::projection::{fit_ensemble, format_training_rows, parse_training_rows, rmse, TrainingRow};
use gridiron_core::roster::format_roster;
use gridiron_core::synth::{generate_world, WorldConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::api;
use crate::artifacts::{self, feature_context, load_engine, read_text, write_atomic, DataDir, SnapshotDir};
use crate::snapshot::{Snapshot, SnapshotHandle};

#[derive(Debug, Parser)]
#[command(name = "gridiron", version, about = "Fantasy football text-to-projection pipeline")]
pub struct Cli {
    /// Overrides the configured seed for every randomized stage.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Flat key = value pipeline parameters.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Where stages read and write trained artifacts.
    #[arg(long, global = true, default_value = "snapshot")]
    pub snapshot_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Document store ingestion and retrieval.
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Dictionary annotation and agreement scoring.
    #[command(subcommand)]
    Annotate(AnnotateCmd),
    /// Word embedding training and similarity queries.
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// Boom, bust, injury and meaningful labels from weekly stats.
    #[command(subcommand)]
    Labels(LabelsCmd),
    /// Per-player-week feature vectors.
    #[command(subcommand)]
    Features(FeaturesCmd),
    /// State classifiers.
    #[command(subcommand)]
    Dnn(DnnCmd),
    /// Per-position projection regression.
    #[command(subcommand)]
    Project(ProjectCmd),
    /// Score distribution fitting and simulation.
    #[command(subcommand)]
    Dist(DistCmd),
    /// Player insight generation.
    #[command(subcommand)]
    Insight(InsightCmd),
    /// Serve the snapshot over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
    /// Synthetic worlds.
    #[command(subcommand)]
    Synth(SynthCmd),
}

#[derive(Debug, Clone, Args)]
pub struct DataArg {
    /// Directory laid out like `synth generate` output.
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum CorpusCmd {
    /// Add newline-delimited document files to the snapshot store.
    Ingest {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Run a broadening query for one player-week.
    Query {
        #[arg(long)]
        player: String,
        #[arg(long, default_value = "")]
        team: String,
        /// Comma-separated league terms; defaults to the configured ones.
        #[arg(long, value_delimiter = ',')]
        terms: Option<Vec<String>>,
        #[arg(long)]
        week: u32,
        #[arg(long)]
        season_start: Option<NaiveDate>,
        #[arg(long)]
        min_results: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AnnotateCmd {
    /// Annotate every stored document with dictionary matches.
    Run {
        #[arg(long)]
        dictionaries: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Token-level Cohen's kappa between two span files.
    Kappa {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Precision, recall and F1 of predicted spans against gold.
    Score {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value = "exact")]
        mode: MatchMode,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TableChoice {
    Encyclopedia,
    Broad,
}

#[derive(Debug, Subcommand)]
pub enum EmbedCmd {
    /// Train the encyclopedia and broad tables.
    Train {
        #[command(flatten)]
        data: DataArg,
    },
    /// Terms closest to b - a + c.
    Analogy {
        a: String,
        b: String,
        c: String,
        #[arg(long, value_enum, default_value = "encyclopedia")]
        table: TableChoice,
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Terms closest to one term.
    Neighbors {
        term: String,
        #[arg(long, value_enum, default_value = "broad")]
        table: TableChoice,
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Mean summary embedding for one player-week.
    PlayerVector {
        #[command(flatten)]
        data: DataArg,
        #[arg(long)]
        player: String,
        #[arg(long)]
        week: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum LabelsCmd {
    Generate {
        #[arg(long)]
        stats: PathBuf,
        #[arg(long)]
        injuries: PathBuf,
        /// Prior-season stats for per-player deviations.
        #[arg(long)]
        history: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FeaturesCmd {
    /// Features for every player-week in the stats file.
    Build {
        #[command(flatten)]
        data: DataArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum DnnCmd {
    /// Train one state classifier on weeks before the holdout.
    Train {
        #[arg(long)]
        state: PlayerState,
    },
    /// Confusion metrics on the held-out weeks.
    Eval {
        #[arg(long)]
        state: PlayerState,
    },
    /// Probabilities for every feature row.
    Predict {
        #[arg(long)]
        state: PlayerState,
    },
    /// Analytic versus numeric gradients on random data.
    Gradcheck {
        #[arg(long, default_value_t = 6)]
        branches: usize,
        #[arg(long, default_value_t = 1)]
        branch_depth: usize,
        #[arg(long, default_value_t = 4)]
        branch_width: usize,
        #[arg(long, default_value_t = 1)]
        trunk_depth: usize,
        #[arg(long, default_value_t = 4)]
        trunk_width: usize,
        #[arg(long, default_value_t = 5)]
        inputs: usize,
        #[arg(long, default_value_t = 8)]
        rows: usize,
        #[arg(long, default_value = "tanh")]
        activation: Activation,
        /// Exit nonzero when the error exceeds this.
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProjectCmd {
    /// Fit the per-position ensemble on classifier outputs.
    Fit {
        #[command(flatten)]
        data: DataArg,
    },
    /// Combined projections for projection rows.
    Predict {
        #[arg(long)]
        rows: Option<PathBuf>,
    },
    /// Held-out RMSE of the combined and baseline projections.
    Rmse {
        #[arg(long)]
        rows: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ValuesArg {
    /// Numbers separated by newlines or commas.
    #[arg(long)]
    pub values: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum DistCmd {
    /// Best-fitting family and the simulated 15th/85th percentiles.
    Fit {
        #[command(flatten)]
        values: ValuesArg,
        #[arg(long, default_value = "sample")]
        player: String,
    },
    Simulate {
        #[command(flatten)]
        values: ValuesArg,
        #[arg(short, long)]
        n: Option<usize>,
    },
    /// Evenly spaced density points of the best fit.
    Curve {
        #[command(flatten)]
        values: ValuesArg,
        #[arg(long, default_value_t = CURVE_POINTS)]
        points: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum InsightCmd {
    /// Insights for every rostered player in the given weeks.
    Build {
        #[command(flatten)]
        data: DataArg,
        /// Repeatable; defaults to the last week in the stats file.
        #[arg(long)]
        week: Vec<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SynthCmd {
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        players: Option<usize>,
        #[arg(long)]
        teams: Option<usize>,
        #[arg(long)]
        weeks: Option<u32>,
        #[arg(long)]
        boom_rate: Option<f64>,
    },
}

/// Parses `args` and runs the command. Help and version exit 0; usage
/// errors exit 2; failures print a diagnostic and exit 1.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

impl Cli {
    pub fn pipeline_config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p).with_context(|| format!("loading config {}", p.display()))?,
            None => PipelineConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

/// Runs one command and returns what it prints on stdout.
pub fn run(cli: Cli) -> Result<String> {
    let snap = SnapshotDir(cli.snapshot_dir.clone());
    match &cli.command {
        Command::Corpus(c) => corpus(&cli, &snap, c),
        Command::Annotate(c) => annotate(&snap, c),
        Command::Embed(c) => embed(&cli, &snap, c),
        Command::Labels(c) => labels(&cli, &snap, c),
        Command::Features(FeaturesCmd::Build { data }) => {
            let cfg = cli.pipeline_config()?;
            let data = DataDir(data.data.clone());
            let ctx = feature_context(&cfg, &snap, &data)?;
            let keys: Vec<(String, u32)> = data.stats()?.iter().map(|s| (s.player_id.clone(), s.week)).collect();
            let rows = ctx.feature_rows(&keys)?;
            write_atomic(&snap.file(artifacts::FEATURES), format_feature_rows(&rows)?)?;
            Ok(format!("{} feature rows of dimension {}\n", rows.len(), ctx.feature_dim()))
        }
        Command::Dnn(c) => dnn(&cli, &snap, c),
        Command::Project(c) => project(&cli, &snap, c),
        Command::Dist(c) => dist(&cli, c),
        Command::Insight(InsightCmd::Build { data, week }) => {
            let cfg = cli.pipeline_config()?;
            let data = DataDir(data.data.clone());
            let engine = load_engine(&cfg, &snap, &data)?;
            let weeks: Vec<u32> = if week.is_empty() {
                vec![data.stats()?.iter().map(|s| s.week).max().context("stats file is empty")?]
            } else {
                week.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
            };
            let roster = data.roster()?;
            let mut insights = Vec::new();
            for w in &weeks {
                for b in &roster {
                    let i = engine
                        .build_insight(&b.player_id, *w)
                        .with_context(|| format!("insight for {} week {w}", b.player_id))?;
                    insights.push(i);
                }
            }
            write_atomic(&snap.file(artifacts::ROSTER), format_roster(&roster)?)?;
            write_atomic(&snap.file(artifacts::INSIGHTS), format_insights(&insights)?)?;
            let s = Snapshot::load(&snap.0)?;
            Ok(format!("{} insights, snapshot {}\n", insights.len(), s.version))
        }
        Command::Serve { bind } => {
            let s = Snapshot::load(&snap.0)?;
            let handle = Arc::new(SnapshotHandle::new(s));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(api::serve(handle, bind))?;
            Ok(String::new())
        }
        Command::Synth(SynthCmd::Generate {
            out,
            players,
            teams,
            weeks,
            boom_rate,
        }) => {
            let mut wc = WorldConfig::default();
            if let Some(s) = cli.seed {
                wc.seed = s;
            }
            if let Some(v) = players {
                wc.player_count = *v;
            }
            if let Some(v) = teams {
                wc.team_count = *v;
            }
            if let Some(v) = weeks {
                wc.weeks = *v;
            }
            if let Some(v) = boom_rate {
                wc.boom_rate = *v;
            }
            let world = generate_world(&wc)?;
            world.write_to(out).with_context(|| format!("writing world to {}", out.display()))?;
            Ok(format!(
                "{} players, {} documents; boom {:.3}, bust {:.3}\n",
                world.roster.len(),
                world.documents.len(),
                world.rates.boom,
                world.rates.bust
            ))
        }
    }
}

fn corpus(cli: &Cli, snap: &SnapshotDir, cmd: &CorpusCmd) -> Result<String> {
    match cmd {
        CorpusCmd::Ingest { paths } => {
            let path = snap.file(artifacts::CORPUS);
            let mut store = if path.exists() { snap.corpus()? } else { Default::default() };
            let mut out = String::new();
            for p in paths {
                let report = store.ingest_file(p).with_context(|| format!("reading {}", p.display()))?;
                for r in &report.rejected {
                    eprintln!("{}: record {} rejected: {}", p.display(), r.record, r.reason);
                }
                writeln!(out, "{}: stored {}, rejected {}", p.display(), report.stored, report.rejected.len())?;
            }
            let mut bytes = Vec::new();
            store.write_to(&mut bytes)?;
            write_atomic(&path, bytes)?;
            writeln!(out, "{} documents in store", store.len())?;
            Ok(out)
        }
        CorpusCmd::Query {
            player,
            team,
            terms,
            week,
            season_start,
            min_results,
        } => {
            let cfg = cli.pipeline_config()?;
            let terms = terms.clone().unwrap_or(cfg.league_terms.clone());
            let window = week_window(season_start.unwrap_or(cfg.season_start), *week)?;
            let plan = build_query_plan(player, team, &terms)?
                .with_time_range(&window)
                .with_min_results(min_results.unwrap_or(cfg.min_results));
            let outcome = execute_with_broadening(&plan, &snap.corpus()?)?;
            let ids: Vec<&str> = outcome.documents.iter().map(|d| d.id.as_str()).collect();
            let v = json!({
                "level": outcome.level,
                "terms": plan.levels[outcome.level],
                "threshold_met": outcome.threshold_met,
                "documents": ids,
            });
            Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
        }
    }
}

fn annotate(snap: &SnapshotDir, cmd: &AnnotateCmd) -> Result<String> {
    let store = snap.corpus()?;
    match cmd {
        AnnotateCmd::Run { dictionaries, out } => {
            let dicts = load_dictionaries(dictionaries).with_context(|| format!("loading {}", dictionaries.display()))?;
            let annotator = DictionaryAnnotator::new(&dicts);
            let spans: Vec<_> = store.documents().flat_map(|d| annotator.annotate(d)).collect();
            let path = out.clone().unwrap_or_else(|| snap.file(artifacts::SPANS));
            write_atomic(&path, format_spans(&spans))?;
            Ok(format!("{} spans over {} documents\n", spans.len(), store.len()))
        }
        AnnotateCmd::Kappa { a, b } => {
            let sa = load_spans(a, &store).with_context(|| format!("loading {}", a.display()))?;
            let sb = load_spans(b, &store).with_context(|| format!("loading {}", b.display()))?;
            let report = cohen_kappa(&sa, &sb, store.documents())?;
            Ok(format!("{}\n", serde_json::to_string_pretty(&report)?))
        }
        AnnotateCmd::Score { pred, gold, mode } => {
            let p = load_spans(pred, &store).with_context(|| format!("loading {}", pred.display()))?;
            let g = load_spans(gold, &store).with_context(|| format!("loading {}", gold.display()))?;
            Ok(format!("{}\n", serde_json::to_string_pretty(&evaluate(&p, &g, *mode))?))
        }
    }
}

fn table(snap: &SnapshotDir, which: TableChoice) -> Result<EmbeddingTable> {
    let (enc, broad) = snap.tables()?;
    Ok(match which {
        TableChoice::Encyclopedia => enc,
        TableChoice::Broad => broad,
    })
}

fn scored_lines(items: &[(String, f64)]) -> String {
    items.iter().map(|(t, s)| format!("{t}\t{s}\n")).collect()
}

fn embed(cli: &Cli, snap: &SnapshotDir, cmd: &EmbedCmd) -> Result<String> {
    match cmd {
        EmbedCmd::Train { data } => {
            let cfg = cli.pipeline_config()?;
            let data = DataDir(data.data.clone());
            let (enc, broad) = train_tables(&snap.corpus()?, &data.encyclopedia_text()?, &cfg)?;
            write_atomic(&snap.file(artifacts::ENCYCLOPEDIA_TABLE), enc.to_text())?;
            write_atomic(&snap.file(artifacts::BROAD_TABLE), broad.to_text())?;
            Ok(format!("encyclopedia {} terms, broad {} terms, dimension {}\n", enc.len(), broad.len(), broad.dimension()))
        }
        EmbedCmd::Analogy { a, b, c, table: t, top } => Ok(scored_lines(&analogy(a, b, c, &table(snap, *t)?, *top)?)),
        EmbedCmd::Neighbors { term, table: t, top } => Ok(scored_lines(&keyword_neighbors(term, &table(snap, *t)?, *top)?)),
        EmbedCmd::PlayerVector { data, player, week } => {
            let cfg = cli.pipeline_config()?;
            let ctx = feature_context(&cfg, snap, &DataDir(data.data.clone()))?;
            let d = ctx.player_week(player, *week)?;
            let v = json!({
                "player_id": player,
                "week": week,
                "doc_count": d.documents.len(),
                "embedded_docs": d.doc_embeddings.len(),
                "vector": d.player_vector,
            });
            Ok(format!("{}\n", serde_json::to_string(&v)?))
        }
    }
}

fn labels(cli: &Cli, snap: &SnapshotDir, cmd: &LabelsCmd) -> Result<String> {
    let LabelsCmd::Generate {
        stats,
        injuries,
        history,
        out,
    } = cmd;
    let cfg = cli.pipeline_config()?;
    let stats = parse_stats(&read_text(stats)?).context("parsing stats")?;
    let history = parse_stats(&read_text(history)?).context("parsing history")?;
    let injuries = parse_injuries(&read_text(injuries)?).context("parsing injuries")?;
    let labeling = generate_labels(&stats, &player_sigmas(&history), &injuries, &cfg.labels())?;
    let path = out.clone().unwrap_or_else(|| snap.file(artifacts::LABELS));
    write_atomic(&path, format_labels(&labeling.labels)?)?;
    let n = labeling.labels.len().max(1) as f64;
    let rate = |f: fn(&gridiron_core::labeling::LabelSet) -> bool| labeling.labels.iter().filter(|l| f(l)).count() as f64 / n;
    Ok(format!(
        "{} labels; boom {:.3}, bust {:.3}, injury {:.3}, meaningful {:.3}\n",
        labeling.labels.len(),
        rate(|l| l.boom),
        rate(|l| l.bust),
        rate(|l| l.play_with_injury),
        rate(|l| l.meaningful)
    ))
}

fn feature_rows(snap: &SnapshotDir) -> Result<Vec<FeatureRow>> {
    let text = read_text(&snap.file(artifacts::FEATURES)).context("run `features build` first")?;
    Ok(parse_feature_rows(&text)?)
}

fn split(rows: Vec<FeatureRow>, holdout: u32) -> (u32, Vec<FeatureRow>, Vec<FeatureRow>) {
    let cutoff = training_cutoff(rows.iter().map(|r| r.week), holdout);
    let (train, test) = rows.into_iter().partition(|r| r.week <= cutoff);
    (cutoff, train, test)
}

fn dnn(cli: &Cli, snap: &SnapshotDir, cmd: &DnnCmd) -> Result<String> {
    let cfg = cli.pipeline_config()?;
    match cmd {
        DnnCmd::Train { state } => {
            let (cutoff, train, _) = split(feature_rows(snap)?, cfg.holdout_weeks);
            let run = train_state_classifier(&cfg, &train, &snap.labels()?, *state)?;
            write_atomic(&snap.file(&artifacts::model_file(*state)), run.network.to_json()?)?;
            Ok(format!(
                "{state}: {} rows through week {cutoff}, final loss {:.5}\n",
                train.len(),
                run.loss_history.last().copied().unwrap_or(f64::NAN)
            ))
        }
        DnnCmd::Eval { state } => {
            let (_, _, test) = split(feature_rows(snap)?, cfg.holdout_weeks);
            let (x, y) = classifier_dataset(&test, &snap.labels()?, *state);
            let metrics = evaluate_classifier(&snap.classifier(*state)?, &x, &y)?;
            Ok(format!("{}\n", serde_json::to_string_pretty(&metrics)?))
        }
        DnnCmd::Predict { state } => {
            let rows = feature_rows(snap)?;
            let net = snap.classifier(*state)?;
            let x: Vec<Vec<f64>> = rows.iter().map(|r| r.features.clone()).collect();
            let p = net.predict_batch(&x)?;
            let mut out = format!("player_id,week,{state}\n");
            for (r, p) in rows.iter().zip(p) {
                writeln!(out, "{},{},{p}", r.player_id, r.week)?;
            }
            Ok(out)
        }
        DnnCmd::Gradcheck {
            branches,
            branch_depth,
            branch_width,
            trunk_depth,
            trunk_width,
            inputs,
            rows,
            activation,
            tolerance,
        } => {
            let net = NetworkConfig::uniform(*inputs, *branches, 0.0, *branch_depth, *branch_width, *trunk_depth, *trunk_width, *activation);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let x: Vec<Vec<f64>> = (0..*rows).map(|_| (0..*inputs).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let y: Vec<f64> = (0..*rows).map(|i| (i % 2) as f64).collect();
            let err = gradient_check(&net, &x, &y, cfg.seed)?;
            let out = format!("layers {}, max relative error {err:e}\n", net.total_layers());
            if let Some(t) = tolerance {
                if !(err <= *t) {
                    bail!("gradient check failed: {err:e} > {t:e}");
                }
            }
            Ok(out)
        }
    }
}

fn projection_rows_file(snap: &SnapshotDir, rows: &Option<PathBuf>) -> Result<(Vec<TrainingRow>, bool)> {
    let path = rows.clone().unwrap_or_else(|| snap.file(artifacts::PROJECTION_ROWS));
    let text = read_text(&path).context("run `project fit` first or pass --rows")?;
    Ok((parse_training_rows(&text)?, rows.is_none()))
}

fn project(cli: &Cli, snap: &SnapshotDir, cmd: &ProjectCmd) -> Result<String> {
    let cfg = cli.pipeline_config()?;
    match cmd {
        ProjectCmd::Fit { data } => {
            let data = DataDir(data.data.clone());
            let rows = feature_rows(snap)?;
            let classifiers = snap.classifiers()?;
            let all = projection_rows(&rows, &classifiers, &data.stats()?)?;
            let cutoff = training_cutoff(rows.iter().map(|r| r.week), cfg.holdout_weeks);
            let train: Vec<TrainingRow> = all.iter().filter(|r| r.input.week <= cutoff).cloned().collect();
            let ensemble = fit_ensemble(&train, cfg.feature_set)?;
            write_atomic(&snap.file(artifacts::PROJECTION_ROWS), format_training_rows(&all)?)?;
            write_atomic(&snap.file(artifacts::ENSEMBLE), ensemble.to_text())?;
            Ok(format!(
                "{} training rows through week {cutoff}; {} position models\n",
                train.len(),
                ensemble.models.len()
            ))
        }
        ProjectCmd::Predict { rows } => {
            let ensemble = snap.ensemble()?;
            let (rows, _) = projection_rows_file(snap, rows)?;
            let mut out = String::from("player_id,week,baseline,combined\n");
            for r in &rows {
                let p = ensemble.predict(&r.input)?;
                writeln!(out, "{},{},{},{}", r.input.player_id, r.input.week, r.input.baseline_projection, p.value)?;
            }
            Ok(out)
        }
        ProjectCmd::Rmse { rows } => {
            let ensemble = snap.ensemble()?;
            let (rows, from_snapshot) = projection_rows_file(snap, rows)?;
            // Snapshot rows include training weeks; score only the holdout.
            let test: Vec<TrainingRow> = if from_snapshot {
                let cutoff = training_cutoff(rows.iter().map(|r| r.input.week), cfg.holdout_weeks);
                rows.into_iter().filter(|r| r.input.week > cutoff).collect()
            } else {
                rows
            };
            let actual: Vec<f64> = test.iter().map(|r| r.actual).collect();
            let combined = test.iter().map(|r| Ok(ensemble.predict(&r.input)?.value)).collect::<Result<Vec<f64>>>()?;
            let baseline: Vec<f64> = test.iter().map(|r| r.input.baseline_projection).collect();
            let v = json!({
                "rows": test.len(),
                "combined_rmse": rmse(&combined, &actual)?,
                "baseline_rmse": rmse(&baseline, &actual)?,
            });
            Ok(format!("{}\n", serde_json::to_string_pretty(&v)?))
        }
    }
}

fn read_values(path: &Path) -> Result<Vec<f64>> {
    read_text(path)?
        .split([',', '\n', '\r', '\t', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("{}: not a number: {s:?}", path.display())))
        .collect()
}

fn dist(cli: &Cli, cmd: &DistCmd) -> Result<String> {
    let cfg = cli.pipeline_config()?;
    let fit = |values: &ValuesArg| -> Result<(Vec<f64>, gridiron_core::distribution::FitResult)> {
        let v = read_values(&values.values)?;
        let sel = fit_best(&v, &registry(), MIN_SAMPLE)?;
        Ok((v, sel.best))
    };
    match cmd {
        DistCmd::Fit { values, player } => {
            let (_, best) = fit(values)?;
            let draws = simulate(&best, cfg.simulations, cfg.seed)?;
            let band = percentiles(&draws, &BAND)?;
            Ok(format!("{}\n", format_fit_record(player, &best, band[0], band[1])))
        }
        DistCmd::Simulate { values, n } => {
            let (_, best) = fit(values)?;
            let draws = simulate(&best, n.unwrap_or(cfg.simulations), cfg.seed)?;
            Ok(draws.iter().map(|d| format!("{d}\n")).collect())
        }
        DistCmd::Curve { values, points } => {
            let (v, best) = fit(values)?;
            let mut out = String::from("x,pdf\n");
            for (x, y) in curve(&best, &v, *points)? {
                writeln!(out, "{x},{y}")?;
            }
            Ok(out)
        }
    }
}
