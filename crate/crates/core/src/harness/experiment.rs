use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coreset::{reduce, CoresetOptions, WeightedColumnSet};
use crate::css::{Algorithm, GreedyConfig, RegularConfig, Subroutine};
use crate::distributed::{partition_by_assignment, partition_contiguous, run_protocol, ProtocolConfig};
use crate::error::{CssError, Result};
use crate::harness::config::{ExperimentConfig, Mode};
use crate::harness::io::{load_matrix, read_assignment};
use crate::harness::report::{summarize, SummaryRow};
use crate::harness::synthetic::gen_synthetic;
use crate::numerics::{entrywise_lp_norm, lp_fit_error, svd_rank_k_error, ColumnMatrix, IrlsOptions, PNorm};
use crate::rng::{derive_seed, rng_from_seed};
use crate::seeds::PipelineSeeds;
use crate::sketch::PStableSketch;
use crate::streaming::{StreamingConfig, StreamingSelector, UniformStreamSampler};

/// One (algorithm, seed) cell.
///
/// `err_ratio = min_V ||A_I V − A||_p / ||A||_p`, evaluated against the full
/// input by IRLS. `words` is the peak stored words when streaming, the total
/// transmitted words when distributed, and 0 offline. Failed cells carry the
/// error in `status` and a NaN ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub seed: u64,
    pub err_ratio: f64,
    pub wall_ms: f64,
    pub words: usize,
    pub selected: usize,
    pub status: String,
}

impl MetricsRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub rows: Vec<MetricsRow>,
    pub summary: Vec<SummaryRow>,
}

/// Regression settings used for every reported error.
pub fn evaluation_irls() -> IrlsOptions {
    IrlsOptions {
        tol: 1e-8,
        max_iter: 200,
        ..IrlsOptions::default()
    }
}

pub fn load_dataset(cfg: &ExperimentConfig) -> Result<ColumnMatrix<f64>> {
    if cfg.dataset == "synthetic" {
        let n = cfg
            .synthetic_n
            .ok_or_else(|| CssError::Config("synthetic dataset needs synthetic_n".into()))?;
        gen_synthetic(n, cfg.k)
    } else {
        load_matrix(Path::new(&cfg.dataset), cfg.format, cfg.header)
    }
}

/// Column order for a seed: a shuffle when `permute` is set, else identity.
pub fn column_order(n: usize, seed: u64, permute: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if permute {
        order.shuffle(&mut rng_from_seed(derive_seed(seed, "permute", 0)));
    }
    order
}

fn subroutine(cfg: &ExperimentConfig, algorithm: Algorithm) -> Option<Subroutine> {
    match algorithm {
        Algorithm::Regular => Some(Subroutine::Regular(RegularConfig {
            t_prime: cfg.t_prime,
            compute_right_factor: false,
            ..RegularConfig::default()
        })),
        Algorithm::Greedy => Some(Subroutine::Greedy(GreedyConfig {
            delta: cfg.delta,
            compute_right_factor: false,
            parallel: !cfg.parallel,
            ..GreedyConfig::new(cfg.k)
        })),
        _ => None,
    }
}

fn streaming_config(cfg: &ExperimentConfig, seed: u64) -> StreamingConfig {
    StreamingConfig {
        batch_size: cfg.batch_size,
        coreset_size: cfg.coreset_size,
        sketch_rows: cfg.sketch_rows,
        ..StreamingConfig::new(cfg.k, cfg.p, seed)
    }
}

/// Sketch, one coreset of the whole matrix, then the subroutine. Uses the
/// pipeline seeds, so it matches a stream that fits in one batch.
pub fn offline_pipeline(
    a: &ColumnMatrix<f64>,
    global: &[usize],
    k: usize,
    p: PNorm,
    stream: &StreamingConfig,
    sub: &Subroutine,
) -> Result<Vec<usize>> {
    let seeds = PipelineSeeds::new(stream.seed);
    let sketch = PStableSketch::<f64>::new(stream.sketch_rows(a.rows()), a.rows(), p, seeds.sketch(), stream.sketch_scale)?;
    let set = WeightedColumnSet::from_columns(sketch.apply(a)?, a.clone(), global.to_vec(), p)?;
    let opts: CoresetOptions = stream.coreset_options();
    let core = reduce(set, &opts, seeds.leaf(0))?;
    let sel = sub.run(&core.sketched, k, p, seeds.select())?;
    Ok(sel.indices.iter().map(|&i| core.global_indices[i]).collect())
}

struct CellOutput {
    indices: Vec<usize>,
    words: usize,
    /// Error already computed by the protocol servers.
    err_p: Option<f64>,
}

fn select(
    a: &ColumnMatrix<f64>,
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    seed: u64,
    assignment: Option<&[usize]>,
) -> Result<CellOutput> {
    let n = a.cols();
    let order = column_order(n, seed, cfg.permute && assignment.is_none());
    let plain = |indices| CellOutput {
        indices,
        words: 0,
        err_p: None,
    };
    match (algorithm, cfg.mode) {
        (Algorithm::Svd, _) => unreachable!("svd is evaluated directly"),
        (Algorithm::Uniform, Mode::Streaming) => {
            let mut s = UniformStreamSampler::new(cfg.k, seed)?;
            for &j in &order {
                s.ingest(a.col(j));
            }
            let idx: Vec<usize> = s.kept_indices().iter().map(|&i| order[i]).collect();
            Ok(CellOutput {
                words: idx.len() * (a.rows() + 1),
                indices: idx,
                err_p: None,
            })
        }
        (Algorithm::Uniform, _) => {
            let mut rng = rng_from_seed(seed);
            Ok(plain(index::sample(&mut rng, n, cfg.k.min(n)).into_vec()))
        }
        (alg, Mode::Streaming) => {
            let sub = subroutine(cfg, alg).expect("css algorithm");
            let mut sel = StreamingSelector::new(a.rows(), streaming_config(cfg, seed))?;
            sel.ingest_all(order.iter().map(|&j| a.col(j)))?;
            let out = sel.finalize(&sub)?;
            Ok(CellOutput {
                indices: out.selection.indices.iter().map(|&i| order[i]).collect(),
                words: out.space.peak_words,
                err_p: None,
            })
        }
        (alg, Mode::Offline) => {
            let sub = subroutine(cfg, alg).expect("css algorithm");
            let permuted = a.select_columns(&order);
            let idx = offline_pipeline(&permuted, &order, cfg.k, cfg.p, &streaming_config(cfg, seed), &sub)?;
            Ok(plain(idx))
        }
        (alg, Mode::Distributed) => {
            let sub = subroutine(cfg, alg).expect("css algorithm");
            let shards = match assignment {
                Some(asg) => partition_by_assignment(a, asg, cfg.servers)?,
                None => {
                    let mut shards = partition_contiguous(&a.select_columns(&order), cfg.servers)?;
                    for s in &mut shards {
                        for g in &mut s.global_indices {
                            *g = order[*g];
                        }
                    }
                    shards
                }
            };
            let pc = ProtocolConfig {
                coreset_size: cfg.coreset_size,
                sketch_rows: cfg.sketch_rows,
                parallel: !cfg.parallel,
                irls: evaluation_irls(),
                ..ProtocolConfig::new(cfg.k, cfg.p, seed)
            };
            let out = run_protocol(&shards, &pc, &sub)?;
            if cfg.transcripts {
                fs::create_dir_all(&cfg.output)?;
                let path = cfg.output.join(format!("transcript-{}-{seed}.jsonl", alg.name()));
                fs::write(path, out.transcript.to_jsonl())?;
            }
            Ok(CellOutput {
                indices: out.selection.indices,
                words: out.transcript.total_words,
                err_p: out.selection.err_p,
            })
        }
    }
}

fn run_cell(
    a: &ColumnMatrix<f64>,
    norm: f64,
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    seed: u64,
    assignment: Option<&[usize]>,
) -> MetricsRow {
    let start = Instant::now();
    let outcome: Result<(f64, f64, usize, usize)> = (|| {
        if algorithm == Algorithm::Svd {
            let k = cfg.k.min(a.rows()).min(a.cols());
            let err = svd_rank_k_error(a, k, cfg.p)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            return Ok((err, ms, 0, k));
        }
        let out = select(a, cfg, algorithm, seed, assignment)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let err = match out.err_p {
            Some(e) => e,
            None => lp_fit_error(&a.select_columns(&out.indices), a, cfg.p, &evaluation_irls())?,
        };
        Ok((err, ms, out.words, out.indices.len()))
    })();
    match outcome {
        Ok((err, ms, words, selected)) => MetricsRow {
            algorithm,
            mode: cfg.mode,
            seed,
            err_ratio: if norm > 0.0 { err / norm } else { 0.0 },
            wall_ms: ms,
            words,
            selected,
            status: "ok".into(),
        },
        Err(e) => {
            log::warn!("{} seed {seed} failed: {e}", algorithm.name());
            MetricsRow {
                algorithm,
                mode: cfg.mode,
                seed,
                err_ratio: f64::NAN,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
                words: 0,
                selected: 0,
                status: format!("error: {e}"),
            }
        }
    }
}

/// Runs every (algorithm, seed) cell on `a`. Rows come back in config
/// order: algorithms outer, seeds inner.
pub fn run_on_matrix(a: &ColumnMatrix<f64>, cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let norm = entrywise_lp_norm(a, cfg.p)?;
    let assignment = match &cfg.assignment {
        Some(path) => Some(read_assignment(std::io::BufReader::new(fs::File::open(path)?))?),
        None => None,
    };
    let cells: Vec<(Algorithm, u64)> = cfg
        .algorithms
        .iter()
        .flat_map(|&alg| cfg.seeds.iter().map(move |&s| (alg, s)))
        .collect();
    let run = |&(alg, seed): &(Algorithm, u64)| run_cell(a, norm, cfg, alg, seed, assignment.as_deref());
    let rows: Vec<MetricsRow> = if cfg.parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    };
    let summary = summarize(&rows);
    Ok(ExperimentOutcome { rows, summary })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let a = load_dataset(cfg)?;
    run_on_matrix(&a, cfg)
}
