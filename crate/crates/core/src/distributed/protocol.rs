use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::coreset::{reduce, CoresetOptions, WeightedColumnSet};
use crate::css::{SelectionResult, Subroutine};
use crate::distributed::transcript::{Message, Party, ProtocolTranscript};
use crate::distributed::ServerShard;
use crate::error::{invalid, mismatch, CssError, Result};
use crate::numerics::{lp_regression, IrlsOptions, PNorm};
use crate::scalar::Scalar;
use crate::seeds::PipelineSeeds;
use crate::sketch::{empirical_sketch_rows, PStableSketch, SketchDescriptor};

/// Protocol parameters. `None` fields take the experiment defaults
/// `t_c = 2k` and `⌈0.5 d⌉` sketch rows.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolConfig {
    pub k: usize,
    pub p: PNorm,
    pub coreset_size: Option<usize>,
    pub sketch_rows: Option<usize>,
    pub sketch_scale: f64,
    /// Overall failure budget. Each server boosts its coreset for `δ/s`.
    pub failure_probability: Option<f64>,
    /// Bill the sketch broadcast as a dense `t×d` matrix.
    pub dense_sketch: bool,
    /// Run servers on the rayon pool. Transcripts do not depend on it.
    pub parallel: bool,
    pub irls: IrlsOptions,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn new(k: usize, p: PNorm, seed: u64) -> Self {
        Self {
            k,
            p,
            coreset_size: None,
            sketch_rows: None,
            sketch_scale: 1.0,
            failure_probability: None,
            dense_sketch: false,
            parallel: true,
            irls: IrlsOptions::default(),
            seed,
        }
    }

    pub fn coreset_size(&self) -> usize {
        self.coreset_size.unwrap_or(2 * self.k).max(1)
    }

    pub fn sketch_rows(&self, d: usize) -> usize {
        self.sketch_rows.unwrap_or_else(|| empirical_sketch_rows(d))
    }

    fn coreset_options(&self, servers: usize) -> CoresetOptions {
        CoresetOptions {
            failure_probability: self.failure_probability.map(|d| d / servers as f64),
            ..CoresetOptions::with_size(self.coreset_size())
        }
    }
}

/// A server only sees its own shard and the messages addressed to it.
struct Server<'a, T> {
    shard: &'a ServerShard<T>,
    sketch: Option<PStableSketch<T>>,
}

impl<'a, T: Scalar> Server<'a, T> {
    fn new(shard: &'a ServerShard<T>) -> Self {
        Self { shard, sketch: None }
    }

    fn on_sketch(&mut self, msg: &Message<T>, opts: &CoresetOptions, seed: u64) -> Result<Message<T>> {
        let Message::Sketch { descriptor, .. } = msg else {
            return Err(invalid("server expected the sketch"));
        };
        let sketch = descriptor.regenerate_p_stable::<T>()?;
        let set = if self.shard.is_empty() {
            WeightedColumnSet::empty(sketch.rows(), self.shard.data.rows(), PNorm::new(descriptor.p)?)
        } else {
            let sketched = sketch.apply(&self.shard.data)?;
            let set = WeightedColumnSet::from_columns(
                sketched,
                self.shard.data.clone(),
                self.shard.global_indices.clone(),
                PNorm::new(descriptor.p)?,
            )?;
            reduce(set, opts, seed)?
        };
        self.sketch = Some(sketch);
        Ok(Message::Coreset(set))
    }

    /// Fits every local column against `A_I` and returns `Σ_j ||A_I v_j − a_j||_p^p`.
    /// The fitted `v_j` stay on the server.
    fn on_selection(&self, msg: &Message<T>, p: PNorm, irls: &IrlsOptions) -> Result<T> {
        let Message::Selection(cols) = msg else {
            return Err(invalid("server expected the selection"));
        };
        let pp: T = p.get();
        let mut total = T::zero();
        for c in self.shard.data.columns() {
            total = total + lp_regression(cols, c, p, irls)?.objective.powf(pp);
        }
        Ok(total)
    }
}

/// The coordinator works only from received messages.
struct Coordinator {
    seeds: PipelineSeeds,
}

impl Coordinator {
    fn setup<T>(&self, d: usize, cfg: &ProtocolConfig) -> Message<T> {
        Message::Sketch {
            descriptor: SketchDescriptor {
                kind: crate::sketch::SketchKind::PStable,
                rows: cfg.sketch_rows(d),
                cols: d,
                p: cfg.p.value(),
                sparsity: 0,
                seed: self.seeds.sketch(),
                scale: cfg.sketch_scale,
            },
            dense: cfg.dense_sketch,
        }
    }

    fn select<T: Scalar>(
        &self,
        uploads: &[Message<T>],
        cfg: &ProtocolConfig,
        subroutine: &Subroutine,
    ) -> Result<(SelectionResult<T>, WeightedColumnSet<T>)> {
        let mut sets = uploads.iter().filter_map(|m| match m {
            Message::Coreset(s) if !s.is_empty() => Some(s),
            _ => None,
        });
        let Some(first) = sets.next() else {
            return Err(CssError::Empty("every server sent an empty coreset".into()));
        };
        let union = sets.try_fold(first.clone(), |acc, s| acc.concat(s))?;
        let inner = subroutine.run(&union.sketched, cfg.k, cfg.p, self.seeds.select())?;
        let indices = inner.indices.iter().map(|&i| union.global_indices[i]).collect();
        let left_factor = union.originals.select_columns(&inner.indices);
        let result = SelectionResult {
            indices,
            left_factor,
            right_factor: None,
            err_p2: inner.err_p2,
            err_p: None,
            err_history: inner.err_history,
            utility_history: inner.utility_history,
            meta: inner.meta,
        };
        Ok((result, union))
    }
}

/// Output of one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolOutput<T> {
    /// Global indices, selected originals, and the global entrywise error
    /// `(Σ_i local_i)^{1/p}` in `err_p`.
    pub selection: SelectionResult<T>,
    pub transcript: ProtocolTranscript,
    /// Per-server `Σ_j ||A_I v_j − a_j||_p^p`, by server id.
    pub server_costs: Vec<T>,
    /// The concatenated coreset the coordinator selected from.
    pub union: WeightedColumnSet<T>,
}

/// Simulates the one-round protocol: sketch broadcast, coreset upload,
/// selection broadcast, local regression.
pub fn run_protocol<T: Scalar>(
    shards: &[ServerShard<T>],
    cfg: &ProtocolConfig,
    subroutine: &Subroutine,
) -> Result<ProtocolOutput<T>> {
    let s = shards.len();
    if s == 0 {
        return Err(invalid("at least one server is required"));
    }
    if cfg.k == 0 {
        return Err(invalid("k must be positive"));
    }
    let d = shards[0].data.rows();
    if let Some(bad) = shards.iter().find(|sh| sh.data.rows() != d) {
        return Err(mismatch(format!(
            "server {} holds {}-row columns, expected {d}",
            bad.id,
            bad.data.rows()
        )));
    }

    let seeds = PipelineSeeds::new(cfg.seed);
    let coordinator = Coordinator { seeds };
    let opts = cfg.coreset_options(s);
    let mut transcript = ProtocolTranscript::new(s);
    let mut servers: Vec<Server<T>> = shards.iter().map(Server::new).collect();

    let setup = coordinator.setup::<T>(d, cfg);
    for i in 0..s {
        transcript.record(Party::Coordinator, Party::Server(i), &setup);
    }

    let build = |(i, srv): (usize, &mut Server<T>)| srv.on_sketch(&setup, &opts, seeds.leaf(i as u64));
    let uploads: Vec<Message<T>> = if cfg.parallel {
        servers.par_iter_mut().enumerate().map(build).collect::<Result<_>>()?
    } else {
        servers.iter_mut().enumerate().map(build).collect::<Result<_>>()?
    };
    for (i, m) in uploads.iter().enumerate() {
        transcript.record(Party::Server(i), Party::Coordinator, m);
    }

    let (mut selection, union) = coordinator.select(&uploads, cfg, subroutine)?;
    let broadcast = Message::Selection(selection.left_factor.clone());
    for i in 0..s {
        transcript.record(Party::Coordinator, Party::Server(i), &broadcast);
    }
    transcript.rounds = 1;

    let fit = |srv: &Server<T>| srv.on_selection(&broadcast, cfg.p, &cfg.irls);
    let server_costs: Vec<T> = if cfg.parallel {
        servers.par_iter().map(fit).collect::<Result<_>>()?
    } else {
        servers.iter().map(fit).collect::<Result<_>>()?
    };
    let total = server_costs.iter().fold(T::zero(), |a, &b| a + b);
    selection.err_p = Some(total.powf(T::one() / cfg.p.get()));

    let params: BTreeMap<String, String> = [
        ("mode", "distributed".to_string()),
        ("servers", s.to_string()),
        ("coreset_size", opts.size.to_string()),
        ("sketch_rows", cfg.sketch_rows(d).to_string()),
        ("total_words", transcript.total_words.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    selection.meta.params.extend(params);
    selection.meta.seed = cfg.seed;

    Ok(ProtocolOutput {
        selection,
        transcript,
        server_costs,
        union,
    })
}

/// Closed-form word count when every server sends exactly `c_i` coreset
/// columns and the coordinator broadcasts `selected` columns.
pub fn expected_words(servers: usize, coreset_columns: &[usize], t: usize, d: usize, selected: usize, dense: bool) -> usize {
    let sketch = if dense { t * d } else { SketchDescriptor::WORDS };
    let uploads: usize = coreset_columns
        .iter()
        .map(|c| crate::distributed::CORESET_HEADER_WORDS + c * (t + d + 2))
        .sum();
    servers * sketch + uploads + servers * selected * d
}
