use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::coreset::WeightedColumnSet;
use crate::error::Result;
use crate::numerics::ColumnMatrix;
use crate::sketch::SketchDescriptor;

/// Endpoint of a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Party {
    Coordinator,
    Server(usize),
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Coordinator => f.write_str("coordinator"),
            Party::Server(i) => write!(f, "server-{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageKind {
    SketchSeed,
    Coreset,
    Selection,
}

/// Payloads exchanged by the simulation.
#[derive(Debug, Clone)]
pub enum Message<T> {
    /// The shared sketch. With `dense` set it is billed as the full matrix.
    Sketch { descriptor: SketchDescriptor, dense: bool },
    Coreset(WeightedColumnSet<T>),
    /// The selected original columns `A_I`.
    Selection(ColumnMatrix<T>),
}

/// Header words of a coreset message: column count and original row count.
pub const CORESET_HEADER_WORDS: usize = 2;

impl<T> Message<T> {
    pub fn kind(&self) -> MessageKind {
        match self {
            Message::Sketch { .. } => MessageKind::SketchSeed,
            Message::Coreset(_) => MessageKind::Coreset,
            Message::Selection(_) => MessageKind::Selection,
        }
    }
}

/// Words on the wire: one per real and one per index.
///
/// A seed-shared sketch costs its descriptor, a dense one `t·d`. A coreset
/// of `c` columns costs `c(t + d + 2)` (sketched column, original column,
/// global index, weight) plus a two-word header. A selection of `|I|`
/// columns costs `|I| d`.
pub fn account_words<T>(msg: &Message<T>) -> usize {
    match msg {
        Message::Sketch { descriptor, dense } => {
            if *dense {
                descriptor.rows * descriptor.cols
            } else {
                SketchDescriptor::WORDS
            }
        }
        Message::Coreset(set) => {
            let per = set.sketched.rows() + set.originals.rows() + 2;
            CORESET_HEADER_WORDS + set.global_indices.len() * per
        }
        Message::Selection(cols) => cols.rows() * cols.cols(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub from: Party,
    pub to: Party,
    pub kind: MessageKind,
    pub words: usize,
}

/// Ordered log of every message of one protocol run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub servers: usize,
    pub messages: Vec<TranscriptEntry>,
    pub rounds: usize,
    pub total_words: usize,
}

impl ProtocolTranscript {
    pub fn new(servers: usize) -> Self {
        Self {
            servers,
            ..Self::default()
        }
    }

    pub fn record<T>(&mut self, from: Party, to: Party, msg: &Message<T>) {
        let words = account_words(msg);
        self.messages.push(TranscriptEntry {
            from,
            to,
            kind: msg.kind(),
            words,
        });
        self.total_words += words;
    }

    /// Sum of the logged word counts.
    pub fn replayed_words(&self) -> usize {
        self.messages.iter().map(|m| m.words).sum()
    }

    pub fn words_of(&self, kind: MessageKind) -> usize {
        self.messages.iter().filter(|m| m.kind == kind).map(|m| m.words).sum()
    }

    /// One JSON record per message.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for m in &self.messages {
            serde_json::to_writer(&mut w, m).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }
}
