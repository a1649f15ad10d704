//! In-process simulation of the one-round coordinator protocol.

mod protocol;
mod shard;
mod transcript;

pub use protocol::{expected_words, run_protocol, ProtocolConfig, ProtocolOutput};
pub use shard::{partition_by_assignment, partition_contiguous, ServerShard};
pub use transcript::{
    account_words, Message, MessageKind, Party, ProtocolTranscript, TranscriptEntry,
    CORESET_HEADER_WORDS,
};
