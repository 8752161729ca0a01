//! Coordinator/worker wire protocol: one JSON object per line over TCP.
//!
//! ```text
//! coordinator -> worker  {"type":"scores","intra":[..],"inter":[..],"eer_method":{..},"master_seed":N}
//! coordinator -> worker  {"type":"work","start_index":i,"count":S}        (repeatable)
//! worker -> coordinator  {"type":"result","start_index":i,"eers":[..]}
//! coordinator -> worker  {"type":"done"}
//! either direction       {"type":"error","message":".."}
//! ```
//!
//! `eers` holds replicate EERs in index order; a replicate whose EER method
//! failed is sent as `null` and its cause listed in an optional `failures`
//! array. Floats are written in shortest round-trip form and parsed exactly.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{BootstrapError, ReplicateFailure};
use crate::method::EerMethod;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", bound = "T: Scalar")]
pub enum Message<T> {
    Scores {
        intra: Vec<T>,
        inter: Vec<T>,
        eer_method: EerMethod,
        master_seed: u64,
    },
    Work {
        start_index: usize,
        count: usize,
    },
    Result {
        start_index: usize,
        eers: Vec<Option<T>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        failures: Vec<ReplicateFailure>,
    },
    Done,
    Error {
        message: String,
    },
}

impl<T: Scalar> Message<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::Scores { .. } => "scores",
            Message::Work { .. } => "work",
            Message::Result { .. } => "result",
            Message::Done => "done",
            Message::Error { .. } => "error",
        }
    }
}

pub fn send<T: Scalar, W: Write>(w: &mut W, msg: &Message<T>) -> Result<(), BootstrapError> {
    let mut line = serde_json::to_vec(msg).map_err(|e| BootstrapError::Protocol(e.to_string()))?;
    line.push(b'\n');
    w.write_all(&line)?;
    w.flush()?;
    Ok(())
}

/// Reads the next message; `Ok(None)` on a cleanly closed stream.
pub fn receive<T: Scalar, R: BufRead>(r: &mut R) -> Result<Option<Message<T>>, BootstrapError> {
    let mut line = String::new();
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        if !line.trim().is_empty() {
            break;
        }
    }
    serde_json::from_str(line.trim_end())
        .map(Some)
        .map_err(|e| BootstrapError::Protocol(format!("malformed message: {e}")))
}
