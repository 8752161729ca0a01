//! Coordinator side of distributed bootstrap.
//!
//! Every worker receives the scores once. Subworks `(start_index, count)`
//! are dealt round-robin; each worker connection runs its queue on its own
//! thread. When a worker fails, its unfinished subworks move to the
//! surviving workers, and a subwork that already failed once is only
//! retried on a different worker. Replicate outcomes are merged by index.

use std::io::{BufReader, BufWriter};
use std::net::{TcpStream, ToSocketAddrs};
use std::thread;
use std::time::Duration;

use super::protocol::{receive, send, Message};
use super::{BootstrapError, DistributedConfig, ReplicateOutcome};
use crate::method::EerMethod;
use crate::scalar::Scalar;
use crate::scores::ScoreSet;

const DEFAULT_CONNECT_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Subwork {
    start_index: usize,
    count: usize,
    /// Worker that already failed this subwork.
    failed_on: Option<usize>,
    failures: u8,
}

struct Connection {
    id: usize,
    endpoint: String,
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl Connection {
    fn open(id: usize, endpoint: &str, cfg: &DistributedConfig) -> Result<Self, BootstrapError> {
        let unreachable = |source| BootstrapError::WorkerUnreachable { endpoint: endpoint.to_string(), source };
        let addrs: Vec<_> = endpoint.to_socket_addrs().map_err(unreachable)?.collect();
        let timeout = cfg.connect_timeout.unwrap_or(DEFAULT_CONNECT_TIMEOUT);
        let mut last = std::io::Error::new(std::io::ErrorKind::NotFound, "no address resolved");
        for addr in addrs {
            match TcpStream::connect_timeout(&addr, timeout) {
                Ok(stream) => {
                    stream.set_read_timeout(cfg.io_timeout).map_err(unreachable)?;
                    stream.set_nodelay(true).ok();
                    let reader = BufReader::new(stream.try_clone().map_err(unreachable)?);
                    return Ok(Self {
                        id,
                        endpoint: endpoint.to_string(),
                        reader,
                        writer: BufWriter::new(stream),
                    });
                }
                Err(e) => last = e,
            }
        }
        Err(unreachable(last))
    }

    fn run<T: Scalar>(&mut self, w: Subwork) -> Result<Vec<ReplicateOutcome<T>>, String> {
        send(&mut self.writer, &Message::<T>::Work { start_index: w.start_index, count: w.count })
            .map_err(|e| e.to_string())?;
        match receive::<T, _>(&mut self.reader).map_err(|e| e.to_string())? {
            Some(Message::Result { start_index, eers, failures }) => {
                if start_index != w.start_index || eers.len() != w.count {
                    return Err(format!(
                        "result for {start_index} with {} EERs does not match order {} x {}",
                        eers.len(),
                        w.start_index,
                        w.count
                    ));
                }
                Ok(eers
                    .into_iter()
                    .enumerate()
                    .map(|(offset, eer)| {
                        let index = start_index + offset;
                        let outcome = eer.ok_or_else(|| {
                            failures
                                .iter()
                                .find(|f| f.index == index)
                                .map(|f| f.cause.clone())
                                .unwrap_or_else(|| "replicate failed on worker".into())
                        });
                        (index, outcome)
                    })
                    .collect())
            }
            Some(Message::Error { message }) => Err(format!("worker error: {message}")),
            Some(other) => Err(format!("unexpected `{}` message", other.kind())),
            None => Err("worker closed the connection".into()),
        }
    }
}

/// Outcome of one worker's queue.
struct Lane<T> {
    conn: Option<Connection>,
    outcomes: Vec<ReplicateOutcome<T>>,
    /// Subworks left undone because the worker failed, first one included.
    orphaned: Vec<Subwork>,
    error: Option<String>,
}

fn run_lane<T: Scalar>(mut conn: Connection, queue: Vec<Subwork>) -> Lane<T> {
    let mut outcomes = Vec::new();
    for (pos, w) in queue.iter().enumerate() {
        match conn.run::<T>(*w) {
            Ok(mut out) => outcomes.append(&mut out),
            Err(reason) => {
                log::warn!("worker {} failed subwork at {}: {reason}", conn.endpoint, w.start_index);
                let mut orphaned = vec![Subwork { failed_on: Some(conn.id), failures: w.failures + 1, ..*w }];
                orphaned.extend_from_slice(&queue[pos + 1..]);
                return Lane { conn: None, outcomes, orphaned, error: Some(reason) };
            }
        }
    }
    Lane { conn: Some(conn), outcomes, orphaned: Vec::new(), error: None }
}

/// Runs replicates `1..=k` on the configured workers.
pub fn coordinate<T: Scalar>(
    set: &ScoreSet<T>,
    method: &EerMethod,
    master_seed: u64,
    k: usize,
    cfg: &DistributedConfig,
) -> Result<Vec<ReplicateOutcome<T>>, BootstrapError> {
    let sizes = cfg.subwork_sizes(k)?;
    let mut subworks = Vec::with_capacity(sizes.len());
    let mut next = 1;
    for count in sizes {
        subworks.push(Subwork { start_index: next, count, failed_on: None, failures: 0 });
        next += count;
    }

    let mut conns = cfg
        .endpoints
        .iter()
        .enumerate()
        .map(|(id, ep)| Connection::open(id, ep, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let scores = Message::Scores {
        intra: set.intra().to_vec(),
        inter: set.inter().to_vec(),
        eer_method: *method,
        master_seed,
    };
    for c in &mut conns {
        send(&mut c.writer, &scores).map_err(|e| match e {
            BootstrapError::Io(source) => BootstrapError::WorkerUnreachable { endpoint: c.endpoint.clone(), source },
            other => other,
        })?;
    }

    let mut outcomes = Vec::with_capacity(k);
    let mut pending = subworks;
    let mut alive: Vec<Connection> = conns;
    let mut last_error = String::new();
    while !pending.is_empty() {
        if alive.is_empty() {
            let w = pending[0];
            return Err(BootstrapError::WorkerFailed {
                start_index: w.start_index,
                count: w.count,
                reason: format!("no surviving worker ({last_error})"),
            });
        }
        // deal pending subworks, never back to the worker that failed them
        let mut queues: Vec<Vec<Subwork>> = vec![Vec::new(); alive.len()];
        for (turn, w) in pending.drain(..).enumerate() {
            let mut slot = turn % alive.len();
            if w.failed_on == Some(alive[slot].id) {
                if alive.len() == 1 {
                    return Err(BootstrapError::WorkerFailed {
                        start_index: w.start_index,
                        count: w.count,
                        reason: "no other worker left to retry on".into(),
                    });
                }
                slot = (slot + 1) % alive.len();
            }
            queues[slot].push(w);
        }
        let lanes: Vec<Lane<T>> = thread::scope(|s| {
            let handles: Vec<_> = alive
                .drain(..)
                .zip(queues)
                .map(|(conn, q)| s.spawn(move || run_lane::<T>(conn, q)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("lane thread panicked")).collect()
        });
        for lane in lanes {
            outcomes.extend(lane.outcomes);
            if let Some(e) = lane.error {
                last_error = e;
            }
            pending.extend(lane.orphaned);
            if let Some(conn) = lane.conn {
                alive.push(conn);
            }
        }
        // a subwork is retried once; a second failure is fatal
        if let Some(w) = pending.iter().find(|w| w.failures >= 2) {
            return Err(BootstrapError::WorkerFailed {
                start_index: w.start_index,
                count: w.count,
                reason: last_error,
            });
        }
        pending.sort_by_key(|w| w.start_index);
        alive.sort_by_key(|c| c.id);
    }
    for c in &mut alive {
        let _ = send(&mut c.writer, &Message::<T>::Done);
    }
    outcomes.sort_by_key(|(i, _)| *i);
    Ok(outcomes)
}
