//! Worker side of distributed bootstrap.
//!
//! A worker serves one coordinator at a time. A session receives the scores
//! once, then answers any number of work orders by computing the requested
//! replicate range on the local thread pool, and ends on `done`.

use std::io::{BufReader, BufWriter};
use std::marker::PhantomData;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};

use super::protocol::{receive, send, Message};
use super::{run_replicates_parallel, BootstrapError, ReplicateFailure};
use crate::method::EerMethod;
use crate::scalar::Scalar;
use crate::scores::ScoreSet;

/// Counters of one served session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SessionSummary {
    pub work_orders: usize,
    pub replicates: usize,
}

pub struct Worker<T> {
    listener: TcpListener,
    threads: Option<usize>,
    _scalar: PhantomData<T>,
}

impl<T: Scalar> Worker<T> {
    pub fn bind(addr: impl ToSocketAddrs) -> std::io::Result<Self> {
        Ok(Self { listener: TcpListener::bind(addr)?, threads: None, _scalar: PhantomData })
    }

    /// Limits the local pool; defaults to every processing unit.
    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts coordinator sessions forever, one after another.
    pub fn serve(&self) -> std::io::Result<()> {
        loop {
            let (stream, peer) = self.listener.accept()?;
            log::info!("session from {peer}");
            match self.serve_session(stream) {
                Ok(s) => log::info!("session from {peer} done: {} orders, {} replicates", s.work_orders, s.replicates),
                Err(e) => log::warn!("session from {peer} aborted: {e}"),
            }
        }
    }

    /// Accepts and serves exactly one session.
    pub fn serve_once(&self) -> Result<SessionSummary, BootstrapError> {
        let (stream, _) = self.listener.accept()?;
        self.serve_session(stream)
    }

    pub fn serve_session(&self, stream: TcpStream) -> Result<SessionSummary, BootstrapError> {
        let mut reader = BufReader::new(stream.try_clone()?);
        let mut writer = BufWriter::new(stream);
        let result = session::<T>(&mut reader, &mut writer, self.threads);
        if let Err(BootstrapError::Protocol(msg)) = &result {
            let _ = send(&mut writer, &Message::<T>::Error { message: msg.clone() });
        }
        result
    }
}

fn session<T: Scalar>(
    reader: &mut BufReader<TcpStream>,
    writer: &mut BufWriter<TcpStream>,
    threads: Option<usize>,
) -> Result<SessionSummary, BootstrapError> {
    let closed = || BootstrapError::Protocol("coordinator closed the connection".into());
    let (set, method, master_seed): (ScoreSet<T>, EerMethod, u64) = match receive::<T, _>(reader)? {
        Some(Message::Scores { intra, inter, eer_method, master_seed }) => {
            eer_method.validate().map_err(BootstrapError::Protocol)?;
            let set = ScoreSet::new(intra, inter).map_err(|e| BootstrapError::Protocol(e.to_string()))?;
            (set, eer_method, master_seed)
        }
        Some(Message::Error { message }) => return Err(BootstrapError::Protocol(format!("coordinator error: {message}"))),
        Some(other) => {
            return Err(BootstrapError::Protocol(format!("expected `scores`, got `{}`", other.kind())))
        }
        None => return Err(closed()),
    };
    let mut summary = SessionSummary::default();
    loop {
        match receive::<T, _>(reader)? {
            Some(Message::Work { start_index, count }) => {
                let outcomes = if count == 0 {
                    Vec::new()
                } else {
                    run_replicates_parallel(&set, &method, master_seed, start_index..start_index + count, threads)?
                };
                let mut failures = Vec::new();
                let eers = outcomes
                    .into_iter()
                    .map(|(index, r)| match r {
                        Ok(v) => Some(v),
                        Err(cause) => {
                            failures.push(ReplicateFailure { index, cause });
                            None
                        }
                    })
                    .collect();
                send(writer, &Message::Result { start_index, eers, failures })?;
                summary.work_orders += 1;
                summary.replicates += count;
            }
            Some(Message::Done) => return Ok(summary),
            Some(Message::Error { message }) => {
                return Err(BootstrapError::Protocol(format!("coordinator error: {message}")))
            }
            Some(other) => {
                return Err(BootstrapError::Protocol(format!("unexpected `{}` message", other.kind())))
            }
            None => return Err(closed()),
        }
    }
}
