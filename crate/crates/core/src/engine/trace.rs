use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::algorithm::Rule;
use crate::configuration::Configuration;
use crate::geometry::{Angle, Visibility};

/// First line of a trace file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub n: usize,
    pub theta: Visibility,
    pub algorithm: String,
    pub scheduler: String,
    pub seed: u64,
    pub step_cap: u64,
}

/// What one activated robot did during a step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotMove {
    pub robot: usize,
    pub from: Angle,
    pub rule: Rule,
    pub destination_offset: Angle,
}

/// One semi-synchronous step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub activated: Vec<usize>,
    pub moves: Vec<RobotMove>,
    /// Position of every robot after the step, by robot index.
    pub positions: Vec<Angle>,
    pub configuration: Configuration,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("trace has no header")]
    MissingHeader,
}

pub struct TraceWriter<W: Write> {
    out: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W, header: &TraceHeader) -> io::Result<Self> {
        serde_json::to_writer(&mut out, header)?;
        out.write_all(b"\n")?;
        Ok(TraceWriter { out })
    }

    pub fn record(&mut self, record: &TraceRecord) -> io::Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Serializes a whole trace to its JSON Lines text.
pub fn write_trace(header: &TraceHeader, records: &[TraceRecord]) -> String {
    let mut writer = TraceWriter::new(Vec::new(), header).expect("writing to memory");
    for r in records {
        writer.record(r).expect("writing to memory");
    }
    String::from_utf8(writer.finish().expect("writing to memory")).expect("JSON is UTF-8")
}

pub fn read_trace<R: BufRead>(input: R) -> Result<(TraceHeader, Vec<TraceRecord>), TraceError> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));
    let (_, first) = lines.next().ok_or(TraceError::MissingHeader)?;
    let header = serde_json::from_str(&first?).map_err(|source| TraceError::Json { line: 1, source })?;
    let mut records = Vec::new();
    for (i, line) in lines {
        let record = serde_json::from_str(&line?).map_err(|source| TraceError::Json { line: i + 1, source })?;
        records.push(record);
    }
    Ok((header, records))
}
