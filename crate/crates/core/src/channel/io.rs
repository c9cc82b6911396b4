//! Trace files: a header line `# n=<n> p=<p> seed=<seed>` followed by one
//! trace per line as ASCII `0`/`1` (an empty line is an empty trace).

use std::io::{BufRead, Write};

use super::TraceBatch;
use crate::error::{Error, Result};
use crate::polynomial::CircleParams;
use crate::strings::BitString;

pub fn write_traces<W: Write>(batch: &TraceBatch, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "# n={} p={} seed={}",
        batch.source_len(),
        batch.circle(),
        batch.seed()
    )?;
    for t in batch.traces() {
        writeln!(out, "{t}")?;
    }
    Ok(())
}

fn parse_header(line: &str) -> Result<(usize, CircleParams, u64)> {
    let bad = || Error::Parse(format!("malformed trace header {line:?}"));
    let body = line.strip_prefix('#').ok_or_else(bad)?;
    let (mut n, mut p, mut seed) = (None, None, None);
    for field in body.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(bad)?;
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
            "p" => p = Some(value.parse::<CircleParams>()?),
            "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    match (n, p, seed) {
        (Some(n), Some(p), Some(seed)) => Ok((n, p, seed)),
        _ => Err(bad()),
    }
}

pub fn read_traces<R: BufRead>(input: R) -> Result<TraceBatch> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty trace file".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let (n, circle, seed) = parse_header(header.trim_end_matches('\r'))?;
    let mut traces = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        let trace = line
            .trim_end_matches('\r')
            .parse::<BitString>()
            .map_err(|e| Error::Parse(format!("trace {}: {e}", i + 1)))?;
        traces.push(trace);
    }
    TraceBatch::new(n, traces, seed, circle)
}
