//! CSV ingestion and export.
//!
//! Simple files carry a `type,score` header and rows `intra,<float>` or
//! `inter,<float>`. Multi-system files carry `type,s1,...,sn`. Lines starting
//! with `#` and blank lines are ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{Class, MultiScoreSet, ScoreError, ScoreSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreFormat {
    Simple,
    Multi,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedScores<T> {
    Simple(ScoreSet<T>),
    Multi(MultiScoreSet<T>),
}

pub fn load_scores<T: Scalar>(
    path: impl AsRef<Path>,
    format: ScoreFormat,
) -> Result<LoadedScores<T>, ScoreError> {
    let reader = BufReader::new(File::open(path)?);
    Ok(match format {
        ScoreFormat::Simple => LoadedScores::Simple(read_simple(reader)?),
        ScoreFormat::Multi => LoadedScores::Multi(read_multi(reader)?),
    })
}

struct Rows<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Rows<R> {
    fn new(reader: R) -> Self {
        Self { lines: reader.lines(), line_no: 0 }
    }

    /// Next meaningful line, trimmed, with its 1-based number.
    fn next_row(&mut self) -> Result<Option<(usize, String)>, ScoreError> {
        for line in self.lines.by_ref() {
            self.line_no += 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Ok(Some((self.line_no, trimmed.to_string())));
        }
        Ok(None)
    }
}

fn malformed(line: usize, reason: impl Into<String>) -> ScoreError {
    ScoreError::MalformedRow { line, reason: reason.into() }
}

fn parse_class(line: usize, field: &str) -> Result<Class, ScoreError> {
    match field.trim() {
        "intra" => Ok(Class::Intra),
        "inter" => Ok(Class::Inter),
        other => Err(malformed(line, format!("unknown class `{other}`"))),
    }
}

fn parse_score<T: Scalar>(line: usize, field: &str) -> Result<T, ScoreError> {
    let field = field.trim();
    let v: T = field
        .parse()
        .map_err(|_| malformed(line, format!("non-numeric score `{field}`")))?;
    if !v.is_finite() {
        return Err(malformed(line, format!("non-finite score `{field}`")));
    }
    Ok(v)
}

/// Reads the header and returns its column count.
fn read_header<R: BufRead>(rows: &mut Rows<R>) -> Result<usize, ScoreError> {
    let (line, header) = rows
        .next_row()?
        .ok_or_else(|| malformed(rows.line_no.max(1), "missing header"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols[0] != "type" || cols.len() < 2 {
        return Err(malformed(line, format!("expected header `type,...`, got `{header}`")));
    }
    Ok(cols.len())
}

pub fn read_simple<T: Scalar, R: BufRead>(reader: R) -> Result<ScoreSet<T>, ScoreError> {
    let mut rows = Rows::new(reader);
    let width = read_header(&mut rows)?;
    if width != 2 {
        return Err(malformed(rows.line_no, "simple score files have exactly two columns"));
    }
    let (mut intra, mut inter) = (Vec::new(), Vec::new());
    while let Some((line, row)) = rows.next_row()? {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 2 {
            return Err(malformed(line, format!("expected 2 columns, found {}", fields.len())));
        }
        let score = parse_score(line, fields[1])?;
        match parse_class(line, fields[0])? {
            Class::Intra => intra.push(score),
            Class::Inter => inter.push(score),
        }
    }
    ScoreSet::new(intra, inter)
}

pub fn read_multi<T: Scalar, R: BufRead>(reader: R) -> Result<MultiScoreSet<T>, ScoreError> {
    let mut rows = Rows::new(reader);
    let width = read_header(&mut rows)?;
    let n = width - 1;
    let (mut intra, mut inter) = (Vec::new(), Vec::new());
    while let Some((line, row)) = rows.next_row()? {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != width {
            return Err(malformed(
                line,
                format!("expected {width} columns, found {}", fields.len()),
            ));
        }
        let class = parse_class(line, fields[0])?;
        let tuple = fields[1..]
            .iter()
            .map(|f| parse_score(line, f))
            .collect::<Result<Vec<T>, _>>()?;
        match class {
            Class::Intra => intra.push(tuple),
            Class::Inter => inter.push(tuple),
        }
    }
    MultiScoreSet::new(n, intra, inter)
}

/// Writes a simple score file, intra rows first. Floats use their shortest
/// round-trip representation.
pub fn write_simple<T: Scalar, W: Write>(set: &ScoreSet<T>, mut w: W) -> std::io::Result<()> {
    writeln!(w, "type,score")?;
    for s in set.intra() {
        writeln!(w, "intra,{s:?}")?;
    }
    for s in set.inter() {
        writeln!(w, "inter,{s:?}")?;
    }
    Ok(())
}

pub fn write_multi<T: Scalar, W: Write>(set: &MultiScoreSet<T>, mut w: W) -> std::io::Result<()> {
    let header: Vec<String> = (1..=set.n_systems()).map(|j| format!("s{j}")).collect();
    writeln!(w, "type,{}", header.join(","))?;
    for (class, tuples) in [(Class::Intra, set.intra()), (Class::Inter, set.inter())] {
        for t in tuples {
            let cells: Vec<String> = t.iter().map(|s| format!("{s:?}")).collect();
            writeln!(w, "{class},{}", cells.join(","))?;
        }
    }
    Ok(())
}
