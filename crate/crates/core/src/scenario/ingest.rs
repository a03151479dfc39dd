//! Daily rain and vigilance CSV documents.
//!
//! Rain: header `date,rain_mm`, one row per consecutive day, rain a
//! non-negative decimal with at most one fractional digit.
//! Vigilance: header `date,colour`; absent dates are green and repeated
//! dates collapse to the most severe colour.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;

use crate::colour::VigilanceColour;
use crate::error::IngestError;

pub const RAIN_HEADER: &str = "date,rain_mm";
pub const VIGILANCE_HEADER: &str = "date,colour";

/// Daily observed rain, consecutive dates from `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct RainSeries {
    pub records: Vec<(NaiveDate, f64)>,
}

impl RainSeries {
    pub fn start(&self) -> NaiveDate {
        self.records[0].0
    }

    pub fn end(&self) -> NaiveDate {
        self.records[self.records.len() - 1].0
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Rows whose date lies in `[from, to]`.
    pub fn slice(&self, from: NaiveDate, to: NaiveDate) -> RainSeries {
        RainSeries {
            records: self
                .records
                .iter()
                .copied()
                .filter(|(d, _)| *d >= from && *d <= to)
                .collect(),
        }
    }
}

/// Sparse vigilance bulletins; any date not present is green.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VigilanceSeries {
    pub entries: BTreeMap<NaiveDate, VigilanceColour>,
}

impl VigilanceSeries {
    pub fn colour_on(&self, date: NaiveDate) -> VigilanceColour {
        self.entries.get(&date).copied().unwrap_or(VigilanceColour::Green)
    }

    /// One colour per day over `[from, to]`.
    pub fn dense(&self, from: NaiveDate, to: NaiveDate) -> Vec<(NaiveDate, VigilanceColour)> {
        from.iter_days()
            .take_while(|d| *d <= to)
            .map(|d| (d, self.colour_on(d)))
            .collect()
    }
}

struct Rows {
    lines: Vec<(usize, Vec<String>)>,
}

fn read_rows(source: impl Read, expected_header: &'static str) -> Result<Rows, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(IngestError::Empty),
        Some(r) => r.map_err(|e| csv_error(e, 1))?,
    };
    let found = header.iter().collect::<Vec<_>>().join(",");
    let found = found.trim_start_matches('\u{feff}').to_string();
    if found != expected_header {
        return Err(IngestError::Header {
            line: 1,
            found,
            expected: expected_header,
        });
    }
    let mut lines = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(e, 0))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != 2 {
            return Err(IngestError::Row {
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        lines.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Rows { lines })
}

fn csv_error(e: csv::Error, fallback_line: usize) -> IngestError {
    if let Some(pos) = e.position() {
        return IngestError::Row {
            line: pos.line() as usize,
            message: e.to_string(),
        };
    }
    match e.kind() {
        csv::ErrorKind::Io(io) => IngestError::Io(io.to_string()),
        _ => IngestError::Row {
            line: fallback_line,
            message: e.to_string(),
        },
    }
}

fn parse_date(line: usize, s: &str) -> Result<NaiveDate, IngestError> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| IngestError::Row {
        line,
        message: format!("bad date {s:?}: {e}"),
    })
}

/// Parses a rain amount in the stored precision (at most one decimal).
fn parse_rain(line: usize, s: &str) -> Result<f64, IngestError> {
    let bad = |message: String| IngestError::Row { line, message };
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    let digits_ok = !int.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.is_none_or(|f| f.len() == 1 && f.bytes().all(|b| b.is_ascii_digit()));
    if s.starts_with('-') {
        return Err(bad(format!("negative rain {s:?}")));
    }
    if !digits_ok {
        return Err(bad(format!(
            "bad rain amount {s:?} (non-negative decimal, at most one fractional digit)"
        )));
    }
    s.parse::<f64>().map_err(|e| bad(format!("bad rain amount {s:?}: {e}")))
}

pub fn load_rain_series(source: impl Read) -> Result<RainSeries, IngestError> {
    let rows = read_rows(source, RAIN_HEADER)?;
    let mut records: Vec<(NaiveDate, f64)> = Vec::with_capacity(rows.lines.len());
    for (line, fields) in rows.lines {
        let date = parse_date(line, &fields[0])?;
        let rain = parse_rain(line, &fields[1])?;
        if let Some(&(prev, _)) = records.last() {
            let expected = prev.succ_opt().expect("date in range");
            if date <= prev {
                return Err(IngestError::NonMonotone {
                    line,
                    expected,
                    found: date,
                });
            }
            if date != expected {
                return Err(IngestError::Gap {
                    line,
                    expected,
                    found: date,
                });
            }
        }
        records.push((date, rain));
    }
    if records.is_empty() {
        return Err(IngestError::NoRows);
    }
    Ok(RainSeries { records })
}

pub fn load_vigilance_series(source: impl Read) -> Result<VigilanceSeries, IngestError> {
    let rows = read_rows(source, VIGILANCE_HEADER)?;
    let mut entries = BTreeMap::new();
    for (line, fields) in rows.lines {
        let date = parse_date(line, &fields[0])?;
        let colour: VigilanceColour = fields[1].parse().map_err(|e: crate::colour::UnknownColour| {
            IngestError::Row {
                line,
                message: e.to_string(),
            }
        })?;
        entries
            .entry(date)
            .and_modify(|c: &mut VigilanceColour| *c = (*c).max(colour))
            .or_insert(colour);
    }
    Ok(VigilanceSeries { entries })
}

pub fn write_rain_series(series: &RainSeries, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{RAIN_HEADER}")?;
    for (date, rain) in &series.records {
        writeln!(out, "{date},{rain:.1}")?;
    }
    Ok(())
}

/// Writes only the non-green days, one row each.
pub fn write_vigilance_series(series: &VigilanceSeries, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{VIGILANCE_HEADER}")?;
    for (date, colour) in &series.entries {
        if *colour != VigilanceColour::Green {
            writeln!(out, "{date},{colour}")?;
        }
    }
    Ok(())
}
