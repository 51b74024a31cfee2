use std::collections::HashSet;
use std::io::{Read, Write};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TARGET: &str = "OT";

/// Named, equally long real-valued channels with an optional time column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFrame {
    pub name: String,
    pub timestamps: Option<Vec<String>>,
    pub columns: Vec<String>,
    pub channels: Vec<Vec<f64>>,
    pub target: usize,
}

impl SeriesFrame {
    /// Builds a frame whose target is `"OT"` if present, otherwise the last column.
    pub fn new(name: impl Into<String>, columns: Vec<String>, channels: Vec<Vec<f64>>) -> Result<Self> {
        let target = default_target(&columns);
        let f = Self {
            name: name.into(),
            timestamps: None,
            columns,
            channels,
            target,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() || self.channels.len() != self.columns.len() {
            return Err(Error::Shape(format!(
                "{} columns named for {} channels",
                self.columns.len(),
                self.channels.len()
            )));
        }
        let len = self.channels[0].len();
        if len == 0 || self.channels.iter().any(|c| c.len() != len) {
            return Err(Error::Shape("channels must share a nonzero length".into()));
        }
        if let Some(ts) = &self.timestamps {
            if ts.len() != len {
                return Err(Error::Shape("timestamp column length differs from channels".into()));
            }
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.columns.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate column name {dup:?}")));
        }
        if self.target >= self.channels.len() {
            return Err(Error::MissingColumn(format!("target index {}", self.target)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn channel(&self, name: &str) -> Result<&[f64]> {
        Ok(&self.channels[self.column_index(name)?])
    }

    pub fn target_channel(&self) -> &[f64] {
        &self.channels[self.target]
    }

    pub fn target_name(&self) -> &str {
        &self.columns[self.target]
    }

    pub fn with_target(mut self, name: &str) -> Result<Self> {
        self.target = self.column_index(name)?;
        Ok(self)
    }

    /// Copy of the rows in `range`.
    pub fn slice(&self, range: Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.len() {
            return Err(Error::EmptySplit(format!(
                "rows {}..{} of a {}-row frame",
                range.start,
                range.end,
                self.len()
            )));
        }
        Ok(Self {
            name: self.name.clone(),
            timestamps: self.timestamps.as_ref().map(|t| t[range.clone()].to_vec()),
            columns: self.columns.clone(),
            channels: self.channels.iter().map(|c| c[range.clone()].to_vec()).collect(),
            target: self.target,
        })
    }
}

fn default_target(columns: &[String]) -> usize {
    columns
        .iter()
        .position(|c| c == DEFAULT_TARGET)
        .unwrap_or(columns.len().saturating_sub(1))
}

/// Reads a CSV with a header row. The first column is a date or index and is
/// kept only as text; every other column must be numeric. `target` defaults
/// to `"OT"` or the last column.
pub fn load_csv(path: impl AsRef<Path>, target: Option<&str>) -> Result<SeriesFrame> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into());
    read_csv(file, &name, target)
}

pub fn read_csv<R: Read>(reader: R, name: &str, target: Option<&str>) -> Result<SeriesFrame> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Csv {
            row: 1,
            column: String::new(),
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.len() < 2 {
        return Err(Error::Csv {
            row: 1,
            column: String::new(),
            message: "need a date/index column and at least one value column".into(),
        });
    }
    let columns = headers[1..].to_vec();
    let mut channels = vec![Vec::new(); columns.len()];
    let mut stamps = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Csv {
            row: line,
            column: String::new(),
            message: e.to_string(),
        })?;
        stamps.push(rec.get(0).unwrap_or_default().to_string());
        for (c, ch) in channels.iter_mut().enumerate() {
            let cell = rec.get(c + 1).unwrap_or_default().trim();
            let v: f64 = cell.parse().map_err(|_| Error::Csv {
                row: line,
                column: columns[c].clone(),
                message: format!("not a number: {cell:?}"),
            })?;
            ch.push(v);
        }
    }
    if stamps.is_empty() {
        return Err(Error::Csv {
            row: 2,
            column: String::new(),
            message: "no data rows".into(),
        });
    }
    let target = match target {
        Some(t) => columns
            .iter()
            .position(|c| c == t)
            .ok_or_else(|| Error::MissingColumn(t.to_string()))?,
        None => default_target(&columns),
    };
    let frame = SeriesFrame {
        name: name.to_string(),
        timestamps: Some(stamps),
        columns,
        channels,
        target,
    };
    frame.validate()?;
    Ok(frame)
}

/// Writes `frame` in the layout [`load_csv`] reads. Without timestamps the
/// first column holds the row index.
pub fn write_csv<W: Write>(frame: &SeriesFrame, writer: W) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Csv {
        row: 0,
        column: String::new(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["date".to_string()];
    header.extend(frame.columns.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for r in 0..frame.len() {
        let mut row = vec![match &frame.timestamps {
            Some(t) => t[r].clone(),
            None => r.to_string(),
        }];
        row.extend(frame.channels.iter().map(|c| c[r].to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(frame: &SeriesFrame, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(frame, std::io::BufWriter::new(file))
}

/// Replaces `sentinel` entries by linear interpolation between the nearest
/// valid neighbours; leading and trailing runs copy the nearest valid value.
pub fn clean_sentinels(frame: &SeriesFrame, sentinel: f64) -> Result<SeriesFrame> {
    let mut out = frame.clone();
    for (c, ch) in out.channels.iter_mut().enumerate() {
        let valid: Vec<usize> = (0..ch.len()).filter(|&i| ch[i] != sentinel).collect();
        if valid.len() == ch.len() {
            continue;
        }
        let (Some(&first), Some(&last)) = (valid.first(), valid.last()) else {
            return Err(Error::InvalidInput(format!(
                "channel {:?} holds only sentinel values",
                frame.columns[c]
            )));
        };
        for i in 0..first {
            ch[i] = ch[first];
        }
        for i in last + 1..ch.len() {
            ch[i] = ch[last];
        }
        for pair in valid.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b - a > 1 {
                let (va, vb) = (ch[a], ch[b]);
                for i in a + 1..b {
                    let t = (i - a) as f64 / (b - a) as f64;
                    ch[i] = va + t * (vb - va);
                }
            }
        }
    }
    Ok(out)
}
