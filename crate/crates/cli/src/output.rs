//! Rendering shared by every subcommand: a table goes out either as CSV
//! (header row plus one line per record, optional invocation comment) or
//! as pretty JSON. The JSON form never carries the comment, so it is
//! byte-reproducible by construction; CSV is reproducible under
//! `--no-meta`.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One rendered cell. Floats are formatted to six significant digits so
/// CSV stays readable; JSON keeps native numbers.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(u64),
    Signed(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Signed(v) => v.to_string(),
            Cell::Float(v) => fmt_sig(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Structured twin of the same data, used verbatim for JSON output.
    pub json: serde_json::Value,
}

impl Table {
    pub fn render(&self, format: OutputFormat, meta: Option<&str>) -> String {
        match format {
            OutputFormat::Json => {
                let mut text = serde_json::to_string_pretty(&self.json)
                    .expect("report serialization is infallible");
                text.push('\n');
                text
            }
            OutputFormat::Csv => {
                let mut out = String::new();
                if let Some(meta) = meta {
                    let _ = writeln!(out, "# {meta}");
                }
                let _ = writeln!(out, "{}", self.headers.join(","));
                for row in &self.rows {
                    debug_assert_eq!(row.len(), self.headers.len());
                    let cells: Vec<String> = row.iter().map(Cell::render).collect();
                    let _ = writeln!(out, "{}", cells.join(","));
                }
                out
            }
        }
    }
}

/// Six significant digits; plain decimal notation in the human range,
/// scientific outside it.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}
