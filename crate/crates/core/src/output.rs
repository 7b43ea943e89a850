//! Deterministic text serialization: CSV tables with a one-line header and the
//! equivalent JSON records. Reals are printed with 15 significant digits.

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{Map, Number, Value};

/// Formats `x` with 15 significant digits in the style of C's `%.15g`.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if negative { "-" } else { "" };

    if !(-5..15).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        return format!("{sign}0.{zeros}{digits}");
    }
    let int_len = exp as usize + 1;
    if digits.len() <= int_len {
        let pad = "0".repeat(int_len - digits.len());
        format!("{sign}{digits}{pad}")
    } else {
        let (int, frac) = digits.split_at(int_len);
        format!("{sign}{int}.{frac}")
    }
}

fn json_real(x: f64) -> Value {
    // Round-trip through the CSV text so both formats carry the same values.
    fmt_real(x)
        .parse::<f64>()
        .ok()
        .and_then(Number::from_f64)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Named real-valued columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| fmt_real(v))).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("ascii output")
    }

    /// Array of objects keyed by column name.
    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, &v) in self.columns.iter().zip(row) {
                    obj.insert(name.clone(), json_real(v));
                }
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(records)).expect("serializable");
        s.push('\n');
        s
    }
}

/// Dense matrix as a table with columns `c0, c1, ...`, one row per matrix row.
pub fn matrix_table(m: &DMatrix<f64>) -> Table {
    let mut t = Table::new((0..m.ncols()).map(|j| format!("c{j}")));
    for i in 0..m.nrows() {
        t.push(m.row(i).iter().copied().collect());
    }
    t
}

#[derive(Serialize)]
struct MatrixRecord {
    rows: usize,
    cols: usize,
    data: Vec<Value>,
}

/// Row-major JSON: `{"rows": n, "cols": m, "data": [...]}`.
pub fn matrix_json(m: &DMatrix<f64>) -> String {
    let mut data = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            data.push(json_real(m[(i, j)]));
        }
    }
    let record = MatrixRecord {
        rows: m.nrows(),
        cols: m.ncols(),
        data,
    };
    let mut s = serde_json::to_string_pretty(&record).expect("serializable");
    s.push('\n');
    s
}

/// Inverse of [`matrix_json`].
pub fn parse_matrix_json(text: &str) -> Option<DMatrix<f64>> {
    let v: Value = serde_json::from_str(text).ok()?;
    let rows = v.get("rows")?.as_u64()? as usize;
    let cols = v.get("cols")?.as_u64()? as usize;
    let data: Vec<f64> = v
        .get("data")?
        .as_array()?
        .iter()
        .map(|x| x.as_f64())
        .collect::<Option<_>>()?;
    (data.len() == rows * cols).then(|| DMatrix::from_row_slice(rows, cols, &data))
}
