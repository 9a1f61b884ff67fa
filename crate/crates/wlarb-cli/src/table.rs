//! Tabular output: CSV and JSON-lines rendering with stable formatting.
//!
//! Floats are serialized to at most nine significant digits with trailing
//! zeros trimmed, which keeps files byte-identical across reruns, thread
//! counts and platforms.

/// One cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Int(u64),
    Float(f64),
    /// Rendered as an empty CSV field / JSON null (e.g. an undefined
    /// conditional failure probability).
    Missing,
}

/// Column-ordered result table.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for value in row {
                if !first {
                    out.push(',');
                }
                first = false;
                match value {
                    Value::Text(s) => out.push_str(&csv_escape(s)),
                    Value::Int(v) => out.push_str(&v.to_string()),
                    Value::Float(v) => out.push_str(&fmt_sig(*v, 9)),
                    Value::Missing => {}
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push('{');
            let mut first = true;
            for (col, value) in self.columns.iter().zip(row) {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push('"');
                out.push_str(col);
                out.push_str("\":");
                match value {
                    Value::Text(s) => {
                        out.push('"');
                        for c in s.chars() {
                            match c {
                                '"' => out.push_str("\\\""),
                                '\\' => out.push_str("\\\\"),
                                c if (c as u32) < 0x20 => {
                                    out.push_str(&format!("\\u{:04x}", c as u32))
                                }
                                c => out.push(c),
                            }
                        }
                        out.push('"');
                    }
                    Value::Int(v) => out.push_str(&v.to_string()),
                    Value::Float(v) if v.is_finite() => out.push_str(&fmt_sig(*v, 9)),
                    Value::Float(_) | Value::Missing => out.push_str("null"),
                }
            }
            out.push_str("}\n");
        }
        out
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Formats `x` with at most `sig` significant digits, trailing zeros
/// trimmed; plain decimal notation for moderate exponents, `d.dde<exp>`
/// otherwise.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let formatted = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = formatted.split_once('e').expect("exponential form");
    let exp: i32 = exp.parse().expect("valid exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    if digits.is_empty() {
        return "0".to_string();
    }

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-4..=14).contains(&exp) {
        let len = digits.len() as i32;
        if exp >= len - 1 {
            out.push_str(digits);
            for _ in 0..(exp - (len - 1)) {
                out.push('0');
            }
        } else if exp >= 0 {
            let (int_part, frac_part) = digits.split_at(exp as usize + 1);
            out.push_str(int_part);
            out.push('.');
            out.push_str(frac_part);
        } else {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(digits);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}
