use cptwb::channels::TP_TOL;
use cptwb::decompose::AR4_TOL;
use cptwb::entropy::VN_WINDOW;
use cptwb::numerics::RANK_TOL;
use cptwb::optimize::VIOLATION_TOL;
use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::args::Format;

pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub trace_preserving: f64,
    pub rank: f64,
    pub value: f64,
    pub violation: f64,
    pub ar4: f64,
    pub von_neumann_window: f64,
}

impl Tolerances {
    pub fn with_value_tol(value: f64) -> Self {
        Self { trace_preserving: TP_TOL, rank: RANK_TOL, value, violation: VIOLATION_TOL, ar4: AR4_TOL, von_neumann_window: VN_WINDOW }
    }
}

/// Rows rendered as the CSV body and the text table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    /// Result field the rows were built from; text mode shows the table in its place.
    pub field: Option<&'static str>,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: Value,
    pub tolerances: Tolerances,
    pub result: Value,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, config: Value, tolerances: Tolerances, result: Value) -> Self {
        Report { tool: "cptwb", version: cptwb::VERSION, command, seed, config, tolerances, result, table: None }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = round_value(serde_json::to_value(self).expect("report serializes"));
                let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.headers).expect("in-memory write");
                for row in &t.rows {
                    w.write_record(row.iter().map(cell)).expect("in-memory write");
                }
            }
            None => {
                w.write_record(["key", "value"]).expect("in-memory write");
                for (k, v) in flatten(&self.result) {
                    w.write_record([k, v]).expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }

    fn render_text(&self) -> String {
        let mut out = format!("cptwb {} | {} | seed {}\n", self.version, self.command, self.seed);
        let skip = self.table.as_ref().and_then(|t| t.field);
        let mut flat = Vec::new();
        if let Value::Object(map) = &self.result {
            for (k, v) in map.iter().filter(|(k, _)| Some(k.as_str()) != skip) {
                walk(k, v, true, &mut flat);
            }
        } else {
            walk("", &self.result, true, &mut flat);
        }
        let width = flat.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &flat {
            let mark = if k.ends_with("violated") && v == "true" { "   <-- VIOLATED" } else { "" };
            out.push_str(&format!("  {k:<width$}  {v}{mark}\n"));
        }
        if let Some(t) = self.table.as_ref().filter(|t| t.field.is_some()) {
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(cell).collect()).collect();
            let widths: Vec<usize> = (0..t.headers.len())
                .map(|j| cells.iter().map(|r| r[j].len()).chain([t.headers[j].len()]).max().unwrap_or(0))
                .collect();
            let line = |items: Vec<&str>| {
                items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect::<Vec<_>>().join("  ")
            };
            out.push('\n');
            out.push_str(&format!("  {}\n", line(t.headers.clone())));
            let flag = t.headers.iter().position(|h| *h == "violated");
            for r in &cells {
                let hot = flag.is_some_and(|j| r[j] == "true");
                out.push_str(&format!("{} {}\n", if hot { "*" } else { " " }, line(r.iter().map(String::as_str).collect())));
            }
        }
        out
    }
}

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// Rounds every float in the tree to [`SIG_DIGITS`] significant digits.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

fn cell(v: &Value) -> String {
    match round_value(v.clone()) {
        Value::String(s) => s,
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn walk(prefix: &str, v: &Value, expand: bool, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(&key, x, expand, out);
            }
        }
        Value::Array(items) if expand && items.iter().any(Value::is_object) => {
            for (i, x) in items.iter().enumerate() {
                walk(&format!("{prefix}[{i}]"), x, expand, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

/// Dotted keys for nested objects; arrays stay as compact JSON.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk("", v, false, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn report(result: Value) -> Report {
        Report::new("multscan", 7, json!({"p_grid": "4:5:0.5"}), Tolerances::with_value_tol(1e-12), result)
    }

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-2.0 / 3.0 * 1e-20), -6.66666666667e-21);
        assert_eq!(round_sig(0.0), 0.0);
        assert!(round_sig(f64::NAN).is_nan());
    }

    #[test]
    fn integers_are_left_alone() {
        assert_eq!(round_value(json!({"n": 123456789012345u64})), json!({"n": 123456789012345u64}));
    }

    #[test]
    fn empty_scan_is_header_only() {
        let t = Table { field: Some("reports"), headers: vec!["p", "nu_a", "nu_b", "nu_ab_lb", "gap", "violated"], rows: vec![] };
        let csv = report(json!({"reports": []})).with_table(t).render(Format::Csv);
        assert_eq!(csv, "p,nu_a,nu_b,nu_ab_lb,gap,violated\n");
    }

    #[test]
    fn json_keeps_field_order_and_is_stable() {
        let r = report(json!({"z": 1.0 / 3.0, "a": true}));
        let a = r.render(Format::Json);
        assert_eq!(a, r.render(Format::Json));
        let keys = ["\"tool\"", "\"version\"", "\"command\"", "\"seed\"", "\"config\"", "\"tolerances\"", "\"result\""];
        let pos: Vec<usize> = keys.iter().map(|k| a.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(a.find("\"z\"").unwrap() < a.find("\"a\"").unwrap());
        assert!(a.contains("0.333333333333"));
        assert!(!a.contains("0.3333333333333"));
    }

    #[test]
    fn text_highlights_violations() {
        let t = Table {
            field: Some("reports"),
            headers: vec!["p", "violated"],
            rows: vec![vec![json!(4.0), json!(false)], vec![json!(5.0), json!(true)]],
        };
        let text = report(json!({"violated": true, "reports": [{"p": 4.0}], "thresholds": [{"lo": 4.5}]})).with_table(t).render(Format::Text);
        assert!(text.contains("<-- VIOLATED"));
        assert!(text.contains("thresholds[0].lo"));
        assert!(!text.contains("reports"));
        assert!(text.lines().any(|l| l.starts_with('*') && l.contains("5.0")));
        assert!(text.lines().any(|l| l.starts_with(' ') && l.contains("4.0")));
    }

    #[test]
    fn csv_fallback_flattens() {
        let csv = report(json!({"a": {"b": 1.5}, "v": [1, 2]})).render(Format::Csv);
        assert_eq!(csv, "key,value\na.b,1.5\nv,\"[1,2]\"\n");
    }
}
