//! CSV, JSON and SVG writers. Floats are printed with 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use crate::run::Report;
use crate::sweep::SweepRow;

pub const CSV_HEADER: [&str; 8] = [
    "scenario_kind",
    "species",
    "param_name",
    "param_value",
    "value_rad_or_per_s",
    "error_estimate",
    "converged",
    "breakdown_json",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    SvgPlotdata,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg-plotdata" | "svg" => Ok(Format::SvgPlotdata),
            other => Err(format!("unknown format `{other}` (expected csv, json or svg-plotdata)")),
        }
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Wraps a serde_json formatter, replacing its float output with `{:.16e}`.
struct Sci<F>(F);

impl<F: Formatter> Formatter for Sci<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_f64(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn end_object_key<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_compact<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sci(CompactFormatter));
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn to_json_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sci(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// One output row, shared by single runs and sweeps.
#[derive(Debug, Clone)]
pub struct Row<'a> {
    pub scenario_kind: &'a str,
    pub species: &'a str,
    /// Empty for single runs.
    pub param_name: &'a str,
    pub param_value: Option<f64>,
    pub outcome: Result<&'a Report, &'a str>,
}

impl<'a> Row<'a> {
    pub fn from_report(report: &'a Report) -> Self {
        Row {
            scenario_kind: &report.kind,
            species: &report.species,
            param_name: "",
            param_value: None,
            outcome: Ok(report),
        }
    }

    pub fn from_sweep(kind: &'a str, species: &'a str, param: &'a str, row: &'a SweepRow) -> Self {
        Row {
            scenario_kind: kind,
            species,
            param_name: param,
            param_value: Some(row.param_value),
            outcome: row.outcome.as_ref().map_err(String::as_str),
        }
    }

    fn value(&self) -> Option<f64> {
        self.outcome.ok().map(|r| r.value)
    }
}

pub fn csv_string(rows: &[Row]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory CSV");
    for row in rows {
        let param_value = row.param_value.map(fmt_f64).unwrap_or_default();
        let record = match row.outcome {
            Ok(r) => [
                row.scenario_kind.to_string(),
                row.species.to_string(),
                row.param_name.to_string(),
                param_value,
                fmt_f64(r.value),
                fmt_f64(r.error_estimate),
                r.converged.to_string(),
                to_json_compact(&r.breakdown),
            ],
            Err(message) => [
                row.scenario_kind.to_string(),
                row.species.to_string(),
                row.param_name.to_string(),
                param_value,
                fmt_f64(f64::NAN),
                fmt_f64(f64::NAN),
                "false".to_string(),
                to_json_compact(&serde_json::json!({ "error": message })),
            ],
        };
        w.write_record(&record).expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
}

#[derive(Serialize)]
struct JsonSweepRow<'a> {
    param_name: &'a str,
    param_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

/// A single report as an object, several as an array, sweep rows as an
/// array of `{param_name, param_value, report | error}`.
pub fn json_string(rows: &[Row]) -> String {
    if rows.iter().all(|r| r.param_value.is_none()) {
        let reports: Vec<&Report> = rows.iter().filter_map(|r| r.outcome.ok()).collect();
        return match reports.as_slice() {
            [one] => to_json_pretty(one),
            many => to_json_pretty(many),
        };
    }
    let out: Vec<JsonSweepRow> = rows
        .iter()
        .map(|r| JsonSweepRow {
            param_name: r.param_name,
            param_value: r.param_value.unwrap_or(f64::NAN),
            report: r.outcome.ok(),
            error: r.outcome.err(),
        })
        .collect();
    to_json_pretty(&out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Static SVG of value against the swept parameter (or row index), one
/// polyline per series. Axes are logarithmic when the data are positive
/// and span more than two decades.
pub fn svg_string(rows: &[Row]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 60.0;
    let points: Vec<(f64, f64)> = rows
        .iter()
        .enumerate()
        .filter_map(|(i, r)| Some((r.param_value.unwrap_or(i as f64), r.value()?)))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let x_label = rows.first().map(|r| r.param_name).filter(|n| !n.is_empty()).unwrap_or("row");
    let unit = rows
        .iter()
        .find_map(|r| r.outcome.ok())
        .map(|r| r.unit.as_str())
        .unwrap_or("");
    let title = rows.first().map(|r| format!("{} / {}", r.scenario_kind, r.species)).unwrap_or_default();

    let axis = |vals: Vec<f64>| {
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log = lo > 0.0 && hi / lo > 100.0;
        let (lo, hi) = if log { (lo.log10(), hi.log10()) } else { (lo, hi) };
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        (log, lo, hi)
    };
    let mut svg = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{M}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{cx}\" y=\"{tx}\" text-anchor=\"middle\" font-size=\"14\">{t}</text>\n",
        b = H - M,
        r = W - M,
        cx = W / 2.0,
        tx = M / 2.0,
        t = xml_escape(&title),
    );
    if !points.is_empty() {
        let (xlog, x0, x1) = axis(points.iter().map(|p| p.0).collect());
        let (ylog, y0, y1) = axis(points.iter().map(|p| p.1).collect());
        let tr = |v: f64, log: bool| if log { v.log10() } else { v };
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| {
                let px = M + (tr(x, xlog) - x0) / (x1 - x0) * (W - 2.0 * M);
                let py = H - M - (tr(y, ylog) - y0) / (y1 - y0) * (H - 2.0 * M);
                format!("{px:.3},{py:.3}")
            })
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        for c in &coords {
            let (px, py) = c.split_once(',').expect("x,y pair");
            svg.push_str(&format!("<circle cx=\"{px}\" cy=\"{py}\" r=\"3\" fill=\"steelblue\"/>\n"));
        }
        let tag = |log: bool| if log { " (log10)" } else { "" };
        svg.push_str(&format!(
            "<text x=\"{M}\" y=\"{ly}\" font-size=\"11\">{}</text>\n\
             <text x=\"{rx}\" y=\"{ly}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n\
             <text x=\"{cx}\" y=\"{lx}\" font-size=\"12\" text-anchor=\"middle\">{}{}</text>\n\
             <text x=\"4\" y=\"{by}\" font-size=\"11\">{}</text>\n\
             <text x=\"4\" y=\"{ty}\" font-size=\"11\">{}</text>\n\
             <text x=\"4\" y=\"{my}\" font-size=\"12\">value [{}]{}</text>\n",
            fmt_f64(x0),
            fmt_f64(x1),
            xml_escape(x_label),
            tag(xlog),
            fmt_f64(y0),
            fmt_f64(y1),
            xml_escape(unit),
            tag(ylog),
            ly = H - M + 16.0,
            rx = W - M,
            cx = W / 2.0,
            lx = H - 12.0,
            by = H - M,
            ty = M - 4.0,
            my = H / 2.0,
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn render(rows: &[Row], format: Format) -> String {
    match format {
        Format::Csv => csv_string(rows),
        Format::Json => json_string(rows),
        Format::SvgPlotdata => svg_string(rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn report(value: f64) -> Report {
        Report {
            toolkit_version: "0".into(),
            constants_hash: "h".into(),
            operation: "op".into(),
            kind: "sagnac".into(),
            species: "X, \"quoted\"".into(),
            value,
            unit: "rad".into(),
            error_estimate: 1e-20,
            converged: true,
            breakdown: BTreeMap::from([("a".to_string(), 0.1), ("b".to_string(), -3.0)]),
            warnings: vec!["w".into()],
            spectrum: Some(vec![[1.0, 2.0]]),
        }
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-3.0), "-3.0000000000000000e0");
        for x in [0.1, 1.0 / 3.0, 6.02e23, -1e-300, f64::MIN_POSITIVE, 5e-324] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn single_report_csv() {
        let r = report(1.0 / 3.0);
        let text = csv_string(&[Row::from_report(&r)]);
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
        let records: Vec<_> = reader.records().map(Result::unwrap).collect();
        assert_eq!(records.len(), 1);
        assert_eq!(&records[0][1], "X, \"quoted\"");
        assert_eq!(records[0][4].parse::<f64>().unwrap(), 1.0 / 3.0);
        let breakdown: BTreeMap<String, f64> = serde_json::from_str(&records[0][7]).unwrap();
        assert_eq!(breakdown, r.breakdown);
    }

    #[test]
    fn json_round_trip() {
        let r = report(0.1 + 0.2);
        let text = json_string(&[Row::from_report(&r)]);
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn svg_has_one_polyline() {
        let reports: Vec<Report> = (1..5).map(|i| report(i as f64)).collect();
        let rows: Vec<Row> = reports.iter().map(Row::from_report).collect();
        let svg = svg_string(&rows);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("&quot;quoted&quot;"));
    }
}
