//! File formats: pmfs (CSV or JSON), spectrum dumps, maps, joint and
//! conditional tables, and JSON reports.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::channel::ChannelMap;
use crate::error::{Error, Result};
use crate::source::{DeterministicMap, JointPmf};
use crate::spectrum::{dump_rows, Pmf, PmfRecord, Spectrum};

const TAIL_PREFIX: &str = "tail_mass=";

/// One parsed CSV record with its 1-based line number.
type Record = (u64, Vec<String>);

/// Reads comma-separated records, skipping `#` comments and blank lines. A
/// first record equal to `header` (case-insensitive) is dropped; it is also
/// dropped when its last column is not a number and `numeric_last` is set.
fn records(text: &str, header: &[&str], numeric_last: bool) -> Result<Vec<Record>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line());
            Error::parse(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        if k == 0 && out.is_empty() {
            let is_header = fields.len() == header.len()
                && fields.iter().zip(header).all(|(f, h)| f.eq_ignore_ascii_case(h));
            let non_numeric = numeric_last && fields.last().is_some_and(|f| f.parse::<f64>().is_err());
            if is_header || non_numeric {
                continue;
            }
        }
        if fields.len() != header.len() {
            return Err(Error::parse(
                Some(line),
                format!("expected {} columns ({}), found {}", header.len(), header.join(","), fields.len()),
            ));
        }
        out.push((line, fields));
    }
    Ok(out)
}

fn parse_prob(line: u64, field: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|p| p.is_finite() && *p >= 0.0)
        .ok_or_else(|| Error::parse(Some(line), format!("`{field}` is not a probability")))
}

fn invalid_as_parse(e: Error) -> Error {
    match e {
        Error::InvalidPmf(msg) => Error::parse(None, msg),
        other => other,
    }
}

/// Parses a pmf from CSV `label,prob` rows (optional header; an optional
/// `# tail_mass=<t>` comment) or from JSON `{"labels", "probs", "tail_mass"}`.
pub fn parse_pmf(text: &str) -> Result<Pmf> {
    if text.trim_start().starts_with('{') {
        let rec: PmfRecord = serde_json::from_str(text).map_err(|e| Error::parse(Some(e.line() as u64), e.to_string()))?;
        return Pmf::try_from(rec).map_err(invalid_as_parse);
    }
    let mut tail = 0.0;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix(TAIL_PREFIX) {
                tail = parse_prob(i as u64 + 1, v.trim())?;
            }
        }
    }
    let mut labels = Vec::new();
    let mut probs = Vec::new();
    for (line, f) in records(text, &["label", "prob"], true)? {
        probs.push(parse_prob(line, &f[1])?);
        labels.push(f[0].clone());
    }
    if labels.is_empty() {
        return Err(Error::parse(None, "no pmf rows"));
    }
    Pmf::with_tail(labels, probs, tail).map_err(invalid_as_parse)
}

pub fn read_pmf(path: &Path) -> Result<Pmf> {
    parse_pmf(&fs::read_to_string(path)?)
}

pub fn write_pmf_csv<W: Write>(w: W, p: &Pmf) -> Result<()> {
    let mut out = w;
    if p.tail_mass() > 0.0 {
        writeln!(out, "# {TAIL_PREFIX}{}", p.tail_mass())?;
    }
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["label", "prob"])?;
    for (l, pr) in p.iter() {
        wtr.write_record([l, &pr.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(w: W, s: &Spectrum) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["delta_lo", "delta_hi", "c_value"])?;
    for (lo, hi, v) in dump_rows(s) {
        wtr.write_record([lo.to_string(), hi.to_string(), v.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_map_csv<W: Write>(w: W, m: &DeterministicMap) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["from_label", "to_label"])?;
    for (a, b) in m.rows() {
        wtr.write_record([a, b])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads `from_label,to_label` rows; the codomain is the images in order of
/// first appearance.
pub fn parse_map(text: &str) -> Result<DeterministicMap> {
    let rows = records(text, &["from_label", "to_label"], false)?;
    let mut codomain: Vec<String> = Vec::new();
    for (_, f) in &rows {
        if !codomain.contains(&f[1]) {
            codomain.push(f[1].clone());
        }
    }
    let mut seen = HashMap::new();
    for (line, f) in &rows {
        if let Some(prev) = seen.insert(f[0].clone(), *line) {
            return Err(Error::parse(
                Some(*line),
                format!("`{}` already mapped on line {prev}", f[0]),
            ));
        }
    }
    DeterministicMap::from_pairs(rows.into_iter().map(|(_, f)| (f[0].clone(), f[1].clone())), codomain)
}

pub fn write_joint_csv<W: Write>(w: W, j: &JointPmf) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["x_label", "y_label", "prob"])?;
    for (x, y, p) in j.rows() {
        wtr.write_record([x, y, &p.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads `x_label,<out>_label,prob` rows into one pmf per input, in order of
/// first appearance. `out` is `y` for channels and `z` for couplings.
pub fn parse_conditional(text: &str, out: &str) -> Result<Vec<(String, Pmf)>> {
    let col = format!("{out}_label");
    let rows = records(text, &["x_label", &col, "prob"], true)?;
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, (u64, Vec<String>, Vec<f64>)> = HashMap::new();
    for (line, f) in rows {
        let p = parse_prob(line, &f[2])?;
        let g = groups.entry(f[0].clone()).or_insert_with(|| {
            order.push(f[0].clone());
            (line, Vec::new(), Vec::new())
        });
        g.1.push(f[1].clone());
        g.2.push(p);
    }
    order
        .into_iter()
        .map(|x| {
            let (line, labels, probs) = groups.remove(&x).expect("grouped above");
            let pmf = Pmf::new(labels, probs).map_err(|e| {
                Error::parse(Some(line), format!("row group for input `{x}`: {e}"))
            })?;
            Ok((x, pmf))
        })
        .collect()
}

pub fn write_conditional_csv<'a, W, I>(w: W, out: &str, rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a Pmf)>,
{
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["x_label", &format!("{out}_label"), "prob"])?;
    for (x, pmf) in rows {
        for (y, p) in pmf.iter() {
            wtr.write_record([x, y, &p.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_channel_map_csv<W: Write>(w: W, cm: &ChannelMap) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["x_label", "z_label", "y_label"])?;
    for (x, z, y) in cm.rows() {
        wtr.write_record([x, z, y])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(w: W, value: &T) -> Result<()> {
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line());
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::parse(line, format!("{other:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIVE_SYMBOL: &str = "label,prob\nz1,0.025\nz2,0.075\nz3,0.2\nz4,0.3\nz5,0.4\n";

    #[test]
    fn pmf_csv_with_and_without_header() {
        let p = parse_pmf(FIVE_SYMBOL).unwrap();
        assert_eq!(p.len(), 5);
        let q = parse_pmf("a, 0.5\nb ,0.5\n").unwrap();
        assert_eq!(q.labels(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn pmf_tail_comment() {
        let p = parse_pmf("# tail_mass=0.25\na,0.5\nb,0.25\n").unwrap();
        assert_eq!(p.tail_mass(), 0.25);
    }

    #[test]
    fn pmf_json() {
        let p = parse_pmf(r#"{"labels":["a","b"],"probs":[0.75,0.25]}"#).unwrap();
        assert_eq!(p.prob("a"), 0.75);
        let mut buf = Vec::new();
        write_json(&mut buf, &p.to_record()).unwrap();
        assert_eq!(parse_pmf(std::str::from_utf8(&buf).unwrap()).unwrap(), p);
    }

    #[test]
    fn malformed_prob_reports_line() {
        let err = parse_pmf("label,prob\na,0.5\nb,zero\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(3), .. }), "{err:?}");
        let err = parse_pmf("# comment\na,0.5\nb,0.5,7\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(3), .. }), "{err:?}");
        assert!(matches!(parse_pmf("a,0.5\nb,0.4\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_pmf(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn pmf_round_trip() {
        let p = Pmf::with_tail(vec!["x".into(), "y".into()], vec![0.1, 0.7], 0.2).unwrap();
        let mut buf = Vec::new();
        write_pmf_csv(&mut buf, &p).unwrap();
        assert_eq!(parse_pmf(std::str::from_utf8(&buf).unwrap()).unwrap(), p);
    }

    #[test]
    fn spectrum_dump() {
        let s = Spectrum::from_pmf(&parse_pmf(FIVE_SYMBOL).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "delta_lo,delta_hi,c_value");
        assert_eq!(lines.len(), 6);
        assert!(lines[5].starts_with("0.975,1,3.688"));
    }

    #[test]
    fn map_round_trip() {
        let m = DeterministicMap::from_pairs(
            [("a", "u"), ("b", "v"), ("c", "u")].map(|(x, y)| (x.to_string(), y.to_string())),
            vec!["u".into(), "v".into()],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_map_csv(&mut buf, &m).unwrap();
        assert_eq!(parse_map(std::str::from_utf8(&buf).unwrap()).unwrap(), m);
        assert!(parse_map("a,u\na,v\n").is_err());
    }

    #[test]
    fn conditional_groups() {
        let text = "x_label,y_label,prob\n0,0,0.9\n1,0,0.1\n0,1,0.1\n1,1,0.9\n";
        let rows = parse_conditional(text, "y").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].0, "0");
        assert_eq!(rows[1].1.prob("1"), 0.9);
        let mut buf = Vec::new();
        write_conditional_csv(&mut buf, "y", rows.iter().map(|(x, p)| (x.as_str(), p))).unwrap();
        assert_eq!(parse_conditional(std::str::from_utf8(&buf).unwrap(), "y").unwrap(), rows);
        let bad = parse_conditional("0,0,0.9\n0,1,0.2\n", "z").unwrap_err();
        assert!(bad.to_string().contains("`0`"));
    }
}
