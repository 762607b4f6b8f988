//! Text, CSV and JSON renderings of core results.

use std::fmt::Write as _;

use serde::Serialize;

use fractal_core::overlap::OverlapReport;
use fractal_core::params::{format_dimension, Diagnosis, DiagnosisReport, Note};
use fractal_core::registry::{builtins, ConstructionSpec};
use fractal_core::series::{AreaLimit, SeriesRow};
use fractal_core::{QuadExt, Rat};

const SERIES_DIGITS: usize = 12;
const DIMENSION_DIGITS: usize = 3;
const TEXT_DIGITS: usize = 3;

fn json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

/// `2√3/5`, `1 + √3/2`, `-3`.
pub fn pretty(q: &QuadExt) -> String {
    let (a, b) = (q.rational(), q.surd());
    if b.is_zero() {
        return a.to_string();
    }
    let negative = *b < Rat::zero();
    let magnitude = if negative { -b } else { b.clone() };
    let numer = magnitude.numer().to_string();
    let denom = magnitude.denom().to_string();
    let mut surd = if numer == "1" {
        "√3".to_string()
    } else {
        format!("{numer}√3")
    };
    if denom != "1" {
        write!(surd, "/{denom}").unwrap();
    }
    match (a.is_zero(), negative) {
        (true, false) => surd,
        (true, true) => format!("-{surd}"),
        (false, false) => format!("{a} + {surd}"),
        (false, true) => format!("{a} - {surd}"),
    }
}

fn area_summary(area: &AreaLimit, conditional: bool) -> String {
    let text = match area {
        AreaLimit::Zero => "0".to_string(),
        AreaLimit::ConstantA0(Some(v)) => pretty(v),
        AreaLimit::ConstantA0(None) => "constant".to_string(),
        AreaLimit::Finite(Some(v)) => pretty(v),
        AreaLimit::Finite(None) => "finite".to_string(),
        AreaLimit::LinearGrowth(_) => "linear growth".to_string(),
        AreaLimit::Infinite => "divergent".to_string(),
        AreaLimit::NotRealizable => "not realizable".to_string(),
    };
    if conditional {
        format!("{text} (conditional)")
    } else {
        text
    }
}

fn note_text(note: Note) -> &'static str {
    match note {
        Note::ConditionalOnNonOverlap => {
            "holds only if the added bumps never overlap each other or the existing region"
        }
        Note::LimitValueNeedsGenerator => {
            "a finite limit exists; its value needs a concrete generator"
        }
        Note::CountsWithMultiplicity => {
            "the divergent quantity is the area counted with multiplicity"
        }
        Note::SinglePieceExtension => {
            "N = 1 is a degenerate case; the regime inequalities are applied as written"
        }
    }
}

pub fn diagnosis_text(d: &Diagnosis, name: Option<&str>) -> String {
    let conditional = d.conditional_on_nonoverlap();
    let mut out = String::new();
    let mut line = |key: &str, value: String| writeln!(out, "{key:<13}{value}").unwrap();
    if let Some(name) = name {
        line("construction", name.to_string());
    }
    line("N", d.params.n_pieces().to_string());
    line("r", d.params.scale().to_string());
    line("class", d.params.class().to_string());
    line("alpha", d.ratios.alpha.to_string());
    line("beta", d.ratios.beta.to_string());
    line("dimension", format_dimension(d.dimension, DIMENSION_DIGITS));
    line("regime", d.regime.to_string());
    line("perimeter", d.perimeter.to_string());
    let area = match (&d.area, d.area.value()) {
        (AreaLimit::LinearGrowth(Some(c)), _) => format!("linear growth, +{} per step", pretty(c)),
        (_, Some(v)) if !v.is_rational() => format!(
            "{} ≈ {}",
            area_summary(&d.area, false),
            v.to_decimal(TEXT_DIGITS)
        ),
        _ => area_summary(&d.area, false),
    };
    line(
        "area",
        if conditional {
            format!("{area} [1]")
        } else {
            area
        },
    );
    let notes: Vec<_> = d.notes.iter().map(|n| note_text(*n)).collect();
    for (i, note) in notes.iter().enumerate() {
        writeln!(out, "[{}] {note}", i + 1).unwrap();
    }
    out
}

#[derive(Serialize)]
struct NamedDiagnosis<'a> {
    construction: Option<&'a str>,
    #[serde(flatten)]
    report: DiagnosisReport,
    dimension_display: String,
}

pub fn diagnosis_json(d: &Diagnosis, name: Option<&str>) -> String {
    json(&NamedDiagnosis {
        construction: name,
        report: DiagnosisReport::from(d),
        dimension_display: format_dimension(d.dimension, DIMENSION_DIGITS),
    })
}

/// One series row, shared by the CSV and JSON forms.
#[derive(Serialize)]
struct SeriesRecord {
    n: u32,
    element_count: String,
    element_length: String,
    perimeter_exact: String,
    perimeter_decimal: String,
    area_exact: Option<String>,
    area_decimal: Option<String>,
}

impl From<&SeriesRow> for SeriesRecord {
    fn from(row: &SeriesRow) -> Self {
        SeriesRecord {
            n: row.depth,
            element_count: row.element_count.to_string(),
            element_length: row.element_length.to_string(),
            perimeter_exact: row.perimeter.to_string(),
            perimeter_decimal: row.perimeter.to_decimal(SERIES_DIGITS),
            area_exact: row.area.as_ref().map(|a| a.to_string()),
            area_decimal: row.area.as_ref().map(|a| a.to_decimal(SERIES_DIGITS)),
        }
    }
}

pub fn series_csv(rows: &[SeriesRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(SeriesRecord::from(row))
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv is UTF-8")
}

pub fn series_json(rows: &[SeriesRow]) -> String {
    json(&rows.iter().map(SeriesRecord::from).collect::<Vec<_>>())
}

pub fn iterate_summary(
    spec: &ConstructionSpec,
    depth: u32,
    elements: &str,
    perimeter: (&QuadExt, &QuadExt),
    area: (&QuadExt, &QuadExt),
) -> String {
    let verdict = |(measured, expected): (&QuadExt, &QuadExt)| {
        let status = if measured == expected {
            "match"
        } else {
            "MISMATCH"
        };
        format!(
            "{} ≈ {} (series {}, {status})",
            pretty(measured),
            measured.to_decimal(SERIES_DIGITS),
            pretty(expected)
        )
    };
    let mut out = String::new();
    writeln!(out, "construction {}", spec.name()).unwrap();
    writeln!(out, "depth        {depth}").unwrap();
    writeln!(out, "elements     {elements}").unwrap();
    writeln!(out, "perimeter    {}", verdict(perimeter)).unwrap();
    writeln!(out, "area         {}", verdict(area)).unwrap();
    out
}

pub fn overlap_text(reports: &[OverlapReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = if r.skipped {
            "skipped (an earlier depth failed)".to_string()
        } else if r.certified {
            let touches = match r.touch_points {
                Some(0) | None => String::new(),
                Some(k) => format!(", {k} touch points"),
            };
            format!("certified{touches}")
        } else if let Some((i, j)) = r.witness {
            format!("FAILED: segments {i} and {j} cross")
        } else {
            "FAILED: area differs from the series".to_string()
        };
        writeln!(out, "depth {}: {status}", r.depth).unwrap();
    }
    out
}

/// One row of the built-in summary, derived from the registered rule.
#[derive(Serialize)]
pub struct TableRow {
    name: String,
    #[serde(flatten)]
    report: DiagnosisReport,
    dimension_display: String,
    area_display: String,
}

pub fn table_rows() -> fractal_core::Result<Vec<TableRow>> {
    builtins()
        .iter()
        .map(|spec| {
            let d = spec.diagnose()?;
            Ok(TableRow {
                name: spec.name().to_string(),
                dimension_display: format_dimension(d.dimension, DIMENSION_DIGITS),
                area_display: area_summary(&d.area, d.conditional_on_nonoverlap()),
                report: DiagnosisReport::from(&d),
            })
        })
        .collect()
}

pub fn table_text(rows: &[TableRow]) -> String {
    let header = [
        "name",
        "N",
        "r",
        "class",
        "alpha",
        "beta",
        "D",
        "regime",
        "perimeter",
        "area",
    ];
    let cells: Vec<[String; 10]> = rows
        .iter()
        .map(|row| {
            let r = &row.report;
            [
                row.name.clone(),
                r.n.to_string(),
                r.r.clone(),
                r.class.to_string(),
                r.alpha.clone(),
                r.beta.clone(),
                row.dimension_display.clone(),
                r.regime.to_string(),
                r.perimeter.to_string(),
                row.area_display.clone(),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut emit = |row: Vec<&str>| {
        let line: Vec<String> = row
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
    };
    emit(header.to_vec());
    for row in &cells {
        emit(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn table_json(rows: &[TableRow]) -> String {
    json(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: (i64, i64), b: (i64, i64)) -> QuadExt {
        QuadExt::new(Rat::new(a.0, a.1), Rat::new(b.0, b.1))
    }

    #[test]
    fn pretty_forms() {
        assert_eq!(pretty(&q((0, 1), (2, 5))), "2√3/5");
        assert_eq!(pretty(&q((1, 1), (1, 2))), "1 + √3/2");
        assert_eq!(pretty(&q((1, 1), (-1, 1))), "1 - √3");
        assert_eq!(pretty(&q((7, 5), (0, 1))), "7/5");
        assert_eq!(pretty(&q((0, 1), (-3, 1))), "-3√3");
    }
}
