//! Property tables normalized against a torus baseline of the same size.
//!
//! Diameter and MPL ratios are inverted (`baseline / topology`), bisection
//! stays `topology / baseline`, so a larger ratio is always better.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metrics::{ratio_f64, MetricsRecord};
use crate::topology::{Kind, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Torus,
    /// Circulant with the baseline's degree.
    LowDegreeCirculant,
    /// Circulant of higher degree than the baseline.
    HighDegreeCirculant,
    CirculantProduct,
    Hypercube,
    Other,
}

impl Category {
    /// Category of `t` in a table whose baseline has `baseline_degree`.
    pub fn of(t: &Topology, baseline_degree: usize) -> Category {
        match t.kind() {
            Kind::Torus(_) => Category::Torus,
            Kind::Hypercube(_) => Category::Hypercube,
            Kind::Product(_) => Category::CirculantProduct,
            Kind::Circulant(_) | Kind::Ring(_) | Kind::Complete(_) if t.max_degree() <= baseline_degree => {
                Category::LowDegreeCirculant
            }
            Kind::Circulant(_) | Kind::Ring(_) | Kind::Complete(_) => Category::HighDegreeCirculant,
            Kind::Custom => Category::Other,
        }
    }
}

/// One topology's properties, as measured or as printed to two decimals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub n: usize,
    pub k: usize,
    pub label: String,
    pub category: Category,
    pub diameter: u32,
    pub mpl: Ratio<u64>,
    pub bisection: Option<usize>,
}

impl Entry {
    pub fn from_record(label: impl Into<String>, category: Category, r: &MetricsRecord) -> Entry {
        Entry {
            n: r.n,
            k: r.degree,
            label: label.into(),
            category,
            diameter: r.diameter,
            mpl: r.mpl(),
            bisection: r.bisection,
        }
    }

    /// An entry from printed values; `mpl` is a decimal string read exactly.
    pub fn printed(
        n: usize,
        k: usize,
        label: impl Into<String>,
        category: Category,
        diameter: u32,
        mpl: &str,
        bisection: usize,
    ) -> Result<Entry> {
        Ok(Entry {
            n,
            k,
            label: label.into(),
            category,
            diameter,
            mpl: parse_decimal(mpl)?,
            bisection: Some(bisection),
        })
    }
}

fn parse_decimal(s: &str) -> Result<Ratio<u64>> {
    let bad = || Error::Report(format!("not a decimal: {s:?}"));
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) || frac.len() > 9 {
        return Err(bad());
    }
    let scale = 10u64.pow(frac.len() as u32);
    let whole = u64::from_str(int).map_err(|_| bad())?;
    let part = if frac.is_empty() { 0 } else { u64::from_str(frac).map_err(|_| bad())? };
    Ok(Ratio::new(whole * scale + part, scale))
}

fn as_f64<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(ratio_f64(*r))
}

fn as_f64_opt<S: Serializer>(r: &Option<Ratio<u64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_f64(ratio_f64(*r)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub k: usize,
    pub label: String,
    pub category: Category,
    pub diameter: u32,
    #[serde(serialize_with = "as_f64")]
    pub mpl: Ratio<u64>,
    pub bisection: Option<usize>,
    #[serde(serialize_with = "as_f64")]
    pub d_inv_ratio: Ratio<u64>,
    #[serde(serialize_with = "as_f64")]
    pub mpl_inv_ratio: Ratio<u64>,
    /// Absent when either side has no bisection (odd n).
    #[serde(serialize_with = "as_f64_opt")]
    pub bw_ratio: Option<Ratio<u64>>,
}

/// Rows for `entries` against the entry labelled `baseline`, sorted by label.
pub fn build_table(entries: &[Entry], baseline: &str) -> Result<Vec<ComparisonRow>> {
    let base = entries
        .iter()
        .find(|e| e.label == baseline)
        .ok_or_else(|| Error::Report(format!("baseline {baseline:?} not among the entries")))?;
    if let Some(e) = entries.iter().find(|e| e.n != base.n) {
        return Err(Error::Report(format!("{} has n = {}, baseline has n = {}", e.label, e.n, base.n)));
    }
    if base.diameter == 0 || *base.mpl.numer() == 0 {
        return Err(Error::Report("baseline has zero diameter".into()));
    }
    let mut rows: Vec<ComparisonRow> = entries
        .iter()
        .map(|e| {
            if e.diameter == 0 {
                return Err(Error::Report(format!("{} has zero diameter", e.label)));
            }
            let bw_ratio = match (e.bisection, base.bisection) {
                (Some(b), Some(bb)) if bb > 0 => Some(Ratio::new(b as u64, bb as u64)),
                _ => None,
            };
            Ok(ComparisonRow {
                n: e.n,
                k: e.k,
                label: e.label.clone(),
                category: e.category,
                diameter: e.diameter,
                mpl: e.mpl,
                bisection: e.bisection,
                d_inv_ratio: Ratio::new(base.diameter as u64, e.diameter as u64),
                mpl_inv_ratio: base.mpl / e.mpl,
                bw_ratio,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Averages {
    pub d_inv: f64,
    pub mpl_inv: f64,
    pub bw: Option<f64>,
}

/// Mean ratios of `category` across tables, one row per table.
pub fn average_ratios(tables: &[Vec<ComparisonRow>], category: Category) -> Result<Averages> {
    if tables.is_empty() {
        return Err(Error::Report("no tables to average".into()));
    }
    let mut rows = Vec::with_capacity(tables.len());
    for t in tables {
        let mut hits = t.iter().filter(|r| r.category == category);
        let row = hits
            .next()
            .ok_or_else(|| Error::Report(format!("{category} missing at n = {}", t.first().map_or(0, |r| r.n))))?;
        if hits.next().is_some() {
            return Err(Error::Report(format!("{category} appears twice at n = {}", row.n)));
        }
        rows.push(row);
    }
    let m = rows.len() as f64;
    let mean = |f: &dyn Fn(&ComparisonRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / m;
    let bw = rows
        .iter()
        .map(|r| r.bw_ratio.map(ratio_f64))
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.iter().sum::<f64>() / m);
    Ok(Averages { d_inv: mean(&|r| ratio_f64(r.d_inv_ratio)), mpl_inv: mean(&|r| ratio_f64(r.mpl_inv_ratio)), bw })
}

/// Percent reduction of a quantity whose inverse ratio is `inv`.
pub fn decrease_percent(inv: f64) -> f64 {
    (1.0 - 1.0 / inv) * 100.0
}

/// Percent increase for a direct ratio `r`.
pub fn increase_percent(r: f64) -> f64 {
    (r - 1.0) * 100.0
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Torus => "torus",
            Category::LowDegreeCirculant => "low-degree-circulant",
            Category::HighDegreeCirculant => "high-degree-circulant",
            Category::CirculantProduct => "circulant-product",
            Category::Hypercube => "hypercube",
            Category::Other => "other",
        })
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with header `n,k,label,D,MPL,BW,d_inv,mpl_inv,bw_ratio`, two decimals.
pub fn write_csv<W: std::io::Write>(rows: &[ComparisonRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,k,label,D,MPL,BW,d_inv,mpl_inv,bw_ratio")?;
    for r in rows {
        let bw = r.bisection.map(|b| b.to_string()).unwrap_or_default();
        let bw_ratio = r.bw_ratio.map(|x| format!("{:.2}", ratio_f64(x))).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{:.2},{},{:.2},{:.2},{}",
            r.n,
            r.k,
            csv_field(&r.label),
            r.diameter,
            ratio_f64(r.mpl),
            bw,
            ratio_f64(r.d_inv_ratio),
            ratio_f64(r.mpl_inv_ratio),
            bw_ratio
        )?;
    }
    Ok(())
}

pub fn to_json(rows: &[ComparisonRow]) -> serde_json::Value {
    serde_json::to_value(rows).expect("rows serialize")
}
