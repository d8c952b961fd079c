use std::io::Write;

use anyhow::Result;
use kfull::{Bounded, Real, Table};
use serde::Serialize;

use crate::config::Format;

/// Full-precision decimal rendering used by the machine formats.
pub fn full(x: kfull::Dd) -> String {
    x.to_sci(32)
}

pub fn radius(x: kfull::Dd) -> String {
    x.to_sci(3)
}

#[derive(Serialize)]
pub struct CellRow {
    pub k: u32,
    pub l: usize,
    pub m: usize,
    pub value: String,
    pub radius: String,
    pub method: String,
}

pub fn table_rows(t: &Table) -> Vec<CellRow> {
    let mut rows = Vec::new();
    for l in 0..=t.max_index {
        for m in l..=t.max_index {
            let c = t.entries[l][m];
            rows.push(CellRow {
                k: t.k,
                l,
                m,
                value: full(c.value),
                radius: radius(c.radius),
                method: t.method.name().to_string(),
            });
        }
    }
    rows
}

pub fn write_table(out: &mut dyn Write, t: &Table, format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "k,l,m,value,radius,method")?;
            for r in table_rows(t) {
                writeln!(out, "{},{},{},{},{},{}", r.k, r.l, r.m, r.value, r.radius, r.method)?;
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &table_rows(t))?;
            writeln!(out)?;
        }
        Format::Text => write_table_text(out, t)?,
    }
    Ok(())
}

/// Cut (not rounded) to `decimals` places, the convention of the published
/// tables.
pub fn truncate_fixed(x: kfull::Dd, decimals: usize) -> String {
    let scale = kfull::Dd::lit(10.0).powi(decimals as i32);
    let cut = (x.abs() * scale).floor() / scale;
    let s = cut.to_fixed(decimals);
    if x.hi() < 0.0 && cut.hi() != 0.0 {
        format!("-{s}")
    } else {
        s
    }
}

/// Upper-triangular layout: one row per ℓ, blank below the diagonal,
/// six decimals.
fn write_table_text(out: &mut dyn Write, t: &Table) -> Result<()> {
    const W: usize = 10;
    write!(out, "{:>4}", "l\\m")?;
    for m in 0..=t.max_index {
        write!(out, "{m:>W$}")?;
    }
    writeln!(out)?;
    for l in 0..=t.max_index {
        write!(out, "{l:>4}")?;
        for m in 0..=t.max_index {
            if m < l {
                write!(out, "{:>W$}", "")?;
            } else {
                write!(out, "{:>W$}", truncate_fixed(t.entries[l][m].value, 6))?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: String,
    pub radius: String,
}

impl NamedValue {
    pub fn new(name: impl Into<String>, x: Bounded) -> Self {
        NamedValue {
            name: name.into(),
            value: full(x.value),
            radius: radius(x.radius),
        }
    }
}

pub fn write_named(out: &mut dyn Write, k: u32, rows: &[NamedValue], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "k,name,value,radius")?;
            for r in rows {
                writeln!(out, "{k},{},{},{}", csv_field(&r.name), r.value, r.radius)?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                k: u32,
                constants: &'a [NamedValue],
            }
            serde_json::to_writer_pretty(&mut *out, &Doc { k, constants: rows })?;
            writeln!(out)?;
        }
        Format::Text => {
            let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
            for r in rows {
                writeln!(out, "{:<w$}  {}  ± {}", r.name, r.value, r.radius)?;
            }
        }
    }
    Ok(())
}

/// Escapes a CSV field only when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_not_rounding() {
        assert_eq!(truncate_fixed(kfull::Dd::lit(0.1079205), 6), "0.107920");
        assert_eq!(truncate_fixed(kfull::Dd::lit(0.0000019), 6), "0.000001");
        assert_eq!(truncate_fixed(kfull::Dd::lit(-0.25), 1), "-0.2");
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("2,1"), "\"2,1\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
