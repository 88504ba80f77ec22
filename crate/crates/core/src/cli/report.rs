//! Report model and its CSV / JSON / Markdown renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub command: String,
    pub n: u32,
    pub h: u32,
    pub q: usize,
    pub xi: i64,
    pub suites: Vec<String>,
    pub table: Option<u8>,
    pub extended: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub id: u8,
    pub title: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub formulas: Vec<Vec<String>>,
    pub expected: Vec<Vec<Option<i64>>>,
    pub computed: Vec<Vec<Option<i64>>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub row_notes: Vec<String>,
    pub pass: bool,
}

impl TableReport {
    pub fn finish(mut self) -> Self {
        self.pass = self
            .expected
            .iter()
            .zip(&self.computed)
            .all(|(e, c)| e.iter().zip(c).all(|(e, c)| e.is_some() && e == c));
        self
    }

    pub fn mismatches(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, (e, c)) in self.expected.iter().zip(&self.computed).enumerate() {
            for (j, (e, c)) in e.iter().zip(c).enumerate() {
                if e.is_none() || e != c {
                    out.push(format!(
                        "table {} cell ({}, {}): expected {} = {}, computed {}",
                        self.id,
                        self.rows[i],
                        self.cols[j],
                        self.formulas[i][j],
                        show(e),
                        show(c)
                    ));
                }
            }
        }
        out
    }
}

fn show(v: &Option<i64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub suite: String,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub workers: usize,
    pub suites_ms: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: Config,
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
    pub tables: Vec<TableReport>,
    pub counterexamples: Vec<Counterexample>,
    pub timings: Timings,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            Format::Csv => self.csv(),
            Format::Markdown => self.markdown(),
        }
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["section", "name", "row", "col", "formula", "expected", "computed", "pass"]).unwrap();
        for s in &self.suites {
            for c in &s.checks {
                let sec = format!("suite:{}", s.name);
                w.write_record([&sec, &c.name, "", "", "", &c.expected, &c.computed, &c.pass.to_string()])
                    .unwrap();
            }
        }
        for t in &self.tables {
            let sec = format!("table:{}", t.id);
            for (i, r) in t.rows.iter().enumerate() {
                for (j, c) in t.cols.iter().enumerate() {
                    let (e, v) = (&t.expected[i][j], &t.computed[i][j]);
                    let pass = e.is_some() && e == v;
                    w.write_record([&sec, &t.title, r, c, &t.formulas[i][j], &show(e), &show(v), &pass.to_string()])
                        .unwrap();
                }
            }
        }
        for c in &self.counterexamples {
            w.write_record(["counterexample", &c.suite, &c.check, "", "", "", &c.detail, "false"]).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    fn markdown(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let _ = writeln!(s, "# arcgeom {}: n = {}, h = {}, q = {}\n", c.command, c.n, c.h, c.q);
        let _ = writeln!(s, "Overall: **{}**\n", if self.pass { "PASS" } else { "FAIL" });
        if !self.suites.is_empty() {
            let _ = writeln!(s, "| suite | check | expected | computed | pass |\n|---|---|---|---|---|");
            for r in &self.suites {
                for k in &r.checks {
                    let _ = writeln!(
                        s,
                        "| {} | {} | {} | {} | {} |",
                        r.name,
                        md(&k.name),
                        md(&k.expected),
                        md(&k.computed),
                        if k.pass { "yes" } else { "**no**" }
                    );
                }
            }
            s.push('\n');
        }
        for t in &self.tables {
            let _ = writeln!(s, "## Table {}: {}\n", t.id, md(&t.title));
            let _ = writeln!(s, "| | {} |", t.cols.iter().map(|c| md(c)).collect::<Vec<_>>().join(" | "));
            let _ = writeln!(s, "|---|{}", "---|".repeat(t.cols.len()));
            for (i, r) in t.rows.iter().enumerate() {
                let cells: Vec<String> = (0..t.cols.len())
                    .map(|j| {
                        let (e, v) = (&t.expected[i][j], &t.computed[i][j]);
                        let mark = if e.is_some() && e == v { "" } else { " **≠**" };
                        format!("{} ({}){mark}", show(v), md(&t.formulas[i][j]))
                    })
                    .collect();
                let note = t.row_notes.get(i).map(|n| format!(" [{}]", md(n))).unwrap_or_default();
                let _ = writeln!(s, "| {}{note} | {} |", md(r), cells.join(" | "));
            }
            s.push('\n');
        }
        if !self.counterexamples.is_empty() {
            let _ = writeln!(s, "## Counterexamples\n");
            for c in &self.counterexamples {
                let _ = writeln!(s, "- {} / {}: {}", c.suite, md(&c.check), md(&c.detail));
            }
        }
        s
    }
}

fn md(x: &str) -> String {
    x.replace('|', "\\|")
}

/// One orbit of an inventory listing.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitRow {
    pub id: usize,
    pub size: usize,
    pub representative: String,
    pub label: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Inventory {
    pub schema_version: u32,
    pub config: Config,
    pub kind: String,
    pub orbits: Vec<OrbitRow>,
}

impl Inventory {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for r in &self.orbits {
                    w.serialize(r).unwrap();
                }
                String::from_utf8(w.into_inner().unwrap()).unwrap()
            }
            Format::Markdown => {
                let mut s = format!(
                    "# {} orbits: n = {}, h = {}, q = {} ({} orbits)\n\n| id | size | representative | label |\n|---|---|---|---|\n",
                    self.kind,
                    self.config.n,
                    self.config.h,
                    self.config.q,
                    self.orbits.len()
                );
                for r in &self.orbits {
                    let _ = writeln!(s, "| {} | {} | {} | {} |", r.id, r.size, md(&r.representative), md(&r.label));
                }
                s
            }
        }
    }
}
