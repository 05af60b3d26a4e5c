//! Residual reports and their CSV/JSON serializations.

use serde::Serialize;
use surfkin::grid::Stat;

pub const SCHEMA: u32 = 1;

#[derive(Serialize, Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub i: usize,
    pub j: usize,
    pub u: f64,
    pub v: f64,
}

/// One line of a report.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Residual {
    pub name: String,
    /// `pass`, `fail`, `info`, `true`/`false` for flags, or `skipped (…)`.
    pub status: String,
    /// `None` when the row does not take part in the exit status.
    pub pass: Option<bool>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub count: usize,
    pub tol: Option<f64>,
    pub worst: Option<GridPoint>,
}

impl Residual {
    fn from_stat(name: &str, s: &Stat) -> Residual {
        let has = s.count > 0;
        Residual {
            name: name.into(),
            status: String::new(),
            pass: None,
            max: has.then_some(s.max),
            mean: has.then_some(s.mean),
            min: has.then_some(s.min),
            count: s.count,
            tol: None,
            worst: s.worst.map(|n| GridPoint { i: n.i, j: n.j, u: n.u, v: n.v }),
        }
    }

    /// A checked row: passes iff `max ≤ tol`.
    pub fn check(name: &str, s: &Stat, tol: f64) -> Residual {
        let ok = s.max <= tol;
        Residual {
            status: if ok { "pass" } else { "fail" }.into(),
            pass: Some(ok),
            tol: Some(tol),
            ..Self::from_stat(name, s)
        }
    }

    pub fn info(name: &str, s: &Stat) -> Residual {
        Residual { status: "info".into(), ..Self::from_stat(name, s) }
    }

    pub fn flag(name: &str, value: bool, s: &Stat, tol: f64) -> Residual {
        Residual { status: value.to_string(), tol: Some(tol), ..Self::from_stat(name, s) }
    }

    pub fn skipped(name: &str, reason: &str) -> Residual {
        Residual { status: format!("skipped ({reason})"), ..Self::from_stat(name, &Stat::empty()) }
    }

    /// Checked when `enabled`, informational otherwise.
    pub fn check_if(enabled: bool, name: &str, s: &Stat, tol: f64) -> Residual {
        if enabled {
            Self::check(name, s, tol)
        } else {
            Residual { tol: Some(tol), ..Self::info(name, s) }
        }
    }
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub conformal: bool,
    pub isoareal: bool,
    pub isometric: bool,
    pub tol: f64,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub surface: String,
    pub deformation: String,
    pub grid: String,
    pub margin: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    pub checks: Vec<Residual>,
}

impl Report {
    /// True iff every enabled check passes.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.checks.iter().filter(|c| c.pass == Some(false))
    }

    pub fn get(&self, name: &str) -> Option<&Residual> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "check", "status", "max", "mean", "min", "count", "tol", "worst_i", "worst_j", "worst_u", "worst_v",
        ])
        .expect("in-memory write");
        let f = |x: Option<f64>| x.map(fmt_num).unwrap_or_default();
        for c in &self.checks {
            let (wi, wj, wu, wv) = match c.worst {
                Some(p) => (p.i.to_string(), p.j.to_string(), fmt_num(p.u), fmt_num(p.v)),
                None => Default::default(),
            };
            w.write_record([
                c.name.clone(),
                c.status.clone(),
                f(c.max),
                f(c.mean),
                f(c.min),
                c.count.to_string(),
                f(c.tol),
                wi,
                wj,
                wu,
                wv,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:e}")
    }
}
