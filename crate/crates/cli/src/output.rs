//! Deterministic output rendering. All floating-point values go through one
//! 12-significant-digit formatter and all maps are iterated in key order, so
//! a run's bytes depend only on its resolved configuration and seed.

use std::fmt::Write as _;

use estlab::EmpiricalDistribution;

/// 12 significant digits, scientific notation.
pub fn fmt_g12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Minimal ordered JSON value; `serde_json` would re-serialize floats with
/// shortest-repr digits, which is not the fixed 12-digit contract.
pub enum Json {
    Num(f64),
    Int(u64),
    Str(String),
    Bool(bool),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn write(&self, out: &mut String) {
        match self {
            Json::Num(x) => out.push_str(&fmt_g12(*x)),
            Json::Int(k) => {
                let _ = write!(out, "{k}");
            }
            Json::Str(v) => {
                let _ = write!(out, "\"{}\"", v.replace('\\', "\\\\").replace('"', "\\\""));
            }
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Obj(fields) => {
                out.push('{');
                for (i, (key, val)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "\"{key}\":");
                    val.write(out);
                }
                out.push('}');
            }
        }
    }
}

/// Extra name -> value rows appended after the PMF table.
pub type Summary = Vec<(&'static str, Json)>;

/// PMF table plus summary rows as CSV with the fixed `k,count,pmf,se`
/// column order.
pub fn distribution_csv(dist: &EmpiricalDistribution, summary: &Summary) -> String {
    let mut s = String::from("k,count,pmf,se\n");
    for (k, count) in dist.counts() {
        let _ = writeln!(s, "{k},{count},{},{}", fmt_g12(dist.pmf(*k)), fmt_g12(dist.pmf_se(*k)));
    }
    let positives = dist.total() - dist.counts().get(&0).copied().unwrap_or(0);
    let _ = writeln!(
        s,
        "p_positive,{positives},{},{}",
        fmt_g12(dist.p_positive()),
        fmt_g12(dist.pmf_se(0))
    );
    let _ = writeln!(s, "mean,,{},{}", fmt_g12(dist.mean()), fmt_g12(dist.se_mean()));
    for (name, val) in summary {
        match val {
            Json::Num(x) => {
                let _ = writeln!(s, "{name},,{},", fmt_g12(*x));
            }
            Json::Int(k) => {
                let _ = writeln!(s, "{name},,{k},");
            }
            Json::Bool(b) => {
                let _ = writeln!(s, "{name},,{b},");
            }
            Json::Str(v) => {
                let _ = writeln!(s, "{name},,{v},");
            }
            Json::Obj(_) => {}
        }
    }
    s
}

/// PMF table plus summary as a JSON object `{pmf, counts, total, mean,
/// se_mean, p_positive, ...}`.
pub fn distribution_json(dist: &EmpiricalDistribution, summary: Summary) -> String {
    let pmf: Vec<(String, Json)> =
        dist.counts().keys().map(|k| (k.to_string(), Json::Num(dist.pmf(*k)))).collect();
    let counts: Vec<(String, Json)> =
        dist.counts().iter().map(|(k, c)| (k.to_string(), Json::Int(*c))).collect();
    let mut fields = vec![
        ("pmf".to_string(), Json::Obj(pmf)),
        ("counts".to_string(), Json::Obj(counts)),
        ("total".to_string(), Json::Int(dist.total())),
        ("mean".to_string(), Json::Num(dist.mean())),
        ("se_mean".to_string(), Json::Num(dist.se_mean())),
        ("p_positive".to_string(), Json::Num(dist.p_positive())),
    ];
    for (name, val) in summary {
        fields.push((name.to_string(), val));
    }
    let mut s = Json::Obj(fields).render();
    s.push('\n');
    s
}

/// name -> value report without a PMF table (compare, moments).
pub fn report_csv(rows: &Summary) -> String {
    let mut s = String::from("metric,value\n");
    for (name, val) in rows {
        match val {
            Json::Num(x) => {
                let _ = writeln!(s, "{name},{}", fmt_g12(*x));
            }
            Json::Int(k) => {
                let _ = writeln!(s, "{name},{k}");
            }
            Json::Bool(b) => {
                let _ = writeln!(s, "{name},{b}");
            }
            Json::Str(v) => {
                let _ = writeln!(s, "{name},{v}");
            }
            Json::Obj(_) => {}
        }
    }
    s
}

pub fn report_json(rows: Summary) -> String {
    let fields: Vec<(String, Json)> =
        rows.into_iter().map(|(name, val)| (name.to_string(), val)).collect();
    let mut s = Json::Obj(fields).render();
    s.push('\n');
    s
}
