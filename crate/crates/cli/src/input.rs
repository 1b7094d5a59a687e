//! Reads a count distribution back from a previous run's CSV or JSON
//! output, for the compare and moments subcommands.

use std::collections::BTreeMap;
use std::path::Path;

use estlab::EmpiricalDistribution;

pub fn read_distribution(path: &Path) -> Result<EmpiricalDistribution, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let trimmed = text.trim_start();
    let counts = if trimmed.starts_with('{') {
        parse_json(trimmed).map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        parse_csv(&text).map_err(|e| format!("{}: {e}", path.display()))?
    };
    if counts.is_empty() {
        return Err(format!("{}: no count rows found", path.display()));
    }
    Ok(EmpiricalDistribution::from_counts(counts))
}

fn parse_json(text: &str) -> Result<BTreeMap<u64, u64>, String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let counts = value
        .get("counts")
        .and_then(|c| c.as_object())
        .ok_or("missing \"counts\" object")?;
    let mut out = BTreeMap::new();
    for (k, v) in counts {
        let k: u64 = k.parse().map_err(|_| format!("bad count key {k:?}"))?;
        let v = v.as_u64().ok_or_else(|| format!("bad count value for k = {k}"))?;
        out.insert(k, v);
    }
    Ok(out)
}

/// Rows whose first field is an integer are count rows; summary rows and the
/// header are skipped.
fn parse_csv(text: &str) -> Result<BTreeMap<u64, u64>, String> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let mut fields = line.split(',');
        let Some(first) = fields.next() else { continue };
        let Ok(k) = first.trim().parse::<u64>() else { continue };
        let count: u64 = fields
            .next()
            .ok_or_else(|| format!("row for k = {k} has no count column"))?
            .trim()
            .parse()
            .map_err(|_| format!("bad count for k = {k}"))?;
        out.insert(k, count);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn reads_own_csv_and_json() {
        let dir = std::env::temp_dir();
        let csv_path = dir.join("estlab_input_test.csv");
        let json_path = dir.join("estlab_input_test.json");
        let mut f = std::fs::File::create(&csv_path).unwrap();
        write!(f, "k,count,pmf,se\n0,7,7e-1,0e0\n2,3,3e-1,0e0\np_positive,3,3e-1,0e0\n").unwrap();
        let mut g = std::fs::File::create(&json_path).unwrap();
        write!(g, "{{\"pmf\":{{\"0\":7e-1}},\"counts\":{{\"0\":7,\"2\":3}},\"total\":10}}").unwrap();

        let from_csv = read_distribution(&csv_path).unwrap();
        let from_json = read_distribution(&json_path).unwrap();
        assert_eq!(from_csv, from_json);
        assert_eq!(from_csv.total(), 10);
        assert_eq!(from_csv.pmf(2), 0.3);
        std::fs::remove_file(csv_path).ok();
        std::fs::remove_file(json_path).ok();
    }
}
