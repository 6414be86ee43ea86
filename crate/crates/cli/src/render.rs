use serde_json::Value;

/// Plain-text rendering of a JSON report: one `path  value` line per scalar
/// leaf, and aligned columns for arrays of flat objects.
pub fn table(report: &Value) -> String {
    let mut out = String::new();
    walk(report, "", &mut out);
    out
}

fn walk(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let p = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                walk(child, &p, out);
            }
        }
        Value::Array(items) if !items.is_empty() && items.iter().all(is_flat_object) => {
            out.push_str(&format!("{path}:\n"));
            grid(items, out);
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, child) in items.iter().enumerate() {
                walk(child, &format!("{path}[{i}]"), out);
            }
        }
        _ => out.push_str(&format!("{path}  {}\n", scalar(v))),
    }
}

fn is_flat_object(v: &Value) -> bool {
    v.as_object().is_some_and(|m| {
        m.values()
            .all(|x| !x.is_object() && !x.as_array().is_some_and(|a| a.iter().any(Value::is_object)))
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn grid(rows: &[Value], out: &mut String) {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for k in r.as_object().into_iter().flat_map(|m| m.keys()) {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| r.get(c).map(scalar).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|row| row[i].len()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let line = |items: Vec<&str>| {
        let padded: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        format!("  {}\n", padded.join("  ").trim_end())
    };
    out.push_str(&line(cols.iter().map(String::as_str).collect()));
    for row in &cells {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renders_rows_and_leaves() {
        let v = json!({"n": 2, "rows": [{"j": 0, "C": "2"}, {"j": 1, "C": "1"}]});
        let t = table(&v);
        assert!(t.contains("n  2\n"));
        assert!(t.contains("  C  j\n  2  0\n  1  1\n"));
    }
}
