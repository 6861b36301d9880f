//! Text renderings of JSON reports.

use serde_json::Value;

pub fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// Scalar fields as `# key<TAB>value` comments, then a commented header and one line per row.
pub fn table(report: &Value) -> String {
    let mut out = String::new();
    let Some(obj) = report.as_object() else {
        return scalar(report) + "\n";
    };
    for (k, v) in obj {
        if k != "rows" && !v.is_object() {
            out.push_str(&format!("# {k}\t{}\n", scalar(v)));
        }
    }
    let rows = obj
        .get("rows")
        .and_then(Value::as_array)
        .map(Vec::as_slice)
        .unwrap_or(&[]);
    if let Some(first) = rows.first().and_then(Value::as_object) {
        let header: Vec<&str> = first.keys().map(String::as_str).collect();
        out.push_str(&format!("# {}\n", header.join("\t")));
    }
    for row in rows {
        if let Some(r) = row.as_object() {
            let cells: Vec<String> = r.values().map(scalar).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
    }
    out
}

/// `key<TAB>value` for every scalar field.
pub fn fields(report: &Value, keys: &[&str]) -> String {
    keys.iter()
        .filter_map(|k| report.get(*k).map(|v| format!("{k}\t{}\n", scalar(v))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn tables() {
        let v =
            json!({"p": 2, "q": 1, "rows": [{"label": 0, "d": "1/4"}, {"label": 1, "d": "-1/4"}]});
        assert_eq!(table(&v), "# p\t2\n# q\t1\n# label\td\n0\t1/4\n1\t-1/4\n");
        assert_eq!(table(&json!({"rows": []})), "");
    }

    #[test]
    fn scalars() {
        assert_eq!(scalar(&json!(null)), "-");
        assert_eq!(scalar(&json!(["0", "-2"])), "0,-2");
        assert_eq!(scalar(&json!(true)), "true");
        assert_eq!(fields(&json!({"a": 1, "b": "x"}), &["b", "c"]), "b\tx\n");
    }
}
