//! CSV and JSON serialisation, assembled in memory and written in one piece.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// First line of every CSV document.
pub const SCHEMA_LINE: &str = "# pii-transitions v1 schema";
pub const SCHEMA: &str = "pii-transitions v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn csv_document(columns: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut buf = format!("{SCHEMA_LINE}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(columns).expect("writing to memory");
        for r in records {
            w.write_record(&r).expect("writing to memory");
        }
        w.flush().expect("writing to memory");
    }
    buf
}

/// `{"schema": ..., "<key>": value}` pretty-printed.
pub fn json_document<T: Serialize>(key: &str, value: &T) -> Vec<u8> {
    let mut map = serde_json::Map::new();
    map.insert("schema".into(), SCHEMA.into());
    map.insert(key.into(), serde_json::to_value(value).expect("serialisable"));
    let mut buf = serde_json::to_vec_pretty(&serde_json::Value::Object(map)).expect("serialisable");
    buf.push(b'\n');
    buf
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_header() {
        let doc = csv_document(&["a", "b"], vec![vec!["1".into(), "x, y".into()]]);
        let s = String::from_utf8(doc).unwrap();
        assert_eq!(s, "# pii-transitions v1 schema\na,b\n1,\"x, y\"\n");
    }

    #[test]
    fn json_carries_schema() {
        let doc = json_document("rows", &vec![1, 2]);
        let v: serde_json::Value = serde_json::from_slice(&doc).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["rows"][1], 2);
    }
}
