use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{BinTrace, Request, Trace, TraceError};

const CACHE_HEADER: &str = "key,size";

/// Either kind of trace file, as detected from its first line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceFile {
    Cache(Trace),
    Bin(BinTrace),
}

fn io_err(path: &Path, source: std::io::Error) -> TraceError {
    TraceError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn trace_id_from_path(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn write_cache_trace(path: &Path, trace: &Trace) -> Result<(), TraceError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut body = String::with_capacity(trace.requests.len() * 14 + 16);
    body.push_str(CACHE_HEADER);
    body.push('\n');
    for (i, r) in trace.requests.iter().enumerate() {
        if r.key.is_empty() || r.key.contains([',', '\n', '\r']) {
            return Err(TraceError::InvalidParameter(format!(
                "request {i}: key {:?} cannot be written as a CSV field",
                r.key
            )));
        }
        body.push_str(&r.key);
        body.push(',');
        body.push_str(&r.size.to_string());
        body.push('\n');
    }
    w.write_all(body.as_bytes()).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_bin_trace(path: &Path, trace: &BinTrace) -> Result<(), TraceError> {
    let mut body = format!("capacity,{}\n", trace.capacity);
    for x in &trace.items {
        body.push_str(&x.to_string());
        body.push('\n');
    }
    fs::write(path, body).map_err(|e| io_err(path, e))
}

pub fn read_cache_trace(path: &Path) -> Result<Trace, TraceError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_cache_trace(&trace_id_from_path(path), &path.display().to_string(), &text)
}

pub fn read_bin_trace(path: &Path) -> Result<BinTrace, TraceError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_bin_trace(&trace_id_from_path(path), &path.display().to_string(), &text)
}

impl TraceFile {
    pub fn read(path: &Path) -> Result<Self, TraceError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let id = trace_id_from_path(path);
        let display = path.display().to_string();
        if text.starts_with("capacity,") {
            parse_bin_trace(&id, &display, &text).map(TraceFile::Bin)
        } else {
            parse_cache_trace(&id, &display, &text).map(TraceFile::Cache)
        }
    }
}

pub(crate) fn parse_cache_trace(id: &str, path: &str, text: &str) -> Result<Trace, TraceError> {
    let parse_err = |line: usize, message: String| TraceError::Parse {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CACHE_HEADER => {}
        Some((_, h)) => {
            return Err(parse_err(1, format!("expected header `{CACHE_HEADER}`, found {h:?}")))
        }
        None => return Err(parse_err(1, "empty file".into())),
    }
    let mut requests = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (key, size) = line
            .rsplit_once(',')
            .ok_or_else(|| parse_err(lineno, format!("expected `key,size`, found {line:?}")))?;
        if key.is_empty() {
            return Err(parse_err(lineno, "empty key".into()));
        }
        let size: u64 = size
            .trim()
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad size {size:?}: {e}")))?;
        if size == 0 {
            return Err(parse_err(lineno, "size must be >= 1".into()));
        }
        requests.push(Request::new(key, size));
    }
    Ok(Trace::new(id, requests))
}

pub(crate) fn parse_bin_trace(id: &str, path: &str, text: &str) -> Result<BinTrace, TraceError> {
    let parse_err = |line: usize, message: String| TraceError::Parse {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let capacity: u64 = match lines.next() {
        Some((_, h)) => {
            let v = h
                .strip_prefix("capacity,")
                .ok_or_else(|| parse_err(1, format!("expected `capacity,<int>`, found {h:?}")))?;
            v.trim()
                .parse()
                .map_err(|e| parse_err(1, format!("bad capacity {v:?}: {e}")))?
        }
        None => return Err(parse_err(1, "empty file".into())),
    };
    if capacity == 0 {
        return Err(parse_err(1, "capacity must be >= 1".into()));
    }
    let mut items = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let x: u64 = line
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad item {line:?}: {e}")))?;
        if x == 0 || x > capacity {
            return Err(parse_err(
                lineno,
                format!("item {x} outside [1, {capacity}]"),
            ));
        }
        items.push(x);
    }
    BinTrace::new(id, capacity, items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::gen_zipf;

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = gen_zipf(10, 100, 1.0, 3).unwrap();
        t.id = "t1".into();
        let p = dir.path().join("t1.csv");
        write_cache_trace(&p, &t).unwrap();
        assert_eq!(read_cache_trace(&p).unwrap(), t);
        assert_eq!(TraceFile::read(&p).unwrap(), TraceFile::Cache(t));
    }

    #[test]
    fn zero_size_is_rejected_with_line_number() {
        let err = parse_cache_trace("x", "x.csv", "key,size\nk0,3\nk1,0\n").unwrap_err();
        match err {
            TraceError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oversize_bin_item_is_rejected() {
        let err = parse_bin_trace("b", "b.csv", "capacity,100\n101\n").unwrap_err();
        match err {
            TraceError::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("101"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bin_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = BinTrace::new("b7", 100, vec![1, 50, 100, 7]).unwrap();
        let p = dir.path().join("b7.csv");
        write_bin_trace(&p, &t).unwrap();
        assert_eq!(TraceFile::read(&p).unwrap(), TraceFile::Bin(t));
    }
}
