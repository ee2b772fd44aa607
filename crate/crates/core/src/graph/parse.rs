use std::collections::HashMap;

use super::Graph;
use crate::error::ParseError;

/// Reads the nonzero pattern of a square Matrix Market coordinate matrix as
/// an undirected graph. Values are ignored, the pattern is symmetrized,
/// diagonal entries are dropped.
pub fn parse_matrix_market(text: &str) -> Result<Graph, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (banner_no, banner) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, "empty input, expected %%MatrixMarket banner"))?;
    parse_banner(banner_no, banner)?;

    let mut size: Option<usize> = None;
    let mut expected = 0usize;
    let mut seen = 0usize;
    let mut last_line = banner_no;
    let mut pairs = Vec::new();

    for (no, raw) in lines {
        last_line = no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match size {
            None => {
                let rows = parse_index(fields.next(), no, "row count")?;
                let cols = parse_index(fields.next(), no, "column count")?;
                let nnz = parse_index(fields.next(), no, "entry count")?;
                if rows != cols {
                    return Err(ParseError::new(
                        no,
                        format!("matrix is not square ({rows} x {cols})"),
                    ));
                }
                size = Some(rows);
                expected = nnz;
            }
            Some(n) => {
                if seen == expected {
                    return Err(ParseError::new(
                        no,
                        format!("more entries than the declared {expected}"),
                    ));
                }
                let i = parse_index(fields.next(), no, "row index")?;
                let j = parse_index(fields.next(), no, "column index")?;
                for idx in [i, j] {
                    if idx == 0 || idx > n {
                        return Err(ParseError::new(
                            no,
                            format!("index {idx} outside the declared range 1..={n}"),
                        ));
                    }
                }
                pairs.push((i - 1, j - 1));
                seen += 1;
            }
        }
    }

    let n = size.ok_or_else(|| ParseError::new(last_line, "missing size line"))?;
    if seen < expected {
        return Err(ParseError::new(
            last_line,
            format!("expected {expected} entries, found {seen}"),
        ));
    }
    Ok(Graph::from_edges(n, pairs))
}

fn parse_banner(no: usize, line: &str) -> Result<(), ParseError> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(ParseError::new(no, "expected %%MatrixMarket banner"));
    }
    if words.len() != 5 {
        return Err(ParseError::new(
            no,
            "banner must read: %%MatrixMarket matrix coordinate <field> <symmetry>",
        ));
    }
    if words[1] != "matrix" {
        return Err(ParseError::new(no, format!("unsupported object `{}`", words[1])));
    }
    if words[2] != "coordinate" {
        return Err(ParseError::new(
            no,
            format!("unsupported format `{}`, only coordinate is accepted", words[2]),
        ));
    }
    if !matches!(words[3].as_str(), "pattern" | "real" | "integer") {
        return Err(ParseError::new(no, format!("unsupported field `{}`", words[3])));
    }
    if !matches!(words[4].as_str(), "general" | "symmetric" | "skew-symmetric") {
        return Err(ParseError::new(
            no,
            format!("unsupported symmetry `{}`", words[4]),
        ));
    }
    Ok(())
}

fn parse_index(field: Option<&str>, no: usize, what: &str) -> Result<usize, ParseError> {
    let field = field.ok_or_else(|| ParseError::new(no, format!("missing {what}")))?;
    field
        .parse::<usize>()
        .map_err(|_| ParseError::new(no, format!("{what} `{field}` is not a non-negative integer")))
}

/// Reads whitespace-separated vertex id pairs, one per line. Lines starting
/// with `#` are comments. Ids are remapped to `0..n` in first-seen order.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(ParseError::new(
                no,
                format!("expected two vertex ids, found {} tokens", tokens.len()),
            ));
        }
        let mut ends = [0usize; 2];
        for (slot, tok) in ends.iter_mut().zip(&tokens) {
            let id: i64 = tok
                .parse()
                .map_err(|_| ParseError::new(no, format!("`{tok}` is not an integer")))?;
            if id < 0 {
                return Err(ParseError::new(no, format!("negative vertex id {id}")));
            }
            let next = ids.len();
            *slot = *ids.entry(id as u64).or_insert(next);
        }
        pairs.push((ends[0], ends[1]));
    }
    Ok(Graph::from_edges(ids.len(), pairs))
}
