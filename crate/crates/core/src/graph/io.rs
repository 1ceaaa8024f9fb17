// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Edge-list text format: a header line `n m`, then `m` lines `u v` with
//! `u < v`, 0-indexed.

use std::fmt::Write as _;
use std::path::Path;

use super::{Graph, GraphError};

pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(GraphError::Parse {
        line: 1,
        msg: "missing header `n m`".into(),
    })?;
    let [n, m] = parse_pair(hline, header)?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let [u, v] = parse_pair(line, l)?;
        if u >= v {
            return Err(GraphError::Parse { line, msg: format!("expected u < v, got {u} {v}") });
        }
        if v >= n {
            return Err(GraphError::Parse { line, msg: format!("vertex {v} outside [0, {n})") });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: hline,
            msg: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    let mut sorted = edges.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        let line = text
            .lines()
            .enumerate()
            .filter(|(_, l)| parse_pair(0, l.trim()).ok() == Some([w[0].0, w[0].1]))
            .nth(1)
            .map_or(0, |(i, _)| i + 1);
        return Err(GraphError::Parse {
            line,
            msg: format!("duplicate edge {} {}", w[0].0, w[0].1),
        });
    }
    Graph::new(n, &edges)
}

fn parse_pair(line: usize, l: &str) -> Result<[usize; 2], GraphError> {
    let mut it = l.split_whitespace();
    let mut next = || -> Result<usize, GraphError> {
        let tok = it.next().ok_or(GraphError::Parse { line, msg: "expected two integers".into() })?;
        tok.parse().map_err(|_| GraphError::Parse { line, msg: format!("not a vertex id: {tok:?}") })
    };
    let pair = [next()?, next()?];
    if it.next().is_some() {
        return Err(GraphError::Parse { line, msg: "trailing tokens".into() });
    }
    Ok(pair)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    std::fs::write(path, format_edge_list(g))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = Graph::new(5, &[(0, 1), (1, 4), (2, 3)]).unwrap();
        let text = format_edge_list(&g);
        assert_eq!(text, "5 3\n0 1\n1 4\n2 3\n");
        assert_eq!(parse_edge_list(&text).unwrap(), g);
    }

    fn line_of(text: &str) -> usize {
        match parse_edge_list(text) {
            Err(GraphError::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of("3 2\n0 1\n2 1\n"), 3);
        assert_eq!(line_of("3 1\n0 x\n"), 2);
        assert_eq!(line_of("3 1\n0 3\n"), 2);
        assert_eq!(line_of("3 2\n0 1\n0 1\n"), 3);
        assert_eq!(line_of("3 2\n0 1\n"), 1);
        assert_eq!(line_of(""), 1);
    }
}
