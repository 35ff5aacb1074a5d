use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::ensemble::{Edge, SparseDigraph};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Dense matrices in array form (column-major, as the format requires).
pub fn write_matrix_market_dense<T: Scalar>(m: &DenseMatrix<T>, mut w: impl Write) -> Result<()> {
    let n = m.n();
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{n} {n}")?;
    for j in 0..n {
        for i in 0..n {
            writeln!(w, "{}", m[(i, j)])?;
        }
    }
    Ok(())
}

/// Digraph adjacency in coordinate form, 1-based `source target weight`.
pub fn write_matrix_market_digraph<T: Scalar>(g: &SparseDigraph<T>, mut w: impl Write) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", g.n, g.n, g.edges.len())?;
    for e in &g.edges {
        writeln!(w, "{} {} {}", e.source + 1, e.target + 1, e.weight)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatrixMarket<T> {
    Dense(DenseMatrix<T>),
    Coordinate { n: usize, edges: Vec<Edge<T>> },
}

impl<T: Scalar> MatrixMarket<T> {
    pub fn into_dense(self) -> Result<DenseMatrix<T>> {
        match self {
            MatrixMarket::Dense(m) => Ok(m),
            MatrixMarket::Coordinate { n, edges } => {
                let mut m = DenseMatrix::zeros(n);
                for e in edges {
                    m[(e.source, e.target)] = m[(e.source, e.target)] + e.weight;
                }
                Ok(m)
            }
        }
    }

    pub fn into_digraph(self) -> Result<SparseDigraph<T>> {
        match self {
            MatrixMarket::Coordinate { n, edges } => SparseDigraph::from_edges(n, edges),
            MatrixMarket::Dense(_) => Err(Error::input("array-form file holds a dense matrix, not a digraph")),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_num<F: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<F> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("cannot parse {what} from {tok:?}")))
}

/// Reads square real `general` matrices in array or coordinate form.
pub fn read_matrix_market<T: Scalar>(r: impl BufRead) -> Result<MatrixMarket<T>> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(1, "expected a %%MatrixMarket matrix header"));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field type {}", fields[3])));
    }
    if fields[4] != "general" {
        return Err(parse_err(1, format!("unsupported symmetry {}", fields[4])));
    }
    let coordinate = match fields[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(1, format!("unsupported format {other}"))),
    };
    let mut data = lines.filter_map(|(no, l)| match l {
        Ok(s) if s.trim().is_empty() || s.starts_with('%') => None,
        Ok(s) => Some(Ok((no, s))),
        Err(e) => Some(Err(Error::from(e))),
    });
    let (size_line, size) = data.next().ok_or_else(|| parse_err(2, "missing size line"))??;
    let mut toks = size.split_whitespace();
    let rows: usize = parse_num(toks.next(), size_line, "row count")?;
    let cols: usize = parse_num(toks.next(), size_line, "column count")?;
    if rows != cols {
        return Err(parse_err(size_line, format!("matrix is {rows}x{cols}, expected square")));
    }
    let n = rows;
    if coordinate {
        let nnz: usize = parse_num(toks.next(), size_line, "entry count")?;
        let mut edges = Vec::with_capacity(nnz);
        for item in data {
            let (no, s) = item?;
            let mut t = s.split_whitespace();
            let i: usize = parse_num(t.next(), no, "row index")?;
            let j: usize = parse_num(t.next(), no, "column index")?;
            let w: T = parse_num(t.next(), no, "value")?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(parse_err(no, format!("index ({i}, {j}) out of range for n = {n}")));
            }
            edges.push(Edge { source: i - 1, target: j - 1, weight: w });
        }
        if edges.len() != nnz {
            return Err(parse_err(size_line, format!("declared {nnz} entries, found {}", edges.len())));
        }
        Ok(MatrixMarket::Coordinate { n, edges })
    } else {
        let mut m = DenseMatrix::zeros(n);
        let mut count = 0;
        for item in data {
            let (no, s) = item?;
            for tok in s.split_whitespace() {
                if count >= n * n {
                    return Err(parse_err(no, "more values than declared"));
                }
                let v: T = parse_num(Some(tok), no, "value")?;
                m[(count % n, count / n)] = v;
                count += 1;
            }
        }
        if count != n * n {
            return Err(parse_err(size_line, format!("declared {} values, found {count}", n * n)));
        }
        Ok(MatrixMarket::Dense(m))
    }
}

/// Cycle list stored next to a digraph's `.mtx` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleSidecar<T> {
    pub n: usize,
    pub cycles: Vec<Vec<usize>>,
    pub weights: Vec<T>,
}

impl<T: Scalar> From<&SparseDigraph<T>> for CycleSidecar<T> {
    fn from(g: &SparseDigraph<T>) -> Self {
        CycleSidecar { n: g.n, cycles: g.cycles.clone(), weights: g.cycle_weights.clone() }
    }
}

impl<T: Scalar> CycleSidecar<T> {
    pub fn into_digraph(self) -> Result<SparseDigraph<T>> {
        SparseDigraph::from_cycles(self.n, self.cycles, self.weights)
    }
}
