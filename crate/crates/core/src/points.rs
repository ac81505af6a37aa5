//! Point sets, dissimilarity matrices and the Euclidean baseline metric.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::par::Execution;

/// `n` points in `dim` dimensions, stored row-major, with optional dense
/// class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    coords: Vec<f64>,
    dim: usize,
    labels: Option<Vec<usize>>,
    seed: Option<u64>,
}

impl PointSet {
    pub fn new(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPointSet("dimension must be at least 1".into()));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::InvalidPointSet(format!(
                "{} coordinates do not form rows of width {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidPointSet(format!(
                "non-finite coordinate in point {}",
                pos / dim
            )));
        }
        Ok(Self {
            coords,
            dim,
            labels: None,
            seed: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::InvalidPointSet(format!(
                    "row {i} has {} coordinates, expected {dim}",
                    r.len()
                )));
            }
            coords.extend_from_slice(r);
        }
        Self::new(coords, dim)
    }

    /// Attach labels. They must already be dense: every id in `0..C` occurs.
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                found: labels.len(),
            });
        }
        let classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; classes];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPointSet(format!(
                "labels are not dense: class {missing} of 0..{classes} is empty"
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn num_classes(&self) -> usize {
        self.labels
            .as_ref()
            .and_then(|l| l.iter().max())
            .map_or(0, |m| m + 1)
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Points at `indices`, in that order. Labels are carried over unchanged
    /// and must stay dense in the subset.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        let ps = Self::new(coords, self.dim)?;
        match &self.labels {
            Some(l) => ps.with_labels(indices.iter().map(|&i| l[i]).collect()),
            None => Ok(ps),
        }
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }

    /// Write the CSV interchange format: header `x0,..,x{D-1}[,label]`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (0..self.dim).map(|d| format!("x{d}")).collect();
        if self.labels.is_some() {
            header.push("label".into());
        }
        wr.write_record(&header)?;
        let mut rec = Vec::with_capacity(self.dim + 1);
        for i in 0..self.n() {
            rec.clear();
            rec.extend(self.point(i).iter().map(|c| format!("{c:?}")));
            if let Some(l) = &self.labels {
                rec.push(l[i].to_string());
            }
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::file(path, e))?;
        self.write_csv(BufWriter::new(f))
    }

    /// Read the CSV interchange format. Columns named `x*` are coordinates; an
    /// optional `label` column holds class symbols that are remapped to dense
    /// ids (numeric order when every symbol is an integer, lexicographic
    /// otherwise).
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let header = rd.headers()?.clone();
        let label_col = header.iter().position(|h| h == "label");
        let dim = header.len() - usize::from(label_col.is_some());
        for (c, name) in header.iter().enumerate() {
            if Some(c) != label_col && !name.starts_with('x') {
                return Err(Error::Format {
                    what: "point CSV header",
                    detail: format!("unexpected column {name:?}"),
                });
            }
        }
        let mut coords = Vec::new();
        let mut symbols = Vec::new();
        for (row, rec) in rd.records().enumerate() {
            let rec = rec?;
            for (c, field) in rec.iter().enumerate() {
                if Some(c) == label_col {
                    symbols.push(field.to_string());
                } else {
                    let v: f64 = field.parse().map_err(|_| Error::Format {
                        what: "point CSV",
                        detail: format!("row {}: cannot parse {field:?}", row + 1),
                    })?;
                    coords.push(v);
                }
            }
        }
        let ps = Self::new(coords, dim)?;
        if label_col.is_none() {
            return Ok(ps);
        }
        ps.with_labels(dense_labels(&symbols))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::file(path, e))?;
        Self::read_csv(BufReader::new(f))
    }
}

fn dense_labels(symbols: &[String]) -> Vec<usize> {
    let numeric: Option<Vec<i64>> = symbols.iter().map(|s| s.parse().ok()).collect();
    match numeric {
        Some(nums) => {
            let order: Vec<i64> = nums.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
            nums.iter()
                .map(|v| order.binary_search(v).expect("present"))
                .collect()
        }
        None => {
            let order: Vec<&String> = symbols.iter().collect::<BTreeSet<_>>().into_iter().collect();
            symbols
                .iter()
                .map(|s| order.binary_search(&s).expect("present"))
                .collect()
        }
    }
}

#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

/// Dense symmetric `n x n` dissimilarity matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

const MATRIX_MAGIC: &[u8; 8] = b"PKNNGDM1";

impl DissimilarityMatrix {
    /// Build from a full row-major buffer and check the matrix axioms
    /// (square, symmetric, zero diagonal, finite and non-negative).
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        let m = Self { n, data };
        m.check()?;
        Ok(m)
    }

    /// Unchecked construction for values produced inside the crate.
    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    /// `f(i, j)` evaluated for `i < j`, mirrored, with a zero diagonal.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self::from_vec(n, data)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != 0.0 {
                return Err(Error::Format {
                    what: "dissimilarity matrix",
                    detail: format!("non-zero diagonal at {i}"),
                });
            }
            for j in i + 1..n {
                let v = self.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Format {
                        what: "dissimilarity matrix",
                        detail: format!("entry ({i},{j}) = {v} is not a finite non-negative value"),
                    });
                }
                if v != self.get(j, i) {
                    return Err(Error::Format {
                        what: "dissimilarity matrix",
                        detail: format!("asymmetric at ({i},{j})"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Mean of the strictly upper triangle; `0` for `n < 2`.
    pub fn mean_off_diagonal(&self) -> f64 {
        let n = self.n;
        if n < 2 {
            return 0.0;
        }
        let mut sum = 0.0;
        for i in 0..n {
            sum += self.row(i)[i + 1..].iter().sum::<f64>();
        }
        sum / (n * (n - 1) / 2) as f64
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Binary layout: 8-byte magic `PKNNGDM1`, `n` as little-endian u64, then
    /// `n*n` little-endian f64 values row-major.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MATRIX_MAGIC)?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 16];
        r.read_exact(&mut head).map_err(|_| Error::Format {
            what: "matrix file",
            detail: "shorter than the 16-byte header".into(),
        })?;
        if &head[..8] != MATRIX_MAGIC {
            return Err(Error::Format {
                what: "matrix file",
                detail: "bad magic".into(),
            });
        }
        let n = u64::from_le_bytes(head[8..].try_into().expect("8 bytes")) as usize;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != n * n * 8 {
            return Err(Error::Format {
                what: "matrix file",
                detail: format!("expected {} payload bytes, found {}", n * n * 8, bytes.len()),
            });
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Self::from_vec(n, data)
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::file(path, e))?;
        self.write_binary(BufWriter::new(f))
    }

    pub fn load_binary(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::file(path, e))?;
        Self::read_binary(BufReader::new(f))
    }

    /// Headerless CSV, one matrix row per line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for i in 0..self.n {
            wr.write_record(self.row(i).iter().map(|v| format!("{v:?}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::file(path, e))?;
        self.write_csv(BufWriter::new(f))
    }
}

/// Pairwise L2 distances.
pub fn euclidean_matrix(ps: &PointSet) -> DissimilarityMatrix {
    euclidean_matrix_with(ps, Execution::default())
}

pub fn euclidean_matrix_with(ps: &PointSet, exec: Execution) -> DissimilarityMatrix {
    let n = ps.n();
    let mut data = vec![0.0; n * n];
    exec.for_each_chunk(&mut data, n, |i, row| {
        let pi = ps.point(i);
        for (j, out) in row.iter_mut().enumerate() {
            if j != i {
                *out = euclidean(pi, ps.point(j));
            }
        }
    });
    DissimilarityMatrix::from_raw(n, data)
}

/// Mean Euclidean distance over the `n(n-1)/2` unordered pairs.
pub fn mean_pairwise_distance(ps: &PointSet) -> Result<f64> {
    let n = ps.n();
    if n < 2 {
        return Err(Error::DegenerateInput(
            "mean pairwise distance needs at least two points".into(),
        ));
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += ps.dist(i, j);
        }
    }
    Ok(sum / (n * (n - 1) / 2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let ps = PointSet::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let d = euclidean_matrix(&ps);
        assert_eq!(d.get(0, 1), 5.0);
        assert_eq!(d.get(1, 0), 5.0);
    }

    #[test]
    fn single_point_matrix() {
        let ps = PointSet::from_rows(&[[1.0, 2.0, 3.0]]).unwrap();
        let d = euclidean_matrix(&ps);
        assert_eq!(d.n(), 1);
        assert_eq!(d.as_slice(), &[0.0]);
    }

    #[test]
    fn mean_pairwise_small_cases() {
        let two = PointSet::from_rows(&[[0.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(mean_pairwise_distance(&two).unwrap(), 1.0);
        let three = PointSet::from_rows(&[[0.0, 0.0], [0.0, 1.0], [0.0, 2.0]]).unwrap();
        assert!((mean_pairwise_distance(&three).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        let one = PointSet::from_rows(&[[0.0, 0.0]]).unwrap();
        assert!(matches!(
            mean_pairwise_distance(&one),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn rejects_invalid_point_sets() {
        assert!(PointSet::new(vec![], 2).is_err());
        assert!(PointSet::new(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(PointSet::new(vec![1.0, f64::NAN], 2).is_err());
        assert!(PointSet::new(vec![1.0], 0).is_err());
        let ps = PointSet::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        // class 1 missing
        assert!(ps.clone().with_labels(vec![0, 2, 2]).is_err());
        assert!(ps.clone().with_labels(vec![0, 1]).is_err());
        assert_eq!(ps.with_labels(vec![1, 0, 1]).unwrap().num_classes(), 2);
    }

    #[test]
    fn csv_round_trip_and_label_remap() {
        let ps = PointSet::from_rows(&[[0.1, -2.5], [1e-17, 3.0], [7.0, 0.3]])
            .unwrap()
            .with_labels(vec![1, 0, 1])
            .unwrap();
        let mut buf = Vec::new();
        ps.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x0,x1,label\n"));
        assert_eq!(PointSet::read_csv(&buf[..]).unwrap(), ps);

        let symbolic = "x0,label\n1.0,cat\n2.0,dog\n3.0,ant\n4.0,dog\n";
        let ps = PointSet::read_csv(symbolic.as_bytes()).unwrap();
        assert_eq!(ps.labels().unwrap(), &[1, 2, 0, 2]);

        let numeric = "x0,label\n1.0,10\n2.0,-3\n3.0,10\n";
        let ps = PointSet::read_csv(numeric.as_bytes()).unwrap();
        assert_eq!(ps.labels().unwrap(), &[1, 0, 1]);
    }

    #[test]
    fn matrix_binary_round_trip_and_header() {
        let ps = PointSet::from_rows(&[[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]]).unwrap();
        let d = euclidean_matrix(&ps);
        let mut buf = Vec::new();
        d.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"PKNNGDM1");
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 3);
        assert_eq!(buf.len(), 16 + 9 * 8);
        assert_eq!(DissimilarityMatrix::read_binary(&buf[..]).unwrap(), d);
        buf[0] = b'X';
        assert!(DissimilarityMatrix::read_binary(&buf[..]).is_err());
    }

    #[test]
    fn matrix_rejects_asymmetry() {
        assert!(DissimilarityMatrix::from_vec(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(DissimilarityMatrix::from_vec(2, vec![0.0, -1.0, -1.0, 0.0]).is_err());
        assert!(DissimilarityMatrix::from_vec(2, vec![1.0, 1.0, 1.0, 0.0]).is_err());
    }
}
