//! Feature distributions: background samples, Gaussians, and small exact
//! discrete distributions.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{stream_rng, Rng};

/// Symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Probability-sum tolerance for discrete distributions.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Row-major `K x n` matrix of finite samples, `K >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampleMatrixRepr", into = "SampleMatrixRepr")]
pub struct SampleMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    names: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct SampleMatrixRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    names: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<SampleMatrixRepr> for SampleMatrix {
    type Error = Error;

    fn try_from(r: SampleMatrixRepr) -> Result<Self> {
        let m = SampleMatrix::from_rows(r.rows)?;
        match r.names {
            Some(names) => m.with_names(names),
            None => Ok(m),
        }
    }
}

impl From<SampleMatrix> for SampleMatrixRepr {
    fn from(m: SampleMatrix) -> Self {
        SampleMatrixRepr {
            rows: m.iter_rows().map(|r| r.to_vec()).collect(),
            names: m.names,
        }
    }
}

impl SampleMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(
                "data",
                "sample matrix needs at least one row and one column",
            ));
        }
        Error::check_len("data", rows * cols, values.len())?;
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "data",
                detail: format!("sample at row {}, column {}", pos / cols + 1, pos % cols + 1),
            });
        }
        Ok(Self {
            rows,
            cols,
            values,
            names: None,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::RaggedRow {
                row: i + 1,
                found: r.len(),
                expected: cols,
            });
        }
        let n = rows.len();
        Self::new(n, cols, rows.into_iter().flatten().collect())
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        Error::check_len("data", self.cols, names.len())?;
        self.names = Some(names);
        Ok(self)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols)
    }

    /// The first `k` rows (all rows if `k` exceeds the row count).
    pub fn head(&self, k: usize) -> SampleMatrix {
        let k = k.clamp(1, self.rows);
        SampleMatrix {
            rows: k,
            cols: self.cols,
            values: self.values[..k * self.cols].to_vec(),
            names: self.names.clone(),
        }
    }

    /// New matrix holding the given columns in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<SampleMatrix> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::invalid("data", format!("column {bad} out of range")));
        }
        let values = self.iter_rows().flat_map(|r| cols.iter().map(move |&c| r[c])).collect();
        let mut m = SampleMatrix::new(self.rows, cols.len(), values)?;
        if let Some(names) = &self.names {
            m.names = Some(cols.iter().map(|&c| names[c].clone()).collect());
        }
        Ok(m)
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.values)
    }

    pub fn mean(&self) -> Vec<f64> {
        empirical_mean(self)
    }
}

/// Column means.
pub fn empirical_mean(data: &SampleMatrix) -> Vec<f64> {
    let mut sums = vec![0.0; data.ncols()];
    for r in data.iter_rows() {
        for (s, v) in sums.iter_mut().zip(r) {
            *s += v;
        }
    }
    let k = data.nrows() as f64;
    sums.into_iter().map(|s| s / k).collect()
}

/// Unbiased sample covariance of the given columns (zero matrix for one row).
pub fn empirical_covariance(data: &SampleMatrix, cols: &[usize]) -> DMatrix<f64> {
    let d = cols.len();
    let k = data.nrows();
    let mut means = vec![0.0; d];
    for r in data.iter_rows() {
        for (m, &c) in means.iter_mut().zip(cols) {
            *m += r[c];
        }
    }
    means.iter_mut().for_each(|m| *m /= k as f64);
    let mut cov = DMatrix::zeros(d, d);
    if k < 2 {
        return cov;
    }
    let mut centered = vec![0.0; d];
    for r in data.iter_rows() {
        for ((z, &c), m) in centered.iter_mut().zip(cols).zip(&means) {
            *z = r[c] - m;
        }
        for a in 0..d {
            for b in a..d {
                cov[(a, b)] += centered[a] * centered[b];
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / (k - 1) as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    cov
}

fn parse_records(text: &str, has_header: bool) -> Result<SampleMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut names = None;
    let mut width = None;
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let line = i + 1;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                row: line,
                found: record.len(),
                expected,
            });
        }
        if i == 0 && has_header {
            names = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumeric {
                    row: line,
                    col: col + 1,
                    cell: cell.to_string(),
                })?;
            values.push(v);
        }
        rows += 1;
    }
    let cols = width.unwrap_or(0);
    if rows == 0 {
        return Err(Error::invalid("data", "csv contains no data rows"));
    }
    let m = SampleMatrix::new(rows, cols, values)?;
    match names {
        Some(n) => m.with_names(n),
        None => Ok(m),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a comma-separated numeric file. Rows are reported 1-based, counting
/// the header line when present.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<SampleMatrix> {
    parse_records(&read_text(path.as_ref())?, has_header)
}

/// As [`load_csv`], treating the first line as a header when any of its
/// cells is not a number.
pub fn load_csv_detect_header(path: impl AsRef<Path>) -> Result<SampleMatrix> {
    let text = read_text(path.as_ref())?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let header = first.split(',').any(|c| c.trim().parse::<f64>().is_err());
    parse_records(&text, header)
}

/// Multivariate normal `N(mean, cov)` with a possibly singular covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianRepr", into = "GaussianRepr")]
pub struct GaussianSpec {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct GaussianRepr {
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl TryFrom<GaussianRepr> for GaussianSpec {
    type Error = Error;

    fn try_from(r: GaussianRepr) -> Result<Self> {
        let n = r.mean.len();
        if let Some(row) = r.cov.iter().find(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                context: "data",
                expected: n,
                actual: row.len(),
            });
        }
        Error::check_len("data", n, r.cov.len())?;
        let flat: Vec<f64> = r.cov.into_iter().flatten().collect();
        GaussianSpec::new(r.mean, DMatrix::from_row_slice(n, n, &flat))
    }
}

impl From<GaussianSpec> for GaussianRepr {
    fn from(g: GaussianSpec) -> Self {
        GaussianRepr {
            mean: g.mean.iter().cloned().collect(),
            cov: g.cov.row_iter().map(|r| r.iter().cloned().collect()).collect(),
        }
    }
}

impl GaussianSpec {
    /// Validates symmetry (within `SYMMETRY_TOL`) and positive
    /// semidefiniteness (smallest eigenvalue at least `-1e-10 * trace`).
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(Error::invalid("data", "gaussian needs at least one dimension"));
        }
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "data",
                expected: n,
                actual: cov.nrows(),
            });
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "data",
                detail: "gaussian parameters".into(),
            });
        }
        let asym = linalg::max_asymmetry(&cov);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        linalg::psd_sqrt(&cov)?;
        Ok(Self {
            mean: DVector::from_vec(mean),
            cov: linalg::symmetrize(&cov),
        })
    }

    /// Skips validation; the caller guarantees a symmetric PSD covariance.
    pub(crate) fn from_parts_unchecked(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        Self { mean, cov }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn sampler(&self) -> Result<GaussianSampler> {
        Ok(GaussianSampler {
            mean: self.mean.clone(),
            factor: linalg::psd_sqrt(&self.cov)?,
        })
    }
}

/// Draws from a Gaussian through a cached square-root factor.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    mean: DVector<f64>,
    factor: DMatrix<f64>,
}

impl GaussianSampler {
    pub(crate) fn from_factor(mean: DVector<f64>, factor: DMatrix<f64>) -> Self {
        Self { mean, factor }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Writes one draw into `out`.
    pub fn draw_into(&self, rng: &mut Rng, z: &mut [f64], out: &mut [f64]) {
        let n = self.mean.len();
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(rng);
        }
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut v = self.mean[i];
            for (k, zk) in z.iter().enumerate() {
                v += self.factor[(i, k)] * zk;
            }
            *o = v;
        }
    }
}

/// `N(0, c c^T)` with `c` drawn i.i.d. standard normal from `seed`.
pub fn make_rank1_gaussian(n: usize, seed: u64) -> Result<GaussianSpec> {
    if n == 0 {
        return Err(Error::invalid("data", "dimension must be at least 1"));
    }
    let mut rng = stream_rng(seed, 0);
    let c = DVector::<f64>::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    let cov = &c * c.transpose();
    Ok(GaussianSpec::from_parts_unchecked(DVector::zeros(n), cov))
}

/// `count` i.i.d. rows from `spec`, deterministic in `seed`.
pub fn sample_gaussian(spec: &GaussianSpec, count: usize, seed: u64) -> Result<SampleMatrix> {
    if count == 0 {
        return Err(Error::invalid("data", "sample count must be at least 1"));
    }
    let sampler = spec.sampler()?;
    let n = spec.dim();
    let mut rng = stream_rng(seed, 0);
    let mut values = vec![0.0; count * n];
    let mut z = vec![0.0; n];
    for row in values.chunks_exact_mut(n) {
        sampler.draw_into(&mut rng, &mut z, row);
    }
    SampleMatrix::new(count, n, values)
}

/// One support point of a [`DiscreteDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Vec<f64>,
    pub prob: f64,
}

/// Finite distribution over distinct points; serialized as a JSON list of
/// `{"point": [...], "prob": p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
}

impl TryFrom<Vec<Atom>> for DiscreteDistribution {
    type Error = Error;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        DiscreteDistribution::new(atoms)
    }
}

impl From<DiscreteDistribution> for Vec<Atom> {
    fn from(d: DiscreteDistribution) -> Self {
        d.atoms
    }
}

impl DiscreteDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let n = atoms
            .first()
            .map(|a| a.point.len())
            .ok_or_else(|| Error::InvalidDistribution("empty support".into()))?;
        if n == 0 {
            return Err(Error::InvalidDistribution("zero-dimensional points".into()));
        }
        let mut total = 0.0;
        for (i, a) in atoms.iter().enumerate() {
            if a.point.len() != n {
                return Err(Error::InvalidDistribution(format!(
                    "point {} has {} coordinates, expected {n}",
                    i + 1,
                    a.point.len()
                )));
            }
            if !a.prob.is_finite() || a.prob < 0.0 || a.point.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDistribution(format!(
                    "atom {} is not finite and nonnegative",
                    i + 1
                )));
            }
            if atoms[..i].iter().any(|b| b.point == a.point) {
                return Err(Error::InvalidDistribution(format!("duplicate point {:?}", a.point)));
            }
            total += a.prob;
        }
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { atoms })
    }

    /// Product of independent one-dimensional marginals, each a list of
    /// `(value, probability)` pairs. Zero-probability combinations are kept.
    pub fn product(marginals: &[Vec<(f64, f64)>]) -> Result<Self> {
        let mut atoms = vec![Atom {
            point: Vec::new(),
            prob: 1.0,
        }];
        for m in marginals {
            atoms = atoms
                .iter()
                .flat_map(|a| {
                    m.iter().map(move |(v, p)| {
                        let mut point = a.point.clone();
                        point.push(*v);
                        Atom {
                            point,
                            prob: a.prob * p,
                        }
                    })
                })
                .collect();
        }
        Self::new(atoms)
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].point.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for a in &self.atoms {
            for (mi, v) in m.iter_mut().zip(&a.point) {
                *mi += a.prob * v;
            }
        }
        m
    }

    /// Total probability of the atoms satisfying `pred`.
    pub fn probability(&self, pred: impl Fn(&[f64]) -> bool) -> f64 {
        self.atoms.iter().filter(|a| pred(&a.point)).map(|a| a.prob).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn csv_file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_plain_and_header() {
        let f = csv_file("1,2\n3,4\n5,6");
        let m = load_csv(f.path(), false).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (3, 2));
        assert_eq!(m.row(2), &[5.0, 6.0]);
        assert!(m.names().is_none());

        let f = csv_file("a,b\n1,2\n");
        let m = load_csv(f.path(), true).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (1, 2));
        assert_eq!(m.names().unwrap(), &["a".to_string(), "b".to_string()]);
        assert_eq!(load_csv_detect_header(f.path()).unwrap(), m);
        let f = csv_file(" 1.5 , -2e-1\n");
        assert_eq!(load_csv_detect_header(f.path()).unwrap().row(0), &[1.5, -0.2]);
    }

    #[test]
    fn load_errors() {
        let f = csv_file("1,2\n3");
        assert!(matches!(
            load_csv(f.path(), false),
            Err(Error::RaggedRow {
                row: 2,
                found: 1,
                expected: 2
            })
        ));
        let f = csv_file("1,2\n3,x\n");
        assert!(matches!(
            load_csv(f.path(), false),
            Err(Error::NonNumeric { row: 2, col: 2, .. })
        ));
        let f = csv_file("1,nan\n");
        assert!(matches!(load_csv(f.path(), false), Err(Error::NonNumeric { .. })));
        assert!(matches!(
            load_csv("/definitely/not/here.csv", false),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn means() {
        let m = SampleMatrix::from_rows(vec![vec![0.0, 0.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(empirical_mean(&m), vec![1.0, 2.0]);
        let m = SampleMatrix::from_rows(vec![vec![7.0]]).unwrap();
        assert_eq!(empirical_mean(&m), vec![7.0]);
    }

    #[test]
    fn standard_normal_means_are_close_to_zero() {
        let g = GaussianSpec::new(vec![0.0; 4], DMatrix::identity(4, 4)).unwrap();
        let s = sample_gaussian(&g, 1000, 11).unwrap();
        // 3 sigma / sqrt(1000) ~ 0.095
        assert!(empirical_mean(&s).iter().all(|m| m.abs() < 0.15));
    }

    #[test]
    fn rank1_structure() {
        for seed in 0..5 {
            let g = make_rank1_gaussian(3, seed).unwrap();
            assert_eq!(g, make_rank1_gaussian(3, seed).unwrap());
            let cov = g.cov();
            assert_eq!(linalg::max_asymmetry(cov), 0.0);
            let mut eig: Vec<f64> = cov.clone().symmetric_eigenvalues().iter().cloned().collect();
            eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // trace equals |c|^2 for c c^T
            let norm2 = cov.trace();
            assert!(eig[0].abs() < 1e-10 && eig[1].abs() < 1e-10);
            assert!((eig[2] - norm2).abs() < 1e-10);
        }
        let g = make_rank1_gaussian(1, 3).unwrap();
        assert!(g.cov()[(0, 0)] >= 0.0);
        assert_ne!(make_rank1_gaussian(3, 1).unwrap(), make_rank1_gaussian(3, 2).unwrap());
    }

    #[test]
    fn degenerate_and_rank1_sampling() {
        let g = GaussianSpec::new(vec![1.0, -2.0], DMatrix::zeros(2, 2)).unwrap();
        let s = sample_gaussian(&g, 20, 5).unwrap();
        assert!(s.iter_rows().all(|r| r == [1.0, -2.0]));

        let g = make_rank1_gaussian(3, 9).unwrap();
        let c: Vec<f64> = (0..3).map(|i| g.cov()[(i, 0)]).collect();
        let s = sample_gaussian(&g, 200, 1).unwrap();
        for r in s.iter_rows() {
            // residual of r after projecting on c
            let t = r.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>() / c.iter().map(|b| b * b).sum::<f64>();
            let resid: f64 = r.iter().zip(&c).map(|(a, b)| (a - t * b).powi(2)).sum::<f64>().sqrt();
            assert!(resid < 1e-10, "{resid}");
        }
    }

    #[test]
    fn identity_sample_covariance() {
        let g = GaussianSpec::new(vec![0.0; 3], DMatrix::identity(3, 3)).unwrap();
        let s = sample_gaussian(&g, 10_000, 2).unwrap();
        let cov = empirical_covariance(&s, &[0, 1, 2]);
        // entrywise sd is about 1/sqrt(10000) = 0.01 (0.014 on the diagonal)
        assert!((cov - DMatrix::<f64>::identity(3, 3)).abs().max() < 0.1);
        assert_eq!(s, sample_gaussian(&g, 10_000, 2).unwrap());
    }

    #[test]
    fn gaussian_validation_and_json() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(
            GaussianSpec::new(vec![0.0; 2], bad),
            Err(Error::NotSymmetric(_))
        ));
        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            GaussianSpec::new(vec![0.0; 2], indef),
            Err(Error::NotPsd { .. })
        ));
        let g: GaussianSpec = serde_json::from_str(r#"{"mean":[1,2],"cov":[[2,0.5],[0.5,1]]}"#).unwrap();
        assert_eq!(g.cov()[(0, 1)], 0.5);
        let back: GaussianSpec = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<GaussianSpec>(r#"{"mean":[1,2],"cov":[[2,0.5]]}"#).is_err());
    }

    #[test]
    fn discrete_example_marginal() {
        let d: DiscreteDistribution =
            serde_json::from_str(r#"[{"point":[0,0],"prob":0.5},{"point":[1,1],"prob":0.5}]"#).unwrap();
        assert_eq!(d.probability(|p| p[0] == 1.0), 0.5);
        assert_eq!(d.mean(), vec![0.5, 0.5]);
        assert!(DiscreteDistribution::new(vec![
            Atom {
                point: vec![0.0],
                prob: 0.5
            },
            Atom {
                point: vec![0.0],
                prob: 0.5
            },
        ])
        .is_err());
        assert!(DiscreteDistribution::new(vec![Atom {
            point: vec![0.0],
            prob: 0.9
        }])
        .is_err());
        assert!(DiscreteDistribution::new(vec![
            Atom {
                point: vec![0.0],
                prob: 1.5
            },
            Atom {
                point: vec![1.0],
                prob: -0.5
            },
        ])
        .is_err());
    }

    #[test]
    fn product_distribution() {
        let (p, q) = (0.25, 0.6);
        let d =
            DiscreteDistribution::product(&[vec![(1.0, 1.0 - p), (2.0, p)], vec![(1.0, 1.0 - q), (2.0, q)]]).unwrap();
        assert_eq!(d.atoms().len(), 4);
        let m = d.mean();
        assert!((m[0] - (1.0 + p)).abs() < 1e-15 && (m[1] - (1.0 + q)).abs() < 1e-15);
    }
}
