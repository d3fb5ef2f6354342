//! Scaling benchmark: dense versus sum-factorized evaluation of
//! `Σ_j (∂ℓ/∂ξ_j) ∘ C` with `C_ij = c_i c_j`, swept over the 1D size `n`.
//!
//! Each `(n, method)` point is checked for correctness before it is timed.
//! Timing is single-threaded; each repetition runs the workload enough times
//! to fill [`BenchConfig::min_sample_time`] and reports the per-call time.

use std::fmt::{self, Write as _};
use std::hint::black_box;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hadamard::{
    assemble_basis_factors, assemble_operand_factors, build_sparsity_pattern, hadamard_evaluate,
    hadamard_row_sum, RankOne, SparseFactorSet, SparsityPattern,
};
use crate::ledger::Probe;
use crate::matrix::DenseMatrix;
use crate::operators_1d::{gauss_legendre, kronecker_apply, lagrange_diff_matrix, Factor1D};
use crate::oracle;

/// Largest `n` at which the full dense comparison runs before timing.
pub const DENSE_PRECHECK_MAX_N: usize = 6;

const ROW_SUM_TOLERANCE: f64 = 1e-12;
const ORACLE_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Dense,
    SumFac,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dense => "dense",
            Method::SumFac => "sumfac",
        }
    }

    /// Multiplications in the evaluation stage.
    pub fn theoretical_multiplications(self, d: usize, n: usize) -> u64 {
        let n = n as u64;
        match self {
            Method::Dense => d as u64 * n.pow(2 * d as u32),
            Method::SumFac => d as u64 * n.pow(d as u32 + 1),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dense" => Ok(Method::Dense),
            "sumfac" => Ok(Method::SumFac),
            other => Err(Error::invalid(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub d: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub output: Option<PathBuf>,
    pub include_pattern: bool,
    pub low: f64,
    pub high: f64,
    /// Dense points needing more than this many entries per matrix are skipped.
    pub max_dense_entries: usize,
    pub min_sample_time: Duration,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            d: 3,
            n_min: 3,
            n_max: 15,
            repetitions: 5,
            seed: 0,
            methods: vec![Method::Dense, Method::SumFac],
            output: None,
            include_pattern: false,
            low: 1e-8,
            high: 30.0,
            max_dense_entries: oracle::DEFAULT_MAX_ENTRIES,
            min_sample_time: Duration::from_millis(20),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::invalid(msg.to_string()));
        if self.d == 0 {
            return fail("dimension must be at least 1");
        }
        if self.n_min == 0 {
            return fail("n-min must be at least 1");
        }
        if self.n_max < self.n_min {
            return fail("n-max must not be below n-min");
        }
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1");
        }
        if self.methods.is_empty() {
            return fail("at least one method is required");
        }
        if !(self.low > 0.0 && self.low < self.high && self.high.is_finite()) {
            return fail("operand range needs 0 < low < high");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub d: usize,
    pub n: usize,
    pub method: Method,
    pub rep: usize,
    pub elapsed_s: f64,
    pub mul_count: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkippedPoint {
    pub d: usize,
    pub n: usize,
    pub method: Method,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<SkippedPoint>,
}

/// `n^d` operand values uniform in `[low, high)`, reproducible from the seed.
pub fn operand_vector(seed: u64, d: usize, n: usize, low: f64, high: f64) -> Vec<f64> {
    let stream = seed ^ ((d as u64) << 32 | n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    (0..n.pow(d as u32))
        .map(|_| rng.gen_range(low..high))
        .collect()
}

struct Point {
    d: usize,
    n: usize,
    diff: DenseMatrix,
    ones: Vec<f64>,
    c: Vec<f64>,
    dense_factor_lists: Vec<Vec<DenseMatrix>>,
}

/// Dense storage for one `(d, n)` point, allocated outside the timed region.
struct DenseWorkspace {
    operand: DenseMatrix,
    kronecker: DenseMatrix,
    product: DenseMatrix,
    total: DenseMatrix,
}

impl DenseWorkspace {
    fn new(len: usize) -> Self {
        DenseWorkspace {
            operand: DenseMatrix::zeros(len, len),
            kronecker: DenseMatrix::zeros(len, len),
            product: DenseMatrix::zeros(len, len),
            total: DenseMatrix::zeros(len, len),
        }
    }
}

impl Point {
    fn new(config: &BenchConfig, n: usize) -> Result<Self> {
        let diff = lagrange_diff_matrix(&gauss_legendre(n)?)?;
        let ones = vec![1.0; n];
        let dense_factor_lists = (0..config.d)
            .map(|j| oracle::basis_factor_list(&diff, &ones, config.d, j))
            .collect();
        Ok(Point {
            d: config.d,
            n,
            diff,
            ones,
            dense_factor_lists,
            c: operand_vector(config.seed, config.d, n, config.low, config.high),
        })
    }

    fn dense_entries(&self) -> Option<usize> {
        self.n.checked_pow(2 * self.d as u32)
    }

    fn sumfac(&self, pattern: &SparsityPattern) -> Result<SparseFactorSet> {
        let basis = assemble_basis_factors(pattern, &self.diff, &self.ones)?;
        let operand = assemble_operand_factors(pattern, &RankOne::new(&self.c))?;
        hadamard_evaluate(&basis, &operand)
    }

    fn sumfac_with_pattern(&self) -> Result<SparseFactorSet> {
        let pattern = build_sparsity_pattern(self.n, self.n, self.d)?;
        self.sumfac(&pattern)
    }

    /// Fills `ws` with `Σ_j K_j ∘ C`, building every dense matrix from
    /// scratch but reusing the storage.
    fn dense(&self, ws: &mut DenseWorkspace) -> Result<()> {
        oracle::dense_operand_into(&RankOne::new(&self.c), 0, &mut ws.operand)?;
        ws.total.as_mut_slice().fill(0.0);
        for factors in &self.dense_factor_lists {
            oracle::dense_kronecker_into(factors, &mut ws.kronecker)?;
            oracle::dense_hadamard_into(&ws.kronecker, &ws.operand, &mut ws.product)?;
            ws.total.add_assign(&ws.product)?;
        }
        Ok(())
    }

    /// `[(K_j ∘ c cᵀ) 1]_r = c_r (K_j c)_r`, computed by sum factorization.
    fn expected_row_sums(&self) -> Result<Vec<Vec<f64>>> {
        (0..self.d)
            .map(|j| {
                let factors: Vec<Factor1D<'_>> = (0..self.d)
                    .map(|k| {
                        if k == j {
                            Factor1D::Dense(&self.diff)
                        } else {
                            Factor1D::Identity(self.n)
                        }
                    })
                    .collect();
                let kc = kronecker_apply(&factors, &self.c)?;
                Ok(kc.iter().zip(&self.c).map(|(a, b)| a * b).collect())
            })
            .collect()
    }
}

fn gate(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::CorrectnessGate(msg()))
    }
}

fn check_row_sums(got: &[f64], expected: &[f64], what: &str, n: usize) -> Result<()> {
    let err = oracle::relative_error_vec(got, expected);
    gate(err <= ROW_SUM_TOLERANCE, || {
        format!("{what} row sums at n={n} off by {err:e} relative")
    })
}

fn timestamp_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Runs the sweep. Dense points beyond the capacity limit are skipped and
/// reported; a failed correctness check aborts with
/// [`Error::CorrectnessGate`].
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();

    let mut report = BenchReport::default();
    for n in config.n_min..=config.n_max {
        let point = Point::new(config, n)?;
        let pattern = build_sparsity_pattern(n, n, config.d)?;
        let dense_fits = point
            .dense_entries()
            .is_some_and(|e| e <= config.max_dense_entries);

        let expected = point.expected_row_sums()?;
        let sumfac_result = point.sumfac(&pattern)?;
        let sums = hadamard_row_sum(&sumfac_result, &pattern)?;
        for (got, want) in sums.iter().zip(&expected) {
            check_row_sums(got, want, "sum-factorized", n)?;
        }

        let mut workspace = None;
        if dense_fits && (methods.contains(&Method::Dense) || n <= DENSE_PRECHECK_MAX_N) {
            let mut ws = DenseWorkspace::new(n.pow(config.d as u32));
            point.dense(&mut ws)?;
            let total: Vec<f64> = (0..ws.total.rows())
                .map(|r| expected.iter().map(|e| e[r]).sum())
                .collect();
            check_row_sums(&ws.total.row_sums(), &total, "dense", n)?;
            workspace = Some(ws);
        }
        if n <= DENSE_PRECHECK_MAX_N {
            if let Some(DenseWorkspace { total: dense, .. }) = &workspace {
                let mut scattered = DenseMatrix::zeros(dense.rows(), dense.cols());
                for j in 0..config.d {
                    scattered.add_assign(&oracle::scatter(&sumfac_result, &pattern, j)?)?;
                }
                let err = oracle::relative_error(&scattered, dense);
                gate(err <= ORACLE_TOLERANCE, || {
                    format!("sum-factorized and dense results differ by {err:e} at n={n}")
                })?;
            }
        }
        drop(sumfac_result);

        for &method in &methods {
            if method == Method::Dense && !dense_fits {
                report.skipped.push(SkippedPoint {
                    d: config.d,
                    n,
                    method,
                    reason: format!(
                        "n^{} entries exceed the dense limit of {}",
                        2 * config.d,
                        config.max_dense_entries
                    ),
                });
                continue;
            }
            let mut workload = || -> Result<()> {
                match method {
                    Method::Dense => {
                        let ws = workspace.as_mut().expect("allocated for dense points");
                        point.dense(ws)?;
                        black_box(&ws.total);
                    }
                    Method::SumFac if config.include_pattern => {
                        black_box(point.sumfac_with_pattern()?);
                    }
                    Method::SumFac => {
                        black_box(point.sumfac(&pattern)?);
                    }
                }
                Ok(())
            };

            // Warm-up, discarded; also measures the evaluation-stage count.
            let probe = Probe::start();
            let start = Instant::now();
            workload()?;
            let warm = start.elapsed();
            let mul_count = probe.multiplications();
            let theory = method.theoretical_multiplications(config.d, n);
            gate(mul_count == theory, || {
                format!(
                    "{method} at n={n} performed {mul_count} multiplications, expected {theory}"
                )
            })?;

            let iterations = if warm >= config.min_sample_time {
                1
            } else {
                let per = warm.as_secs_f64().max(1e-9);
                (config.min_sample_time.as_secs_f64() / per).ceil() as usize
            };
            for rep in 0..config.repetitions {
                let start = Instant::now();
                for _ in 0..iterations {
                    workload()?;
                }
                let elapsed_s = start.elapsed().as_secs_f64() / iterations as f64;
                report.records.push(BenchRecord {
                    d: config.d,
                    n,
                    method,
                    rep,
                    elapsed_s: elapsed_s.max(f64::MIN_POSITIVE),
                    mul_count,
                    timestamp: timestamp_ms(),
                });
            }
        }
    }
    Ok(report)
}

/// Median elapsed time per `n` for one method, ascending in `n`.
pub fn median_elapsed(records: &[BenchRecord], method: Method) -> Vec<(usize, f64)> {
    let mut ns: Vec<usize> = records
        .iter()
        .filter(|r| r.method == method)
        .map(|r| r.n)
        .collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .filter_map(|n| {
            let mut times: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method && r.n == n && r.elapsed_s > 0.0)
                .map(|r| r.elapsed_s)
                .collect();
            if times.is_empty() {
                return None;
            }
            times.sort_by(f64::total_cmp);
            let mid = times.len() / 2;
            let median = if times.len() % 2 == 1 {
                times[mid]
            } else {
                0.5 * (times[mid - 1] + times[mid])
            };
            Some((n, median))
        })
        .collect()
}

/// Least-squares slope of `log(median elapsed)` against `log(n)`.
pub fn fit_slope(records: &[BenchRecord], method: Method) -> Result<f64> {
    let points = median_elapsed(records, method);
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: points.len(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, t)| t.ln()).collect();
    let count = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / count;
    let my = ys.iter().sum::<f64>() / count;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

pub const CSV_HEADER: [&str; 7] = [
    "d",
    "n",
    "method",
    "rep",
    "elapsed_s",
    "mul_count",
    "timestamp",
];

/// Writes records sorted by `(d, n, method, rep)`.
pub fn emit_csv(records: &[BenchRecord], path: &Path) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let csv_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => io_err(e),
        other => Error::Csv {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    };
    let mut sorted: Vec<&BenchRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.d, r.n, r.method, r.rep));

    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    writer.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in sorted {
        writer
            .write_record([
                r.d.to_string(),
                r.n.to_string(),
                r.method.to_string(),
                r.rep.to_string(),
                // Display for f64 is plain decimal and round-trips exactly.
                format!("{}", r.elapsed_s),
                r.mul_count.to_string(),
                r.timestamp.to_string(),
            ])
            .map_err(csv_err)?;
    }
    writer.flush().map_err(io_err)
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRecord>> {
    let malformed = |message: String| Error::Csv {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => malformed(format!("{other:?}")),
    })?;
    let header = reader.headers().map_err(|e| malformed(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(malformed(format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| malformed(e.to_string()))?;
        let field = |i: usize| row.get(i).unwrap_or_default();
        let bad = |what: &str| malformed(format!("record {}: bad {what}", line + 1));
        records.push(BenchRecord {
            d: field(0).parse().map_err(|_| bad("d"))?,
            n: field(1).parse().map_err(|_| bad("n"))?,
            method: field(2).parse().map_err(|_| bad("method"))?,
            rep: field(3).parse().map_err(|_| bad("rep"))?,
            elapsed_s: field(4).parse().map_err(|_| bad("elapsed_s"))?,
            mul_count: field(5).parse().map_err(|_| bad("mul_count"))?,
            timestamp: field(6).parse().map_err(|_| bad("timestamp"))?,
        });
    }
    Ok(records)
}

/// Human-readable table of median times with fitted slopes.
pub fn summary(report: &BenchReport) -> String {
    let dense = median_elapsed(&report.records, Method::Dense);
    let sumfac = median_elapsed(&report.records, Method::SumFac);
    let mut ns: Vec<usize> = dense.iter().chain(&sumfac).map(|(n, _)| *n).collect();
    ns.sort_unstable();
    ns.dedup();
    let lookup = |v: &[(usize, f64)], n| v.iter().find(|(k, _)| *k == n).map(|(_, t)| *t);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4}  {:>14}  {:>14}  {:>9}",
        "n", "dense [s]", "sumfac [s]", "speedup"
    );
    for n in ns {
        let (d, s) = (lookup(&dense, n), lookup(&sumfac, n));
        let fmt_t = |t: Option<f64>| t.map_or("-".to_string(), |t| format!("{t:.6e}"));
        let speedup = match (d, s) {
            (Some(d), Some(s)) => format!("{:.1}", d / s),
            _ => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{n:>4}  {:>14}  {:>14}  {speedup:>9}",
            fmt_t(d),
            fmt_t(s)
        );
    }
    for method in [Method::Dense, Method::SumFac] {
        match fit_slope(&report.records, method) {
            Ok(slope) => {
                let _ = writeln!(out, "log-log slope ({method}): {slope:.3}");
            }
            Err(Error::InsufficientData { got, .. }) if got > 0 => {
                let _ = writeln!(out, "log-log slope ({method}): needs 3 sizes, have {got}");
            }
            Err(_) => {}
        }
    }
    for s in &report.skipped {
        let _ = writeln!(out, "skipped {} at n={}: {}", s.method, s.n, s.reason);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(method: Method, f: impl Fn(f64) -> f64) -> Vec<BenchRecord> {
        (3..=15)
            .flat_map(|n| {
                let t = f(n as f64);
                (0..3).map(move |rep| BenchRecord {
                    d: 3,
                    n,
                    method,
                    rep,
                    elapsed_s: t,
                    mul_count: 0,
                    timestamp: 0,
                })
            })
            .collect()
    }

    #[test]
    fn slope_is_exact_on_power_laws() {
        let s = fit_slope(&synthetic(Method::SumFac, |n| n.powi(4)), Method::SumFac).unwrap();
        assert!((s - 4.0).abs() <= 1e-9);
        let s = fit_slope(
            &synthetic(Method::Dense, |n| 2.5e-9 * n.powi(6)),
            Method::Dense,
        )
        .unwrap();
        assert!((s - 6.0).abs() <= 1e-9);
    }

    #[test]
    fn slope_needs_three_sizes() {
        let records: Vec<_> = synthetic(Method::Dense, |n| n)
            .into_iter()
            .filter(|r| r.n < 5)
            .collect();
        assert!(matches!(
            fit_slope(&records, Method::Dense),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn median_ignores_outliers() {
        let mut records = synthetic(Method::SumFac, |_| 1.0);
        records[0].elapsed_s = 100.0;
        let med = median_elapsed(&records, Method::SumFac);
        assert_eq!(med[0], (3, 1.0));
    }

    #[test]
    fn config_validation() {
        assert!(BenchConfig::default().validate().is_ok());
        let bad = [
            BenchConfig {
                n_min: 0,
                ..Default::default()
            },
            BenchConfig {
                n_min: 5,
                n_max: 4,
                ..Default::default()
            },
            BenchConfig {
                repetitions: 0,
                ..Default::default()
            },
            BenchConfig {
                low: 0.0,
                ..Default::default()
            },
            BenchConfig {
                low: 3.0,
                high: 2.0,
                ..Default::default()
            },
            BenchConfig {
                methods: vec![],
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::InvalidInput(_))), "{c:?}");
        }
    }

    #[test]
    fn operand_is_reproducible_and_in_range() {
        let a = operand_vector(7, 3, 4, 1e-8, 30.0);
        assert_eq!(a, operand_vector(7, 3, 4, 1e-8, 30.0));
        assert_ne!(a, operand_vector(8, 3, 4, 1e-8, 30.0));
        assert_eq!(a.len(), 64);
        assert!(a.iter().all(|&v| (1e-8..30.0).contains(&v)));
    }

    #[test]
    fn method_round_trips_through_text() {
        for m in [Method::Dense, Method::SumFac] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("sparse".parse::<Method>().is_err());
    }
}
