use std::time::Duration;

use sumfac::bench::{emit_csv, read_csv, run_benchmark, BenchConfig, Method, CSV_HEADER};
use sumfac::Error;

fn small(n_min: usize, n_max: usize) -> BenchConfig {
    BenchConfig {
        n_min,
        n_max,
        repetitions: 2,
        min_sample_time: Duration::ZERO,
        ..BenchConfig::default()
    }
}

#[test]
fn single_point_yields_one_record_per_method_and_rep() {
    let report = run_benchmark(&small(3, 3)).unwrap();
    assert_eq!(report.records.len(), 4);
    assert!(report.skipped.is_empty());
    for r in &report.records {
        let expected = match r.method {
            Method::Dense => 3 * 3u64.pow(6),
            Method::SumFac => 3 * 3u64.pow(4),
        };
        assert_eq!(r.mul_count, expected);
        assert!(r.elapsed_s > 0.0);
    }
}

#[test]
fn counts_are_deterministic_across_runs() {
    let a = run_benchmark(&small(3, 5)).unwrap();
    let b = run_benchmark(&small(3, 5)).unwrap();
    let key = |r: &sumfac::bench::BenchRecord| (r.n, r.method, r.rep, r.mul_count);
    assert_eq!(
        a.records.iter().map(key).collect::<Vec<_>>(),
        b.records.iter().map(key).collect::<Vec<_>>()
    );
}

#[test]
fn oversized_dense_points_are_skipped_not_fatal() {
    let config = BenchConfig {
        max_dense_entries: 1_000,
        ..small(3, 5)
    };
    let report = run_benchmark(&config).unwrap();
    // 3^6 = 729 fits, 4^6 and 5^6 do not
    assert_eq!(report.skipped.len(), 2);
    assert!(report.skipped.iter().all(|s| s.method == Method::Dense));
    let dense = report
        .records
        .iter()
        .filter(|r| r.method == Method::Dense)
        .count();
    let sumfac = report
        .records
        .iter()
        .filter(|r| r.method == Method::SumFac)
        .count();
    assert_eq!((dense, sumfac), (2, 6));
}

#[test]
fn invalid_config_is_rejected() {
    assert!(matches!(
        run_benchmark(&small(5, 3)),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn csv_of_no_records_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    emit_csv(&[], &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.trim_end(), CSV_HEADER.join(","));
}

#[test]
fn csv_round_trips() {
    let report = run_benchmark(&BenchConfig {
        repetitions: 1,
        ..small(3, 3)
    })
    .unwrap();
    assert_eq!(report.records.len(), 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    emit_csv(&report.records, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    let mut back = read_csv(&path).unwrap();
    let mut orig = report.records.clone();
    let key = |r: &sumfac::bench::BenchRecord| (r.n, r.method.as_str(), r.rep);
    back.sort_by_key(key);
    orig.sort_by_key(key);
    assert_eq!(back, orig);
}

#[test]
fn unwritable_csv_path_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    assert!(matches!(emit_csv(&[], &path), Err(Error::Io { .. })));
}
