//! File formats: sample input, critical-value tables, the on-disk table
//! cache and empirical-CDF output.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::limit::{EmpiricalDistribution, Size};
use crate::sim::CriticalValueTable;
use crate::stats::Kind;

/// Bumped whenever simulation output for fixed parameters may change.
pub const CACHE_VERSION: &str = concat!("logit-gof/", env!("CARGO_PKG_VERSION"), "/1");

/// Parses one real per line; blank lines and lines starting with `#` are skipped.
pub fn parse_sample(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let x: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            text: line.to_string(),
        })?;
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        out.push(x);
    }
    Ok(out)
}

pub fn read_sample(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sample(&text)
}

#[derive(Debug, Serialize, Deserialize)]
struct TableRow {
    kind: Kind,
    size: String,
    level: f64,
    critval: f64,
    reps: usize,
    truncation: Option<usize>,
    seed: u64,
}

/// Writes `kind,size,level,critval,reps,truncation,seed`, one row per level.
pub fn write_table<W: Write>(table: &CriticalValueTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (&level, &critval) in table.levels().iter().zip(table.critvals()) {
        w.serialize(TableRow {
            kind: table.kind,
            size: table.size.to_string(),
            level,
            critval,
            reps: table.reps,
            truncation: table.truncation,
            seed: table.seed,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_table<R: Read>(input: R) -> Result<CriticalValueTable> {
    let mut rdr = csv::Reader::from_reader(input);
    let rows: Vec<TableRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
    let first = rows
        .first()
        .ok_or_else(|| Error::MalformedTable("no rows".into()))?;
    if rows.iter().any(|r| {
        r.kind != first.kind
            || r.size != first.size
            || r.reps != first.reps
            || r.truncation != first.truncation
            || r.seed != first.seed
    }) {
        return Err(Error::MalformedTable(
            "rows describe different tables".into(),
        ));
    }
    let size: Size = first.size.parse().map_err(Error::MalformedTable)?;
    CriticalValueTable::new(
        first.kind,
        size,
        rows.iter().map(|r| r.level).collect(),
        rows.iter().map(|r| r.critval).collect(),
        first.reps,
        first.truncation,
        first.seed,
    )
}

/// Writes the bytes to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn table_to_string(table: &CriticalValueTable) -> Result<String> {
    let mut buf = Vec::new();
    write_table(table, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn write_table_file(path: &Path, table: &CriticalValueTable) -> Result<()> {
    write_atomic(path, table_to_string(table)?.as_bytes())
}

pub fn read_table_file(path: &Path) -> Result<CriticalValueTable> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_table(f)
}

/// Parameters that fully determine a critical-value table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableKey {
    pub kind: Kind,
    pub size: Size,
    pub levels: Vec<f64>,
    pub reps: usize,
    /// Ignored for finite sizes.
    pub truncation: usize,
    pub seed: u64,
}

impl TableKey {
    pub fn digest(&self) -> String {
        let truncation = match self.size {
            Size::Finite(_) => 0,
            Size::Asymptotic => self.truncation,
        };
        let levels: Vec<String> = self.levels.iter().map(|l| l.to_string()).collect();
        let text = format!(
            "{CACHE_VERSION}|{}|{}|{}|{}|{}|{}",
            self.kind,
            self.size,
            levels.join(";"),
            self.reps,
            truncation,
            self.seed
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn file_name(&self) -> String {
        format!(
            "critvals-{}-{}-{}.csv",
            self.kind,
            self.size,
            &self.digest()[..16]
        )
    }
}

/// Directory of content-addressed table files.
#[derive(Debug, Clone)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into() }
    }

    pub fn path(&self, key: &TableKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// Cached table, if present and readable.
    pub fn load(&self, key: &TableKey) -> Option<CriticalValueTable> {
        read_table_file(&self.path(key)).ok()
    }

    pub fn store(&self, key: &TableKey, table: &CriticalValueTable) -> Result<PathBuf> {
        let path = self.path(key);
        write_table_file(&path, table)?;
        Ok(path)
    }

    /// Returns the cached table or computes and stores it. The flag reports a cache hit.
    pub fn get_or_compute<F>(
        &self,
        key: &TableKey,
        compute: F,
    ) -> Result<(CriticalValueTable, bool)>
    where
        F: FnOnce() -> Result<CriticalValueTable>,
    {
        if let Some(t) = self.load(key) {
            return Ok((t, true));
        }
        let t = compute()?;
        self.store(key, &t)?;
        Ok((t, false))
    }
}

/// Writes `x,cdf` rows: the sorted draws with plotting positions `k/N`.
pub fn write_ecdf<W: Write>(dist: &EmpiricalDistribution, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "cdf"])?;
    let reps = dist.reps() as f64;
    for (i, &x) in dist.draws().iter().enumerate() {
        w.serialize((x, (i + 1) as f64 / reps))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::Provenance;
    use proptest::prelude::*;

    fn table(size: Size, truncation: Option<usize>) -> CriticalValueTable {
        CriticalValueTable::new(
            Kind::LocationScale,
            size,
            vec![0.85, 0.9, 0.95, 0.99],
            vec![2.2177, 2.49, 2.953, 4.0200000000000005],
            200_000,
            truncation,
            u64::MAX,
        )
        .unwrap()
    }

    #[test]
    fn sample_parsing() {
        let xs = parse_sample("# header\n1.5\n\n  -2e3 \n# mid\n0\n").unwrap();
        assert_eq!(xs, vec![1.5, -2000.0, 0.0]);
        assert!(matches!(
            parse_sample("1\nabc\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_sample("1\ninf\n"), Err(Error::NonFinite(_))));
    }

    #[test]
    fn table_csv_layout() {
        let text = table_to_string(&table(Size::Finite(20), None)).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "kind,size,level,critval,reps,truncation,seed"
        );
        assert_eq!(
            lines.next().unwrap(),
            "v,20,0.85,2.2177,200000,,18446744073709551615"
        );
        assert!(text.ends_with('\n'));
        let asym = table_to_string(&table(Size::Asymptotic, Some(10_000))).unwrap();
        assert!(asym
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("v,asymptotic,0.85,2.2177,200000,10000,"));
    }

    #[test]
    fn table_round_trip() {
        for t in [
            table(Size::Finite(20), None),
            table(Size::Asymptotic, Some(10_000)),
        ] {
            let back = read_table(table_to_string(&t).unwrap().as_bytes()).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn malformed_tables() {
        assert!(read_table("kind,size,level,critval,reps,truncation,seed\n".as_bytes()).is_err());
        let mixed =
            "kind,size,level,critval,reps,truncation,seed\nv,20,0.9,1,10,,0\nw,20,0.95,2,10,,0\n";
        assert!(matches!(
            read_table(mixed.as_bytes()),
            Err(Error::MalformedTable(_))
        ));
        let bad_size = "kind,size,level,critval,reps,truncation,seed\nv,twenty,0.9,1,10,,0\n";
        assert!(matches!(
            read_table(bad_size.as_bytes()),
            Err(Error::MalformedTable(_))
        ));
    }

    #[test]
    fn cache_keys_separate_parameters() {
        let key = TableKey {
            kind: Kind::Location,
            size: Size::Finite(20),
            levels: vec![0.9, 0.95],
            reps: 1000,
            truncation: 10_000,
            seed: 1,
        };
        let mut other = key.clone();
        other.truncation = 5;
        // truncation is irrelevant for finite sizes
        assert_eq!(key.digest(), other.digest());
        other.seed = 2;
        assert_ne!(key.digest(), other.digest());
        let mut asym = key.clone();
        asym.size = Size::Asymptotic;
        let mut asym2 = asym.clone();
        asym2.truncation = 5;
        assert_ne!(asym.digest(), asym2.digest());
        assert!(key.file_name().starts_with("critvals-w-20-"));
    }

    #[test]
    fn cache_hit_after_store() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TableCache::new(dir.path().join("nested"));
        let key = TableKey {
            kind: Kind::LocationScale,
            size: Size::Finite(20),
            levels: vec![0.85, 0.9, 0.95, 0.99],
            reps: 200_000,
            truncation: 0,
            seed: u64::MAX,
        };
        let t = table(Size::Finite(20), None);
        let (first, hit) = cache.get_or_compute(&key, || Ok(t.clone())).unwrap();
        assert!(!hit);
        let (second, hit) = cache
            .get_or_compute(&key, || panic!("should not recompute"))
            .unwrap();
        assert!(hit);
        assert_eq!(first, second);
    }

    #[test]
    fn ecdf_layout() {
        let d = EmpiricalDistribution::from_draws(
            vec![3.0, 1.0, 2.0, 4.0],
            Provenance {
                kind: Kind::Location,
                size: Size::Asymptotic,
                truncation: Some(10),
                seed: 0,
            },
        );
        let mut buf = Vec::new();
        write_ecdf(&d, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x,cdf\n1.0,0.25\n2.0,0.5\n3.0,0.75\n4.0,1.0\n"
        );
    }

    proptest! {
        #[test]
        fn arbitrary_tables_round_trip(
            n in 2usize..10_000,
            reps in 1usize..1_000_000,
            seed in any::<u64>(),
            base in -1e3f64..1e3,
            steps in prop::collection::vec(1e-9f64..10.0, 1..6),
        ) {
            let levels: Vec<f64> = (1..=steps.len()).map(|i| i as f64 / (steps.len() + 1) as f64).collect();
            let critvals: Vec<f64> = steps.iter().scan(base, |acc, s| { *acc += s; Some(*acc) }).collect();
            let t = CriticalValueTable::new(Kind::Location, Size::Finite(n), levels, critvals, reps, None, seed).unwrap();
            let back = read_table(table_to_string(&t).unwrap().as_bytes()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
