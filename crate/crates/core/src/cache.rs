//! On-disk cache for distributional matrices.
//!
//! Files are keyed by the SHA-256 of the canonical N-Triples serialization
//! of the dataset, so any change to the input invalidates the entry. The
//! layout is described in `docs/cache-format.md`.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::{write_ntriples, Term, TermKind, TripleSet};
use crate::representations::{ColumnKey, ContextKind, DistMatrix};

pub const CACHE_ENV: &str = "COCOE_CACHE_DIR";
const MAGIC: &[u8; 8] = b"COCOEDM\0";
const VERSION: u32 = 1;

pub type CacheKey = [u8; 32];

/// SHA-256 over a version tag and the canonical triples.
pub fn cache_key(triples: &TripleSet) -> CacheKey {
    struct HashWriter(Sha256);
    impl Write for HashWriter {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            self.0.update(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }
    let mut h = HashWriter(Sha256::new());
    h.0.update(format!("cocoe-matrix-v{VERSION}\n").as_bytes());
    write_ntriples(triples, &mut h).expect("hashing cannot fail");
    h.0.finalize().into()
}

fn hex(key: &CacheKey) -> String {
    key.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        MatrixCache { dir: dir.into() }
    }

    /// Cache rooted at `$COCOE_CACHE_DIR`, if set and non-empty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(MatrixCache::new)
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.dm", hex(key)))
    }

    /// `Ok(None)` when there is no entry; an error when an entry exists but
    /// cannot be read.
    pub fn load(&self, key: &CacheKey) -> Result<Option<DistMatrix>> {
        let path = self.path_for(key);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::file(path, e)),
        };
        read_matrix(BufReader::new(file), key)
            .map(Some)
            .map_err(|reason| Error::Cache { path, reason })
    }

    /// Writes through a temporary file so readers never see partial entries.
    pub fn store(&self, key: &CacheKey, m: &DistMatrix) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::file(&self.dir, e))?;
        let path = self.path_for(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let write = || -> io::Result<()> {
            let mut out = BufWriter::new(File::create(&tmp)?);
            write_matrix(&mut out, key, m)?;
            out.into_inner()?.sync_all()?;
            fs::rename(&tmp, &path)
        };
        write().map_err(|e| {
            let _ = fs::remove_file(&tmp);
            Error::file(&path, e)
        })
    }
}

fn write_terms<W: Write>(out: &mut W, terms: &[Term]) -> io::Result<()> {
    out.write_u64::<LE>(terms.len() as u64)?;
    for t in terms {
        out.write_u8(match t.kind {
            TermKind::Uri => 0,
            TermKind::Literal => 1,
        })?;
        out.write_u32::<LE>(t.lexical.len() as u32)?;
        out.write_all(t.lexical.as_bytes())?;
    }
    Ok(())
}

pub fn write_matrix<W: Write>(out: &mut W, key: &CacheKey, m: &DistMatrix) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_u32::<LE>(VERSION)?;
    out.write_all(key)?;
    write_terms(out, &m.rows)?;
    write_terms(out, &m.predicates)?;
    out.write_u64::<LE>(m.columns.len() as u64)?;
    for c in &m.columns {
        out.write_u8(match c.kind {
            ContextKind::Outgoing => 0,
            ContextKind::Incoming => 1,
        })?;
        out.write_u32::<LE>(c.first)?;
        out.write_u32::<LE>(c.second)?;
    }
    out.write_u64::<LE>(m.row_ptr.len() as u64)?;
    for &p in &m.row_ptr {
        out.write_u64::<LE>(p as u64)?;
    }
    out.write_u64::<LE>(m.row_cols.len() as u64)?;
    for &c in &m.row_cols {
        out.write_u32::<LE>(c)?;
    }
    out.write_u64::<LE>(m.col_sums.len() as u64)?;
    for &s in &m.col_sums {
        out.write_u64::<LE>(s)?;
    }
    out.write_u64::<LE>(m.col_scores.len() as u64)?;
    for &s in &m.col_scores {
        out.write_f64::<LE>(s)?;
    }
    Ok(())
}

type Decode<T> = std::result::Result<T, String>;

fn io_err(e: io::Error) -> String {
    format!("truncated or unreadable entry ({e})")
}

fn read_len<R: Read>(input: &mut R, limit: u64) -> Decode<usize> {
    let n = input.read_u64::<LE>().map_err(io_err)?;
    if n > limit {
        return Err(format!("implausible length {n}"));
    }
    Ok(n as usize)
}

const MAX_LEN: u64 = 1 << 40;

fn read_terms<R: Read>(input: &mut R) -> Decode<Vec<Term>> {
    let n = read_len(input, MAX_LEN)?;
    let mut terms = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let kind = match input.read_u8().map_err(io_err)? {
            0 => TermKind::Uri,
            1 => TermKind::Literal,
            k => return Err(format!("unknown term kind {k}")),
        };
        let len = input.read_u32::<LE>().map_err(io_err)? as usize;
        let mut buf = vec![0u8; len];
        input.read_exact(&mut buf).map_err(io_err)?;
        let lexical = String::from_utf8(buf).map_err(|_| "term is not UTF-8".to_string())?;
        terms.push(Term { kind, lexical });
    }
    if !terms.windows(2).all(|w| w[0] < w[1]) {
        return Err("term table is not sorted".into());
    }
    Ok(terms)
}

fn read_vec<R: Read, T>(input: &mut R, mut item: impl FnMut(&mut R) -> io::Result<T>) -> Decode<Vec<T>> {
    let n = read_len(input, MAX_LEN)?;
    let mut out = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        out.push(item(input).map_err(io_err)?);
    }
    Ok(out)
}

/// Decodes an entry, checking the header, the key and structural
/// consistency of the payload.
pub fn read_matrix<R: Read>(mut input: R, key: &CacheKey) -> Decode<DistMatrix> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err("not a matrix cache file".into());
    }
    let version = input.read_u32::<LE>().map_err(io_err)?;
    if version != VERSION {
        return Err(format!("unsupported version {version}"));
    }
    let mut stored = [0u8; 32];
    input.read_exact(&mut stored).map_err(io_err)?;
    if &stored != key {
        return Err("key does not match the dataset".into());
    }
    let rows = read_terms(&mut input)?;
    let predicates = read_terms(&mut input)?;
    let columns = read_vec(&mut input, |r| {
        let kind = match r.read_u8()? {
            0 => ContextKind::Outgoing,
            1 => ContextKind::Incoming,
            _ => return Err(io::Error::new(io::ErrorKind::InvalidData, "bad column kind")),
        };
        Ok(ColumnKey { kind, first: r.read_u32::<LE>()?, second: r.read_u32::<LE>()? })
    })?;
    let row_ptr = read_vec(&mut input, |r| r.read_u64::<LE>().map(|v| v as usize))?;
    let row_cols = read_vec(&mut input, |r| r.read_u32::<LE>())?;
    let col_sums = read_vec(&mut input, |r| r.read_u64::<LE>())?;
    let col_scores = read_vec(&mut input, |r| r.read_f64::<LE>())?;

    let consistent = row_ptr.len() == rows.len() + 1
        && row_ptr.first() == Some(&0)
        && row_ptr.last() == Some(&row_cols.len())
        && row_ptr.windows(2).all(|w| w[0] <= w[1])
        && col_sums.len() == columns.len()
        && col_scores.len() == columns.len()
        && row_cols.iter().all(|&c| (c as usize) < columns.len())
        && columns.iter().all(|k| {
            let (p, n) = match k.kind {
                ContextKind::Outgoing => (k.first, k.second),
                ContextKind::Incoming => (k.second, k.first),
            };
            (p as usize) < predicates.len() && (n as usize) < rows.len()
        });
    if !consistent {
        return Err("inconsistent matrix payload".into());
    }
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing).map_err(io_err)? != 0 {
        return Err("trailing bytes after payload".into());
    }
    Ok(DistMatrix { rows, predicates, columns, row_ptr, row_cols, col_sums, col_scores })
}

/// Loads the matrix for `triples` from `cache`, or builds it with `build`
/// and stores it. Unreadable entries are rebuilt and overwritten.
pub fn load_or_build(
    cache: Option<&MatrixCache>,
    triples: &TripleSet,
    build: impl FnOnce() -> DistMatrix,
) -> DistMatrix {
    let Some(cache) = cache else {
        return build();
    };
    let key = cache_key(triples);
    match cache.load(&key) {
        Ok(Some(m)) => {
            log::info!("matrix cache hit: {}", cache.path_for(&key).display());
            return m;
        }
        Ok(None) => {}
        Err(e) => log::warn!("ignoring matrix cache entry: {e}"),
    }
    let m = build();
    if let Err(e) = cache.store(&key, &m) {
        log::warn!("could not write matrix cache: {e}");
    }
    m
}
