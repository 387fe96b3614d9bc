//! Binary-field linear algebra, code construction and loading, and the
//! exhaustive maximum-likelihood oracle.
//!
//! A [`LinearCode`] keeps the parity-check matrix it was built from together
//! with a systematic form `[P | I]` reached by row operations after a column
//! permutation. Decoders that need the systematic form (GCD) work in permuted
//! coordinates and map their output back through [`LinearCode::col_perm`].

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// Largest dimension accepted by [`brute_force_mld`].
pub const MLD_MAX_K: usize = 24;

/// Dense bit matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        Self {
            rows: vec![BitVec::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVec>) -> Result<Self> {
        let cols = rows
            .first()
            .map(BitVec::len)
            .ok_or_else(|| Error::InvalidInput("matrix needs at least one row".into()))?;
        if cols == 0 {
            return Err(Error::InvalidInput("matrix needs at least one column".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(Self { rows, cols })
    }

    /// Parses rows given as `0`/`1` strings. Mainly for tests and examples.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                BitVec::from_str01(r).ok_or_else(|| Error::InvalidInput(format!("bad row {r:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.rows[r].set(c, v);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut out = BitVec::zeros(self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                out.set(r, true);
            }
        }
        out
    }

    pub fn columns(&self) -> Vec<BitVec> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// `self * v^T` for a row vector `v` of length `cols`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols);
        let mut out = BitVec::zeros(self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(r, true);
            }
        }
        out
    }

    pub fn mul(&self, other: &BinMatrix) -> BinMatrix {
        assert_eq!(self.cols, other.rows());
        let mut out = BinMatrix::zeros(self.rows(), other.cols);
        for (r, row) in self.rows.iter().enumerate() {
            for i in row.ones() {
                out.rows[r].xor_assign(&other.rows[i]);
            }
        }
        out
    }

    pub fn transpose(&self) -> BinMatrix {
        let mut out = BinMatrix::zeros(self.cols, self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                out.set(c, r, true);
            }
        }
        out
    }

    /// Returns the matrix with columns reordered so that column `j` of the
    /// result is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> BinMatrix {
        BinMatrix {
            rows: self.rows.iter().map(|r| r.permuted(perm)).collect(),
            cols: self.cols,
        }
    }

    /// Horizontal concatenation `[self | right]`.
    pub fn hcat(&self, right: &BinMatrix) -> BinMatrix {
        assert_eq!(self.rows(), right.rows());
        BinMatrix {
            rows: self
                .rows
                .iter()
                .zip(&right.rows)
                .map(|(a, b)| a.concat(b))
                .collect(),
            cols: self.cols + right.cols,
        }
    }

    pub fn submatrix_cols(&self, start: usize, len: usize) -> BinMatrix {
        BinMatrix {
            rows: self.rows.iter().map(|r| r.slice(start, len)).collect(),
            cols: len,
        }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            if let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) {
                rows.swap(rank, p);
                let pivot = rows[rank].clone();
                for (r, row) in rows.iter_mut().enumerate() {
                    if r != rank && row.get(c) {
                        row.xor_assign(&pivot);
                    }
                }
                rank += 1;
            }
        }
        rank
    }
}

/// Reduces a full-row-rank `h` of size `(n-k) x n` to `[P | I]`.
///
/// Pivot columns are searched from the right, so when the last `n-k`
/// columns are independent the returned permutation is the identity. The
/// permutation satisfies: column `j` of the systematic matrix is column
/// `col_perm[j]` of `h` (after row operations).
pub fn to_systematic(h: &BinMatrix) -> Result<(BinMatrix, Vec<usize>)> {
    let r = h.rows();
    let n = h.cols();
    if r >= n {
        return Err(Error::InvalidInput(format!(
            "parity-check matrix has {r} rows and {n} columns; need rows < columns"
        )));
    }
    let mut rows: Vec<BitVec> = (0..r).map(|i| h.row(i).clone()).collect();
    let mut pivoted = vec![false; r];
    // (pivot column, row holding it)
    let mut pivots: Vec<(usize, usize)> = Vec::with_capacity(r);
    for c in (0..n).rev() {
        if pivots.len() == r {
            break;
        }
        let Some(p) = (0..r).find(|&i| !pivoted[i] && rows[i].get(c)) else {
            continue;
        };
        pivoted[p] = true;
        let pivot = rows[p].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != p && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push((c, p));
    }
    if pivots.len() < r {
        return Err(Error::RankDeficient {
            rank: pivots.len(),
            needed: r,
        });
    }
    pivots.sort_unstable();
    let mut is_pivot = vec![false; n];
    for &(c, _) in &pivots {
        is_pivot[c] = true;
    }
    let mut col_perm: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    col_perm.extend(pivots.iter().map(|&(c, _)| c));

    let k = n - r;
    let mut p_sub = BinMatrix::zeros(r, k);
    for (out_row, &(_, src_row)) in pivots.iter().enumerate() {
        for (j, &c) in col_perm[..k].iter().enumerate() {
            if rows[src_row].get(c) {
                p_sub.set(out_row, j, true);
            }
        }
    }
    Ok((p_sub, col_perm))
}

/// An `[n, k]` binary linear code with its systematic representation.
#[derive(Clone, Debug)]
pub struct LinearCode {
    n: usize,
    k: usize,
    h_original: BinMatrix,
    p_sub: BinMatrix,
    col_perm: Vec<usize>,
    // Cached columns (length n-k) for syndrome and re-encoding loops.
    h_cols: Vec<BitVec>,
    p_cols: Vec<BitVec>,
}

impl LinearCode {
    /// Builds a code from a full-row-rank parity-check matrix.
    pub fn from_parity_check(h: BinMatrix) -> Result<Self> {
        let (p_sub, col_perm) = to_systematic(&h)?;
        let n = h.cols();
        let k = n - h.rows();
        Ok(Self {
            n,
            k,
            h_cols: h.columns(),
            p_cols: p_sub.columns(),
            h_original: h,
            p_sub,
            col_perm,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn h_original(&self) -> &BinMatrix {
        &self.h_original
    }

    pub fn p_sub(&self) -> &BinMatrix {
        &self.p_sub
    }

    /// Systematic coordinate `j` corresponds to original position `col_perm()[j]`.
    pub fn col_perm(&self) -> &[usize] {
        &self.col_perm
    }

    /// Columns of the original parity-check matrix.
    pub(crate) fn h_columns(&self) -> &[BitVec] {
        &self.h_cols
    }

    /// Columns of `P`, indexed by information position.
    pub(crate) fn p_columns(&self) -> &[BitVec] {
        &self.p_cols
    }

    /// Systematic parity-check matrix `[P | I]`.
    pub fn h_systematic(&self) -> BinMatrix {
        self.p_sub.hcat(&BinMatrix::identity(self.redundancy()))
    }

    /// Generator `[I | P^T]` in permuted coordinates.
    pub fn generator_systematic(&self) -> BinMatrix {
        BinMatrix::identity(self.k).hcat(&self.p_sub.transpose())
    }

    /// Encodes a message into a codeword in original coordinates.
    pub fn encode(&self, message: &BitVec) -> Result<BitVec> {
        check_len(self.k, message.len())?;
        let parity = reencode_parity(&self.p_sub, message, &BitVec::zeros(self.redundancy()))?;
        Ok(message.concat(&parity).unpermuted(&self.col_perm))
    }

    pub fn is_codeword(&self, word: &BitVec) -> bool {
        word.len() == self.n && self.h_original.mul_vec(word).is_zero()
    }

    /// Maps a vector from original to systematic coordinates.
    pub fn to_permuted(&self, v: &BitVec) -> BitVec {
        v.permuted(&self.col_perm)
    }

    pub fn to_permuted_f64(&self, v: &[f64]) -> Vec<f64> {
        self.col_perm.iter().map(|&i| v[i]).collect()
    }

    pub fn from_permuted(&self, v: &BitVec) -> BitVec {
        v.unpermuted(&self.col_perm)
    }

    /// Dense-text serialization: `n k` header then one `0`/`1` row per line.
    pub fn to_dense_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.k);
        for r in 0..self.h_original.rows() {
            let _ = writeln!(s, "{}", self.h_original.row(r));
        }
        s
    }

    /// Alist serialization of the original parity-check matrix.
    pub fn to_alist(&self) -> String {
        let h = &self.h_original;
        let m = h.rows();
        let col_sets: Vec<Vec<usize>> = (0..self.n).map(|c| h.column(c).support()).collect();
        let row_sets: Vec<Vec<usize>> = (0..m).map(|r| h.row(r).support()).collect();
        let max_col = col_sets.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = row_sets.iter().map(Vec::len).max().unwrap_or(0);
        let join = |v: Vec<String>| v.join(" ");
        let padded = |set: &Vec<usize>, width: usize| {
            let mut v: Vec<String> = set.iter().map(|i| (i + 1).to_string()).collect();
            v.resize(width, "0".to_string());
            join(v)
        };
        let mut s = format!("{} {}\n{} {}\n", self.n, m, max_col, max_row);
        let _ = writeln!(s, "{}", join(col_sets.iter().map(|c| c.len().to_string()).collect()));
        let _ = writeln!(s, "{}", join(row_sets.iter().map(|r| r.len().to_string()).collect()));
        for c in &col_sets {
            let _ = writeln!(s, "{}", padded(c, max_col));
        }
        for r in &row_sets {
            let _ = writeln!(s, "{}", padded(r, max_row));
        }
        s
    }
}

#[inline]
fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

/// Syndrome of `z`.
///
/// With `systematic == false` this is `z H^T` for the original matrix and `z`
/// in original coordinates. With `systematic == true`, `z` is taken in
/// permuted coordinates and multiplied by `[P | I]^T`.
pub fn syndrome(code: &LinearCode, z: &BitVec, systematic: bool) -> Result<BitVec> {
    check_len(code.n, z.len())?;
    let mut s = BitVec::zeros(code.redundancy());
    if systematic {
        for i in z.ones() {
            if i < code.k {
                s.xor_assign(&code.p_cols[i]);
            } else {
                s.flip(i - code.k);
            }
        }
    } else {
        for i in z.ones() {
            s.xor_assign(&code.h_cols[i]);
        }
    }
    Ok(s)
}

/// Parity completion `s + e_info P^T` of an information-part pattern.
pub fn reencode_parity(p_sub: &BinMatrix, e_info: &BitVec, s: &BitVec) -> Result<BitVec> {
    check_len(p_sub.cols(), e_info.len())?;
    check_len(p_sub.rows(), s.len())?;
    let mut out = s.clone();
    for i in e_info.ones() {
        out.xor_assign(&p_sub.column(i));
    }
    Ok(out)
}

/// Random systematic code `H = [P | I]` with `P` uniform over
/// `(n-k) x k` bit matrices, seeded deterministically.
pub fn random_linear_code(n: usize, k: usize, seed: u64) -> Result<LinearCode> {
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!(
            "need 1 <= k < n, got n={n}, k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = n - k;
    let mut p = BinMatrix::zeros(r, k);
    for i in 0..r {
        for j in 0..k {
            p.set(i, j, rng.random::<bool>());
        }
    }
    LinearCode::from_parity_check(p.hcat(&BinMatrix::identity(r)))
}

/// The `[7, 4]` Hamming code in systematic form.
pub fn hamming_7_4() -> LinearCode {
    let h = BinMatrix::from_strs(&["1101100", "1011010", "0111001"]).expect("static matrix");
    LinearCode::from_parity_check(h).expect("full rank")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeFormat {
    DenseText,
    Alist,
}

impl CodeFormat {
    /// Guesses the format from the file extension (`.alist` or anything else).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("alist") => CodeFormat::Alist,
            _ => CodeFormat::DenseText,
        }
    }
}

pub fn load_code(path: &Path, format: CodeFormat) -> Result<LinearCode> {
    let text = fs::read_to_string(path)?;
    parse_code(&text, format, path)
}

/// Parses code text; `path` is only used in error messages.
pub fn parse_code(text: &str, format: CodeFormat, path: &Path) -> Result<LinearCode> {
    let h = match format {
        CodeFormat::DenseText => parse_dense(text, path)?,
        CodeFormat::Alist => parse_alist(text, path)?,
    };
    LinearCode::from_parity_check(h)
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn dim_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Dimensions {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

fn parse_dense(text: &str, path: &Path) -> Result<BinMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing `n k` header"))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(path, hline, format!("bad header: {e}")))?;
    let [n, k] = nums[..] else {
        return Err(parse_err(path, hline, "header must be `n k`"));
    };
    if k == 0 || k >= n {
        return Err(dim_err(path, format!("need 1 <= k < n, got n={n}, k={k}")));
    }
    let mut rows = Vec::with_capacity(n - k);
    for (lineno, line) in lines {
        if line.len() != n {
            return Err(parse_err(
                path,
                lineno,
                format!("row has {} entries, expected {n}", line.len()),
            ));
        }
        let row = BitVec::from_str01(line)
            .ok_or_else(|| parse_err(path, lineno, "row must contain only 0 and 1"))?;
        rows.push(row);
    }
    if rows.len() != n - k {
        return Err(dim_err(
            path,
            format!("expected {} rows for n={n}, k={k}, found {}", n - k, rows.len()),
        ));
    }
    BinMatrix::from_rows(rows)
}

fn parse_alist(text: &str, path: &Path) -> Result<BinMatrix> {
    let lines: Vec<(usize, Vec<usize>)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split_whitespace()
                .map(str::parse::<usize>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(|v| (i + 1, v))
                .map_err(|e| parse_err(path, i + 1, format!("expected integers: {e}")))
        })
        .collect::<Result<_>>()?;
    let field = |idx: usize, what: &str| {
        lines
            .get(idx)
            .ok_or_else(|| parse_err(path, idx + 1, format!("missing {what}")))
    };
    let (l0, head) = field(0, "`n m` header")?;
    let [n, m] = head[..] else {
        return Err(parse_err(path, *l0, "header must be `n m`"));
    };
    if n == 0 || m == 0 || m >= n {
        return Err(dim_err(path, format!("need 1 <= m < n, got n={n}, m={m}")));
    }
    let (l1, maxes) = field(1, "maximum weights line")?;
    if maxes.len() != 2 {
        return Err(parse_err(path, *l1, "expected two maximum weights"));
    }
    let (l2, col_w) = field(2, "column weights")?;
    if col_w.len() != n {
        return Err(parse_err(path, *l2, format!("expected {n} column weights")));
    }
    let (l3, row_w) = field(3, "row weights")?;
    if row_w.len() != m {
        return Err(parse_err(path, *l3, format!("expected {m} row weights")));
    }
    if lines.len() < 4 + n {
        return Err(dim_err(path, format!("expected {n} column lists")));
    }
    let mut h = BinMatrix::zeros(m, n);
    for c in 0..n {
        let (ln, entries) = &lines[4 + c];
        let nz: Vec<usize> = entries.iter().copied().filter(|&v| v != 0).collect();
        if nz.len() != col_w[c] {
            return Err(parse_err(
                path,
                *ln,
                format!("column {} lists {} entries, weight says {}", c + 1, nz.len(), col_w[c]),
            ));
        }
        for r in nz {
            if r > m {
                return Err(parse_err(path, *ln, format!("row index {r} exceeds m={m}")));
            }
            h.set(r - 1, c, true);
        }
    }
    // Row lists are optional in some files; when present they must agree.
    if lines.len() >= 4 + n + m {
        for r in 0..m {
            let (ln, entries) = &lines[4 + n + r];
            let listed: Vec<usize> = entries.iter().copied().filter(|&v| v != 0).collect();
            let expected: Vec<usize> = h.row(r).ones().map(|c| c + 1).collect();
            let mut sorted = listed.clone();
            sorted.sort_unstable();
            if sorted != expected || listed.len() != row_w[r] {
                return Err(parse_err(
                    path,
                    *ln,
                    format!("row {} list disagrees with column lists", r + 1),
                ));
            }
        }
    }
    Ok(h)
}

/// Soft weight of a pattern: the sum of `|lambda_i|` over its support,
/// accumulated in ascending position order.
pub fn soft_weight(pattern: &BitVec, lambda: &[f64]) -> f64 {
    pattern.ones().map(|i| lambda[i].abs()).sum()
}

/// Lexicographic order on bit strings, bit 0 first, `0 < 1`.
pub fn lex_cmp(a: &BitVec, b: &BitVec) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    match a.xor(b).ones().next() {
        None => Ordering::Equal,
        Some(i) if a.get(i) => Ordering::Greater,
        Some(_) => Ordering::Less,
    }
}

/// Exhaustive ML decoding over all `2^k` codewords.
///
/// Returns the codeword minimizing the soft weight of `z + v`, ties broken
/// by the lexicographically smallest codeword, and that weight.
pub fn brute_force_mld(code: &LinearCode, lambda: &[f64]) -> Result<(BitVec, f64)> {
    check_len(code.n, lambda.len())?;
    if code.k > MLD_MAX_K {
        return Err(Error::Capacity {
            k: code.k,
            limit: MLD_MAX_K,
        });
    }
    let z = BitVec::from_bools(&lambda.iter().map(|&l| l < 0.0).collect::<Vec<_>>());
    let basis: Vec<BitVec> = (0..code.k)
        .map(|i| code.encode(&BitVec::from_support(code.k, &[i])).expect("k bits"))
        .collect();
    let mut cw = BitVec::zeros(code.n);
    let mut best = cw.clone();
    let mut best_w = soft_weight(&z, lambda);
    // Gray-code walk over all messages.
    for step in 1u64..(1u64 << code.k) {
        let bit = step.trailing_zeros() as usize;
        cw.xor_assign(&basis[bit]);
        let w = soft_weight(&cw.xor(&z), lambda);
        if w < best_w || (w == best_w && lex_cmp(&cw, &best) == Ordering::Less) {
            best_w = w;
            best = cw.clone();
        }
    }
    Ok((best, best_w))
}
