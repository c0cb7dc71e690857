//! Finite groups given by multiplication tables.
//!
//! Table file format (UTF-8 text): line 1 holds the order `n`; each of the
//! following `n` lines holds `n` whitespace-separated 0-based indices, entry
//! `(r, c)` being the product of element `r` by element `c`. Element 0 must be
//! the identity. Trailing blank lines are ignored.

use thiserror::Error;

/// Errors from parsing or validating a group table.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("closure violated: entry ({row},{col}) = {value} is not an element index < {order}")]
    NotClosed { row: usize, col: usize, value: usize, order: usize },
    #[error("identity axiom violated: 0*{col} = {got}, expected {col}")]
    IdentityRow { col: usize, got: usize },
    #[error("identity axiom violated: {row}*0 = {got}, expected {row}")]
    IdentityColumn { row: usize, got: usize },
    #[error("cancellation violated: row {row} is not a permutation (value {value} repeats)")]
    RowNotPermutation { row: usize, value: usize },
    #[error("cancellation violated: column {col} is not a permutation (value {value} repeats)")]
    ColumnNotPermutation { col: usize, value: usize },
    #[error("associativity violated at witness triple ({a},{b},{c}): ({a}{b}){c} != {a}({b}{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
}

/// A finite group of order `n` with elements `0..n`, element 0 the identity.
///
/// Construction always validates the full set of group axioms, so a value of
/// this type is a genuine group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    n: usize,
    table: Vec<usize>,
    inv: Vec<usize>,
}

impl FiniteGroup {
    /// Validates `entries` (row-major, `n * n`) as a group table.
    pub fn from_table(n: usize, entries: Vec<usize>) -> Result<FiniteGroup, GroupError> {
        assert_eq!(entries.len(), n * n, "table must have n*n entries");
        // closure
        for r in 0..n {
            for c in 0..n {
                let v = entries[r * n + c];
                if v >= n {
                    return Err(GroupError::NotClosed { row: r, col: c, value: v, order: n });
                }
            }
        }
        // Latin square
        for r in 0..n {
            let mut seen = vec![false; n];
            for c in 0..n {
                let v = entries[r * n + c];
                if seen[v] {
                    return Err(GroupError::RowNotPermutation { row: r, value: v });
                }
                seen[v] = true;
            }
        }
        for c in 0..n {
            let mut seen = vec![false; n];
            for r in 0..n {
                let v = entries[r * n + c];
                if seen[v] {
                    return Err(GroupError::ColumnNotPermutation { col: c, value: v });
                }
                seen[v] = true;
            }
        }
        // element 0 acts as identity
        for (c, &got) in entries[..n].iter().enumerate() {
            if got != c {
                return Err(GroupError::IdentityRow { col: c, got });
            }
        }
        for r in 0..n {
            let got = entries[r * n];
            if got != r {
                return Err(GroupError::IdentityColumn { row: r, got });
            }
        }
        // associativity, brute force over all triples
        for a in 0..n {
            for b in 0..n {
                let ab = entries[a * n + b];
                for c in 0..n {
                    let bc = entries[b * n + c];
                    if entries[ab * n + c] != entries[a * n + bc] {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        // two-sided inverses
        let mut inv = vec![usize::MAX; n];
        for g in 0..n {
            match (0..n).find(|&h| entries[g * n + h] == 0 && entries[h * n + g] == 0) {
                Some(h) => inv[g] = h,
                None => return Err(GroupError::NoInverse { element: g }),
            }
        }
        Ok(FiniteGroup { n, table: entries, inv })
    }

    /// Parses and validates the table file format.
    pub fn parse(text: &str) -> Result<FiniteGroup, GroupError> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines
            .next()
            .ok_or_else(|| GroupError::Parse { line: 1, message: "empty file".into() })?;
        let n: usize = first.trim().parse().map_err(|_| GroupError::Parse {
            line: 1,
            message: format!("expected group order, got {first:?}"),
        })?;
        if n == 0 {
            return Err(GroupError::Parse { line: 1, message: "group order must be >= 1".into() });
        }
        let mut entries = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if rows == n {
                return Err(GroupError::Parse {
                    line: lineno,
                    message: format!("unexpected extra row, table has {n} rows"),
                });
            }
            let row: Result<Vec<usize>, _> =
                line.split_whitespace().map(|tok| tok.parse::<usize>()).collect();
            let row = row.map_err(|_| GroupError::Parse {
                line: lineno,
                message: format!("row contains a non-integer token: {line:?}"),
            })?;
            if row.len() != n {
                return Err(GroupError::Parse {
                    line: lineno,
                    message: format!("expected {n} entries, got {}", row.len()),
                });
            }
            entries.extend(row);
            rows += 1;
        }
        if rows != n {
            return Err(GroupError::Parse {
                line: rows + 1,
                message: format!("expected {n} table rows, got {rows}"),
            });
        }
        FiniteGroup::from_table(n, entries)
    }

    /// Renders the table file format (round-trips through [`FiniteGroup::parse`]).
    pub fn to_table_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for r in 0..self.n {
            let row: Vec<String> =
                (0..self.n).map(|c| self.table[r * self.n + c].to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// The trivial group.
    pub fn trivial() -> FiniteGroup {
        FiniteGroup::from_table(1, vec![0]).expect("trivial table is a group")
    }

    /// The cyclic group Z_n.
    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n >= 1);
        let entries = (0..n).flat_map(|r| (0..n).map(move |c| (r + c) % n)).collect();
        FiniteGroup::from_table(n, entries).expect("cyclic table is a group")
    }

    /// The quaternion group Q8 = {1, -1, i, -i, j, -j, k, -k}.
    ///
    /// Element `2a + s` encodes sign `s` on basis axis `a` in (1, i, j, k).
    pub fn quaternion8() -> FiniteGroup {
        // basis products in (1, i, j, k): (axis, sign) of e_a * e_b
        const AXIS: [[usize; 4]; 4] =
            [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
        const SIGN: [[bool; 4]; 4] = [
            [false, false, false, false],
            [false, true, false, true],
            [false, true, true, false],
            [false, false, true, true],
        ];
        let mut entries = vec![0; 64];
        for g in 0..8 {
            for h in 0..8 {
                let (ga, gs) = (g / 2, g % 2 == 1);
                let (ha, hs) = (h / 2, h % 2 == 1);
                let axis = AXIS[ga][ha];
                let sign = SIGN[ga][ha] ^ gs ^ hs;
                entries[g * 8 + h] = 2 * axis + usize::from(sign);
            }
        }
        FiniteGroup::from_table(8, entries).expect("Q8 table is a group")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inv[g]
    }

    /// Ordered product `g_1 g_2 ... g_k`.
    pub fn product(&self, gs: &[usize]) -> usize {
        gs.iter().fold(0, |acc, &g| self.mul(acc, g))
    }
}

/// Parses and validates a group-table file.
pub fn fg_load(text: &str) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::parse(text)
}
