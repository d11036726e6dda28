//! Sparse Z/2 matrices with row and column permutations.
//!
//! Entry `(i, j)` of the logical matrix lives at physical `(row_of[i], col_of[j])`.
//! Swapping two rows or columns only touches the permutations. The lowest
//! non-zero entry of every column is memoized as a physical row, together with
//! the reverse map from a physical row to the columns whose low it is.

use std::fmt::Write;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct PermutedMatrix {
    /// Physical columns; each a strictly ascending list of physical rows.
    cols: Vec<Vec<u32>>,
    row_of: Vec<u32>,
    row_pos: Vec<u32>,
    col_of: Vec<u32>,
    col_pos: Vec<u32>,
    /// Physical column -> physical row of its logical low, or `NONE`.
    low: Vec<u32>,
    /// Physical row -> physical columns whose low is that row.
    by_low: Vec<Vec<u32>>,
    scratch: Vec<u32>,
}

impl PermutedMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_columns(rows, vec![Vec::new(); cols])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_columns(n, (0..n as u32).map(|i| vec![i]).collect())
    }

    /// Identity permutations; `columns[j]` lists the rows of column `j`.
    pub fn from_columns(rows: usize, mut columns: Vec<Vec<u32>>) -> Self {
        for c in &mut columns {
            c.sort_unstable();
            c.dedup();
            debug_assert!(c.last().is_none_or(|&r| (r as usize) < rows));
        }
        let ncols = columns.len();
        let mut m = PermutedMatrix {
            cols: columns,
            row_of: (0..rows as u32).collect(),
            row_pos: (0..rows as u32).collect(),
            col_of: (0..ncols as u32).collect(),
            col_pos: (0..ncols as u32).collect(),
            low: vec![NONE; ncols],
            by_low: vec![Vec::new(); rows],
            scratch: Vec::new(),
        };
        for pc in 0..ncols {
            m.relow(pc);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.row_of.len()
    }

    pub fn cols(&self) -> usize {
        self.col_of.len()
    }

    /// Replace both permutations. `rows[i]` is the physical row shown at
    /// logical row `i`; likewise for columns.
    pub fn set_permutations(&mut self, rows: &[u32], cols: &[u32]) {
        assert_eq!(rows.len(), self.rows());
        assert_eq!(cols.len(), self.cols());
        self.row_of.copy_from_slice(rows);
        self.col_of.copy_from_slice(cols);
        for (l, &p) in rows.iter().enumerate() {
            self.row_pos[p as usize] = l as u32;
        }
        for (l, &p) in cols.iter().enumerate() {
            self.col_pos[p as usize] = l as u32;
        }
        for b in &mut self.by_low {
            b.clear();
        }
        for pc in 0..self.cols.len() {
            self.low[pc] = NONE;
            self.relow(pc);
        }
    }

    /// Memoized low of logical column `j`, as a logical row.
    #[inline]
    pub fn low(&self, j: usize) -> Option<usize> {
        let p = self.low[self.col_of[j] as usize];
        (p != NONE).then(|| self.row_pos[p as usize] as usize)
    }

    /// Low of logical column `j` recomputed by a linear scan.
    pub fn scan_low(&self, j: usize) -> Option<usize> {
        self.cols[self.col_of[j] as usize]
            .iter()
            .map(|&r| self.row_pos[r as usize] as usize)
            .max()
    }

    pub fn is_column_empty(&self, j: usize) -> bool {
        self.cols[self.col_of[j] as usize].is_empty()
    }

    /// Some logical column whose low is logical row `i`, other than `except`.
    pub fn column_with_low(&self, i: usize, except: Option<usize>) -> Option<usize> {
        let skip = except.map(|j| self.col_of[j]);
        self.by_low[self.row_of[i] as usize]
            .iter()
            .find(|&&pc| Some(pc) != skip)
            .map(|&pc| self.col_pos[pc as usize] as usize)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cols[self.col_of[j] as usize]
            .binary_search(&self.row_of[i])
            .is_ok()
    }

    /// Logical rows of logical column `j`, ascending.
    pub fn column(&self, j: usize) -> Vec<usize> {
        let mut rows: Vec<usize> = self.cols[self.col_of[j] as usize]
            .iter()
            .map(|&r| self.row_pos[r as usize] as usize)
            .collect();
        rows.sort_unstable();
        rows
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Column `dst` becomes the sum of columns `src` and `dst`.
    pub fn add_column(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst, "adding a column to itself");
        let ps = self.col_of[src] as usize;
        let pd = self.col_of[dst] as usize;
        let mut out = std::mem::take(&mut self.scratch);
        out.clear();
        {
            let (a, b) = (&self.cols[ps], &self.cols[pd]);
            let (mut x, mut y) = (0, 0);
            while x < a.len() && y < b.len() {
                match a[x].cmp(&b[y]) {
                    std::cmp::Ordering::Less => {
                        out.push(a[x]);
                        x += 1;
                    }
                    std::cmp::Ordering::Greater => {
                        out.push(b[y]);
                        y += 1;
                    }
                    std::cmp::Ordering::Equal => {
                        x += 1;
                        y += 1;
                    }
                }
            }
            out.extend_from_slice(&a[x..]);
            out.extend_from_slice(&b[y..]);
        }
        self.scratch = std::mem::replace(&mut self.cols[pd], out);
        self.relow(pd);
    }

    /// Exchange logical rows `i` and `i + 1`.
    pub fn swap_rows(&mut self, i: usize) {
        let pa = self.row_of[i];
        let pb = self.row_of[i + 1];
        self.row_of.swap(i, i + 1);
        self.row_pos[pa as usize] = (i + 1) as u32;
        self.row_pos[pb as usize] = i as u32;
        // A column whose low was row i still has it (now at i + 1). A column
        // whose low was row i + 1 now has row i as its low iff it contains it.
        let mut k = 0;
        while k < self.by_low[pb as usize].len() {
            let pc = self.by_low[pb as usize][k];
            if self.cols[pc as usize].binary_search(&pa).is_ok() {
                self.by_low[pb as usize].swap_remove(k);
                self.by_low[pa as usize].push(pc);
                self.low[pc as usize] = pa;
            } else {
                k += 1;
            }
        }
    }

    /// Exchange logical columns `j` and `j + 1`.
    pub fn swap_cols(&mut self, j: usize) {
        let pa = self.col_of[j];
        let pb = self.col_of[j + 1];
        self.col_of.swap(j, j + 1);
        self.col_pos[pa as usize] = (j + 1) as u32;
        self.col_pos[pb as usize] = j as u32;
    }

    fn relow(&mut self, pc: usize) {
        let old = self.low[pc];
        let new = self.cols[pc]
            .iter()
            .copied()
            .max_by_key(|&r| self.row_pos[r as usize])
            .unwrap_or(NONE);
        if old == new {
            return;
        }
        if old != NONE {
            let list = &mut self.by_low[old as usize];
            let k = list.iter().position(|&c| c as usize == pc).expect("low index");
            list.swap_remove(k);
        }
        if new != NONE {
            self.by_low[new as usize].push(pc as u32);
        }
        self.low[pc] = new;
    }

    /// Check every memoized low against a scan. Returns the first mismatch.
    pub fn check_lows(&self) -> Result<(), String> {
        for j in 0..self.cols() {
            if self.low(j) != self.scan_low(j) {
                return Err(format!(
                    "column {j}: memoized low {:?}, scanned {:?}",
                    self.low(j),
                    self.scan_low(j)
                ));
            }
        }
        for (pr, list) in self.by_low.iter().enumerate() {
            for &pc in list {
                if self.low[pc as usize] != pr as u32 {
                    return Err(format!("stale reverse low entry for physical column {pc}"));
                }
            }
        }
        Ok(())
    }

    /// Whether the lows of non-empty columns are pairwise distinct.
    pub fn is_reduced(&self) -> bool {
        self.by_low.iter().all(|l| l.len() <= 1)
    }

    /// One line per logical column: `j: low=<r|-> rows=<ascending logical rows>`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for j in 0..self.cols() {
            let low = self.low(j).map_or("-".to_string(), |r| r.to_string());
            let rows: Vec<String> = self.column(j).iter().map(|r| r.to_string()).collect();
            let _ = writeln!(s, "{j}: low={low} rows={}", rows.join(","));
        }
        s
    }

    /// Logical dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<bool>> {
        let mut d = vec![vec![false; self.cols()]; self.rows()];
        for j in 0..self.cols() {
            for i in self.column(j) {
                d[i][j] = true;
            }
        }
        d
    }
}
