use std::fmt;

use super::GraphError;

/// Dense row-major binary matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: vec![false; rows * cols],
        }
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<bool>) -> Result<Self, GraphError> {
        if cells.len() != rows * cols {
            return Err(GraphError::InvalidParameter(format!(
                "{} cells do not fill a {rows}x{cols} matrix",
                cells.len()
            )));
        }
        Ok(Self { rows, cols, cells })
    }

    /// Parses a row-major string over `{0, 1}`, e.g. `"0110"` for a 2x2 block.
    pub fn from_bit_string(rows: usize, cols: usize, bits: &str) -> Result<Self, GraphError> {
        let cells = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(GraphError::InvalidParameter(format!(
                    "unexpected character {other:?} in bit pattern"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_cells(rows, cols, cells)
    }

    /// Builds a matrix from equal-length rows over `{0, 1}`.
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, GraphError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(GraphError::InvalidParameter("ragged rows".into()));
        }
        let joined: String = rows.iter().map(|r| r.as_ref()).collect();
        Self::from_bit_string(rows.len(), cols, &joined)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.cells[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.cells[r * self.cols + c] = value;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn count_ones(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Copies the `height x width` window whose top-left corner is `(r0, c0)`.
    pub fn sub_block(&self, r0: usize, c0: usize, height: usize, width: usize) -> BitMatrix {
        let mut cells = Vec::with_capacity(height * width);
        for r in r0..r0 + height {
            cells.extend_from_slice(&self.cells[r * self.cols + c0..r * self.cols + c0 + width]);
        }
        BitMatrix {
            rows: height,
            cols: width,
            cells,
        }
    }

    /// Stacks `other` below `self`; column counts must agree.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix, GraphError> {
        if self.cols != other.cols {
            return Err(GraphError::InvalidParameter(format!(
                "cannot stack {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let mut cells = self.cells.clone();
        cells.extend_from_slice(&other.cells);
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            cells,
        })
    }

    pub fn to_bit_string(&self) -> String {
        self.cells
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn to_rows(&self) -> Vec<String> {
        self.cells
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Dense row-major signed-integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.cells[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: i64) {
        self.cells[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.cells[r * self.cols..(r + 1) * self.cols]
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }
}
