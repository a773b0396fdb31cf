//! Reading generators: uniform random values and terrain-correlated values
//! sampled from an elevation grid.
//!
//! Grid files are plain text: a `width height` line followed by `height`
//! rows of `width` integers. Elevations are linearly rescaled to `[1, sigma]`
//! at load time.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;
use crate::netsim::Topology;

/// `n` i.i.d. uniform readings in `[1, max_value]`, deterministic under
/// `seed`.
pub fn uniform_readings(n: usize, max_value: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(1..=max_value)).collect()
}

/// Row-major elevation raster, already rescaled to the sensor value domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElevationGrid {
    width: usize,
    height: usize,
    cells: Vec<u64>,
    raw_min: i64,
    raw_max: i64,
}

/// Read a grid file and rescale its elevations to `[1, sigma]`.
pub fn load_grid(path: &Path, sigma: u64) -> Result<ElevationGrid, SimError> {
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ElevationGrid::parse(&text, sigma)
}

impl ElevationGrid {
    /// Parse the text format; errors carry 1-based line numbers.
    pub fn parse(text: &str, sigma: u64) -> Result<ElevationGrid, SimError> {
        let mut lines = text.lines().enumerate();
        let (header_line, header) = lines.next().ok_or_else(|| SimError::GridParse {
            line: 1,
            message: "empty file".into(),
        })?;
        let mut dims = header.split_whitespace();
        let width: usize = parse_field(dims.next(), header_line + 1, "width")?;
        let height: usize = parse_field(dims.next(), header_line + 1, "height")?;
        if width == 0 || height == 0 {
            return Err(SimError::GridParse {
                line: header_line + 1,
                message: "grid dimensions must be positive".into(),
            });
        }
        if dims.next().is_some() {
            return Err(SimError::GridParse {
                line: header_line + 1,
                message: "header must be exactly `width height`".into(),
            });
        }

        let mut raw = Vec::with_capacity(width * height);
        let mut rows = 0usize;
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = 0usize;
            for token in line.split_whitespace() {
                let value: i64 = token.parse().map_err(|_| SimError::GridParse {
                    line: idx + 1,
                    message: format!("invalid elevation `{token}`"),
                })?;
                raw.push(value);
                cols += 1;
            }
            if cols != width {
                return Err(SimError::GridParse {
                    line: idx + 1,
                    message: format!("expected {width} columns, found {cols}"),
                });
            }
            rows += 1;
        }
        if rows != height {
            return Err(SimError::GridParse {
                line: text.lines().count().max(1),
                message: format!("expected {height} rows, found {rows}"),
            });
        }

        let raw_min = *raw.iter().min().expect("grid is non-empty");
        let raw_max = *raw.iter().max().expect("grid is non-empty");
        let span = (raw_max - raw_min) as f64;
        let cells = raw
            .iter()
            .map(|&v| {
                if raw_max == raw_min {
                    1
                } else {
                    let scaled = (v - raw_min) as f64 * (sigma - 1) as f64 / span;
                    1 + scaled.round() as u64
                }
            })
            .collect();

        Ok(ElevationGrid {
            width,
            height,
            cells,
            raw_min,
            raw_max,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Scaled elevation of the cell at `(col, row)`.
    pub fn cell(&self, col: usize, row: usize) -> u64 {
        self.cells[row * self.width + col]
    }

    /// Raw elevation bounds before rescaling.
    pub fn raw_bounds(&self) -> (i64, i64) {
        (self.raw_min, self.raw_max)
    }
}

/// Assign each sensor the elevation of the grid cell containing it; the
/// terrain is stretched to cover the deployment square and positions map to
/// cells by truncation.
pub fn terrain_readings(grid: &ElevationGrid, topology: &Topology) -> Vec<u64> {
    let side = topology.side();
    topology
        .positions()
        .iter()
        .map(|&(x, y)| {
            let col = ((x / side * grid.width() as f64) as usize).min(grid.width() - 1);
            let row = ((y / side * grid.height() as f64) as usize).min(grid.height() - 1);
            grid.cell(col, row)
        })
        .collect()
}

fn parse_field(token: Option<&str>, line: usize, name: &str) -> Result<usize, SimError> {
    token
        .ok_or_else(|| SimError::GridParse {
            line,
            message: format!("missing {name}"),
        })?
        .parse()
        .map_err(|_| SimError::GridParse {
            line,
            message: format!("invalid {name}"),
        })
}
