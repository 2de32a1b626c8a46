//! Spy plots: one mark per nonzero, binned when the matrix is larger than
//! the requested pixel size.

use std::io::{self, Write};

/// Occupancy grid of a sparsity pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub nrows: usize,
    pub ncols: usize,
    pub nnz: usize,
    pub width: usize,
    pub height: usize,
    /// Row-major counts of nonzeros per cell.
    pub cells: Vec<u32>,
}

impl Raster {
    /// Bins `positions` of an `nrows × ncols` matrix into at most
    /// `max_px × max_px` cells, keeping one cell per entry when it fits.
    pub fn new(nrows: usize, ncols: usize, positions: impl IntoIterator<Item = (usize, usize)>, max_px: usize) -> Self {
        let max_px = max_px.max(1);
        let scale = nrows.max(ncols).div_ceil(max_px).max(1);
        let width = ncols.div_ceil(scale).max(1);
        let height = nrows.div_ceil(scale).max(1);
        let mut cells = vec![0u32; width * height];
        let mut nnz = 0;
        for (i, j) in positions {
            cells[(i / scale) * width + j / scale] += 1;
            nnz += 1;
        }
        Self { nrows, ncols, nnz, width, height, cells }
    }

    pub fn occupied(&self, y: usize, x: usize) -> bool {
        self.cells[y * self.width + x] > 0
    }
}

const MARGIN: usize = 40;

/// SVG with one black run per horizontal stretch of occupied cells and
/// the dimensions and nonzero count as labels.
pub fn write_svg(r: &Raster, title: &str, out: &mut impl Write) -> io::Result<()> {
    let (w, h) = (r.width + 2 * MARGIN, r.height + 2 * MARGIN);
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#)?;
    writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#)?;
    writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="gray" stroke-width="0.5"/>"#,
        r.width, r.height
    )?;
    writeln!(out, r#"<g fill="black" shape-rendering="crispEdges">"#)?;
    for y in 0..r.height {
        let mut x = 0;
        while x < r.width {
            if !r.occupied(y, x) {
                x += 1;
                continue;
            }
            let start = x;
            while x < r.width && r.occupied(y, x) {
                x += 1;
            }
            writeln!(out, r#"<rect x="{}" y="{}" width="{}" height="1"/>"#, MARGIN + start, MARGIN + y, x - start)?;
        }
    }
    writeln!(out, "</g>")?;
    let font = r#"font-family="monospace" font-size="12""#;
    writeln!(out, r#"<text x="{MARGIN}" y="{}" {font}>{}</text>"#, MARGIN - 12, escape(title))?;
    writeln!(out, r#"<text x="{MARGIN}" y="{}" {font}>{} x {}, nz = {}</text>"#, h - 12, r.nrows, r.ncols, r.nnz)?;
    writeln!(out, "</svg>")
}

/// Plain (ASCII) PGM: occupied cells black, empty cells white.
pub fn write_pgm(r: &Raster, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "P2")?;
    writeln!(out, "# {} x {}, nz = {}", r.nrows, r.ncols, r.nnz)?;
    writeln!(out, "{} {}", r.width, r.height)?;
    writeln!(out, "255")?;
    for y in 0..r.height {
        let row: Vec<&str> = (0..r.width).map(|x| if r.occupied(y, x) { "0" } else { "255" }).collect();
        // PGM lines should stay under 70 characters.
        for chunk in row.chunks(16) {
            writeln!(out, "{}", chunk.join(" "))?;
        }
    }
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
