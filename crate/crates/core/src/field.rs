//! Discrete scalar fields over a cell terrain: attractant and repellent
//! concentrations, explicit diffusion with decay and point emission, and
//! gradient sampling at continuous positions.
//!
//! Cell `(x, y)` covers the square `[x, x + 1) × [y, y + 1)` in cell units and
//! its value is taken to sit at the cell centre `(x + 0.5, y + 0.5)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Point, Vec2};

/// Largest diffusion coefficient for which the explicit 5-point step is stable.
pub const MAX_STABLE_DIFFUSION: f64 = 0.25;

/// Passability and elevation of a rectangular cell grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Terrain {
    width: usize,
    height: usize,
    cell_size: f64,
    elevation: Vec<f64>,
    obstacle: Vec<bool>,
}

impl Terrain {
    /// Flat terrain without obstacles.
    pub fn open(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "terrain must have at least one cell");
        Terrain {
            width,
            height,
            cell_size: 1.0,
            elevation: vec![0.0; width * height],
            obstacle: vec![false; width * height],
        }
    }

    pub fn new(
        width: usize,
        height: usize,
        elevation: Vec<f64>,
        obstacle: Vec<bool>,
        cell_size: f64,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::config("terrain dimensions must be positive"));
        }
        if elevation.len() != width * height || obstacle.len() != width * height {
            return Err(Error::config(format!(
                "terrain grids must hold {width}x{height} cells"
            )));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::config("cell size must be positive"));
        }
        if elevation.iter().any(|e| !e.is_finite()) {
            return Err(Error::config("elevation must be finite everywhere"));
        }
        Ok(Terrain {
            width,
            height,
            cell_size,
            elevation,
            obstacle,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn is_obstacle(&self, x: usize, y: usize) -> bool {
        self.obstacle[self.index(x, y)]
    }

    pub fn is_passable(&self, x: usize, y: usize) -> bool {
        !self.is_obstacle(x, y)
    }

    pub fn elevation(&self, x: usize, y: usize) -> f64 {
        self.elevation[self.index(x, y)]
    }

    pub fn elevation_grid(&self) -> &[f64] {
        &self.elevation
    }

    pub fn obstacle_grid(&self) -> &[bool] {
        &self.obstacle
    }

    pub fn set_obstacle(&mut self, x: usize, y: usize, blocked: bool) {
        let i = self.index(x, y);
        self.obstacle[i] = blocked;
    }

    pub fn set_elevation(&mut self, x: usize, y: usize, z: f64) {
        assert!(z.is_finite());
        let i = self.index(x, y);
        self.elevation[i] = z;
    }

    /// Cell containing a continuous position, if it lies in the domain.
    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        if !p.is_finite() || p.x < 0.0 || p.y < 0.0 {
            return None;
        }
        let (x, y) = (p.x.floor() as usize, p.y.floor() as usize);
        (x < self.width && y < self.height).then_some((x, y))
    }

    pub fn cell_center(x: usize, y: usize) -> Point {
        Point::new(x as f64 + 0.5, y as f64 + 0.5)
    }

    /// Passable 4-neighbours of a cell.
    pub fn neighbors4(&self, x: usize, y: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        const STEPS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        STEPS.iter().filter_map(move |&(dx, dy)| {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            (self.contains(nx, ny) && self.is_passable(nx as usize, ny as usize))
                .then_some((nx as usize, ny as usize))
        })
    }

    /// Parses an obstacle mask: `#` marks an obstacle, `.` (or space) a free cell.
    /// Blank lines and lines starting with `;` are ignored; all rows must have
    /// equal length.
    pub fn from_ascii(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<bool>> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with(';') {
                continue;
            }
            let row = line
                .chars()
                .map(|c| match c {
                    '#' => Ok(true),
                    '.' | ' ' => Ok(false),
                    other => Err(Error::parse(n + 1, format!("unexpected mask character {other:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::parse(n + 1, "ragged obstacle mask"));
                }
            }
            rows.push(row);
        }
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::parse(0, "empty obstacle mask"));
        }
        let (width, height) = (rows[0].len(), rows.len());
        let obstacle = rows.into_iter().flatten().collect();
        Terrain::new(width, height, vec![0.0; width * height], obstacle, 1.0)
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(if self.is_obstacle(x, y) { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    /// Replaces the elevation layer with the grey levels of a PGM image of the
    /// same size. Grey level `g` maps to elevation `g * scale`.
    pub fn with_elevation_pgm(mut self, pgm: &[u8], scale: f64) -> Result<Self> {
        let img = read_pgm(pgm)?;
        if img.width != self.width || img.height != self.height {
            return Err(Error::config(format!(
                "elevation image is {}x{}, terrain is {}x{}",
                img.width, img.height, self.width, self.height
            )));
        }
        self.elevation = img.pixels.iter().map(|&g| g as f64 * scale).collect();
        Ok(self)
    }
}

/// Grey-level image decoded from a PGM file.
#[derive(Debug, Clone, PartialEq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub max_value: u16,
    pub pixels: Vec<u16>,
}

/// Reads plain (`P2`) or binary (`P5`) PGM data. Comments start with `#`.
pub fn read_pgm(data: &[u8]) -> Result<PgmImage> {
    let mut pos = 0usize;
    let mut token = |data: &[u8]| -> Result<String> {
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::parse(0, "truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };
    let magic = token(data)?;
    let num = |s: String| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::parse(0, format!("bad PGM number {s:?}")))
    };
    let width = num(token(data)?)?;
    let height = num(token(data)?)?;
    let max_value = num(token(data)?)?;
    if width == 0 || height == 0 || max_value == 0 || max_value > u16::MAX as usize {
        return Err(Error::parse(0, "bad PGM dimensions"));
    }
    let n = width * height;
    let pixels = match magic.as_str() {
        "P2" => {
            let mut px = Vec::with_capacity(n);
            for _ in 0..n {
                let v = num(token(data)?)?;
                if v > max_value {
                    return Err(Error::parse(0, "PGM value exceeds maxval"));
                }
                px.push(v as u16);
            }
            px
        }
        "P5" => {
            // exactly one whitespace byte separates the header from the raster
            let start = pos + 1;
            let bytes_per = if max_value < 256 { 1 } else { 2 };
            let raster = data
                .get(start..start + n * bytes_per)
                .ok_or_else(|| Error::parse(0, "truncated PGM raster"))?;
            if bytes_per == 1 {
                raster.iter().map(|&b| b as u16).collect()
            } else {
                raster
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]))
                    .collect()
            }
        }
        other => return Err(Error::parse(0, format!("unsupported PGM magic {other:?}"))),
    };
    Ok(PgmImage {
        width,
        height,
        max_value: max_value as u16,
        pixels,
    })
}

/// Writes a plain (`P2`) PGM with 8-bit grey levels.
pub fn write_pgm(width: usize, height: usize, pixels: &[u8]) -> String {
    assert_eq!(pixels.len(), width * height);
    let mut out = format!("P2\n{width} {height}\n255\n");
    for row in pixels.chunks(width) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// A point emitter of attractant or repellent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub cell: (usize, usize),
    /// Mass emitted per step.
    pub rate: f64,
}

impl Source {
    pub fn new(x: usize, y: usize, rate: f64) -> Self {
        Source { cell: (x, y), rate }
    }
}

/// Concentration of one chemical over a terrain.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    concentration: Vec<f64>,
    diffusion: f64,
    decay: f64,
    sources: Vec<Source>,
}

impl ScalarField {
    /// All-zero field over `terrain` with validated rate constants.
    pub fn new(terrain: &Terrain, diffusion: f64, decay: f64, sources: Vec<Source>) -> Result<Self> {
        validate_rates(diffusion, decay)?;
        for s in &sources {
            let (x, y) = s.cell;
            if x >= terrain.width() || y >= terrain.height() {
                return Err(Error::config(format!("source ({x}, {y}) outside the terrain")));
            }
            if terrain.is_obstacle(x, y) {
                return Err(Error::config(format!("source ({x}, {y}) sits on an obstacle")));
            }
            if !(s.rate >= 0.0 && s.rate.is_finite()) {
                return Err(Error::config(format!("negative emission rate {}", s.rate)));
            }
        }
        Ok(ScalarField {
            width: terrain.width(),
            height: terrain.height(),
            concentration: vec![0.0; terrain.len()],
            diffusion,
            decay,
            sources,
        })
    }

    /// Field with explicit initial concentrations. Obstacle cells are zeroed.
    pub fn with_values(
        terrain: &Terrain,
        values: Vec<f64>,
        diffusion: f64,
        decay: f64,
        sources: Vec<Source>,
    ) -> Result<Self> {
        let mut f = ScalarField::new(terrain, diffusion, decay, sources)?;
        if values.len() != terrain.len() {
            return Err(Error::config("concentration grid size mismatch"));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::config("concentrations must be finite and non-negative"));
        }
        f.concentration = values;
        for (c, &blocked) in f.concentration.iter_mut().zip(terrain.obstacle_grid()) {
            if blocked {
                *c = 0.0;
            }
        }
        Ok(f)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn values(&self) -> &[f64] {
        &self.concentration
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.concentration[y * self.width + x]
    }

    pub fn total_mass(&self) -> f64 {
        self.concentration.iter().sum()
    }

    pub fn max_value(&self) -> f64 {
        self.concentration.iter().copied().fold(0.0, f64::max)
    }

    /// Grey-level export scaled so the maximum maps to 255.
    pub fn to_pgm(&self) -> String {
        let max = self.max_value();
        let px: Vec<u8> = self
            .concentration
            .iter()
            .map(|&c| if max > 0.0 { (c / max * 255.0).round() as u8 } else { 0 })
            .collect();
        write_pgm(self.width, self.height, &px)
    }

    /// Raw values, one grid row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.concentration.chunks(self.width) {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Concentration interpolated bilinearly between passable cell centres.
    /// `None` outside the domain or inside an obstacle.
    pub fn sample(&self, terrain: &Terrain, p: Point) -> Option<f64> {
        interpolate(&self.concentration, terrain, p)
    }
}

fn validate_rates(diffusion: f64, decay: f64) -> Result<()> {
    if !(0.0..=MAX_STABLE_DIFFUSION).contains(&diffusion) {
        return Err(Error::config(format!(
            "diffusion coefficient {diffusion} outside the stable range [0, {MAX_STABLE_DIFFUSION}]"
        )));
    }
    if !(0.0..=1.0).contains(&decay) {
        return Err(Error::config(format!("decay {decay} outside [0, 1]")));
    }
    Ok(())
}

/// One synchronous explicit update with no-flux boundaries at obstacles and
/// at the domain edge. Decay is applied to the diffused value, so the update
/// reads `c' = (1 - λ) (c + D (Σ neighbours − deg · c)) + emission`.
pub fn diffuse_step(field: &ScalarField, terrain: &Terrain) -> Result<ScalarField> {
    validate_rates(field.diffusion, field.decay)?;
    if field.width != terrain.width() || field.height != terrain.height() {
        return Err(Error::config("field and terrain sizes differ"));
    }
    let (w, h) = (field.width, field.height);
    let c = &field.concentration;
    let d = field.diffusion;
    let keep = 1.0 - field.decay;
    let mut next = vec![0.0; c.len()];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if terrain.is_obstacle(x, y) {
                continue;
            }
            let mut flux = 0.0;
            for (nx, ny) in terrain.neighbors4(x, y) {
                flux += c[ny * w + nx] - c[i];
            }
            next[i] = keep * (c[i] + d * flux);
        }
    }
    for s in &field.sources {
        if s.rate < 0.0 {
            return Err(Error::config(format!("negative emission rate {}", s.rate)));
        }
        next[s.cell.1 * w + s.cell.0] += s.rate;
    }
    Ok(ScalarField {
        concentration: next,
        ..field.clone()
    })
}

/// Rate constants and stopping rule for [`build_field`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub diffusion: f64,
    pub decay: f64,
    /// Max-norm change between iterates below which the field counts as steady.
    pub tolerance: f64,
    /// Iteration cap; `None` means `50 * (width + height)`.
    pub max_iterations: Option<usize>,
}

impl Default for FieldParams {
    fn default() -> Self {
        FieldParams {
            diffusion: 0.25,
            decay: 0.01,
            tolerance: 1e-6,
            max_iterations: None,
        }
    }
}

/// Outcome of [`build_field`]: the last iterate plus convergence bookkeeping.
#[derive(Debug, Clone)]
pub struct BuiltField {
    pub field: ScalarField,
    pub iterations: usize,
    pub converged: bool,
    /// Max-norm change of the final iteration.
    pub last_change: f64,
}

/// Iterates [`diffuse_step`] from a zero field until the max-norm change drops
/// below the tolerance or the iteration cap is hit.
pub fn build_field(sources: &[Source], terrain: &Terrain, params: &FieldParams) -> Result<BuiltField> {
    let mut field = ScalarField::new(terrain, params.diffusion, params.decay, sources.to_vec())?;
    let cap = params
        .max_iterations
        .unwrap_or(50 * (terrain.width() + terrain.height()));
    if sources.iter().all(|s| s.rate == 0.0) {
        return Ok(BuiltField {
            field,
            iterations: 0,
            converged: true,
            last_change: 0.0,
        });
    }
    let mut last_change = f64::INFINITY;
    for it in 1..=cap {
        let next = diffuse_step(&field, terrain)?;
        last_change = next
            .concentration
            .iter()
            .zip(&field.concentration)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        field = next;
        if last_change < params.tolerance {
            return Ok(BuiltField {
                field,
                iterations: it,
                converged: true,
                last_change,
            });
        }
    }
    Ok(BuiltField {
        field,
        iterations: cap,
        converged: false,
        last_change,
    })
}

/// Bilinear interpolation of a cell grid at `p`, using only passable corner
/// cells (weights renormalised). Indices are clamped at the domain edge.
pub(crate) fn interpolate(values: &[f64], terrain: &Terrain, p: Point) -> Option<f64> {
    let (cx, cy) = terrain.cell_of(p)?;
    if terrain.is_obstacle(cx, cy) {
        return None;
    }
    let (w, h) = (terrain.width() as i64, terrain.height() as i64);
    let fx = p.x - 0.5;
    let fy = p.y - 0.5;
    let x0 = fx.floor();
    let y0 = fy.floor();
    let (tx, ty) = (fx - x0, fy - y0);
    let (x0, y0) = (x0 as i64, y0 as i64);
    let mut acc = 0.0;
    let mut wsum = 0.0;
    for (dx, wx) in [(0, 1.0 - tx), (1, tx)] {
        for (dy, wy) in [(0, 1.0 - ty), (1, ty)] {
            let wgt = wx * wy;
            if wgt == 0.0 {
                continue;
            }
            let x = (x0 + dx).clamp(0, w - 1) as usize;
            let y = (y0 + dy).clamp(0, h - 1) as usize;
            if terrain.is_obstacle(x, y) {
                continue;
            }
            acc += wgt * values[terrain.index(x, y)];
            wsum += wgt;
        }
    }
    (wsum > 0.0).then(|| acc / wsum)
}

/// Central-difference gradient (step one cell) of the interpolated grid;
/// falls back to one-sided differences where a probe lands outside the
/// domain or in an obstacle, and to zero along an axis blocked on both sides.
pub(crate) fn grid_gradient(values: &[f64], terrain: &Terrain, p: Point) -> Result<Vec2> {
    let f0 = match terrain.cell_of(p) {
        None => return Err(Error::OutOfDomain { x: p.x, y: p.y }),
        Some((x, y)) if terrain.is_obstacle(x, y) => return Err(Error::InObstacle { x: p.x, y: p.y }),
        Some(_) => interpolate(values, terrain, p).expect("own cell is passable"),
    };
    let axis = |e: Vec2| -> f64 {
        let fp = interpolate(values, terrain, p + e);
        let fm = interpolate(values, terrain, p - e);
        match (fp, fm) {
            (Some(a), Some(b)) => (a - b) * 0.5,
            (Some(a), None) => a - f0,
            (None, Some(b)) => f0 - b,
            (None, None) => 0.0,
        }
    };
    Ok(Point::new(axis(Point::new(1.0, 0.0)), axis(Point::new(0.0, 1.0))))
}

/// Concentration gradient at a continuous position, in concentration per cell.
pub fn gradient_at(field: &ScalarField, terrain: &Terrain, pos: Point) -> Result<Vec2> {
    grid_gradient(&field.concentration, terrain, pos)
}
