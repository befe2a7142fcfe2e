use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default effective relative permittivity of the substrate.
pub const DEFAULT_PERMITTIVITY: f64 = 11.45;
/// Default out-of-plane depth of the 2D cross-section, µm.
pub const DEFAULT_DEPTH_UM: f64 = 1.0;

/// Axis-aligned rectangle in µm, `x0 < x1`, `y0 < y1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    fn overlaps(&self, other: &Rect) -> bool {
        self.x0 <= other.x1 && other.x0 <= self.x1 && self.y0 <= other.y1 && other.y0 <= self.y1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conductor {
    pub label: String,
    pub rect: Rect,
    /// Tied to ground: held at 0 V in every solve and excluded from the matrix.
    pub grounded: bool,
}

/// Conductors on a rectangular chip section enclosed by a grounded box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductorLayout {
    pub width: f64,
    pub height: f64,
    pub conductors: Vec<Conductor>,
    pub relative_permittivity: f64,
    pub grid_spacing: f64,
    pub depth: f64,
}

impl ConductorLayout {
    pub fn new(width: f64, height: f64, grid_spacing: f64) -> Self {
        Self {
            width,
            height,
            conductors: Vec::new(),
            relative_permittivity: DEFAULT_PERMITTIVITY,
            grid_spacing,
            depth: DEFAULT_DEPTH_UM,
        }
    }

    pub fn with_conductor(mut self, label: &str, rect: Rect) -> Self {
        self.conductors.push(Conductor { label: label.to_string(), rect, grounded: false });
        self
    }

    pub fn with_grounded(mut self, label: &str, rect: Rect) -> Self {
        self.conductors.push(Conductor { label: label.to_string(), rect, grounded: true });
        self
    }

    /// Same geometry on a grid `factor` times finer.
    pub fn refined(&self, factor: usize) -> Self {
        Self { grid_spacing: self.grid_spacing / factor as f64, ..self.clone() }
    }

    /// Grid cells along x and y.
    pub fn cells(&self) -> (usize, usize) {
        ((self.width / self.grid_spacing).round() as usize, (self.height / self.grid_spacing).round() as usize)
    }

    /// Labels of the conductors that appear in the Maxwell matrix.
    pub fn signal_labels(&self) -> Vec<String> {
        self.conductors.iter().filter(|c| !c.grounded).map(|c| c.label.clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.width) && positive(self.height) && positive(self.grid_spacing)) {
            return Err(Error::Layout("domain and grid spacing must be positive".into()));
        }
        if !(positive(self.relative_permittivity) && positive(self.depth)) {
            return Err(Error::Layout("permittivity and depth must be positive".into()));
        }
        for extent in [self.width, self.height] {
            let n = extent / self.grid_spacing;
            if (n - n.round()).abs() > 1e-9 * n.max(1.0) {
                return Err(Error::Layout(format!(
                    "grid spacing {} does not divide extent {extent}",
                    self.grid_spacing
                )));
            }
        }
        for (i, c) in self.conductors.iter().enumerate() {
            let r = &c.rect;
            if !(r.x0 < r.x1 && r.y0 < r.y1) {
                return Err(Error::Layout(format!("conductor '{}' has empty extent", c.label)));
            }
            if !(r.x0 > 0.0 && r.y0 > 0.0 && r.x1 < self.width && r.y1 < self.height) {
                return Err(Error::Layout(format!("conductor '{}' touches the box", c.label)));
            }
            for other in &self.conductors[..i] {
                if other.label == c.label {
                    return Err(Error::Layout(format!("duplicate label '{}'", c.label)));
                }
                if other.rect.overlaps(r) {
                    return Err(Error::Layout(format!("conductors '{}' and '{}' overlap", other.label, c.label)));
                }
            }
        }
        Ok(())
    }
}

impl FromStr for ConductorLayout {
    type Err = Error;

    /// Line format (µm), `#` starts a comment:
    ///
    /// ```text
    /// domain 600 400
    /// spacing 2
    /// permittivity 11.45   # optional
    /// depth 1              # optional
    /// Top 200 210 400 260
    /// Shield 20 20 40 380 ground
    /// ```
    fn from_str(text: &str) -> Result<Self> {
        let mut domain = None;
        let mut spacing = None;
        let mut permittivity = DEFAULT_PERMITTIVITY;
        let mut depth = DEFAULT_DEPTH_UM;
        let mut conductors = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::Layout(format!("line {}: {msg}", lineno + 1));
            let nums = |items: &[&str]| -> Result<Vec<f64>> {
                items.iter().map(|t| t.parse::<f64>().map_err(|_| bad(&format!("'{t}' is not a number")))).collect()
            };
            match tokens[0] {
                "domain" if tokens.len() == 3 => {
                    let v = nums(&tokens[1..])?;
                    domain = Some((v[0], v[1]));
                }
                "spacing" if tokens.len() == 2 => spacing = Some(nums(&tokens[1..])?[0]),
                "permittivity" if tokens.len() == 2 => permittivity = nums(&tokens[1..])?[0],
                "depth" if tokens.len() == 2 => depth = nums(&tokens[1..])?[0],
                "domain" | "spacing" | "permittivity" | "depth" => return Err(bad("wrong number of values")),
                label if tokens.len() == 5 || (tokens.len() == 6 && tokens[5] == "ground") => {
                    let v = nums(&tokens[1..5])?;
                    conductors.push(Conductor {
                        label: label.to_string(),
                        rect: Rect::new(v[0], v[1], v[2], v[3]),
                        grounded: tokens.len() == 6,
                    });
                }
                _ => return Err(bad("expected 'label x0 y0 x1 y1 [ground]'")),
            }
        }
        let (width, height) = domain.ok_or_else(|| Error::Layout("missing 'domain' line".into()))?;
        let grid_spacing = spacing.ok_or_else(|| Error::Layout("missing 'spacing' line".into()))?;
        let layout =
            ConductorLayout { width, height, conductors, relative_permittivity: permittivity, grid_spacing, depth };
        layout.validate()?;
        Ok(layout)
    }
}
