use crate::error::{NfalError, Result};
use crate::geometry::Vec2;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn centered(c: Vec2, half_w: f64, half_h: f64) -> Self {
        Rect::new(c.x - half_w, c.x + half_w, c.y - half_h, c.y + half_h)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.is_finite())
            && self.x1 > self.x0
            && self.y1 > self.y0;
        if ok {
            Ok(())
        } else {
            Err(NfalError::InvalidArgument(format!("region {self:?} must have positive area")))
        }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

/// Cell-centred sampling of a rectangle. Cell `(ix, iy)` has flat index `iy·nx + ix`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub region: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(region: Rect, nx: usize, ny: usize) -> Result<Self> {
        region.validate()?;
        if nx == 0 || ny == 0 {
            return Err(NfalError::InvalidArgument("grid shape must be positive".into()));
        }
        Ok(GridSpec { region, nx, ny })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.region.width() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.region.height() / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.region.x0 + (ix as f64 + 0.5) * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.region.y0 + (iy as f64 + 0.5) * self.dy()
    }

    pub fn center(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(self.x(ix), self.y(iy))
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn point(&self, idx: usize) -> Vec2 {
        let (ix, iy) = self.coords(idx);
        self.center(ix, iy)
    }

    /// Cell containing `p`, clamped to the grid.
    pub fn locate(&self, p: Vec2) -> (usize, usize) {
        let fx = ((p.x - self.region.x0) / self.dx()).floor();
        let fy = ((p.y - self.region.y0) / self.dy()).floor();
        let cx = fx.clamp(0.0, self.nx as f64 - 1.0) as usize;
        let cy = fy.clamp(0.0, self.ny as f64 - 1.0) as usize;
        (cx, cy)
    }
}

/// Values sampled at the cell centres of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    pub spec: GridSpec,
    pub values: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn get(&self, ix: usize, iy: usize) -> T {
        self.values[self.spec.index(ix, iy)]
    }

    pub fn map<U>(&self, f: impl Fn(T) -> U) -> Grid<U> {
        Grid { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }
}
