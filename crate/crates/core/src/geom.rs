//! Integer geometry in EMU space.

use serde::{Deserialize, Serialize};

use crate::scene::units::Emu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Point {
        Point { x, y }
    }
}

/// Axis-aligned rectangle; `w` and `h` are non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: Emu,
    pub y: Emu,
    pub w: Emu,
    pub h: Emu,
}

impl Rect {
    pub const fn new(x: i64, y: i64, w: i64, h: i64) -> Rect {
        Rect {
            x: Emu(x),
            y: Emu(y),
            w: Emu(w),
            h: Emu(h),
        }
    }

    pub fn from_inches(x: f64, y: f64, w: f64, h: f64) -> Rect {
        Rect {
            x: Emu::inches(x),
            y: Emu::inches(y),
            w: Emu::inches(w),
            h: Emu::inches(h),
        }
    }

    pub fn left(&self) -> i64 {
        self.x.0
    }
    pub fn top(&self) -> i64 {
        self.y.0
    }
    pub fn right(&self) -> i64 {
        self.x.0 + self.w.0
    }
    pub fn bottom(&self) -> i64 {
        self.y.0 + self.h.0
    }

    /// Center doubled, so it stays integral.
    pub fn center2(&self) -> (i64, i64) {
        (2 * self.x.0 + self.w.0, 2 * self.y.0 + self.h.0)
    }

    pub fn inflate(&self, by: i64) -> Rect {
        Rect::new(self.left() - by, self.top() - by, self.w.0 + 2 * by, self.h.0 + 2 * by)
    }

    /// True when the open interiors intersect.
    pub fn interiors_overlap(&self, other: &Rect) -> bool {
        self.left() < other.right()
            && other.left() < self.right()
            && self.top() < other.bottom()
            && other.top() < self.bottom()
    }

    /// True when `other` lies inside `self` (boundaries may touch).
    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.left() <= other.left()
            && self.top() <= other.top()
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    pub fn contains_point_strictly(&self, p: Point) -> bool {
        self.left() < p.x && p.x < self.right() && self.top() < p.y && p.y < self.bottom()
    }
}

/// Does the closed axis-aligned segment `a`-`b` meet the open interior of `r`?
///
/// Diagonal segments use an exact separating-axis test on i128.
pub fn segment_hits_interior(a: Point, b: Point, r: &Rect) -> bool {
    let (x0, x1) = (a.x.min(b.x), a.x.max(b.x));
    let (y0, y1) = (a.y.min(b.y), a.y.max(b.y));
    if r.w.0 <= 0 || r.h.0 <= 0 {
        return false;
    }
    if a == b {
        return r.contains_point_strictly(a);
    }
    if a.x == b.x {
        return r.left() < a.x && a.x < r.right() && y0 < r.bottom() && r.top() < y1;
    }
    if a.y == b.y {
        return r.top() < a.y && a.y < r.bottom() && x0 < r.right() && r.left() < x1;
    }
    // bounding boxes must overlap openly
    if !(x0 < r.right() && r.left() < x1 && y0 < r.bottom() && r.top() < y1) {
        return false;
    }
    // the line must strictly separate at least two corners of the rectangle
    let side = |px: i64, py: i64| -> i128 {
        (b.x - a.x) as i128 * (py - a.y) as i128 - (b.y - a.y) as i128 * (px - a.x) as i128
    };
    let corners = [
        side(r.left(), r.top()),
        side(r.right(), r.top()),
        side(r.right(), r.bottom()),
        side(r.left(), r.bottom()),
    ];
    let pos = corners.iter().any(|&s| s > 0);
    let neg = corners.iter().any(|&s| s < 0);
    pos && neg
}
