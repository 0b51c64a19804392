use std::collections::VecDeque;

use figforge_core::{Point, Rect};

/// Fraction `n / d` with `d > 0`.
#[derive(Clone, Copy, Debug)]
struct Q(i128, i128);

impl Q {
    fn new(n: i128, d: i128) -> Q {
        if d < 0 {
            Q(-n, -d)
        } else {
            Q(n, d)
        }
    }
    fn lt(self, o: Q) -> bool {
        self.0 * o.1 < o.0 * self.1
    }
    fn eq(self, o: Q) -> bool {
        self.0 * o.1 == o.0 * self.1
    }
}

/// Parametric clip of the closed segment `a`-`b` against the open box
/// `(x0, x1) x (y0, y1)` in exact rational arithmetic.
pub fn crosses_open_box(a: Point, b: Point, x0: i64, y0: i64, x1: i64, y1: i64) -> bool {
    if x0 >= x1 || y0 >= y1 {
        return false;
    }
    if a == b {
        return x0 < a.x && a.x < x1 && y0 < a.y && a.y < y1;
    }
    // (bound, open?)
    let mut lo = (Q(0, 1), false);
    let mut hi = (Q(1, 1), false);
    for (p, d, l, h) in [(a.x, b.x - a.x, x0, x1), (a.y, b.y - a.y, y0, y1)] {
        if d == 0 {
            if !(l < p && p < h) {
                return false;
            }
            continue;
        }
        let t0 = Q::new((l - p) as i128, d as i128);
        let t1 = Q::new((h - p) as i128, d as i128);
        let (s, e) = if t0.lt(t1) { (t0, t1) } else { (t1, t0) };
        if lo.0.lt(s) || (lo.0.eq(s) && !lo.1) {
            lo = (s, true);
        }
        if e.lt(hi.0) || (e.eq(hi.0) && !hi.1) {
            hi = (e, true);
        }
    }
    lo.0.lt(hi.0) || (lo.0.eq(hi.0) && !lo.1 && !hi.1)
}

pub fn crosses_rect(a: Point, b: Point, r: &Rect) -> bool {
    crosses_open_box(a, b, r.x.0, r.y.0, r.x.0 + r.w.0, r.y.0 + r.h.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

pub fn side_point(r: &Rect, s: Side) -> Point {
    let cx = (2 * r.x.0 + r.w.0).div_euclid(2);
    let cy = (2 * r.y.0 + r.h.0).div_euclid(2);
    match s {
        Side::Top => Point::new(cx, r.y.0),
        Side::Bottom => Point::new(cx, r.y.0 + r.h.0),
        Side::Left => Point::new(r.x.0, cy),
        Side::Right => Point::new(r.x.0 + r.w.0, cy),
    }
}

/// Sides facing each other along the dominant axis; horizontal on ties.
pub fn facing_sides(a: &Rect, b: &Rect) -> (Side, Side) {
    let dx = (2 * b.x.0 + b.w.0) - (2 * a.x.0 + a.w.0);
    let dy = (2 * b.y.0 + b.h.0) - (2 * a.y.0 + a.h.0);
    if dx.abs() >= dy.abs() {
        if dx >= 0 {
            (Side::Right, Side::Left)
        } else {
            (Side::Left, Side::Right)
        }
    } else if dy > 0 {
        (Side::Bottom, Side::Top)
    } else {
        (Side::Top, Side::Bottom)
    }
}

pub struct OracleRoute {
    pub from: Point,
    pub to: Point,
    /// (bends, length) of the best path, if one exists.
    pub best: Option<(usize, i64)>,
}

/// Exhaustive label-correcting search for the lexicographically smallest
/// (bends, length) over the lattice: lines every `cell` from `-cell` past the
/// far canvas edge, plus the port lines.
pub fn brute_force(canvas_w: i64, canvas_h: i64, cell: i64, clearance: i64, src: &Rect, dst: &Rect, obstacles: &[Rect]) -> OracleRoute {
    let (ss, ds) = facing_sides(src, dst);
    let from = side_point(src, ss);
    let to = side_point(dst, ds);
    let lines = |extent: i64, extra: [i64; 2]| {
        let mut v = Vec::new();
        let mut k = -1i64;
        loop {
            v.push(k * cell);
            if k * cell >= extent + cell {
                break;
            }
            k += 1;
        }
        v.extend(extra);
        v.sort();
        v.dedup();
        v
    };
    let xs = lines(canvas_w, [from.x, to.x]);
    let ys = lines(canvas_h, [from.y, to.y]);
    let mut walls: Vec<Rect> = obstacles
        .iter()
        .map(|r| Rect::new(r.x.0 - clearance, r.y.0 - clearance, r.w.0 + 2 * clearance, r.h.0 + 2 * clearance))
        .collect();
    walls.push(*src);
    walls.push(*dst);

    let (nx, ny) = (xs.len(), ys.len());
    let pt = |i: usize, j: usize| Point::new(xs[i], ys[j]);
    let free = |p: Point, q: Point| walls.iter().all(|w| !crosses_rect(p, q, w));
    let Some(si) = xs.iter().position(|&x| x == from.x) else { unreachable!() };
    let Some(sj) = ys.iter().position(|&y| y == from.y) else { unreachable!() };
    let ti = xs.iter().position(|&x| x == to.x).unwrap();
    let tj = ys.iter().position(|&y| y == to.y).unwrap();

    // label per (i, j, dir); dir 4 = not yet moved
    let idx = |i: usize, j: usize, d: usize| (j * nx + i) * 5 + d;
    let mut label: Vec<Option<(usize, i64)>> = vec![None; nx * ny * 5];
    label[idx(si, sj, 4)] = Some((0, 0));
    let mut queue = VecDeque::from([(si, sj, 4usize)]);
    let mut queued = vec![false; nx * ny * 5];
    queued[idx(si, sj, 4)] = true;
    while let Some((i, j, d)) = queue.pop_front() {
        queued[idx(i, j, d)] = false;
        let (bends, len) = label[idx(i, j, d)].unwrap();
        let moves: [(isize, isize); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];
        for (nd, (di, dj)) in moves.iter().enumerate() {
            let ni = i as isize + di;
            let nj = j as isize + dj;
            if ni < 0 || nj < 0 || ni >= nx as isize || nj >= ny as isize {
                continue;
            }
            let (ni, nj) = (ni as usize, nj as usize);
            let (p, q) = (pt(i, j), pt(ni, nj));
            if !free(p, q) {
                continue;
            }
            let nb = bends + usize::from(d != 4 && d != nd);
            let nl = len + (q.x - p.x).abs() + (q.y - p.y).abs();
            let k = idx(ni, nj, nd);
            if label[k].is_none_or(|old| (nb, nl) < old) {
                label[k] = Some((nb, nl));
                if !queued[k] {
                    queued[k] = true;
                    queue.push_back((ni, nj, nd));
                }
            }
        }
    }
    let best = (0..5).filter_map(|d| label[idx(ti, tj, d)]).min();
    OracleRoute { from, to, best }
}

pub fn bends_of(waypoints: &[Point]) -> usize {
    waypoints
        .windows(3)
        .filter(|w| {
            let h1 = w[0].y == w[1].y;
            let h2 = w[1].y == w[2].y;
            h1 != h2
        })
        .count()
}
