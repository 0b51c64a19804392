//! Orthogonal connector routing.
//!
//! Elbow connectors are routed on a lattice whose lines are spaced `cell`
//! apart over the canvas plus a one-cell halo, with two extra lines through
//! each port so that ports are lattice points. Other nodes are obstacles
//! inflated by `clearance`; the two endpoint nodes block only their own
//! interior. The search is uniform-cost over (point, heading) states where
//! every bend costs more than any attainable length, so the result is the
//! fewest-bends path and, among those, the shortest.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Rect};
use crate::scene::{Connector, ConnectorKind, ElementId, Emu, Node, Port, Routing, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouterConfig {
    /// Lattice pitch.
    pub cell: Emu,
    /// Inflation applied to obstacle boxes.
    pub clearance: Emu,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig {
            cell: Emu(114_300),
            clearance: Emu(91_440),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutedPath {
    pub waypoints: Vec<Point>,
    pub bends: usize,
    pub length: i64,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RouteError {
    #[error("connector endpoint '{0}' is not a node in the scene")]
    MissingEndpoint(ElementId),
}

/// Ports by dominant axis of the center-to-center vector; ties go horizontal.
pub fn anchor_ports(src: &Rect, dst: &Rect) -> (Port, Port) {
    let (sx, sy) = src.center2();
    let (dx, dy) = dst.center2();
    let (vx, vy) = (dx - sx, dy - sy);
    if vx.abs() >= vy.abs() {
        if vx >= 0 {
            (Port::Right, Port::Left)
        } else {
            (Port::Left, Port::Right)
        }
    } else if vy > 0 {
        (Port::Bottom, Port::Top)
    } else {
        (Port::Top, Port::Bottom)
    }
}

/// Port pair with the closest port centers, used when endpoint boxes overlap.
fn nearest_ports(src: &Rect, dst: &Rect) -> (Port, Port) {
    let mut best = (Port::Right, Port::Left);
    let mut best_d = i128::MAX;
    for a in Port::ALL {
        for b in Port::ALL {
            let (p, q) = (a.point_on(src), b.point_on(dst));
            let d = (p.x - q.x) as i128 * (p.x - q.x) as i128 + (p.y - q.y) as i128 * (p.y - q.y) as i128;
            if d < best_d {
                best_d = d;
                best = (a, b);
            }
        }
    }
    best
}

/// Ports for a direct (straight or curved) connector.
pub fn direct_ports(src: &Rect, dst: &Rect) -> (Port, Port) {
    if src.interiors_overlap(dst) {
        nearest_ports(src, dst)
    } else {
        anchor_ports(src, dst)
    }
}

/// Routing lattice with precomputed blocked edges.
#[derive(Debug, Clone)]
pub struct RoutingGrid {
    xs: Vec<i64>,
    ys: Vec<i64>,
    /// `h_blocked[j * (nx - 1) + i]`: edge (i,j)-(i+1,j)
    h_blocked: Vec<bool>,
    /// `v_blocked[j * nx + i]`: edge (i,j)-(i,j+1)
    v_blocked: Vec<bool>,
}

fn lattice_lines(extent: i64, cell: i64, extra: [i64; 2]) -> Vec<i64> {
    let steps = (extent + cell - 1).div_euclid(cell);
    let mut lines: Vec<i64> = (-1..=steps + 1).map(|k| k * cell).collect();
    lines.extend(extra);
    lines.sort_unstable();
    lines.dedup();
    lines
}

impl RoutingGrid {
    /// `blockers` are rectangles whose open interior no segment may enter.
    pub fn new(canvas: &Rect, cell: Emu, ports: [Point; 2], blockers: &[Rect]) -> RoutingGrid {
        assert!(cell.0 > 0, "grid pitch must be positive");
        let xs = lattice_lines(canvas.w.0, cell.0, [ports[0].x, ports[1].x]);
        let ys = lattice_lines(canvas.h.0, cell.0, [ports[0].y, ports[1].y]);
        let (nx, ny) = (xs.len(), ys.len());
        let mut h_blocked = vec![false; (nx - 1) * ny];
        let mut v_blocked = vec![false; nx * (ny - 1)];
        for r in blockers.iter().filter(|r| r.w.0 > 0 && r.h.0 > 0) {
            // lines strictly inside the open rectangle
            let yi0 = ys.partition_point(|&y| y <= r.top());
            let yi1 = ys.partition_point(|&y| y < r.bottom());
            let xi0 = xs.partition_point(|&x| x <= r.left());
            let xi1 = xs.partition_point(|&x| x < r.right());
            // horizontal edges on interior rows overlapping (left, right)
            let ei0 = xs.partition_point(|&x| x < r.left()).saturating_sub(1);
            for j in yi0..yi1 {
                for i in ei0..nx - 1 {
                    if xs[i] >= r.right() {
                        break;
                    }
                    if xs[i] < r.right() && r.left() < xs[i + 1] {
                        h_blocked[j * (nx - 1) + i] = true;
                    }
                }
            }
            let ej0 = ys.partition_point(|&y| y < r.top()).saturating_sub(1);
            for i in xi0..xi1 {
                for j in ej0..ny - 1 {
                    if ys[j] >= r.bottom() {
                        break;
                    }
                    if ys[j] < r.bottom() && r.top() < ys[j + 1] {
                        v_blocked[j * nx + i] = true;
                    }
                }
            }
        }
        RoutingGrid {
            xs,
            ys,
            h_blocked,
            v_blocked,
        }
    }

    pub fn columns(&self) -> usize {
        self.xs.len()
    }

    pub fn rows(&self) -> usize {
        self.ys.len()
    }

    fn index_of(&self, p: Point) -> Option<(usize, usize)> {
        let i = self.xs.binary_search(&p.x).ok()?;
        let j = self.ys.binary_search(&p.y).ok()?;
        Some((i, j))
    }

    fn point(&self, i: usize, j: usize) -> Point {
        Point::new(self.xs[i], self.ys[j])
    }

    /// Neighbor of (i, j) in direction `d` (0 = up, 1 = right, 2 = down, 3 = left) with edge length.
    fn step(&self, i: usize, j: usize, d: usize) -> Option<(usize, usize, i64)> {
        let nx = self.xs.len();
        match d {
            0 if j > 0 && !self.v_blocked[(j - 1) * nx + i] => Some((i, j - 1, self.ys[j] - self.ys[j - 1])),
            1 if i + 1 < nx && !self.h_blocked[j * (nx - 1) + i] => Some((i + 1, j, self.xs[i + 1] - self.xs[i])),
            2 if j + 1 < self.ys.len() && !self.v_blocked[j * nx + i] => {
                Some((i, j + 1, self.ys[j + 1] - self.ys[j]))
            }
            3 if i > 0 && !self.h_blocked[j * (nx - 1) + i - 1] => Some((i - 1, j, self.xs[i] - self.xs[i - 1])),
            _ => None,
        }
    }

    fn total_edge_length(&self) -> i64 {
        let w = self.xs[self.xs.len() - 1] - self.xs[0];
        let h = self.ys[self.ys.len() - 1] - self.ys[0];
        w * self.ys.len() as i64 + h * self.xs.len() as i64
    }

    /// Fewest-bends, then shortest, obstacle-free path between two lattice points.
    pub fn shortest_path(&self, from: Point, to: Point) -> Option<RoutedPath> {
        let (si, sj) = self.index_of(from)?;
        let (ti, tj) = self.index_of(to)?;
        let nx = self.xs.len();
        let n_points = nx * self.ys.len();
        // heading 4 marks the start state, before any move
        const START: usize = 4;
        let state = |i: usize, j: usize, h: usize| (j * nx + i) * 5 + h;
        let bend_penalty = 2 * self.total_edge_length() + 1;

        let mut dist = vec![i64::MAX; n_points * 5];
        let mut prev = vec![usize::MAX; n_points * 5];
        let mut heap = BinaryHeap::new();
        let start = state(si, sj, START);
        dist[start] = 0;
        heap.push(Reverse((0i64, start)));

        let mut goal = None;
        while let Some(Reverse((cost, s))) = heap.pop() {
            if cost > dist[s] {
                continue;
            }
            let h = s % 5;
            let p = s / 5;
            let (i, j) = (p % nx, p / nx);
            if (i, j) == (ti, tj) {
                goal = Some(s);
                break;
            }
            for d in 0..4 {
                if h != START && d == (h + 2) % 4 {
                    continue;
                }
                let Some((ni, nj, len)) = self.step(i, j, d) else {
                    continue;
                };
                let bend = if h != START && h != d { bend_penalty } else { 0 };
                let next = state(ni, nj, d);
                let c = cost + len + bend;
                if c < dist[next] {
                    dist[next] = c;
                    prev[next] = s;
                    heap.push(Reverse((c, next)));
                }
            }
        }

        let goal = goal?;
        let mut chain = vec![goal];
        let mut cur = goal;
        while prev[cur] != usize::MAX {
            cur = prev[cur];
            chain.push(cur);
        }
        chain.reverse();
        let points: Vec<Point> = chain
            .iter()
            .map(|s| {
                let p = s / 5;
                self.point(p % nx, p / nx)
            })
            .collect();
        let waypoints = compress(&points);
        Some(RoutedPath {
            bends: waypoints.len().saturating_sub(2),
            length: path_length(&waypoints),
            waypoints,
            fallback: false,
        })
    }
}

/// Drops interior points that do not change direction.
pub fn compress(points: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if out.last() == Some(&p) {
            continue;
        }
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let collinear = (a.x == b.x && b.x == p.x) || (a.y == b.y && b.y == p.y);
            if collinear {
                out.pop();
            }
        }
        out.push(p);
    }
    if out.len() == 1 {
        out.push(out[0]);
    }
    out
}

pub fn path_length(waypoints: &[Point]) -> i64 {
    waypoints
        .windows(2)
        .map(|w| (w[1].x - w[0].x).abs() + (w[1].y - w[0].y).abs())
        .sum()
}

/// Direct three-segment elbow used when no obstacle-free path exists.
fn fallback_path(src_port: Port, from: Point, to: Point) -> RoutedPath {
    let raw = if matches!(src_port, Port::Left | Port::Right) {
        let mx = (from.x + to.x).div_euclid(2);
        vec![from, Point::new(mx, from.y), Point::new(mx, to.y), to]
    } else {
        let my = (from.y + to.y).div_euclid(2);
        vec![from, Point::new(from.x, my), Point::new(to.x, my), to]
    };
    let waypoints = compress(&raw);
    RoutedPath {
        bends: waypoints.len().saturating_sub(2),
        length: path_length(&waypoints),
        waypoints,
        fallback: true,
    }
}

/// Nodes that obstruct a connector: every non-container node other than the
/// endpoints and anything overlapping an endpoint.
pub fn obstacles_for(scene: &Scene, conn: &Connector) -> Vec<Rect> {
    obstacle_nodes(scene, conn).into_iter().map(|n| n.bbox).collect()
}

pub fn obstacle_nodes<'s>(scene: &'s Scene, conn: &Connector) -> Vec<&'s Node> {
    let (Some(src), Some(dst)) = (scene.node(&conn.src), scene.node(&conn.dst)) else {
        return Vec::new();
    };
    scene
        .nodes
        .iter()
        .filter(|n| n.id != conn.src && n.id != conn.dst && !n.is_container())
        .filter(|n| !n.bbox.interiors_overlap(&src.bbox) && !n.bbox.interiors_overlap(&dst.bbox))
        .collect()
}

/// Routes between two boxes around `obstacles` (uninflated) on `canvas`.
pub fn route_boxes(canvas: &Rect, src: &Rect, dst: &Rect, obstacles: &[Rect], cfg: &RouterConfig) -> (Port, Port, RoutedPath) {
    if src.interiors_overlap(dst) {
        let (a, b) = nearest_ports(src, dst);
        let waypoints = vec![a.point_on(src), b.point_on(dst)];
        let path = RoutedPath {
            bends: 0,
            length: path_length(&waypoints),
            waypoints,
            fallback: false,
        };
        return (a, b, path);
    }
    let (sp, dp) = anchor_ports(src, dst);
    let from = sp.point_on(src);
    let to = dp.point_on(dst);
    let mut blockers: Vec<Rect> = obstacles.iter().map(|r| r.inflate(cfg.clearance.0)).collect();
    blockers.push(*src);
    blockers.push(*dst);
    let grid = RoutingGrid::new(canvas, cfg.cell, [from, to], &blockers);
    let path = grid
        .shortest_path(from, to)
        .unwrap_or_else(|| fallback_path(sp, from, to));
    (sp, dp, path)
}

pub fn route_elbow(scene: &Scene, conn: &Connector, cfg: &RouterConfig) -> Result<RoutedPath, RouteError> {
    let src = scene
        .node(&conn.src)
        .ok_or_else(|| RouteError::MissingEndpoint(conn.src.clone()))?;
    let dst = scene
        .node(&conn.dst)
        .ok_or_else(|| RouteError::MissingEndpoint(conn.dst.clone()))?;
    let obstacles = obstacles_for(scene, conn);
    let (_, _, path) = route_boxes(&scene.canvas.rect(), &src.bbox, &dst.bbox, &obstacles, cfg);
    Ok(path)
}

fn routing_for(scene: &Scene, conn: &Connector, cfg: &RouterConfig) -> Option<Routing> {
    let src = scene.node(&conn.src)?;
    let dst = scene.node(&conn.dst)?;
    match conn.kind {
        ConnectorKind::Elbow => {
            let obstacles = obstacles_for(scene, conn);
            let (src_port, dst_port, path) = route_boxes(&scene.canvas.rect(), &src.bbox, &dst.bbox, &obstacles, cfg);
            Some(Routing {
                src_port,
                dst_port,
                waypoints: path.waypoints,
                fallback: path.fallback,
            })
        }
        ConnectorKind::Straight | ConnectorKind::Curve => {
            let (src_port, dst_port) = direct_ports(&src.bbox, &dst.bbox);
            Some(Routing {
                src_port,
                dst_port,
                waypoints: Vec::new(),
                fallback: false,
            })
        }
    }
}

/// Fills ports (and elbow waypoints) for every connector whose endpoints exist.
pub fn route_all(scene: &Scene, cfg: &RouterConfig) -> Scene {
    let mut out = scene.clone();
    for (k, conn) in scene.connectors.iter().enumerate() {
        out.connectors[k].routing = routing_for(scene, conn, cfg);
    }
    out
}

/// Start and end points of a routed connector.
pub fn endpoints(scene: &Scene, conn: &Connector) -> Option<(Point, Point)> {
    let routing = conn.routing.as_ref()?;
    if conn.kind == ConnectorKind::Elbow {
        let first = *routing.waypoints.first()?;
        let last = *routing.waypoints.last()?;
        return Some((first, last));
    }
    let src = scene.node(&conn.src)?;
    let dst = scene.node(&conn.dst)?;
    Some((routing.src_port.point_on(&src.bbox), routing.dst_port.point_on(&dst.bbox)))
}

/// Cubic control points for a curved connector: each end leaves along its
/// port normal by 40% of the endpoint distance.
pub fn curve_controls(a: Point, pa: Port, b: Point, pb: Port) -> [Point; 4] {
    let d = (((b.x - a.x) as f64).powi(2) + ((b.y - a.y) as f64).powi(2)).sqrt();
    let k = (0.4 * d).round() as i64;
    let (nax, nay) = pa.normal();
    let (nbx, nby) = pb.normal();
    [a, Point::new(a.x + nax * k, a.y + nay * k), Point::new(b.x + nbx * k, b.y + nby * k), b]
}

/// Integer flattening of a cubic into `n` chords.
pub fn flatten_cubic(c: &[Point; 4], n: usize) -> Vec<Point> {
    (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let u = 1.0 - t;
            let w = [u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t];
            let x: f64 = c.iter().zip(w).map(|(p, w)| p.x as f64 * w).sum();
            let y: f64 = c.iter().zip(w).map(|(p, w)| p.y as f64 * w).sum();
            Point::new(x.round() as i64, y.round() as i64)
        })
        .collect()
}

/// Polyline a connector is drawn along: elbow waypoints, the two port points
/// of a straight connector, or a 16-chord flattening of a curve.
pub fn polyline(scene: &Scene, conn: &Connector) -> Option<Vec<Point>> {
    let routing = conn.routing.as_ref()?;
    match conn.kind {
        ConnectorKind::Elbow => Some(routing.waypoints.clone()),
        ConnectorKind::Straight => {
            let (a, b) = endpoints(scene, conn)?;
            Some(vec![a, b])
        }
        ConnectorKind::Curve => {
            let (a, b) = endpoints(scene, conn)?;
            Some(flatten_cubic(&curve_controls(a, routing.src_port, b, routing.dst_port), 16))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::segment_hits_interior;
    use crate::scene::{BlockStyle, ConnectorStyle};

    fn inch(v: f64) -> i64 {
        Emu::inches(v).0
    }

    #[test]
    fn ports_by_dominant_axis() {
        let a = Rect::from_inches(0.0, 0.0, 1.0, 1.0);
        assert_eq!(anchor_ports(&a, &Rect::from_inches(3.0, 0.5, 1.0, 1.0)), (Port::Right, Port::Left));
        assert_eq!(anchor_ports(&a, &Rect::from_inches(-3.0, 0.5, 1.0, 1.0)), (Port::Left, Port::Right));
        assert_eq!(anchor_ports(&a, &Rect::from_inches(0.0, 3.0, 1.0, 1.0)), (Port::Bottom, Port::Top));
        assert_eq!(anchor_ports(&a, &Rect::from_inches(0.0, -3.0, 1.0, 1.0)), (Port::Top, Port::Bottom));
        // |dx| == |dy|
        assert_eq!(anchor_ports(&a, &Rect::from_inches(2.0, 2.0, 1.0, 1.0)), (Port::Right, Port::Left));
    }

    #[test]
    fn tie_break_costs_the_same_either_way_on_open_canvas() {
        // brute force: for the diagonal case, a horizontal port pair and a vertical
        // port pair give equal (bends, length) on an open canvas
        let canvas = Rect::from_inches(0.0, 0.0, 6.0, 6.0);
        let a = Rect::from_inches(1.0, 1.0, 1.0, 1.0);
        let b = Rect::from_inches(3.0, 3.0, 1.0, 1.0);
        let cfg = RouterConfig::default();
        let mut costs = Vec::new();
        for (sp, dp) in [(Port::Right, Port::Left), (Port::Bottom, Port::Top)] {
            let from = sp.point_on(&a);
            let to = dp.point_on(&b);
            let grid = RoutingGrid::new(&canvas, cfg.cell, [from, to], &[a, b]);
            let p = grid.shortest_path(from, to).unwrap();
            costs.push((p.bends, p.length));
        }
        assert_eq!(costs[0], costs[1]);
    }

    #[test]
    fn aligned_blocks_route_straight() {
        let mut s = Scene::default();
        let a = s.add_block(Rect::from_inches(1.0, 1.0, 1.0, 1.0), "A", BlockStyle::default()).unwrap();
        let b = s.add_block(Rect::from_inches(4.0, 1.0, 1.0, 1.0), "B", BlockStyle::default()).unwrap();
        let c = s.add_connector(&a, &b, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
        let p = route_elbow(&s, s.connector(&c).unwrap(), &RouterConfig::default()).unwrap();
        assert_eq!(p.bends, 0);
        assert!(!p.fallback);
        assert_eq!(p.waypoints, vec![Point::new(inch(2.0), inch(1.5)), Point::new(inch(4.0), inch(1.5))]);
        assert_eq!(p.length, inch(2.0));
    }

    #[test]
    fn offset_blocks_use_at_most_two_bends() {
        let mut s = Scene::default();
        let a = s.add_block(Rect::from_inches(1.0, 1.0, 1.0, 1.0), "A", BlockStyle::default()).unwrap();
        let b = s.add_block(Rect::from_inches(4.0, 1.6, 1.0, 1.0), "B", BlockStyle::default()).unwrap();
        let c = s.add_connector(&a, &b, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
        let p = route_elbow(&s, s.connector(&c).unwrap(), &RouterConfig::default()).unwrap();
        assert!(p.bends <= 2);
        assert_eq!(p.waypoints[0], Point::new(inch(2.0), inch(1.5)));
        assert_eq!(*p.waypoints.last().unwrap(), Point::new(inch(4.0), inch(2.1)));
    }

    #[test]
    fn centered_obstacle_forces_two_extra_bends() {
        let mut s = Scene::default();
        let a = s.add_block(Rect::from_inches(1.0, 2.0, 1.0, 1.0), "A", BlockStyle::default()).unwrap();
        let b = s.add_block(Rect::from_inches(6.0, 2.0, 1.0, 1.0), "B", BlockStyle::default()).unwrap();
        let c = s.add_connector(&a, &b, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
        let cfg = RouterConfig::default();
        let open = route_elbow(&s, s.connector(&c).unwrap(), &cfg).unwrap();
        s.add_block(Rect::from_inches(3.5, 2.25, 1.0, 0.5), "C", BlockStyle::default()).unwrap();
        let detour = route_elbow(&s, s.connector(&c).unwrap(), &cfg).unwrap();
        assert!(!detour.fallback);
        assert_eq!(detour.bends, open.bends + 2);
        let inflated = Rect::from_inches(3.5, 2.25, 1.0, 0.5).inflate(cfg.clearance.0);
        for w in detour.waypoints.windows(2) {
            assert!(!segment_hits_interior(w[0], w[1], &inflated));
        }
    }

    #[test]
    fn walled_in_endpoint_falls_back() {
        let mut s = Scene::default();
        let a = s.add_block(Rect::from_inches(3.0, 3.0, 1.0, 1.0), "A", BlockStyle::default()).unwrap();
        let b = s.add_block(Rect::from_inches(8.0, 3.0, 1.0, 1.0), "B", BlockStyle::default()).unwrap();
        for (x, y, w, h) in [(2.4, 2.4, 2.2, 0.2), (2.4, 4.4, 2.2, 0.2), (2.4, 2.4, 0.2, 2.2), (4.4, 2.4, 0.2, 2.2)] {
            s.add_block(Rect::from_inches(x, y, w, h), "", BlockStyle::default()).unwrap();
        }
        let c = s.add_connector(&a, &b, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
        let p = route_elbow(&s, s.connector(&c).unwrap(), &RouterConfig::default()).unwrap();
        assert!(p.fallback);
        assert!(p.bends <= 2);
    }

    #[test]
    fn route_all_is_idempotent_and_local() {
        let mut s = Scene::default();
        let a = s.add_block(Rect::from_inches(1.0, 1.0, 1.0, 1.0), "A", BlockStyle::default()).unwrap();
        let b = s.add_block(Rect::from_inches(4.0, 1.0, 1.0, 1.0), "B", BlockStyle::default()).unwrap();
        let c = s.add_block(Rect::from_inches(1.0, 4.0, 1.0, 1.0), "C", BlockStyle::default()).unwrap();
        let d = s.add_block(Rect::from_inches(8.0, 5.0, 1.0, 1.0), "D", BlockStyle::default()).unwrap();
        s.add_connector(&a, &b, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
        s.add_connector(&a, &c, ConnectorKind::Elbow, ConnectorStyle::default()).unwrap();
        s.add_connector(&c, &d, ConnectorKind::Straight, ConnectorStyle::default()).unwrap();
        let cfg = RouterConfig::default();
        let r1 = route_all(&s, &cfg);
        assert_eq!(route_all(&r1, &cfg), r1);
        assert!(route_all(&Scene::default(), &cfg) == Scene::default());

        let mut moved = r1.clone();
        moved.node_mut(&d).unwrap().bbox = Rect::from_inches(8.0, 6.0, 1.0, 1.0);
        let r2 = route_all(&moved, &cfg);
        assert_eq!(r1.connectors[0], r2.connectors[0]);
        assert_eq!(r1.connectors[1], r2.connectors[1]);
        assert!(r2.connectors[2].routing.as_ref().unwrap().waypoints.is_empty());
    }

    #[test]
    fn overlapping_endpoints_degenerate_to_a_straight_segment() {
        let canvas = Rect::from_inches(0.0, 0.0, 10.0, 10.0);
        let a = Rect::from_inches(1.0, 1.0, 2.0, 2.0);
        let b = Rect::from_inches(2.0, 2.0, 2.0, 2.0);
        let (_, _, p) = route_boxes(&canvas, &a, &b, &[], &RouterConfig::default());
        assert_eq!(p.waypoints.len(), 2);
        assert!(!p.fallback);
    }

    #[test]
    fn compress_drops_collinear_points() {
        let pts = [Point::new(0, 0), Point::new(1, 0), Point::new(2, 0), Point::new(2, 3), Point::new(2, 5)];
        assert_eq!(compress(&pts), vec![Point::new(0, 0), Point::new(2, 0), Point::new(2, 5)]);
    }
}
