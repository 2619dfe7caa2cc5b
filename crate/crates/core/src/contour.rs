//! Marching squares over a boolean field sampled at cell centres.
//!
//! Crossings are placed at edge midpoints. Saddle squares separate the two
//! `true` corners, so `true` regions are 4-connected. Polylines that reach the
//! grid border stay open; interior ones are closed (first point repeated).

use std::collections::HashMap;

use crate::geometry::Vec2;
use crate::grid::GridSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Edge {
    /// Between samples (i, j) and (i+1, j).
    H(usize, usize),
    /// Between samples (i, j) and (i, j+1).
    V(usize, usize),
}

fn midpoint(spec: &GridSpec, e: Edge) -> Vec2 {
    match e {
        Edge::H(i, j) => Vec2::new(0.5 * (spec.x(i) + spec.x(i + 1)), spec.y(j)),
        Edge::V(i, j) => Vec2::new(spec.x(i), 0.5 * (spec.y(j) + spec.y(j + 1))),
    }
}

fn segments(spec: &GridSpec, bits: &[bool]) -> Vec<(Edge, Edge)> {
    let at = |i: usize, j: usize| bits[spec.index(i, j)];
    let mut out = Vec::new();
    if spec.nx < 2 || spec.ny < 2 {
        return out;
    }
    for j in 0..spec.ny - 1 {
        for i in 0..spec.nx - 1 {
            let (a, b, c, d) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
            let bottom = Edge::H(i, j);
            let right = Edge::V(i + 1, j);
            let top = Edge::H(i, j + 1);
            let left = Edge::V(i, j);
            let mut crossing = Vec::with_capacity(4);
            if a != b {
                crossing.push(bottom);
            }
            if b != c {
                crossing.push(right);
            }
            if c != d {
                crossing.push(top);
            }
            if d != a {
                crossing.push(left);
            }
            match crossing.len() {
                2 => out.push((crossing[0], crossing[1])),
                4 => {
                    if a {
                        out.push((bottom, left));
                        out.push((top, right));
                    } else {
                        out.push((bottom, right));
                        out.push((top, left));
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// Boundary polylines of the `true` set.
pub fn boundary_polylines(spec: &GridSpec, bits: &[bool]) -> Vec<Vec<Vec2>> {
    let segs = segments(spec, bits);
    let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segs.iter().enumerate() {
        by_edge.entry(a).or_default().push(s);
        by_edge.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segs.len()];
    let mut lines = Vec::new();

    let walk = |start_seg: usize, start_edge: Edge, used: &mut Vec<bool>| -> Vec<Vec2> {
        let mut pts = vec![midpoint(spec, start_edge)];
        let mut seg = start_seg;
        let mut edge = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segs[seg];
            let next = if a == edge { b } else { a };
            pts.push(midpoint(spec, next));
            edge = next;
            match by_edge[&edge].iter().copied().find(|&s| !used[s]) {
                Some(s) => seg = s,
                None => break,
            }
        }
        pts
    };

    // Deterministic order: open chains first (edges with a single segment), scanned in segment order.
    for s in 0..segs.len() {
        if used[s] {
            continue;
        }
        let (a, b) = segs[s];
        if by_edge[&a].len() == 1 {
            lines.push(walk(s, a, &mut used));
        } else if by_edge[&b].len() == 1 {
            lines.push(walk(s, b, &mut used));
        }
    }
    for s in 0..segs.len() {
        if !used[s] {
            let a = segs[s].0;
            lines.push(walk(s, a, &mut used));
        }
    }
    lines
}
