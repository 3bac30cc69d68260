//! Small graphs used as fixtures throughout the workbench.

use super::{Edge, EdgeId, GraphMap, KGraph};
use crate::shape::Shape;

fn vertex_label(n: &Shape) -> String {
    format!("({n})")
}

/// The grid graph `N^r_m`: vertices `n ≤ m`, one colour-`j` edge from
/// `n + e_j` to `n` for every admissible `n`. Morphisms are the pairs
/// `(n, n')` with `n ≤ n' ≤ m`, the path from `n'` down to `n`.
pub fn grid(m: &Shape) -> KGraph {
    let rank = m.rank();
    let points: Vec<Shape> = m.below().collect();
    let index = |n: &Shape| points.iter().position(|p| p == n).expect("vertex in box");
    let mut edges = Vec::new();
    let mut edge_at = std::collections::BTreeMap::new();
    for n in &points {
        for j in 0..rank {
            let up = n + &Shape::unit(rank, j);
            if up.le(m) {
                edge_at.insert((n.clone(), j), edges.len());
                edges.push(Edge {
                    name: format!(
                        "g{}_{}",
                        j + 1,
                        n.coords()
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join("")
                    ),
                    source: index(&up),
                    target: index(n),
                    color: j,
                });
            }
        }
    }
    let mut squares = Vec::new();
    for n in &points {
        for i in 0..rank {
            for j in i + 1..rank {
                let ei = Shape::unit(rank, i);
                let ej = Shape::unit(rank, j);
                if !(&(n + &ei) + &ej).le(m) {
                    continue;
                }
                let a = edge_at[&(n.clone(), i)];
                let b = edge_at[&(n + &ei, j)];
                let c = edge_at[&(n.clone(), j)];
                let d = edge_at[&(n + &ej, i)];
                squares.push([a, b, c, d]);
            }
        }
    }
    KGraph::from_parts(
        rank,
        points.iter().map(vertex_label).collect(),
        edges,
        squares,
    )
}

/// Vertex id of `n` in [`grid`]`(m)`.
pub fn grid_vertex(g: &KGraph, n: &Shape) -> usize {
    g.vertex_id(&vertex_label(n)).expect("grid vertex")
}

/// The reversal isomorphism `n ↦ m − n` from the opposite of `grid(m)` onto
/// `grid(m)`.
pub fn grid_reversal(m: &Shape) -> GraphMap {
    let g = grid(m);
    let vertices = m
        .below()
        .map(|n| grid_vertex(&g, &m.checked_sub(&n).expect("n ≤ m")))
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            // Opposite edge runs from t(e) to s(e); its image runs from
            // m − t(e) down to m − s(e).
            let src = grid_vertex(
                &g,
                &m.checked_sub(&parse_label(g.vertex_name(e.target)))
                    .unwrap(),
            );
            let tgt = grid_vertex(
                &g,
                &m.checked_sub(&parse_label(g.vertex_name(e.source)))
                    .unwrap(),
            );
            g.edges()
                .iter()
                .position(|f| f.source == src && f.target == tgt && f.color == e.color)
                .expect("reversed edge exists")
        })
        .collect();
    GraphMap { vertices, edges }
}

fn parse_label(label: &str) -> Shape {
    label.parse().expect("grid label")
}

/// One vertex and one loop per colour, so that the path category is `N^r`.
pub fn single_vertex(rank: usize) -> KGraph {
    let edges = (0..rank)
        .map(|j| Edge {
            name: format!("f{}", j + 1),
            source: 0,
            target: 0,
            color: j,
        })
        .collect();
    let mut squares = Vec::new();
    for i in 0..rank {
        for j in i + 1..rank {
            squares.push([i, j, j, i]);
        }
    }
    KGraph::from_parts(rank, vec!["v".into()], edges, squares)
}

/// One vertex, blue loops `b1, b2` (colour 1), red loops `r1, r2` (colour 2)
/// and the flip squares `r_i b_j = b_j r_{3-i}`: moving a red edge past a
/// blue one swaps its index.
pub fn flip() -> KGraph {
    let names = ["b1", "b2", "r1", "r2"];
    let edges = names
        .iter()
        .enumerate()
        .map(|(k, n)| Edge {
            name: n.to_string(),
            source: 0,
            target: 0,
            color: k / 2,
        })
        .collect();
    let (b, r): ([EdgeId; 2], [EdgeId; 2]) = ([0, 1], [2, 3]);
    let mut squares = Vec::new();
    for i in 0..2 {
        for bj in b {
            squares.push([r[i], bj, bj, r[1 - i]]);
        }
    }
    KGraph::from_parts(2, vec!["v".into()], edges, squares)
}

/// A rank-1 graph in which every vertex both receives and emits an edge:
/// `e: u → v`, `f: v → u`, `g: v → v` (written source → target).
pub fn cycle_rank1() -> KGraph {
    KGraph::from_names(
        1,
        &["u", "v"],
        &[("e", "u", "v", 1), ("f", "v", "u", 1), ("g", "v", "v", 1)],
        &[],
    )
    .expect("well-formed")
}
