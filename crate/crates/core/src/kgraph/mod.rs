//! Finite higher-rank graphs given by a coloured 1-skeleton and square tables,
//! with morphisms stored in colour-ascending normal form.
//!
//! Composition convention: `λμ` is defined when `s(λ) = t(μ)`. An edge word
//! `e_1 e_2 … e_n` is composable when `s(e_k) = t(e_{k+1})`; its target is
//! `t(e_1)` and its source is `s(e_n)`.

pub mod catalog;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::shape::Shape;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("edge {edge:?} has colour {color}, outside 1..={rank}")]
    ColorOutOfRange {
        edge: String,
        color: usize,
        rank: usize,
    },
    #[error("not composable: source {left_source} of the left path differs from target {right_target} of the right path")]
    NotComposable {
        left_source: String,
        right_target: String,
    },
    #[error("shape {requested} is not below the path shape {available}")]
    ShapeNotBelow { requested: Shape, available: Shape },
    #[error("no square for the 2-path {0}.{1}")]
    MissingSquare(String, String),
    #[error("edge word breaks at position {0}")]
    BrokenWord(usize),
    #[error("shape {0} has the wrong rank")]
    RankMismatch(Shape),
    #[error("graph fails {check}: {witness}")]
    Invalid { check: String, witness: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: VertexId,
    pub target: VertexId,
    /// 0-based colour.
    pub color: usize,
}

/// A morphism in normal form. Vertices are paths of shape 0 with an empty
/// edge list.
///
/// Ordering is lexicographic on the normal-form edge word first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Path {
    edges: Vec<EdgeId>,
    target: VertexId,
    source: VertexId,
    shape: Shape,
}

impl Path {
    pub fn vertex(v: VertexId, rank: usize) -> Path {
        Path {
            edges: Vec::new(),
            target: v,
            source: v,
            shape: Shape::zero(rank),
        }
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_vertex(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// One named check of [`KGraph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCheck {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<GraphCheck>,
}

impl ValidationReport {
    /// Structural validity: every check except condition (F).
    pub fn is_valid(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.name != CONDITION_F)
            .all(|c| c.passed)
    }

    pub fn condition_f(&self) -> bool {
        self.check(CONDITION_F).is_some_and(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&GraphCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GraphCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// The first structural failure as an error.
    pub fn require_valid(&self) -> Result<(), GraphError> {
        match self.failures().find(|c| c.name != CONDITION_F) {
            None => Ok(()),
            Some(c) => Err(GraphError::Invalid {
                check: c.name.to_string(),
                witness: c.witness.clone().unwrap_or_default(),
            }),
        }
    }
}

pub const SQUARE_COLORS: &str = "squares.colors";
pub const SQUARE_ENDPOINTS: &str = "squares.endpoints";
pub const SQUARE_BIJECTIVE: &str = "squares.bijective";
pub const SQUARE_TOTAL: &str = "squares.total";
pub const CUBE: &str = "cube";
pub const CONDITION_F: &str = "condition_f";

/// Vertex and edge bijections between two graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMap {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone)]
pub struct KGraph {
    rank: usize,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    squares: Vec<[EdgeId; 4]>,
    swap: BTreeMap<(EdgeId, EdgeId), (EdgeId, EdgeId)>,
    collisions: Vec<String>,
    /// `into[v][j]`: edges of colour `j` with target `v`.
    into: Vec<Vec<Vec<EdgeId>>>,
    /// `out_of[v][j]`: edges of colour `j` with source `v`.
    out_of: Vec<Vec<Vec<EdgeId>>>,
}

impl PartialEq for KGraph {
    fn eq(&self, other: &Self) -> bool {
        let norm = |g: &KGraph| {
            g.squares
                .iter()
                .map(|&[a, b, c, d]| std::cmp::min([a, b, c, d], [c, d, a, b]))
                .collect::<BTreeSet<_>>()
        };
        self.rank == other.rank
            && self.vertices == other.vertices
            && self.edges == other.edges
            && norm(self) == norm(other)
    }
}

impl KGraph {
    /// Build from names. Edge tuples are `(name, source, target, colour)`
    /// with colours numbered from 1; a square `[a, b, c, d]` declares the
    /// 2-paths `ab` and `cd` equal.
    pub fn from_names(
        rank: usize,
        vertices: &[&str],
        edges: &[(&str, &str, &str, usize)],
        squares: &[[&str; 4]],
    ) -> Result<KGraph, GraphError> {
        if rank == 0 {
            return Err(GraphError::ZeroRank);
        }
        let mut vertex_ids = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_ids.insert(v.to_string(), i).is_some() {
                return Err(GraphError::DuplicateName(v.to_string()));
            }
        }
        let lookup_v = |name: &str| {
            vertex_ids
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
        };
        let mut edge_ids = BTreeMap::new();
        let mut edge_list = Vec::with_capacity(edges.len());
        for &(name, source, target, color) in edges {
            if color == 0 || color > rank {
                return Err(GraphError::ColorOutOfRange {
                    edge: name.to_string(),
                    color,
                    rank,
                });
            }
            if vertex_ids.contains_key(name)
                || edge_ids.insert(name.to_string(), edge_list.len()).is_some()
            {
                return Err(GraphError::DuplicateName(name.to_string()));
            }
            edge_list.push(Edge {
                name: name.to_string(),
                source: lookup_v(source)?,
                target: lookup_v(target)?,
                color: color - 1,
            });
        }
        let lookup_e = |name: &str| {
            edge_ids
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnknownEdge(name.to_string()))
        };
        let square_ids = squares
            .iter()
            .map(|sq| -> Result<[EdgeId; 4], GraphError> {
                Ok([
                    lookup_e(sq[0])?,
                    lookup_e(sq[1])?,
                    lookup_e(sq[2])?,
                    lookup_e(sq[3])?,
                ])
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_parts(
            rank,
            vertices.iter().map(|v| v.to_string()).collect(),
            edge_list,
            square_ids,
        ))
    }

    /// Build from already-resolved ids. Square defects are reported by
    /// [`KGraph::validate`], not here.
    pub fn from_parts(
        rank: usize,
        vertices: Vec<String>,
        edges: Vec<Edge>,
        squares: Vec<[EdgeId; 4]>,
    ) -> KGraph {
        let mut into = vec![vec![Vec::new(); rank]; vertices.len()];
        let mut out_of = vec![vec![Vec::new(); rank]; vertices.len()];
        for (id, e) in edges.iter().enumerate() {
            into[e.target][e.color].push(id);
            out_of[e.source][e.color].push(id);
        }
        let mut swap = BTreeMap::<(EdgeId, EdgeId), (EdgeId, EdgeId)>::new();
        let mut collisions = Vec::new();
        for &[a, b, c, d] in &squares {
            for (from, to) in [((a, b), (c, d)), ((c, d), (a, b))] {
                match swap.get(&from) {
                    Some(&existing) if existing != to => collisions.push(format!(
                        "{}.{} is matched with both {}.{} and {}.{}",
                        edges[from.0].name,
                        edges[from.1].name,
                        edges[existing.0].name,
                        edges[existing.1].name,
                        edges[to.0].name,
                        edges[to.1].name,
                    )),
                    Some(_) => {}
                    None => {
                        swap.insert(from, to);
                    }
                }
            }
        }
        KGraph {
            rank,
            vertices,
            edges,
            squares,
            swap,
            collisions,
            into,
            out_of,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn squares(&self) -> &[[EdgeId; 4]] {
        &self.squares
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    /// Edges of colour `j` (0-based) with target `v`.
    pub fn edges_into(&self, v: VertexId, j: usize) -> &[EdgeId] {
        &self.into[v][j]
    }

    /// Edges of colour `j` (0-based) with source `v`.
    pub fn edges_out_of(&self, v: VertexId, j: usize) -> &[EdgeId] {
        &self.out_of[v][j]
    }

    pub fn vertex_path(&self, v: VertexId) -> Path {
        Path::vertex(v, self.rank)
    }

    pub fn edge_path(&self, e: EdgeId) -> Path {
        let edge = &self.edges[e];
        Path {
            edges: vec![e],
            target: edge.target,
            source: edge.source,
            shape: Shape::unit(self.rank, edge.color),
        }
    }

    /// Human-readable form: the vertex name for shape 0, otherwise the edge
    /// names joined by `.`.
    pub fn fmt_path(&self, p: &Path) -> String {
        if p.is_vertex() {
            self.vertices[p.target].clone()
        } else {
            p.edges
                .iter()
                .map(|&e| self.edges[e].name.as_str())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Parse a path written as `.`-separated edge names or a single vertex
    /// name. The word need not be in normal form.
    pub fn parse_path(&self, text: &str) -> Result<Path, GraphError> {
        let text = text.trim();
        if let Some(v) = self.vertex_id(text) {
            return Ok(self.vertex_path(v));
        }
        let word = text
            .split('.')
            .map(|n| {
                self.edge_id(n.trim())
                    .ok_or_else(|| GraphError::UnknownEdge(n.trim().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.path_from_word(&word)
    }

    fn color(&self, e: EdgeId) -> usize {
        self.edges[e].color
    }

    fn check_word(&self, word: &[EdgeId]) -> Result<(), GraphError> {
        for (k, pair) in word.windows(2).enumerate() {
            if self.edges[pair[0]].source != self.edges[pair[1]].target {
                return Err(GraphError::BrokenWord(k));
            }
        }
        Ok(())
    }

    fn swap_at(&self, word: &mut [EdgeId], i: usize) -> Result<(), GraphError> {
        let (a, b) = (word[i], word[i + 1]);
        match self.swap.get(&(a, b)) {
            Some(&(c, d)) if self.color(c) == self.color(b) && self.color(d) == self.color(a) => {
                word[i] = c;
                word[i + 1] = d;
                Ok(())
            }
            _ => Err(GraphError::MissingSquare(
                self.edges[a].name.clone(),
                self.edges[b].name.clone(),
            )),
        }
    }

    /// Rewrite a composable word by square moves so that its colour sequence
    /// equals `pattern` (which must be a permutation of the word's colours).
    fn reorder(&self, mut word: Vec<EdgeId>, pattern: &[usize]) -> Result<Vec<EdgeId>, GraphError> {
        debug_assert_eq!(word.len(), pattern.len());
        for (p, &colour) in pattern.iter().enumerate() {
            let q = (p..word.len())
                .find(|&q| self.color(word[q]) == colour)
                .expect("pattern is a permutation of the word's colours");
            for i in (p..q).rev() {
                self.swap_at(&mut word, i)?;
            }
        }
        Ok(word)
    }

    fn pattern(shape: &Shape) -> Vec<usize> {
        shape
            .coords()
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| std::iter::repeat_n(j, c as usize))
            .collect()
    }

    fn word_shape(&self, word: &[EdgeId]) -> Shape {
        let mut counts = vec![0; self.rank];
        for &e in word {
            counts[self.color(e)] += 1;
        }
        Shape::new(counts)
    }

    /// Normalise a composable edge word into a [`Path`].
    pub fn path_from_word(&self, word: &[EdgeId]) -> Result<Path, GraphError> {
        if word.is_empty() {
            return Err(GraphError::BrokenWord(0));
        }
        self.check_word(word)?;
        let shape = self.word_shape(word);
        let target = self.edges[word[0]].target;
        let source = self.edges[word[word.len() - 1]].source;
        let edges = self.reorder(word.to_vec(), &Self::pattern(&shape))?;
        Ok(Path {
            edges,
            target,
            source,
            shape,
        })
    }

    /// `λμ`, defined when `s(λ) = t(μ)`.
    pub fn compose(&self, lambda: &Path, mu: &Path) -> Result<Path, GraphError> {
        if lambda.source != mu.target {
            return Err(GraphError::NotComposable {
                left_source: self.vertices[lambda.source].clone(),
                right_target: self.vertices[mu.target].clone(),
            });
        }
        if lambda.is_vertex() {
            return Ok(mu.clone());
        }
        if mu.is_vertex() {
            return Ok(lambda.clone());
        }
        let mut word = lambda.edges.clone();
        word.extend_from_slice(&mu.edges);
        let shape = &lambda.shape + &mu.shape;
        let edges = self.reorder(word, &Self::pattern(&shape))?;
        Ok(Path {
            edges,
            target: lambda.target,
            source: mu.source,
            shape,
        })
    }

    /// The unique `(head, tail)` with `σ(head) = k` and `head·tail = λ`.
    pub fn factorize(&self, lambda: &Path, k: &Shape) -> Result<(Path, Path), GraphError> {
        if k.rank() != self.rank {
            return Err(GraphError::RankMismatch(k.clone()));
        }
        let rest = lambda
            .shape
            .checked_sub(k)
            .ok_or_else(|| GraphError::ShapeNotBelow {
                requested: k.clone(),
                available: lambda.shape.clone(),
            })?;
        if k.is_zero() {
            return Ok((self.vertex_path(lambda.target), lambda.clone()));
        }
        if rest.is_zero() {
            return Ok((lambda.clone(), self.vertex_path(lambda.source)));
        }
        let mut pattern = Self::pattern(k);
        pattern.extend(Self::pattern(&rest));
        let word = self.reorder(lambda.edges.clone(), &pattern)?;
        let cut = k.total() as usize;
        let middle = self.edges[word[cut - 1]].source;
        Ok((
            Path {
                edges: word[..cut].to_vec(),
                target: lambda.target,
                source: middle,
                shape: k.clone(),
            },
            Path {
                edges: word[cut..].to_vec(),
                target: middle,
                source: lambda.source,
                shape: rest,
            },
        ))
    }

    /// The segment `λ(n, n')` for `n ≤ n' ≤ σ(λ)`.
    pub fn segment(&self, lambda: &Path, from: &Shape, to: &Shape) -> Result<Path, GraphError> {
        let (head, _) = self.factorize(lambda, to)?;
        let (_, tail) = self.factorize(&head, from)?;
        Ok(tail)
    }

    /// All morphisms of shape `n`, optionally constrained by source and
    /// target, in lexicographic order of their normal forms.
    pub fn enumerate(
        &self,
        n: &Shape,
        source: Option<VertexId>,
        target: Option<VertexId>,
    ) -> Vec<Path> {
        let starts: Vec<VertexId> = match target {
            Some(t) => vec![t],
            None => (0..self.vertices.len()).collect(),
        };
        if n.is_zero() {
            return starts
                .into_iter()
                .filter(|&v| source.is_none_or(|s| s == v))
                .map(|v| self.vertex_path(v))
                .collect();
        }
        let pattern = Self::pattern(n);
        let mut out = Vec::new();
        let mut word = Vec::with_capacity(pattern.len());
        for t in starts {
            self.extend_words(&pattern, t, &mut word, &mut |w, s| {
                if source.is_none_or(|want| want == s) {
                    out.push(Path {
                        edges: w.to_vec(),
                        target: t,
                        source: s,
                        shape: n.clone(),
                    });
                }
            });
        }
        out.sort();
        out
    }

    fn extend_words(
        &self,
        pattern: &[usize],
        at: VertexId,
        word: &mut Vec<EdgeId>,
        emit: &mut dyn FnMut(&[EdgeId], VertexId),
    ) {
        if word.len() == pattern.len() {
            emit(word, at);
            return;
        }
        for &e in &self.into[at][pattern[word.len()]] {
            word.push(e);
            self.extend_words(pattern, self.edges[e].source, word, emit);
            word.pop();
        }
    }

    /// All morphisms with shape `≤ bound`, grouped by shape in lexicographic
    /// shape order.
    pub fn paths_up_to(&self, bound: &Shape) -> Vec<Path> {
        bound
            .below()
            .flat_map(|n| self.enumerate(&n, None, None))
            .collect()
    }

    pub fn morphism_count(&self, bound: &Shape) -> usize {
        bound
            .below()
            .map(|n| self.enumerate(&n, None, None).len())
            .sum()
    }

    /// Every normal form reachable from `word` by inversion-reducing square
    /// moves, in any order. A single element means the rewriting is confluent
    /// on this word.
    pub fn normal_forms_all_orders(
        &self,
        word: &[EdgeId],
    ) -> Result<BTreeSet<Vec<EdgeId>>, GraphError> {
        self.check_word(word)?;
        let mut seen = BTreeSet::new();
        let mut found = BTreeSet::new();
        let mut stack = vec![word.to_vec()];
        while let Some(w) = stack.pop() {
            if !seen.insert(w.clone()) {
                continue;
            }
            let mut terminal = true;
            for i in 0..w.len().saturating_sub(1) {
                if self.color(w[i]) > self.color(w[i + 1]) {
                    terminal = false;
                    let mut next = w.clone();
                    self.swap_at(&mut next, i)?;
                    stack.push(next);
                }
            }
            if terminal {
                found.insert(w);
            }
        }
        Ok(found)
    }

    /// All composable edge words of the given length (any colours).
    pub fn composable_words(&self, len: usize) -> Vec<Vec<EdgeId>> {
        let mut words: Vec<Vec<EdgeId>> = (0..self.edges.len()).map(|e| vec![e]).collect();
        for _ in 1..len {
            words = words
                .into_iter()
                .flat_map(|w| {
                    let s = self.edges[*w.last().unwrap()].source;
                    self.into[s]
                        .iter()
                        .flatten()
                        .map(move |&e| {
                            let mut next = w.clone();
                            next.push(e);
                            next
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        if len == 0 {
            words.clear();
        }
        words
    }

    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let name = |e: EdgeId| self.edges[e].name.as_str();

        let bad_colors = self.squares.iter().find(|&&[a, b, c, d]| {
            !(self.color(a) == self.color(d)
                && self.color(b) == self.color(c)
                && self.color(a) != self.color(b))
        });
        checks.push(GraphCheck {
            name: SQUARE_COLORS,
            passed: bad_colors.is_none(),
            witness: bad_colors
                .map(|&[a, b, c, d]| format!("[{},{},{},{}]", name(a), name(b), name(c), name(d))),
        });

        let bad_ends = self.squares.iter().find(|&&[a, b, c, d]| {
            let (ea, eb, ec, ed) = (
                &self.edges[a],
                &self.edges[b],
                &self.edges[c],
                &self.edges[d],
            );
            !(ea.source == eb.target
                && ec.source == ed.target
                && ea.target == ec.target
                && eb.source == ed.source)
        });
        checks.push(GraphCheck {
            name: SQUARE_ENDPOINTS,
            passed: bad_ends.is_none(),
            witness: bad_ends
                .map(|&[a, b, c, d]| format!("[{},{},{},{}]", name(a), name(b), name(c), name(d))),
        });

        checks.push(GraphCheck {
            name: SQUARE_BIJECTIVE,
            passed: self.collisions.is_empty(),
            witness: self.collisions.first().cloned(),
        });

        let missing = self.composable_words(2).into_iter().find(|w| {
            self.color(w[0]) != self.color(w[1]) && !self.swap.contains_key(&(w[0], w[1]))
        });
        checks.push(GraphCheck {
            name: SQUARE_TOTAL,
            passed: missing.is_none(),
            witness: missing.map(|w| format!("{}.{}", name(w[0]), name(w[1]))),
        });

        if self.rank >= 3 {
            let mut witness = None;
            for w in self.composable_words(3) {
                let colors: BTreeSet<_> = w.iter().map(|&e| self.color(e)).collect();
                if colors.len() != 3 {
                    continue;
                }
                match self.normal_forms_all_orders(&w) {
                    Ok(forms) if forms.len() == 1 => {}
                    Ok(forms) => {
                        witness = Some(format!(
                            "{} normalises to {}",
                            w.iter().map(|&e| name(e)).collect::<Vec<_>>().join("."),
                            forms
                                .iter()
                                .map(|f| f.iter().map(|&e| name(e)).collect::<Vec<_>>().join("."))
                                .collect::<Vec<_>>()
                                .join(" and ")
                        ));
                        break;
                    }
                    Err(e) => {
                        witness = Some(e.to_string());
                        break;
                    }
                }
            }
            checks.push(GraphCheck {
                name: CUBE,
                passed: witness.is_none(),
                witness,
            });
        }

        let mut witness = None;
        'outer: for v in 0..self.vertices.len() {
            for j in 0..self.rank {
                if self.into[v][j].is_empty() {
                    witness = Some(format!(
                        "no colour-{} edge has target {}",
                        j + 1,
                        self.vertices[v]
                    ));
                    break 'outer;
                }
                if self.out_of[v][j].is_empty() {
                    witness = Some(format!(
                        "no colour-{} edge has source {}",
                        j + 1,
                        self.vertices[v]
                    ));
                    break 'outer;
                }
            }
        }
        checks.push(GraphCheck {
            name: CONDITION_F,
            passed: witness.is_none(),
            witness,
        });

        ValidationReport { checks }
    }

    /// The graph with arrows reversed. Edge and vertex ids are preserved; a
    /// square `ab = cd` becomes `ba = dc`.
    pub fn opposite(&self) -> KGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                name: e.name.clone(),
                source: e.target,
                target: e.source,
                color: e.color,
            })
            .collect();
        let squares = self
            .squares
            .iter()
            .map(|&[a, b, c, d]| [b, a, d, c])
            .collect();
        KGraph::from_parts(self.rank, self.vertices.clone(), edges, squares)
    }

    /// The image in the opposite graph of a path of this graph.
    pub fn opposite_path(&self, p: &Path) -> Result<Path, GraphError> {
        if p.is_vertex() {
            return Ok(p.clone());
        }
        let word: Vec<EdgeId> = p.edges.iter().rev().copied().collect();
        let op = Path {
            edges: word,
            target: p.source,
            source: p.target,
            shape: p.shape.clone(),
        };
        // Renormalise with this graph's swaps transported to the opposite.
        let mut word = op.edges.clone();
        let pattern = Self::pattern(&op.shape);
        for (q, &colour) in pattern.iter().enumerate() {
            let r = (q..word.len())
                .find(|&r| self.color(word[r]) == colour)
                .expect("same colours");
            for i in (q..r).rev() {
                // In the opposite graph (x, y) swaps to (d, c) when yx = cd here.
                let (x, y) = (word[i], word[i + 1]);
                let (c, d) = *self.swap.get(&(y, x)).ok_or_else(|| {
                    GraphError::MissingSquare(
                        self.edges[y].name.clone(),
                        self.edges[x].name.clone(),
                    )
                })?;
                word[i] = d;
                word[i + 1] = c;
            }
        }
        Ok(Path { edges: word, ..op })
    }

    /// Check that `map` is an isomorphism from `self` onto `other`: bijective
    /// on vertices and edges, preserving source, target, colour and squares.
    pub fn check_isomorphism(&self, other: &KGraph, map: &GraphMap) -> Result<(), String> {
        if self.rank != other.rank {
            return Err("ranks differ".into());
        }
        let bijective = |m: &[usize], n: usize| {
            m.len() == n
                && m.iter().copied().collect::<BTreeSet<_>>().len() == n
                && m.iter().all(|&x| x < n)
        };
        if self.vertices.len() != other.vertices.len()
            || !bijective(&map.vertices, other.vertices.len())
        {
            return Err("vertex map is not a bijection".into());
        }
        if self.edges.len() != other.edges.len() || !bijective(&map.edges, other.edges.len()) {
            return Err("edge map is not a bijection".into());
        }
        for (id, e) in self.edges.iter().enumerate() {
            let f = &other.edges[map.edges[id]];
            if f.color != e.color
                || f.source != map.vertices[e.source]
                || f.target != map.vertices[e.target]
            {
                return Err(format!("edge {} is not preserved", e.name));
            }
        }
        for (&(a, b), &(c, d)) in &self.swap {
            let image = other.swap.get(&(map.edges[a], map.edges[b]));
            if image != Some(&(map.edges[c], map.edges[d])) {
                return Err(format!(
                    "square {}.{} = {}.{} is not preserved",
                    self.edges[a].name, self.edges[b].name, self.edges[c].name, self.edges[d].name
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for KGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rank-{} graph with {} vertices, {} edges, {} squares",
            self.rank,
            self.vertices.len(),
            self.edges.len(),
            self.squares.len()
        )
    }
}
