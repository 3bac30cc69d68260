//! TOML fixture files: a graph, a system, suite selections and options.

use std::ops::Range;
use std::path::Path as FsPath;
use std::sync::Arc;

use kgw_core::dynsys::builders::{
    boundary_subsystem, free_monoid_system, grid_system, identity_system, path_space_system,
    product_system, random_product_system, PathPoint, Word,
};
use kgw_core::dynsys::Mgds;
use kgw_core::kgraph::{catalog, KGraph};
use kgw_core::rational::RationalPath;
use kgw_core::shape::Shape;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

/// Errors that stop a run before any check executes.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{origin}:{line}:{col}: {message}")]
    Parse {
        origin: String,
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureFile {
    name: Option<String>,
    seed: Option<u64>,
    bound: Option<Spanned<String>>,
    #[serde(default)]
    suites: Vec<Spanned<String>>,
    graph: Option<Spanned<GraphSpec>>,
    system: Option<Spanned<SystemSpec>>,
    #[serde(default)]
    fock: FockOptions,
    #[serde(default)]
    groupoid: GroupoidOptions,
    #[serde(default)]
    ideals: IdealsOptions,
    #[serde(default)]
    duality: DualityOptions,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSpec {
    catalog: Option<String>,
    shape: Option<String>,
    rank: Option<usize>,
    vertices: Option<Vec<String>>,
    edges: Option<Vec<EdgeSpec>>,
    #[serde(default)]
    squares: Vec<[String; 4]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeSpec {
    name: String,
    source: String,
    target: String,
    /// Colours are numbered from 1.
    colour: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalSpec {
    #[serde(default)]
    prefix: Option<String>,
    cycle: String,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SystemSpec {
    Grid {
        rank: usize,
        side: u32,
    },
    Identity {
        points: u32,
        rank: usize,
    },
    FreeMonoid {
        alphabet: String,
        max_len: usize,
    },
    PathSpace {
        cap: String,
        #[serde(default)]
        infinite: Vec<RationalSpec>,
    },
    Boundary {
        cap: String,
        #[serde(default)]
        infinite: Vec<RationalSpec>,
    },
    /// Partial functions on `{0, …, n−1}` per coordinate; `-1` leaves a
    /// point outside the domain.
    Product {
        factors: Vec<Vec<i64>>,
    },
    RandomProduct {
        rank: usize,
    },
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockOptions {
    pub relations: Option<Vec<String>>,
    #[serde(default)]
    pub diagonal: bool,
    /// Largest cube bound for the diagonal growth reports.
    pub diagonal_bound: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroupoidOptions {
    pub samples: usize,
    pub theta_bound: Option<String>,
}

impl Default for GroupoidOptions {
    fn default() -> Self {
        GroupoidOptions {
            samples: 100,
            theta_bound: None,
        }
    }
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealsOptions {
    /// `[points, rank]` for an exhaustive sweep over abstract tuples.
    pub exhaustive: Option<[u32; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DualityOptions {
    /// Largest finite part of the seed points; `(1, …, 1)` by default.
    pub seeds: Option<String>,
    pub depth: usize,
    pub samples: usize,
    /// Cocycle bound for the fibre checks; `(2, …, 2)` by default.
    pub fiber_bound: Option<String>,
    /// Check the fibre over every `fiber_stride`-th seed.
    pub fiber_stride: usize,
    pub two_sided: usize,
}

impl Default for DualityOptions {
    fn default() -> Self {
        DualityOptions {
            seeds: None,
            depth: 3,
            samples: 1000,
            fiber_bound: None,
            fiber_stride: 7,
            two_sided: 100,
        }
    }
}

/// A dynamical system of any of the supported point types.
pub enum AnySystem {
    Lattice(Mgds<Shape>),
    Points(Mgds<u32>),
    Words(Mgds<Word>),
    Paths(Mgds<PathPoint>),
}

impl AnySystem {
    pub fn rank(&self) -> usize {
        match self {
            AnySystem::Lattice(s) => s.rank(),
            AnySystem::Points(s) => s.rank(),
            AnySystem::Words(s) => s.rank(),
            AnySystem::Paths(s) => s.rank(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            AnySystem::Lattice(s) => s.name(),
            AnySystem::Points(s) => s.name(),
            AnySystem::Words(s) => s.name(),
            AnySystem::Paths(s) => s.name(),
        }
    }
}

/// A fixture with its graph and system built.
pub struct Fixture {
    pub origin: String,
    pub name: String,
    pub seed: u64,
    pub bound: Option<Shape>,
    pub suites: Vec<String>,
    pub graph: Option<Arc<KGraph>>,
    pub system: Option<AnySystem>,
    pub fock: FockOptions,
    pub groupoid: GroupoidOptions,
    pub ideals: IdealsOptions,
    pub duality: DualityOptions,
}

pub const SUITES: [&str; 7] = [
    "validate",
    "counterexample",
    "fock",
    "groupoid",
    "ideals",
    "duality",
    "amenability",
];

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

struct Source<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn error(&self, span: Range<usize>, message: impl Into<String>) -> InputError {
        let (line, col) = line_col(self.text, span.start);
        InputError::Parse {
            origin: self.origin.to_string(),
            line,
            col,
            message: message.into(),
        }
    }
}

pub fn parse_shape(text: &str) -> Result<Shape, String> {
    text.parse::<Shape>()
        .map_err(|e| format!("invalid shape {text:?}: {e}"))
}

impl Fixture {
    pub fn load(path: &FsPath) -> Result<Fixture, InputError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: origin.clone(),
            source,
        })?;
        Fixture::parse(&text, &origin)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Fixture, InputError> {
        let src = Source { origin, text };
        let file: FixtureFile = toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            src.error(e.span().unwrap_or(0..0), message)
        })?;
        let seed = file.seed.unwrap_or(0);
        let bound = file
            .bound
            .as_ref()
            .map(|b| parse_shape(b.get_ref()).map_err(|m| src.error(b.span(), m)))
            .transpose()?;
        let mut suites = Vec::new();
        for s in &file.suites {
            if !SUITES.contains(&s.get_ref().as_str()) {
                return Err(src.error(
                    s.span(),
                    format!(
                        "unknown suite {:?}; expected one of {}",
                        s.get_ref(),
                        SUITES.join(", ")
                    ),
                ));
            }
            suites.push(s.get_ref().clone());
        }
        let graph = file
            .graph
            .as_ref()
            .map(|g| {
                build_graph(g.get_ref())
                    .map(Arc::new)
                    .map_err(|m| src.error(g.span(), m))
            })
            .transpose()?;
        let system = file
            .system
            .as_ref()
            .map(|s| {
                build_system(s.get_ref(), graph.as_ref(), seed).map_err(|m| src.error(s.span(), m))
            })
            .transpose()?;
        Ok(Fixture {
            origin: origin.to_string(),
            name: file.name.unwrap_or_else(|| origin.to_string()),
            seed,
            bound,
            suites,
            graph,
            system,
            fock: file.fock,
            groupoid: file.groupoid,
            ideals: file.ideals,
            duality: file.duality,
        })
    }
}

fn build_graph(spec: &GraphSpec) -> Result<KGraph, String> {
    if let Some(name) = &spec.catalog {
        if spec.vertices.is_some() || spec.edges.is_some() || !spec.squares.is_empty() {
            return Err("a catalog graph takes no vertices, edges or squares".into());
        }
        let g = match name.as_str() {
            "grid" => {
                let shape = spec
                    .shape
                    .as_deref()
                    .ok_or("the grid graph needs `shape`")?;
                catalog::grid(&parse_shape(shape)?)
            }
            "plane" => catalog::single_vertex(spec.rank.unwrap_or(2)),
            "flip" => catalog::flip(),
            "cycle" => catalog::cycle_rank1(),
            other => {
                return Err(format!(
                    "unknown catalog graph {other:?}; expected grid, plane, flip or cycle"
                ))
            }
        };
        if let Some(r) = spec.rank {
            if r != g.rank() {
                return Err(format!(
                    "catalog graph {name:?} has rank {}, not {r}",
                    g.rank()
                ));
            }
        }
        return Ok(g);
    }
    if spec.shape.is_some() {
        return Err("`shape` only applies to the catalog grid".into());
    }
    let rank = spec.rank.ok_or("an explicit graph needs `rank`")?;
    let vertices = spec
        .vertices
        .as_ref()
        .ok_or("an explicit graph needs `vertices`")?;
    let edges = spec
        .edges
        .as_ref()
        .ok_or("an explicit graph needs `edges`")?;
    let vertex_refs: Vec<&str> = vertices.iter().map(String::as_str).collect();
    let edge_refs: Vec<(&str, &str, &str, usize)> = edges
        .iter()
        .map(|e| {
            (
                e.name.as_str(),
                e.source.as_str(),
                e.target.as_str(),
                e.colour,
            )
        })
        .collect();
    let square_refs: Vec<[&str; 4]> = spec
        .squares
        .iter()
        .map(|[a, b, c, d]| [a.as_str(), b.as_str(), c.as_str(), d.as_str()])
        .collect();
    KGraph::from_names(rank, &vertex_refs, &edge_refs, &square_refs).map_err(|e| e.to_string())
}

fn rationals(g: &KGraph, specs: &[RationalSpec]) -> Result<Vec<RationalPath>, String> {
    specs
        .iter()
        .map(|r| {
            let cycle = g.parse_path(&r.cycle).map_err(|e| e.to_string())?;
            match &r.prefix {
                Some(p) => {
                    let prefix = g.parse_path(p).map_err(|e| e.to_string())?;
                    RationalPath::new(g, prefix, cycle)
                }
                None => RationalPath::periodic(g, cycle),
            }
            .map_err(|e| e.to_string())
        })
        .collect()
}

fn build_system(
    spec: &SystemSpec,
    graph: Option<&Arc<KGraph>>,
    seed: u64,
) -> Result<AnySystem, String> {
    let need_graph = || {
        graph
            .cloned()
            .ok_or_else(|| "this system kind needs a [graph] section".to_string())
    };
    Ok(match spec {
        SystemSpec::Grid { rank, side } => {
            if *rank == 0 || *side == 0 {
                return Err("grid rank and side must be positive".into());
            }
            AnySystem::Lattice(grid_system(*rank, *side))
        }
        SystemSpec::Identity { points, rank } => {
            if *rank == 0 {
                return Err("identity rank must be positive".into());
            }
            AnySystem::Points(identity_system(*points, *rank))
        }
        SystemSpec::FreeMonoid { alphabet, max_len } => {
            let letters: Vec<char> = alphabet.chars().collect();
            let mut sorted = letters.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if letters.is_empty() || sorted.len() != letters.len() {
                return Err("the alphabet must be nonempty with distinct letters".into());
            }
            AnySystem::Words(free_monoid_system(&letters, *max_len))
        }
        SystemSpec::PathSpace { cap, infinite } | SystemSpec::Boundary { cap, infinite } => {
            let g = need_graph()?;
            let cap = parse_shape(cap)?;
            if cap.rank() != g.rank() {
                return Err(format!(
                    "cap {cap} does not have the graph's rank {}",
                    g.rank()
                ));
            }
            let xs = rationals(&g, infinite)?;
            let sys = if matches!(spec, SystemSpec::Boundary { .. }) {
                boundary_subsystem(g, &cap, &xs)
            } else {
                path_space_system(g, &cap, &xs)
            };
            AnySystem::Paths(sys.map_err(|e| e.to_string())?)
        }
        SystemSpec::Product { factors } => {
            if factors.is_empty() {
                return Err("a product system needs at least one factor".into());
            }
            let mut tables = Vec::new();
            for (j, f) in factors.iter().enumerate() {
                let n = f.len() as i64;
                let table = f
                    .iter()
                    .map(|&v| match v {
                        -1 => Ok(None),
                        v if (0..n).contains(&v) => Ok(Some(v as u32)),
                        v => Err(format!("factor {} maps to {v}, outside 0..{n}", j + 1)),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                tables.push(table);
            }
            AnySystem::Lattice(product_system(tables))
        }
        SystemSpec::RandomProduct { rank } => {
            if *rank == 0 {
                return Err("random product rank must be positive".into());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            AnySystem::Lattice(random_product_system(&mut rng, *rank))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Fixture, InputError> {
        Fixture::parse(text, "t.toml")
    }

    fn position(e: InputError) -> (usize, usize, String) {
        match e {
            InputError::Parse {
                line, col, message, ..
            } => (line, col, message),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let (line, col, msg) = position(parse("seed = 1\nsede = 2\n").err().unwrap());
        assert_eq!((line, col), (2, 1));
        assert!(msg.contains("sede"), "{msg}");
        let (line, _, msg) = position(
            parse("[system]\nkind = \"grid\"\nrank = 2\nside = 4\nsides = 3\n")
                .err()
                .unwrap(),
        );
        assert!(msg.contains("sides"), "{msg}");
        assert!(line >= 1);
    }

    #[test]
    fn semantic_errors_point_at_the_section() {
        let text = "seed = 1\n\n[graph]\ncatalog = \"grid\"\n";
        let (line, _, msg) = position(parse(text).err().unwrap());
        assert_eq!(line, 3);
        assert!(msg.contains("shape"), "{msg}");
    }

    #[test]
    fn explicit_graph() {
        let text = r#"
[graph]
rank = 2
vertices = ["v"]
edges = [
  { name = "f1", source = "v", target = "v", colour = 1 },
  { name = "f2", source = "v", target = "v", colour = 2 },
]
squares = [["f1", "f2", "f2", "f1"]]
"#;
        let f = parse(text).unwrap();
        assert_eq!(f.graph.unwrap().edges().len(), 2);
    }

    #[test]
    fn systems_of_each_kind() {
        let cases = [
            ("kind = \"grid\"\nrank = 2\nside = 4", 2),
            ("kind = \"identity\"\npoints = 2\nrank = 1", 1),
            ("kind = \"free_monoid\"\nalphabet = \"ab\"\nmax_len = 3", 2),
            ("kind = \"product\"\nfactors = [[1, -1], [0, 0, 2]]", 2),
            ("kind = \"random_product\"\nrank = 3", 3),
        ];
        for (body, rank) in cases {
            let f = parse(&format!("[system]\n{body}\n")).unwrap();
            assert_eq!(f.system.unwrap().rank(), rank, "{body}");
        }
        let paths = "[graph]\ncatalog = \"cycle\"\n[system]\nkind = \"path_space\"\ncap = \"2\"\ninfinite = [{ prefix = \"e\", cycle = \"f.e\" }]\n";
        assert!(matches!(
            parse(paths).unwrap().system,
            Some(AnySystem::Paths(_))
        ));
        let orphan = "[system]\nkind = \"boundary\"\ncap = \"1\"\n";
        assert!(position(parse(orphan).err().unwrap()).2.contains("[graph]"));
    }

    #[test]
    fn unknown_suite() {
        let (line, col, _) = position(parse("suites = [\"validate\", \"fok\"]\n").err().unwrap());
        assert_eq!((line, col), (1, 23));
    }
}
