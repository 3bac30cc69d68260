//! The check suites. Each suite turns a fixture into a list of checks in a
//! fixed order.

use std::sync::Arc;
use std::time::Instant;

use kgw_core::diagonal::{full_algebra_growth, range_len_growth, ProjectionFamily};
use kgw_core::duality::{check_theta, TwoSided, ZSpace};
use kgw_core::dynsys::{subsets, Mgds, Point};
use kgw_core::fock::{verify_family, FAMILIES};
use kgw_core::groupoid::convolution::{convolve, i_norm, pushforward, random_element};
use kgw_core::groupoid::skeleton::{amenability_skeleton, exit_time_y_sets};
use kgw_core::groupoid::{
    build_semidirect, check_essentially_free, germ_quotient, Arrow, Semidirect,
};
use kgw_core::ideals::{build_sequence, exhaustive_exactness, from_mgds, verify_exactness};
use kgw_core::kgraph::{KGraph, CONDITION_F};
use kgw_core::rational::random_rational;
use kgw_core::shape::Shape;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fixture::{parse_shape, AnySystem, Fixture, InputError};
use crate::report::{Check, Record};

/// Command-line overrides applied on top of the fixture.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub bound: Option<Shape>,
    pub relations: Option<Vec<String>>,
    pub diagonal: bool,
}

struct Ctx<'a> {
    fx: &'a Fixture,
    ov: &'a Overrides,
}

fn usage(msg: impl Into<String>) -> InputError {
    InputError::Usage(msg.into())
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.ov.seed.unwrap_or(self.fx.seed)
    }

    fn explicit_bound(&self, rank: usize) -> Result<Option<Shape>, InputError> {
        match self.ov.bound.as_ref().or(self.fx.bound.as_ref()) {
            Some(b) if b.rank() != rank => {
                Err(usage(format!("bound {b} does not have rank {rank}")))
            }
            other => Ok(other.cloned()),
        }
    }

    fn graph(&self, suite: &str) -> Result<&Arc<KGraph>, InputError> {
        self.fx.graph.as_ref().ok_or_else(|| {
            usage(format!(
                "the {suite} suite needs a [graph] section in {}",
                self.fx.origin
            ))
        })
    }

    fn system(&self, suite: &str) -> Result<&AnySystem, InputError> {
        self.fx.system.as_ref().ok_or_else(|| {
            usage(format!(
                "the {suite} suite needs a [system] section in {}",
                self.fx.origin
            ))
        })
    }

    fn graph_bound(&self, g: &KGraph) -> Result<Shape, InputError> {
        Ok(self
            .explicit_bound(g.rank())?
            .unwrap_or_else(|| Shape::splat(g.rank(), 2)))
    }

    fn system_bound<P: Point>(&self, sys: &Mgds<P>) -> Result<Shape, InputError> {
        Ok(self
            .explicit_bound(sys.rank())?
            .unwrap_or_else(|| sys.default_bound(3)))
    }

    fn option_shape(
        &self,
        text: Option<&str>,
        rank: usize,
        fill: u32,
    ) -> Result<Shape, InputError> {
        match text {
            None => Ok(Shape::splat(rank, fill)),
            Some(t) => {
                let s = parse_shape(t).map_err(usage)?;
                if s.rank() != rank {
                    return Err(usage(format!("shape {s} does not have rank {rank}")));
                }
                Ok(s)
            }
        }
    }
}

fn timed(f: impl FnOnce() -> Check) -> Check {
    let start = Instant::now();
    let mut c = f();
    c.elapsed = Some(start.elapsed());
    c
}

fn arrow<P: Point>(sys: &Mgds<P>, a: &Arrow<P>) -> String {
    format!(
        "({}, {}, {})",
        sys.label(&a.range),
        a.z,
        sys.label(&a.source)
    )
}

macro_rules! on_system {
    ($sys:expr, $f:ident ( $($arg:expr),* )) => {
        match $sys {
            AnySystem::Lattice(s) => $f(s, $($arg),*),
            AnySystem::Points(s) => $f(s, $($arg),*),
            AnySystem::Words(s) => $f(s, $($arg),*),
            AnySystem::Paths(s) => $f(s, $($arg),*),
        }
    };
}

/// Run one suite of the fixture.
pub fn run_suite(name: &str, fx: &Fixture, ov: &Overrides) -> Result<Vec<Check>, InputError> {
    let ctx = Ctx { fx, ov };
    match name {
        "validate" => validate(&ctx),
        "fock" => fock(&ctx),
        "duality" => duality(&ctx),
        "counterexample" => on_system!(ctx.system(name)?, counterexample(&ctx)),
        "groupoid" => on_system!(ctx.system(name)?, groupoid(&ctx)),
        "amenability" => on_system!(ctx.system(name)?, amenability(&ctx)),
        "ideals" => ideals(&ctx),
        other => Err(usage(format!("unknown suite {other:?}"))),
    }
}

fn validate(ctx: &Ctx) -> Result<Vec<Check>, InputError> {
    let g = ctx.graph("validate")?;
    let bound = ctx.graph_bound(g)?;
    let start = Instant::now();
    let report = g.validate();
    let mut checks = Vec::new();
    for c in &report.checks {
        let mut check = if c.name == CONDITION_F {
            Check::info(format!("validate.{}", c.name)).field("holds", c.passed)
        } else {
            Check::status_of(format!("validate.{}", c.name), c.passed)
        };
        if let Some(w) = &c.witness {
            check = check.witness(Record::new("defect").field("detail", w));
        }
        checks.push(check);
    }
    let mut summary = Check::status_of("validate.graph", report.is_valid())
        .field("rank", g.rank())
        .field("vertices", g.vertex_count())
        .field("edges", g.edges().len())
        .field("squares", g.squares().len())
        .field("bound", &bound)
        .field("morphisms", g.morphism_count(&bound));
    summary.elapsed = Some(start.elapsed());
    checks.push(summary);
    Ok(checks)
}

fn growth_text(growth: &[(u32, Option<u32>)]) -> String {
    growth
        .iter()
        .map(|(b, m)| format!("{b}:{}", m.map_or("-".to_string(), |m| m.to_string())))
        .collect::<Vec<_>>()
        .join(",")
}

fn fock(ctx: &Ctx) -> Result<Vec<Check>, InputError> {
    let g = ctx.graph("fock")?;
    let bound = ctx.graph_bound(g)?;
    let families: Vec<String> = ctx
        .ov
        .relations
        .clone()
        .or_else(|| ctx.fx.fock.relations.clone())
        .unwrap_or_else(|| FAMILIES.iter().map(|f| f.to_string()).collect());
    if let Some(bad) = families.iter().find(|f| !FAMILIES.contains(&f.as_str())) {
        return Err(usage(format!(
            "unknown relation family {bad:?}; expected one of {}",
            FAMILIES.join(", ")
        )));
    }
    let mut checks = Vec::new();
    for family in &families {
        checks.push(timed(|| match verify_family(g, family, &bound) {
            Err(e) => Check::fail(format!("fock.{family}")).field("reason", e),
            Ok(report) => {
                let mut c =
                    Check::status_of(format!("fock.{family}"), report.counterexamples.is_empty())
                        .field("bound", &bound)
                        .field("instances", report.instances)
                        .field("evaluations", report.evaluations)
                        .field("defects", report.counterexamples.len());
                for ce in report.counterexamples.iter().take(3) {
                    c = c.witness(
                        Record::new("counterexample")
                            .field("relation", &ce.relation)
                            .field("vector", ce.vector.display(g))
                            .field("lhs", ce.lhs.display(g))
                            .field("rhs", ce.rhs.display(g)),
                    );
                }
                c
            }
        }));
    }
    if ctx.ov.diagonal || ctx.fx.fock.diagonal {
        let max = ctx.fx.fock.diagonal_bound.unwrap_or(3);
        let r = g.rank();
        for j in 0..r {
            checks.push(timed(|| {
                let growth = range_len_growth(g, ProjectionFamily::Twisted(j), max);
                Check::info(format!("fock.diagonal.twisted.c{}", j + 1))
                    .field("growth", growth_text(&growth))
            }));
        }
        for a in 0..r {
            for b in 0..r {
                checks.push(timed(|| {
                    let growth = range_len_growth(g, ProjectionFamily::Swapped(a, b), max);
                    Check::info(format!("fock.diagonal.swapped.c{}c{}", a + 1, b + 1))
                        .field("growth", growth_text(&growth))
                }));
            }
        }
        checks.push(timed(|| {
            let growth = full_algebra_growth(g, 4, max);
            Check::info("fock.diagonal.full")
                .field("word_len", 4)
                .field("growth", growth_text(&growth))
        }));
    }
    Ok(checks)
}

fn counterexample<P: Point>(sys: &Mgds<P>, ctx: &Ctx) -> Result<Vec<Check>, InputError> {
    let bound = ctx.system_bound(sys)?;
    let dc = timed(|| match sys.check_dc(&bound) {
        Ok(()) => Check::fail("counterexample.dc")
            .field("bound", &bound)
            .field("reason", "the domain condition holds up to the bound"),
        Err(w) => Check::pass("counterexample.dc")
            .field("bound", &bound)
            .witness(
                Record::new("dc")
                    .field("x", sys.label(&w.x))
                    .field("n", &w.n)
                    .field("m", &w.m)
                    .field("join", w.n.join(&w.m)),
            ),
    });
    let composite = timed(|| {
        let semi = match build_semidirect(sys, &bound, true) {
            Ok(s) => s,
            Err(e) => return Check::fail("counterexample.composite").field("reason", e),
        };
        let search = bound.scale(2);
        let g = semi.groupoid();
        let missing: Vec<_> = g
            .closure_failures()
            .into_iter()
            .filter(|(_, _, c)| semi.find_witness(c, &search).is_none())
            .collect();
        // Prefer the shape of the free-monoid example: η ends at a point no
        // generator moves and has nonnegative translation, and γ joins two
        // points that can still move.
        let stuck = |p: &P| {
            sys.exit_time_unchecked(p)
                .to_finite()
                .is_some_and(|t| t.is_zero())
        };
        let eta_shaped = |j: usize| {
            let eta = g.arrow(j);
            stuck(&eta.source) && eta.z.coords().iter().all(|&c| c >= 0)
        };
        let gamma_shaped = |i: usize| !stuck(&g.arrow(i).range) && !stuck(&g.arrow(i).source);
        // Ties go to the lexicographically largest translations, which puts
        // η's movement in the first coordinate.
        let key =
            |(i, j, _): &&(usize, usize, Arrow<P>)| (g.arrow(*j).z.clone(), g.arrow(*i).z.clone());
        let preferred = missing
            .iter()
            .filter(|(i, j, _)| eta_shaped(*j) && gamma_shaped(*i))
            .max_by_key(key)
            .or_else(|| {
                missing
                    .iter()
                    .filter(|(_, j, _)| eta_shaped(*j))
                    .max_by_key(key)
            })
            .or(missing.first());
        let c = Check::status_of("counterexample.composite", preferred.is_some())
            .field("bound", &bound)
            .field("search", &search)
            .field("pairs", missing.len());
        match preferred {
            Some((i, j, comp)) => c.witness(
                Record::new("pair")
                    .field("gamma", arrow(sys, g.arrow(*i)))
                    .field("eta", arrow(sys, g.arrow(*j)))
                    .field("composite", arrow(sys, comp)),
            ),
            None => c.field("reason", "every composite has a witness"),
        }
    });
    Ok(vec![dc, composite])
}

fn build<P: Point>(id: &str, sys: &Mgds<P>, bound: &Shape) -> Result<Semidirect<P>, Check> {
    build_semidirect(sys, bound, false)
        .map_err(|e| Check::fail(id).field("bound", bound).field("reason", e))
}

fn groupoid<P: Point>(sys: &Mgds<P>, ctx: &Ctx) -> Result<Vec<Check>, InputError> {
    let bound = ctx.system_bound(sys)?;
    let theta_bound = ctx.option_shape(ctx.fx.groupoid.theta_bound.as_deref(), sys.rank(), 1)?;
    let start = Instant::now();
    let semi = match build("groupoid.build", sys, &bound) {
        Ok(s) => s,
        Err(c) => return Ok(vec![c]),
    };
    let g = semi.groupoid();
    let mut built = Check::pass("groupoid.build")
        .field("system", sys.name())
        .field("bound", &bound)
        .field("units", g.units().len())
        .field("elements", g.len());
    built.elapsed = Some(start.elapsed());
    let mut checks = vec![built];

    checks.push(timed(|| match semi.check_axioms() {
        Ok(st) => Check::pass("groupoid.axioms")
            .field("elements", st.elements)
            .field("composable_pairs", st.composable_pairs)
            .field("composable_triples", st.composable_triples)
            .field("outside", st.outside),
        Err(e) => Check::fail("groupoid.axioms").witness(Record::new("axiom").field("failure", e)),
    }));

    let free = check_essentially_free(sys, &bound);
    let free_twice = check_essentially_free(sys, &bound.scale(2));
    let mut c = Check::info("groupoid.essential_freeness")
        .field("free", free.is_ok())
        .field("free_at_double_bound", free_twice.is_ok());
    if let Err(w) = &free {
        c = c.witness(
            Record::new("agreement")
                .field("x", sys.label(&w.x))
                .field("n", &w.n)
                .field("m", &w.m),
        );
    }
    checks.push(c);

    checks.push(timed(|| {
        let q = germ_quotient(g);
        let injective = q.is_injective();
        let hom = q.check_homomorphism(g);
        let lifting = q.check_lifting(g);
        let consistent = free.is_ok() == free_twice.is_ok();
        let ok = consistent
            && injective == free.is_ok()
            && hom.is_ok()
            && lifting.is_ok()
            && q.is_surjective();
        let mut c = Check::status_of("groupoid.germ_map", ok)
            .field("germs", q.germs.len())
            .field("injective", injective)
            .field("surjective", q.is_surjective())
            .field("homomorphism", hom.is_ok())
            .field("lifting", lifting.is_ok());
        if !consistent {
            c = c.field(
                "reason",
                "freeness changes between the bound and its double",
            );
        }
        if let Some((a, b)) = q.injectivity_failure() {
            c = c.witness(
                Record::new("same_germ")
                    .field("first", arrow(sys, g.arrow(a)))
                    .field("second", arrow(sys, g.arrow(b))),
            );
        }
        c
    }));

    let samples = ctx.fx.groupoid.samples;
    let seed = ctx.seed();
    checks.push(timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..samples {
            let f = random_element(&mut rng, g, 6);
            let h = random_element(&mut rng, g, 6);
            let law =
                if pushforward(&convolve(&f, &h)) != convolve(&pushforward(&f), &pushforward(&h)) {
                    Some("multiplicativity")
                } else if i_norm(&pushforward(&f)) > i_norm(&f) {
                    Some("norm bound")
                } else {
                    None
                };
            if let Some(law) = law {
                return Check::fail("groupoid.pushforward")
                    .field("samples", samples)
                    .witness(
                        Record::new("sample")
                            .field("index", k)
                            .field("law", law)
                            .field("seed", seed),
                    );
            }
        }
        Check::pass("groupoid.pushforward")
            .field("samples", samples)
            .field("seed", seed)
    }));

    checks.push(timed(|| match check_theta(g, &theta_bound) {
        Ok(pairs) => Check::pass("groupoid.theta")
            .field("t_bound", &theta_bound)
            .field("pairs", pairs),
        Err(e) => Check::fail("groupoid.theta")
            .field("t_bound", &theta_bound)
            .witness(Record::new("theta").field("failure", e)),
    }));
    Ok(checks)
}

fn ideals(ctx: &Ctx) -> Result<Vec<Check>, InputError> {
    let mut checks = match (&ctx.fx.system, ctx.fx.ideals.exhaustive) {
        (Some(sys), _) => on_system!(sys, system_ideals(ctx))?,
        (None, Some(_)) => Vec::new(),
        (None, None) => {
            return Err(usage(
                "the ideals suite needs a [system] section or ideals.exhaustive",
            ))
        }
    };
    if let Some([points, rank]) = ctx.fx.ideals.exhaustive {
        checks.push(timed(|| {
            match exhaustive_exactness(points, rank as usize) {
                Ok(n) => Check::pass("ideals.exhaustive")
                    .field("max_points", points)
                    .field("max_rank", rank)
                    .field("tuples", n),
                Err((t, e)) => Check::fail("ideals.exhaustive").witness(
                    Record::new("tuple")
                        .field("base", format!("{:?}", t.base()))
                        .field("ideals", format!("{:?}", t.ideals()))
                        .field("check", e.check)
                        .field("point", e.point),
                ),
            }
        }));
    }
    Ok(checks)
}

fn system_ideals<P: Point>(sys: &Mgds<P>, ctx: &Ctx) -> Result<Vec<Check>, InputError> {
    let bound = ctx.system_bound(sys)?;
    let tuple = from_mgds(sys);
    let stages = build_sequence(&tuple);
    let sizes = stages
        .iter()
        .map(|s| s.support.len().to_string())
        .collect::<Vec<_>>()
        .join(",");
    let exact = timed(|| {
        let c = Check::pass("ideals.exactness")
            .field("points", tuple.base().len())
            .field("rank", tuple.len())
            .field("stage_sizes", &sizes);
        match verify_exactness(tuple.base(), &stages) {
            Ok(()) => c,
            Err(e) => c.failing().witness(
                Record::new("exactness")
                    .field("check", e.check)
                    .field("point", sys.label(&e.point)),
            ),
        }
    });
    let agree = timed(|| {
        let semi = match build("ideals.groupoid_agreement", sys, &bound) {
            Ok(s) => s,
            Err(c) => return c,
        };
        match exit_time_y_sets(&semi) {
            Err(a) => Check::fail("ideals.groupoid_agreement")
                .witness(Record::new("leaves_ideal").field("arrow", arrow(sys, &a))),
            Ok(ys) => {
                let same = ys.len() == stages.len()
                    && ys.iter().zip(&stages).all(|(y, s)| *y == s.support);
                let mut c =
                    Check::status_of("ideals.groupoid_agreement", same).field("bound", &bound);
                if let Some(k) = ys.iter().zip(&stages).position(|(y, s)| *y != s.support) {
                    c = c.witness(Record::new("stage").field("index", k));
                }
                c
            }
        }
    });
    Ok(vec![exact, agree])
}

fn amenability<P: Point>(sys: &Mgds<P>, ctx: &Ctx) -> Result<Vec<Check>, InputError> {
    let bound = ctx.system_bound(sys)?;
    let semi = match build("amenability.build", sys, &bound) {
        Ok(s) => s,
        Err(c) => return Ok(vec![c]),
    };
    Ok(subsets(sys.rank())
        .into_iter()
        .map(|j| {
            let label: Vec<String> = j.iter().map(|k| (k + 1).to_string()).collect();
            let id = format!("amenability.J[{}]", label.join(","));
            timed(|| match amenability_skeleton(&semi, &j) {
                Ok(sk) => Check::pass(id)
                    .field("points", sk.points.len())
                    .field("restricted", sk.restricted_len)
                    .field("relation", sk.relation.len())
                    .field("levels", sk.levels.len()),
                Err(e) => Check::fail(id).witness(Record::new("skeleton").field("failure", e)),
            })
        })
        .collect())
}

fn duality(ctx: &Ctx) -> Result<Vec<Check>, InputError> {
    let g = ctx.graph("duality")?;
    let opts = &ctx.fx.duality;
    let r = g.rank();
    let max_x = ctx.option_shape(opts.seeds.as_deref(), r, 1)?;
    let fb = ctx.option_shape(opts.fiber_bound.as_deref(), r, 2)?;
    let sp = ZSpace::new(KGraph::clone(g));
    let seeds = sp.seeds(&max_x);
    if seeds.is_empty() {
        return Ok(vec![Check::info("duality.system")
            .field("points", 0)
            .field(
                "reason",
                "no cycle of shape (1,…,1), so no rational points",
            )]);
    }
    let mut checks = Vec::new();
    let sys = sp.system(&seeds, opts.depth);
    let dc_bound = Shape::splat(2 * r, 2);
    checks.push(timed(|| {
        let c = Check::pass("duality.system")
            .field("seeds", seeds.len())
            .field("depth", opts.depth)
            .field("points", sys.carrier().len())
            .field("dc_bound", &dc_bound);
        if let Err(w) = sys.check_commuting() {
            return c.failing().witness(
                Record::new("commutation")
                    .field("i", w.i + 1)
                    .field("j", w.j + 1)
                    .field("x", sys.label(&w.x)),
            );
        }
        match sys.check_dc(&dc_bound) {
            Ok(()) => c,
            Err(w) => c.failing().witness(
                Record::new("dc")
                    .field("x", sys.label(&w.x))
                    .field("n", &w.n)
                    .field("m", &w.m),
            ),
        }
    }));

    let seed = ctx.seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    checks.push(timed(|| {
        let c = Check::pass("duality.equivariance")
            .field("samples", opts.samples)
            .field("bound", &fb);
        for _ in 0..opts.samples {
            let Some(z) = sp.random_point(&mut rng, &max_x) else {
                return Check::fail("duality.equivariance").field("reason", "no sample point");
            };
            if let Err((generator, m)) = sp.check_equivariance(&z, &fb) {
                return c.failing().witness(
                    Record::new("equivariance")
                        .field("generator", generator)
                        .field("shift", m)
                        .field("point", sp.display(&z)),
                );
            }
        }
        c
    }));

    checks.push(timed(|| {
        let stride = opts.fiber_stride.max(1);
        let (mut fibres, mut lifts) = (0, 0);
        for z in seeds.iter().step_by(stride) {
            match sp.verify_fiber(z, &fb) {
                Ok(report) => {
                    fibres += 1;
                    lifts += report.base_elements;
                }
                Err(e) => {
                    return Check::fail("duality.fibers")
                        .field("cocycle_bound", &fb)
                        .witness(
                            Record::new("fiber")
                                .field("point", sp.display(z))
                                .field("failure", e),
                        )
                }
            }
        }
        Check::pass("duality.fibers")
            .field("cocycle_bound", &fb)
            .field("fibers", fibres)
            .field("lifts", lifts)
    }));

    checks.push(timed(|| {
        let ts = TwoSided::new(KGraph::clone(g));
        let id = "duality.two_sided";
        let fail = |p: String, why: String| {
            Check::fail(id).witness(
                Record::new("two_sided")
                    .field("point", p)
                    .field("failure", why),
            )
        };
        for _ in 0..opts.two_sided {
            let x = random_rational(ts.graph(), &mut rng, &fb, &fb, 64);
            let y = random_rational(ts.opposite(), &mut rng, &fb, &fb, 64);
            let (Some(x), Some(y)) = (x, y) else {
                return Check::fail(id).field("reason", "no sample point");
            };
            let p = match ts.point(x, y) {
                Ok(p) => p,
                Err(e) => return Check::fail(id).field("reason", e),
            };
            let shown = ts.display(&p);
            let mut shifted = Vec::new();
            for k in 0..r {
                let round = ts
                    .shift(k, &p)
                    .and_then(|q| Ok((ts.unshift(k, &q)? == p, ts.check_bisection(k, &p)?, q)));
                match round {
                    Ok((true, true, q)) => shifted.push(q),
                    Ok(_) => return fail(shown, format!("w_{} is not a bisection here", k + 1)),
                    Err(e) => return fail(shown, e.to_string()),
                }
            }
            for a in 0..r {
                for b in a + 1..r {
                    let ab = ts.shift(a, &shifted[b]);
                    let ba = ts.shift(b, &shifted[a]);
                    match (ab, ba) {
                        (Ok(ab), Ok(ba)) if ab == ba => {}
                        _ => {
                            return fail(
                                shown,
                                format!("w_{} and w_{} do not commute", a + 1, b + 1),
                            )
                        }
                    }
                }
            }
        }
        Check::pass(id)
            .field("samples", opts.two_sided)
            .field("seed", seed)
    }));
    Ok(checks)
}
