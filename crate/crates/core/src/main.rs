use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::exit;

use clap::{Parser, Subcommand, ValueEnum};

use llshom::forge::{
    cross_gadget, gen_general_h_girth, gen_general_h_pathfree, gen_k13, gen_k2loops, gen_nae_p3,
    gen_p4, CnfFormula, GadgetError, GadgetOutput,
};
use llshom::graph::{associated_bipartite, cycle_graph, graph_isomorphism, path_graph, Graph};
use llshom::instance::{detect_associated_base, lift_to_base, reduce_c4_to_p3, Instance};
use llshom::io;
use llshom::pattern::PatternGraph;
use llshom::solver::{solve_auto, solve_bruteforce, solve_poly, Answer, PolyOutcome, SolveOutcome};
use llshom::subexp::{solve_c4_with_stats, solve_p3_threads, SubexpStats};
use llshom::treewidth::decompose;
use llshom::verify::{verify_solution, Homomorphism};

#[derive(Parser)]
#[command(
    name = "llshom",
    version,
    about = "Solvers, reductions, verifiers, and instance generators for list locally surjective graph homomorphisms"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Auto,
    Brute,
    Poly,
    P3,
    C4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    K13,
    P4,
    K2loops,
    NaeP3,
    GeneralPath,
    GeneralGirth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Oracle,
    Gadgets,
    Structural,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide an instance, optionally writing a witness mapping.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Algorithm::Auto)]
        algorithm: Algorithm,
        /// Node limit for the brute-force search.
        #[arg(long)]
        budget: Option<u64>,
        /// Write the witness to this .lsm file on a yes answer.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Forbidden pattern for the structured solvers, e.g. "S(2,2,2)+P4".
        #[arg(long)]
        forbidden: Option<String>,
        /// Print branching and decomposition diagnostics.
        #[arg(long)]
        stats: bool,
        /// Write a PACE-style tree decomposition of the source graph.
        #[arg(long)]
        emit_td: Option<PathBuf>,
        /// Parallel branch exploration (default 1; also LLSHOM_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a solution file against an instance; exits 0/1.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Materialize a hardness construction from a DIMACS CNF formula.
    Generate {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        cnf: PathBuf,
        /// Target graph (.lsg) for the general generators.
        #[arg(long)]
        target: Option<PathBuf>,
        /// Girth/spacing parameter for nae-p3 and general-girth.
        #[arg(long)]
        p: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the vertex-role annotations as JSON-like text.
        #[arg(long)]
        annotations: Option<PathBuf>,
    },
    /// Instance-level reductions: C4 to two P3 instances, or the lift from
    /// an associated bipartite target to its base.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        /// Split a consistent C4 instance into two P3 instances
        /// (<output>.p3a.lsi and <output>.p3b.lsi).
        #[arg(long)]
        to_p3: bool,
        /// Lift a consistent instance over H x K2 to its base H.
        #[arg(long)]
        lift: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the built-in regression suites.
    Selftest {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
    },
}

fn fail(code: &str, msg: impl Display) -> ! {
    eprintln!("error: {code}: {msg}");
    exit(2)
}

fn read(path: &Path) -> String {
    match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => fail("io", format_args!("{}: {e}", path.display())),
    }
}

fn write_file(path: &Path, content: &str) {
    if let Err(e) = fs::write(path, content) {
        fail("io", format_args!("{}: {e}", path.display()));
    }
}

fn load_instance(path: &Path) -> Instance {
    match io::parse_lsi(&read(path)) {
        Ok(i) => i,
        Err(e) => fail("parse", format_args!("{}: {e}", path.display())),
    }
}

fn parse_pattern(spec: &Option<String>) -> PatternGraph {
    match spec {
        None => PatternGraph::path(1),
        Some(s) => match PatternGraph::parse(s) {
            Ok(p) => p,
            Err(e) => fail("pattern", e),
        },
    }
}

fn main() {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Solve {
            instance,
            algorithm,
            budget,
            witness,
            forbidden,
            stats,
            emit_td,
            threads,
        } => cmd_solve(
            &instance, algorithm, budget, witness, forbidden, stats, emit_td, threads,
        ),
        Cmd::Verify { instance, solution } => cmd_verify(&instance, &solution),
        Cmd::Generate {
            kind,
            cnf,
            target,
            p,
            output,
            annotations,
        } => cmd_generate(kind, &cnf, target, p, &output, annotations),
        Cmd::Reduce {
            instance,
            to_p3,
            lift,
            output,
        } => cmd_reduce(&instance, to_p3, lift, &output),
        Cmd::Selftest { suite, seed } => cmd_selftest(suite, seed),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    instance: &Path,
    algorithm: Algorithm,
    budget: Option<u64>,
    witness: Option<PathBuf>,
    forbidden: Option<String>,
    stats: bool,
    emit_td: Option<PathBuf>,
    threads: Option<usize>,
) {
    let inst = load_instance(instance);
    let threads = threads
        .or_else(|| {
            std::env::var("LLSHOM_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1);
    if let Some(td_path) = emit_td {
        let td = decompose(&inst.source);
        write_file(&td_path, &io::write_td(&td, inst.source.n()));
    }
    let pattern = parse_pattern(&forbidden);
    let mut sub_stats: Option<SubexpStats> = None;
    let answer: Option<Homomorphism> = match algorithm {
        Algorithm::Auto => match solve_auto(&inst) {
            Answer::Yes(h) => Some(h),
            Answer::No => None,
        },
        Algorithm::Brute => match solve_bruteforce(&inst, budget) {
            SolveOutcome::Yes(h) => Some(h),
            SolveOutcome::No => None,
            SolveOutcome::BudgetExceeded => {
                println!("s UNKNOWN");
                exit(2);
            }
        },
        Algorithm::Poly => match solve_poly(&inst) {
            PolyOutcome::Yes(h) => Some(h),
            PolyOutcome::No => None,
            PolyOutcome::NotApplicable => {
                fail("not-applicable", "target is none of K1, looped K1, K2")
            }
        },
        Algorithm::P3 => {
            let embed = graph_isomorphism(&path_graph(3), &inst.target)
                .unwrap_or_else(|| fail("target", "instance target is not a 3-vertex path"));
            let relabeled = inst.retarget(path_graph(3), &embed);
            match solve_p3_threads(&relabeled, &pattern, threads) {
                Ok((ans, st)) => {
                    sub_stats = Some(st);
                    match ans {
                        Answer::Yes(h) => {
                            Some(Homomorphism(h.0.iter().map(|&c| embed[c]).collect()))
                        }
                        Answer::No => None,
                    }
                }
                Err(e) => fail("target", e),
            }
        }
        Algorithm::C4 => {
            let embed = graph_isomorphism(&cycle_graph(4), &inst.target)
                .unwrap_or_else(|| fail("target", "instance target is not a 4-cycle"));
            let relabeled = inst.retarget(cycle_graph(4), &embed);
            match solve_c4_with_stats(&relabeled, &pattern) {
                Ok((ans, st)) => {
                    sub_stats = Some(st);
                    match ans {
                        Answer::Yes(h) => {
                            Some(Homomorphism(h.0.iter().map(|&c| embed[c]).collect()))
                        }
                        Answer::No => None,
                    }
                }
                Err(e) => fail("target", e),
            }
        }
    };
    if stats {
        if let Some(st) = sub_stats {
            println!(
                "c stats branchings={} nodes={} forest_guesses={} max_width={} yprime={}",
                st.branchings, st.nodes, st.forest_guesses, st.max_width, st.max_yprime
            );
        }
    }
    match answer {
        Some(h) => {
            debug_assert!(verify_solution(&inst, &h).is_ok());
            if let Some(path) = witness {
                write_file(&path, &io::write_lsm(&h));
            }
            println!("s YES");
        }
        None => println!("s NO"),
    }
}

fn cmd_verify(instance: &Path, solution: &Path) {
    let inst = load_instance(instance);
    let h = match io::parse_lsm(&read(solution), inst.source.n(), inst.target.n()) {
        Ok(h) => h,
        Err(e) => fail("parse", format_args!("{}: {e}", solution.display())),
    };
    match verify_solution(&inst, &h) {
        Ok(()) => {
            println!("s ACCEPT");
            exit(0);
        }
        Err(e) => {
            println!("s REJECT {e}");
            exit(1);
        }
    }
}

fn annotations_text(out: &GadgetOutput) -> String {
    let mut s = String::from("{\n");
    let entries: Vec<String> = out
        .annotations
        .iter()
        .map(|(k, v)| format!("  \"{k}\": {v}"))
        .collect();
    s.push_str(&entries.join(",\n"));
    s.push_str("\n}\n");
    s
}

fn cmd_generate(
    kind: GenKind,
    cnf: &Path,
    target: Option<PathBuf>,
    p: Option<usize>,
    output: &Path,
    annotations: Option<PathBuf>,
) {
    let formula: CnfFormula = match io::parse_dimacs(&read(cnf)) {
        Ok(f) => f,
        Err(e) => fail("parse", format_args!("{}: {e}", cnf.display())),
    };
    let load_target = || -> Graph {
        let path = target
            .as_ref()
            .unwrap_or_else(|| fail("usage", "this generator needs --target FILE.lsg"));
        match io::parse_lsg(&read(path)) {
            Ok(g) => g,
            Err(e) => fail("parse", format_args!("{}: {e}", path.display())),
        }
    };
    let out = match kind {
        GenKind::K13 => gen_k13(&formula),
        GenKind::P4 => gen_p4(&formula),
        GenKind::K2loops => gen_k2loops(&formula),
        GenKind::NaeP3 => match gen_nae_p3(&formula, p.unwrap_or(1)) {
            Ok(o) => o,
            Err(e) => fail("generate", e),
        },
        GenKind::GeneralPath => {
            let h = load_target();
            match gen_general_h_pathfree(&formula, &h) {
                Ok(o) => o,
                Err(GadgetError::NoQualifyingBase) => {
                    eprintln!(
                        "note: target has no induced base graph; generating for its associated bipartite graph instead"
                    );
                    let star = associated_bipartite(&h).graph;
                    match gen_general_h_pathfree(&formula, &star) {
                        Ok(o) => o,
                        Err(e) => fail("generate", e),
                    }
                }
                Err(e) => fail("generate", e),
            }
        }
        GenKind::GeneralGirth => {
            let h = load_target();
            let p = p.unwrap_or(h.n() * h.n());
            match gen_general_h_girth(&formula, &h, p) {
                Ok(o) => o,
                Err(e) => fail("generate", e),
            }
        }
    };
    write_file(output, &io::write_lsi(&out.instance));
    if let Some(path) = annotations {
        write_file(&path, &annotations_text(&out));
    }
    println!(
        "c generated {} vertices, {} edges",
        out.instance.source.n(),
        out.instance.source.m()
    );
}

fn cmd_reduce(instance: &Path, to_p3: bool, lift: bool, output: &Path) {
    if to_p3 == lift {
        fail("usage", "pass exactly one of --to-p3 or --lift");
    }
    let inst = load_instance(instance);
    if to_p3 {
        if inst.target != cycle_graph(4) {
            fail("target", "reduce --to-p3 expects the canonical 4-cycle target");
        }
        let red = match reduce_c4_to_p3(&inst) {
            Ok(r) => r,
            Err(e) => fail("reduce", e),
        };
        let stem = output.to_string_lossy();
        let a = PathBuf::from(format!("{stem}.p3a.lsi"));
        let b = PathBuf::from(format!("{stem}.p3b.lsi"));
        write_file(&a, &io::write_lsi(&red.first));
        write_file(&b, &io::write_lsi(&red.second));
        println!("c wrote {} and {}", a.display(), b.display());
        println!("c yes iff both reduce outputs are yes");
    } else {
        let found = detect_associated_base(&inst.target)
            .unwrap_or_else(|| fail("target", "target is not a recognizable H x K2"));
        let star = associated_bipartite(&found.base).graph;
        let mut embed = vec![usize::MAX; inst.target.n()];
        for (old, &std) in found.to_std.iter().enumerate() {
            embed[std] = old;
        }
        let std_inst = inst.retarget(star, &embed);
        let lifted = match lift_to_base(&std_inst, &found.base) {
            Ok(l) => l,
            Err(e) => fail("reduce", e),
        };
        write_file(output, &io::write_lsi(&lifted));
        println!("c wrote {}", output.display());
    }
}

// ------------------------------------------------------------- selftest ----

fn cmd_selftest(suite: Option<Suite>, seed: u64) {
    let run_all = suite.is_none();
    let mut failures = 0usize;
    if run_all || suite == Some(Suite::Oracle) {
        failures += selftest_oracle(seed);
    }
    if run_all || suite == Some(Suite::Gadgets) {
        failures += selftest_gadgets(seed);
    }
    if run_all || suite == Some(Suite::Structural) {
        failures += selftest_structural(seed);
    }
    if failures > 0 {
        eprintln!("error: selftest: {failures} check(s) failed");
        exit(2);
    }
    println!("s SELFTEST PASS");
}

fn check(name: &str, ok: bool, detail: impl Display) -> usize {
    if ok {
        println!("selftest {name}: ok ({detail})");
        0
    } else {
        println!("selftest {name}: FAIL ({detail})");
        1
    }
}

fn selftest_oracle(seed: u64) -> usize {
    use llshom::corpus;
    let mut failures = 0;
    let mut r = corpus::rng(seed);
    let p3 = path_graph(3);
    let mut agree = 0;
    let rounds = 300;
    for _ in 0..rounds {
        let n = 1 + rand::Rng::gen_range(&mut r, 0..9);
        let inst = corpus::random_instance(&p3, n, 0.35, &mut r);
        let expect = solve_bruteforce(&inst, None).is_yes();
        let got = llshom::subexp::solve_p3(&inst, &PatternGraph::path(1))
            .unwrap()
            .is_yes();
        if got == expect {
            agree += 1;
        }
    }
    failures += check("oracle.p3", agree == rounds, format_args!("{agree}/{rounds}"));

    let c4 = cycle_graph(4);
    let mut agree = 0;
    let rounds = 200;
    for _ in 0..rounds {
        let n = 2 + rand::Rng::gen_range(&mut r, 0..7);
        let inst = corpus::random_consistent_instance(&c4, n, 0.3, &mut r);
        let expect = solve_bruteforce(&inst, None).is_yes();
        let got = llshom::subexp::solve_c4(&inst, &PatternGraph::path(1))
            .unwrap()
            .is_yes();
        if got == expect {
            agree += 1;
        }
    }
    failures += check("oracle.c4", agree == rounds, format_args!("{agree}/{rounds}"));

    let mut agree = 0;
    let rounds = 200;
    let polys = [Graph::new(1), llshom::graph::k1_loop(), path_graph(2)];
    for i in 0..rounds {
        let t = &polys[i % polys.len()];
        let n = 1 + rand::Rng::gen_range(&mut r, 0..7);
        let inst = corpus::random_instance(t, n, 0.3, &mut r);
        let expect = solve_bruteforce(&inst, None).is_yes();
        let got = match solve_poly(&inst) {
            PolyOutcome::Yes(_) => true,
            PolyOutcome::No => false,
            PolyOutcome::NotApplicable => {
                failures += check("oracle.poly", false, "unexpected not-applicable");
                continue;
            }
        };
        if got == expect {
            agree += 1;
        }
    }
    failures += check("oracle.poly", agree == rounds, format_args!("{agree}/{rounds}"));

    let mut agree = 0;
    let rounds = 120;
    let targets = [
        path_graph(3),
        cycle_graph(4),
        llshom::graph::complete_graph(3),
        llshom::graph::k2_loops(),
        associated_bipartite(&llshom::graph::complete_graph(3)).graph,
    ];
    for i in 0..rounds {
        let t = &targets[i % targets.len()];
        let n = 1 + rand::Rng::gen_range(&mut r, 0..7);
        let inst = corpus::random_instance(t, n, 0.35, &mut r);
        let expect = solve_bruteforce(&inst, None).is_yes();
        if solve_auto(&inst).is_yes() == expect {
            agree += 1;
        }
    }
    failures += check("oracle.auto", agree == rounds, format_args!("{agree}/{rounds}"));
    failures
}

fn selftest_gadgets(seed: u64) -> usize {
    use llshom::forge::Lit;
    let mut failures = 0;
    let lit = |v: i64| Lit {
        var: v.unsigned_abs() as usize - 1,
        negated: v < 0,
    };
    let formulas: Vec<CnfFormula> = vec![
        CnfFormula::new(3, vec![[lit(1), lit(2), lit(3)]]),
        CnfFormula::new(1, vec![[lit(1), lit(1), lit(1)], [lit(-1), lit(-1), lit(-1)]]),
        CnfFormula::new(2, vec![[lit(1), lit(-2), lit(2)], [lit(-1), lit(2), lit(2)]]),
        CnfFormula::new(3, vec![[lit(1), lit(2), lit(2)], [lit(-3), lit(-3), lit(-1)]]),
    ];
    let _ = seed;
    let mut ok = true;
    for f in &formulas {
        let sat = f.is_satisfiable();
        ok &= solve_bruteforce(&gen_k13(f).instance, Some(20_000_000)).is_yes() == sat;
        ok &= solve_bruteforce(&gen_p4(f).instance, Some(20_000_000)).is_yes() == sat;
        ok &= solve_bruteforce(&gen_k2loops(f).instance, Some(20_000_000)).is_yes() == sat;
        let nae = f.is_nae_satisfiable();
        let out = gen_nae_p3(f, 1).unwrap();
        ok &= solve_bruteforce(&out.instance, Some(20_000_000)).is_yes() == nae;
    }
    failures += check(
        "gadgets.soundness",
        ok,
        format_args!("{} formulas x 4 generators", formulas.len()),
    );
    let cross_ok = cross_gadget(&path_graph(3), 0, 2).is_ok()
        && cross_gadget(&llshom::graph::complete_graph(3), 0, 1).is_ok();
    failures += check("gadgets.cross", cross_ok, "projection maps verified");
    failures
}

fn selftest_structural(seed: u64) -> usize {
    use llshom::corpus;
    let mut failures = 0;
    let mut r = corpus::rng(seed ^ 0x5117);
    let mut ok = true;
    for round in 0..20 {
        let f = corpus::random_formula(
            2 + rand::Rng::gen_range(&mut r, 0..4),
            1 + rand::Rng::gen_range(&mut r, 0..4),
            &mut r,
        );
        let k13 = gen_k13(&f);
        ok &= llshom::graph::find_induced_graph(
            &k13.instance.source,
            &PatternGraph::path(10).to_graph(),
        )
        .is_none();
        let p4 = gen_p4(&f);
        ok &= llshom::graph::find_induced_graph(
            &p4.instance.source,
            &PatternGraph::path(14).to_graph(),
        )
        .is_none();
        let k2 = gen_k2loops(&f);
        ok &= llshom::graph::find_induced_graph(
            &k2.instance.source,
            &PatternGraph::path(12).to_graph(),
        )
        .is_none();
        let p = 1 + round % 2;
        let nae = gen_nae_p3(&f, p).unwrap();
        let g = &nae.instance.source;
        ok &= g.max_degree() == 3
            && g.girth_at_least(p)
            && llshom::forge::degree3_spacing_at_least(g, p);
        // bit-exact file round trip
        let text = io::write_lsi(&nae.instance);
        ok &= io::parse_lsi(&text).map(|i| i == nae.instance).unwrap_or(false);
    }
    failures += check("structural.generators", ok, "20 random formulas");
    failures
}
