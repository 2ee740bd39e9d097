//! Text formats: `.lsg` graphs, `.lsi` instances, `.lsm` solutions, DIMACS
//! CNF input, and the PACE-style tree decomposition dump.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::forge::{CnfFormula, Lit};
use crate::graph::Graph;
use crate::instance::{Instance, ListAssignment};
use crate::treewidth::TreeDecomposition;
use crate::verify::Homomorphism;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: vertex {v} out of range")]
    VertexRange { line: usize, v: usize },
    #[error("missing list for source vertex {0}")]
    MissingList(usize),
    #[error("unexpected end of file: {0}")]
    Truncated(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Lines of a file with comments (`c ...`) and blank lines skipped,
/// keeping 1-based line numbers.
fn content_lines(text: &str) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with("c ") && *l != "c")
        .collect()
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("bad {what} `{tok}`")))
}

// ---------------------------------------------------------------- .lsg ----

/// Parses the `.lsg` graph format: `p graph <n> <m>`, then exactly `m`
/// lines `e <u> <v>` (0-based, `u == v` is a loop). Duplicate edges are a
/// parse error.
pub fn parse_lsg(text: &str) -> Result<Graph, ParseError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter();
    let (ln, header) = it.next().ok_or_else(|| ParseError::Truncated("header".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "p" || toks[1] != "graph" {
        return Err(syntax(ln, "expected `p graph <n> <m>`"));
    }
    let n = parse_usize(ln, toks[2], "vertex count")?;
    let m = parse_usize(ln, toks[3], "edge count")?;
    let mut g = Graph::new(n);
    for _ in 0..m {
        let (ln, line) = it
            .next()
            .ok_or_else(|| ParseError::Truncated("edge line".into()))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "e" {
            return Err(syntax(ln, "expected `e <u> <v>`"));
        }
        let u = parse_usize(ln, toks[1], "vertex")?;
        let v = parse_usize(ln, toks[2], "vertex")?;
        if u >= n || v >= n {
            return Err(ParseError::VertexRange {
                line: ln,
                v: u.max(v),
            });
        }
        if !g.add_edge(u, v) {
            return Err(ParseError::DuplicateEdge { line: ln, u, v });
        }
    }
    if let Some((ln, _)) = it.next() {
        return Err(syntax(ln, "trailing content after declared edges"));
    }
    Ok(g)
}

pub fn write_lsg(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "p graph {} {}", g.n(), g.m()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}").unwrap();
    }
    out
}

// ---------------------------------------------------------------- .lsi ----

/// Parses the `.lsi` instance format: `p llshom <nH> <mH> <nG> <mG>`, then
/// `mH` target edge lines `h <u> <v>` (loops allowed), then `mG` source edge
/// lines `g <u> <v>` (loopless), then `nG` list lines `l <v> <k> <a...>`.
/// Every source vertex needs exactly one list line.
pub fn parse_lsi(text: &str) -> Result<Instance, ParseError> {
    let lines = content_lines(text);
    let mut it = lines.into_iter();
    let (ln, header) = it.next().ok_or_else(|| ParseError::Truncated("header".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 6 || toks[0] != "p" || toks[1] != "llshom" {
        return Err(syntax(ln, "expected `p llshom <nH> <mH> <nG> <mG>`"));
    }
    let nh = parse_usize(ln, toks[2], "target vertex count")?;
    let mh = parse_usize(ln, toks[3], "target edge count")?;
    let ng = parse_usize(ln, toks[4], "source vertex count")?;
    let mg = parse_usize(ln, toks[5], "source edge count")?;
    let mut target = Graph::new(nh);
    for _ in 0..mh {
        let (ln, line) = it
            .next()
            .ok_or_else(|| ParseError::Truncated("target edge".into()))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "h" {
            return Err(syntax(ln, "expected `h <u> <v>`"));
        }
        let u = parse_usize(ln, toks[1], "vertex")?;
        let v = parse_usize(ln, toks[2], "vertex")?;
        if u >= nh || v >= nh {
            return Err(ParseError::VertexRange {
                line: ln,
                v: u.max(v),
            });
        }
        if !target.add_edge(u, v) {
            return Err(ParseError::DuplicateEdge { line: ln, u, v });
        }
    }
    let mut source = Graph::new(ng);
    for _ in 0..mg {
        let (ln, line) = it
            .next()
            .ok_or_else(|| ParseError::Truncated("source edge".into()))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "g" {
            return Err(syntax(ln, "expected `g <u> <v>`"));
        }
        let u = parse_usize(ln, toks[1], "vertex")?;
        let v = parse_usize(ln, toks[2], "vertex")?;
        if u >= ng || v >= ng {
            return Err(ParseError::VertexRange {
                line: ln,
                v: u.max(v),
            });
        }
        if u == v {
            return Err(syntax(ln, "source edges must be loopless"));
        }
        if !source.add_edge(u, v) {
            return Err(ParseError::DuplicateEdge { line: ln, u, v });
        }
    }
    let mut lists: Vec<Option<BTreeSet<usize>>> = vec![None; ng];
    for _ in 0..ng {
        let (ln, line) = it
            .next()
            .ok_or_else(|| ParseError::Truncated("list line".into()))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 3 || toks[0] != "l" {
            return Err(syntax(ln, "expected `l <v> <k> <a1> ... <ak>`"));
        }
        let v = parse_usize(ln, toks[1], "vertex")?;
        if v >= ng {
            return Err(ParseError::VertexRange { line: ln, v });
        }
        let k = parse_usize(ln, toks[2], "list size")?;
        if toks.len() != 3 + k {
            return Err(syntax(ln, format!("list of size {k} with {} entries", toks.len() - 3)));
        }
        if lists[v].is_some() {
            return Err(syntax(ln, format!("vertex {v} has two list lines")));
        }
        let mut set = BTreeSet::new();
        for tok in &toks[3..] {
            let a = parse_usize(ln, tok, "target vertex")?;
            if a >= nh {
                return Err(ParseError::VertexRange { line: ln, v: a });
            }
            set.insert(a);
        }
        lists[v] = Some(set);
    }
    if let Some((ln, _)) = it.next() {
        return Err(syntax(ln, "trailing content after declared lists"));
    }
    let mut assignment = ListAssignment::empty(ng);
    for (v, entry) in lists.into_iter().enumerate() {
        match entry {
            Some(set) => assignment.set(v, set),
            None => return Err(ParseError::MissingList(v)),
        }
    }
    Instance::new(target, source, assignment)
        .map_err(|e| syntax(0, format!("inconsistent instance: {e}")))
}

pub fn write_lsi(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "p llshom {} {} {} {}",
        inst.target.n(),
        inst.target.m(),
        inst.source.n(),
        inst.source.m()
    )
    .unwrap();
    for (u, v) in inst.target.edges() {
        writeln!(out, "h {u} {v}").unwrap();
    }
    for (u, v) in inst.source.edges() {
        writeln!(out, "g {u} {v}").unwrap();
    }
    for v in 0..inst.source.n() {
        let list = inst.lists.get(v);
        write!(out, "l {v} {}", list.len()).unwrap();
        for a in list {
            write!(out, " {a}").unwrap();
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------- .lsm ----

/// Parses the `.lsm` solution format: `nG` lines `m <v> <a>`, one per source
/// vertex (any order, no duplicates).
pub fn parse_lsm(text: &str, n_source: usize, n_target: usize) -> Result<Homomorphism, ParseError> {
    let mut map: Vec<Option<usize>> = vec![None; n_source];
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "m" {
            return Err(syntax(ln, "expected `m <v> <a>`"));
        }
        let v = parse_usize(ln, toks[1], "vertex")?;
        let a = parse_usize(ln, toks[2], "target vertex")?;
        if v >= n_source {
            return Err(ParseError::VertexRange { line: ln, v });
        }
        if a >= n_target {
            return Err(ParseError::VertexRange { line: ln, v: a });
        }
        if map[v].is_some() {
            return Err(syntax(ln, format!("vertex {v} mapped twice")));
        }
        map[v] = Some(a);
    }
    let mut out = Vec::with_capacity(n_source);
    for (v, entry) in map.into_iter().enumerate() {
        out.push(entry.ok_or(ParseError::MissingList(v))?);
    }
    Ok(Homomorphism(out))
}

pub fn write_lsm(h: &Homomorphism) -> String {
    let mut out = String::new();
    for (v, a) in h.0.iter().enumerate() {
        writeln!(out, "m {v} {a}").unwrap();
    }
    out
}

// -------------------------------------------------------------- DIMACS ----

/// Parses DIMACS CNF: `p cnf <vars> <clauses>`, then clauses as signed
/// 1-based integers terminated by 0, possibly spanning lines. Every clause
/// must have exactly 3 literals.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut tokens: Vec<(usize, i64)> = Vec::new();
    for (ln, line) in content_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks[0] == "p" {
            if header.is_some() || toks.len() != 4 || toks[1] != "cnf" {
                return Err(syntax(ln, "expected a single `p cnf <vars> <clauses>` header"));
            }
            let vars = parse_usize(ln, toks[2], "variable count")?;
            let clauses = parse_usize(ln, toks[3], "clause count")?;
            header = Some((vars, clauses));
            continue;
        }
        if header.is_none() {
            return Err(syntax(ln, "clause data before the `p cnf` header"));
        }
        for tok in toks {
            let v: i64 = tok
                .parse()
                .map_err(|_| syntax(ln, format!("bad literal `{tok}`")))?;
            tokens.push((ln, v));
        }
    }
    let (vars, clause_count) =
        header.ok_or_else(|| ParseError::Truncated("`p cnf` header".into()))?;
    let mut clauses = Vec::with_capacity(clause_count);
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;
    for (ln, v) in tokens {
        last_line = ln;
        if v == 0 {
            if current.len() != 3 {
                return Err(syntax(
                    ln,
                    format!("clause has {} literals; exactly 3 required", current.len()),
                ));
            }
            clauses.push([current[0], current[1], current[2]]);
            current.clear();
            continue;
        }
        let var = v.unsigned_abs() as usize;
        if var == 0 || var > vars {
            return Err(syntax(ln, format!("literal {v} out of range")));
        }
        current.push(Lit {
            var: var - 1,
            negated: v < 0,
        });
    }
    if !current.is_empty() {
        return Err(syntax(last_line, "unterminated clause (missing 0)"));
    }
    if clauses.len() != clause_count {
        return Err(syntax(
            last_line,
            format!("declared {clause_count} clauses, found {}", clauses.len()),
        ));
    }
    Ok(CnfFormula::new(vars, clauses))
}

pub fn write_dimacs(f: &CnfFormula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", f.num_vars(), f.clauses().len()).unwrap();
    for clause in f.clauses() {
        for lit in clause {
            let v = lit.var as i64 + 1;
            write!(out, "{} ", if lit.negated { -v } else { v }).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

// ------------------------------------------------------------- PACE td ----

/// PACE-style decomposition text (1-based bag and vertex ids):
/// `s td <numBags> <width+1> <n>`, then `b <i> <v...>` lines, then tree
/// edges.
pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = String::new();
    writeln!(out, "s td {} {} {}", td.bags.len(), td.width() + 1, n).unwrap();
    for (i, bag) in td.bags.iter().enumerate() {
        write!(out, "b {}", i + 1).unwrap();
        for v in bag {
            write!(out, " {}", v + 1).unwrap();
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        writeln!(out, "{} {}", a + 1, b + 1).unwrap();
    }
    out
}
