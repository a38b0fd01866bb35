//! Test oracles and generators, kept independent of the code they check.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use kbshell_core::{CmpOp, Condition, Literal, Span};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const BOOL_PARAMS: [&str; 3] = ["a", "b", "c"];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// `true`, `false` and bare references to the three boolean parameters.
pub fn plain_atoms() -> Vec<Condition> {
    let mut atoms = vec![Condition::True, Condition::False];
    atoms.extend(BOOL_PARAMS.iter().map(|p| Condition::param(p)));
    atoms
}

/// `plain_atoms` plus comparisons of the parameters against boolean literals.
pub fn atoms_with_comparisons() -> Vec<Condition> {
    let mut atoms = plain_atoms();
    atoms.push(Condition::compare("a", CmpOp::Eq, Literal::Bool(true)));
    atoms.push(Condition::compare("b", CmpOp::Ne, Literal::Bool(true)));
    atoms.push(Condition::compare("c", CmpOp::Eq, Literal::Bool(false)));
    atoms
}

/// Every condition tree with at most `levels` levels built from `atoms`
/// (an atom alone is one level).
pub fn enumerate_conditions(atoms: &[Condition], levels: usize) -> Vec<Condition> {
    let mut all = atoms.to_vec();
    for _ in 1..levels {
        let prev = all.clone();
        let mut next = prev.clone();
        next.extend(prev.iter().map(|c| Condition::not(c.clone())));
        for l in &prev {
            for r in &prev {
                next.push(Condition::and(l.clone(), r.clone()));
                next.push(Condition::or(l.clone(), r.clone()));
            }
        }
        all = next;
    }
    all
}

/// All 8 complete assignments of the three boolean parameters.
pub fn all_assignments() -> Vec<HashMap<&'static str, bool>> {
    (0..8u8)
        .map(|bits| {
            BOOL_PARAMS
                .iter()
                .enumerate()
                .map(|(i, p)| (*p, bits & (1 << i) != 0))
                .collect()
        })
        .collect()
}

/// Plain recursive truth-table evaluation: both operands always evaluated,
/// no tri-state. Panics on anything but boolean parameters.
pub fn brute_force(cond: &Condition, env: &HashMap<&str, bool>) -> bool {
    match cond {
        Condition::True => true,
        Condition::False => false,
        Condition::Param(p) => env[p.value.as_str()],
        Condition::Compare { param, op, literal } => {
            let v = env[param.value.as_str()];
            let Literal::Bool(l) = literal.value else {
                panic!("oracle only handles boolean literals")
            };
            match op {
                CmpOp::Eq => v == l,
                CmpOp::Ne => v != l,
                _ => panic!("ordering on booleans"),
            }
        }
        Condition::Not(c) => !brute_force(c, env),
        Condition::And(l, r) => {
            let (x, y) = (brute_force(l, env), brute_force(r, env));
            x && y
        }
        Condition::Or(l, r) => {
            let (x, y) = (brute_force(l, env), brute_force(r, env));
            x || y
        }
    }
}

/// Prints a condition with every compound sub-term parenthesized.
pub fn fully_parenthesized(cond: &Condition) -> String {
    match cond {
        Condition::True => "true".into(),
        Condition::False => "false".into(),
        Condition::Param(p) => p.value.clone(),
        Condition::Compare { param, op, literal } => {
            let lit = match &literal.value {
                Literal::Bool(b) => b.to_string(),
                other => panic!("unsupported literal {other:?}"),
            };
            format!("({} {} {})", param.value, op.as_str(), lit)
        }
        Condition::Not(c) => format!("(not {})", fully_parenthesized(c)),
        Condition::And(l, r) => format!("({} and {})", fully_parenthesized(l), fully_parenthesized(r)),
        Condition::Or(l, r) => format!("({} or {})", fully_parenthesized(l), fully_parenthesized(r)),
    }
}

/// Breadth-first search over an explicit adjacency list.
pub fn bfs_reachable(edges: &BTreeMap<String, Vec<String>>, start: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    if !edges.contains_key(start) {
        return seen;
    }
    let mut queue = VecDeque::from([start.to_owned()]);
    seen.insert(start.to_owned());
    while let Some(node) = queue.pop_front() {
        for next in &edges[&node] {
            if edges.contains_key(next) && seen.insert(next.clone()) {
                queue.push_back(next.clone());
            }
        }
    }
    seen
}

/// A random section graph rendered as `.kb` source, plus the graph itself.
pub struct GraphKb {
    pub source: String,
    pub edges: BTreeMap<String, Vec<String>>,
}

/// Up to 12 sections with random `goto` edges; `start` is usually present and
/// some edges point at sections that do not exist.
pub fn random_graph_kb(rng: &mut StdRng) -> GraphKb {
    let n = rng.random_range(1..=12);
    let with_start = rng.random_bool(0.9);
    let names: Vec<String> = (0..n)
        .map(|i| {
            if i == 0 && with_start {
                "start".to_owned()
            } else {
                format!("s{i}")
            }
        })
        .collect();
    let mut edges = BTreeMap::new();
    let mut source = String::new();
    for name in &names {
        let mut targets = Vec::new();
        let mut rules = Vec::new();
        for _ in 0..rng.random_range(0..4) {
            let mut actions = Vec::new();
            for _ in 0..rng.random_range(1..=3) {
                if rng.random_bool(0.7) {
                    let t = if rng.random_bool(0.1) {
                        format!("missing{}", rng.random_range(0..3))
                    } else {
                        names[rng.random_range(0..n)].clone()
                    };
                    actions.push(format!("goto {t}"));
                    targets.push(t);
                } else {
                    actions.push("advice \"x\"".into());
                }
            }
            let guard = if rng.random_bool(0.5) {
                "if false"
            } else {
                "always"
            };
            rules.push(format!("  {guard} do {}\n", actions.join(", ")));
        }
        source.push_str(&format!("section {name} {{\n{}}}\n", rules.concat()));
        edges.insert(name.clone(), targets);
    }
    GraphKb { source, edges }
}

fn random_ident(rng: &mut StdRng) -> String {
    const HEADS: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    const TAILS: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_";
    let mut s = String::new();
    s.push(HEADS[rng.random_range(0..HEADS.len())] as char);
    for _ in 0..rng.random_range(0..8) {
        s.push(TAILS[rng.random_range(0..TAILS.len())] as char);
    }
    s
}

fn random_string_literal(rng: &mut StdRng) -> String {
    const PIECES: &[&str] = &[
        "a",
        "Herbal",
        " ",
        "\\\"",
        "\\\\",
        "\\n",
        "é",
        "—",
        "\t",
        "#not a comment",
        "ü",
    ];
    let mut s = String::from("\"");
    for _ in 0..rng.random_range(1..6) {
        s.push_str(PIECES[rng.random_range(0..PIECES.len())]);
    }
    s.push('"');
    s
}

fn random_number(rng: &mut StdRng) -> String {
    let int = rng.random_range(0..100_000u32);
    let sign = if rng.random_bool(0.3) { "-" } else { "" };
    if rng.random_bool(0.5) {
        format!(
            "{sign}{int}.{:0width$}",
            rng.random_range(0..1000u32),
            width = rng.random_range(1..4)
        )
    } else {
        format!("{sign}{int}")
    }
}

fn noise(rng: &mut StdRng) -> &'static str {
    const WS: &[&str] = &[" ", "  ", "\n", " # comment\n", "\t", "\r\n"];
    WS[rng.random_range(0..WS.len())]
}

#[derive(Clone)]
struct GenParam {
    name: String,
    kind: u8,
    values: Vec<String>,
}

fn random_atom(rng: &mut StdRng, params: &[GenParam]) -> String {
    if params.is_empty() || rng.random_bool(0.1) {
        return if rng.random_bool(0.5) {
            "true".into()
        } else {
            "false".into()
        };
    }
    let p = &params[rng.random_range(0..params.len())];
    match p.kind {
        0 if rng.random_bool(0.5) => p.name.clone(),
        0 => format!(
            "{} = {}",
            p.name,
            if rng.random_bool(0.5) { "true" } else { "false" }
        ),
        1 => format!("{} <> {}", p.name, random_string_literal(rng)),
        2 => {
            let ops = ["=", "<>", "<", "<=", ">", ">="];
            format!(
                "{} {} {}",
                p.name,
                ops[rng.random_range(0..ops.len())],
                random_number(rng)
            )
        }
        _ => format!("{} = {}", p.name, p.values[rng.random_range(0..p.values.len())]),
    }
}

fn random_condition(rng: &mut StdRng, params: &[GenParam], depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.35) {
        let atom = random_atom(rng, params);
        return if rng.random_bool(0.15) {
            format!("({atom})")
        } else {
            atom
        };
    }
    match rng.random_range(0..4) {
        0 => format!("not ({})", random_condition(rng, params, depth - 1)),
        1 => format!(
            "{} and {}",
            random_condition(rng, params, depth - 1),
            paren(random_condition(rng, params, depth - 1))
        ),
        2 => format!(
            "({}){}or{}({})",
            random_condition(rng, params, depth - 1),
            noise(rng),
            noise(rng),
            random_condition(rng, params, depth - 1)
        ),
        _ => format!("({})", random_condition(rng, params, depth - 1)),
    }
}

fn paren(s: String) -> String {
    format!("({s})")
}

/// Source text of a random knowledge base that parses without errors, with
/// comments, odd whitespace and redundant parentheses mixed in.
pub fn random_wellformed_kb(rng: &mut StdRng) -> String {
    let mut out = String::new();
    let mut used = BTreeSet::new();
    let mut fresh = |rng: &mut StdRng| loop {
        let name = random_ident(rng);
        if kbshell_core::lexer::Keyword::from_ident(&name).is_none() && used.insert(name.clone()) {
            return name;
        }
    };
    if rng.random_bool(0.8) {
        out.push_str(&format!("title{}{}\n", noise(rng), random_string_literal(rng)));
    }
    let mut params = Vec::new();
    for _ in 0..rng.random_range(0..5) {
        let kind = rng.random_range(0..4u8);
        let name = fresh(rng);
        let values: Vec<String> = if kind == 3 {
            (0..rng.random_range(1..4)).map(|_| fresh(rng)).collect()
        } else {
            vec![]
        };
        let ptype = ["boolean", "text", "number", "category"][kind as usize];
        out.push_str(&format!("parameter {name}{}:{}{ptype}", noise(rng), noise(rng)));
        if rng.random_bool(0.5) {
            out.push_str(&format!("{}question {}", noise(rng), random_string_literal(rng)));
        }
        if kind == 3 {
            out.push_str(&format!("{}values {}", noise(rng), values.join(" , ")));
        }
        out.push('\n');
        params.push(GenParam { name, kind, values });
    }
    let section_names: Vec<String> = (0..rng.random_range(0..5)).map(|_| fresh(rng)).collect();
    for name in &section_names {
        out.push_str(&format!("section {name}{}{{", noise(rng)));
        for _ in 0..rng.random_range(0..4) {
            let head = match rng.random_range(0..3) {
                0 => "always".to_owned(),
                1 => "if true".to_owned(),
                _ => format!("if {}", random_condition(rng, &params, 3)),
            };
            let mut actions = Vec::new();
            for _ in 0..rng.random_range(1..4) {
                actions.push(match rng.random_range(0..4) {
                    0 => format!("advice {}", random_string_literal(rng)),
                    1 => format!("goto {}", section_names[rng.random_range(0..section_names.len())]),
                    2 if !params.is_empty() => {
                        let p = &params[rng.random_range(0..params.len())];
                        let lit = match p.kind {
                            0 => "true".to_owned(),
                            1 => random_string_literal(rng),
                            2 => random_number(rng),
                            _ => p.values[0].clone(),
                        };
                        format!("set {} := {lit}", p.name)
                    }
                    _ => "stop".to_owned(),
                });
            }
            out.push_str(&format!("{}{head} do {}", noise(rng), actions.join(",")));
        }
        out.push_str(&format!("{}}}\n", noise(rng)));
    }
    out
}

/// Random input for the parser: raw bytes, or a soup of grammar fragments.
pub fn random_fuzz_input(rng: &mut StdRng) -> Vec<u8> {
    let len = rng.random_range(0..=4096);
    if rng.random_bool(0.5) {
        return (0..len).map(|_| rng.random()).collect();
    }
    const FRAGMENTS: &[&str] = &[
        "title",
        "parameter",
        "section",
        "if",
        "always",
        "do",
        "advice",
        "goto",
        "set",
        "stop",
        "and",
        "or",
        "not",
        "true",
        "false",
        "boolean",
        "text",
        "number",
        "category",
        "question",
        "values",
        "{",
        "}",
        "(",
        ")",
        ":",
        ":=",
        ",",
        "=",
        "<>",
        "<",
        "<=",
        ">",
        ">=",
        "\"",
        "\\",
        "#",
        "\n",
        " ",
        "start",
        "x",
        "-",
        "1",
        "2.5",
        "-3",
        "é",
        "\u{feff}",
        "\r",
        "\t",
        "@",
    ];
    let mut out = Vec::new();
    while out.len() < len {
        out.extend_from_slice(FRAGMENTS[rng.random_range(0..FRAGMENTS.len())].as_bytes());
    }
    out.truncate(len);
    out
}

/// True when `span` points at a character of `source`, or just past the end of a line.
pub fn span_in_bounds(source: &str, span: Span) -> bool {
    let lines: Vec<&str> = source.split('\n').collect();
    if span.line < 1 || span.line as usize > lines.len() || span.column < 1 {
        return false;
    }
    span.column as usize <= lines[span.line as usize - 1].chars().count() + 1
}
