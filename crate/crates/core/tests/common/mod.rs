#![allow(dead_code)]

use std::path::PathBuf;

use fixkit::ast::DistanceMetric;
use fixkit::catalog::{apply_pattern, match_statement, realize, PatternFilter, Realized, CANDIDATE_CAP};
use fixkit::donor::collect_donors;
use fixkit::lang::check::CheckedProgram;
use fixkit::ast::NodeId;
use fixkit::lang::SourceFile;
use fixkit::site::Site;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn corpus_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Every type-checked candidate the catalog emits at one statement, in
/// match order.
pub fn candidates_at(files: &[SourceFile], checked: &CheckedProgram, file: usize, stmt: NodeId) -> Vec<Realized> {
    let Some(site) = Site::new(checked, file, stmt) else { return Vec::new() };
    let donors = collect_donors(checked, file, stmt, DistanceMetric::PathLength);
    let mut out = Vec::new();
    for m in match_statement(&site, &PatternFilter::all()) {
        let Ok(generated) = apply_pattern(&site, &m, &donors) else { continue };
        out.extend(realize(files, checked, file, m.descriptor.id, generated, CANDIDATE_CAP).kept);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ty {
    Int,
    Float,
    Bool,
    Box,
    Ints,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Int => "int",
            Ty::Float => "float",
            Ty::Bool => "boolean",
            Ty::Box => "Box",
            Ty::Ints => "int[]",
        }
    }
}

const VALUE_TYPES: [Ty; 5] = [Ty::Int, Ty::Float, Ty::Bool, Ty::Box, Ty::Ints];

const PRELUDE: &str = "class Box {
    int v;
    Box next;

    int get() {
        return v;
    }

    void put(int x) {
        v = x;
    }

    boolean positive() {
        return v > 0;
    }
}

class Sub extends Box {
    int get() {
        return v + 1;
    }
}
";

struct Method {
    name: String,
    params: Vec<Ty>,
    ret: Option<Ty>,
}

/// Random generator of well-typed MiniJ programs.
pub struct ProgramGen {
    rng: ChaCha8Rng,
    scopes: Vec<Vec<(String, Ty)>>,
    fresh: usize,
    methods: Vec<Method>,
    fields: Vec<(String, Ty)>,
}

impl ProgramGen {
    pub fn new(seed: u64) -> Self {
        ProgramGen { rng: ChaCha8Rng::seed_from_u64(seed), scopes: Vec::new(), fresh: 0, methods: Vec::new(), fields: Vec::new() }
    }

    fn vars(&self, ty: Ty) -> Vec<String> {
        let mut out: Vec<String> =
            self.scopes.iter().flatten().filter(|(_, t)| *t == ty).map(|(n, _)| n.clone()).collect();
        out.extend(self.fields.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n.clone()));
        out
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn pick(&mut self, options: &[String]) -> Option<String> {
        options.choose(&mut self.rng).cloned()
    }

    fn expr(&mut self, ty: Ty, depth: u32) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.35);
        let vars = self.vars(ty);
        if leaf || self.rng.gen_bool(0.2) {
            if !vars.is_empty() && self.rng.gen_bool(0.6) {
                return self.pick(&vars).unwrap();
            }
            return self.literal(ty);
        }
        let d = depth - 1;
        match ty {
            Ty::Int => match self.rng.gen_range(0..8) {
                0..=2 => {
                    let op = ["+", "-", "*", "/", "%"].choose(&mut self.rng).unwrap();
                    format!("{} {op} {}", self.paren(Ty::Int, d), self.paren(Ty::Int, d))
                }
                3 => format!("{}.get()", self.receiver(d)),
                4 => format!("{}.v", self.receiver(d)),
                5 => format!("{}.length", self.paren(Ty::Ints, d)),
                6 => format!("{}[{}]", self.paren(Ty::Ints, d), self.expr(Ty::Int, d)),
                _ => self.call(Ty::Int, d).unwrap_or_else(|| self.literal(Ty::Int)),
            },
            Ty::Float => match self.rng.gen_range(0..4) {
                0 => format!("{} / {}", self.paren(Ty::Float, d), self.paren(Ty::Int, d)),
                1 => format!("{} * {}", self.paren(Ty::Int, d), self.paren(Ty::Float, d)),
                2 => format!("(float) {}", self.paren(Ty::Int, d)),
                _ => self.expr(Ty::Int, d),
            },
            Ty::Bool => match self.rng.gen_range(0..8) {
                0 | 1 => {
                    let op = ["<", "<=", ">", ">=", "==", "!="].choose(&mut self.rng).unwrap();
                    format!("{} {op} {}", self.paren(Ty::Int, d), self.paren(Ty::Int, d))
                }
                2 => {
                    let op = ["&&", "||"].choose(&mut self.rng).unwrap();
                    format!("{} {op} {}", self.paren(Ty::Bool, d), self.paren(Ty::Bool, d))
                }
                3 => format!("!{}", self.paren(Ty::Bool, d)),
                4 => format!("{} == null", self.paren(Ty::Box, d)),
                5 => format!("{} instanceof Sub", self.receiver(d)),
                6 => format!("{}.positive()", self.receiver(d)),
                _ => self.call(Ty::Bool, d).unwrap_or_else(|| self.literal(Ty::Bool)),
            },
            Ty::Box => match self.rng.gen_range(0..4) {
                0 => format!("{}.next", self.receiver(d)),
                1 => "new Sub()".to_string(),
                2 => format!("{} ? {} : {}", self.paren(Ty::Bool, d), self.paren(Ty::Box, d), self.paren(Ty::Box, d)),
                _ => self.call(Ty::Box, d).unwrap_or_else(|| self.literal(Ty::Box)),
            },
            Ty::Ints => format!("new int[{}]", self.expr(Ty::Int, d)),
        }
    }

    fn paren(&mut self, ty: Ty, depth: u32) -> String {
        let e = self.expr(ty, depth);
        if e.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.') {
            e
        } else {
            format!("({e})")
        }
    }

    /// A non-null-literal `Box` expression usable before `.` .
    fn receiver(&mut self, depth: u32) -> String {
        let vars = self.vars(Ty::Box);
        match self.rng.gen_range(0..4) {
            0 if depth > 0 => format!("{}.next", self.receiver(depth - 1)),
            1 => "new Box()".to_string(),
            2 => "new Sub()".to_string(),
            _ => self.pick(&vars).unwrap_or_else(|| "new Box()".to_string()),
        }
    }

    fn literal(&mut self, ty: Ty) -> String {
        match ty {
            Ty::Int => {
                let v: i32 = self.rng.gen_range(-3..10);
                if v < 0 {
                    format!("({v})")
                } else {
                    v.to_string()
                }
            }
            Ty::Float => format!("{}.5", self.rng.gen_range(0..5)),
            Ty::Bool => if self.rng.gen_bool(0.5) { "true" } else { "false" }.to_string(),
            Ty::Box => if self.rng.gen_bool(0.5) { "new Box()" } else { "null" }.to_string(),
            Ty::Ints => format!("new int[] {{ {}, {} }}", self.rng.gen_range(0..5), self.rng.gen_range(0..5)),
        }
    }

    fn call(&mut self, ty: Ty, depth: u32) -> Option<String> {
        let candidates: Vec<usize> = (0..self.methods.len()).filter(|&i| self.methods[i].ret == Some(ty)).collect();
        let &i = candidates.choose(&mut self.rng)?;
        let params = self.methods[i].params.clone();
        let args: Vec<String> = params.iter().map(|p| self.expr(*p, depth)).collect();
        Some(format!("{}({})", self.methods[i].name, args.join(", ")))
    }

    fn block(&mut self, indent: usize, depth: u32, out: &mut String) {
        self.scopes.push(Vec::new());
        let n = self.rng.gen_range(1..4);
        for _ in 0..n {
            self.statement(indent, depth, out);
        }
        self.scopes.pop();
    }

    fn statement(&mut self, indent: usize, depth: u32, out: &mut String) {
        let pad = " ".repeat(indent);
        let choice = self.rng.gen_range(0..10);
        match choice {
            0..=2 => {
                let ty = *VALUE_TYPES.choose(&mut self.rng).unwrap();
                let name = self.fresh("x");
                let e = self.expr(ty, 2);
                out.push_str(&format!("{pad}{} {name} = {e};\n", ty.name()));
                self.scopes.last_mut().unwrap().push((name, ty));
            }
            3 | 4 => {
                let ty = *VALUE_TYPES.choose(&mut self.rng).unwrap();
                let vars = self.vars(ty);
                match self.pick(&vars) {
                    Some(v) if ty == Ty::Int && self.rng.gen_bool(0.3) => {
                        out.push_str(&format!("{pad}{v} += {};\n", self.expr(Ty::Int, 1)))
                    }
                    Some(v) => out.push_str(&format!("{pad}{v} = {};\n", self.expr(ty, 2))),
                    None => out.push_str(&format!("{pad}{}.put({});\n", self.receiver(1), self.expr(Ty::Int, 1))),
                }
            }
            5 if depth > 0 => {
                out.push_str(&format!("{pad}if ({}) {{\n", self.expr(Ty::Bool, 2)));
                self.block(indent + 4, depth - 1, out);
                if self.rng.gen_bool(0.4) {
                    out.push_str(&format!("{pad}}} else {{\n"));
                    self.block(indent + 4, depth - 1, out);
                }
                out.push_str(&format!("{pad}}}\n"));
            }
            6 if depth > 0 => {
                let i = self.fresh("i");
                out.push_str(&format!("{pad}for (int {i} = 0; {i} < {}; {i}++) {{\n", self.expr(Ty::Int, 1)));
                self.scopes.push(vec![(i, Ty::Int)]);
                self.block(indent + 4, depth - 1, out);
                self.scopes.pop();
                out.push_str(&format!("{pad}}}\n"));
            }
            7 if depth > 0 => {
                out.push_str(&format!("{pad}try {{\n"));
                self.block(indent + 4, depth - 1, out);
                let e = self.fresh("e");
                out.push_str(&format!("{pad}}} catch (Exception {e}) {{\n"));
                self.block(indent + 4, depth - 1, out);
                out.push_str(&format!("{pad}}}\n"));
            }
            8 => {
                let vars = self.vars(Ty::Ints);
                match self.pick(&vars) {
                    Some(a) => out.push_str(&format!("{pad}{a}[{}] = {};\n", self.expr(Ty::Int, 1), self.expr(Ty::Int, 2))),
                    None => out.push_str(&format!("{pad}{}.put({});\n", self.receiver(1), self.expr(Ty::Int, 2))),
                }
            }
            _ => {
                let vars = self.vars(Ty::Int);
                match self.pick(&vars) {
                    Some(v) => out.push_str(&format!("{pad}{v}++;\n")),
                    None => out.push_str(&format!("{pad}{}.put({});\n", self.receiver(1), self.expr(Ty::Int, 1))),
                }
            }
        }
    }

    /// A program of `Box`, `Sub` and a `Work` class with random members.
    pub fn program(&mut self) -> String {
        self.methods.clear();
        self.fields.clear();
        self.fresh = 0;
        let mut out = String::from(PRELUDE);
        out.push_str("\nclass Work {\n");
        for _ in 0..self.rng.gen_range(1..4) {
            let ty = *VALUE_TYPES.choose(&mut self.rng).unwrap();
            let name = self.fresh("f");
            out.push_str(&format!("    {} {name};\n", ty.name()));
            self.fields.push((name, ty));
        }
        for m in 0..self.rng.gen_range(1..4) {
            let ret = if self.rng.gen_bool(0.25) { None } else { Some(*VALUE_TYPES.choose(&mut self.rng).unwrap()) };
            let params: Vec<(String, Ty)> = (0..self.rng.gen_range(0..3))
                .map(|_| {
                    let ty = *VALUE_TYPES.choose(&mut self.rng).unwrap();
                    (self.fresh("p"), ty)
                })
                .collect();
            let name = format!("m{m}");
            let sig: Vec<String> = params.iter().map(|(n, t)| format!("{} {n}", t.name())).collect();
            out.push_str(&format!("\n    {} {name}({}) {{\n", ret.map_or("void", Ty::name), sig.join(", ")));
            self.scopes = vec![params.clone()];
            self.block(8, 2, &mut out);
            self.scopes = vec![params.clone(), Vec::new()];
            if let Some(t) = ret {
                let e = self.expr(t, 2);
                out.push_str(&format!("        return {e};\n"));
            }
            self.scopes.clear();
            out.push_str("    }\n");
            self.methods.push(Method { name, params: params.iter().map(|(_, t)| *t).collect(), ret });
        }
        out.push_str("}\n");
        out
    }
}
