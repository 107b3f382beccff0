//! Tree-walking interpreter that runs test methods and records how often
//! each statement executes.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::ast::{AssignOp, BinOp, Kind, Lit, Node, NodeId, UnOp};

use super::check::CheckedProgram;
use super::types::{ClassTable, LangType, EXCEPTION, OBJECT};
use super::StmtId;

/// Outcome of one test run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "kebab-case")]
pub enum Verdict {
    Passed,
    /// An `assert` failed.
    Failed,
    /// An uncaught runtime error.
    Crashed(String),
    TimedOut,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        *self == Verdict::Passed
    }
}

/// A test method of the suite class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCase {
    pub name: String,
    pub class: String,
    pub file: usize,
    pub decl: NodeId,
}

/// Per-statement execution counts of one test run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageTrace {
    pub test: String,
    pub verdict: Verdict,
    pub counts: BTreeMap<StmtId, u64>,
}

impl CoverageTrace {
    pub fn covers(&self, id: &StmtId) -> bool {
        self.counts.get(id).is_some_and(|c| *c > 0)
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub per_test_timeout: Duration,
    /// Deterministic bound on executed steps per test.
    pub max_steps: u64,
    pub max_call_depth: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { per_test_timeout: Duration::from_millis(100), max_steps: 5_000_000, max_call_depth: 200 }
    }
}

/// Test methods (`test_*`, no parameters) declared in the given file.
pub fn discover_tests(program: &CheckedProgram, file: usize) -> Vec<TestCase> {
    let mut out = Vec::new();
    for class in &program.asts[file].children {
        let Kind::Class { name: cname, .. } = &class.kind else { continue };
        for m in &class.children {
            if let Kind::Method { name, .. } = &m.kind {
                if name.starts_with("test_") && m.children.len() == 1 {
                    out.push(TestCase { name: name.clone(), class: cname.clone(), file, decl: m.id });
                }
            }
        }
    }
    out
}

const STACK_SIZE: usize = 64 * 1024 * 1024;

/// Run every test on a fresh instance of its class. Runs on a dedicated
/// thread with a large stack; the result is independent of the caller.
pub fn run_tests(program: &CheckedProgram, tests: &[TestCase], config: &RunConfig) -> Vec<CoverageTrace> {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_SIZE)
            .spawn_scoped(s, || {
                let index = ProgramIndex::new(program);
                tests.iter().map(|t| run_one(program, &index, t, config)).collect()
            })
            .expect("spawn interpreter thread")
            .join()
            .expect("interpreter thread panicked")
    })
}

fn run_one(program: &CheckedProgram, index: &ProgramIndex<'_>, test: &TestCase, config: &RunConfig) -> CoverageTrace {
    let mut it = Interp {
        classes: &program.classes,
        index,
        counts: program.asts.iter().map(|a| vec![0u64; a.size()]).collect(),
        steps: 0,
        depth: 0,
        started: Instant::now(),
        config,
    };
    let result = it.instantiate(&test.class, &[], None).and_then(|obj| {
        let method = index.node(test.file, test.decl);
        it.invoke(method, test.file, &test.class, Some(obj), Vec::new()).map(|_| ())
    });
    let verdict = match result {
        Ok(()) => Verdict::Passed,
        Err(Fault::AssertFailed) => Verdict::Failed,
        Err(Fault::Exception(kind)) => Verdict::Crashed(kind.to_string()),
        Err(Fault::Fatal(msg)) => Verdict::Crashed(msg.to_string()),
        Err(Fault::Timeout) => Verdict::TimedOut,
    };
    let mut counts = BTreeMap::new();
    for (fi, per_file) in it.counts.iter().enumerate() {
        for (id, c) in per_file.iter().enumerate() {
            if *c > 0 {
                counts.insert(StmtId { file: program.paths[fi].clone(), node: id as NodeId }, *c);
            }
        }
    }
    CoverageTrace { test: test.name.clone(), verdict, counts }
}

/// Lookup tables from the class table into declaration nodes.
struct ProgramIndex<'p> {
    decls: HashMap<(usize, NodeId), &'p Node>,
    class_nodes: HashMap<&'p str, (usize, &'p Node)>,
}

impl<'p> ProgramIndex<'p> {
    fn new(program: &'p CheckedProgram) -> Self {
        let mut decls = HashMap::new();
        let mut class_nodes = HashMap::new();
        for (fi, ast) in program.asts.iter().enumerate() {
            for class in &ast.children {
                if let Kind::Class { name, .. } = &class.kind {
                    class_nodes.insert(name.as_str(), (fi, class));
                }
                for m in &class.children {
                    if matches!(m.kind, Kind::Method { .. } | Kind::Constructor { .. }) {
                        decls.insert((fi, m.id), m);
                    }
                }
            }
        }
        ProgramIndex { decls, class_nodes }
    }

    fn node(&self, file: usize, id: NodeId) -> &'p Node {
        self.decls[&(file, id)]
    }
}

#[derive(Debug)]
struct Object {
    class: String,
    fields: BTreeMap<String, Value>,
}

#[derive(Debug)]
struct Array {
    elem: LangType,
    items: Vec<Value>,
}

#[derive(Clone, Debug)]
enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(Rc<str>),
    Obj(Rc<RefCell<Object>>),
    Arr(Rc<RefCell<Array>>),
    Void,
}

impl Value {
    fn default_of(ty: &LangType) -> Value {
        match ty {
            LangType::Boolean => Value::Bool(false),
            LangType::Int => Value::Int(0),
            LangType::Float => Value::Float(0.0),
            _ => Value::Null,
        }
    }

    fn as_bool(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    fn as_int(&self) -> i64 {
        match self {
            Value::Int(v) => *v,
            Value::Float(v) => *v as i64,
            _ => 0,
        }
    }

    fn as_float(&self) -> f64 {
        match self {
            Value::Int(v) => *v as f64,
            Value::Float(v) => *v,
            _ => 0.0,
        }
    }

    fn render(&self) -> String {
        match self {
            Value::Null => "null".to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Int(v) => v.to_string(),
            Value::Float(v) => super::printer::format_float(*v),
            Value::Str(s) => s.to_string(),
            Value::Obj(o) => o.borrow().class.clone(),
            Value::Arr(a) => format!("{}[]", a.borrow().elem),
            Value::Void => String::new(),
        }
    }
}

/// Converts a value to the declared type of its destination (int to float
/// widening is the only implicit conversion).
fn coerce(v: Value, ty: Option<&LangType>) -> Value {
    match (v, ty) {
        (Value::Int(i), Some(LangType::Float)) => Value::Float(i as f64),
        (v, _) => v,
    }
}

#[derive(Debug)]
enum Fault {
    /// Catchable runtime exception.
    Exception(&'static str),
    AssertFailed,
    /// Uncatchable failure such as stack exhaustion.
    Fatal(&'static str),
    Timeout,
}

const NPE: &str = "NullPointerException";
const CCE: &str = "ClassCastException";
const OOB: &str = "ArrayIndexOutOfBoundsException";
const ARITH: &str = "ArithmeticException";
const NEG_SIZE: &str = "NegativeArraySizeException";

enum Flow {
    Normal,
    Return(Value),
    Break,
    Continue,
}

struct Frame {
    file: usize,
    class: String,
    this: Option<Value>,
    locals: Vec<(String, Value)>,
}

impl Frame {
    fn lookup(&self, name: &str) -> Option<usize> {
        self.locals.iter().rposition(|(n, _)| n == name)
    }
}

struct Interp<'a, 'p> {
    classes: &'a ClassTable,
    index: &'a ProgramIndex<'p>,
    counts: Vec<Vec<u64>>,
    steps: u64,
    depth: usize,
    started: Instant,
    config: &'a RunConfig,
}

type Res<T> = Result<T, Fault>;

impl<'a, 'p> Interp<'a, 'p> {
    fn tick(&mut self) -> Res<()> {
        self.steps += 1;
        if self.steps > self.config.max_steps {
            return Err(Fault::Timeout);
        }
        if self.steps % 1024 == 0 && self.started.elapsed() > self.config.per_test_timeout {
            return Err(Fault::Timeout);
        }
        Ok(())
    }

    /// Allocate an object, run field initializers and constructors from the
    /// root class down. `ctor` selects the constructor of `class` itself.
    fn instantiate(&mut self, class: &str, args: &[Value], ctor: Option<&[LangType]>) -> Res<Value> {
        let chain: Vec<String> = self.classes.ancestry(class);
        let mut fields = BTreeMap::new();
        for c in &chain {
            if let Some(info) = self.classes.get(c) {
                for f in &info.fields {
                    fields.insert(f.name.clone(), Value::default_of(&f.ty));
                }
            }
        }
        let obj = Value::Obj(Rc::new(RefCell::new(Object { class: class.to_string(), fields })));
        for (i, c) in chain.iter().rev().enumerate() {
            let Some(&(fi, class_node)) = self.index.class_nodes.get(c.as_str()) else { continue };
            let mut frame = Frame { file: fi, class: c.clone(), this: Some(obj.clone()), locals: Vec::new() };
            for m in &class_node.children {
                if let Kind::Field { name, ty } = &m.kind {
                    if let Some(init) = m.children.first() {
                        let v = coerce(self.eval(init, &mut frame)?, Some(ty));
                        set_field(&obj, name, v);
                    }
                }
            }
            let info = self.classes.get(c).expect("class info");
            let is_target = i == chain.len() - 1;
            let wanted: &[LangType] = if is_target { ctor.unwrap_or(&[]) } else { &[] };
            if let Some(k) = info.ctors.iter().find(|k| k.params == wanted) {
                let node = self.index.node(k.file.unwrap_or(fi), k.decl.unwrap_or(0));
                let passed = if is_target { args.to_vec() } else { Vec::new() };
                self.invoke(node, fi, c, Some(obj.clone()), passed)?;
            }
        }
        Ok(obj)
    }

    fn invoke(&mut self, decl: &Node, file: usize, class: &str, this: Option<Value>, args: Vec<Value>) -> Res<Value> {
        self.depth += 1;
        if self.depth > self.config.max_call_depth {
            self.depth -= 1;
            return Err(Fault::Fatal("StackOverflowError"));
        }
        let n = decl.children.len();
        let mut frame = Frame { file, class: class.to_string(), this, locals: Vec::with_capacity(8) };
        for (p, v) in decl.children[..n - 1].iter().zip(args) {
            if let Kind::Param { name, ty } = &p.kind {
                frame.locals.push((name.clone(), coerce(v, Some(ty))));
            }
        }
        let flow = self.exec(&decl.children[n - 1], &mut frame);
        self.depth -= 1;
        match flow? {
            Flow::Return(v) => Ok(v),
            _ => Ok(Value::Void),
        }
    }

    fn exec_block(&mut self, stmts: &[Node], frame: &mut Frame) -> Res<Flow> {
        let mark = frame.locals.len();
        let mut out = Flow::Normal;
        for s in stmts {
            match self.exec(s, frame) {
                Ok(Flow::Normal) => {}
                Ok(f) => {
                    out = f;
                    break;
                }
                Err(e) => {
                    frame.locals.truncate(mark);
                    return Err(e);
                }
            }
        }
        frame.locals.truncate(mark);
        Ok(out)
    }

    fn exec(&mut self, s: &Node, frame: &mut Frame) -> Res<Flow> {
        if !matches!(s.kind, Kind::Block | Kind::Empty) {
            self.counts[frame.file][s.id as usize] += 1;
            self.tick()?;
        }
        self.exec_untracked(s, frame)
    }

    fn exec_scoped(&mut self, s: &Node, frame: &mut Frame) -> Res<Flow> {
        let mark = frame.locals.len();
        let r = self.exec(s, frame);
        frame.locals.truncate(mark);
        r
    }

    fn exec_untracked(&mut self, s: &Node, frame: &mut Frame) -> Res<Flow> {
        match &s.kind {
            Kind::Block => self.exec_block(&s.children, frame),
            Kind::Empty => Ok(Flow::Normal),
            Kind::LocalVar { ty, name } => {
                let v = match s.children.first() {
                    Some(init) => coerce(self.eval(init, frame)?, Some(ty)),
                    None => Value::default_of(ty),
                };
                frame.locals.push((name.clone(), v));
                Ok(Flow::Normal)
            }
            Kind::ExprStmt => {
                self.eval(&s.children[0], frame)?;
                Ok(Flow::Normal)
            }
            Kind::Assign { op } => {
                let target = &s.children[0];
                let value = self.eval(&s.children[1], frame)?;
                let value = match op {
                    AssignOp::Set => value,
                    _ => {
                        let cur = self.eval(target, frame)?;
                        self.binary(op.binop().expect("compound"), cur, value)?
                    }
                };
                self.store(target, coerce(value, target.ty.as_ref()), frame)?;
                Ok(Flow::Normal)
            }
            Kind::Step { increment } => {
                let target = &s.children[0];
                let cur = self.eval(target, frame)?;
                let delta = if *increment { 1 } else { -1 };
                let next = match cur {
                    Value::Float(f) => Value::Float(f + delta as f64),
                    other => Value::Int(other.as_int().wrapping_add(delta)),
                };
                self.store(target, next, frame)?;
                Ok(Flow::Normal)
            }
            Kind::If => {
                if self.eval(&s.children[0], frame)?.as_bool() {
                    self.exec_scoped(&s.children[1], frame)
                } else if let Some(els) = s.children.get(2) {
                    self.exec_scoped(els, frame)
                } else {
                    Ok(Flow::Normal)
                }
            }
            Kind::While => {
                loop {
                    self.tick()?;
                    if !self.eval(&s.children[0], frame)?.as_bool() {
                        return Ok(Flow::Normal);
                    }
                    match self.exec_scoped(&s.children[1], frame)? {
                        Flow::Break => return Ok(Flow::Normal),
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        _ => {}
                    }
                }
            }
            Kind::For => {
                let mark = frame.locals.len();
                let r = self.exec_for(s, frame);
                frame.locals.truncate(mark);
                r
            }
            Kind::Return => {
                let v = match s.children.first() {
                    Some(e) => self.eval(e, frame)?,
                    None => Value::Void,
                };
                Ok(Flow::Return(v))
            }
            Kind::Break => Ok(Flow::Break),
            Kind::Continue => Ok(Flow::Continue),
            Kind::Try => match self.exec(&s.children[0], frame) {
                Err(Fault::Exception(_)) => {
                    let handler = &s.children[1];
                    let Kind::Catch { name, .. } = &handler.kind else { return Ok(Flow::Normal) };
                    let mark = frame.locals.len();
                    let exc = Value::Obj(Rc::new(RefCell::new(Object {
                        class: EXCEPTION.to_string(),
                        fields: BTreeMap::new(),
                    })));
                    frame.locals.push((name.clone(), exc));
                    let r = self.exec(&handler.children[0], frame);
                    frame.locals.truncate(mark);
                    r
                }
                other => other,
            },
            _ => Ok(Flow::Normal),
        }
    }

    fn exec_for(&mut self, s: &Node, frame: &mut Frame) -> Res<Flow> {
        let [init, cond, update, body] = &s.children[..] else { return Ok(Flow::Normal) };
        self.exec_untracked(init, frame)?;
        loop {
            self.tick()?;
            if cond.kind != Kind::Empty && !self.eval(cond, frame)?.as_bool() {
                return Ok(Flow::Normal);
            }
            match self.exec_scoped(body, frame)? {
                Flow::Break => return Ok(Flow::Normal),
                Flow::Return(v) => return Ok(Flow::Return(v)),
                _ => {}
            }
            self.exec_untracked(update, frame)?;
        }
    }

    fn store(&mut self, target: &Node, v: Value, frame: &mut Frame) -> Res<()> {
        match &target.kind {
            Kind::Name(n) => {
                if let Some(i) = frame.lookup(n) {
                    frame.locals[i].1 = v;
                } else if let Some(this) = &frame.this {
                    set_field(this, n, v);
                }
                Ok(())
            }
            Kind::Select { name } => {
                let recv = self.eval(&target.children[0], frame)?;
                match recv {
                    Value::Obj(_) => {
                        set_field(&recv, name, v);
                        Ok(())
                    }
                    _ => Err(Fault::Exception(NPE)),
                }
            }
            Kind::Index => {
                let arr = self.eval(&target.children[0], frame)?;
                let idx = self.eval(&target.children[1], frame)?.as_int();
                match arr {
                    Value::Arr(a) => {
                        let mut a = a.borrow_mut();
                        if idx < 0 || idx as usize >= a.items.len() {
                            return Err(Fault::Exception(OOB));
                        }
                        let elem = a.elem.clone();
                        a.items[idx as usize] = coerce(v, Some(&elem));
                        Ok(())
                    }
                    _ => Err(Fault::Exception(NPE)),
                }
            }
            Kind::Paren => self.store(&target.children[0], v, frame),
            _ => Ok(()),
        }
    }

    fn eval_args(&mut self, args: &[Node], frame: &mut Frame) -> Res<Vec<Value>> {
        args.iter().map(|a| self.eval(a, frame)).collect()
    }

    fn call_method(&mut self, recv: Value, name: &str, params: &[LangType], args: Vec<Value>, from: Option<&str>) -> Res<Value> {
        self.tick()?;
        let runtime = match &recv {
            Value::Obj(o) => o.borrow().class.clone(),
            _ => return Err(Fault::Exception(NPE)),
        };
        // `super.m()` dispatches statically from the parent class.
        let start = from.map(str::to_string).unwrap_or(runtime);
        let Some(m) = self.classes.dispatch(&start, name, params) else {
            return Err(Fault::Fatal("NoSuchMethodError"));
        };
        match (m.file, m.decl) {
            (Some(fi), Some(decl)) => {
                let owner = m.owner.clone();
                let node = self.index.node(fi, decl);
                self.invoke(node, fi, &owner, Some(recv), args)
            }
            _ if m.owner == OBJECT && name == "clone" => {
                let Value::Obj(o) = &recv else { return Err(Fault::Exception(NPE)) };
                let o = o.borrow();
                let copy = Object { class: o.class.clone(), fields: o.fields.clone() };
                Ok(Value::Obj(Rc::new(RefCell::new(copy))))
            }
            _ => Err(Fault::Fatal("NoSuchMethodError")),
        }
    }

    fn eval(&mut self, e: &Node, frame: &mut Frame) -> Res<Value> {
        match &e.kind {
            Kind::Literal(l) => Ok(match l {
                Lit::Bool(b) => Value::Bool(*b),
                Lit::Int(v) => Value::Int(*v),
                Lit::Float(v) => Value::Float(*v),
                Lit::Str(s) => Value::Str(Rc::from(s.as_str())),
                Lit::Null => Value::Null,
            }),
            Kind::Name(n) => {
                if let Some(i) = frame.lookup(n) {
                    return Ok(frame.locals[i].1.clone());
                }
                match &frame.this {
                    Some(Value::Obj(o)) => Ok(o.borrow().fields.get(n).cloned().unwrap_or(Value::Null)),
                    _ => Err(Fault::Fatal("unbound name")),
                }
            }
            Kind::This => frame.this.clone().ok_or(Fault::Fatal("no receiver")),
            Kind::Paren => self.eval(&e.children[0], frame),
            Kind::Select { name } => match self.eval(&e.children[0], frame)? {
                Value::Obj(o) => Ok(o.borrow().fields.get(name).cloned().unwrap_or(Value::Null)),
                Value::Arr(a) if name == "length" => Ok(Value::Int(a.borrow().items.len() as i64)),
                _ => Err(Fault::Exception(NPE)),
            },
            Kind::Call { name } if name == "assert" => {
                if self.eval(&e.children[0], frame)?.as_bool() {
                    Ok(Value::Void)
                } else {
                    Err(Fault::AssertFailed)
                }
            }
            Kind::Call { name } => {
                let args = self.eval_args(&e.children, frame)?;
                let params = e.callee.as_ref().map(|c| c.params.clone()).unwrap_or_default();
                let this = frame.this.clone().ok_or(Fault::Fatal("no receiver"))?;
                self.call_method(this, name, &params, args, None)
            }
            Kind::MethodCall { name } => {
                let recv = self.eval(&e.children[0], frame)?;
                let args = self.eval_args(&e.children[1..], frame)?;
                if let Value::Str(s) = &recv {
                    return Ok(Value::Int(s.chars().count() as i64));
                }
                let params = e.callee.as_ref().map(|c| c.params.clone()).unwrap_or_default();
                self.call_method(recv, name, &params, args, None)
            }
            Kind::SuperCall { name } => {
                let args = self.eval_args(&e.children, frame)?;
                let params = e.callee.as_ref().map(|c| c.params.clone()).unwrap_or_default();
                let this = frame.this.clone().ok_or(Fault::Fatal("no receiver"))?;
                let parent = self.classes.get(&frame.class).and_then(|c| c.parent.clone()).unwrap_or_else(|| OBJECT.to_string());
                self.call_method(this, name, &params, args, Some(&parent))
            }
            Kind::New { class } => {
                let args = self.eval_args(&e.children, frame)?;
                if class == "String" {
                    return Ok(Value::Str(Rc::from("")));
                }
                self.tick()?;
                let params = e.callee.as_ref().map(|c| c.params.clone()).unwrap_or_default();
                self.instantiate(class, &args, Some(&params))
            }
            Kind::NewArray { elem } => {
                let n = self.eval(&e.children[0], frame)?.as_int();
                if n < 0 {
                    return Err(Fault::Exception(NEG_SIZE));
                }
                if n > 1_000_000 {
                    return Err(Fault::Fatal("OutOfMemoryError"));
                }
                let items = vec![Value::default_of(elem); n as usize];
                Ok(Value::Arr(Rc::new(RefCell::new(Array { elem: elem.clone(), items }))))
            }
            Kind::ArrayLit { elem } => {
                let mut items = Vec::with_capacity(e.children.len());
                for c in &e.children {
                    items.push(coerce(self.eval(c, frame)?, Some(elem)));
                }
                Ok(Value::Arr(Rc::new(RefCell::new(Array { elem: elem.clone(), items }))))
            }
            Kind::Index => {
                let arr = self.eval(&e.children[0], frame)?;
                let idx = self.eval(&e.children[1], frame)?.as_int();
                match arr {
                    Value::Arr(a) => {
                        let a = a.borrow();
                        if idx < 0 || idx as usize >= a.items.len() {
                            return Err(Fault::Exception(OOB));
                        }
                        Ok(a.items[idx as usize].clone())
                    }
                    _ => Err(Fault::Exception(NPE)),
                }
            }
            Kind::Cast { ty } => {
                let v = self.eval(&e.children[0], frame)?;
                match ty {
                    LangType::Int => Ok(Value::Int(v.as_int())),
                    LangType::Float => Ok(Value::Float(v.as_float())),
                    _ => {
                        if self.instance_of(&v, ty) || matches!(v, Value::Null) || !ty.is_reference() {
                            Ok(v)
                        } else {
                            Err(Fault::Exception(CCE))
                        }
                    }
                }
            }
            Kind::InstanceOf { ty } => {
                let v = self.eval(&e.children[0], frame)?;
                Ok(Value::Bool(self.instance_of(&v, ty)))
            }
            Kind::Binary { op: BinOp::And } => {
                if !self.eval(&e.children[0], frame)?.as_bool() {
                    return Ok(Value::Bool(false));
                }
                Ok(Value::Bool(self.eval(&e.children[1], frame)?.as_bool()))
            }
            Kind::Binary { op: BinOp::Or } => {
                if self.eval(&e.children[0], frame)?.as_bool() {
                    return Ok(Value::Bool(true));
                }
                Ok(Value::Bool(self.eval(&e.children[1], frame)?.as_bool()))
            }
            Kind::Binary { op } => {
                let l = self.eval(&e.children[0], frame)?;
                let r = self.eval(&e.children[1], frame)?;
                self.binary(*op, l, r)
            }
            Kind::Unary { op } => {
                let v = self.eval(&e.children[0], frame)?;
                Ok(match (op, v) {
                    (UnOp::Not, v) => Value::Bool(!v.as_bool()),
                    (UnOp::Neg, Value::Float(f)) => Value::Float(-f),
                    (UnOp::Neg, v) => Value::Int(v.as_int().wrapping_neg()),
                })
            }
            Kind::Conditional => {
                let branch = if self.eval(&e.children[0], frame)?.as_bool() { 1 } else { 2 };
                let v = self.eval(&e.children[branch], frame)?;
                Ok(coerce(v, e.ty.as_ref()))
            }
            _ => Err(Fault::Fatal("unsupported expression")),
        }
    }

    fn instance_of(&self, v: &Value, ty: &LangType) -> bool {
        match (v, ty) {
            (Value::Obj(o), LangType::Class(c)) => self.classes.is_subclass(&o.borrow().class, c),
            (Value::Arr(a), LangType::Array(elem)) => a.borrow().elem == **elem,
            (Value::Str(_), LangType::Str) => true,
            _ => false,
        }
    }

    fn binary(&mut self, op: BinOp, l: Value, r: Value) -> Res<Value> {
        use Value::*;
        if op == BinOp::Add && (matches!(l, Str(_)) || matches!(r, Str(_))) {
            let s = format!("{}{}", l.render(), r.render());
            return Ok(Str(Rc::from(s.as_str())));
        }
        match op {
            BinOp::Eq | BinOp::Ne => {
                let eq = values_equal(&l, &r);
                return Ok(Bool(if op == BinOp::Eq { eq } else { !eq }));
            }
            BinOp::And => return Ok(Bool(l.as_bool() && r.as_bool())),
            BinOp::Or => return Ok(Bool(l.as_bool() || r.as_bool())),
            _ => {}
        }
        if let (Int(a), Int(b)) = (&l, &r) {
            let (a, b) = (*a, *b);
            return Ok(match op {
                BinOp::Add => Int(a.wrapping_add(b)),
                BinOp::Sub => Int(a.wrapping_sub(b)),
                BinOp::Mul => Int(a.wrapping_mul(b)),
                BinOp::Div | BinOp::Rem if b == 0 => return Err(Fault::Exception(ARITH)),
                BinOp::Div => Int(a.wrapping_div(b)),
                BinOp::Rem => Int(a.wrapping_rem(b)),
                BinOp::Lt => Bool(a < b),
                BinOp::Le => Bool(a <= b),
                BinOp::Gt => Bool(a > b),
                BinOp::Ge => Bool(a >= b),
                _ => unreachable!("handled above"),
            });
        }
        let (a, b) = (l.as_float(), r.as_float());
        Ok(match op {
            BinOp::Add => Float(a + b),
            BinOp::Sub => Float(a - b),
            BinOp::Mul => Float(a * b),
            BinOp::Div => Float(a / b),
            BinOp::Rem => Float(a % b),
            BinOp::Lt => Bool(a < b),
            BinOp::Le => Bool(a <= b),
            BinOp::Gt => Bool(a > b),
            BinOp::Ge => Bool(a >= b),
            _ => unreachable!("handled above"),
        })
    }
}

fn set_field(obj: &Value, name: &str, v: Value) {
    if let Value::Obj(o) = obj {
        o.borrow_mut().fields.insert(name.to_string(), v);
    }
}

/// `==` semantics: numeric comparison with promotion, value equality for
/// strings, identity for objects and arrays.
fn values_equal(l: &Value, r: &Value) -> bool {
    use Value::*;
    match (l, r) {
        (Null, Null) => true,
        (Bool(a), Bool(b)) => a == b,
        (Int(a), Int(b)) => a == b,
        (Int(_) | Float(_), Int(_) | Float(_)) => l.as_float() == r.as_float(),
        (Str(a), Str(b)) => a == b,
        (Obj(a), Obj(b)) => Rc::ptr_eq(a, b),
        (Arr(a), Arr(b)) => Rc::ptr_eq(a, b),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::check::check_program;
    use crate::lang::SourceFile;

    fn run(src: &str, suite: &str) -> Vec<CoverageTrace> {
        let files = vec![SourceFile::parse("a.mj", src).unwrap(), SourceFile::parse("suite.mj", suite).unwrap()];
        let prog = check_program(&files).unwrap_or_else(|e| panic!("{e:?}"));
        let tests = discover_tests(&prog, 1);
        run_tests(&prog, &tests, &RunConfig::default())
    }

    #[test]
    fn simple_assert_passes_and_covers() {
        let t = run("", "class S { void test_one() { assert(1 + 1 == 2); } }");
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].verdict, Verdict::Passed);
        assert_eq!(t[0].counts.len(), 1);
    }

    #[test]
    fn null_dereference_crashes_with_prefix() {
        let src = "class C { int f; }";
        let suite = "class S { void test_npe() { int a = 1; C c = null; int b = c.f; a = 2; } }";
        let t = run(src, suite);
        assert_eq!(t[0].verdict, Verdict::Crashed(NPE.to_string()));
        // statements are `int a`, `C c`, `int b` executed; `a = 2` not
        let covered: Vec<u64> = t[0].counts.values().copied().collect();
        assert_eq!(covered, vec![1, 1, 1]);
    }

    #[test]
    fn infinite_loop_times_out() {
        let t = run("", "class S { void test_loop() { int i = 0; while (true) { i++; } } }");
        assert_eq!(t[0].verdict, Verdict::TimedOut);
    }

    #[test]
    fn arithmetic_semantics() {
        let suite = r#"class S {
            void test_div() { assert(7 / 2 == 3); assert(7.0 / 2 == 3.5); assert(-7 % 3 == -1); }
            void test_zero() { float f = 1.0 / 0; assert(f > 1000000.0); int z = 1 / 0; }
            void test_catch() { int r = 0; try { r = 1 / 0; } catch (Exception e) { r = 5; } assert(r == 5); }
            void test_assert_not_caught() { try { assert(false); } catch (Exception e) { } }
            void test_strings() { String s = "ab" + 1 + true; assert(s == "ab1true"); assert(s.length() == 7); assert(new String() == ""); }
        }"#;
        let t = run("", suite);
        let v: Vec<&Verdict> = t.iter().map(|c| &c.verdict).collect();
        assert_eq!(
            v,
            vec![
                &Verdict::Passed,
                &Verdict::Crashed(ARITH.to_string()),
                &Verdict::Passed,
                &Verdict::Failed,
                &Verdict::Passed
            ]
        );
    }

    #[test]
    fn dispatch_casts_and_clone() {
        let src = r#"
class Shape { int sides() { return 0; } }
class Square extends Shape {
    int n = 4;
    int sides() { return n; }
    Object clone() { return (Square) super.clone(); }
}
class Tri extends Shape { int sides() { return 3; } }
"#;
        let suite = r#"class S {
            void test_virtual() { Shape s = new Square(); assert(s.sides() == 4); assert(s instanceof Square); assert(!(s instanceof Tri)); }
            void test_clone() { Square a = new Square(); a.n = 9; Square b = (Square) a.clone(); a.n = 1; assert(b.n == 9); assert(b != a); }
            void test_bad_cast() { Shape s = new Tri(); Square q = (Square) s; }
        }"#;
        let t = run(src, suite);
        assert_eq!(t[0].verdict, Verdict::Passed);
        assert_eq!(t[1].verdict, Verdict::Passed);
        assert_eq!(t[2].verdict, Verdict::Crashed(CCE.to_string()));
    }

    #[test]
    fn recursion_limit_is_a_crash() {
        let t = run("", "class S { int f(int n) { return f(n + 1); } void test_rec() { int x = f(0); } }");
        assert_eq!(t[0].verdict, Verdict::Crashed("StackOverflowError".to_string()));
    }

    #[test]
    fn runs_are_deterministic() {
        let suite = "class S { void test_a() { int s = 0; for (int i = 0; i < 10; i++) { s += i; } assert(s == 45); } }";
        assert_eq!(run("", suite), run("", suite));
    }
}
