use super::*;
use crate::ast::DistanceMetric;
use crate::donor::collect_donors;
use crate::lang::printer::print_node;

struct Fixture {
    files: Vec<SourceFile>,
    checked: CheckedProgram,
}

fn fixture(src: &str) -> Fixture {
    let files = vec![SourceFile::parse("a.mj", src).unwrap()];
    let checked = check_program(&files).unwrap_or_else(|e| panic!("{e:?}"));
    Fixture { files, checked }
}

impl Fixture {
    fn stmt(&self, text: &str) -> NodeId {
        self.checked.asts[0]
            .preorder()
            .into_iter()
            .find(|n| n.is_statement() && print_node(n).starts_with(text))
            .unwrap_or_else(|| panic!("no statement `{text}`"))
            .id
    }

    fn matches(&self, stmt: &str) -> Vec<PatternMatch> {
        let site = Site::new(&self.checked, 0, self.stmt(stmt)).unwrap();
        match_statement(&site, &PatternFilter::all())
    }

    /// Patched programs (pretty-printed) produced by `pattern` at `stmt`.
    fn outcomes(&self, stmt: &str, pattern: &str) -> Vec<String> {
        let id = self.stmt(stmt);
        let site = Site::new(&self.checked, 0, id).unwrap();
        let donors = collect_donors(&self.checked, 0, id, DistanceMetric::PathLength);
        let mut out = Vec::new();
        for m in match_statement(&site, &PatternFilter::all()).iter().filter(|m| m.descriptor.id == pattern) {
            let Ok(gen) = apply_pattern(&site, m, &donors) else { continue };
            for r in realize(&self.files, &self.checked, 0, pattern, gen, CANDIDATE_CAP).kept {
                out.push(r.files[0].text.clone());
            }
        }
        out
    }
}

fn printed(src: &str) -> String {
    pretty_print(&crate::lang::parse(src).unwrap())
}

fn assert_has(outs: &[String], expected: &str) {
    let want = printed(expected);
    assert!(outs.contains(&want), "expected\n{want}\namong {} outcomes:\n{}", outs.len(), outs.join("\n----\n"));
}

#[test]
fn catalog_aggregates() {
    // independent tallies, written out per sub-pattern
    let update = ["FP5", "FP6.1", "FP7.1", "FP7.2", "FP8.1", "FP8.2", "FP8.3", "FP9.1", "FP9.2", "FP10.1", "FP10.2", "FP11.1", "FP11.2", "FP11.3", "FP12", "FP13.1", "FP13.2"];
    let delete = ["FP6.2", "FP10.3", "FP15.1", "FP15.2"];
    let count = |pred: &dyn Fn(&PatternDescriptor) -> bool| catalog().iter().filter(|d| pred(d)).count();
    assert_eq!(catalog().len(), 35);
    assert_eq!(count(&|d| d.action == Action::Update), 17);
    assert_eq!(count(&|d| d.action == Action::Delete), 4);
    assert_eq!(count(&|d| d.action == Action::Insert), 13);
    assert_eq!(count(&|d| d.action == Action::Move), 1);
    assert_eq!(count(&|d| d.granularity.contains(&Granularity::Expression)), 21);
    assert_eq!(count(&|d| d.granularity.contains(&Granularity::Statement)), 17);
    assert_eq!(count(&|d| d.granularity.contains(&Granularity::Method)), 1);
    assert_eq!(count(&|d| d.spread.contains(&Spread::Single)), 30);
    assert_eq!(count(&|d| d.spread.contains(&Spread::Multiple)), 7);
    for id in update {
        assert_eq!(descriptor(id).unwrap().action, Action::Update, "{id}");
    }
    for id in delete {
        assert_eq!(descriptor(id).unwrap().action, Action::Delete, "{id}");
    }
}

#[test]
fn default_values() {
    let show = |t: LangType| default_value(&t).map(|n| print_node(&n));
    assert_eq!(show(LangType::Boolean).as_deref(), Some("false"));
    assert_eq!(show(LangType::Int).as_deref(), Some("0"));
    assert_eq!(show(LangType::Float).as_deref(), Some("0"));
    assert_eq!(show(LangType::Str).as_deref(), Some("new String()"));
    assert_eq!(show(LangType::class("C")).as_deref(), Some("null"));
    assert_eq!(show(LangType::Void), None);
    assert_eq!(print_node(&default_return(&LangType::Void)), "return;");
}

#[test]
fn pattern_filter_families() {
    let f = PatternFilter::parse("FP2.1,fp11").unwrap();
    assert!(f.admits("FP2.1") && f.admits("FP11.3"));
    assert!(!f.admits("FP2.2") && !f.admits("FP1") && !f.admits("FP15.1"));
    let f = PatternFilter::parse("FP1").unwrap();
    assert!(f.admits("FP1") && !f.admits("FP13.1"));
    assert!(PatternFilter::parse("FP99").is_err());
}

const SHAPES: &str = "class Shape { int w; } class Rect extends Shape { int area() { return w * w; } }";

#[test]
fn fp1_wraps_cast_and_dependents() {
    let src = format!("{SHAPES} class U {{ int use(Rect r) {{ return r.area(); }} int m(Shape s) {{ int k = 0; Rect r = (Rect) s; k = use(r); return k; }} }}");
    let f = fixture(&src);
    let outs = f.outcomes("Rect r = (Rect) s;", "FP1");
    assert_has(
        &outs,
        &format!("{SHAPES} class U {{ int use(Rect r) {{ return r.area(); }} int m(Shape s) {{ int k = 0; if (s instanceof Rect) {{ Rect r = (Rect) s; k = use(r); }} return k; }} }}"),
    );
    let guarded = format!("{SHAPES} class U {{ int m(Shape s) {{ if (s instanceof Rect) {{ Rect r = (Rect) s; return r.area(); }} return 0; }} }}");
    assert!(fixture(&guarded).outcomes("Rect r = (Rect) s;", "FP1").is_empty());
    let plain = format!("{SHAPES} class U {{ int m(Shape s) {{ int k = s.w; return k; }} }}");
    assert!(fixture(&plain).matches("int k = s.w;").iter().all(|m| m.descriptor.id != "FP1"));
}

#[test]
fn fp2_variants() {
    let src = "class C { int f; } class U { int m(C x) { int k = 0; while (k < 3) { x.f = 1; k++; } return k; } }";
    let f = fixture(src);
    assert_has(
        &f.outcomes("x.f = 1;", "FP2.4"),
        "class C { int f; } class U { int m(C x) { int k = 0; while (k < 3) { if (x == null) { continue; } x.f = 1; k++; } return k; } }",
    );
    assert_has(
        &f.outcomes("x.f = 1;", "FP2.1"),
        "class C { int f; } class U { int m(C x) { int k = 0; while (k < 3) { if (x != null) { x.f = 1; } k++; } return k; } }",
    );
    assert_has(
        &f.outcomes("x.f = 1;", "FP2.2"),
        "class C { int f; } class U { int m(C x) { int k = 0; while (k < 3) { if (x == null) { return 0; } x.f = 1; k++; } return k; } }",
    );
    assert!(f.outcomes("x.f = 1;", "FP2.3").is_empty(), "non-void method");
    let void = fixture("class C { int f; } class U { void m(C x) { x.f = 1; } }");
    assert_has(&void.outcomes("x.f = 1;", "FP2.3"), "class C { int f; } class U { void m(C x) { if (x == null) { return; } x.f = 1; } }");
    let prim = fixture("class U { int m(int a) { int b = a + 1; return b; } }");
    assert!(prim.matches("int b = a + 1;").iter().all(|m| !m.descriptor.id.starts_with("FP2")));
    let checked = fixture("class C { int f; } class U { void m(C x) { if (x != null) { x.f = 1; } } }");
    assert!(checked.outcomes("x.f = 1;", "FP2.1").is_empty());
}

#[test]
fn fp3_range_checker() {
    let f = fixture("class U { int m(int[] a, int i) { int v = 0; v = a[i]; return v; } }");
    assert_has(
        &f.outcomes("v = a[i];", "FP3"),
        "class U { int m(int[] a, int i) { int v = 0; if (i >= 0 && i < a.length) { v = a[i]; } return v; } }",
    );
    let dominated = fixture("class U { int m(int[] a) { int v = 0; if (a.length > 0) { v = a[0]; } return v; } }");
    assert!(dominated.outcomes("v = a[0];", "FP3").is_empty());
}

#[test]
fn fp4_insertions() {
    let src = "class Stream { int n; } class U { void flush(Stream s) { s.n = 0; } void close(Stream s) { s.n = -1; } void m(Stream s) { close(s); } }";
    let f = fixture(src);
    assert_has(
        &f.outcomes("close(s);", "FP4.1"),
        "class Stream { int n; } class U { void flush(Stream s) { s.n = 0; } void close(Stream s) { s.n = -1; } void m(Stream s) { flush(s); close(s); } }",
    );
    assert_has(
        &f.outcomes("close(s);", "FP4.2"),
        "class Stream { int n; } class U { void flush(Stream s) { s.n = 0; } void close(Stream s) { s.n = -1; } void m(Stream s) { try { close(s); } catch (Exception e) { } } }",
    );
    // a donor null check must not come back as an FP4.4 guard
    let g = fixture("class C { int f; } class U { int m(C x, int k) { if (x != null) { k = 1; } if (k > 2) { k = 3; } x.f = k; return k; } }");
    let outs = g.outcomes("x.f = k;", "FP4.4");
    assert!(!outs.is_empty());
    assert!(outs.iter().all(|o| !o.contains("if (x != null) {\n            x.f")), "{outs:?}");
}

#[test]
fn fp5_clone() {
    let src = "class Matrix { int n; Matrix clone() { return new Matrix(); } Matrix copy() { return new Matrix(); } }";
    let f = fixture(src);
    assert_eq!(
        f.outcomes("return new Matrix();", "FP5"),
        vec![printed("class Matrix { int n; Matrix clone() { return (Matrix) super.clone(); } Matrix copy() { return new Matrix(); } }")]
    );
    let outside = fixture("class Matrix { Matrix copy() { return new Matrix(); } }");
    assert!(outside.outcomes("return new Matrix();", "FP5").is_empty());
    let other = fixture("class Other { } class Matrix { Object clone() { return new Other(); } }");
    assert!(other.outcomes("return new Other();", "FP5").is_empty());
}

#[test]
fn fp6_conditions() {
    let f = fixture("class U { int m(boolean a, boolean b) { int k = 0; if (a && b) { k = 1; } return k; } }");
    let outs = f.outcomes("if (a && b)", "FP6.2");
    assert_has(&outs, "class U { int m(boolean a, boolean b) { int k = 0; if (a) { k = 1; } return k; } }");
    assert_has(&outs, "class U { int m(boolean a, boolean b) { int k = 0; if (b) { k = 1; } return k; } }");
    let g = fixture("class U { int m(boolean a, boolean b) { int k = 0; if (a) { k = 1; } return k; } }");
    let outs = g.outcomes("if (a)", "FP6.3");
    assert_has(&outs, "class U { int m(boolean a, boolean b) { int k = 0; if (a && b) { k = 1; } return k; } }");
    assert_has(&outs, "class U { int m(boolean a, boolean b) { int k = 0; if (a || b) { k = 1; } return k; } }");
    // a donor differing only by the operator is left to operator mutation
    let h = fixture("class U { int m(int a, int b) { int k = 0; boolean t = a <= b; if (a < b) { k = 1; } return k; } }");
    assert!(h.outcomes("if (a < b)", "FP6.1").iter().all(|o| !o.contains("if (a <= b)")));
}

#[test]
fn fp7_and_fp8() {
    let f = fixture("class U { float m(int a, int b) { int x = a / b; return x; } }");
    assert_has(&f.outcomes("int x = a / b;", "FP7.1"), "class U { float m(int a, int b) { float x = a / b; return x; } }");
    let g = fixture("class U { float m(int a, int b) { float x = a / b; return x; } }");
    assert_has(&g.outcomes("float x = a / b;", "FP8.1"), "class U { float m(int a, int b) { float x = (float) a / b; return x; } }");
    assert_has(&g.outcomes("float x = a / b;", "FP8.2"), "class U { float m(int a, int b) { float x = a / (float) b; return x; } }");
    let h = fixture("class U { float m() { float x = 1 / 2; return x; } }");
    assert_has(&h.outcomes("float x = 1 / 2;", "FP8.3"), "class U { float m() { float x = 1.0 / 2; return x; } }");
    let fl = fixture("class U { float m(float a, float b) { float x = a / b; return x; } }");
    assert!(fl.matches("float x = a / b;").iter().all(|m| !m.descriptor.id.starts_with("FP8")));
    let casts = fixture("class Base { } class Derived extends Base { } class U { Base m(Object e) { Base b = (Base) e; return b; } }");
    assert_has(
        &casts.outcomes("Base b = (Base) e;", "FP7.2"),
        "class Base { } class Derived extends Base { } class U { Base m(Object e) { Base b = (Derived) e; return b; } }",
    );
}

#[test]
fn fp9_literals() {
    let f = fixture("class U { boolean m() { boolean t = true; return t; } }");
    assert_eq!(f.outcomes("boolean t = true;", "FP9.1"), vec![printed("class U { boolean m() { boolean t = false; return t; } }")]);
    let g = fixture("class U { int m(int a) { int k = a + 5; return k; } }");
    let outs = g.outcomes("int k = a + 5;", "FP9.1");
    assert_has(&outs, "class U { int m(int a) { int k = a + 6; return k; } }");
    assert_has(&outs, "class U { int m(int a) { int k = a + 4; return k; } }");
}

#[test]
fn fp10_invocations() {
    let src = "class U { int max(int a, int b) { return a; } int min(int a, int b) { return b; } int f(int a) { return a; } int f(int a, int b) { return b; } int m(int a, int b) { int k = max(a, b); k = f(a, b); return k; } }";
    let f = fixture(src);
    assert_has(&f.outcomes("int k = max(a, b);", "FP10.1"), &src.replace("int k = max(a, b);", "int k = min(a, b);"));
    let outs = f.outcomes("k = f(a, b);", "FP10.3");
    assert_has(&outs, &src.replace("k = f(a, b);", "k = f(a);"));
    assert_has(&outs, &src.replace("k = f(a, b);", "k = f(b);"));
    // bare variable arguments are left to variable mutation
    assert!(f.outcomes("k = f(a, b);", "FP10.2").is_empty());
}

#[test]
fn fp11_operators() {
    let f = fixture("class U { boolean m(int a, int b) { boolean r = a < b; return r; } }");
    let outs = f.outcomes("boolean r = a < b;", "FP11.1");
    for op in ["<=", ">", ">=", "==", "!="] {
        assert_has(&outs, &format!("class U {{ boolean m(int a, int b) {{ boolean r = a {op} b; return r; }} }}"));
    }
    assert_eq!(outs.len(), 5);
    let g = fixture("class U { int m(int a, int b, int c) { int r = a + b * c; return r; } }");
    assert_has(&g.outcomes("int r = a + b * c;", "FP11.2"), "class U { int m(int a, int b, int c) { int r = (a + b) * c; return r; } }");
    let h = fixture("class T { } class U { boolean m(Object x) { boolean r = x instanceof T; return r; } }");
    assert_has(&h.outcomes("boolean r = x instanceof T;", "FP11.3"), "class T { } class U { boolean m(Object x) { boolean r = x != null; return r; } }");
}

#[test]
fn fp12_return() {
    let src = "class U { int f(int a) { return a + 1; } int g(int a) { return a * 2; } int m(int a) { int t = g(a); return f(a); } }";
    let f = fixture(src);
    assert_has(&f.outcomes("return f(a);", "FP12"), &src.replace("return f(a);", "return g(a);"));
    let var = fixture("class U { int m(int x) { return x; } }");
    assert!(var.outcomes("return x;", "FP12").is_empty());
    let lit = fixture("class U { int m() { return 0; } }");
    assert!(lit.outcomes("return 0;", "FP12").is_empty());
}

#[test]
fn fp13_variables() {
    let src = "class U { int m(int n) { int sum = 0; int j = 2; for (int i = 0; i < n; i++) { sum = sum + i; } return sum; } }";
    let f = fixture(src);
    let outs = f.outcomes("sum = sum + i;", "FP13.1");
    assert_has(&outs, &src.replace("sum = sum + i;", "sum = sum + j;"));
    assert!(outs.iter().all(|o| !o.contains("sum = sum + i;") || o.contains("j")));
    let sole = fixture("class U { boolean m(boolean b) { return b; } }");
    assert!(sole.outcomes("return b;", "FP13.1").is_empty());
}

#[test]
fn fp14_and_fp15() {
    let src = "class U { int m() { int x = 1; int y = 2; x = y; y = 3; return x; } }";
    let f = fixture(src);
    let outs = f.outcomes("y = 3;", "FP14");
    assert_eq!(outs[0], printed("class U { int m() { int x = 1; int y = 2; y = 3; x = y; return x; } }"));
    assert!(outs.iter().all(|o| !o.contains("y = 3;\n        int y")));
    let single = fixture("class U { void m() { int x = 1; } }");
    assert!(single.outcomes("int x = 1;", "FP14").is_empty());
    let redundant = fixture("class U { int m(int x) { x = x; return x; } }");
    assert_has(&redundant.outcomes("x = x;", "FP15.1"), "class U { int m(int x) { return x; } }");
    let used = fixture("class U { int m() { int x = 1; return x; } }");
    assert!(used.outcomes("int x = 1;", "FP15.1").iter().all(|o| !o.contains("return x;")));
    let body = fixture("class U { int m(int x) { x = x + 1; return x; } }");
    assert_eq!(body.outcomes("x = x + 1;", "FP15.2"), vec![printed("class U { int m(int x) { return 0; } }")]);
}

#[test]
fn traversal_order_puts_invocation_before_its_variable() {
    let f = fixture("class U { int g(int x) { return x; } int m(int x) { int v = 0; v = g(x); return v; } }");
    let ms = f.matches("v = g(x);");
    let first = |id: &str, text: &str| {
        ms.iter()
            .position(|m| m.descriptor.id == id && m.bindings.0.values().any(|b| b.to_string() == text))
            .unwrap()
    };
    assert!(first("FP10.1", "g") < first("FP13.1", "x"));
    let ms = fixture(&format!("{SHAPES} class U {{ int m(Shape s) {{ Rect r = (Rect) s; return 0; }} }}")).matches("Rect r = (Rect) s;");
    assert!(ms.iter().any(|m| m.descriptor.id == "FP1") && ms.iter().any(|m| m.descriptor.id == "FP7.2"));
    for m in &ms {
        assert!(m.node_order <= ms.last().unwrap().node_order);
    }
}
