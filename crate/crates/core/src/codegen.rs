//! Source generation: a memory-aware schedule of the graph and emitters for
//! MATLAB and for C calling BLAS/LAPACK.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{is_valid_id, ComputationGraph, OpKind, INPUT_A, INPUT_I};
use crate::numerics::{Complex, Real, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    Matlab,
    CBlas,
}

/// What to emit.
#[derive(Clone, Debug)]
pub struct EmitTarget {
    pub dialect: Dialect,
    pub function_name: String,
    /// Merge single-use chains of linear combinations into one multi-term sum.
    pub fuse_lincomb: bool,
    /// Graph id bound to the function argument.
    pub input: String,
}

impl EmitTarget {
    pub fn new(dialect: Dialect, function_name: &str) -> Self {
        EmitTarget { dialect, function_name: function_name.to_string(), fuse_lincomb: false, input: INPUT_A.to_string() }
    }

    pub fn fused(mut self, on: bool) -> Self {
        self.fuse_lincomb = on;
        self
    }
}

/// Evaluation order and buffer assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub order: Vec<String>,
    pub slot: BTreeMap<String, usize>,
    /// Number of distinct work buffers, inputs and identity excluded.
    pub peak_buffers: usize,
}

/// Dependency structure the scheduler works on; parents are indices of
/// scheduled nodes only (inputs are not listed).
#[derive(Clone, Debug)]
pub struct Dag {
    pub ids: Vec<String>,
    pub parents: Vec<Vec<usize>>,
    pub is_output: Vec<bool>,
}

impl Dag {
    pub fn from_graph<T: Scalar>(g: &ComputationGraph<T>) -> Dag {
        let mut ids = g.topo_order();
        ids.sort();
        let pos: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let parents = ids
            .iter()
            .map(|id| {
                let mut ps: Vec<usize> =
                    g.node(id).unwrap().parent_list().iter().filter_map(|p| pos.get(p).copied()).collect();
                ps.dedup();
                ps
            })
            .collect();
        let outs: BTreeSet<&str> = g.outputs().iter().map(|s| s.as_str()).collect();
        let is_output = ids.iter().map(|id| outs.contains(id.as_str())).collect();
        Dag { ids, parents, is_output }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn children_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.len()];
        for ps in &self.parents {
            for &p in ps {
                c[p] += 1;
            }
        }
        c
    }
}

/// Greedy list scheduling: among ready nodes take the one whose evaluation
/// releases the most buffers, ties by node id. Kernels are out of place, so a
/// node never shares a buffer with its own parents.
pub fn plan_schedule<T: Scalar>(g: &ComputationGraph<T>) -> Schedule {
    schedule_dag(&Dag::from_graph(g))
}

pub fn schedule_dag(d: &Dag) -> Schedule {
    let n = d.len();
    let mut remaining = d.children_counts();
    let mut done = vec![false; n];
    let mut order_idx = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..n {
            if done[v] || !d.parents[v].iter().all(|&p| done[p]) {
                continue;
            }
            let frees = d.parents[v].iter().filter(|&&p| remaining[p] == 1 && !d.is_output[p]).count();
            if best.is_none_or(|(_, f)| frees > f) {
                best = Some((v, frees));
            }
        }
        let (v, _) = best.expect("acyclic graph has a ready node");
        done[v] = true;
        for &p in &d.parents[v] {
            remaining[p] -= 1;
        }
        order_idx.push(v);
    }
    assign_slots(d, &order_idx)
}

/// Buffer assignment for a fixed order: lowest free slot not held by a parent.
pub fn assign_slots(d: &Dag, order_idx: &[usize]) -> Schedule {
    let mut remaining = d.children_counts();
    let mut free: BTreeSet<usize> = BTreeSet::new();
    let mut slot_of = vec![usize::MAX; d.len()];
    let mut nslots = 0;
    for &v in order_idx {
        let s = match free.iter().next().copied() {
            Some(s) => {
                free.remove(&s);
                s
            }
            None => {
                nslots += 1;
                nslots - 1
            }
        };
        slot_of[v] = s;
        for &p in &d.parents[v] {
            remaining[p] -= 1;
            if remaining[p] == 0 && !d.is_output[p] {
                free.insert(slot_of[p]);
            }
        }
        if remaining[v] == 0 && !d.is_output[v] {
            free.insert(s);
        }
    }
    Schedule {
        order: order_idx.iter().map(|&v| d.ids[v].clone()).collect(),
        slot: order_idx.iter().map(|&v| (d.ids[v].clone(), slot_of[v])).collect(),
        peak_buffers: nslots,
    }
}

/// One emitted operation.
#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Mult(String, String),
    Ldiv(String, String),
    /// `sum_k c_k X_k`.
    Sum(Vec<(Complex<f64>, String)>),
}

/// Straight-line program derived from a graph, optionally with fused sums.
#[derive(Clone, Debug)]
pub struct Program {
    pub stmts: BTreeMap<String, Stmt>,
    pub outputs: Vec<String>,
    pub complex: bool,
}

impl Program {
    pub fn from_graph<T: Scalar>(g: &ComputationGraph<T>, fuse: bool) -> Result<Program> {
        let order = g.topo_order();
        let c64 = |x: &T| {
            let c = x.to_complex();
            Complex::new(c.re.to_f64(), c.im.to_f64())
        };
        let mut uses: BTreeMap<&str, usize> = BTreeMap::new();
        for id in &order {
            for p in g.node(id).unwrap().parent_list() {
                *uses.entry(p).or_default() += 1;
            }
        }
        let outs: BTreeSet<&str> = g.outputs().iter().map(|s| s.as_str()).collect();
        let mut stmts: BTreeMap<String, Stmt> = BTreeMap::new();
        let mut complex = false;
        for id in &order {
            let n = g.node(id).unwrap();
            let (l, r) = (n.parents.0.clone(), n.parents.1.clone());
            let st = match n.op {
                OpKind::Mult => Stmt::Mult(l, r),
                OpKind::Ldiv => Stmt::Ldiv(l, r),
                OpKind::Lincomb => {
                    let (a, b) = n.coeffs.as_ref().unwrap();
                    let (a, b) = (c64(a), c64(b));
                    complex |= a.im != 0.0 || b.im != 0.0;
                    let mut terms = Vec::new();
                    for (c, p) in [(a, l), (b, r)] {
                        let inline = fuse
                            && uses.get(p.as_str()) == Some(&1)
                            && !outs.contains(p.as_str())
                            && matches!(stmts.get(&p), Some(Stmt::Sum(_)));
                        if inline {
                            let Some(Stmt::Sum(inner)) = stmts.remove(&p) else { unreachable!() };
                            terms.extend(inner.into_iter().map(|(ci, x)| (c * ci, x)));
                        } else {
                            terms.push((c, p));
                        }
                    }
                    if fuse {
                        terms = merge_terms(terms);
                    }
                    Stmt::Sum(terms)
                }
            };
            stmts.insert(id.clone(), st);
        }
        Ok(Program { stmts, outputs: g.outputs().to_vec(), complex })
    }

    pub fn dag(&self) -> Dag {
        let ids: Vec<String> = self.stmts.keys().cloned().collect();
        let pos: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let parents = ids
            .iter()
            .map(|id| {
                let ps: Vec<&str> = match &self.stmts[id] {
                    Stmt::Mult(l, r) | Stmt::Ldiv(l, r) => vec![l, r],
                    Stmt::Sum(t) => t.iter().map(|(_, x)| x.as_str()).collect(),
                };
                let mut v: Vec<usize> = ps.iter().filter_map(|p| pos.get(p).copied()).collect();
                v.sort();
                v.dedup();
                v
            })
            .collect();
        let outs: BTreeSet<&str> = self.outputs.iter().map(|s| s.as_str()).collect();
        let is_output = ids.iter().map(|id| outs.contains(id.as_str())).collect();
        Dag { ids, parents, is_output }
    }
}

// Combine repeated operands of a fused sum, keeping first-appearance order.
fn merge_terms(terms: Vec<(Complex<f64>, String)>) -> Vec<(Complex<f64>, String)> {
    let mut out: Vec<(Complex<f64>, String)> = Vec::new();
    for (c, x) in terms {
        match out.iter_mut().find(|(_, y)| *y == x) {
            Some(t) => t.0 += c,
            None => out.push((c, x)),
        }
    }
    out
}

/// Emitted source files.
#[derive(Clone, Debug)]
pub struct GeneratedCode {
    pub source: String,
    /// C header; `None` for MATLAB.
    pub header: Option<String>,
    /// Number of emitted operation statements.
    pub statements: usize,
    pub schedule: Schedule,
}

impl GeneratedCode {
    /// Writes `<stem>.m`, or `<stem>.c` and `<stem>.h`, next to `path`.
    pub fn write(&self, path: &Path, dialect: Dialect) -> Result<Vec<std::path::PathBuf>> {
        let mut written = Vec::new();
        match dialect {
            Dialect::Matlab => {
                let p = path.with_extension("m");
                std::fs::write(&p, &self.source)?;
                written.push(p);
            }
            Dialect::CBlas => {
                let c = path.with_extension("c");
                let h = path.with_extension("h");
                std::fs::write(&c, &self.source)?;
                std::fs::write(&h, self.header.as_deref().unwrap_or_default())?;
                written.push(c);
                written.push(h);
            }
        }
        Ok(written)
    }
}

/// Generate source evaluating the graph's output at a matrix argument.
pub fn gen_code<T: Scalar>(g: &ComputationGraph<T>, target: &EmitTarget) -> Result<GeneratedCode> {
    if !is_valid_id(&target.function_name) {
        return Err(Error::InvalidId(target.function_name.clone()));
    }
    if g.outputs().len() != 1 {
        return Err(Error::Unsupported(format!("code generation needs exactly one output, graph has {}", g.outputs().len())));
    }
    g.validate(&target.input)?;
    let prog = Program::from_graph(g, target.fuse_lincomb)?;
    let sched = schedule_dag(&prog.dag());
    match target.dialect {
        Dialect::Matlab => Ok(emit_matlab(&prog, &sched, target)),
        Dialect::CBlas => {
            if prog.complex {
                return Err(Error::Unsupported("C target requires real coefficients".into()));
            }
            Ok(emit_c(&prog, &sched, target))
        }
    }
}

/// [`gen_code`] followed by writing the files.
pub fn gen_code_to<T: Scalar>(g: &ComputationGraph<T>, target: &EmitTarget, path: &Path) -> Result<GeneratedCode> {
    let code = gen_code(g, target)?;
    code.write(path, target.dialect)?;
    Ok(code)
}

fn fmt_real(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_coeff(c: Complex<f64>) -> String {
    if c.im == 0.0 {
        fmt_real(c.re)
    } else if c.im < 0.0 {
        format!("({}-{}i)", fmt_real(c.re), fmt_real(-c.im))
    } else {
        format!("({}+{}i)", fmt_real(c.re), fmt_real(c.im))
    }
}

const MATLAB_RESERVED: &[&str] = &["n", "output", "eye", "size", "end", "function", "if", "for", "while", "i", "j"];

fn matlab_name(id: &str, input: &str) -> String {
    if id == input {
        "A".into()
    } else if id == INPUT_I {
        "I".into()
    } else if id == "A" || MATLAB_RESERVED.contains(&id) || id.starts_with("coeff") {
        format!("{id}_v")
    } else {
        id.to_string()
    }
}

fn emit_matlab(p: &Program, s: &Schedule, t: &EmitTarget) -> GeneratedCode {
    let name = |id: &str| matlab_name(id, &t.input);
    let mut o = String::new();
    let _ = writeln!(o, "function output = {}(A)", t.function_name);
    o.push_str("    n = size(A,1);\n    I = eye(n,n);\n");
    let mut count = 0;
    for id in &s.order {
        o.push('\n');
        let lhs = name(id);
        match &p.stmts[id] {
            Stmt::Mult(l, r) => {
                let _ = writeln!(o, "    {lhs} = {} * {};", name(l), name(r));
            }
            Stmt::Ldiv(l, r) => {
                let _ = writeln!(o, "    {lhs} = {} \\ {};", name(l), name(r));
            }
            Stmt::Sum(terms) => {
                for (k, (c, _)) in terms.iter().enumerate() {
                    let _ = writeln!(o, "    coeff{} = {};", k + 1, fmt_coeff(*c));
                }
                let rhs: Vec<String> = terms.iter().enumerate().map(|(k, (_, x))| format!("coeff{}*{}", k + 1, name(x))).collect();
                let _ = writeln!(o, "    {lhs} = {};", rhs.join(" + "));
            }
        }
        count += 1;
    }
    let _ = writeln!(o, "    output = {};", name(&p.outputs[0]));
    o.push_str("end\n");
    GeneratedCode { source: o, header: None, statements: count, schedule: s.clone() }
}

const C_MATMUL: &str = r#"static void mg_matmul(int n, const double *x, const double *y, double *z)
{
    const double one = 1.0, zero = 0.0;
    dgemm_("N", "N", &n, &n, &n, &one, x, &n, y, &n, &zero, z, &n);
}
"#;

const C_SOLVE: &str = r#"/* z = x \ y; lu is an n*n scratch copy of x */
static int mg_solve(int n, const double *x, const double *y, double *z, double *lu, int *ipiv)
{
    int info = 0;
    memcpy(lu, x, sizeof(double) * (size_t)n * n);
    memcpy(z, y, sizeof(double) * (size_t)n * n);
    dgesv_(&n, &n, lu, &n, ipiv, z, &n, &info);
    return info;
}
"#;

const C_COPY: &str = r#"static void mg_copy(int n, const double *x, double *z)
{
    memcpy(z, x, sizeof(double) * (size_t)n * n);
}
"#;

const C_EYE: &str = r#"static void mg_eye(int n, double *z)
{
    memset(z, 0, sizeof(double) * (size_t)n * n);
    for (int i = 0; i < n; i++)
        z[i + (size_t)i * n] = 1.0;
}
"#;

fn emit_c(p: &Program, s: &Schedule, t: &EmitTarget) -> GeneratedCode {
    let f = &t.function_name;
    let guard = format!("{}_H", f.to_uppercase());
    let mut h = String::new();
    let _ = writeln!(h, "#ifndef {guard}\n#define {guard}\n");
    h.push_str("/* BLAS/LAPACK symbols, resolved at link time */\n");
    h.push_str("void dgemm_(const char *ta, const char *tb, const int *m, const int *n, const int *k,\n");
    h.push_str("            const double *alpha, const double *a, const int *lda, const double *b,\n");
    h.push_str("            const int *ldb, const double *beta, double *c, const int *ldc);\n");
    h.push_str("void dgesv_(const int *n, const int *nrhs, double *a, const int *lda, int *ipiv,\n");
    h.push_str("            double *b, const int *ldb, int *info);\n\n");
    let _ = writeln!(h, "/* out = f(A) for column-major n*n arrays. Returns 0, -1 on allocation\n   failure or the LAPACK info of a singular solve. */");
    let _ = writeln!(h, "int {f}(int n, const double *A, double *out);\n\n#endif");

    let uses_ldiv = p.stmts.values().any(|st| matches!(st, Stmt::Ldiv(..)));
    let needs_eye = p.stmts.values().any(|st| match st {
        Stmt::Mult(l, r) | Stmt::Ldiv(l, r) => l == INPUT_I || r == INPUT_I,
        Stmt::Sum(_) => false,
    }) || p.outputs[0] == INPUT_I;
    let nb = s.peak_buffers;
    let buf = |id: &str| -> String {
        if id == t.input {
            "A".into()
        } else if id == INPUT_I {
            "Id".into()
        } else {
            format!("W[{}]", s.slot[id])
        }
    };
    let mut o = String::new();
    let _ = writeln!(o, "#include <stdlib.h>\n#include <string.h>\n\n#include \"{f}.h\"\n");
    let uses_mult = p.stmts.values().any(|st| matches!(st, Stmt::Mult(..)));
    for (on, k) in [(uses_mult, C_MATMUL), (uses_ldiv, C_SOLVE), (true, C_COPY), (needs_eye, C_EYE)] {
        if on {
            o.push_str(k);
            o.push('\n');
        }
    }
    let _ = writeln!(o, "\nint {f}(int n, const double *A, double *out)\n{{");
    o.push_str("    size_t nn = (size_t)n * n;\n    int info = 0;\n");
    let extra = if uses_ldiv { 1 } else { 0 } + if needs_eye { 1 } else { 0 };
    let _ = writeln!(o, "    double *work = malloc(sizeof(double) * nn * {});", (nb + extra).max(1));
    if uses_ldiv {
        o.push_str("    int *ipiv = malloc(sizeof(int) * (size_t)n);\n");
        o.push_str("    if (!work || !ipiv) {\n        free(work);\n        free(ipiv);\n        return -1;\n    }\n");
    } else {
        o.push_str("    if (!work)\n        return -1;\n");
    }
    let _ = writeln!(o, "    double *W[{}];", nb.max(1));
    let _ = writeln!(o, "    for (int k = 0; k < {nb}; k++)\n        W[k] = work + nn * k;");
    let mut next = nb;
    if uses_ldiv {
        let _ = writeln!(o, "    double *LU = work + nn * {next};");
        next += 1;
    }
    if needs_eye {
        let _ = writeln!(o, "    double *Id = work + nn * {next};\n    mg_eye(n, Id);");
    }
    let mut count = 0;
    for id in &s.order {
        let z = buf(id);
        match &p.stmts[id] {
            Stmt::Mult(l, r) => {
                let _ = writeln!(o, "    /* {id} */\n    mg_matmul(n, {}, {}, {z});", buf(l), buf(r));
            }
            Stmt::Ldiv(l, r) => {
                let _ = writeln!(
                    o,
                    "    /* {id} */\n    info = mg_solve(n, {}, {}, {z}, LU, ipiv);\n    if (info)\n        goto done;",
                    buf(l),
                    buf(r)
                );
            }
            Stmt::Sum(terms) => {
                let _ = writeln!(o, "    /* {id} */");
                let mats: Vec<(String, &Complex<f64>)> = terms.iter().filter(|(_, x)| x != INPUT_I).map(|(c, x)| (buf(x), c)).collect();
                let diag: f64 = terms.iter().filter(|(_, x)| x == INPUT_I).map(|(c, _)| c.re).sum();
                if mats.is_empty() {
                    o.push_str("    for (size_t k = 0; k < nn; k++)\n");
                    let _ = writeln!(o, "        {z}[k] = 0.0;");
                } else {
                    let rhs: Vec<String> = mats.iter().map(|(b, c)| format!("{} * {b}[k]", fmt_real(c.re))).collect();
                    o.push_str("    for (size_t k = 0; k < nn; k++)\n");
                    let _ = writeln!(o, "        {z}[k] = {};", rhs.join(" + "));
                }
                if terms.iter().any(|(_, x)| x == INPUT_I) {
                    o.push_str("    for (int i = 0; i < n; i++)\n");
                    let _ = writeln!(o, "        {z}[i + (size_t)i * n] += {};", fmt_real(diag));
                }
            }
        }
        count += 1;
    }
    let _ = writeln!(o, "    mg_copy(n, {}, out);", buf(&p.outputs[0]));
    if uses_ldiv {
        o.push_str("done:\n    free(ipiv);\n");
    }
    o.push_str("    free(work);\n    return info;\n}\n");
    GeneratedCode { source: o, header: Some(h), statements: count, schedule: s.clone() }
}
