//! The CGR text format: one assignment per statement, coefficients bound to
//! `coeff1`/`coeff2` right before the linear combination that uses them.
//!
//! ```text
//! graph_coeff_type="Float64";
//!
//! A2tmp=A*A;
//! coeff1=1.0;
//! coeff2=-0.5;
//! B_0_1=coeff1*I+coeff2*A2tmp;
//! # outputs: B_0_1
//! ```
//!
//! Lines starting with `#` carry `key: value` metadata. `outputs` and `input`
//! are interpreted; other keys are kept verbatim.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{is_valid_id, ComputationGraph, OpKind, INPUT_A, INPUT_I};
use crate::numerics::{BigReal, Complex, Scalar};

/// A parsed file: the graph plus the header tag and free-form metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct CgrDocument<T> {
    pub coeff_type_tag: String,
    pub graph: ComputationGraph<T>,
    /// Comment metadata other than `outputs` and `input`, in file order.
    pub metadata: Vec<(String, String)>,
    /// Id of the argument (`A` unless declared otherwise).
    pub input: String,
}

/// Coefficient type named by a header tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoeffType {
    pub complex: bool,
    /// `None` for binary64.
    pub bits: Option<u32>,
}

impl CoeffType {
    pub fn parse(tag: &str) -> Result<CoeffType> {
        let (complex, rest) = match tag.strip_prefix("Complex") {
            Some(r) => (true, r.trim_start_matches('{').trim_end_matches('}')),
            None => (false, tag),
        };
        let bits = match rest {
            "Float64" | "F64" => None,
            r => match r.strip_prefix("BigFloat") {
                Some("") => Some(256),
                Some(b) => Some(b.parse::<u32>().map_err(|_| Error::Parse { line: 1, msg: format!("bad precision in tag {tag:?}") })?),
                None => return Err(Error::Parse { line: 1, msg: format!("unknown coefficient type {tag:?}") }),
            },
        };
        Ok(CoeffType { complex, bits })
    }

    pub fn prec(&self) -> u32 {
        self.bits.unwrap_or(53)
    }
}

/// Graph read from a file, with the coefficient type chosen by its header.
#[derive(Clone, Debug)]
pub enum AnyGraph {
    F64(CgrDocument<f64>),
    C64(CgrDocument<Complex<f64>>),
    Big(CgrDocument<BigReal>),
    CBig(CgrDocument<Complex<BigReal>>),
}

impl AnyGraph {
    pub fn tag(&self) -> &str {
        match self {
            AnyGraph::F64(d) => &d.coeff_type_tag,
            AnyGraph::C64(d) => &d.coeff_type_tag,
            AnyGraph::Big(d) => &d.coeff_type_tag,
            AnyGraph::CBig(d) => &d.coeff_type_tag,
        }
    }
}

fn fmt_tag<T: Scalar>(g: &ComputationGraph<T>) -> String {
    T::type_tag(g.precision())
}

/// Render in normal form: header, blank line, statements in topological
/// order, then the metadata comments.
pub fn render_cgr<T: Scalar>(g: &ComputationGraph<T>, metadata: &[(String, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph_coeff_type=\"{}\";\n", fmt_tag(g));
    for id in g.topo_order() {
        let n = g.node(&id).unwrap();
        let (l, r) = (&n.parents.0, &n.parents.1);
        match n.op {
            OpKind::Mult => {
                let _ = writeln!(s, "{id}={l}*{r};");
            }
            OpKind::Ldiv => {
                let _ = writeln!(s, "{id}={l}\\{r};");
            }
            OpKind::Lincomb => {
                let (a, b) = n.coeffs.as_ref().unwrap();
                let _ = writeln!(s, "coeff1={};\ncoeff2={};\n{id}=coeff1*{l}+coeff2*{r};", a.to_roundtrip(), b.to_roundtrip());
            }
        }
    }
    let inputs: Vec<String> = g.free_inputs().into_iter().filter(|i| i != INPUT_A).collect();
    if let [x] = inputs.as_slice() {
        let _ = writeln!(s, "# input: {x}");
    }
    for (k, v) in metadata {
        let _ = writeln!(s, "# {k}: {v}");
    }
    let _ = writeln!(s, "# outputs: {}", g.outputs().join(","));
    s
}

pub fn export_compgraph<T: Scalar>(g: &ComputationGraph<T>, path: &Path) -> Result<()> {
    export_compgraph_with(g, &[], path)
}

pub fn export_compgraph_with<T: Scalar>(g: &ComputationGraph<T>, metadata: &[(String, String)], path: &Path) -> Result<()> {
    std::fs::write(path, render_cgr(g, metadata))?;
    Ok(())
}

/// Read a graph, converting its coefficients to `T`.
pub fn import_compgraph<T: Scalar>(path: &Path) -> Result<ComputationGraph<T>> {
    Ok(parse_cgr::<T>(&std::fs::read_to_string(path)?)?.graph)
}

/// Read a graph with the coefficient type its header names.
pub fn import_any(path: &Path) -> Result<AnyGraph> {
    parse_cgr_any(&std::fs::read_to_string(path)?)
}

pub fn parse_cgr_any(text: &str) -> Result<AnyGraph> {
    let ct = CoeffType::parse(&raw_tag(text)?.0)?;
    Ok(match (ct.complex, ct.bits) {
        (false, None) => AnyGraph::F64(parse_cgr(text)?),
        (true, None) => AnyGraph::C64(parse_cgr(text)?),
        (false, Some(_)) => AnyGraph::Big(parse_cgr(text)?),
        (true, Some(_)) => AnyGraph::CBig(parse_cgr(text)?),
    })
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

// Statements split on ';' with the line each one starts on; comments apart.
fn statements(text: &str) -> (Vec<(usize, String)>, Vec<(usize, String)>) {
    let mut stmts = Vec::new();
    let mut comments = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let (code, comment) = match line.find('#') {
            Some(k) => (&line[..k], Some(line[k + 1..].trim())),
            None => (line, None),
        };
        if let Some(c) = comment {
            comments.push((ln, c.to_string()));
        }
        for ch in code.chars() {
            if cur.trim().is_empty() && !ch.is_whitespace() {
                start = ln;
            }
            if ch == ';' {
                stmts.push((start, std::mem::take(&mut cur)));
            } else {
                cur.push(ch);
            }
        }
        cur.push(' ');
    }
    if !cur.trim().is_empty() {
        stmts.push((start, cur));
    }
    (stmts, comments)
}

fn raw_tag(text: &str) -> Result<(String, usize)> {
    let (stmts, _) = statements(text);
    let (ln, first) = stmts.first().ok_or_else(|| err(1, "empty file"))?;
    let s: String = first.chars().filter(|c| !c.is_whitespace()).collect();
    let v = s
        .strip_prefix("graph_coeff_type=")
        .ok_or_else(|| err(*ln, "expected graph_coeff_type header"))?;
    Ok((v.trim_matches('"').to_string(), *ln))
}

enum Rhs {
    Ident(String),
    Number(String),
    Binary(char, String, String),
    Sum(Vec<(String, String)>),
}

fn is_number_start(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.')
}

fn parse_rhs(ln: usize, rhs: &str) -> Result<Rhs> {
    if rhs.is_empty() {
        return Err(err(ln, "empty right-hand side"));
    }
    if is_number_start(rhs) {
        return Ok(Rhs::Number(rhs.to_string()));
    }
    if rhs.contains('+') {
        let mut terms = Vec::new();
        for t in rhs.split('+') {
            let (c, x) = t.split_once('*').ok_or_else(|| err(ln, format!("term {t:?} is not coeff*ident")))?;
            terms.push((c.to_string(), x.to_string()));
        }
        return Ok(Rhs::Sum(terms));
    }
    for op in ['*', '\\'] {
        if let Some((a, b)) = rhs.split_once(op) {
            return Ok(Rhs::Binary(op, a.to_string(), b.to_string()));
        }
    }
    Ok(Rhs::Ident(rhs.to_string()))
}

/// Parse CGR text. Coefficients are read at the precision of the header tag
/// and then converted to `T`.
pub fn parse_cgr<T: Scalar>(text: &str) -> Result<CgrDocument<T>> {
    let (tag, _) = raw_tag(text)?;
    let ct = CoeffType::parse(&tag)?;
    let prec = ct.prec();
    let (stmts, comments) = statements(text);

    let mut metadata = Vec::new();
    let mut outputs: Option<Vec<String>> = None;
    let mut input = INPUT_A.to_string();
    for (_, c) in &comments {
        let Some((k, v)) = c.split_once(':') else { continue };
        let (k, v) = (k.trim(), v.trim());
        match k {
            "outputs" => outputs = Some(v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()),
            "input" => input = v.to_string(),
            _ => metadata.push((k.to_string(), v.to_string())),
        }
    }

    let mut g = ComputationGraph::<T>::new();
    let mut coeffs: BTreeMap<String, T> = BTreeMap::new();
    let mut alias: BTreeMap<String, String> = BTreeMap::new();
    let mut assigned: BTreeSet<String> = BTreeSet::new();
    let mut last: Option<String> = None;
    let number = |ln: usize, s: &str| -> Result<T> {
        T::parse_prec(s, prec).ok_or_else(|| err(ln, format!("bad number {s:?}")))
    };
    for (ln, st) in stmts.iter().skip(1) {
        let ln = *ln;
        let st: String = st.chars().filter(|c| !c.is_whitespace()).collect();
        if st.is_empty() {
            continue;
        }
        let (lhs, rhs) = st.split_once('=').ok_or_else(|| err(ln, format!("expected assignment in {st:?}")))?;
        if !is_valid_id(lhs) {
            return Err(err(ln, format!("invalid identifier {lhs:?}")));
        }
        let rhs = parse_rhs(ln, rhs)?;
        let is_coeff = lhs.starts_with("coeff") && lhs[5..].chars().all(|c| c.is_ascii_digit()) && lhs.len() > 5;
        if is_coeff {
            let Rhs::Number(v) = rhs else {
                return Err(err(ln, format!("{lhs} must be bound to a number")));
            };
            coeffs.insert(lhs.to_string(), number(ln, &v)?);
            continue;
        }
        if assigned.contains(lhs) || lhs == INPUT_I || lhs == input {
            return Err(err(ln, format!("duplicate assignment to {lhs}")));
        }
        let resolve = |x: &str| -> Result<String> {
            let x = alias.get(x).map(|s| s.as_str()).unwrap_or(x);
            if x == INPUT_I || x == input || assigned.contains(x) {
                Ok(x.to_string())
            } else {
                Err(err(ln, format!("undeclared identifier {x}")))
            }
        };
        let coef = |c: &str| -> Result<T> {
            if is_number_start(c) {
                return number(ln, c);
            }
            coeffs.get(c).cloned().ok_or_else(|| err(ln, format!("coefficient {c} is not bound")))
        };
        match rhs {
            Rhs::Ident(x) => {
                let target = resolve(&x)?;
                alias.insert(lhs.to_string(), target);
            }
            Rhs::Number(v) => {
                let c = number(ln, &v)?;
                g.add_lincomb(lhs, c, INPUT_I, T::zero(), INPUT_I).map_err(|e| err(ln, e.to_string()))?;
            }
            Rhs::Binary(op, a, b) => {
                let (a, b) = (resolve(&a)?, resolve(&b)?);
                let r = if op == '*' { g.add_mult(lhs, &a, &b) } else { g.add_ldiv(lhs, &a, &b) };
                r.map_err(|e| err(ln, e.to_string()))?;
            }
            Rhs::Sum(terms) => {
                let mut cs = Vec::new();
                let mut ps = Vec::new();
                for (c, x) in &terms {
                    cs.push(coef(c)?);
                    ps.push(resolve(x)?);
                }
                let pr: Vec<&str> = ps.iter().map(|s| s.as_str()).collect();
                let r = if cs.len() == 2 {
                    g.add_lincomb(lhs, cs[0].clone(), pr[0], cs[1].clone(), pr[1])
                } else {
                    g.add_sum(lhs, &cs, &pr)
                };
                r.map_err(|e| err(ln, e.to_string()))?;
            }
        }
        assigned.insert(lhs.to_string());
        last = Some(lhs.to_string());
    }
    let outs = match outputs {
        Some(o) => o,
        None => last.into_iter().collect(),
    };
    for o in &outs {
        let o = alias.get(o).cloned().unwrap_or_else(|| o.clone());
        g.add_output(&o).map_err(|e| err(0, e.to_string()))?;
    }
    Ok(CgrDocument { coeff_type_tag: tag, graph: g, metadata, input })
}
