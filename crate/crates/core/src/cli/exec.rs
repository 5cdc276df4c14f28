//! Evaluation of parsed scripts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::Instant;

use log::info;
use serde::Serialize;
use serde_json::{json, Value as Json};
use thiserror::Error;

use super::ast::{Expr, Pos, Script, Statement};
use super::parser::ParseError;
use crate::complexes::{display_dims, Complex};
use crate::dercat::{
    ext_table, is_exceptional, mutate_left, mutate_right, spherical_ext_check, spherical_twist, DerivedObject,
};
use crate::globalext::{ell_data, graded_ext, rhom_sheaf, sheaf_cohomology, truncation_bound, BoundMode, RHomOptions};
use crate::gradedmod::{minimal_free_resolution, FreeModule, ModuleMap, PresentedModule};
use crate::linal::PrimeField;
use crate::polyring::{Polynomial, Ring};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{pos}: {msg}")]
    Scope { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Type { pos: Pos, msg: String },
    #[error("{pos}: {source}")]
    Math {
        pos: Pos,
        #[source]
        source: crate::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// `1` for problems with the script itself, `2` for failed computations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Scope { .. } | CliError::Io(_) => 1,
            CliError::Type { .. } | CliError::Math { .. } => 2,
        }
    }
}

type Res<T> = std::result::Result<T, CliError>;

/// Expression constructors with their arity; `None` means variadic.
const CONSTRUCTORS: &[(&str, Option<usize>)] = &[
    ("O", Some(1)),
    ("free", None),
    ("map", Some(3)),
    ("image", Some(1)),
    ("coker", Some(1)),
    ("kernel", Some(1)),
    ("transpose", Some(1)),
    ("truncate", Some(2)),
    ("koszul", None),
    ("complex", None),
    ("shift", Some(2)),
    ("twist", Some(2)),
    ("cone", Some(1)),
    ("dsum", None),
    ("mutateLeft", Some(2)),
    ("mutateRight", Some(2)),
    ("sphericalTwist", Some(2)),
];

/// Commands allowed at the top of a `print` statement.
const COMMANDS: &[(&str, Option<usize>)] = &[
    ("rhom", Some(4)),
    ("ext", Some(3)),
    ("gradedExt", Some(4)),
    ("cohomology", Some(3)),
    ("bound", Some(3)),
    ("betti", Some(1)),
    ("extTable", None),
    ("exceptional", Some(1)),
    ("spherical", Some(1)),
];

fn arity(table: &[(&str, Option<usize>)], name: &str) -> Option<Option<usize>> {
    table.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

/// Checks the ring declaration rules, scoping and call arities.
pub fn check(script: &Script) -> Res<()> {
    let mut ring_vars: Option<HashSet<String>> = None;
    let mut bound: HashSet<String> = HashSet::new();
    let mut seen_let = false;
    for s in &script.statements {
        match s {
            Statement::Ring { pos, vars, .. } => {
                if ring_vars.is_some() {
                    return Err(scope(*pos, "only one ring declaration is allowed"));
                }
                let set: HashSet<String> = vars.iter().cloned().collect();
                if set.len() != vars.len() {
                    return Err(scope(*pos, "repeated variable name"));
                }
                ring_vars = Some(set);
            }
            Statement::Quotient { gens, pos } => {
                let Some(vars) = &ring_vars else {
                    return Err(scope(*pos, "quotient before the ring declaration"));
                };
                if seen_let {
                    return Err(scope(*pos, "quotient must come before any binding"));
                }
                for g in gens {
                    check_expr(g, vars, &HashSet::new(), false)?;
                }
            }
            Statement::Let { name, expr, pos } => {
                let Some(vars) = &ring_vars else {
                    return Err(scope(*pos, "binding before the ring declaration"));
                };
                check_expr(expr, vars, &bound, false)?;
                if vars.contains(name) {
                    return Err(scope(*pos, &format!("`{name}` is a ring variable")));
                }
                bound.insert(name.clone());
                seen_let = true;
            }
            Statement::Print { expr, pos } => {
                let Some(vars) = &ring_vars else {
                    return Err(scope(*pos, "print before the ring declaration"));
                };
                check_expr(expr, vars, &bound, true)?;
            }
        }
    }
    Ok(())
}

fn scope(pos: Pos, msg: &str) -> CliError {
    CliError::Scope { pos, msg: msg.to_string() }
}

fn check_expr(e: &Expr, vars: &HashSet<String>, bound: &HashSet<String>, top: bool) -> Res<()> {
    match e {
        Expr::Int(_) => Ok(()),
        Expr::Ident(name, pos) => {
            if vars.contains(name) || bound.contains(name) {
                Ok(())
            } else {
                Err(scope(*pos, &format!("unbound identifier `{name}`")))
            }
        }
        Expr::Neg(a) | Expr::Pow(a, _) => check_expr(a, vars, bound, false),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            check_expr(a, vars, bound, false)?;
            check_expr(b, vars, bound, false)
        }
        Expr::Matrix(rows) => {
            let width = rows[0].len();
            if rows.iter().any(|r| r.len() != width) {
                return Err(CliError::Type { pos: Pos::default(), msg: "matrix rows have different lengths".into() });
            }
            rows.iter().flatten().try_for_each(|x| check_expr(x, vars, bound, false))
        }
        Expr::Call { name, args, named, pos } => {
            let a = arity(CONSTRUCTORS, name).or_else(|| if top { arity(COMMANDS, name) } else { None });
            let Some(a) = a else {
                let what =
                    if arity(COMMANDS, name).is_some() { "can only be printed" } else { "is not a known function" };
                return Err(scope(*pos, &format!("`{name}` {what}")));
            };
            if let Some(n) = a {
                if args.len() != n {
                    return Err(scope(*pos, &format!("`{name}` takes {n} arguments, got {}", args.len())));
                }
            }
            for (key, value) in named {
                match (name.as_str(), key.as_str()) {
                    ("complex", "top") => check_expr(value, vars, bound, false)?,
                    ("bound", "mode") => {
                        if !matches!(value, Expr::Ident(m, _) if ["simple", "general", "concentrated"].contains(&m.as_str()))
                        {
                            return Err(scope(*pos, "mode must be simple, general or concentrated"));
                        }
                    }
                    _ => return Err(scope(*pos, &format!("`{name}` has no option `{key}`"))),
                }
            }
            args.iter().try_for_each(|x| check_expr(x, vars, bound, false))
        }
    }
}

#[derive(Clone, Debug)]
pub enum Value {
    Int(i64),
    Poly(Polynomial),
    Matrix(Vec<Vec<Polynomial>>),
    Module(PresentedModule),
    Map(ModuleMap),
    Complex(Complex),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Poly(_) => "polynomial",
            Value::Matrix(_) => "matrix",
            Value::Module(_) => "module",
            Value::Map(_) => "map",
            Value::Complex(_) => "complex",
        }
    }
}

/// One `print` result.
#[derive(Clone, Debug, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub kind: String,
    pub result: Json,
    /// Human-readable rendering.
    #[serde(skip)]
    pub text: String,
    pub millis: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RingInfo {
    pub prime: u64,
    pub variables: Vec<String>,
    pub quotient: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub ring: Option<RingInfo>,
    pub results: Vec<OutputRecord>,
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replaces the prime of the script's ring declaration.
    pub prime: Option<u64>,
}

/// Statement-by-statement interpreter state.
pub struct Session {
    opts: RunOptions,
    ring: Option<Ring>,
    info: Option<RingInfo>,
    env: HashMap<String, Value>,
}

impl Session {
    pub fn new(opts: RunOptions) -> Self {
        Session { opts, ring: None, info: None, env: HashMap::new() }
    }

    pub fn ring_info(&self) -> Option<&RingInfo> {
        self.info.as_ref()
    }

    pub fn execute(&mut self, s: &Statement) -> Res<Option<OutputRecord>> {
        let pos = s.pos();
        match s {
            Statement::Ring { prime, vars, .. } => {
                let p = self.opts.prime.unwrap_or(*prime);
                let field = PrimeField::new(p).map_err(|e| math(pos, e))?;
                self.ring = Some(Ring::polynomial(field, vars.clone()).map_err(|e| math(pos, e))?);
                self.info = Some(RingInfo { prime: p, variables: vars.clone(), quotient: Vec::new() });
                Ok(None)
            }
            Statement::Quotient { gens, .. } => {
                let polys = gens.iter().map(|g| self.poly(g)).collect::<Res<Vec<_>>>()?;
                let ring = self.ring().quotient(polys.clone()).map_err(|e| math(pos, e))?;
                self.info.as_mut().unwrap().quotient = polys.iter().map(|f| ring.format(f)).collect();
                self.ring = Some(ring);
                Ok(None)
            }
            Statement::Let { name, expr, .. } => {
                let v = self.eval(expr)?;
                info!("{name} = {}", v.kind());
                self.env.insert(name.clone(), v);
                Ok(None)
            }
            Statement::Print { expr, .. } => {
                let start = Instant::now();
                let (kind, result, text) = self.command(expr)?;
                let millis = start.elapsed().as_secs_f64() * 1e3;
                Ok(Some(OutputRecord { command: expr.to_string(), kind: kind.into(), result, text, millis }))
            }
        }
    }

    fn ring(&self) -> &Ring {
        self.ring.as_ref().expect("checked: ring declared first")
    }

    fn eval(&self, e: &Expr) -> Res<Value> {
        let field = *self.ring().field();
        let n = self.ring().nvars();
        match e {
            Expr::Int(k) => Ok(Value::Int(*k as i64)),
            Expr::Ident(name, pos) => {
                if let Some(v) = self.env.get(name) {
                    return Ok(v.clone());
                }
                match self.ring().names().iter().position(|v| v == name) {
                    Some(i) => Ok(Value::Poly(self.ring().var(i))),
                    None => Err(scope(*pos, &format!("unbound identifier `{name}`"))),
                }
            }
            Expr::Neg(a) => match self.eval(a)? {
                Value::Int(k) => Ok(Value::Int(-k)),
                v => Ok(Value::Poly(self.to_poly(v, e)?.neg(&field))),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                if let (Value::Int(x), Value::Int(y)) = (&x, &y) {
                    let r = match e {
                        Expr::Add(..) => x.checked_add(*y),
                        Expr::Sub(..) => x.checked_sub(*y),
                        _ => x.checked_mul(*y),
                    };
                    return r.map(Value::Int).ok_or_else(|| type_err(e, "integer overflow"));
                }
                let (x, y) = (self.to_poly(x, e)?, self.to_poly(y, e)?);
                Ok(Value::Poly(match e {
                    Expr::Add(..) => x.add(&field, &y),
                    Expr::Sub(..) => x.sub(&field, &y),
                    _ => x.mul(&field, &y),
                }))
            }
            Expr::Pow(a, k) => match self.eval(a)? {
                Value::Int(x) => x.checked_pow(*k).map(Value::Int).ok_or_else(|| type_err(e, "integer overflow")),
                v => Ok(Value::Poly(self.to_poly(v, e)?.pow(&field, n, *k))),
            },
            Expr::Matrix(rows) => {
                let m = rows.iter().map(|r| r.iter().map(|x| self.poly(x)).collect()).collect::<Res<_>>()?;
                Ok(Value::Matrix(m))
            }
            Expr::Call { name, args, named, pos } => self.call(name, args, named, *pos),
        }
    }

    fn to_poly(&self, v: Value, at: &Expr) -> Res<Polynomial> {
        match v {
            Value::Int(k) => Ok(Polynomial::constant(self.ring().field(), self.ring().nvars(), k)),
            Value::Poly(f) => Ok(f),
            other => Err(type_err(at, &format!("expected a polynomial, found a {}", other.kind()))),
        }
    }

    fn poly(&self, e: &Expr) -> Res<Polynomial> {
        let v = self.eval(e)?;
        self.to_poly(v, e)
    }

    fn int(&self, e: &Expr) -> Res<i32> {
        match self.eval(e)? {
            Value::Int(k) => i32::try_from(k).map_err(|_| type_err(e, "integer out of range")),
            other => Err(type_err(e, &format!("expected an integer, found a {}", other.kind()))),
        }
    }

    fn module(&self, e: &Expr) -> Res<PresentedModule> {
        match self.eval(e)? {
            Value::Module(m) => Ok(m),
            other => Err(type_err(e, &format!("expected a module, found a {}", other.kind()))),
        }
    }

    fn free(&self, e: &Expr) -> Res<FreeModule> {
        let m = self.module(e)?;
        if !m.is_free() {
            return Err(type_err(e, "expected a free module"));
        }
        Ok(FreeModule::new(m.ring().clone(), m.generator_degrees().to_vec()))
    }

    fn map(&self, e: &Expr) -> Res<ModuleMap> {
        match self.eval(e)? {
            Value::Map(f) => Ok(f),
            other => Err(type_err(e, &format!("expected a map, found a {}", other.kind()))),
        }
    }

    /// Modules are complexes concentrated in degree 0.
    fn complex(&self, e: &Expr) -> Res<Complex> {
        match self.eval(e)? {
            Value::Complex(c) => Ok(c),
            Value::Module(m) => Ok(Complex::from_module(m, 0)),
            other => Err(type_err(e, &format!("expected a complex, found a {}", other.kind()))),
        }
    }

    fn object(&self, e: &Expr) -> Res<DerivedObject> {
        Ok(DerivedObject::new(e.to_string(), self.complex(e)?))
    }

    fn call(&self, name: &str, args: &[Expr], named: &[(String, Expr)], pos: Pos) -> Res<Value> {
        let ring = self.ring().clone();
        let m = |r: crate::Result<PresentedModule>| r.map(Value::Module).map_err(|e| math(pos, e));
        let c = |r: crate::Result<Complex>| r.map(Value::Complex).map_err(|e| math(pos, e));
        match name {
            "O" => Ok(Value::Module(PresentedModule::free(ring, vec![-self.int(&args[0])?]))),
            "free" => {
                let degs = args.iter().map(|a| Ok(-self.int(a)?)).collect::<Res<Vec<_>>>()?;
                Ok(Value::Module(PresentedModule::free(ring, degs)))
            }
            "map" => {
                let (t, s) = (self.free(&args[0])?, self.free(&args[1])?);
                let Value::Matrix(rows) = self.eval(&args[2])? else {
                    return Err(type_err(&args[2], "expected a matrix"));
                };
                ModuleMap::from_entries(s, t, &rows).map(Value::Map).map_err(|e| math(pos, e))
            }
            "image" => m(self.map(&args[0])?.image()),
            "coker" => Ok(Value::Module(self.map(&args[0])?.cokernel())),
            "kernel" => m(self.map(&args[0])?.kernel()),
            "transpose" => Ok(Value::Map(self.map(&args[0])?.transpose())),
            "truncate" => match self.eval(&args[0])? {
                Value::Complex(x) => c(x.truncate(self.int(&args[1])?).map(|t| t.0)),
                Value::Module(x) => m(x.truncate(self.int(&args[1])?).map(|t| t.0)),
                other => Err(type_err(&args[0], &format!("cannot truncate a {}", other.kind()))),
            },
            "koszul" => {
                let polys = args.iter().map(|a| self.poly(a)).collect::<Res<Vec<_>>>()?;
                c(Complex::koszul(&ring, &polys))
            }
            "complex" => {
                let maps = args.iter().map(|a| self.map(a)).collect::<Res<Vec<_>>>()?;
                let top = match named.iter().find(|(k, _)| k == "top") {
                    Some((_, e)) => self.int(e)?,
                    None => 0,
                };
                c(Complex::from_maps(&maps, top))
            }
            "shift" => Ok(Value::Complex(self.complex(&args[0])?.shift(self.int(&args[1])?))),
            "twist" => match self.eval(&args[0])? {
                Value::Module(x) => Ok(Value::Module(x.twist(self.int(&args[1])?))),
                _ => Ok(Value::Complex(self.complex(&args[0])?.twist(self.int(&args[1])?))),
            },
            "cone" => c(Complex::from_maps(&[self.map(&args[0])?], 0)),
            "dsum" => {
                let parts = args.iter().map(|a| self.complex(a)).collect::<Res<Vec<_>>>()?;
                c(Complex::direct_sum(&ring, &parts.iter().collect::<Vec<_>>()))
            }
            "mutateLeft" | "mutateRight" | "sphericalTwist" => {
                let (a, b) = (self.object(&args[0])?, self.object(&args[1])?);
                let out = match name {
                    "mutateLeft" => mutate_left(&a, &b, true),
                    "mutateRight" => mutate_right(&a, &b, true),
                    _ => spherical_twist(&a, &b),
                };
                out.map(|o| Value::Complex(o.complex)).map_err(|e| math(pos, e))
            }
            _ => Err(scope(pos, &format!("`{name}` can only be printed"))),
        }
    }

    fn command(&self, e: &Expr) -> Res<(&'static str, Json, String)> {
        let Expr::Call { name, args, named, pos } = e else {
            return self.show(e);
        };
        let pos = *pos;
        let ctx = |r: crate::Error| math(pos, r);
        match name.as_str() {
            "rhom" => {
                let (c, d) = (self.complex(&args[0])?, self.complex(&args[1])?);
                let (lo, hi) = (self.int(&args[2])?, self.int(&args[3])?);
                let res = rhom_sheaf(&c, &d, lo, hi, &RHomOptions::default()).map_err(ctx)?;
                let dims = res.dims();
                let strand: BTreeMap<i32, usize> = res
                    .strand
                    .as_ref()
                    .map(|s| s.positions().map(|p| (p - res.offset, s.dim(p))).collect())
                    .unwrap_or_default();
                let display = display_dims(&dims);
                let text = format!(
                    "{display}\n{}",
                    dims.iter().map(|(m, d)| format!("Ext^{m} = {d}")).collect::<Vec<_>>().join("\n")
                );
                Ok(("rhom", json!({ "display": display, "ext": res.results, "strand_dims": strand }), text))
            }
            "ext" => {
                let (c, d, m) = (self.complex(&args[0])?, self.complex(&args[1])?, self.int(&args[2])?);
                let r = rhom_sheaf(&c, &d, m, m, &RHomOptions::default()).map_err(ctx)?.results.remove(0);
                let text = format!("Ext^{m} = {} (r = {})", r.dim, r.r_used);
                Ok(("ext", json!(r), text))
            }
            "gradedExt" => {
                let (c, d) = (self.complex(&args[0])?, self.complex(&args[1])?);
                let (m, w) = (self.int(&args[2])?, self.int(&args[3])?);
                let dims = graded_ext(&c, &d, m, w).map_err(ctx)?;
                let text = dims.iter().map(|(v, d)| format!("v={v}: {d}")).collect::<Vec<_>>().join("\n");
                let rows: Vec<Json> = dims.iter().map(|(v, d)| json!({ "v": v, "dim": d })).collect();
                Ok(("gradedExt", json!({ "m": m, "dims": rows }), text))
            }
            "cohomology" => {
                let d = self.complex(&args[0])?;
                let (m, v) = (self.int(&args[1])?, self.int(&args[2])?);
                let dim = sheaf_cohomology(&d, m, v).map_err(ctx)?;
                Ok(("cohomology", json!({ "m": m, "v": v, "dim": dim }), format!("H^{m}(X, F({v})) = {dim}")))
            }
            "bound" => {
                let (c, d, m) = (self.complex(&args[0])?, self.complex(&args[1])?, self.int(&args[2])?);
                let mode = match named.first().map(|(_, v)| v.to_string()).as_deref() {
                    Some("general") => BoundMode::General,
                    Some("concentrated") => BoundMode::Concentrated,
                    _ => BoundMode::Simple,
                };
                let r = truncation_bound(&c, &d, m, mode).map_err(ctx)?;
                let ell = ell_data(&c, &d, m).map_err(ctx)?;
                let text = match r {
                    Some(r) => format!("r = {r}"),
                    None => "no truncation needed".to_string(),
                };
                Ok(("bound", json!({ "m": m, "mode": mode, "r": r, "ell": ell }), text))
            }
            "betti" => {
                let m = self.module(&args[0])?;
                let over_s = m.over_polynomial_ring().map_err(ctx)?;
                let res = minimal_free_resolution(&over_s, over_s.ring().nvars() + 1).map_err(ctx)?;
                Ok(("betti", json!(res.betti), res.betti.to_grid()))
            }
            "extTable" => {
                let objs = args.iter().map(|a| self.object(a)).collect::<Res<Vec<_>>>()?;
                let t = ext_table(&objs).map_err(ctx)?;
                let flags = format!("exceptional: {}, strong: {}", t.is_exceptional_collection(), t.is_strong());
                Ok(("extTable", json!(t), format!("{t}\n{flags}")))
            }
            "exceptional" => {
                let check = is_exceptional(&self.object(&args[0])?).map_err(ctx)?;
                let text = format!("exceptional: {} {:?}", check.exceptional, check.dims);
                Ok(("exceptional", json!(check), text))
            }
            "spherical" => {
                let ok = spherical_ext_check(&self.object(&args[0])?).map_err(ctx)?;
                Ok(("spherical", json!({ "spherical": ok }), format!("spherical: {ok}")))
            }
            _ => self.show(e),
        }
    }

    fn show(&self, e: &Expr) -> Res<(&'static str, Json, String)> {
        let v = self.eval(e)?;
        let ring = self.ring();
        let text = match &v {
            Value::Int(k) => k.to_string(),
            Value::Poly(f) => ring.format(f),
            Value::Matrix(rows) => rows
                .iter()
                .map(|r| format!("[{}]", r.iter().map(|f| ring.format(f)).collect::<Vec<_>>().join(", ")))
                .collect::<Vec<_>>()
                .join("\n"),
            Value::Module(m) => m.to_string(),
            Value::Map(f) => f
                .entries()
                .iter()
                .map(|r| format!("[{}]", r.iter().map(|f| ring.format(f)).collect::<Vec<_>>().join(", ")))
                .collect::<Vec<_>>()
                .join("\n"),
            Value::Complex(c) => return Ok(("value", complex_json(c), c.to_string())),
        };
        Ok(("value", json!({ "type": v.kind(), "display": text }), text))
    }
}

fn complex_json(c: &Complex) -> Json {
    let terms: Vec<Json> = c
        .twists()
        .into_iter()
        .map(|(j, degs)| json!({ "degree": j, "twists": degs.iter().map(|d| -d).collect::<Vec<_>>() }))
        .collect();
    json!({ "type": "complex", "display": c.to_string(), "terms": terms })
}

fn math(pos: Pos, source: crate::Error) -> CliError {
    CliError::Math { pos, source }
}

fn type_err(e: &Expr, msg: &str) -> CliError {
    let pos = match e {
        Expr::Ident(_, p) | Expr::Call { pos: p, .. } => *p,
        _ => Pos::default(),
    };
    CliError::Type { pos, msg: format!("`{e}`: {msg}") }
}

/// Parses, checks and runs a script, collecting every record.
pub fn run_script(text: &str, opts: RunOptions) -> Res<Report> {
    let script = super::parser::parse(text)?;
    check(&script)?;
    let mut session = Session::new(opts);
    let mut results = Vec::new();
    for s in &script.statements {
        if let Some(r) = session.execute(s)? {
            results.push(r);
        }
    }
    Ok(Report { ring: session.info, results })
}
