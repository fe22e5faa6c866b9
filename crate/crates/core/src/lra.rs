//! Quantifier-free linear real arithmetic with Boolean structure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LraError {
    #[error("variable `{0}` is not declared")]
    Undeclared(String),
    #[error("variable `{0}` is declared as {1:?} but used as {2:?}")]
    SortClash(String, Sort, Sort),
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("model has no value for `{0}`")]
    MissingVariable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Real,
    Bool,
}

/// Linear term `c + Σ k_i·v_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Term {
    pub constant: Rational,
    pub coeffs: BTreeMap<String, Rational>,
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.into(), Rational::one());
        Term { constant: Rational::zero(), coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Term { constant: c, coeffs: BTreeMap::new() }
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        self.coeffs.is_empty().then_some(&self.constant)
    }

    pub fn scale(&self, k: &Rational) -> Term {
        if k.is_zero() {
            return Term::zero();
        }
        Term {
            constant: &self.constant * k,
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
        }
    }

    fn add_term(&self, other: &Term, sign: i64) -> Term {
        let s = Rational::from_integer(BigInt::from(sign));
        let mut coeffs = self.coeffs.clone();
        for (v, c) in &other.coeffs {
            let entry = coeffs.entry(v.clone()).or_insert_with(Rational::zero);
            *entry += c * &s;
            if entry.is_zero() {
                coeffs.remove(v);
            }
        }
        Term { constant: &self.constant + &other.constant * &s, coeffs }
    }

    pub fn eval(&self, model: &Model) -> Result<Rational, LraError> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * model.real(v)?;
        }
        Ok(acc)
    }
}

impl Add for &Term {
    type Output = Term;
    fn add(self, rhs: &Term) -> Term {
        self.add_term(rhs, 1)
    }
}

impl Sub for &Term {
    type Output = Term;
    fn sub(self, rhs: &Term) -> Term {
        self.add_term(rhs, -1)
    }
}

impl Neg for &Term {
    type Output = Term;
    fn neg(self) -> Term {
        self.scale(&-Rational::one())
    }
}

impl Mul<&Rational> for &Term {
    type Output = Term;
    fn mul(self, k: &Rational) -> Term {
        self.scale(k)
    }
}

impl From<Rational> for Term {
    fn from(c: Rational) -> Self {
        Term::constant(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Cmp {
    fn holds(self, l: &Rational, r: &Rational) -> bool {
        match self {
            Cmp::Lt => l < r,
            Cmp::Le => l <= r,
            Cmp::Eq => l == r,
            Cmp::Ge => l >= r,
            Cmp::Gt => l > r,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LraFormula {
    True,
    False,
    BoolVar(String),
    Atom(Cmp, Term, Term),
    Not(Box<LraFormula>),
    And(Vec<LraFormula>),
    Or(Vec<LraFormula>),
    Implies(Box<LraFormula>, Box<LraFormula>),
    Iff(Box<LraFormula>, Box<LraFormula>),
    Ite(Box<LraFormula>, Box<LraFormula>, Box<LraFormula>),
}

use LraFormula as F;

impl LraFormula {
    pub fn bool_var(name: impl Into<String>) -> Self {
        F::BoolVar(name.into())
    }

    /// Comparison atom; folds to a constant when both sides are constant.
    pub fn cmp(op: Cmp, l: Term, r: Term) -> Self {
        if let (Some(a), Some(b)) = (l.as_constant(), r.as_constant()) {
            return if op.holds(a, b) { F::True } else { F::False };
        }
        F::Atom(op, l, r)
    }

    pub fn lt(l: Term, r: Term) -> Self {
        Self::cmp(Cmp::Lt, l, r)
    }

    pub fn le(l: Term, r: Term) -> Self {
        Self::cmp(Cmp::Le, l, r)
    }

    pub fn eq(l: Term, r: Term) -> Self {
        Self::cmp(Cmp::Eq, l, r)
    }

    pub fn ge(l: Term, r: Term) -> Self {
        Self::cmp(Cmp::Ge, l, r)
    }

    pub fn gt(l: Term, r: Term) -> Self {
        Self::cmp(Cmp::Gt, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: LraFormula) -> Self {
        match f {
            F::True => F::False,
            F::False => F::True,
            F::Not(inner) => *inner,
            other => F::Not(Box::new(other)),
        }
    }

    pub fn and(items: impl IntoIterator<Item = LraFormula>) -> Self {
        let mut out = Vec::new();
        for f in items {
            match f {
                F::True => {}
                F::False => return F::False,
                F::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => F::True,
            1 => out.pop().unwrap(),
            _ => F::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = LraFormula>) -> Self {
        let mut out = Vec::new();
        for f in items {
            match f {
                F::False => {}
                F::True => return F::True,
                F::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => F::False,
            1 => out.pop().unwrap(),
            _ => F::Or(out),
        }
    }

    pub fn implies(a: LraFormula, b: LraFormula) -> Self {
        match (a, b) {
            (F::False, _) | (_, F::True) => F::True,
            (F::True, b) => b,
            (a, F::False) => Self::not(a),
            (a, b) => F::Implies(Box::new(a), Box::new(b)),
        }
    }

    pub fn iff(a: LraFormula, b: LraFormula) -> Self {
        match (a, b) {
            (F::True, x) | (x, F::True) => x,
            (F::False, x) | (x, F::False) => Self::not(x),
            (a, b) => F::Iff(Box::new(a), Box::new(b)),
        }
    }

    pub fn ite(c: LraFormula, t: LraFormula, e: LraFormula) -> Self {
        match c {
            F::True => t,
            F::False => e,
            c => F::Ite(Box::new(c), Box::new(t), Box::new(e)),
        }
    }

    pub fn eval(&self, model: &Model) -> Result<bool, LraError> {
        Ok(match self {
            F::True => true,
            F::False => false,
            F::BoolVar(v) => model.boolean(v)?,
            F::Atom(op, l, r) => op.holds(&l.eval(model)?, &r.eval(model)?),
            F::Not(f) => !f.eval(model)?,
            F::And(fs) => {
                for f in fs {
                    if !f.eval(model)? {
                        return Ok(false);
                    }
                }
                true
            }
            F::Or(fs) => {
                for f in fs {
                    if f.eval(model)? {
                        return Ok(true);
                    }
                }
                false
            }
            F::Implies(a, b) => !a.eval(model)? || b.eval(model)?,
            F::Iff(a, b) => a.eval(model)? == b.eval(model)?,
            F::Ite(c, t, e) => {
                if c.eval(model)? {
                    t.eval(model)?
                } else {
                    e.eval(model)?
                }
            }
        })
    }

    /// Number of syntax nodes (connectives and atoms).
    pub fn node_count(&self) -> usize {
        match self {
            F::True | F::False | F::BoolVar(_) | F::Atom(..) => 1,
            F::Not(f) => 1 + f.node_count(),
            F::And(fs) | F::Or(fs) => 1 + fs.iter().map(|f| f.node_count()).sum::<usize>(),
            F::Implies(a, b) | F::Iff(a, b) => 1 + a.node_count() + b.node_count(),
            F::Ite(c, t, e) => 1 + c.node_count() + t.node_count() + e.node_count(),
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            F::True | F::False => 0,
            F::BoolVar(_) | F::Atom(..) => 1,
            F::Not(f) => f.atom_count(),
            F::And(fs) | F::Or(fs) => fs.iter().map(|f| f.atom_count()).sum(),
            F::Implies(a, b) | F::Iff(a, b) => a.atom_count() + b.atom_count(),
            F::Ite(c, t, e) => c.atom_count() + t.atom_count() + e.atom_count(),
        }
    }

    /// Every variable occurring in the formula together with its use sort.
    pub fn variables(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeMap<String, Sort>) {
        match self {
            F::True | F::False => {}
            F::BoolVar(v) => {
                out.insert(v.clone(), Sort::Bool);
            }
            F::Atom(_, l, r) => {
                for v in l.coeffs.keys().chain(r.coeffs.keys()) {
                    out.insert(v.clone(), Sort::Real);
                }
            }
            F::Not(f) => f.collect_vars(out),
            F::And(fs) | F::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
            F::Implies(a, b) | F::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            F::Ite(c, t, e) => {
                c.collect_vars(out);
                t.collect_vars(out);
                e.collect_vars(out);
            }
        }
    }

    /// SMT-LIB2 rendering of this formula alone.
    pub fn to_smtlib(&self) -> String {
        let mut out = String::new();
        write_formula(self, &mut out);
        out
    }
}

/// Variable declarations plus a counter for fresh auxiliary names.
#[derive(Debug, Clone, Default)]
pub struct Context {
    decls: BTreeMap<String, Sort>,
    fresh: usize,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, sort: Sort) {
        self.decls.entry(name.to_string()).or_insert(sort);
    }

    pub fn real(&mut self, name: impl Into<String>) -> Term {
        let name = name.into();
        self.declare(&name, Sort::Real);
        Term::var(name)
    }

    pub fn boolean(&mut self, name: impl Into<String>) -> LraFormula {
        let name = name.into();
        self.declare(&name, Sort::Bool);
        F::BoolVar(name)
    }

    pub fn fresh_real(&mut self, prefix: &str) -> Term {
        self.fresh += 1;
        let name = format!("{prefix}!{}", self.fresh);
        self.real(name)
    }

    pub fn fresh_bool(&mut self, prefix: &str) -> LraFormula {
        self.fresh += 1;
        let name = format!("{prefix}!{}", self.fresh);
        self.boolean(name)
    }

    pub fn declarations(&self) -> &BTreeMap<String, Sort> {
        &self.decls
    }

    /// Fresh `m` with `m >= t1 ∧ m >= t2 ∧ (m = t1 ∨ m = t2)`.
    pub fn mk_max(&mut self, t1: &Term, t2: &Term) -> (Term, LraFormula) {
        let m = self.fresh_real("max");
        let def = F::and([
            F::ge(m.clone(), t1.clone()),
            F::ge(m.clone(), t2.clone()),
            F::or([F::eq(m.clone(), t1.clone()), F::eq(m.clone(), t2.clone())]),
        ]);
        (m, def)
    }

    /// Fresh `m` with `m <= t1 ∧ m <= t2 ∧ (m = t1 ∨ m = t2)`.
    pub fn mk_min(&mut self, t1: &Term, t2: &Term) -> (Term, LraFormula) {
        let m = self.fresh_real("min");
        let def = F::and([
            F::le(m.clone(), t1.clone()),
            F::le(m.clone(), t2.clone()),
            F::or([F::eq(m.clone(), t1.clone()), F::eq(m.clone(), t2.clone())]),
        ]);
        (m, def)
    }

    /// Checks that every variable of `phi` is declared with the sort it is used at.
    pub fn check(&self, phi: &LraFormula) -> Result<(), LraError> {
        for (v, used) in phi.variables() {
            match self.decls.get(&v) {
                None => return Err(LraError::Undeclared(v)),
                Some(&declared) if declared != used => return Err(LraError::SortClash(v, declared, used)),
                _ => {}
            }
        }
        Ok(())
    }
}

/// Full SMT-LIB2 query: declarations, a single assertion, `check-sat` and
/// `get-model`.
pub fn emit_smtlib(phi: &LraFormula, ctx: &Context) -> Result<String, LraError> {
    ctx.check(phi)?;
    let mut out = String::new();
    out.push_str("(set-option :produce-models true)\n(set-logic QF_LRA)\n");
    for (name, sort) in ctx.declarations() {
        let sort = match sort {
            Sort::Real => "Real",
            Sort::Bool => "Bool",
        };
        let _ = writeln!(out, "(declare-const {} {sort})", symbol(name));
    }
    out.push_str("(assert ");
    write_formula(phi, &mut out);
    out.push_str(")\n(check-sat)\n(get-model)\n(exit)\n");
    Ok(out)
}

fn is_simple_symbol(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || "_~!@$%^&*+=<>.?/-".contains(c) => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || "_~!@$%^&*+=<>.?/-".contains(c))
}

fn symbol(name: &str) -> String {
    if is_simple_symbol(name) {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

fn write_number(r: &Rational, out: &mut String) {
    let mag = r.abs();
    let body = if mag.is_integer() {
        format!("{}.0", mag.numer())
    } else {
        format!("(/ {}.0 {}.0)", mag.numer(), mag.denom())
    };
    if r.is_negative() {
        let _ = write!(out, "(- {body})");
    } else {
        out.push_str(&body);
    }
}

fn write_term(t: &Term, out: &mut String) {
    let mut parts: Vec<String> = Vec::with_capacity(t.coeffs.len() + 1);
    for (v, c) in &t.coeffs {
        if c.is_one() {
            parts.push(symbol(v));
        } else {
            let mut s = String::from("(* ");
            write_number(c, &mut s);
            let _ = write!(s, " {})", symbol(v));
            parts.push(s);
        }
    }
    if !t.constant.is_zero() || parts.is_empty() {
        let mut s = String::new();
        write_number(&t.constant, &mut s);
        parts.push(s);
    }
    if parts.len() == 1 {
        out.push_str(&parts[0]);
    } else {
        let _ = write!(out, "(+ {})", parts.join(" "));
    }
}

fn write_formula(f: &LraFormula, out: &mut String) {
    let nary = |op: &str, fs: &[LraFormula], out: &mut String| {
        let _ = write!(out, "({op}");
        for g in fs {
            out.push(' ');
            write_formula(g, out);
        }
        out.push(')');
    };
    match f {
        F::True => out.push_str("true"),
        F::False => out.push_str("false"),
        F::BoolVar(v) => out.push_str(&symbol(v)),
        F::Atom(op, l, r) => {
            let _ = write!(out, "({} ", op.symbol());
            write_term(l, out);
            out.push(' ');
            write_term(r, out);
            out.push(')');
        }
        F::Not(g) => nary("not", std::slice::from_ref(g.as_ref()), out),
        F::And(fs) => nary("and", fs, out),
        F::Or(fs) => nary("or", fs, out),
        F::Implies(a, b) => {
            out.push_str("(=> ");
            write_formula(a, out);
            out.push(' ');
            write_formula(b, out);
            out.push(')');
        }
        F::Iff(a, b) => {
            out.push_str("(= ");
            write_formula(a, out);
            out.push(' ');
            write_formula(b, out);
            out.push(')');
        }
        F::Ite(c, t, e) => {
            out.push_str("(ite ");
            write_formula(c, out);
            out.push(' ');
            write_formula(t, out);
            out.push(' ');
            write_formula(e, out);
            out.push(')');
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Real(Rational),
    Bool(bool),
}

/// Interpretation of variables as exact rationals or booleans.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    values: BTreeMap<String, Value>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_real(&mut self, name: impl Into<String>, v: Rational) {
        self.values.insert(name.into(), Value::Real(v));
    }

    pub fn set_bool(&mut self, name: impl Into<String>, v: bool) {
        self.values.insert(name.into(), Value::Bool(v));
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    pub fn real(&self, name: &str) -> Result<Rational, LraError> {
        match self.values.get(name) {
            Some(Value::Real(r)) => Ok(r.clone()),
            _ => Err(LraError::MissingVariable(name.to_string())),
        }
    }

    pub fn boolean(&self, name: &str) -> Result<bool, LraError> {
        match self.values.get(name) {
            Some(Value::Bool(b)) => Ok(*b),
            _ => Err(LraError::MissingVariable(name.to_string())),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fails if some declared variable has no value of the right sort.
    pub fn require(&self, decls: &BTreeMap<String, Sort>) -> Result<(), LraError> {
        for (name, sort) in decls {
            let ok = matches!(
                (sort, self.values.get(name)),
                (Sort::Real, Some(Value::Real(_))) | (Sort::Bool, Some(Value::Bool(_)))
            );
            if !ok {
                return Err(LraError::MissingVariable(name.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Result<Vec<String>, LraError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' | ')' => {
                tokens.push(c.to_string());
                chars.next();
            }
            ';' => {
                while chars.next().is_some_and(|c| c != '\n') {}
            }
            '|' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('|') => break,
                        Some(c) => s.push(c),
                        None => return Err(LraError::MalformedModel("unterminated |symbol|".into())),
                    }
                }
                tokens.push(s);
            }
            '"' => {
                chars.next();
                let mut s = String::from("\"");
                loop {
                    match chars.next() {
                        Some('"') if chars.peek() == Some(&'"') => {
                            chars.next();
                            s.push('"');
                        }
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err(LraError::MalformedModel("unterminated string".into())),
                    }
                }
                tokens.push(s);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                tokens.push(s);
            }
        }
    }
    Ok(tokens)
}

fn parse_sexps(tokens: &[String]) -> Result<Vec<Sexp>, LraError> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for tok in tokens {
        match tok.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let list = stack.pop().ok_or_else(|| LraError::MalformedModel("unbalanced `)`".into()))?;
                stack
                    .last_mut()
                    .ok_or_else(|| LraError::MalformedModel("unbalanced `)`".into()))?
                    .push(Sexp::List(list));
            }
            _ => stack.last_mut().expect("stack non-empty").push(Sexp::Atom(tok.clone())),
        }
    }
    if stack.len() != 1 {
        return Err(LraError::MalformedModel("unbalanced `(`".into()));
    }
    Ok(stack.pop().unwrap())
}

fn parse_numeral(s: &str) -> Option<Rational> {
    if !s.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return None;
    }
    crate::rational::parse_rational(s).ok()
}

fn eval_value(e: &Sexp) -> Result<Value, LraError> {
    let bad = || LraError::MalformedModel(format!("unsupported value {e:?}"));
    match e {
        Sexp::Atom(a) if a == "true" => Ok(Value::Bool(true)),
        Sexp::Atom(a) if a == "false" => Ok(Value::Bool(false)),
        Sexp::Atom(a) => parse_numeral(a).map(Value::Real).ok_or_else(bad),
        Sexp::List(items) => {
            let (head, args) = match items.split_first() {
                Some((Sexp::Atom(h), args)) => (h.as_str(), args),
                _ => return Err(bad()),
            };
            let nums = args
                .iter()
                .map(|a| match eval_value(a)? {
                    Value::Real(r) => Ok(r),
                    Value::Bool(_) => Err(bad()),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let r = match (head, nums.as_slice()) {
                ("-", [x]) => -x,
                ("-", [x, rest @ ..]) => rest.iter().fold(x.clone(), |acc, y| acc - y),
                ("+", xs) => xs.iter().fold(Rational::zero(), |acc, y| acc + y),
                ("*", xs) => xs.iter().fold(Rational::one(), |acc, y| acc * y),
                ("/", [x, y]) if !y.is_zero() => x / y,
                _ => return Err(bad()),
            };
            Ok(Value::Real(r))
        }
    }
}

/// Reads `(define-fun name () Sort value)` entries from `get-model` output.
pub fn parse_model(text: &str) -> Result<Model, LraError> {
    let sexps = parse_sexps(&tokenize(text)?)?;
    let mut model = Model::new();
    let mut seen_model = false;
    let mut visit = |items: &[Sexp]| -> Result<(), LraError> {
        for def in items {
            let Sexp::List(parts) = def else { continue };
            match parts.as_slice() {
                [Sexp::Atom(kw), Sexp::Atom(name), Sexp::List(params), Sexp::Atom(sort), value]
                    if kw == "define-fun" =>
                {
                    if !params.is_empty() {
                        continue;
                    }
                    let v = eval_value(value)?;
                    match (sort.as_str(), v) {
                        ("Real" | "Int", Value::Real(r)) => model.set_real(name.clone(), r),
                        ("Bool", Value::Bool(b)) => model.set_bool(name.clone(), b),
                        (s, _) => return Err(LraError::MalformedModel(format!("value of `{name}` does not match sort {s}"))),
                    }
                }
                _ => {}
            }
        }
        Ok(())
    };
    for e in &sexps {
        if let Sexp::List(items) = e {
            // either `(model (define-fun ...) ...)` or a bare list of definitions
            let body = match items.first() {
                Some(Sexp::Atom(h)) if h == "model" => &items[1..],
                Some(Sexp::Atom(h)) if h == "define-fun" => std::slice::from_ref(e),
                Some(Sexp::Atom(_)) => continue,
                _ => &items[..],
            };
            seen_model = true;
            visit(body)?;
        }
    }
    if !seen_model {
        return Err(LraError::MalformedModel("no model found".into()));
    }
    Ok(model)
}

/// Variables mentioned anywhere in a set of formulas.
pub fn all_variables<'a>(fs: impl IntoIterator<Item = &'a LraFormula>) -> BTreeSet<String> {
    let mut out = BTreeMap::new();
    for f in fs {
        f.collect_vars(&mut out);
    }
    out.into_keys().collect()
}
