use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use serde_json::Value;

use super::EliminatorError;

/// Exact number: an i128 while no division occurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Num {
    Int(i128),
    Rat(Ratio<i128>),
}

impl Num {
    pub(super) fn ratio(self) -> Ratio<i128> {
        match self {
            Num::Int(i) => Ratio::from_integer(i),
            Num::Rat(r) => r,
        }
    }

    fn norm(r: Ratio<i128>) -> Num {
        if r.is_integer() {
            Num::Int(r.to_integer())
        } else {
            Num::Rat(r)
        }
    }

    pub fn as_int(self) -> Option<i128> {
        match self {
            Num::Int(i) => Some(i),
            Num::Rat(_) => None,
        }
    }

    fn add(self, o: Num) -> Num {
        match (self, o) {
            (Num::Int(a), Num::Int(b)) => Num::Int(a + b),
            _ => Num::norm(self.ratio() + o.ratio()),
        }
    }

    pub(super) fn neg(self) -> Num {
        match self {
            Num::Int(a) => Num::Int(-a),
            Num::Rat(r) => Num::Rat(-r),
        }
    }

    pub(super) fn sub(self, o: Num) -> Num {
        match (self, o) {
            (Num::Int(a), Num::Int(b)) => Num::Int(a - b),
            _ => Num::norm(self.ratio() - o.ratio()),
        }
    }

    fn mul(self, o: Num) -> Num {
        match (self, o) {
            (Num::Int(a), Num::Int(b)) => Num::Int(a * b),
            _ => Num::norm(self.ratio() * o.ratio()),
        }
    }

    fn cmp(self, o: Num) -> std::cmp::Ordering {
        match (self, o) {
            (Num::Int(a), Num::Int(b)) => a.cmp(&b),
            _ => self.ratio().cmp(&o.ratio()),
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Num::Int(i) => i == 0,
            Num::Rat(r) => r.is_zero(),
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Int(i) => write!(f, "{i}"),
            Num::Rat(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl Cmp {
    fn holds(self, o: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Cmp::Eq => o == Equal,
            Cmp::Ne => o != Equal,
            Cmp::Le => o != Greater,
            Cmp::Lt => o == Less,
            Cmp::Ge => o != Less,
            Cmp::Gt => o == Greater,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Cmp::Eq => "==",
            Cmp::Ne => "!=",
            Cmp::Le => "<=",
            Cmp::Lt => "<",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }
}

/// Numeric term.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Const(i128),
    Var(usize),
    Add(Vec<Term>),
    Mul(Vec<Term>),
    Sub(Box<Term>, Box<Term>),
    Neg(Box<Term>),
    Div(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
    Min(Vec<Term>),
    Max(Vec<Term>),
}

/// Boolean constraint.
#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    Compare(Cmp, Term, Term),
    /// a divides b
    Divides(Term, Term),
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
    Not(Box<Constraint>),
    Implies(Box<Constraint>, Box<Constraint>),
}

/// Degree of a term in one variable; `None` when not polynomial in it.
fn degree(t: &Term, v: usize) -> Option<u32> {
    Some(match t {
        Term::Const(_) => 0,
        Term::Var(i) => u32::from(*i == v),
        Term::Add(xs) => xs.iter().map(|x| degree(x, v)).try_fold(0, |a, d| d.map(|d| a.max(d)))?,
        Term::Mul(xs) => xs.iter().map(|x| degree(x, v)).try_fold(0, |a, d| d.map(|d| a + d))?,
        Term::Sub(a, b) => degree(a, v)?.max(degree(b, v)?),
        Term::Neg(a) => degree(a, v)?,
        Term::Div(a, b) => {
            if degree(b, v)? > 0 {
                return None;
            }
            degree(a, v)?
        }
        Term::Pow(a, k) => degree(a, v)? * k,
        Term::Min(xs) | Term::Max(xs) => {
            if xs.iter().any(|x| uses(x, v)) {
                return None;
            }
            0
        }
    })
}

fn uses(t: &Term, v: usize) -> bool {
    match t {
        Term::Const(_) => false,
        Term::Var(i) => *i == v,
        Term::Add(xs) | Term::Mul(xs) | Term::Min(xs) | Term::Max(xs) => xs.iter().any(|x| uses(x, v)),
        Term::Sub(a, b) | Term::Div(a, b) => uses(a, v) || uses(b, v),
        Term::Neg(a) | Term::Pow(a, _) => uses(a, v),
    }
}

fn max_var_term(t: &Term) -> Option<usize> {
    match t {
        Term::Const(_) => None,
        Term::Var(i) => Some(*i),
        Term::Add(xs) | Term::Mul(xs) | Term::Min(xs) | Term::Max(xs) => {
            xs.iter().filter_map(max_var_term).max()
        }
        Term::Sub(a, b) | Term::Div(a, b) => max_var_term(a).max(max_var_term(b)),
        Term::Neg(a) | Term::Pow(a, _) => max_var_term(a),
    }
}

impl Term {
    pub fn eval(&self, env: &[i128]) -> Result<Num, EliminatorError> {
        Ok(match self {
            Term::Const(c) => Num::Int(*c),
            Term::Var(i) => Num::Int(env[*i]),
            Term::Add(xs) => {
                let mut acc = Num::Int(0);
                for x in xs {
                    acc = acc.add(x.eval(env)?);
                }
                acc
            }
            Term::Mul(xs) => {
                let mut acc = Num::Int(1);
                for x in xs {
                    acc = acc.mul(x.eval(env)?);
                }
                acc
            }
            Term::Sub(a, b) => a.eval(env)?.sub(b.eval(env)?),
            Term::Neg(a) => Num::Int(0).sub(a.eval(env)?),
            Term::Div(a, b) => {
                let d = b.eval(env)?;
                if d.is_zero() {
                    return Err(EliminatorError::DivisionByZero);
                }
                Num::norm(a.eval(env)?.ratio() / d.ratio())
            }
            Term::Pow(a, k) => {
                let base = a.eval(env)?;
                let mut acc = Num::Int(1);
                for _ in 0..*k {
                    acc = acc.mul(base);
                }
                acc
            }
            Term::Min(xs) | Term::Max(xs) => {
                let mut it = xs.iter();
                let mut best = it.next().expect("nonempty").eval(env)?;
                for x in it {
                    let v = x.eval(env)?;
                    let better = match self {
                        Term::Min(_) => v.cmp(best).is_lt(),
                        _ => v.cmp(best).is_gt(),
                    };
                    if better {
                        best = v;
                    }
                }
                best
            }
        })
    }
}

impl Constraint {
    pub fn holds(&self, env: &[i128]) -> Result<bool, EliminatorError> {
        Ok(match self {
            Constraint::Compare(op, a, b) => op.holds(a.eval(env)?.cmp(b.eval(env)?)),
            Constraint::Divides(a, b) => {
                let (a, b) = (a.eval(env)?, b.eval(env)?);
                match (a.as_int(), b.as_int()) {
                    (Some(0), Some(b)) => b == 0,
                    (Some(a), Some(b)) => b.mod_floor(&a.abs()) == 0,
                    _ => false,
                }
            }
            Constraint::And(cs) => {
                for c in cs {
                    if !c.holds(env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Constraint::Or(cs) => {
                for c in cs {
                    if c.holds(env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Constraint::Not(c) => !c.holds(env)?,
            Constraint::Implies(a, b) => !a.holds(env)? || b.holds(env)?,
        })
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Constraint::Compare(_, a, b) | Constraint::Divides(a, b) => {
                max_var_term(a).max(max_var_term(b))
            }
            Constraint::And(cs) | Constraint::Or(cs) => cs.iter().filter_map(|c| c.max_var()).max(),
            Constraint::Not(c) => c.max_var(),
            Constraint::Implies(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// For a comparison linear in `v`, the comparison and f = lhs − rhs.
    pub fn linear_in(&self, v: usize) -> Option<(Cmp, Term)> {
        match self {
            Constraint::Compare(op, a, b) if *op != Cmp::Ne => {
                let f = Term::Sub(Box::new(a.clone()), Box::new(b.clone()));
                (degree(&f, v)? <= 1).then_some((*op, f))
            }
            _ => None,
        }
    }
}

/// Parses prefix-notation JSON: numbers, variable names, and arrays
/// `[op, args...]`.
pub struct Parser<'a> {
    pub vars: &'a BTreeMap<String, usize>,
}

impl Parser<'_> {
    pub fn term(&self, v: &Value) -> Result<Term, EliminatorError> {
        match v {
            Value::Number(n) => n
                .as_i64()
                .map(|i| Term::Const(i as i128))
                .ok_or_else(|| EliminatorError::Parse(format!("non-integer constant {n}"))),
            Value::String(s) => self
                .vars
                .get(s)
                .map(|&i| Term::Var(i))
                .ok_or_else(|| EliminatorError::Parse(format!("undeclared variable {s}"))),
            Value::Array(a) => {
                let (op, args) = split(a)?;
                let ts = || args.iter().map(|x| self.term(x)).collect::<Result<Vec<_>, _>>();
                let two = || -> Result<(Term, Term), EliminatorError> {
                    if args.len() != 2 {
                        return Err(EliminatorError::Parse(format!("{op} takes 2 arguments")));
                    }
                    Ok((self.term(&args[0])?, self.term(&args[1])?))
                };
                Ok(match op {
                    "+" => Term::Add(nonempty(ts()?, op)?),
                    "*" => Term::Mul(nonempty(ts()?, op)?),
                    "min" => Term::Min(nonempty(ts()?, op)?),
                    "max" => Term::Max(nonempty(ts()?, op)?),
                    "-" if args.len() == 1 => Term::Neg(Box::new(self.term(&args[0])?)),
                    "-" => {
                        let (a, b) = two()?;
                        Term::Sub(Box::new(a), Box::new(b))
                    }
                    "/" => {
                        let (a, b) = two()?;
                        Term::Div(Box::new(a), Box::new(b))
                    }
                    "^" => {
                        let k = args
                            .get(1)
                            .and_then(Value::as_u64)
                            .filter(|_| args.len() == 2)
                            .ok_or_else(|| EliminatorError::Parse("^ needs a literal exponent".into()))?;
                        Term::Pow(Box::new(self.term(&args[0])?), k as u32)
                    }
                    _ => return Err(EliminatorError::Parse(format!("unknown operator {op}"))),
                })
            }
            _ => Err(EliminatorError::Parse(format!("bad term {v}"))),
        }
    }

    pub fn constraint(&self, v: &Value) -> Result<Constraint, EliminatorError> {
        let Value::Array(a) = v else {
            return Err(EliminatorError::Parse(format!("bad constraint {v}")));
        };
        let (op, args) = split(a)?;
        let cs = || args.iter().map(|x| self.constraint(x)).collect::<Result<Vec<_>, _>>();
        let cmp = match op {
            "==" => Some(Cmp::Eq),
            "!=" => Some(Cmp::Ne),
            "<=" => Some(Cmp::Le),
            "<" => Some(Cmp::Lt),
            ">=" => Some(Cmp::Ge),
            ">" => Some(Cmp::Gt),
            _ => None,
        };
        if let Some(c) = cmp {
            if args.len() != 2 {
                return Err(EliminatorError::Parse(format!("{op} takes 2 arguments")));
            }
            return Ok(Constraint::Compare(c, self.term(&args[0])?, self.term(&args[1])?));
        }
        Ok(match op {
            "divides" if args.len() == 2 => {
                Constraint::Divides(self.term(&args[0])?, self.term(&args[1])?)
            }
            "and" => Constraint::And(cs()?),
            "or" => Constraint::Or(cs()?),
            "not" if args.len() == 1 => Constraint::Not(Box::new(self.constraint(&args[0])?)),
            "implies" if args.len() == 2 => Constraint::Implies(
                Box::new(self.constraint(&args[0])?),
                Box::new(self.constraint(&args[1])?),
            ),
            _ => return Err(EliminatorError::Parse(format!("unknown constraint {op}"))),
        })
    }
}

fn split(a: &[Value]) -> Result<(&str, &[Value]), EliminatorError> {
    match a.split_first() {
        Some((Value::String(op), args)) => Ok((op.as_str(), args)),
        _ => Err(EliminatorError::Parse("expression must start with an operator".into())),
    }
}

fn nonempty(v: Vec<Term>, op: &str) -> Result<Vec<Term>, EliminatorError> {
    if v.is_empty() {
        Err(EliminatorError::Parse(format!("{op} needs arguments")))
    } else {
        Ok(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[Term], sep: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(i) => write!(f, "x{i}"),
            Term::Add(xs) => join(f, xs, " + "),
            Term::Mul(xs) => join(f, xs, "·"),
            Term::Sub(a, b) => write!(f, "({a} − {b})"),
            Term::Neg(a) => write!(f, "−{a}"),
            Term::Div(a, b) => write!(f, "({a} / {b})"),
            Term::Pow(a, k) => write!(f, "{a}^{k}"),
            Term::Min(xs) => {
                write!(f, "min")?;
                join(f, xs, ", ")
            }
            Term::Max(xs) => {
                write!(f, "max")?;
                join(f, xs, ", ")
            }
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Compare(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Constraint::Divides(a, b) => write!(f, "{a} | {b}"),
            Constraint::And(cs) | Constraint::Or(cs) => {
                let sep = if matches!(self, Constraint::And(_)) { " ∧ " } else { " ∨ " };
                write!(f, "[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{sep}")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
            Constraint::Not(c) => write!(f, "¬{c}"),
            Constraint::Implies(a, b) => write!(f, "({a} ⇒ {b})"),
        }
    }
}
