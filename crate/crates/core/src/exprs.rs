//! Amplitude expressions over named real parameters.
//!
//! Expressions stay symbolic until a [`Binding`] assigns every parameter a
//! real value; evaluation is plain double-precision complex arithmetic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("parameter '{0}' is not bound")]
    MissingBinding(String),
    #[error("sqrt of negative value {0}")]
    Domain(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    /// `cis(x) = e^{ix}`
    Cis,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Cis => "cis",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            "cis" => Some(Func::Cis),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AmpExpr {
    Const(Complex64),
    /// The imaginary unit.
    I,
    Param(Arc<str>),
    Neg(Box<AmpExpr>),
    Add(Box<AmpExpr>, Box<AmpExpr>),
    Mul(Box<AmpExpr>, Box<AmpExpr>),
    Call(Func, Box<AmpExpr>),
}

impl AmpExpr {
    pub fn real(x: f64) -> Self {
        AmpExpr::Const(Complex64::new(x, 0.0))
    }

    pub fn one() -> Self {
        AmpExpr::real(1.0)
    }

    pub fn i() -> Self {
        AmpExpr::I
    }

    pub fn param(name: &str) -> Self {
        AmpExpr::Param(Arc::from(name))
    }

    pub fn call(func: Func, arg: AmpExpr) -> Self {
        AmpExpr::Call(func, Box::new(arg))
    }

    pub fn sin(arg: AmpExpr) -> Self {
        Self::call(Func::Sin, arg)
    }

    pub fn cos(arg: AmpExpr) -> Self {
        Self::call(Func::Cos, arg)
    }

    pub fn sqrt(arg: AmpExpr) -> Self {
        Self::call(Func::Sqrt, arg)
    }

    pub fn cis(arg: AmpExpr) -> Self {
        Self::call(Func::Cis, arg)
    }

    pub fn eval(&self, binding: &Binding) -> Result<Complex64, ExprError> {
        Ok(match self {
            AmpExpr::Const(c) => *c,
            AmpExpr::I => Complex64::i(),
            AmpExpr::Param(name) => Complex64::new(binding.require(name)?, 0.0),
            AmpExpr::Neg(a) => -a.eval(binding)?,
            AmpExpr::Add(a, b) => a.eval(binding)? + b.eval(binding)?,
            AmpExpr::Mul(a, b) => a.eval(binding)? * b.eval(binding)?,
            AmpExpr::Call(func, arg) => {
                let x = arg.eval(binding)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => {
                        if x.im == 0.0 && x.re < 0.0 {
                            return Err(ExprError::Domain(x.re));
                        }
                        if x.im == 0.0 {
                            Complex64::new(x.re.sqrt(), 0.0)
                        } else {
                            x.sqrt()
                        }
                    }
                    Func::Cis => (Complex64::i() * x).exp(),
                }
            }
        })
    }

    pub fn parameters(&self) -> BTreeSet<String> {
        let mut names = BTreeSet::new();
        self.collect_parameters(&mut names);
        names
    }

    fn collect_parameters(&self, out: &mut BTreeSet<String>) {
        match self {
            AmpExpr::Const(_) | AmpExpr::I => {}
            AmpExpr::Param(name) => {
                out.insert(name.to_string());
            }
            AmpExpr::Neg(a) | AmpExpr::Call(_, a) => a.collect_parameters(out),
            AmpExpr::Add(a, b) | AmpExpr::Mul(a, b) => {
                a.collect_parameters(out);
                b.collect_parameters(out);
            }
        }
    }

    /// Printing precedence: 0 sum, 1 product, 2 unary, 3 atom.
    fn precedence(&self) -> u8 {
        match self {
            AmpExpr::Add(..) => 0,
            AmpExpr::Mul(..) => 1,
            AmpExpr::Neg(_) => 2,
            AmpExpr::Const(c) if c.im != 0.0 => 0,
            AmpExpr::Const(c) if c.re.is_sign_negative() => 2,
            _ => 3,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            AmpExpr::Const(c) if c.im != 0.0 => {
                write!(f, "{} + {} * i", fmt_real(c.re), fmt_real(c.im))
            }
            AmpExpr::Const(c) => write!(f, "{}", fmt_real(c.re)),
            AmpExpr::I => write!(f, "i"),
            AmpExpr::Param(name) => write!(f, "{name}"),
            AmpExpr::Neg(a) => {
                write!(f, "-")?;
                // "-1" would read back as a negative literal
                if let AmpExpr::Const(_) = **a {
                    write!(f, "(")?;
                    a.write_at(f, 0)?;
                    write!(f, ")")
                } else {
                    a.write_at(f, 2)
                }
            }
            AmpExpr::Add(a, b) => {
                a.write_at(f, 0)?;
                match &**b {
                    AmpExpr::Neg(inner) => {
                        write!(f, " - ")?;
                        inner.write_at(f, 1)
                    }
                    _ => {
                        write!(f, " + ")?;
                        b.write_at(f, 1)
                    }
                }
            }
            AmpExpr::Mul(a, b) => {
                a.write_at(f, 1)?;
                write!(f, " * ")?;
                b.write_at(f, 2)
            }
            AmpExpr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.write_at(f, 0)?;
                write!(f, ")")
            }
        }
    }

    /// Writes the expression so that it can stand as the left operand of `*`.
    pub fn display_as_factor(&self) -> FactorDisplay<'_> {
        FactorDisplay(self)
    }
}

fn fmt_real(x: f64) -> String {
    // `Display` for f64 is the shortest string that round-trips.
    format!("{x}")
}

impl fmt::Display for AmpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

pub struct FactorDisplay<'a>(&'a AmpExpr);

impl fmt::Display for FactorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write_at(f, 1)
    }
}

impl Add for AmpExpr {
    type Output = AmpExpr;

    fn add(self, rhs: AmpExpr) -> AmpExpr {
        AmpExpr::Add(Box::new(self), Box::new(rhs))
    }
}

impl Sub for AmpExpr {
    type Output = AmpExpr;

    fn sub(self, rhs: AmpExpr) -> AmpExpr {
        self + (-rhs)
    }
}

impl Mul for AmpExpr {
    type Output = AmpExpr;

    fn mul(self, rhs: AmpExpr) -> AmpExpr {
        AmpExpr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl Neg for AmpExpr {
    type Output = AmpExpr;

    fn neg(self) -> AmpExpr {
        AmpExpr::Neg(Box::new(self))
    }
}

/// Evaluates `expr` under `binding`.
pub fn eval(expr: &AmpExpr, binding: &Binding) -> Result<Complex64, ExprError> {
    expr.eval(binding)
}

pub fn parameters_of(expr: &AmpExpr) -> BTreeSet<String> {
    expr.parameters()
}

/// Assignment of real values to parameter names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Binding {
    values: BTreeMap<String, f64>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.values.insert(name.into(), value);
        self
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<f64, ExprError> {
        self.get(name)
            .ok_or_else(|| ExprError::MissingBinding(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Binding {
    fn from_iter<T: IntoIterator<Item = (S, f64)>>(iter: T) -> Self {
        Binding {
            values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}
