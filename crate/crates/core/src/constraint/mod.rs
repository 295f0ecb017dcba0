//! Constraint functions G(|Ec|, |Eh|) = const: parsing, evaluation, exact
//! first and second partials, symmetry testing, and the named presets.

mod dual;
mod parser;
mod token;

pub use dual::Taylor2;
pub use parser::{BinOp, Expr, Func, Var, PARAM_NAMES};
pub use token::{tokenize, Token, TokenKind};

use crate::{Error, Result, Tolerances};
use std::collections::BTreeMap;
use std::fmt;

/// A parsed constraint: the expression tree, its source text, and the
/// bound parameter values. Immutable; `bind` returns an updated copy.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintExpr {
    ast: Expr,
    source: String,
    params: BTreeMap<String, f64>,
}

/// G and its partials at one point. The first index of the field name is
/// the derivative order in |Ec|, the second in |Eh|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialDerivs {
    pub g00: f64,
    pub g10: f64,
    pub g01: f64,
    pub g20: f64,
    pub g11: f64,
    pub g02: f64,
}

/// Parses constraint source text. Variables are `Ec` and `Eh`; the named
/// parameters `alpha`, `d`, `s`, `eta_c` parse as free parameters to be
/// bound before evaluation.
pub fn parse(text: &str) -> Result<ConstraintExpr> {
    let tokens = token::tokenize(text)?;
    let ast = parser::Parser::new(&tokens, text.chars().count()).parse()?;
    Ok(ConstraintExpr {
        ast,
        source: text.to_string(),
        params: BTreeMap::new(),
    })
}

impl fmt::Display for ConstraintExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

impl ConstraintExpr {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Returns a copy with `name` bound to `value`.
    pub fn bind(&self, name: &str, value: f64) -> ConstraintExpr {
        let mut out = self.clone();
        out.params.insert(name.to_string(), value);
        out
    }

    /// True when the expression references the reserved `eta_c` parameter,
    /// i.e. the constraint depends on the temperatures themselves.
    pub fn references_eta_c(&self) -> bool {
        self.ast.references_param("eta_c")
    }

    /// Evaluates G at (Ec, Eh). All referenced parameters must be bound.
    pub fn eval(&self, ec: f64, eh: f64) -> Result<f64> {
        let v = eval_node(
            &self.ast,
            &Env {
                ec,
                eh,
                params: &self.params,
            },
        )?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("G({ec}, {eh}) is not finite")));
        }
        Ok(v)
    }

    /// First and second partials at (Ec, Eh), exact to rounding, via
    /// truncated two-variable Taylor arithmetic.
    pub fn partials(&self, ec: f64, eh: f64) -> Result<PartialDerivs> {
        let env = Env {
            ec,
            eh,
            params: &self.params,
        };
        let seed = TaylorEnv {
            ec: Taylor2::var_x(ec),
            eh: Taylor2::var_y(eh),
            env: &env,
        };
        let t = eval_taylor(&self.ast, &seed)?;
        if !t.is_finite() {
            return Err(Error::Domain(format!(
                "partials of G at ({ec}, {eh}) are not finite"
            )));
        }
        Ok(PartialDerivs {
            g00: t.v,
            g10: t.dx,
            g01: t.dy,
            g20: t.dxx,
            g11: t.dxy,
            g02: t.dyy,
        })
    }

    /// Numeric symmetry test: G(x, y) = G(y, x) on a deterministic
    /// low-discrepancy sample of [0.1, 10]^2, at the default relative
    /// tolerance. Samples that hit a domain error are skipped; if every
    /// sample is skipped the test is indeterminate.
    pub fn is_symmetric(&self, sample_count: usize) -> Result<bool> {
        self.is_symmetric_with_tol(sample_count, Tolerances::default().constraint_symmetry)
    }

    /// [`Self::is_symmetric`] with an explicit relative tolerance.
    pub fn is_symmetric_with_tol(&self, sample_count: usize, tol: f64) -> Result<bool> {
        let mut tested = 0usize;
        for k in 0..sample_count.max(1) {
            let x = 0.1 + 9.9 * halton(k as u32 + 1, 2);
            let y = 0.1 + 9.9 * halton(k as u32 + 1, 3);
            let (a, b) = match (self.eval(x, y), self.eval(y, x)) {
                (Ok(a), Ok(b)) => (a, b),
                // unbound parameters fail everywhere; report them directly
                (Err(e @ Error::UnboundParam(_)), _) | (_, Err(e @ Error::UnboundParam(_))) => {
                    return Err(e)
                }
                _ => continue,
            };
            tested += 1;
            if (a - b).abs() > tol * (1.0 + a.abs()) {
                return Ok(false);
            }
        }
        if tested == 0 {
            return Err(Error::IndeterminateSymmetry);
        }
        Ok(true)
    }
}

/// Van der Corput radical inverse; k >= 1.
fn halton(mut k: u32, base: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while k > 0 {
        f /= base as f64;
        r += f * (k % base) as f64;
        k /= base;
    }
    r
}

struct Env<'a> {
    ec: f64,
    eh: f64,
    params: &'a BTreeMap<String, f64>,
}

fn eval_node(e: &Expr, env: &Env) -> Result<f64> {
    Ok(match e {
        Expr::Number(v) => *v,
        Expr::Variable(Var::Ec) => env.ec,
        Expr::Variable(Var::Eh) => env.eh,
        Expr::Param(name) => *env
            .params
            .get(name)
            .ok_or_else(|| Error::UnboundParam(name.clone()))?,
        Expr::Unary(inner) => -eval_node(inner, env)?,
        Expr::Binary(op, a, b) => {
            let x = eval_node(a, env)?;
            let y = eval_node(b, env)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(Error::Domain("division by zero".into()));
                    }
                    x / y
                }
                BinOp::Pow => checked_pow(x, y)?,
            }
        }
        Expr::Call(func, arg) => {
            let u = eval_node(arg, env)?;
            match func {
                Func::Sqrt => {
                    if u < 0.0 {
                        return Err(Error::Domain(format!("sqrt of negative value {u}")));
                    }
                    u.sqrt()
                }
                Func::Log => {
                    if u <= 0.0 {
                        return Err(Error::Domain(format!("log of non-positive value {u}")));
                    }
                    u.ln()
                }
                Func::Exp => u.exp(),
                Func::Inv => {
                    if u == 0.0 {
                        return Err(Error::Domain("inv of zero".into()));
                    }
                    1.0 / u
                }
            }
        }
    })
}

fn checked_pow(base: f64, exponent: f64) -> Result<f64> {
    if base > 0.0 {
        return Ok(base.powf(exponent));
    }
    // non-positive base: allow integer exponents only
    if exponent.fract() == 0.0 && exponent.abs() < i32::MAX as f64 {
        if base == 0.0 && exponent < 0.0 {
            return Err(Error::Domain("0 raised to a negative power".into()));
        }
        return Ok(base.powi(exponent as i32));
    }
    Err(Error::Domain(format!(
        "{base}^{exponent}: non-integer power of a non-positive base"
    )))
}

struct TaylorEnv<'a> {
    ec: Taylor2,
    eh: Taylor2,
    env: &'a Env<'a>,
}

fn eval_taylor(e: &Expr, t: &TaylorEnv) -> Result<Taylor2> {
    Ok(match e {
        Expr::Number(v) => Taylor2::constant(*v),
        Expr::Variable(Var::Ec) => t.ec,
        Expr::Variable(Var::Eh) => t.eh,
        Expr::Param(name) => Taylor2::constant(
            *t.env
                .params
                .get(name)
                .ok_or_else(|| Error::UnboundParam(name.clone()))?,
        ),
        Expr::Unary(inner) => -eval_taylor(inner, t)?,
        Expr::Binary(op, a, b) => {
            let x = eval_taylor(a, t)?;
            match op {
                BinOp::Add => x + eval_taylor(b, t)?,
                BinOp::Sub => x - eval_taylor(b, t)?,
                BinOp::Mul => x * eval_taylor(b, t)?,
                BinOp::Div => {
                    let y = eval_taylor(b, t)?;
                    if y.v == 0.0 {
                        return Err(Error::Domain("division by zero".into()));
                    }
                    x / y
                }
                BinOp::Pow => {
                    // a constant exponent keeps non-positive bases usable
                    if b.is_constant() {
                        let k = eval_node(b, t.env)?;
                        if x.v > 0.0 {
                            x.powf(k)
                        } else if k.fract() == 0.0 && k.abs() < i32::MAX as f64 {
                            if x.v == 0.0 && k < 0.0 {
                                return Err(Error::Domain("0 raised to a negative power".into()));
                            }
                            x.powi(k as i32)
                        } else {
                            return Err(Error::Domain(format!(
                                "{}^{k}: non-integer power of a non-positive base",
                                x.v
                            )));
                        }
                    } else {
                        if x.v <= 0.0 {
                            return Err(Error::Domain(
                                "power with variable exponent needs a positive base".into(),
                            ));
                        }
                        x.pow(eval_taylor(b, t)?)
                    }
                }
            }
        }
        Expr::Call(func, arg) => {
            let u = eval_taylor(arg, t)?;
            match func {
                Func::Sqrt => {
                    if u.v <= 0.0 {
                        return Err(Error::Domain(format!(
                            "sqrt of non-positive value {} (derivative singular at 0)",
                            u.v
                        )));
                    }
                    u.sqrt()
                }
                Func::Log => {
                    if u.v <= 0.0 {
                        return Err(Error::Domain(format!("log of non-positive value {}", u.v)));
                    }
                    u.ln()
                }
                Func::Exp => u.exp(),
                Func::Inv => {
                    if u.v == 0.0 {
                        return Err(Error::Domain("inv of zero".into()));
                    }
                    u.recip()
                }
            }
        }
    })
}

/// The named constraint families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// |Eh| = const
    HotNorm,
    /// |Ec| = const
    ColdNorm,
    /// |Ec| |Eh| = const
    Product,
    /// alpha |Ec| + (1-alpha) |Eh| = const
    AlphaLinear,
    /// |Ec| - (1-d) |Eh| = const
    DLinear,
    /// (s/eta_c) |Ec| + (1 - s/eta_c) |Eh| = const; eta_c stays symbolic
    /// and is bound at solve time.
    SLinear,
    /// 1/|Ec| + 1/|Eh| = const (minimal adiabatic-stroke time of the
    /// two-spin engine scales with this sum).
    InverseSum,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::HotNorm,
        Preset::ColdNorm,
        Preset::Product,
        Preset::AlphaLinear,
        Preset::DLinear,
        Preset::SLinear,
        Preset::InverseSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::HotNorm => "hot_norm",
            Preset::ColdNorm => "cold_norm",
            Preset::Product => "product",
            Preset::AlphaLinear => "alpha_linear",
            Preset::DLinear => "d_linear",
            Preset::SLinear => "s_linear",
            Preset::InverseSum => "inverse_sum",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Preset> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Builds a preset constraint, substituting numeric parameters where the
/// family fixes them and keeping `eta_c` symbolic for `s_linear`.
pub fn preset(kind: Preset, params: &BTreeMap<String, f64>) -> Result<ConstraintExpr> {
    let need = |name: &str| -> Result<f64> {
        params
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingParam {
                preset: kind.name().to_string(),
                param: name.to_string(),
            })
    };
    let text = match kind {
        Preset::HotNorm => "Eh".to_string(),
        Preset::ColdNorm => "Ec".to_string(),
        Preset::Product => "Ec*Eh".to_string(),
        Preset::AlphaLinear => {
            let alpha = need("alpha")?;
            format!(
                "{}*Ec + {}*Eh",
                fmt_literal(alpha),
                fmt_literal(1.0 - alpha)
            )
        }
        Preset::DLinear => "Ec - (1-d)*Eh".to_string(),
        Preset::SLinear => "(s/eta_c)*Ec + (1-s/eta_c)*Eh".to_string(),
        Preset::InverseSum => "1/Ec + 1/Eh".to_string(),
    };
    let expr = parse(&text)?;
    match kind {
        Preset::DLinear => Ok(expr.bind("d", need("d")?)),
        Preset::SLinear => Ok(expr.bind("s", need("s")?)),
        _ => Ok(expr),
    }
}

fn fmt_literal(v: f64) -> String {
    if v < 0.0 {
        format!("({v})")
    } else {
        format!("{v}")
    }
}
