//! TCTL∞ formulas: surface syntax with the usual shorthands, and the core
//! grammar the engine evaluates.
//!
//! Core grammar: `q | x ∼ c | φ ∨ φ | ¬φ | x.φ | ∃φ U φ | ∃□φ | ∃□◇φ | ∃◇□φ`.

use std::fmt;

use crate::model::parse::{cmp_op, parse_clock_atom};
use crate::model::{ClockConstraint, ModelError, Pred, TimedAutomaton};
use crate::syntax::{Cursor, SyntaxError, Tok};
use crate::zone::{ClockIndex, CmpOp};

/// Core-grammar formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Mode(usize),
    Clock(ClockConstraint),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Freeze(ClockIndex, Box<Formula>),
    ExistsUntil(Box<Formula>, Box<Formula>),
    ExistsAlways(Box<Formula>),
    ExistsAlwaysEventually(Box<Formula>),
    ExistsEventuallyAlways(Box<Formula>),
}

/// Surface formula, possibly containing shorthands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    True,
    False,
    Mode(usize),
    Clock(ClockConstraint),
    Not(Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Freeze(ClockIndex, Box<Expr>),
    EU(Box<Expr>, Box<Expr>),
    AU(Box<Expr>, Box<Expr>),
    EF(Box<Expr>),
    EG(Box<Expr>),
    AF(Box<Expr>),
    AG(Box<Expr>),
    EGF(Box<Expr>),
    EFG(Box<Expr>),
    AGF(Box<Expr>),
    AFG(Box<Expr>),
}

fn bx<T>(t: T) -> Box<T> {
    Box::new(t)
}

impl Formula {
    pub fn truth() -> Formula {
        Formula::Clock(ClockConstraint::new(0, CmpOp::Eq, 0))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(bx(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(bx(a), bx(b))
    }

    pub fn eu(a: Formula, b: Formula) -> Formula {
        Formula::ExistsUntil(bx(a), bx(b))
    }

    /// Largest absolute constant in clock atoms.
    pub fn max_constant(&self) -> i64 {
        match self {
            Formula::Mode(_) => 0,
            Formula::Clock(c) => c.value.abs(),
            Formula::Not(a)
            | Formula::Freeze(_, a)
            | Formula::ExistsAlways(a)
            | Formula::ExistsAlwaysEventually(a)
            | Formula::ExistsEventuallyAlways(a) => a.max_constant(),
            Formula::Or(a, b) | Formula::ExistsUntil(a, b) => a.max_constant().max(b.max_constant()),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Mode(_) | Formula::Clock(_) => 1,
            Formula::Not(a)
            | Formula::Freeze(_, a)
            | Formula::ExistsAlways(a)
            | Formula::ExistsAlwaysEventually(a)
            | Formula::ExistsEventuallyAlways(a) => 1 + a.size(),
            Formula::Or(a, b) | Formula::ExistsUntil(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Renders the formula in the concrete syntax accepted by
    /// [`parse_formula`], fully parenthesized.
    pub fn display<'a>(&'a self, ta: &'a TimedAutomaton) -> impl fmt::Display + 'a {
        FormulaDisplay { f: self, ta }
    }
}

/// Expands every shorthand into the core grammar.
pub fn expand_shorthands(e: &Expr) -> Formula {
    use Formula as F;
    let ex = |e: &Expr| expand_shorthands(e);
    match e {
        Expr::True => F::truth(),
        Expr::False => F::not(F::truth()),
        Expr::Mode(q) => F::Mode(*q),
        Expr::Clock(c) => F::Clock(*c),
        Expr::Not(a) => F::not(ex(a)),
        Expr::Or(a, b) => F::or(ex(a), ex(b)),
        // ¬((¬a) ∨ (¬b))
        Expr::And(a, b) => F::not(F::or(F::not(ex(a)), F::not(ex(b)))),
        // (¬a) ∨ b
        Expr::Implies(a, b) => F::or(F::not(ex(a)), ex(b)),
        Expr::Freeze(x, a) => F::Freeze(*x, bx(ex(a))),
        Expr::EU(a, b) => F::eu(ex(a), ex(b)),
        // ¬((∃(¬b) U ¬(a ∨ b)) ∨ ∃□¬b)
        Expr::AU(a, b) => {
            let (a, b) = (ex(a), ex(b));
            F::not(F::or(
                F::eu(F::not(b.clone()), F::not(F::or(a, b.clone()))),
                F::ExistsAlways(bx(F::not(b))),
            ))
        }
        // ∃ true U a
        Expr::EF(a) => F::eu(F::truth(), ex(a)),
        Expr::EG(a) => F::ExistsAlways(bx(ex(a))),
        // ∀ true U a
        Expr::AF(a) => expand_shorthands(&Expr::AU(bx(Expr::True), a.clone())),
        // ¬∃◇¬a
        Expr::AG(a) => F::not(expand_shorthands(&Expr::EF(bx(Expr::Not(a.clone()))))),
        Expr::EGF(a) => F::ExistsAlwaysEventually(bx(ex(a))),
        Expr::EFG(a) => F::ExistsEventuallyAlways(bx(ex(a))),
        // ¬∃◇□¬a
        Expr::AGF(a) => F::not(F::ExistsEventuallyAlways(bx(F::not(ex(a))))),
        // ¬∃□◇¬a
        Expr::AFG(a) => F::not(F::ExistsAlwaysEventually(bx(F::not(ex(a))))),
    }
}

impl From<&Pred> for Expr {
    fn from(p: &Pred) -> Expr {
        match p {
            Pred::True => Expr::True,
            Pred::False => Expr::False,
            Pred::Mode(q) => Expr::Mode(*q),
            Pred::Clock(c) => Expr::Clock(*c),
            Pred::Not(a) => Expr::Not(bx(Expr::from(&**a))),
            Pred::And(a, b) => Expr::And(bx(Expr::from(&**a)), bx(Expr::from(&**b))),
            Pred::Or(a, b) => Expr::Or(bx(Expr::from(&**a)), bx(Expr::from(&**b))),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "and", "or", "not", "true", "false", "freeze", "E", "A", "U", "EU", "AU", "EF", "EG", "AF", "AG", "EGF", "EFG",
    "AGF", "AFG",
];

/// Parses a formula and expands its shorthands. Freeze clocks that are not
/// yet known are appended to `ta`'s clock list.
pub fn parse_formula(text: &str, ta: &mut TimedAutomaton) -> Result<Formula, ModelError> {
    Ok(expand_shorthands(&parse_expr(text, ta)?))
}

/// Parses a formula without expanding shorthands.
pub fn parse_expr(text: &str, ta: &mut TimedAutomaton) -> Result<Expr, ModelError> {
    let mut cur = Cursor::new(text)?;
    let e = FormulaParser { ta }.implies(&mut cur)?;
    if *cur.peek() != Tok::Eof {
        return Err(cur.unexpected("end of formula").into());
    }
    Ok(e)
}

struct FormulaParser<'a> {
    ta: &'a mut TimedAutomaton,
}

impl FormulaParser<'_> {
    fn implies(&mut self, cur: &mut Cursor) -> Result<Expr, SyntaxError> {
        let lhs = self.or(cur)?;
        if cur.eat(&Tok::Arrow) {
            let rhs = self.implies(cur)?;
            return Ok(Expr::Implies(bx(lhs), bx(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self, cur: &mut Cursor) -> Result<Expr, SyntaxError> {
        let mut e = self.and(cur)?;
        while cur.eat_kw("or") {
            e = Expr::Or(bx(e), bx(self.and(cur)?));
        }
        Ok(e)
    }

    fn and(&mut self, cur: &mut Cursor) -> Result<Expr, SyntaxError> {
        let mut e = self.unary(cur)?;
        while cur.eat_kw("and") {
            e = Expr::And(bx(e), bx(self.unary(cur)?));
        }
        Ok(e)
    }

    fn pair(&mut self, cur: &mut Cursor) -> Result<(Expr, Expr), SyntaxError> {
        cur.expect(&Tok::LParen)?;
        let a = self.implies(cur)?;
        cur.expect(&Tok::Comma)?;
        let b = self.implies(cur)?;
        cur.expect(&Tok::RParen)?;
        Ok((a, b))
    }

    fn until(&mut self, cur: &mut Cursor) -> Result<(Expr, Expr), SyntaxError> {
        cur.expect(&Tok::LParen)?;
        let a = self.implies(cur)?;
        cur.expect_kw("U")?;
        let b = self.implies(cur)?;
        cur.expect(&Tok::RParen)?;
        Ok((a, b))
    }

    fn unary(&mut self, cur: &mut Cursor) -> Result<Expr, SyntaxError> {
        if cur.eat(&Tok::LParen) {
            let e = self.implies(cur)?;
            cur.expect(&Tok::RParen)?;
            return Ok(e);
        }
        let pos = cur.pos();
        if let Tok::Int(_) = cur.peek() {
            return Ok(Expr::Clock(parse_clock_atom(cur, self.ta)?));
        }
        let word = cur.ident()?;
        let prefix = |f: fn(Box<Expr>) -> Expr, this: &mut Self, cur: &mut Cursor| -> Result<Expr, SyntaxError> {
            Ok(f(bx(this.unary(cur)?)))
        };
        match word.as_str() {
            "true" => Ok(Expr::True),
            "false" => Ok(Expr::False),
            "not" => prefix(Expr::Not, self, cur),
            "EF" => prefix(Expr::EF, self, cur),
            "EG" => prefix(Expr::EG, self, cur),
            "AF" => prefix(Expr::AF, self, cur),
            "AG" => prefix(Expr::AG, self, cur),
            "EGF" => prefix(Expr::EGF, self, cur),
            "EFG" => prefix(Expr::EFG, self, cur),
            "AGF" => prefix(Expr::AGF, self, cur),
            "AFG" => prefix(Expr::AFG, self, cur),
            "EU" => {
                let (a, b) = self.pair(cur)?;
                Ok(Expr::EU(bx(a), bx(b)))
            }
            "AU" => {
                let (a, b) = self.pair(cur)?;
                Ok(Expr::AU(bx(a), bx(b)))
            }
            "E" => {
                let (a, b) = self.until(cur)?;
                Ok(Expr::EU(bx(a), bx(b)))
            }
            "A" => {
                let (a, b) = self.until(cur)?;
                Ok(Expr::AU(bx(a), bx(b)))
            }
            "freeze" => {
                let xpos = cur.pos();
                let name = cur.ident()?;
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(SyntaxError::new(xpos, format!("`{name}` is a reserved word")));
                }
                let x = match self.ta.clock_index(&name) {
                    Some(x) if x <= self.ta.model_clocks => {
                        return Err(SyntaxError::new(
                            xpos,
                            format!("freeze clock `{name}` clashes with an automaton clock"),
                        ))
                    }
                    Some(x) => x,
                    None => {
                        if self.ta.mode_index(&name).is_some() || self.ta.prop(&name).is_some() {
                            return Err(SyntaxError::new(xpos, format!("`{name}` is already a mode or proposition")));
                        }
                        self.ta.add_formula_clock(name)
                    }
                };
                cur.expect(&Tok::Colon)?;
                let body = self.implies(cur)?;
                Ok(Expr::Freeze(x, bx(body)))
            }
            _ => {
                if matches!(cur.peek(), Tok::Lt | Tok::Le | Tok::Eq | Tok::Ge | Tok::Gt) {
                    let clock = self
                        .ta
                        .clock_index(&word)
                        .ok_or_else(|| SyntaxError::new(pos, format!("unknown clock `{word}`")))?;
                    let op = cmp_op(cur).expect("peeked a comparison");
                    let vpos = cur.pos();
                    let value = cur.int()?;
                    if value < 0 {
                        return Err(SyntaxError::new(vpos, "clock constants must be non-negative"));
                    }
                    return Ok(Expr::Clock(ClockConstraint::new(clock, op, value)));
                }
                if let Some(q) = self.ta.mode_index(&word) {
                    Ok(Expr::Mode(q))
                } else if let Some(p) = self.ta.prop(&word) {
                    Ok(Expr::from(p))
                } else {
                    Err(SyntaxError::new(pos, format!("unknown mode or proposition `{word}`")))
                }
            }
        }
    }
}

struct FormulaDisplay<'a> {
    f: &'a Formula,
    ta: &'a TimedAutomaton,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.f, self.ta)
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, g: &Formula, ta: &TimedAutomaton) -> fmt::Result {
    match g {
        Formula::Mode(q) => write!(f, "{}", ta.modes[*q].name),
        Formula::Clock(c) => write!(f, "{}", ta.constraint_text(c)),
        Formula::Or(a, b) => {
            f.write_str("(")?;
            write_formula(f, a, ta)?;
            f.write_str(" or ")?;
            write_formula(f, b, ta)?;
            f.write_str(")")
        }
        Formula::Not(a) => {
            f.write_str("(not ")?;
            write_formula(f, a, ta)?;
            f.write_str(")")
        }
        Formula::Freeze(x, a) => {
            write!(f, "(freeze {}: ", ta.clock_name(*x))?;
            write_formula(f, a, ta)?;
            f.write_str(")")
        }
        Formula::ExistsUntil(a, b) => {
            f.write_str("EU(")?;
            write_formula(f, a, ta)?;
            f.write_str(", ")?;
            write_formula(f, b, ta)?;
            f.write_str(")")
        }
        Formula::ExistsAlways(a) | Formula::ExistsAlwaysEventually(a) | Formula::ExistsEventuallyAlways(a) => {
            let op = match g {
                Formula::ExistsAlways(_) => "EG",
                Formula::ExistsAlwaysEventually(_) => "EGF",
                _ => "EFG",
            };
            write!(f, "({op} ")?;
            write_formula(f, a, ta)?;
            f.write_str(")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_model;

    fn fischer_like() -> TimedAutomaton {
        parse_model(
            "clocks x; mode idle; mode ready1 { inv: x <= 1; } mode critical1; mode async1;
             init idle;",
        )
        .unwrap()
    }

    #[test]
    fn bounded_waiting_property_expands_fully() {
        let mut ta = fischer_like();
        let f = parse_formula("AG (ready1 -> AF critical1)", &mut ta).unwrap();
        use Formula as F;
        let (ready, crit) = (F::Mode(1), F::Mode(2));
        let af = F::not(F::or(
            F::eu(F::not(crit.clone()), F::not(F::or(F::truth(), crit.clone()))),
            F::ExistsAlways(bx(F::not(crit))),
        ));
        let expected = F::not(F::eu(F::truth(), F::not(F::or(F::not(ready), af))));
        assert_eq!(f, expected);
    }

    #[test]
    fn fairness_operators_parse() {
        let mut ta = fischer_like();
        let f = parse_formula("EGF async1", &mut ta).unwrap();
        assert_eq!(f, Formula::ExistsAlwaysEventually(bx(Formula::Mode(3))));
        let f = parse_formula("not not idle", &mut ta).unwrap();
        assert_eq!(f, Formula::not(Formula::not(Formula::Mode(0))));
    }

    #[test]
    fn shorthand_table() {
        let p = Expr::Mode(0);
        let q = Expr::Mode(1);
        let fp = Formula::Mode(0);
        let fq = Formula::Mode(1);
        assert_eq!(
            expand_shorthands(&Expr::AG(bx(p.clone()))),
            Formula::not(Formula::eu(Formula::truth(), Formula::not(fp.clone())))
        );
        assert_eq!(
            expand_shorthands(&Expr::Implies(bx(p.clone()), bx(q))),
            Formula::or(Formula::not(fp.clone()), fq)
        );
        assert_eq!(expand_shorthands(&Expr::True), Formula::Clock(ClockConstraint::new(0, CmpOp::Eq, 0)));
        assert_eq!(
            expand_shorthands(&Expr::AGF(bx(p))),
            Formula::not(Formula::ExistsEventuallyAlways(bx(Formula::not(fp))))
        );
    }

    #[test]
    fn freeze_clocks_are_appended() {
        let mut ta = fischer_like();
        let f = parse_formula("freeze t: EF (critical1 and t <= 5)", &mut ta).unwrap();
        assert_eq!(ta.clocks, vec!["x", "t"]);
        assert_eq!(f.max_constant(), 5);
        assert!(matches!(f, Formula::Freeze(2, _)));
        assert!(parse_formula("freeze x: idle", &mut ta).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let mut ta = fischer_like();
        match parse_formula("EG (idle or nowhere)", &mut ta) {
            Err(ModelError::Syntax(e)) => assert_eq!(e.pos.col, 13),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_formula("EG idle )", &mut ta).is_err());
        assert!(parse_formula("y <= 2", &mut ta).is_err());
    }

    #[test]
    fn until_syntaxes_agree() {
        let mut ta = fischer_like();
        let a = parse_formula("E (idle U critical1)", &mut ta).unwrap();
        let b = parse_formula("EU(idle, critical1)", &mut ta).unwrap();
        assert_eq!(a, b);
    }
}
