use super::{ClockConstraint, ModelError, Pred, TimedAutomaton};
use crate::syntax::{Cursor, SyntaxError, Tok};
use crate::zone::CmpOp;

const KEYWORDS: &[&str] = &[
    "clocks", "mode", "trans", "init", "prop", "inv", "guard", "reset", "and", "or", "not", "true", "false",
];

/// Parses the model text format:
///
/// ```text
/// clocks x y;
/// mode idle  { inv: true; }
/// mode busy  { inv: x <= 3; }
/// trans idle -> busy { guard: x >= 2; reset: x; }
/// prop working: busy;
/// init idle and x == 0 and y == 0;
/// ```
///
/// Clocks, modes and props must be declared before they are referenced.
pub fn parse_model(src: &str) -> Result<TimedAutomaton, ModelError> {
    let mut cur = Cursor::new(src)?;
    let mut ta = TimedAutomaton::new(Vec::new());
    let mut saw_init = false;
    loop {
        let pos = cur.pos();
        match cur.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(kw) if kw == "clocks" => {
                cur.bump();
                while !cur.eat(&Tok::Semi) {
                    let name = declared_name(&mut cur)?;
                    if ta.clock_index(&name).is_some() {
                        return Err(ModelError::Duplicate(name));
                    }
                    ta.clocks.push(name);
                    ta.model_clocks += 1;
                    cur.eat(&Tok::Comma);
                }
            }
            Tok::Ident(kw) if kw == "mode" => {
                cur.bump();
                let name = declared_name(&mut cur)?;
                if ta.mode_index(&name).is_some() {
                    return Err(ModelError::Duplicate(name));
                }
                let mut inv = Vec::new();
                if cur.eat(&Tok::LBrace) {
                    while !cur.eat(&Tok::RBrace) {
                        cur.expect_kw("inv")?;
                        cur.expect(&Tok::Colon)?;
                        inv.extend(parse_conjunction(&mut cur, &ta)?);
                        cur.expect(&Tok::Semi)?;
                    }
                } else {
                    cur.expect(&Tok::Semi)?;
                }
                ta.add_mode(name, inv);
            }
            Tok::Ident(kw) if kw == "trans" => {
                cur.bump();
                let src_mode = mode_ref(&mut cur, &ta)?;
                cur.expect(&Tok::Arrow)?;
                let dst_mode = mode_ref(&mut cur, &ta)?;
                let mut guard = Vec::new();
                let mut resets = Vec::new();
                if cur.eat(&Tok::LBrace) {
                    while !cur.eat(&Tok::RBrace) {
                        if cur.eat_kw("guard") {
                            cur.expect(&Tok::Colon)?;
                            guard.extend(parse_conjunction(&mut cur, &ta)?);
                        } else if cur.eat_kw("reset") {
                            cur.expect(&Tok::Colon)?;
                            while *cur.peek() != Tok::Semi {
                                let p = cur.pos();
                                let name = cur.ident()?;
                                let x = ta
                                    .clock_index(&name)
                                    .ok_or_else(|| SyntaxError::new(p, format!("unknown clock `{name}`")))?;
                                if !resets.contains(&x) {
                                    resets.push(x);
                                }
                                cur.eat(&Tok::Comma);
                            }
                        } else {
                            return Err(cur.unexpected("`guard` or `reset`").into());
                        }
                        cur.expect(&Tok::Semi)?;
                    }
                } else {
                    cur.expect(&Tok::Semi)?;
                }
                ta.add_transition(src_mode, dst_mode, guard, resets);
            }
            Tok::Ident(kw) if kw == "prop" => {
                cur.bump();
                let name = declared_name(&mut cur)?;
                if ta.prop(&name).is_some() || ta.mode_index(&name).is_some() || ta.clock_index(&name).is_some() {
                    return Err(ModelError::Duplicate(name));
                }
                cur.expect(&Tok::Colon)?;
                let p = parse_pred(&mut cur, &ta)?;
                cur.expect(&Tok::Semi)?;
                ta.props.push((name, p));
            }
            Tok::Ident(kw) if kw == "init" => {
                cur.bump();
                if saw_init {
                    return Err(SyntaxError::new(pos, "duplicate `init` declaration").into());
                }
                saw_init = true;
                ta.initial = parse_pred(&mut cur, &ta)?;
                cur.expect(&Tok::Semi)?;
            }
            _ => return Err(cur.unexpected("`clocks`, `mode`, `trans`, `prop` or `init`").into()),
        }
    }
    if !saw_init {
        return Err(SyntaxError::new(cur.pos(), "missing `init` declaration").into());
    }
    ta.validate()?;
    Ok(ta)
}

fn declared_name(cur: &mut Cursor) -> Result<String, SyntaxError> {
    let pos = cur.pos();
    let name = cur.ident()?;
    if KEYWORDS.contains(&name.as_str()) {
        return Err(SyntaxError::new(pos, format!("`{name}` is a reserved word")));
    }
    Ok(name)
}

fn mode_ref(cur: &mut Cursor, ta: &TimedAutomaton) -> Result<usize, SyntaxError> {
    let pos = cur.pos();
    let name = cur.ident()?;
    ta.mode_index(&name)
        .ok_or_else(|| SyntaxError::new(pos, format!("unknown mode `{name}`")))
}

pub(crate) fn cmp_op(cur: &mut Cursor) -> Option<CmpOp> {
    let op = match cur.peek() {
        Tok::Lt => CmpOp::Lt,
        Tok::Le => CmpOp::Le,
        Tok::Eq => CmpOp::Eq,
        Tok::Ge => CmpOp::Ge,
        Tok::Gt => CmpOp::Gt,
        _ => return None,
    };
    cur.bump();
    Some(op)
}

fn is_cmp(t: &Tok) -> bool {
    matches!(t, Tok::Lt | Tok::Le | Tok::Eq | Tok::Ge | Tok::Gt)
}

/// `clock op int`, where the clock may be the literal `0`.
pub(crate) fn parse_clock_atom(cur: &mut Cursor, ta: &TimedAutomaton) -> Result<ClockConstraint, SyntaxError> {
    let pos = cur.pos();
    let clock = match cur.bump() {
        Tok::Int(0) => 0,
        Tok::Ident(name) => ta
            .clock_index(&name)
            .ok_or_else(|| SyntaxError::new(pos, format!("unknown clock `{name}`")))?,
        t => return Err(SyntaxError::new(pos, format!("expected a clock, found {t}"))),
    };
    let op = cmp_op(cur).ok_or_else(|| cur.unexpected("a comparison operator"))?;
    let vpos = cur.pos();
    let value = cur.int()?;
    if value < 0 {
        return Err(SyntaxError::new(vpos, "clock constants must be non-negative"));
    }
    Ok(ClockConstraint::new(clock, op, value))
}

/// `true` or `atom and atom and ...` over clock atoms.
fn parse_conjunction(cur: &mut Cursor, ta: &TimedAutomaton) -> Result<Vec<ClockConstraint>, SyntaxError> {
    if cur.eat_kw("true") {
        return Ok(Vec::new());
    }
    let mut out = vec![parse_clock_atom(cur, ta)?];
    while cur.eat_kw("and") {
        out.push(parse_clock_atom(cur, ta)?);
    }
    Ok(out)
}

/// Full state predicate with `or` < `and` < `not` precedence.
pub(crate) fn parse_pred(cur: &mut Cursor, ta: &TimedAutomaton) -> Result<Pred, SyntaxError> {
    let mut p = parse_pred_and(cur, ta)?;
    while cur.eat_kw("or") {
        p = Pred::or(p, parse_pred_and(cur, ta)?);
    }
    Ok(p)
}

fn parse_pred_and(cur: &mut Cursor, ta: &TimedAutomaton) -> Result<Pred, SyntaxError> {
    let mut p = parse_pred_unary(cur, ta)?;
    while cur.eat_kw("and") {
        p = Pred::and(p, parse_pred_unary(cur, ta)?);
    }
    Ok(p)
}

fn parse_pred_unary(cur: &mut Cursor, ta: &TimedAutomaton) -> Result<Pred, SyntaxError> {
    if cur.eat_kw("not") {
        return Ok(Pred::not(parse_pred_unary(cur, ta)?));
    }
    if cur.eat(&Tok::LParen) {
        let p = parse_pred(cur, ta)?;
        cur.expect(&Tok::RParen)?;
        return Ok(p);
    }
    if cur.eat_kw("true") {
        return Ok(Pred::True);
    }
    if cur.eat_kw("false") {
        return Ok(Pred::False);
    }
    if is_cmp(cur.peek_at(1)) {
        return Ok(Pred::Clock(parse_clock_atom(cur, ta)?));
    }
    let pos = cur.pos();
    let name = cur.ident()?;
    if let Some(q) = ta.mode_index(&name) {
        Ok(Pred::Mode(q))
    } else if let Some(p) = ta.prop(&name) {
        Ok(p.clone())
    } else {
        Err(SyntaxError::new(pos, format!("unknown mode or proposition `{name}`")))
    }
}
