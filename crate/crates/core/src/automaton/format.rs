use std::fmt::Write as _;

use super::{AutomatonBuilder, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::semiring::Semiring;

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        msg: msg.into(),
    }
}

// Errors from the builder lose their position; reattach it.
fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Syntax { .. } => e,
        other => syntax(line, other.to_string()),
    }
}

/// Parses the line-oriented automaton format.
///
/// ```text
/// semiring: maxplus
/// states: L A H
/// alphabet: l f
/// init: L=0
/// final: H=0
/// ap: H ok
/// trans: L l A 2
/// ```
pub fn parse_automaton(text: &str) -> Result<WeightedAutomaton> {
    let mut builder: Option<AutomatonBuilder> = None;
    let mut saw_states = false;
    let mut saw_alphabet = false;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| syntax(line_no, format!("expected `key: value`, got `{line}`")))?;
        let key = key.trim();
        let rest = rest.trim();
        let fields: Vec<&str> = rest.split_whitespace().collect();

        if key == "semiring" {
            if builder.is_some() {
                return Err(syntax(line_no, "semiring declared twice"));
            }
            let s = Semiring::from_name(rest)?;
            builder = Some(AutomatonBuilder::new(s));
            continue;
        }
        let b = builder
            .as_mut()
            .ok_or_else(|| syntax(line_no, "the first declaration must be `semiring:`"))?;
        let s = b.semiring();
        let err = at_line(line_no);

        match key {
            "states" => {
                if saw_states {
                    return Err(syntax(line_no, "states declared twice"));
                }
                saw_states = true;
                for name in &fields {
                    b.state(name).map_err(&err)?;
                }
            }
            "alphabet" => {
                if saw_alphabet {
                    return Err(syntax(line_no, "alphabet declared twice"));
                }
                saw_alphabet = true;
                for name in &fields {
                    b.label(name).map_err(&err)?;
                }
            }
            "init" | "final" => {
                if fields.is_empty() {
                    return Err(syntax(line_no, format!("`{key}:` needs name=weight pairs")));
                }
                for item in &fields {
                    let (name, lit) = item
                        .split_once('=')
                        .ok_or_else(|| syntax(line_no, format!("expected name=weight, got `{item}`")))?;
                    let w = s.parse_weight(lit).map_err(&err)?;
                    match (key, name) {
                        ("init", "*") => b.initial_all(w),
                        ("final", "*") => b.final_all(w),
                        ("init", _) => b.initial(name, w),
                        _ => b.final_weight(name, w),
                    }
                    .map_err(&err)?;
                }
            }
            "ap" => {
                let (state, props) = fields
                    .split_first()
                    .ok_or_else(|| syntax(line_no, "`ap:` needs a state name"))?;
                for p in props {
                    b.prop(state, p).map_err(&err)?;
                }
            }
            "trans" => {
                let [from, label, to, lit] = fields[..] else {
                    return Err(syntax(line_no, "expected `trans: FROM LABEL TO WEIGHT`"));
                };
                let w = s.parse_weight(lit).map_err(&err)?;
                b.transition(from, label, to, w).map_err(&err)?;
            }
            other => return Err(syntax(line_no, format!("unknown key `{other}`"))),
        }
    }

    builder
        .ok_or_else(|| syntax(0, "missing `semiring:` declaration"))?
        .build()
}

/// Writes an automaton in the format read by [`parse_automaton`].
pub fn serialize_automaton(a: &WeightedAutomaton) -> String {
    let s = a.semiring();
    let mut out = String::new();
    let _ = writeln!(out, "semiring: {}", s.name());
    let _ = writeln!(out, "states: {}", a.states().join(" "));
    let _ = writeln!(out, "alphabet: {}", a.labels().join(" "));
    for (key, v) in [("init", a.initial()), ("final", a.final_weights())] {
        if v.is_zero() {
            continue;
        }
        let pairs: Vec<String> = v
            .iter()
            .map(|(x, w)| format!("{}={}", a.state_name(x), w))
            .collect();
        let _ = writeln!(out, "{key}: {}", pairs.join(" "));
    }
    for x in 0..a.n() {
        let props = a.props(x);
        if !props.is_empty() {
            let names: Vec<&str> = props.iter().map(String::as_str).collect();
            let _ = writeln!(out, "ap: {} {}", a.state_name(x), names.join(" "));
        }
    }
    for x in 0..a.n() {
        for (l, label) in a.labels().iter().enumerate() {
            for &(y, w) in a.matrix(l).row(x) {
                let _ = writeln!(out, "trans: {} {} {} {}", a.state_name(x), label, a.state_name(y), w);
            }
        }
    }
    out
}
