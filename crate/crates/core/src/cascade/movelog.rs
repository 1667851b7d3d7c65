//! Line-oriented record of solver moves, replayable against an instance.
//!
//! ```text
//! rainbow-moves v1
//! n 3 eta 3
//! 0 extend (1,0,0) | add 0 (0,1)
//! 1 swap-extend (0,1,0) | add 0 (1,1) via (3,2) drop (0,1)
//! 2 cascade-shift (1,1,0) | move 1>0 (4,2) ; add 1 (5,2)
//! ```
//!
//! Ops: `add S e [via w drop r]` adds the unused `e` to member `S` (indirectly when `via` is
//! given); `move A>S e [via w drop r]` moves `e` from member `A` into member `S`;
//! `recolour S b m1 m2 .. -> t` recolours member `S` along a good path from the missing colour
//! `b` to the terminal `t`; `exchange A>S take e1 .. release f1 ..` moves the `take` elements
//! from `A` into `S` and frees the `release` elements of `S`.

use std::fmt;

use thiserror::Error;

use crate::rainbow::{Collection, ColouredElement, ModelError, Ris, Signature, Universe};

use super::good::recolour;

pub const HEADER: &str = "rainbow-moves v1";

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum MoveKind {
    Extend,
    SwapExtend,
    CascadeAugment,
    CascadeShift,
    CascadeExchange,
    GoodCascadeAugment,
    GoodCascadeShift,
    GoodCascadeExchange,
}

impl MoveKind {
    pub const ALL: [MoveKind; 8] = [
        MoveKind::Extend,
        MoveKind::SwapExtend,
        MoveKind::CascadeAugment,
        MoveKind::CascadeShift,
        MoveKind::CascadeExchange,
        MoveKind::GoodCascadeAugment,
        MoveKind::GoodCascadeShift,
        MoveKind::GoodCascadeExchange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::Extend => "extend",
            MoveKind::SwapExtend => "swap-extend",
            MoveKind::CascadeAugment => "cascade-augment",
            MoveKind::CascadeShift => "cascade-shift",
            MoveKind::CascadeExchange => "cascade-exchange",
            MoveKind::GoodCascadeAugment => "good-cascade-augment",
            MoveKind::GoodCascadeShift => "good-cascade-shift",
            MoveKind::GoodCascadeExchange => "good-cascade-exchange",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// The witness `(y,b)` and the displaced same-colour member of an indirect addition.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Via {
    pub witness: ColouredElement,
    pub removed: ColouredElement,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Op {
    Add {
        set: usize,
        element: ColouredElement,
        via: Option<Via>,
    },
    Move {
        from: usize,
        to: usize,
        element: ColouredElement,
        via: Option<Via>,
    },
    Recolour {
        set: usize,
        base: usize,
        members: Vec<ColouredElement>,
        terminal: ColouredElement,
    },
    Exchange {
        from: usize,
        to: usize,
        take: Vec<ColouredElement>,
        release: Vec<ColouredElement>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MoveRecord {
    pub kind: MoveKind,
    /// Set when an exchange ran with fewer pairs than the guarantee asks for.
    pub best_effort: bool,
    /// Signature after the move.
    pub signature: Signature,
    pub ops: Vec<Op>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MoveLog {
    pub n: usize,
    pub eta: usize,
    pub moves: Vec<MoveRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("log is for rank {log}, instance has rank {instance}")]
    RankMismatch { log: usize, instance: usize },
    #[error("move {index}: {reason}")]
    BadMove { index: usize, reason: String },
}

impl ReplayError {
    /// Index of the first bad move, if the failure is tied to one.
    pub fn move_index(&self) -> Option<usize> {
        match self {
            ReplayError::BadMove { index, .. } => Some(*index),
            ReplayError::RankMismatch { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("member {0} does not exist")]
    NoSuchSet(usize),
    #[error("{element} is not in member {set}")]
    NotInSet { element: ColouredElement, set: usize },
    #[error("{0} is not unused")]
    NotUnused(ColouredElement),
    #[error("{0}")]
    Invalid(String),
    #[error("resulting collection is invalid: {0}")]
    Model(#[from] ModelError),
}

fn get(coll: &Collection, i: usize) -> Result<&Ris, OpError> {
    if i < coll.len() {
        Ok(coll.get(i))
    } else {
        Err(OpError::NoSuchSet(i))
    }
}

fn require_in(coll: &Collection, set: usize, e: ColouredElement) -> Result<(), OpError> {
    if get(coll, set)?.contains(e) {
        Ok(())
    } else {
        Err(OpError::NotInSet { element: e, set })
    }
}

fn require_unused(universe: &Universe, coll: &Collection, e: ColouredElement) -> Result<(), OpError> {
    if universe.contains(e) && !coll.is_used(e) {
        Ok(())
    } else {
        Err(OpError::NotUnused(e))
    }
}

/// The member `s` gaining `element`, possibly through a witness.
fn grown(
    universe: &Universe,
    coll: &Collection,
    set: usize,
    element: ColouredElement,
    via: Option<Via>,
) -> Result<Ris, OpError> {
    let s = get(coll, set)?;
    if s.contains(element) {
        return Err(OpError::Invalid(format!("{element} is already in member {set}")));
    }
    match via {
        None => {
            if s.has_colour(element.c) {
                return Err(OpError::Invalid(format!("member {set} already has colour {}", element.c)));
            }
            Ok(s.edited(&[], &[element]))
        }
        Some(Via { witness, removed }) => {
            if removed.c != element.c {
                return Err(OpError::Invalid(format!("{removed} and {element} differ in colour")));
            }
            require_in(coll, set, removed)?;
            require_unused(universe, coll, witness)?;
            if s.has_colour(witness.c) {
                return Err(OpError::Invalid(format!("member {set} already has colour {}", witness.c)));
            }
            Ok(s.edited(&[removed], &[element, witness]))
        }
    }
}

fn rebuild(universe: &Universe, coll: &Collection, updates: Vec<(usize, Ris)>) -> Result<Collection, OpError> {
    let mut sets = coll.sets().to_vec();
    for (i, s) in updates {
        sets[i] = s;
    }
    Ok(Collection::new(universe, sets)?)
}

/// Applies one op, validating the resulting collection in full.
pub fn apply_op(universe: &Universe, coll: &Collection, op: &Op) -> Result<Collection, OpError> {
    match op {
        Op::Add { set, element, via } => {
            require_unused(universe, coll, *element)?;
            let t = grown(universe, coll, *set, *element, *via)?;
            rebuild(universe, coll, vec![(*set, t)])
        }
        Op::Move {
            from,
            to,
            element,
            via,
        } => {
            if from == to {
                return Err(OpError::Invalid("move within one member".into()));
            }
            require_in(coll, *from, *element)?;
            let t = grown(universe, coll, *to, *element, *via)?;
            let shrunk = get(coll, *from)?.edited(&[*element], &[]);
            rebuild(universe, coll, vec![(*to, t), (*from, shrunk)])
        }
        Op::Recolour {
            set,
            base,
            members,
            terminal,
        } => {
            let s = get(coll, *set)?;
            if members.is_empty() {
                return Err(OpError::Invalid("empty recolouring".into()));
            }
            if s.has_colour(*base) || !(1..=coll.n()).contains(base) {
                return Err(OpError::Invalid(format!("colour {base} is not missing from member {set}")));
            }
            for &m in members {
                require_in(coll, *set, m)?;
            }
            let (t, new_colour) = recolour(s, *base, members);
            if t.len() != s.len() {
                return Err(OpError::Invalid("recolouring repeats a member".into()));
            }
            let next = rebuild(universe, coll, vec![(*set, t)])?;
            if terminal.c != new_colour {
                return Err(OpError::Invalid(format!("terminal {terminal} does not carry the freed colour {new_colour}")));
            }
            require_unused(universe, &next, *terminal)?;
            if next.get(*set).underline().contains(terminal.x) {
                return Err(OpError::Invalid(format!("terminal {terminal} meets the recoloured member")));
            }
            Ok(next)
        }
        Op::Exchange {
            from,
            to,
            take,
            release,
        } => {
            if from == to {
                return Err(OpError::Invalid("exchange within one member".into()));
            }
            if take.is_empty() {
                return Err(OpError::Invalid("exchange takes nothing".into()));
            }
            for &e in take {
                require_in(coll, *from, e)?;
            }
            for &e in release {
                require_in(coll, *to, e)?;
            }
            let a = get(coll, *from)?.edited(take, &[]);
            let s = get(coll, *to)?.edited(release, take);
            rebuild(universe, coll, vec![(*from, a), (*to, s)])
        }
    }
}

/// Applies the ops of one move in order.
pub fn apply_move(universe: &Universe, coll: &Collection, ops: &[Op]) -> Result<Collection, OpError> {
    let mut cur = coll.clone();
    for op in ops {
        cur = apply_op(universe, &cur, op)?;
    }
    Ok(cur)
}

impl MoveLog {
    pub fn new(n: usize, eta: usize) -> Self {
        Self {
            n,
            eta,
            moves: Vec::new(),
        }
    }

    /// Replays from `eta` empty members, checking every op, every recorded signature and strict
    /// signature growth. Returns the final collection.
    pub fn replay(&self, universe: &Universe) -> Result<Collection, ReplayError> {
        if universe.n() != self.n {
            return Err(ReplayError::RankMismatch {
                log: self.n,
                instance: universe.n(),
            });
        }
        let mut coll = Collection::empty(self.n, self.eta);
        for (index, mv) in self.moves.iter().enumerate() {
            let bad = |reason: String| ReplayError::BadMove { index, reason };
            let next = apply_move(universe, &coll, &mv.ops).map_err(|e| bad(e.to_string()))?;
            if next.signature() != &mv.signature {
                return Err(bad(format!(
                    "recorded signature {} but replay gives {}",
                    mv.signature,
                    next.signature()
                )));
            }
            if next.signature() <= coll.signature() {
                return Err(bad(format!(
                    "signature {} does not increase on {}",
                    next.signature(),
                    coll.signature()
                )));
            }
            coll = next;
        }
        Ok(coll)
    }
}

fn write_via(f: &mut fmt::Formatter<'_>, via: &Option<Via>) -> fmt::Result {
    if let Some(v) = via {
        write!(f, " via {} drop {}", v.witness, v.removed)?;
    }
    Ok(())
}

fn write_list(f: &mut fmt::Formatter<'_>, xs: &[ColouredElement]) -> fmt::Result {
    for e in xs {
        write!(f, " {e}")?;
    }
    Ok(())
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Add { set, element, via } => {
                write!(f, "add {set} {element}")?;
                write_via(f, via)
            }
            Op::Move {
                from,
                to,
                element,
                via,
            } => {
                write!(f, "move {from}>{to} {element}")?;
                write_via(f, via)
            }
            Op::Recolour {
                set,
                base,
                members,
                terminal,
            } => {
                write!(f, "recolour {set} {base}")?;
                write_list(f, members)?;
                write!(f, " -> {terminal}")
            }
            Op::Exchange {
                from,
                to,
                take,
                release,
            } => {
                write!(f, "exchange {from}>{to} take")?;
                write_list(f, take)?;
                f.write_str(" release")?;
                write_list(f, release)
            }
        }
    }
}

impl fmt::Display for MoveLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        writeln!(f, "n {} eta {}", self.n, self.eta)?;
        for (i, mv) in self.moves.iter().enumerate() {
            write!(f, "{i} {}", mv.kind.name())?;
            if mv.best_effort {
                f.write_str(" best-effort")?;
            }
            write!(f, " {} |", mv.signature)?;
            for (j, op) in mv.ops.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ;")?;
                }
                write!(f, " {op}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct Tokens<'a> {
    line: usize,
    toks: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn err(&self, reason: impl Into<String>) -> LogParseError {
        LogParseError::Syntax {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, LogParseError> {
        let t = self
            .toks
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err(format!("expected {what}, found end of op")))?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).copied()
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn number(&mut self, what: &str) -> Result<usize, LogParseError> {
        let t = self.next(what)?;
        t.parse()
            .map_err(|_| self.err(format!("expected {what}, found `{t}`")))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), LogParseError> {
        let t = self.next(kw)?;
        if t == kw {
            Ok(())
        } else {
            Err(self.err(format!("expected `{kw}`, found `{t}`")))
        }
    }

    fn element(&mut self) -> Result<ColouredElement, LogParseError> {
        let t = self.next("coloured element")?;
        parse_element(t).ok_or_else(|| self.err(format!("bad coloured element `{t}`")))
    }

    fn pair(&mut self) -> Result<(usize, usize), LogParseError> {
        let t = self.next("A>S")?;
        let (a, s) = t
            .split_once('>')
            .ok_or_else(|| self.err(format!("expected A>S, found `{t}`")))?;
        match (a.parse(), s.parse()) {
            (Ok(a), Ok(s)) => Ok((a, s)),
            _ => Err(self.err(format!("expected A>S, found `{t}`"))),
        }
    }

    fn via(&mut self) -> Result<Option<Via>, LogParseError> {
        if self.peek() != Some("via") {
            return Ok(None);
        }
        self.keyword("via")?;
        let witness = self.element()?;
        self.keyword("drop")?;
        let removed = self.element()?;
        Ok(Some(Via { witness, removed }))
    }

    fn elements_until(&mut self, stop: &str) -> Result<Vec<ColouredElement>, LogParseError> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if t == stop {
                break;
            }
            out.push(self.element()?);
        }
        Ok(out)
    }
}

fn parse_element(t: &str) -> Option<ColouredElement> {
    let inner = t.strip_prefix('(')?.strip_suffix(')')?;
    let (x, c) = inner.split_once(',')?;
    let c: usize = c.parse().ok()?;
    (c >= 1).then_some(ColouredElement::new(x.parse().ok()?, c))
}

fn parse_op(line: usize, text: &str) -> Result<Op, LogParseError> {
    let mut t = Tokens {
        line,
        toks: text.split_whitespace().collect(),
        pos: 0,
    };
    let op = match t.next("op name")? {
        "add" => {
            let set = t.number("member index")?;
            let element = t.element()?;
            let via = t.via()?;
            Op::Add { set, element, via }
        }
        "move" => {
            let (from, to) = t.pair()?;
            let element = t.element()?;
            let via = t.via()?;
            Op::Move {
                from,
                to,
                element,
                via,
            }
        }
        "recolour" => {
            let set = t.number("member index")?;
            let base = t.number("colour")?;
            let members = t.elements_until("->")?;
            t.keyword("->")?;
            let terminal = t.element()?;
            Op::Recolour {
                set,
                base,
                members,
                terminal,
            }
        }
        "exchange" => {
            let (from, to) = t.pair()?;
            t.keyword("take")?;
            let take = t.elements_until("release")?;
            t.keyword("release")?;
            let release = t.elements_until("")?;
            Op::Exchange {
                from,
                to,
                take,
                release,
            }
        }
        other => return Err(t.err(format!("unknown op `{other}`"))),
    };
    if !t.done() {
        return Err(t.err(format!("trailing `{}`", t.toks[t.pos..].join(" "))));
    }
    Ok(op)
}

impl MoveLog {
    pub fn parse(text: &str) -> Result<Self, LogParseError> {
        let err = |line: usize, reason: String| LogParseError::Syntax { line, reason };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (l, header) = lines.next().ok_or_else(|| err(1, "empty move log".into()))?;
        if header != HEADER {
            return Err(err(l, format!("expected `{HEADER}`")));
        }
        let (l, dims) = lines.next().ok_or_else(|| err(l + 1, "missing `n N eta E` line".into()))?;
        let d: Vec<&str> = dims.split_whitespace().collect();
        let (n, eta) = match d.as_slice() {
            ["n", n, "eta", e] => match (n.parse::<usize>(), e.parse::<usize>()) {
                (Ok(n), Ok(e)) if n >= 1 => (n, e),
                _ => return Err(err(l, "bad `n N eta E` values".into())),
            },
            _ => return Err(err(l, "expected `n N eta E`".into())),
        };
        let mut moves = Vec::new();
        for (l, text) in lines {
            let (head, body) = text
                .split_once('|')
                .ok_or_else(|| err(l, "missing `|` between header and ops".into()))?;
            let h: Vec<&str> = head.split_whitespace().collect();
            let (idx, kind, best_effort, sig) = match h.as_slice() {
                [i, k, s] => (i, k, false, s),
                [i, k, "best-effort", s] => (i, k, true, s),
                _ => return Err(err(l, "expected `<idx> <kind> [best-effort] <signature>`".into())),
            };
            if idx.parse::<usize>().ok() != Some(moves.len()) {
                return Err(err(l, format!("expected move index {}", moves.len())));
            }
            let kind = MoveKind::from_name(kind).ok_or_else(|| err(l, format!("unknown move kind `{kind}`")))?;
            let signature: Signature = sig.parse().map_err(|e: String| err(l, e))?;
            if signature.n() != n {
                return Err(err(l, format!("signature has length {}, expected {n}", signature.n())));
            }
            let ops = body
                .split(';')
                .map(|o| parse_op(l, o))
                .collect::<Result<Vec<_>, _>>()?;
            moves.push(MoveRecord {
                kind,
                best_effort,
                signature,
                ops,
            });
        }
        Ok(Self { n, eta, moves })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ElementSet;
    use crate::matroid::Matroid;

    fn ce(x: usize, c: usize) -> ColouredElement {
        ColouredElement::new(x, c)
    }

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn u24() -> Universe {
        Universe::new(Matroid::uniform(2, 4).unwrap(), vec![set(&[0, 1]), set(&[2, 3])]).unwrap()
    }

    fn sample() -> MoveLog {
        let mut log = MoveLog::new(2, 2);
        log.moves.push(MoveRecord {
            kind: MoveKind::Extend,
            best_effort: false,
            signature: "(1,0)".parse().unwrap(),
            ops: vec![Op::Add {
                set: 0,
                element: ce(0, 1),
                via: None,
            }],
        });
        log.moves.push(MoveRecord {
            kind: MoveKind::SwapExtend,
            best_effort: false,
            signature: "(0,1)".parse().unwrap(),
            ops: vec![Op::Add {
                set: 0,
                element: ce(1, 1),
                via: Some(Via {
                    witness: ce(2, 2),
                    removed: ce(0, 1),
                }),
            }],
        });
        log.moves.push(MoveRecord {
            kind: MoveKind::CascadeExchange,
            best_effort: true,
            signature: "(1,1)".parse().unwrap(),
            ops: vec![Op::Add {
                set: 1,
                element: ce(0, 1),
                via: None,
            }],
        });
        log
    }

    #[test]
    fn text_round_trip() {
        let log = sample();
        let text = log.to_string();
        assert!(text.starts_with("rainbow-moves v1\nn 2 eta 2\n0 extend (1,0) | add 0 (0,1)\n"));
        assert!(text.contains("1 swap-extend (0,1) | add 0 (1,1) via (2,2) drop (0,1)"));
        assert!(text.contains("2 cascade-exchange best-effort (1,1)"));
        assert_eq!(MoveLog::parse(&text).unwrap(), log);
    }

    #[test]
    fn every_op_round_trips() {
        let ops = vec![
            Op::Move {
                from: 3,
                to: 1,
                element: ce(4, 2),
                via: Some(Via {
                    witness: ce(7, 1),
                    removed: ce(3, 2),
                }),
            },
            Op::Recolour {
                set: 0,
                base: 1,
                members: vec![ce(0, 2), ce(1, 3)],
                terminal: ce(5, 3),
            },
            Op::Exchange {
                from: 2,
                to: 1,
                take: vec![ce(1, 1), ce(2, 2)],
                release: vec![],
            },
        ];
        let mut log = MoveLog::new(3, 4);
        log.moves.push(MoveRecord {
            kind: MoveKind::GoodCascadeShift,
            best_effort: false,
            signature: "(0,0,1)".parse().unwrap(),
            ops,
        });
        assert_eq!(MoveLog::parse(&log.to_string()).unwrap(), log);
    }

    #[test]
    fn replay_reproduces_collection() {
        let u = u24();
        let coll = sample().replay(&u).unwrap();
        assert_eq!(coll.get(0).elements(), &[ce(1, 1), ce(2, 2)]);
        assert_eq!(coll.get(1).elements(), &[ce(0, 1)]);
    }

    #[test]
    fn tampering_names_first_bad_move() {
        let u = u24();
        let mut log = sample();
        log.moves[1].ops = vec![Op::Add {
            set: 0,
            element: ce(1, 1),
            via: None,
        }];
        assert_eq!(log.replay(&u).unwrap_err().move_index(), Some(1));
        let mut log = sample();
        log.moves[2].signature = "(0,1)".parse().unwrap();
        assert_eq!(log.replay(&u).unwrap_err().move_index(), Some(2));
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(MoveLog::parse("").is_err());
        assert!(MoveLog::parse("rainbow-moves v2\n").is_err());
        let bad = "rainbow-moves v1\nn 2 eta 2\n0 extend (1,0) | add 0 (0,0)\n";
        assert_eq!(
            MoveLog::parse(bad).unwrap_err(),
            LogParseError::Syntax {
                line: 3,
                reason: "bad coloured element `(0,0)`".into()
            }
        );
        let skip = "rainbow-moves v1\nn 2 eta 2\n1 extend (1,0) | add 0 (0,1)\n";
        assert!(MoveLog::parse(skip).is_err());
    }
}
