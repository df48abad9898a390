//! Recursive-descent parser for `.qdn` files.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;
use std::sync::Arc;

use super::lexer::{lex, Line, Tok, Token};
use super::{validate, Diagnostic, Position};
use crate::evolution::{EvolutionError, Rule, StageMap, StageMapBuilder};
use crate::exprs::{AmpExpr, Func};
use crate::network::{NetworkDescription, SourceMap};
use crate::registry::{BasisElement, Label, StageBuilder, StageSpace, MAX_RANK};

/// Names that already mean something inside an expression.
const BUILTINS: &[&str] = &["i", "pi", "sin", "cos", "sqrt", "cis"];

type PResult<T> = Result<T, Diagnostic>;

struct Cursor<'a> {
    toks: &'a [Token],
    i: usize,
    end: Position,
}

impl<'a> Cursor<'a> {
    fn new(line: &'a Line) -> Self {
        Self {
            toks: &line.tokens,
            i: 0,
            end: line.end,
        }
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Tok> {
        self.toks.get(self.i + k).map(|t| &t.tok)
    }

    fn pos(&self) -> Position {
        self.toks.get(self.i).map_or(self.end, |t| t.pos)
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        match self.peek() {
            Some(tok) => Diagnostic::error(
                self.pos(),
                format!("expected {expected}, found {}", tok.describe()),
            ),
            None => Diagnostic::error(self.end, format!("expected {expected} before end of line")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> PResult<Position> {
        let pos = self.pos();
        if self.eat(tok) {
            Ok(pos)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<Position> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                let pos = self.pos();
                self.i += 1;
                Ok(pos)
            }
            _ => Err(self.unexpected(&format!("'{kw}'"))),
        }
    }

    fn expect_name(&mut self, what: &str) -> PResult<(String, Position)> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let pos = self.pos();
                self.i += 1;
                Ok((s.clone(), pos))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn expect_int(&mut self, what: &str) -> PResult<(u64, Position)> {
        match self.peek() {
            Some(Tok::Number(text)) if text.bytes().all(|b| b.is_ascii_digit()) => {
                let pos = self.pos();
                self.i += 1;
                text.parse::<u64>()
                    .map(|v| (v, pos))
                    .map_err(|_| Diagnostic::error(pos, format!("integer {text} is too large")))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn finish(&self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(tok) => Err(Diagnostic::error(
                self.pos(),
                format!("unexpected {} at end of statement", tok.describe()),
            )),
        }
    }

    /// True when the next tokens start a basis element (`@` or `sN@`).
    fn at_basis_element(&self) -> bool {
        match self.peek() {
            Some(Tok::At) => true,
            Some(Tok::Ident(s)) => is_suo_name(s) && self.peek_at(1) == Some(&Tok::At),
            _ => false,
        }
    }
}

fn is_suo_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('s') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

/// Expression parser. `scope` restricts parameter names when present.
struct ExprParser<'c, 'a, 's> {
    cur: &'c mut Cursor<'a>,
    scope: Option<&'s HashSet<String>>,
}

impl ExprParser<'_, '_, '_> {
    fn sum(&mut self) -> PResult<AmpExpr> {
        let mut lhs = self.product()?;
        loop {
            if self.cur.eat(&Tok::Plus) {
                lhs = lhs + self.product()?;
            } else if self.cur.eat(&Tok::Minus) {
                lhs = lhs + -self.product()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    /// `unary { "*" unary }`, stopping before `* basiselem`.
    fn product(&mut self) -> PResult<AmpExpr> {
        let mut lhs = self.unary()?;
        while self.cur.peek() == Some(&Tok::Star) {
            let save = self.cur.i;
            self.cur.i += 1;
            if self.cur.at_basis_element() {
                self.cur.i = save;
                break;
            }
            lhs = lhs * self.unary()?;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<AmpExpr> {
        if self.cur.eat(&Tok::Minus) {
            if let Some(Tok::Number(text)) = self.cur.peek() {
                let pos = self.cur.pos();
                self.cur.i += 1;
                return Ok(AmpExpr::real(-parse_number(text, pos)?));
            }
            return Ok(-self.unary()?);
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<AmpExpr> {
        let pos = self.cur.pos();
        match self.cur.peek() {
            Some(Tok::Number(text)) => {
                self.cur.i += 1;
                Ok(AmpExpr::real(parse_number(text, pos)?))
            }
            Some(Tok::LParen) => {
                self.cur.i += 1;
                let inner = self.sum()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.cur.i += 1;
                if let Some(func) = Func::from_name(name) {
                    if !self.cur.eat(&Tok::LParen) {
                        return Err(self.cur.unexpected(&format!("'(' after '{name}'")));
                    }
                    let arg = self.sum()?;
                    self.cur.expect(&Tok::RParen)?;
                    return Ok(AmpExpr::call(func, arg));
                }
                match name.as_str() {
                    "i" => Ok(AmpExpr::I),
                    "pi" => Ok(AmpExpr::real(PI)),
                    _ => {
                        if let Some(scope) = self.scope {
                            if !scope.contains(name) {
                                return Err(Diagnostic::error(
                                    pos,
                                    format!("undeclared parameter '{name}'"),
                                ));
                            }
                        }
                        Ok(AmpExpr::param(name))
                    }
                }
            }
            _ => Err(self.cur.unexpected("an expression")),
        }
    }
}

fn parse_number(text: &str, pos: Position) -> PResult<f64> {
    text.parse::<f64>()
        .map_err(|_| Diagnostic::error(pos, format!("malformed number {text}")))
}

/// Parses a standalone expression (full precedence, no parameter scope).
pub fn parse_expr(source: &str) -> Result<AmpExpr, Diagnostic> {
    let (lines, mut diags) = lex(source);
    if let Some(d) = diags.pop() {
        return Err(d);
    }
    match lines.as_slice() {
        [line] => {
            let mut cur = Cursor::new(line);
            let e = ExprParser {
                cur: &mut cur,
                scope: None,
            }
            .sum()?;
            cur.finish()?;
            Ok(e)
        }
        [] => Err(Diagnostic::error(
            Position { line: 1, column: 1 },
            "empty expression",
        )),
        [_, second, ..] => Err(Diagnostic::error(
            second.tokens[0].pos,
            "expression spans more than one line",
        )),
    }
}

struct RawElement {
    suo: Option<(u64, Position)>,
    detectors: Vec<(u64, Position)>,
    pos: Position,
}

fn parse_raw_element(cur: &mut Cursor) -> PResult<RawElement> {
    let pos = cur.pos();
    let mut suo = None;
    if let Some(Tok::Ident(s)) = cur.peek() {
        if is_suo_name(s) {
            let value = s[1..]
                .parse::<u64>()
                .map_err(|_| Diagnostic::error(pos, format!("SUO index in '{s}' is too large")))?;
            suo = Some((value, pos));
            cur.i += 1;
        } else {
            return Err(cur.unexpected("a basis element such as s1@{1}"));
        }
    }
    if cur.peek() != Some(&Tok::At) {
        return Err(cur.unexpected("'@' in a basis element"));
    }
    cur.i += 1;
    cur.expect(&Tok::LBrace)?;
    let mut detectors = Vec::new();
    if !cur.eat(&Tok::RBrace) {
        loop {
            detectors.push(cur.expect_int("a detector number")?);
            if cur.eat(&Tok::Comma) {
                continue;
            }
            cur.expect(&Tok::RBrace)?;
            break;
        }
    }
    Ok(RawElement {
        suo,
        detectors,
        pos,
    })
}

/// Resolves a raw element against a stage's SUO dimension and rank.
fn resolve_element(raw: &RawElement, stage: usize, suo_dim: u32, rank: u32) -> PResult<BasisElement> {
    let suo = match raw.suo {
        None if suo_dim == 1 => 1,
        None => {
            return Err(Diagnostic::error(
                raw.pos,
                format!("SUO index required: stage {stage} has SUO dimension {suo_dim}"),
            ))
        }
        Some((i, pos)) => {
            if i == 0 || i > suo_dim as u64 {
                return Err(Diagnostic::error(
                    pos,
                    format!("SUO index s{i} outside s1..s{suo_dim} at stage {stage}"),
                ));
            }
            i as u32
        }
    };
    let mut bits: u64 = 0;
    for &(d, pos) in &raw.detectors {
        if d == 0 {
            return Err(Diagnostic::error(
                pos,
                "invalid detector 0 (detectors are numbered from 1)",
            ));
        }
        if d > MAX_RANK as u64 {
            return Err(Diagnostic::error(
                pos,
                format!(
                    "label {} exceeds register of rank {rank}",
                    if d < 64 { (1u64 << (d - 1)).to_string() } else { format!("2^{}", d - 1) }
                ),
            ));
        }
        let bit = 1u64 << (d - 1);
        if bits & bit != 0 {
            return Err(Diagnostic::error(pos, format!("detector {d} listed twice")));
        }
        bits |= bit;
    }
    if bits >> rank != 0 {
        return Err(Diagnostic::error(
            raw.pos,
            format!("label {bits} exceeds register of rank {rank}"),
        ));
    }
    let label = Label::from_bits(bits as u32).expect("bounded by rank");
    Ok(BasisElement::new(suo, label))
}

fn resolve_declared(raw: &RawElement, stage: &StageSpace, role: &str) -> PResult<BasisElement> {
    let element = resolve_element(raw, stage.index(), stage.suo_dim(), stage.rank())?;
    if !stage.contains(&element) {
        return Err(Diagnostic::error(
            raw.pos,
            format!("{role} {element} is not declared at stage {}", stage.index()),
        ));
    }
    Ok(element)
}

enum Section {
    Top,
    Stage {
        builder: StageBuilder,
        suo_dim: u32,
        rank: u32,
    },
    Init,
    Map {
        builder: StageMapBuilder,
        source: Arc<StageSpace>,
        target: Arc<StageSpace>,
        rule_lines: HashMap<BasisElement, usize>,
    },
    /// Body lines of a header that failed; skipped silently.
    Broken,
}

#[derive(Default)]
struct State {
    diags: Vec<Diagnostic>,
    name: Option<String>,
    network_pos: Option<Position>,
    params: Vec<String>,
    param_set: HashSet<String>,
    param_pos: BTreeMap<String, Position>,
    stages: Vec<Arc<StageSpace>>,
    stage_pos: Vec<Position>,
    stages_declared: usize,
    init: Option<Vec<(BasisElement, AmpExpr)>>,
    init_line: usize,
    maps: Vec<StageMap>,
    map_pos: Vec<Position>,
    maps_declared: usize,
}

/// Parses `source`, returning the network (when there are no errors) together
/// with every diagnostic produced, warnings included.
pub fn parse_network_with_diagnostics(source: &str) -> (Option<NetworkDescription>, Vec<Diagnostic>) {
    let (lines, lex_diags) = lex(source);
    let mut st = State {
        diags: lex_diags,
        ..State::default()
    };
    let mut section = Section::Top;
    for (n, line) in lines.iter().enumerate() {
        let mut cur = Cursor::new(line);
        let keyword = match cur.peek() {
            Some(Tok::Ident(k)) => k.as_str(),
            _ => "",
        };
        let result = match keyword {
            "network" => {
                close(&mut st, &mut section);
                header(&mut st, &mut cur, n)
            }
            "param" => {
                close(&mut st, &mut section);
                param_decl(&mut st, &mut cur)
            }
            "stage" => {
                close(&mut st, &mut section);
                stage_decl(&mut st, &mut cur, &mut section)
            }
            "init" => {
                close(&mut st, &mut section);
                init_decl(&mut st, &mut cur, &mut section)
            }
            "map" => {
                close(&mut st, &mut section);
                map_decl(&mut st, &mut cur, &mut section)
            }
            "basis" | "term" | "rule" => body_line(&mut st, &mut cur, &mut section, keyword),
            _ => Err(cur.unexpected("a declaration (network, param, stage, init or map)")),
        };
        if let Err(d) = result {
            st.diags.push(d);
        }
    }
    close(&mut st, &mut section);
    finish(st, &lines)
}

fn close(st: &mut State, section: &mut Section) {
    match std::mem::replace(section, Section::Top) {
        Section::Stage { builder, .. } => st.stages.push(Arc::new(builder.build())),
        Section::Map { builder, .. } => st.maps.push(builder.build()),
        _ => {}
    }
}

fn header(st: &mut State, cur: &mut Cursor, n: usize) -> PResult<()> {
    let pos = cur.expect_keyword("network")?;
    if let Some(first) = st.network_pos {
        return Err(Diagnostic::error(
            pos,
            format!("second network header (first on line {})", first.line),
        ));
    }
    if n != 0 {
        st.diags.push(Diagnostic::error(pos, "the network header must be the first statement"));
    }
    let (name, _) = cur.expect_name("a network name")?;
    cur.finish()?;
    st.name = Some(name);
    st.network_pos = Some(pos);
    Ok(())
}

fn param_decl(st: &mut State, cur: &mut Cursor) -> PResult<()> {
    cur.expect_keyword("param")?;
    loop {
        let (name, pos) = cur.expect_name("a parameter name")?;
        if BUILTINS.contains(&name.as_str()) {
            return Err(Diagnostic::error(
                pos,
                format!("parameter '{name}' shadows the built-in '{name}'"),
            ));
        }
        if let Some(first) = st.param_pos.get(&name) {
            return Err(Diagnostic::error(
                pos,
                format!("parameter '{name}' declared twice (first on line {})", first.line),
            ));
        }
        st.params.push(name.clone());
        st.param_set.insert(name.clone());
        st.param_pos.insert(name, pos);
        if !cur.eat(&Tok::Comma) {
            break;
        }
    }
    cur.finish()
}

fn stage_decl(st: &mut State, cur: &mut Cursor, section: &mut Section) -> PResult<()> {
    *section = Section::Broken;
    let pos = cur.expect_keyword("stage")?;
    let (index, index_pos) = cur.expect_int("a stage index")?;
    cur.expect_keyword("suo")?;
    let (suo_dim, suo_pos) = cur.expect_int("the SUO dimension")?;
    cur.expect_keyword("rank")?;
    let (rank, rank_pos) = cur.expect_int("the register rank")?;
    cur.finish()?;
    let expected = st.stages_declared;
    st.stages_declared += 1;
    if index != expected as u64 {
        return Err(Diagnostic::error(
            index_pos,
            format!("stage {index} declared out of order (expected stage {expected})"),
        ));
    }
    if suo_dim == 0 || suo_dim > u32::MAX as u64 {
        return Err(Diagnostic::error(suo_pos, "SUO dimension must be at least 1"));
    }
    if rank > MAX_RANK as u64 {
        return Err(Diagnostic::error(
            rank_pos,
            format!("register rank {rank} exceeds the maximum of {MAX_RANK}"),
        ));
    }
    let builder = StageSpace::builder(index as usize, suo_dim as u32, rank as u32)
        .map_err(|e| Diagnostic::error(pos, e.to_string()))?;
    st.stage_pos.push(pos);
    *section = Section::Stage {
        builder,
        suo_dim: suo_dim as u32,
        rank: rank as u32,
    };
    Ok(())
}

fn init_decl(st: &mut State, cur: &mut Cursor, section: &mut Section) -> PResult<()> {
    *section = Section::Broken;
    let pos = cur.expect_keyword("init")?;
    cur.finish()?;
    if st.init.is_some() {
        return Err(Diagnostic::error(
            pos,
            format!("init declared twice (first on line {})", st.init_line),
        ));
    }
    if st.stages.is_empty() {
        return Err(Diagnostic::error(pos, "init must follow the declaration of stage 0"));
    }
    st.init = Some(Vec::new());
    st.init_line = pos.line;
    *section = Section::Init;
    Ok(())
}

fn map_decl(st: &mut State, cur: &mut Cursor, section: &mut Section) -> PResult<()> {
    *section = Section::Broken;
    let pos = cur.expect_keyword("map")?;
    let (from, from_pos) = cur.expect_int("a source stage")?;
    cur.expect(&Tok::Arrow)?;
    let (to, to_pos) = cur.expect_int("a target stage")?;
    cur.finish()?;
    let expected = st.maps_declared;
    st.maps_declared += 1;
    if from != expected as u64 {
        return Err(Diagnostic::error(
            from_pos,
            format!("map {from} -> {to} out of order (expected map {expected} -> {})", expected + 1),
        ));
    }
    if to != from + 1 {
        return Err(Diagnostic::error(
            to_pos,
            format!("map {from} -> {to} must connect consecutive stages"),
        ));
    }
    let Some(target) = st.stages.get(to as usize).cloned() else {
        return Err(Diagnostic::error(
            to_pos,
            format!("stage {to} is not declared before map {from} -> {to}"),
        ));
    };
    let source = st.stages[from as usize].clone();
    let builder = StageMap::builder(source.clone(), target.clone()).map_err(|e| match e {
        EvolutionError::DimensionTheorem {
            source_dim,
            target_dim,
            ..
        } => Diagnostic::error(
            pos,
            format!(
                "map {from} -> {to}: source effective dimension {source_dim} exceeds target \
                 effective dimension {target_dim}; no semi-unitary map exists (dimension theorem)"
            ),
        ),
        other => Diagnostic::error(pos, other.to_string()),
    })?;
    st.map_pos.push(pos);
    *section = Section::Map {
        builder,
        source,
        target,
        rule_lines: HashMap::new(),
    };
    Ok(())
}

fn body_line(st: &mut State, cur: &mut Cursor, section: &mut Section, keyword: &str) -> PResult<()> {
    let pos = cur.pos();
    match (keyword, section) {
        (_, Section::Broken) => Ok(()),
        ("basis", Section::Stage { builder, suo_dim, rank }) => {
            cur.i += 1;
            let raw = parse_raw_element(cur)?;
            cur.finish()?;
            let element = resolve_element(&raw, st.stage_pos.len() - 1, *suo_dim, *rank)?;
            builder
                .declare(element)
                .map_err(|e| Diagnostic::error(raw.pos, e.to_string()))?;
            Ok(())
        }
        ("term", Section::Init) => {
            cur.i += 1;
            let amp = ExprParser {
                cur,
                scope: Some(&st.param_set),
            }
            .product()?;
            cur.expect(&Tok::Star)?;
            let raw = parse_raw_element(cur)?;
            cur.finish()?;
            let element = resolve_declared(&raw, &st.stages[0], "initial term")?;
            st.init.as_mut().expect("init section open").push((element, amp));
            Ok(())
        }
        (
            "rule",
            Section::Map {
                builder,
                source,
                target,
                rule_lines,
            },
        ) => {
            cur.i += 1;
            let raw = parse_raw_element(cur)?;
            let from = resolve_declared(&raw, source, "rule source")?;
            if let Some(first) = rule_lines.get(&from) {
                return Err(Diagnostic::error(
                    raw.pos,
                    format!(
                        "duplicate rule for {from} on line {} (first rule on line {first})",
                        raw.pos.line
                    ),
                ));
            }
            cur.expect(&Tok::FatArrow)?;
            let mut rule = Rule::new(from);
            loop {
                let amp = ExprParser {
                    cur,
                    scope: Some(&st.param_set),
                }
                .product()?;
                cur.expect(&Tok::Star)?;
                let raw_target = parse_raw_element(cur)?;
                let to = resolve_declared(&raw_target, target, "rule target")?;
                rule.push(amp, to);
                if !cur.eat(&Tok::Plus) {
                    break;
                }
            }
            cur.finish()?;
            builder
                .add_rule(rule)
                .map_err(|e| Diagnostic::error(raw.pos, e.to_string()))?;
            rule_lines.insert(from, raw.pos.line);
            Ok(())
        }
        (kw, _) => {
            let owner = match kw {
                "basis" => "a stage declaration",
                "term" => "an init section",
                _ => "a map declaration",
            };
            Err(Diagnostic::error(pos, format!("'{kw}' outside {owner}")))
        }
    }
}

fn finish(st: State, lines: &[Line]) -> (Option<NetworkDescription>, Vec<Diagnostic>) {
    let mut diags = st.diags;
    let start = Position { line: 1, column: 1 };
    let eof = lines.last().map_or(start, |l| l.end);
    let Some(network_pos) = st.network_pos else {
        let pos = lines.first().map_or(start, |l| l.tokens[0].pos);
        diags.push(Diagnostic::error(pos, "missing 'network NAME' header"));
        return (None, diags);
    };
    if st.stages_declared == 0 {
        diags.push(Diagnostic::error(eof, "the network declares no stages"));
    }
    for k in st.maps_declared..st.stages_declared.saturating_sub(1) {
        let pos = st.stage_pos.get(k + 1).copied().unwrap_or(eof);
        diags.push(Diagnostic::error(pos, format!("no map {k} -> {} declared", k + 1)));
    }
    if st.init.is_none() && st.stages_declared > 0 {
        diags.push(Diagnostic::error(network_pos, "missing init section"));
    }
    if diags.iter().any(Diagnostic::is_error) {
        return (None, diags);
    }
    let network = NetworkDescription::new(
        st.name.unwrap_or_default(),
        st.params,
        st.stages,
        st.init.unwrap_or_default(),
        st.maps,
    );
    let mut network = match network {
        Ok(n) => n,
        Err(e) => {
            diags.push(Diagnostic::error(network_pos, e.to_string()));
            return (None, diags);
        }
    };
    network.source_map = Some(SourceMap {
        network: Some(network_pos),
        parameters: st.param_pos,
        maps: st.map_pos,
    });
    diags.extend(validate(&network));
    if diags.iter().any(Diagnostic::is_error) {
        (None, diags)
    } else {
        (Some(network), diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprs::Binding;
    use crate::netdsl::{parse_network, Severity};

    const WOLLASTON: &str = "\
network wollaston
param a, b
stage 0 suo 2 rank 1
basis s1@{1}
basis s2@{1}
init
term a * s1@{1}
term b * s2@{1}
stage 1 suo 2 rank 2
basis s1@{1}
basis s2@{2}
map 0 -> 1
rule s1@{1} => 1 * s1@{1}
rule s2@{1} => 1 * s2@{2}
";

    fn errors(src: &str) -> Vec<Diagnostic> {
        match parse_network(src) {
            Ok(_) => panic!("expected failure"),
            Err(d) => d.into_iter().filter(Diagnostic::is_error).collect(),
        }
    }

    #[test]
    fn parses_wollaston() {
        let net = parse_network(WOLLASTON).unwrap();
        assert_eq!(net.name(), "wollaston");
        assert_eq!(net.stages().len(), 2);
        assert_eq!(net.maps()[0].rules().len(), 2);
        let b = Binding::new().with("a", 0.6).with("b", 0.8);
        let rates = net.rates(&b, false).unwrap();
        assert!((rates.coincidence_rate(&[1]) - 0.36).abs() < 1e-15);
        assert!((rates.coincidence_rate(&[2]) - 0.64).abs() < 1e-15);
    }

    #[test]
    fn label_outside_register() {
        let src = "network n\nstage 0 suo 1 rank 3\nbasis @{1}\ninit\nterm 1 * @{1}\nstage 1 suo 1 rank 3\nbasis @{1}\nbasis @{9}\nmap 0 -> 1\nrule @{1} => 1 * @{1}\n";
        let errs = errors(src);
        assert_eq!(errs[0].message, "label 256 exceeds register of rank 3");
        assert_eq!(errs[0].position, Some(Position { line: 8, column: 7 }));
    }

    #[test]
    fn duplicate_rule_names_both_lines() {
        let src = WOLLASTON.to_string() + "rule s1@{1} => 1 * s2@{2}\n";
        let errs = errors(&src);
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("line 15"), "{}", errs[0].message);
        assert!(errs[0].message.contains("line 13"), "{}", errs[0].message);
    }

    #[test]
    fn dimension_theorem_is_positioned() {
        let src = "network n\nstage 0 suo 1 rank 2\nbasis @{1}\nbasis @{2}\ninit\nterm 1 * @{1}\nstage 1 suo 1 rank 2\nbasis @{1}\nmap 0 -> 1\nrule @{1} => 1 * @{1}\n";
        let errs = errors(src);
        assert_eq!(errs[0].position, Some(Position { line: 9, column: 1 }));
        assert!(errs[0].message.contains("dimension theorem"));
    }

    #[test]
    fn shadowing_and_undeclared_parameters() {
        let errs = errors("network n\nparam pi\nstage 0 suo 1 rank 1\nbasis @{1}\ninit\nterm 1 * @{1}\n");
        assert!(errs[0].message.contains("shadows"));
        let errs = errors("network n\nstage 0 suo 1 rank 1\nbasis @{1}\ninit\nterm x * @{1}\n");
        assert_eq!(errs[0].message, "undeclared parameter 'x'");
        assert_eq!(errs[0].position, Some(Position { line: 5, column: 6 }));
    }

    #[test]
    fn unused_parameter_warns() {
        let src = WOLLASTON.replace("param a, b", "param a, b, spare");
        let (net, diags) = parse_network_with_diagnostics(&src);
        assert!(net.is_some());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warning);
        assert!(diags[0].message.contains("spare"));
        assert_eq!(diags[0].position, Some(Position { line: 2, column: 13 }));
    }

    #[test]
    fn missing_rule_is_an_error() {
        let src = WOLLASTON.replace("rule s2@{1} => 1 * s2@{2}\n", "");
        let errs = errors(&src);
        assert!(errs[0].message.contains("no rule for s2@{1}"));
        assert_eq!(errs[0].position, Some(Position { line: 12, column: 1 }));
    }

    #[test]
    fn suo_index_required_on_wide_stage() {
        let src = WOLLASTON.replace("term b * s2@{1}", "term b * @{1}");
        let errs = errors(&src);
        assert!(errs[0].message.contains("SUO index required"));
    }

    #[test]
    fn rule_terms_are_product_level() {
        let src = WOLLASTON.replace("rule s2@{1} => 1 * s2@{2}", "rule s2@{1} => -(a + b) * 2 * s2@{2}");
        let net = parse_network(&src).unwrap();
        let amp = &net.maps()[0].rules()[1].terms[0].1;
        assert_eq!(amp.to_string(), "-(a + b) * 2");
        let bad = WOLLASTON.replace("rule s2@{1} => 1 * s2@{2}", "rule s2@{1} => a + b * s2@{2}");
        let errs = errors(&bad);
        assert!(errs[0].message.contains("expected '*'"), "{}", errs[0].message);
    }

    #[test]
    fn standalone_expressions() {
        let e = parse_expr("2*pi - -1").unwrap();
        let v = e.eval(&Binding::new()).unwrap();
        assert!((v.re - (2.0 * PI + 1.0)).abs() < 1e-15);
        assert!(parse_expr("sin 3").is_err());
        assert!(parse_expr("").is_err());
        assert_eq!(parse_expr("-1").unwrap(), AmpExpr::real(-1.0));
        assert_eq!(parse_expr("-(1)").unwrap(), -AmpExpr::real(1.0));
    }

    #[test]
    fn stage_order_and_missing_pieces() {
        let errs = errors("network n\nstage 1 suo 1 rank 1\nbasis @{1}\n");
        assert!(errs[0].message.contains("out of order"));
        let errs = errors("stage 0 suo 1 rank 1\n");
        assert!(errs.iter().any(|d| d.message.contains("header")));
        let errs = errors("network n\nstage 0 suo 1 rank 1\nbasis @{1}\ninit\nterm 1 * @{1}\nstage 1 suo 1 rank 1\nbasis @{1}\n");
        assert!(errs[0].message.contains("no map 0 -> 1"));
        assert_eq!(errs[0].position, Some(Position { line: 6, column: 1 }));
    }
}
