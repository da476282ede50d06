//! Text format for geometric input, and the polynomial expression grammar.
//!
//! ```text
//! # chart dimension and bundle rank
//! dim = 2
//! rank = 1
//! cutoff = 5
//! deg_cap = 2
//! gauge = delta-inverse          # or: gauge = section
//! action_algebroid = true        # optional flag
//!
//! [gamma]                        # Gamma^i_{jk}, symmetric in (j,k)
//! (1,2,2) = "x1"
//!
//! [rho]                          # rho^i_a
//! (1,1) = "-x2"
//! (2,1) = "x1"
//!
//! [mu]                           # mu^a_{bc}, antisymmetric in (b,c)
//! (1,1,2) = "x1"
//! [c]                            # alternatively, structure functions C^a_{bc}
//! [gamma_prime]                  # Gamma'^a_{ib}
//! [metric]                       # g_{ab}, symmetric
//! [phi3]                         # gauge tensor phi_3^i_{jkl} (needs gauge = section)
//! [psi3]                         # gauge tensor psi_3^a_{b,jk}
//! ```
//!
//! Indices are 1-based. Unspecified entries default to zero. Symmetric
//! (antisymmetric) sections accept one representative per orbit; conflicting
//! entries are rejected. Polynomials use variables `x1..xd`, integer or
//! rational literals `p` / `p/q`, operators `+ - * ^` and parentheses;
//! implicit multiplication is not accepted.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::geometry::{Gauge, GeometryError, GeometrySpec, Tens};
use crate::poly::BasePoly;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub enum ParseError {
    Syntax { line: usize, msg: String },
    Geometry(GeometryError),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { line, msg } => write!(f, "line {line}: {msg}"),
            ParseError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ParseError {}

impl From<GeometryError> for ParseError {
    fn from(e: GeometryError) -> Self {
        ParseError::Geometry(e)
    }
}

// ---------------------------------------------------------------------------
// Polynomial expressions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Scalar),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, dim: usize) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            dim,
        }
    }

    fn error(&self, msg: impl Into<String>) -> String {
        format!("{} at column {}", msg.into(), self.pos + 1)
    }

    fn next_tok(&mut self) -> Result<Option<(Tok, usize)>, String> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                let numer = BigInt::from_str(std::str::from_utf8(&self.src[self.pos..end]).unwrap())
                    .map_err(|e| self.error(e.to_string()))?;
                self.pos = end;
                // rational literal p/q
                let mut save = self.pos;
                while save < self.src.len() && self.src[save].is_ascii_whitespace() {
                    save += 1;
                }
                if save < self.src.len() && self.src[save] == b'/' {
                    let mut dstart = save + 1;
                    while dstart < self.src.len() && self.src[dstart].is_ascii_whitespace() {
                        dstart += 1;
                    }
                    let mut dend = dstart;
                    while dend < self.src.len() && self.src[dend].is_ascii_digit() {
                        dend += 1;
                    }
                    if dend == dstart {
                        return Err(self.error("expected denominator digits after '/'"));
                    }
                    let denom =
                        BigInt::from_str(std::str::from_utf8(&self.src[dstart..dend]).unwrap())
                            .map_err(|e| self.error(e.to_string()))?;
                    if denom == BigInt::from(0) {
                        return Err(self.error("zero denominator"));
                    }
                    self.pos = dend;
                    Tok::Num(Scalar::new(numer, denom))
                } else {
                    Tok::Num(Scalar::from_integer(numer))
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                let idx = parse_var_name(name, self.dim)
                    .ok_or_else(|| format!("undefined variable `{name}` at column {}", start + 1))?;
                Tok::Var(idx)
            }
            _ => return Err(self.error(format!("unexpected character `{}`", c as char))),
        };
        Ok(Some((tok, start)))
    }
}

fn parse_var_name(name: &str, dim: usize) -> Option<usize> {
    let rest = name.strip_prefix('x')?;
    let k: usize = rest.parse().ok()?;
    if k >= 1 && k <= dim {
        Some(k - 1)
    } else {
        None
    }
}

struct PolyParser {
    toks: Vec<(Tok, usize)>,
    cursor: usize,
    dim: usize,
}

impl PolyParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.cursor).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.cursor).map(|(t, _)| t.clone());
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn pos(&self) -> usize {
        self.toks
            .get(self.cursor)
            .map(|&(_, p)| p + 1)
            .unwrap_or(0)
    }

    fn expr(&mut self) -> Result<BasePoly, String> {
        let mut acc = if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            -&self.term()?
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BasePoly, String> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<BasePoly, String> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let neg = if matches!(self.peek(), Some(Tok::Minus)) {
                self.bump();
                true
            } else {
                false
            };
            match self.bump() {
                Some(Tok::Num(n)) if n.is_integer() && !neg => {
                    let e: u32 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| "exponent too large".to_string())?;
                    let mut out = BasePoly::one(self.dim);
                    for _ in 0..e {
                        out = &out * &base;
                    }
                    Ok(out)
                }
                Some(Tok::Num(_)) => Err("negative exponent".to_string()),
                _ => Err(format!("expected integer exponent at column {}", self.pos())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<BasePoly, String> {
        let at = self.pos();
        match self.bump() {
            Some(Tok::Num(c)) => Ok(BasePoly::constant(self.dim, c)),
            Some(Tok::Var(i)) => Ok(BasePoly::var(self.dim, i)),
            Some(Tok::Minus) => Ok(-&self.factor()?),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(format!("expected `)` at column {at}")),
                }
            }
            other => Err(format!(
                "expected a number, variable or parenthesized expression, found {other:?} at column {at}"
            )),
        }
    }
}

/// Parses a polynomial in the variables `x1..x{dim}`.
pub fn parse_poly(s: &str, dim: usize) -> Result<BasePoly, String> {
    let mut lx = Lexer::new(s, dim);
    let mut toks = Vec::new();
    while let Some(t) = lx.next_tok()? {
        toks.push(t);
    }
    let mut p = PolyParser {
        toks,
        cursor: 0,
        dim,
    };
    let out = p.expr()?;
    if p.cursor != p.toks.len() {
        return Err(format!("trailing input at column {}", p.pos()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Spec documents
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Gamma,
    GammaPrime,
    Rho,
    Mu,
    C,
    Metric,
    Phi(usize),
    Psi(usize),
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_index_tuple(s: &str, lineno: usize) -> Result<Vec<usize>, ParseError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ParseError::Syntax {
            line: lineno,
            msg: format!("expected an index tuple `(i,j,..)`, found `{s}`"),
        })?;
    inner
        .split(',')
        .map(|part| {
            let k: usize = part.trim().parse().map_err(|_| ParseError::Syntax {
                line: lineno,
                msg: format!("bad index `{}`", part.trim()),
            })?;
            if k == 0 {
                return Err(ParseError::Syntax {
                    line: lineno,
                    msg: "indices are 1-based".to_string(),
                });
            }
            Ok(k - 1)
        })
        .collect()
}

struct RawEntry {
    line: usize,
    idx: Vec<usize>,
    poly: BasePoly,
}

/// Parses a spec document into a validated `GeometrySpec`.
pub fn parse_spec(text: &str) -> Result<GeometrySpec, ParseError> {
    // first pass: headers
    let mut dim: Option<usize> = None;
    let mut rank: Option<usize> = None;
    let mut cutoff = 5usize;
    let mut deg_cap = 2usize;
    let mut gauge_kind: Option<String> = None;
    let mut action = false;

    let mut in_section = false;
    for (ln, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            in_section = true;
            continue;
        }
        if in_section {
            continue;
        }
        let (key, value) = split_kv(line, ln + 1)?;
        match key {
            "dim" => dim = Some(parse_usize(value, ln + 1)?),
            "rank" => rank = Some(parse_usize(value, ln + 1)?),
            "cutoff" => cutoff = parse_usize(value, ln + 1)?,
            "deg_cap" => deg_cap = parse_usize(value, ln + 1)?,
            "gauge" => gauge_kind = Some(value.trim_matches('"').to_string()),
            "action_algebroid" => {
                action = match value {
                    "true" => true,
                    "false" => false,
                    _ => {
                        return Err(ParseError::Syntax {
                            line: ln + 1,
                            msg: format!("expected true/false, found `{value}`"),
                        })
                    }
                }
            }
            _ => {
                return Err(ParseError::Syntax {
                    line: ln + 1,
                    msg: format!("unknown key `{key}`"),
                })
            }
        }
    }
    let dim = dim.ok_or(ParseError::Syntax {
        line: 0,
        msg: "missing `dim`".to_string(),
    })?;
    let rank = rank.ok_or(ParseError::Syntax {
        line: 0,
        msg: "missing `rank`".to_string(),
    })?;
    if dim == 0 || rank == 0 {
        return Err(ParseError::Syntax {
            line: 0,
            msg: "dim and rank must be positive".to_string(),
        });
    }

    // second pass: tensor entries
    let mut entries: BTreeMap<u8, Vec<RawEntry>> = BTreeMap::new();
    let mut current: Option<(Section, u8)> = None;
    let mut next_tag = 0u8;
    let mut tag_of: BTreeMap<String, u8> = BTreeMap::new();
    let mut section_of_tag: BTreeMap<u8, Section> = BTreeMap::new();

    for (ln, raw) in text.lines().enumerate() {
        let lineno = ln + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim();
            let section = match name {
                "gamma" => Section::Gamma,
                "gamma_prime" => Section::GammaPrime,
                "rho" => Section::Rho,
                "mu" => Section::Mu,
                "c" => Section::C,
                "metric" => Section::Metric,
                _ => {
                    if let Some(n) = name.strip_prefix("phi").and_then(|r| r.parse::<usize>().ok())
                    {
                        if n < 3 {
                            return Err(ParseError::Syntax {
                                line: lineno,
                                msg: format!("gauge tensor phi{n} must have n >= 3"),
                            });
                        }
                        Section::Phi(n)
                    } else if let Some(n) =
                        name.strip_prefix("psi").and_then(|r| r.parse::<usize>().ok())
                    {
                        if n < 3 {
                            return Err(ParseError::Syntax {
                                line: lineno,
                                msg: format!("gauge tensor psi{n} must have n >= 3"),
                            });
                        }
                        Section::Psi(n)
                    } else {
                        return Err(ParseError::Syntax {
                            line: lineno,
                            msg: format!("unknown section `[{name}]`"),
                        });
                    }
                }
            };
            let tag = *tag_of.entry(name.to_string()).or_insert_with(|| {
                let t = next_tag;
                next_tag += 1;
                t
            });
            section_of_tag.insert(tag, section);
            current = Some((section, tag));
            continue;
        }
        let Some((_, tag)) = current else {
            continue; // header line already handled in pass one
        };
        if !line.starts_with('(') {
            return Err(ParseError::Syntax {
                line: lineno,
                msg: format!("expected a tensor entry `(indices) = \"poly\"`, found `{line}`"),
            });
        }
        let eq = line.find('=').ok_or_else(|| ParseError::Syntax {
            line: lineno,
            msg: "expected `(indices) = \"poly\"`".to_string(),
        })?;
        let idx = parse_index_tuple(&line[..eq], lineno)?;
        let rhs = line[eq + 1..].trim();
        let rhs = rhs
            .strip_prefix('"')
            .and_then(|r| r.strip_suffix('"'))
            .unwrap_or(rhs);
        let poly = parse_poly(rhs, dim).map_err(|msg| ParseError::Syntax {
            line: lineno,
            msg,
        })?;
        entries.entry(tag).or_default().push(RawEntry {
            line: lineno,
            idx,
            poly,
        });
    }

    let mut spec = GeometrySpec::zeros(dim, rank);
    spec.cutoff = cutoff;
    spec.deg_cap = deg_cap;
    spec.action_algebroid = action;
    let nv = spec.nvars();

    let bound_of = |section: Section, slot: usize| -> (usize, &'static str) {
        match section {
            Section::Gamma => (dim, "gamma"),
            Section::GammaPrime => {
                if slot == 1 {
                    (dim, "gamma_prime")
                } else {
                    (rank, "gamma_prime")
                }
            }
            Section::Rho => {
                if slot == 0 {
                    (dim, "rho")
                } else {
                    (rank, "rho")
                }
            }
            Section::Mu => (rank, "mu"),
            Section::C => (rank, "c"),
            Section::Metric => (rank, "metric"),
            Section::Phi(_) => (dim, "phi"),
            Section::Psi(n) => {
                let _ = n;
                if slot <= 1 {
                    (rank, "psi")
                } else {
                    (dim, "psi")
                }
            }
        }
    };

    let arity_of = |section: Section| -> usize {
        match section {
            Section::Gamma | Section::GammaPrime | Section::Mu | Section::C => 3,
            Section::Rho | Section::Metric => 2,
            Section::Phi(n) => n + 1,
            Section::Psi(n) => n + 1,
        }
    };

    let mut mu_given: Option<Tens> = None;
    let mut c_given: Option<Tens> = None;
    let mut phi: BTreeMap<usize, Tens> = BTreeMap::new();
    let mut psi: BTreeMap<usize, Tens> = BTreeMap::new();

    for (tag, list) in &entries {
        let section = section_of_tag[tag];
        let arity = arity_of(section);
        for e in list {
            if e.idx.len() != arity {
                return Err(ParseError::Syntax {
                    line: e.line,
                    msg: format!("expected {arity} indices, found {}", e.idx.len()),
                });
            }
            for (slot, &i) in e.idx.iter().enumerate() {
                let (bound, what) = bound_of(section, slot);
                if i >= bound {
                    return Err(ParseError::Syntax {
                        line: e.line,
                        msg: format!("{what} index {} out of range 1..={bound}", i + 1),
                    });
                }
            }
        }
        match section {
            Section::Gamma => fill_symmetric_pair(&mut spec.gamma, list, 1, 2, "gamma")?,
            Section::GammaPrime => {
                for e in list {
                    spec.gamma_prime.set(&e.idx, e.poly.clone());
                }
            }
            Section::Rho => {
                for e in list {
                    spec.rho.set(&e.idx, e.poly.clone());
                }
            }
            Section::Mu => {
                let mut t = Tens::zeros(&[rank, rank, rank], nv);
                fill_antisymmetric_pair(&mut t, list, "mu")?;
                mu_given = Some(t);
            }
            Section::C => {
                let mut t = Tens::zeros(&[rank, rank, rank], nv);
                fill_antisymmetric_pair(&mut t, list, "c")?;
                c_given = Some(t);
            }
            Section::Metric => {
                let mut t = Tens::zeros(&[rank, rank], nv);
                fill_symmetric_pair(&mut t, list, 0, 1, "metric")?;
                spec.metric = Some(t);
            }
            Section::Phi(n) => {
                let dims: Vec<usize> = std::iter::once(dim)
                    .chain(std::iter::repeat_n(dim, n))
                    .collect();
                let t = phi
                    .entry(n)
                    .or_insert_with(|| Tens::zeros(&dims, nv));
                fill_fully_symmetric(t, list, 1, "phi")?;
            }
            Section::Psi(n) => {
                let mut dims = vec![rank, rank];
                dims.extend(std::iter::repeat_n(dim, n - 1));
                let t = psi
                    .entry(n)
                    .or_insert_with(|| Tens::zeros(&dims, nv));
                fill_fully_symmetric(t, list, 2, "psi")?;
            }
        }
    }

    match (mu_given, c_given) {
        (Some(m), None) => {
            spec.mu = m;
            spec.derive_cstruct();
        }
        (None, Some(c)) => {
            spec.cstruct = c;
            spec.derive_mu();
        }
        (Some(m), Some(c)) => {
            spec.mu = m;
            spec.cstruct = c;
            // the consistency relation is validated below
        }
        (None, None) => {
            spec.derive_cstruct();
        }
    }

    match gauge_kind.as_deref() {
        None | Some("delta-inverse") => {
            if !phi.is_empty() || !psi.is_empty() {
                return Err(ParseError::Syntax {
                    line: 0,
                    msg: "gauge tensors require `gauge = section`".to_string(),
                });
            }
            spec.gauge = Gauge::DeltaInverse;
        }
        Some("section") => {
            spec.gauge = Gauge::Explicit { phi, psi };
        }
        Some(other) => {
            return Err(ParseError::Syntax {
                line: 0,
                msg: format!("unknown gauge `{other}` (expected delta-inverse or section)"),
            })
        }
    }

    spec.validate()?;
    Ok(spec)
}

fn split_kv(line: &str, lineno: usize) -> Result<(&str, &str), ParseError> {
    let eq = line.find('=').ok_or_else(|| ParseError::Syntax {
        line: lineno,
        msg: format!("expected `key = value`, found `{line}`"),
    })?;
    Ok((line[..eq].trim(), line[eq + 1..].trim()))
}

fn parse_usize(s: &str, lineno: usize) -> Result<usize, ParseError> {
    s.parse().map_err(|_| ParseError::Syntax {
        line: lineno,
        msg: format!("expected a nonnegative integer, found `{s}`"),
    })
}

/// Fills a tensor symmetric in slots `(s1, s2)`; conflicting entries for a
/// symmetric pair are rejected.
fn fill_symmetric_pair(
    t: &mut Tens,
    entries: &[RawEntry],
    s1: usize,
    s2: usize,
    what: &str,
) -> Result<(), ParseError> {
    let mut given: BTreeMap<Vec<usize>, (usize, BasePoly)> = BTreeMap::new();
    for e in entries {
        given.insert(e.idx.clone(), (e.line, e.poly.clone()));
    }
    for (idx, (line, p)) in &given {
        let mut mirror = idx.clone();
        mirror.swap(s1, s2);
        if let Some((_, q)) = given.get(&mirror) {
            if q != p {
                return Err(ParseError::Syntax {
                    line: *line,
                    msg: format!(
                        "{what} symmetry violation at ({})",
                        idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
                    ),
                });
            }
        }
        t.set(idx, p.clone());
        t.set(&mirror, p.clone());
    }
    Ok(())
}

/// Fills a tensor antisymmetric in its last two slots.
fn fill_antisymmetric_pair(
    t: &mut Tens,
    entries: &[RawEntry],
    what: &str,
) -> Result<(), ParseError> {
    let mut given: BTreeMap<Vec<usize>, (usize, BasePoly)> = BTreeMap::new();
    for e in entries {
        given.insert(e.idx.clone(), (e.line, e.poly.clone()));
    }
    for (idx, (line, p)) in &given {
        let k = idx.len();
        if idx[k - 1] == idx[k - 2] {
            if !p.is_zero() {
                return Err(ParseError::Syntax {
                    line: *line,
                    msg: format!("{what} antisymmetry violation: nonzero diagonal entry"),
                });
            }
            continue;
        }
        let mut mirror = idx.clone();
        mirror.swap(k - 1, k - 2);
        if let Some((_, q)) = given.get(&mirror) {
            if &-q != p {
                return Err(ParseError::Syntax {
                    line: *line,
                    msg: format!(
                        "{what} antisymmetry violation at ({})",
                        idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
                    ),
                });
            }
        }
        t.set(idx, p.clone());
        t.set(&mirror, -p);
    }
    Ok(())
}

/// Fills a tensor fully symmetric in the slots from `from` on.
fn fill_fully_symmetric(
    t: &mut Tens,
    entries: &[RawEntry],
    from: usize,
    what: &str,
) -> Result<(), ParseError> {
    for e in entries {
        let mut tail: Vec<usize> = e.idx[from..].to_vec();
        tail.sort_unstable();
        // iterate over all permutations of the tail via Heap's algorithm
        let mut perms: Vec<Vec<usize>> = Vec::new();
        heap_permutations(&mut tail.clone(), tail.len(), &mut perms);
        perms.sort_unstable();
        perms.dedup();
        for perm in &perms {
            let mut idx = e.idx[..from].to_vec();
            idx.extend(perm);
            if !t.get(&idx).is_zero() && t.get(&idx) != &e.poly {
                return Err(ParseError::Syntax {
                    line: e.line,
                    msg: format!("{what} symmetry conflict at line {}", e.line),
                });
            }
            t.set(&idx, e.poly.clone());
        }
    }
    Ok(())
}

fn heap_permutations(a: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(a, k - 1, out);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical printer
// ---------------------------------------------------------------------------

fn print_tens(out: &mut String, header: &str, t: &Tens, names: &[String]) {
    let entries: Vec<(Vec<usize>, String)> = t
        .iter_indexed()
        .map(|(idx, p)| (idx, format!("{}", p.display(names))))
        .collect();
    if entries.is_empty() {
        return;
    }
    out.push_str(&format!("\n[{header}]\n"));
    for (idx, p) in entries {
        let tuple = idx
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("({tuple}) = \"{p}\"\n"));
    }
}

/// Renders a spec in the canonical document format; `parse_spec` of the
/// output reproduces the spec.
pub fn print_spec(spec: &GeometrySpec) -> String {
    let names = spec.chart.var_names();
    let mut out = String::new();
    out.push_str(&format!("dim = {}\n", spec.chart.dim));
    out.push_str(&format!("rank = {}\n", spec.chart.rank));
    out.push_str(&format!("cutoff = {}\n", spec.cutoff));
    out.push_str(&format!("deg_cap = {}\n", spec.deg_cap));
    match &spec.gauge {
        Gauge::DeltaInverse => out.push_str("gauge = delta-inverse\n"),
        Gauge::Explicit { .. } => out.push_str("gauge = section\n"),
    }
    if spec.action_algebroid {
        out.push_str("action_algebroid = true\n");
    }
    print_tens(&mut out, "gamma", &spec.gamma, &names);
    print_tens(&mut out, "gamma_prime", &spec.gamma_prime, &names);
    print_tens(&mut out, "rho", &spec.rho, &names);
    print_tens(&mut out, "mu", &spec.mu, &names);
    if let Some(g) = &spec.metric {
        print_tens(&mut out, "metric", g, &names);
    }
    if let Gauge::Explicit { phi, psi } = &spec.gauge {
        for (n, t) in phi {
            print_tens(&mut out, &format!("phi{n}"), t, &names);
        }
        for (n, t) in psi {
            print_tens(&mut out, &format!("psi{n}"), t, &names);
        }
    }
    out
}
