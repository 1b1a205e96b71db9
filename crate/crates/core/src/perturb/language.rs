//! Slot templates and lexicon substitution for instruction variants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::{index, IndexedRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PerturbError;

/// Lexicon shipped with the crate.
pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.tsv");

/// Map from a lowercase base word to its replacement candidates.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl Lexicon {
    /// Parses `base<TAB>c1|c2|...` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Lexicon, PerturbError> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let bad = |why: &str| PerturbError::Lexicon { line: n + 1, message: why.to_string() };
            let (base, rest) = line.split_once('\t').ok_or_else(|| bad("expected base<TAB>candidates"))?;
            let base = base.trim().to_lowercase();
            if base.is_empty() {
                return Err(bad("empty base word"));
            }
            let cands: Vec<String> = rest.split('|').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect();
            if cands.is_empty() {
                return Err(bad("no candidates"));
            }
            if cands.iter().any(|c| c.to_lowercase() == base) {
                return Err(bad("candidate equals its base word"));
            }
            if entries.insert(base, cands).is_some() {
                return Err(bad("duplicate base word"));
            }
        }
        Ok(Lexicon { entries })
    }

    pub fn builtin() -> Lexicon {
        Lexicon::parse(DEFAULT_LEXICON).expect("bundled lexicon is well formed")
    }

    pub fn candidates(&self, base: &str) -> Option<&[String]> {
        self.entries.get(&base.to_lowercase()).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bases(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Segment {
    Text(String),
    Slot { id: String, base: String },
}

/// Instruction text with substitutable `{id:base}` slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstructionTemplate {
    segments: Vec<Segment>,
}

impl InstructionTemplate {
    /// Parses `Pick up the {1:apple} ...`. Slot ids must be unique and non-empty.
    pub fn parse(text: &str) -> Result<InstructionTemplate, PerturbError> {
        let bad = |m: &str| PerturbError::Template(m.to_string());
        let mut segments = Vec::new();
        let mut ids = BTreeSet::new();
        let mut rest = text;
        while let Some(open) = rest.find('{') {
            if open > 0 {
                segments.push(Segment::Text(rest[..open].to_string()));
            }
            let close = rest[open..].find('}').ok_or_else(|| bad("unclosed `{`"))? + open;
            let (id, base) = rest[open + 1..close].split_once(':').ok_or_else(|| bad("slot needs `{id:base}`"))?;
            if id.is_empty() || base.is_empty() {
                return Err(bad("empty slot id or base word"));
            }
            if !ids.insert(id.to_string()) {
                return Err(PerturbError::Template(alloc::format!("duplicate slot id `{id}`")));
            }
            segments.push(Segment::Slot { id: id.to_string(), base: base.to_string() });
            rest = &rest[close + 1..];
        }
        if rest.contains('}') {
            return Err(bad("unmatched `}`"));
        }
        if !rest.is_empty() {
            segments.push(Segment::Text(rest.to_string()));
        }
        Ok(InstructionTemplate { segments })
    }

    /// Marks every lexicon base found in `instruction` as a slot, preferring
    /// the longest base at each word start. Slots are numbered from 1.
    pub fn infer(instruction: &str, lex: &Lexicon) -> InstructionTemplate {
        let lower = instruction.to_ascii_lowercase();
        let mut bases: Vec<&str> = lex.bases().collect();
        bases.sort_by_key(|b| core::cmp::Reverse(b.len()));
        let boundary = |i: usize| i >= lower.len() || !lower.as_bytes()[i].is_ascii_alphanumeric();
        let mut segments = Vec::new();
        let (mut start, mut i, mut next_id) = (0, 0, 1);
        while i < lower.len() {
            let at_word = i == 0 || !lower.as_bytes()[i - 1].is_ascii_alphanumeric();
            let hit =
                at_word.then(|| bases.iter().find(|b| lower[i..].starts_with(**b) && boundary(i + b.len()))).flatten();
            if let Some(b) = hit {
                if start < i {
                    segments.push(Segment::Text(instruction[start..i].to_string()));
                }
                segments.push(Segment::Slot { id: next_id.to_string(), base: instruction[i..i + b.len()].to_string() });
                next_id += 1;
                i += b.len();
                start = i;
            } else {
                i += instruction[i..].chars().next().map_or(1, char::len_utf8);
            }
        }
        if start < instruction.len() {
            segments.push(Segment::Text(instruction[start..].to_string()));
        }
        InstructionTemplate { segments }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn slot_count(&self) -> usize {
        self.segments.iter().filter(|s| matches!(s, Segment::Slot { .. })).count()
    }

    /// Base words in slot order.
    pub fn slot_bases(&self) -> Vec<&str> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Slot { base, .. } => Some(base.as_str()),
                Segment::Text(_) => None,
            })
            .collect()
    }

    /// W0 text: every slot keeps its base word.
    pub fn render_base(&self) -> String {
        self.render(&[])
    }

    /// Renders with `fills[i]` replacing slot `i` where present.
    fn render(&self, fills: &[Option<&str>]) -> String {
        let mut out = String::new();
        let mut k = 0;
        for s in &self.segments {
            match s {
                Segment::Text(t) => out.push_str(t),
                Segment::Slot { base, .. } => {
                    match fills.get(k).copied().flatten() {
                        Some(f) => out.push_str(&match_case(base, f)),
                        None => out.push_str(base),
                    }
                    k += 1;
                }
            }
        }
        out
    }

    fn candidate_lists<'l>(&self, lex: &'l Lexicon) -> Result<Vec<&'l [String]>, PerturbError> {
        self.slot_bases()
            .into_iter()
            .map(|b| lex.candidates(b).ok_or_else(|| PerturbError::UnknownBase(b.to_string())))
            .collect()
    }
}

/// Capitalizes the first letter of `word` when `base` starts upper case.
fn match_case(base: &str, word: &str) -> String {
    let upper = base.chars().next().is_some_and(char::is_uppercase);
    let mut chars = word.chars();
    match (upper, chars.next()) {
        (true, Some(c)) => c.to_uppercase().chain(chars).collect(),
        _ => word.to_string(),
    }
}

/// Instruction at level Wk: exactly `k` distinct slots, chosen uniformly
/// without replacement, each replaced by a uniformly chosen candidate.
pub fn substitute(t: &InstructionTemplate, lex: &Lexicon, k: usize, seed: u64) -> Result<String, PerturbError> {
    let lists = t.candidate_lists(lex)?;
    let n = lists.len();
    if k > n {
        return Err(PerturbError::NotEnoughSlots { requested: k, available: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fills: Vec<Option<&str>> = alloc::vec![None; n];
    let mut chosen = index::sample(&mut rng, n, k).into_vec();
    chosen.sort_unstable();
    for i in chosen {
        fills[i] = lists[i].choose(&mut rng).map(String::as_str);
    }
    Ok(t.render(&fills))
}

/// Every instruction with between 1 and 4 substituted slots, in a fixed order.
pub fn all_variants(t: &InstructionTemplate, lex: &Lexicon) -> Result<Vec<String>, PerturbError> {
    let lists = t.candidate_lists(lex)?;
    let mut out = Vec::new();
    let mut fills: Vec<Option<&str>> = alloc::vec![None; lists.len()];
    fn walk<'a>(
        t: &InstructionTemplate,
        lists: &[&'a [String]],
        i: usize,
        used: usize,
        fills: &mut Vec<Option<&'a str>>,
        out: &mut Vec<String>,
    ) {
        if i == lists.len() {
            if used > 0 {
                out.push(t.render(fills));
            }
            return;
        }
        walk(t, lists, i + 1, used, fills, out);
        if used < 4 {
            for c in lists[i] {
                fills[i] = Some(c);
                walk(t, lists, i + 1, used + 1, fills, out);
            }
            fills[i] = None;
        }
    }
    walk(t, &lists, 0, 0, &mut fills, &mut out);
    Ok(out)
}

/// Training-time instruction drawn uniformly from W0 and all its variants.
pub fn sample_training_instruction(t: &InstructionTemplate, lex: &Lexicon, seed: u64) -> Result<String, PerturbError> {
    let mut pool = all_variants(t, lex)?;
    pool.insert(0, t.render_base());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(pool.choose(&mut rng).cloned().unwrap_or_default())
}
