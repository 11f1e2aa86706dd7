//! Alphabet and sequence data model, text parsing and the ternary price
//! quantizer.
//!
//! Two text layouts are accepted: contiguous digits (`0120`, alphabets of at
//! most ten symbols, whitespace ignored) and integers separated by whitespace
//! and/or commas (`1 0 1 1`, any alphabet).

use std::fmt;

use crate::error::{Error, Result};

pub type Symbol = u32;

/// Finite alphabet `{0, …, m-1}` with `m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet(u32);

impl Alphabet {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidAlphabet(m as u64));
        }
        Ok(Alphabet(m))
    }

    pub fn size(self) -> u32 {
        self.0
    }

    /// Number of symbols as a `usize`, for indexing.
    pub fn len(self) -> usize {
        self.0 as usize
    }

    pub fn contains(self, symbol: Symbol) -> bool {
        symbol < self.0
    }

    /// `log m`, the largest possible entropy rate in nats.
    pub fn max_entropy(self) -> f64 {
        (self.0 as f64).ln()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How symbols are laid out in text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeparatorPolicy {
    #[default]
    Auto,
    /// One digit per symbol; whitespace is ignored.
    Contiguous,
    /// Integers separated by whitespace and/or commas.
    Delimited,
}

/// A validated symbol sequence with an optional initial context.
///
/// The initial context is stored chronologically (oldest first) and holds the
/// symbols that precede `symbols[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    alphabet: Alphabet,
    symbols: Vec<Symbol>,
    initial_context: Option<Vec<Symbol>>,
}

impl Sequence {
    pub fn new(alphabet: Alphabet, symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_symbols(alphabet, &symbols)?;
        Ok(Sequence {
            alphabet,
            symbols,
            initial_context: None,
        })
    }

    /// Attach an explicit initial context (oldest symbol first).
    pub fn with_context(mut self, context: Vec<Symbol>) -> Result<Self> {
        check_symbols(self.alphabet, &context)?;
        self.initial_context = Some(context);
        Ok(self)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn initial_context(&self) -> Option<&[Symbol]> {
        self.initial_context.as_deref()
    }

    /// Split into `(context, data)` for a model of depth `depth`.
    ///
    /// A stored context must have exactly `depth` symbols. Without one, the
    /// first `depth` symbols are consumed as the context and the remainder is
    /// the data.
    pub fn split_context(&self, depth: usize) -> Result<ContextSplit<'_>> {
        match &self.initial_context {
            Some(ctx) if ctx.len() != depth => Err(Error::ContextLength {
                expected: depth,
                got: ctx.len(),
            }),
            Some(ctx) => Ok(ContextSplit {
                context: ctx,
                data: &self.symbols,
                consumed: false,
            }),
            None => {
                if self.symbols.len() <= depth {
                    return Err(Error::InsufficientData {
                        needed: depth + 1,
                        got: self.symbols.len(),
                    });
                }
                let (context, data) = self.symbols.split_at(depth);
                Ok(ContextSplit {
                    context,
                    data,
                    consumed: true,
                })
            }
        }
    }

    /// Canonical text: contiguous digits for `m <= 10`, space-separated
    /// integers otherwise; one trailing newline.
    pub fn to_text(&self) -> String {
        serialize_symbols(self.alphabet, &self.symbols)
    }
}

/// A sequence divided into the conditioning context and the symbols to model.
#[derive(Debug, Clone, Copy)]
pub struct ContextSplit<'a> {
    pub context: &'a [Symbol],
    pub data: &'a [Symbol],
    /// True when the context was taken from the front of the data.
    pub consumed: bool,
}

fn check_symbols(alphabet: Alphabet, symbols: &[Symbol]) -> Result<()> {
    if let Some((index, &symbol)) = symbols
        .iter()
        .enumerate()
        .find(|(_, &s)| !alphabet.contains(s))
    {
        return Err(Error::AlphabetViolation {
            index,
            symbol: symbol as i64,
            m: alphabet.size(),
        });
    }
    Ok(())
}

pub fn serialize_symbols(alphabet: Alphabet, symbols: &[Symbol]) -> String {
    let mut out = String::with_capacity(symbols.len() * 2 + 1);
    if alphabet.size() <= 10 {
        for &s in symbols {
            out.push(char::from_digit(s, 10).expect("digit symbol"));
        }
    } else {
        for (i, s) in symbols.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&s.to_string());
        }
    }
    out.push('\n');
    out
}

fn detect_policy(text: &str, m: u32) -> SeparatorPolicy {
    if text.contains(',') {
        return SeparatorPolicy::Delimited;
    }
    let all_single = text.split_whitespace().all(|t| t.chars().count() == 1);
    if all_single || m > 10 {
        SeparatorPolicy::Delimited
    } else {
        SeparatorPolicy::Contiguous
    }
}

/// Parse a symbol sequence over an alphabet of size `m`.
pub fn parse_sequence(text: &str, m: u32, policy: SeparatorPolicy) -> Result<Sequence> {
    let alphabet = Alphabet::new(m)?;
    let policy = match policy {
        SeparatorPolicy::Auto => detect_policy(text, m),
        p => p,
    };
    let symbols = match policy {
        SeparatorPolicy::Contiguous => parse_contiguous(text, alphabet)?,
        _ => parse_delimited(text, alphabet)?,
    };
    Sequence::new(alphabet, symbols)
}

fn parse_contiguous(text: &str, alphabet: Alphabet) -> Result<Vec<Symbol>> {
    if alphabet.size() > 10 {
        return Err(Error::ContiguousAlphabet(alphabet.size()));
    }
    let mut symbols = Vec::with_capacity(text.len());
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        let index = symbols.len();
        let digit = c.to_digit(10).ok_or_else(|| Error::InvalidToken {
            index,
            token: c.to_string(),
        })?;
        if !alphabet.contains(digit) {
            return Err(Error::AlphabetViolation {
                index,
                symbol: digit as i64,
                m: alphabet.size(),
            });
        }
        symbols.push(digit);
    }
    Ok(symbols)
}

fn parse_delimited(text: &str, alphabet: Alphabet) -> Result<Vec<Symbol>> {
    let tokens = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty());
    let mut symbols = Vec::new();
    for (index, token) in tokens.enumerate() {
        let value: i64 = token.parse().map_err(|_| Error::InvalidToken {
            index,
            token: token.to_string(),
        })?;
        if value < 0 || value >= alphabet.size() as i64 {
            return Err(Error::AlphabetViolation {
                index,
                symbol: value,
                m: alphabet.size(),
            });
        }
        symbols.push(value as Symbol);
    }
    Ok(symbols)
}

/// Map a real-valued series to `{0, 1, 2}` by the sign of successive
/// differences: down, unchanged (exact equality), up.
pub fn quantize_ternary(values: &[f64]) -> Result<Sequence> {
    if let Some(line) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { line: line + 1 });
    }
    if values.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: values.len(),
        });
    }
    let symbols = values
        .windows(2)
        .map(|w| match w[1].partial_cmp(&w[0]) {
            Some(std::cmp::Ordering::Less) => 0,
            Some(std::cmp::Ordering::Equal) => 1,
            _ => 2,
        })
        .collect();
    Sequence::new(Alphabet(3), symbols)
}

/// Parse one real value per line (blank lines and `#` comments skipped; a
/// non-numeric first line is treated as a header).
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split(',').next().unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => return Err(Error::NonFinite { line: i + 1 }),
            Err(_) if values.is_empty() && i == 0 => continue,
            Err(_) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected a real number, got {field:?}"),
                })
            }
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_contiguous_digits() {
        let s = parse_sequence("0120", 3, SeparatorPolicy::Auto).unwrap();
        assert_eq!(s.symbols(), &[0, 1, 2, 0]);
    }

    #[test]
    fn rejects_out_of_alphabet_symbol_with_position() {
        let err = parse_sequence("013", 3, SeparatorPolicy::Auto).unwrap_err();
        match err {
            Error::AlphabetViolation { index, symbol, m } => {
                assert_eq!((index, symbol, m), (2, 3, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_whitespace_separated() {
        let s = parse_sequence("1 0 1 1", 2, SeparatorPolicy::Auto).unwrap();
        assert_eq!(s.symbols(), &[1, 0, 1, 1]);
    }

    #[test]
    fn parses_large_alphabet_with_commas() {
        let s = parse_sequence("12, 0,3\n11", 13, SeparatorPolicy::Auto).unwrap();
        assert_eq!(s.symbols(), &[12, 0, 3, 11]);
    }

    #[test]
    fn wrapped_digit_lines_are_contiguous() {
        let s = parse_sequence("0101\n1100\n", 2, SeparatorPolicy::Auto).unwrap();
        assert_eq!(s.symbols(), &[0, 1, 0, 1, 1, 1, 0, 0]);
    }

    #[test]
    fn negative_symbol_is_alphabet_violation() {
        let err = parse_sequence("0 -1 1", 2, SeparatorPolicy::Delimited).unwrap_err();
        assert!(matches!(err, Error::AlphabetViolation { index: 1, symbol: -1, .. }));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(
            parse_sequence("  \n", 2, SeparatorPolicy::Auto),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn alphabet_must_have_two_symbols() {
        assert!(matches!(Alphabet::new(1), Err(Error::InvalidAlphabet(1))));
    }

    #[test]
    fn quantizer_follows_price_moves() {
        let s = quantize_ternary(&[10.0, 9.5, 9.5, 10.1]).unwrap();
        assert_eq!(s.symbols(), &[0, 1, 2]);
        assert_eq!(s.alphabet().size(), 3);
        assert_eq!(quantize_ternary(&[5.0, 5.0, 5.0]).unwrap().symbols(), &[1, 1]);
        assert_eq!(quantize_ternary(&[1.0, 2.0, 3.0]).unwrap().symbols(), &[2, 2]);
    }

    #[test]
    fn quantizer_rejects_non_finite_and_short_input() {
        assert!(matches!(
            quantize_ternary(&[1.0, f64::NAN]),
            Err(Error::NonFinite { line: 2 })
        ));
        assert!(matches!(quantize_ternary(&[1.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn context_split_consumes_prefix_when_absent() {
        let s = parse_sequence("01101", 2, SeparatorPolicy::Auto).unwrap();
        let split = s.split_context(2).unwrap();
        assert_eq!(split.context, &[0, 1]);
        assert_eq!(split.data, &[1, 0, 1]);
        assert!(split.consumed);

        let s = s.with_context(vec![1]).unwrap();
        assert!(matches!(
            s.split_context(2),
            Err(Error::ContextLength { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn parses_value_column_with_header() {
        let v = parse_values("price\n1.5\n\n2.0\n").unwrap();
        assert_eq!(v, vec![1.5, 2.0]);
    }

    proptest! {
        #[test]
        fn canonical_text_round_trips(m in 2u32..20, raw in prop::collection::vec(0u32..1000, 1..200)) {
            let symbols: Vec<Symbol> = raw.into_iter().map(|s| s % m).collect();
            let seq = Sequence::new(Alphabet::new(m).unwrap(), symbols).unwrap();
            let text = seq.to_text();
            let back = parse_sequence(&text, m, SeparatorPolicy::Auto).unwrap();
            prop_assert_eq!(back.to_text(), text);
            prop_assert_eq!(back, seq);
        }

        #[test]
        fn quantizer_output_is_ternary(values in prop::collection::vec(-1e6f64..1e6, 2..200)) {
            let s = quantize_ternary(&values).unwrap();
            prop_assert_eq!(s.len(), values.len() - 1);
            prop_assert!(s.symbols().iter().all(|&x| x <= 2));
        }
    }
}
