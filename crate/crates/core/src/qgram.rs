//! q-gram tokenization, RSJ token weighting and weighted Jaccard similarity.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

/// The special padding symbol. Any `$` already present in input data is left
/// as-is; the resulting ambiguity is accepted.
const PAD: char = '$';

/// A string broken into its set of q-grams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSet {
    tokens: BTreeSet<String>,
    q: usize,
}

impl TokenSet {
    /// Build from pre-tokenized data; every token must have exactly `q`
    /// Unicode scalar values.
    pub fn from_tokens<I, S>(tokens: I, q: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        check_q(q)?;
        let mut set = BTreeSet::new();
        for t in tokens {
            let t = t.into();
            if t.chars().count() != q {
                return Err(Error::invalid_argument(format!(
                    "token {t:?} does not have length {q}"
                )));
            }
            set.insert(t);
        }
        Ok(TokenSet { tokens: set, q })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.tokens.contains(token)
    }

    /// Tokens in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

/// Split a string into q-grams.
///
/// The string is lowercased, underscores become spaces, whitespace runs
/// collapse to a single space, one space is padded on each side, every space
/// is replaced by `q - 1` padding symbols, and all windows of `q` Unicode
/// scalar values are collected as a set.
pub fn tokenize(s: &str, q: usize) -> Result<TokenSet> {
    check_q(q)?;
    let mut collapsed = String::with_capacity(s.len() + 2);
    collapsed.push(' ');
    let mut prev_ws = true; // tracks runs only; the leading pad is always kept
    for c in s.chars() {
        let c = if c == '_' { ' ' } else { c };
        if c.is_whitespace() {
            if !prev_ws {
                collapsed.push(' ');
            }
            prev_ws = true;
        } else {
            for lc in c.to_lowercase() {
                collapsed.push(lc);
            }
            prev_ws = false;
        }
    }
    collapsed.push(' ');

    let mut symbols: Vec<char> = Vec::with_capacity(collapsed.len() + 2 * (q - 1));
    for c in collapsed.chars() {
        if c == ' ' {
            for _ in 0..q - 1 {
                symbols.push(PAD);
            }
        } else {
            symbols.push(c);
        }
    }

    let mut tokens = BTreeSet::new();
    for window in symbols.windows(q) {
        tokens.insert(window.iter().collect());
    }
    Ok(TokenSet { tokens, q })
}

fn check_q(q: usize) -> Result<()> {
    if q < 2 {
        Err(Error::invalid_argument(format!("q must be at least 2, got {q}")))
    } else {
        Ok(())
    }
}

/// Per-token weights computed over the base entity set.
///
/// RSJ weight: `max(0, ln((N - n_t + 0.5) / (n_t + 0.5)))` where `N` is the
/// number of base values and `n_t` the number of base values whose token set
/// contains `t`. The raw formula goes negative for very common tokens; the
/// floor at zero keeps similarity scores inside `[0, 1]`. Tokens never seen
/// in the base get `n_t = 0`, i.e. the maximum weight `ln((N + 0.5) / 0.5)`.
#[derive(Debug, Clone)]
pub struct WeightTable {
    q: usize,
    kind: WeightKind,
}

#[derive(Debug, Clone)]
enum WeightKind {
    Rsj {
        n: usize,
        counts: HashMap<String, usize>,
    },
    Uniform,
    Fixed(BTreeMap<String, f64>),
}

impl WeightTable {
    /// Count token frequencies over the base values and fix `N`.
    pub fn build<S: AsRef<str>>(base_values: &[S], q: usize) -> Result<Self> {
        check_q(q)?;
        if base_values.is_empty() {
            return Err(Error::invalid_argument(
                "cannot build a weight table from an empty base",
            ));
        }
        let mut counts: HashMap<String, usize> = HashMap::new();
        for value in base_values {
            for token in tokenize(value.as_ref(), q)?.iter() {
                *counts.entry(token.to_string()).or_insert(0) += 1;
            }
        }
        Ok(WeightTable {
            q,
            kind: WeightKind::Rsj {
                n: base_values.len(),
                counts,
            },
        })
    }

    /// Every token weighs 1; weighted Jaccard degenerates to plain Jaccard.
    pub fn uniform(q: usize) -> Result<Self> {
        check_q(q)?;
        Ok(WeightTable {
            q,
            kind: WeightKind::Uniform,
        })
    }

    /// Explicit non-negative per-token weights; unlisted tokens weigh 0.
    pub fn from_weights(weights: BTreeMap<String, f64>, q: usize) -> Result<Self> {
        check_q(q)?;
        if let Some((t, w)) = weights.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::invalid_argument(format!(
                "weight for token {t:?} must be finite and non-negative, got {w}"
            )));
        }
        Ok(WeightTable {
            q,
            kind: WeightKind::Fixed(weights),
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `N`; zero for uniform and fixed tables.
    pub fn base_size(&self) -> usize {
        match &self.kind {
            WeightKind::Rsj { n, .. } => *n,
            _ => 0,
        }
    }

    /// `n_t`; zero for tokens never seen in the base.
    pub fn token_count(&self, token: &str) -> usize {
        match &self.kind {
            WeightKind::Rsj { counts, .. } => counts.get(token).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// The zero floor is always applied.
    pub fn is_floored(&self) -> bool {
        true
    }

    pub fn weight(&self, token: &str) -> f64 {
        match &self.kind {
            WeightKind::Rsj { n, counts } => {
                let n = *n as f64;
                let n_t = counts.get(token).copied().unwrap_or(0) as f64;
                let raw = ((n - n_t + 0.5) / (n_t + 0.5)).ln();
                raw.max(0.0)
            }
            WeightKind::Uniform => 1.0,
            WeightKind::Fixed(weights) => weights.get(token).copied().unwrap_or(0.0),
        }
    }

    /// All base tokens as `(token, n_t, weight)`, sorted by weight descending
    /// then token ascending. Empty for uniform tables.
    pub fn entries(&self) -> Vec<(String, usize, f64)> {
        let mut rows: Vec<(String, usize, f64)> = match &self.kind {
            WeightKind::Rsj { counts, .. } => counts
                .iter()
                .map(|(t, n_t)| (t.clone(), *n_t, self.weight(t)))
                .collect(),
            WeightKind::Uniform => Vec::new(),
            WeightKind::Fixed(weights) => {
                weights.iter().map(|(t, w)| (t.clone(), 0, *w)).collect()
            }
        };
        rows.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
        rows
    }
}

/// Weighted Jaccard similarity of two token sets.
///
/// Sum of weights over the intersection divided by the sum over the union.
/// When every token in the union has been floored to weight zero the ratio
/// is undefined; identical sets score 1, anything else 0.
pub fn weighted_jaccard(r1: &TokenSet, r2: &TokenSet, w: &WeightTable) -> Result<f64> {
    if r1.q != r2.q || r1.q != w.q {
        return Err(Error::invalid_argument(format!(
            "q mismatch: token sets have q = {} and {}, weight table has q = {}",
            r1.q, r2.q, w.q
        )));
    }
    let mut inter = 0.0f64;
    let mut union = 0.0f64;
    let mut it1 = r1.tokens.iter().peekable();
    let mut it2 = r2.tokens.iter().peekable();
    loop {
        match (it1.peek(), it2.peek()) {
            (Some(a), Some(b)) => {
                let (token, in_both) = match a.cmp(b) {
                    std::cmp::Ordering::Less => (it1.next().unwrap(), false),
                    std::cmp::Ordering::Greater => (it2.next().unwrap(), false),
                    std::cmp::Ordering::Equal => {
                        it2.next();
                        (it1.next().unwrap(), true)
                    }
                };
                let wt = w.weight(token);
                union += wt;
                if in_both {
                    inter += wt;
                }
            }
            (Some(_), None) => {
                union += w.weight(it1.next().unwrap());
            }
            (None, Some(_)) => {
                union += w.weight(it2.next().unwrap());
            }
            (None, None) => break,
        }
    }
    if union > 0.0 {
        Ok(inter / union)
    } else if r1.tokens == r2.tokens {
        Ok(1.0)
    } else {
        Ok(0.0)
    }
}

/// Convenience: tokenize both strings and compare.
pub fn string_similarity(a: &str, b: &str, w: &WeightTable) -> Result<f64> {
    let ta = tokenize(a, w.q())?;
    let tb = tokenize(b, w.q())?;
    weighted_jaccard(&ta, &tb, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(set: &TokenSet) -> Vec<&str> {
        set.iter().collect()
    }

    #[test]
    fn golden_hiv_q2() {
        let t = tokenize("HIV", 2).unwrap();
        assert_eq!(toks(&t), vec!["$h", "hi", "iv", "v$"]);
    }

    #[test]
    fn golden_hiv_q3() {
        let t = tokenize("HIV", 3).unwrap();
        assert_eq!(toks(&t), vec!["$$h", "$hi", "hiv", "iv$", "v$$"]);
    }

    #[test]
    fn golden_internal_whitespace() {
        let t = tokenize("a b", 2).unwrap();
        assert_eq!(toks(&t), vec!["$a", "$b", "a$", "b$"]);
    }

    #[test]
    fn golden_empty_string() {
        let t = tokenize("", 2).unwrap();
        assert_eq!(toks(&t), vec!["$$"]);
    }

    #[test]
    fn underscores_match_spaces() {
        assert_eq!(
            tokenize("Alzheimer_disease", 2).unwrap(),
            tokenize("alzheimer disease", 2).unwrap()
        );
    }

    #[test]
    fn rejects_small_q() {
        assert!(tokenize("x", 1).is_err());
        assert!(tokenize("x", 0).is_err());
        assert!(WeightTable::uniform(1).is_err());
    }

    #[test]
    fn rsj_weight_rare_token() {
        // one value containing the bigram "ab" plus 99 values that do not
        let mut base: Vec<String> = vec!["ab".to_string()];
        for i in 0..99 {
            base.push(format!("c{i}d"));
        }
        let w = WeightTable::build(&base, 2).unwrap();
        assert_eq!(w.base_size(), 100);
        assert_eq!(w.token_count("ab"), 1);
        let expected = 4.194692536056382; // ln(99.5 / 1.5)
        assert!((w.weight("ab") - expected).abs() < 1e-12);
    }

    #[test]
    fn rsj_weight_ubiquitous_token_floors_to_zero() {
        let base: Vec<String> = (0..100).map(|i| format!("aa{i}")).collect();
        let w = WeightTable::build(&base, 2).unwrap();
        assert_eq!(w.token_count("aa"), 100);
        assert_eq!(w.weight("aa"), 0.0);
    }

    #[test]
    fn rsj_weight_unseen_token() {
        let base: Vec<String> = (0..10).map(|i| format!("b{i}")).collect();
        let w = WeightTable::build(&base, 2).unwrap();
        assert_eq!(w.token_count("zz"), 0);
        let expected = 3.044522437723423; // ln(10.5 / 0.5)
        assert!((w.weight("zz") - expected).abs() < 1e-12);
    }

    #[test]
    fn weighted_jaccard_hand_example() {
        let r1 = TokenSet::from_tokens(["aa", "bb"], 2).unwrap();
        let r2 = TokenSet::from_tokens(["bb", "cc"], 2).unwrap();
        let mut weights = BTreeMap::new();
        weights.insert("aa".to_string(), 1.0);
        weights.insert("bb".to_string(), 2.0);
        weights.insert("cc".to_string(), 3.0);
        let w = WeightTable::from_weights(weights, 2).unwrap();
        let sim = weighted_jaccard(&r1, &r2, &w).unwrap();
        assert!((sim - 2.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn identity_scores_one_and_disjoint_scores_zero() {
        let base = vec!["thalassemia", "anemia", "asthma"];
        let w = WeightTable::build(&base, 2).unwrap();
        let a = tokenize("thalassemia", 2).unwrap();
        let b = tokenize("thalassemia", 2).unwrap();
        assert_eq!(weighted_jaccard(&a, &b, &w).unwrap(), 1.0);

        let c = tokenize("xyz", 2).unwrap();
        let d = tokenize("qqq", 2).unwrap();
        assert_eq!(weighted_jaccard(&c, &d, &w).unwrap(), 0.0);
    }

    #[test]
    fn q_mismatch_is_rejected() {
        let a = tokenize("x", 2).unwrap();
        let b = tokenize("x", 3).unwrap();
        let w = WeightTable::uniform(2).unwrap();
        assert!(weighted_jaccard(&a, &b, &w).is_err());
    }

    #[test]
    fn empty_base_is_rejected() {
        let empty: Vec<String> = Vec::new();
        assert!(WeightTable::build(&empty, 2).is_err());
    }

    #[test]
    fn token_swap_order_is_captured() {
        let base = vec![
            "adenocarcinoma of the colon",
            "colon adenocarcinoma",
            "blood disorders",
            "breast cancer",
            "lung cancer",
        ];
        let w = WeightTable::build(&base, 2).unwrap();
        let swapped = string_similarity(
            "adenocarcinoma of the colon",
            "colon adenocarcinoma",
            &w,
        )
        .unwrap();
        let unrelated =
            string_similarity("adenocarcinoma of the colon", "blood disorders", &w).unwrap();
        assert!(swapped > unrelated, "{swapped} vs {unrelated}");
    }

    #[test]
    fn common_tokens_stop_mattering() {
        // "disease" appears in most base values, so its q-grams carry little
        // weight and dropping the word barely lowers the similarity.
        let base = vec![
            "alzheimer disease",
            "parkinson disease",
            "huntington disease",
            "crohn disease",
            "addison disease",
            "graves disease",
            "wilson disease",
            "asthma",
            "aids",
        ];
        let w = WeightTable::build(&base, 2).unwrap();
        let weighted = string_similarity("alzheimer", "alzheimer's disease", &w).unwrap();
        let plain = string_similarity(
            "alzheimer",
            "alzheimer's disease",
            &WeightTable::uniform(2).unwrap(),
        )
        .unwrap();
        assert!(weighted > plain, "{weighted} vs {plain}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const ALPHABET: &[u8] = b"abcd$";

        fn arb_token_set(q: usize) -> impl Strategy<Value = TokenSet> {
            prop::collection::vec(
                prop::collection::vec(0..ALPHABET.len(), q..=q),
                0..12,
            )
            .prop_map(move |raw| {
                let tokens: Vec<String> = raw
                    .into_iter()
                    .map(|idx| idx.into_iter().map(|i| ALPHABET[i] as char).collect())
                    .collect();
                TokenSet::from_tokens(tokens, q).unwrap()
            })
        }

        fn arb_weights() -> impl Strategy<Value = WeightTable> {
            prop::collection::vec("[a-d$]{2}", 1..20).prop_map(|values| {
                WeightTable::build(&values, 2).unwrap()
            })
        }

        proptest! {
            #[test]
            fn symmetry_and_range(a in arb_token_set(2), b in arb_token_set(2), w in arb_weights()) {
                let ab = weighted_jaccard(&a, &b, &w).unwrap();
                let ba = weighted_jaccard(&b, &a, &w).unwrap();
                prop_assert_eq!(ab, ba);
                prop_assert!((0.0..=1.0).contains(&ab));
            }

            #[test]
            fn uniform_weights_degenerate_to_plain_jaccard(a in arb_token_set(2), b in arb_token_set(2)) {
                let w = WeightTable::uniform(2).unwrap();
                let got = weighted_jaccard(&a, &b, &w).unwrap();
                let inter = a.iter().filter(|t| b.contains(t)).count() as f64;
                let union = (a.len() + b.len()) as f64 - inter;
                let expected = if union > 0.0 {
                    inter / union
                } else {
                    1.0 // both empty, therefore equal
                };
                prop_assert!((got - expected).abs() < 1e-12);
            }

            #[test]
            fn identity_iff_equal_under_positive_weights(a in arb_token_set(2), b in arb_token_set(2)) {
                // every token unseen in a tiny base, so all weights positive
                let w = WeightTable::build(&["zz"], 2).unwrap();
                let sim = weighted_jaccard(&a, &b, &w).unwrap();
                prop_assert_eq!(sim == 1.0, a == b);
            }

            #[test]
            fn tokens_have_length_q(s in "\\PC{0,30}", q in 2usize..5) {
                let set = tokenize(&s, q).unwrap();
                for t in set.iter() {
                    prop_assert_eq!(t.chars().count(), q);
                }
            }
        }
    }
}
