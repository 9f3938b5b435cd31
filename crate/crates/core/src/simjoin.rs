//! Threshold joins between a base and a target entity set.
//!
//! `brute_force_join` scores every cross pair and is the correctness oracle.
//! `indexed_join` builds an inverted index over target tokens and prunes
//! probes by token weight; its results are identical by contract.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::EntitySet;
use crate::qgram::{tokenize, weighted_jaccard, TokenSet, WeightTable};

/// One qualifying pair.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinPair {
    pub base_id: String,
    pub target_id: String,
    pub score: f64,
}

/// All pairs with similarity strictly above `theta`, sorted by
/// `(base_id, target_id)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinResult {
    pub pairs: Vec<JoinPair>,
    pub theta: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::invalid_argument(format!(
            "theta must lie in [0, 1), got {theta}"
        )));
    }
    Ok(())
}

fn tokenize_records(set: &EntitySet, q: usize) -> Result<Vec<TokenSet>> {
    set.records()
        .iter()
        .map(|r| tokenize(&r.match_field, q))
        .collect()
}

fn finish(mut pairs: Vec<JoinPair>, theta: f64) -> JoinResult {
    pairs.sort_by(|a, b| {
        a.base_id
            .cmp(&b.base_id)
            .then_with(|| a.target_id.cmp(&b.target_id))
    });
    JoinResult { pairs, theta }
}

/// Score every `|base| x |target|` pair and keep those above `theta`.
pub fn brute_force_join(
    base: &EntitySet,
    target: &EntitySet,
    theta: f64,
    w: &WeightTable,
) -> Result<JoinResult> {
    check_theta(theta)?;
    let base_tokens = tokenize_records(base, w.q())?;
    let target_tokens = tokenize_records(target, w.q())?;
    let mut pairs = Vec::new();
    for (br, bt) in base.records().iter().zip(&base_tokens) {
        for (tr, tt) in target.records().iter().zip(&target_tokens) {
            let score = weighted_jaccard(bt, tt, w)?;
            if score > theta {
                pairs.push(JoinPair {
                    base_id: br.id.clone(),
                    target_id: tr.id.clone(),
                    score,
                });
            }
        }
    }
    Ok(finish(pairs, theta))
}

/// Inverted-index join, equivalent to [`brute_force_join`] on all inputs.
///
/// Candidate generation cannot dismiss a qualifying pair:
///
/// * A pair scoring above `theta >= 0` has positive intersection weight, or
///   hits the all-floored rule, which requires identical (hence overlapping)
///   token sets. Either way the pair shares a token, so scanning the postings
///   of the base record's tokens reaches every qualifying target.
/// * Weight pruning probes the base record's tokens in descending weight
///   order and stops once the remaining suffix weight drops to
///   `theta * W1` or below, where `W1` is the record's total token weight.
///   If a qualifying pair shared only unprobed tokens, its intersection
///   weight `I` would satisfy `I <= suffix <= theta * W1 <= theta * U < I`
///   (the union always contains all of the base record's tokens), a
///   contradiction. A record with `W1 = 0` can only qualify through the
///   identical-sets rule and probes all of its tokens. A small slack on the
///   stop bound absorbs float summation-order noise.
pub fn indexed_join(
    base: &EntitySet,
    target: &EntitySet,
    theta: f64,
    w: &WeightTable,
) -> Result<JoinResult> {
    check_theta(theta)?;
    let base_tokens = tokenize_records(base, w.q())?;
    let target_tokens = tokenize_records(target, w.q())?;

    let mut postings: HashMap<&str, Vec<usize>> = HashMap::new();
    for (idx, ts) in target_tokens.iter().enumerate() {
        for token in ts.iter() {
            postings.entry(token).or_default().push(idx);
        }
    }

    // visited stamps instead of clearing a set per record
    let mut seen = vec![usize::MAX; target.len()];
    let mut pairs = Vec::new();

    for (bi, (br, bt)) in base.records().iter().zip(&base_tokens).enumerate() {
        let mut probe: Vec<(&str, f64)> = bt.iter().map(|t| (t, w.weight(t))).collect();
        probe.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let total: f64 = probe.iter().map(|(_, wt)| wt).sum();
        let bound = theta * total - 1e-9;

        let mut suffix = total;
        for (token, wt) in probe {
            if suffix <= bound {
                break;
            }
            suffix -= wt;
            let Some(candidates) = postings.get(token) else {
                continue;
            };
            for &ti in candidates {
                if seen[ti] == bi {
                    continue;
                }
                seen[ti] = bi;
                let score = weighted_jaccard(bt, &target_tokens[ti], w)?;
                if score > theta {
                    pairs.push(JoinPair {
                        base_id: br.id.clone(),
                        target_id: target.records()[ti].id.clone(),
                        score,
                    });
                }
            }
        }
    }
    Ok(finish(pairs, theta))
}
