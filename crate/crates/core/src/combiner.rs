//! Search for one word acting hyperbolically in every action of a system.
//!
//! The construction is inductive. Given a word `f` hyperbolic in actions
//! `1..k-1` and a witness `g` hyperbolic in action `k`, both are first replaced
//! by powers killing the finite orders of their elliptic images. Candidates
//! `f^a g^b` are then enumerated along a fixed diagonal schedule and each is
//! certified by exact classification.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{Action, ActionSystem, GroupWord};
use crate::error::Error;
use crate::models::{compose, BoundaryPoint, Isometry, IsometryClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSchedule {
    /// Largest exponent `a` or `b` tried at each stage.
    pub max_exponent: u32,
    /// Word length used when hunting for missing witnesses.
    pub witness_depth: usize,
}

impl Default for SearchSchedule {
    fn default() -> Self {
        SearchSchedule { max_exponent: 32, witness_depth: 6 }
    }
}

impl SearchSchedule {
    pub fn with_max_exponent(max_exponent: u32) -> Self {
        SearchSchedule { max_exponent, ..Self::default() }
    }

    /// Pairs with `max(a, b) = s`, ordered by `a`, then `b`.
    pub fn shell(s: u32) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = (1..s).map(|a| (a, s)).collect();
        out.extend((1..=s).map(|b| (s, b)));
        out
    }

    /// Every `(index, a, b)` in schedule order.
    pub fn candidates(&self) -> impl Iterator<Item = (u64, u32, u32)> {
        (1..=self.max_exponent)
            .flat_map(Self::shell)
            .enumerate()
            .map(|(i, (a, b))| (i as u64, a, b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trial {
    pub a: u32,
    pub b: u32,
    /// Actions in which `f^a g^b` was not hyperbolic.
    pub failing_actions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CombineError {
    #[error("stage {stage}: no f^a g^b with a, b <= {max_exponent} is hyperbolic in actions 1..={stage}")]
    ScheduleExhausted { stage: usize, max_exponent: u32, trials: Vec<Trial> },

    #[error("witness {word} is not hyperbolic in action {action}")]
    WitnessNotHyperbolic { action: usize, word: GroupWord },

    #[error("no hyperbolic word of length <= {depth} found for action {action}")]
    NoWitness { action: usize, depth: usize },

    #[error("hypothesis violation: {word} in action {action}: {reason}")]
    HypothesisViolation { action: usize, word: GroupWord, reason: String },

    #[error(transparent)]
    Model(#[from] Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub action: usize,
    pub word: GroupWord,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub words_checked: usize,
    pub violations: Vec<Violation>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Classifies every word up to `depth` in every action and checks the
/// explicit witnesses.
pub fn check_hypotheses(system: &ActionSystem, depth: usize) -> Result<HypothesisReport, CombineError> {
    let words = system.words_up_to(depth);
    let mut violations = Vec::new();
    for (i, action) in system.actions().iter().enumerate() {
        let found: Vec<Violation> = words
            .par_iter()
            .map(|w| -> Result<Option<Violation>, Error> {
                let iso = action.evaluate(w)?;
                Ok(match action.model.classify(&iso)? {
                    IsometryClass::HypothesisViolation { reason } => {
                        Some(Violation { action: i, word: w.clone(), reason })
                    }
                    _ => None,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?
            .into_iter()
            .flatten()
            .collect();
        violations.extend(found);
    }
    for (i, w) in system.witnesses().iter().enumerate() {
        if let Some(w) = w {
            if !system.evaluate(i, w)?.is_hyperbolic() {
                return Err(CombineError::WitnessNotHyperbolic { action: i, word: w.clone() });
            }
        }
    }
    Ok(HypothesisReport { words_checked: words.len() * system.actions().len(), violations })
}

/// Explicit witness for `action`, or the first hyperbolic word in shortlex order.
pub fn witness_for(system: &ActionSystem, action: usize, depth: usize) -> Result<GroupWord, CombineError> {
    if let Some(w) = &system.witnesses()[action] {
        if !system.evaluate(action, w)?.is_hyperbolic() {
            return Err(CombineError::WitnessNotHyperbolic { action, word: w.clone() });
        }
        return Ok(w.clone());
    }
    for w in system.words_up_to(depth) {
        if system.evaluate(action, &w)?.is_hyperbolic() {
            return Ok(w);
        }
    }
    Err(CombineError::NoWitness { action, depth })
}

/// Whether `f` and `g` are hyperbolic in `action` with disjoint fixed-point pairs.
pub fn independent(action: &Action, f: &GroupWord, g: &GroupWord) -> Result<bool, Error> {
    let (fa, fr) = action.model.fixed_points(&action.evaluate(f)?)?;
    let (ga, gr) = action.model.fixed_points(&action.evaluate(g)?)?;
    Ok(fa != ga && fa != gr && fr != ga && fr != gr)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionTag {
    /// The moving element is elliptic and fixes the other's attracting point.
    #[serde(rename = "E")]
    E,
    /// Both hyperbolic, sharing a fixed point.
    #[serde(rename = "H")]
    H,
    /// Both hyperbolic and independent.
    #[serde(rename = "H'")]
    HPrime,
    /// Elliptic and moving the attracting point.
    #[serde(rename = "E-E'-candidate")]
    EMinusEPrimeCandidate,
}

impl fmt::Display for PartitionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionTag::E => "E",
            PartitionTag::H => "H",
            PartitionTag::HPrime => "H'",
            PartitionTag::EMinusEPrimeCandidate => "E-E'-candidate",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub action: usize,
    pub f_class: String,
    pub g_class: String,
    pub f_order: Option<u64>,
    pub g_order: Option<u64>,
    /// `None` for the newest action, whose roles are swapped.
    pub tag: Option<PartitionTag>,
    /// Whether `g` fixes the repelling point of `f` (actions before the newest).
    pub g_fixes_f_minus: Option<bool>,
}

/// Per-action view of the current `f` and `g` at one induction stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionProfile {
    pub entries: Vec<ProfileEntry>,
}

fn elliptic_tag(mover: &Isometry, action: &Action, target: &BoundaryPoint) -> Result<PartitionTag, Error> {
    let moved = action.model.apply_boundary(mover, target)?;
    Ok(if moved == *target { PartitionTag::E } else { PartitionTag::EMinusEPrimeCandidate })
}

fn profile(system: &ActionSystem, f: &GroupWord, g: &GroupWord, k: usize) -> Result<ActionProfile, Error> {
    let mut entries = Vec::new();
    for (i, action) in system.actions().iter().enumerate().take(k + 1) {
        let fi = action.evaluate(f)?;
        let gi = action.evaluate(g)?;
        let fc = action.model.classify(&fi)?;
        let gc = action.model.classify(&gi)?;
        let (tag, fixes) = if i < k && fc.is_hyperbolic() {
            let (fa, fr) = action.model.fixed_points(&fi)?;
            let fixes = action.model.apply_boundary(&gi, &fr)? == fr;
            let tag = if gc.is_hyperbolic() {
                if independent(action, f, g)? { PartitionTag::HPrime } else { PartitionTag::H }
            } else {
                elliptic_tag(&gi, action, &fa)?
            };
            (Some(tag), Some(fixes))
        } else if i == k && gc.is_hyperbolic() && !fc.is_hyperbolic() {
            let (ga, _) = action.model.fixed_points(&gi)?;
            (Some(elliptic_tag(&fi, action, &ga)?), None)
        } else {
            (None, None)
        };
        entries.push(ProfileEntry {
            action: i,
            f_class: fc.tag().to_string(),
            g_class: gc.tag().to_string(),
            f_order: if fc.is_elliptic() { fi.order() } else { None },
            g_order: if gc.is_elliptic() { gi.order() } else { None },
            tag,
            g_fixes_f_minus: fixes,
        });
    }
    Ok(ActionProfile { entries })
}

fn lcm_of_orders(isos: impl Iterator<Item = Isometry>) -> u64 {
    isos.filter(|x| !x.is_hyperbolic()).filter_map(|x| x.order()).fold(1, |acc, o| acc.lcm(&o))
}

/// Replaces `f`, `g` by `f^p`, `g^q`, with `p`, `q` the lcm of the finite orders
/// of their elliptic images among actions `0..=k`.
pub fn normalize_powers(
    system: &ActionSystem,
    f: &GroupWord,
    g: &GroupWord,
    k: usize,
) -> Result<(GroupWord, GroupWord, u64, u64, ActionProfile), Error> {
    let acts = &system.actions()[..=k];
    let p = lcm_of_orders(acts.iter().map(|a| a.evaluate(f)).collect::<Result<Vec<_>, _>>()?.into_iter());
    let q = lcm_of_orders(acts.iter().map(|a| a.evaluate(g)).collect::<Result<Vec<_>, _>>()?.into_iter());
    let f2 = f.pow(p as i64);
    let g2 = g.pow(q as i64);
    let prof = profile(system, &f2, &g2, k)?;
    Ok((f2, g2, p, q, prof))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    /// Index of the action added at this stage.
    pub action: usize,
    pub f: GroupWord,
    pub g: GroupWord,
    pub p: u64,
    pub q: u64,
    pub a: u32,
    pub b: u32,
    /// Set when `f` was already hyperbolic in the new action.
    pub trivial: bool,
    pub schedule_index: Option<u64>,
    pub candidates_tried: u64,
    pub profile: ActionProfile,
    pub word: GroupWord,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub candidates_tried: u64,
    /// Schedule index of the success at the final stage.
    pub schedule_index: Option<u64>,
}

/// A word with its exact classification in every action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub word: GroupWord,
    pub stages: Vec<StageRecord>,
    pub per_action: Vec<IsometryClass>,
    pub search_stats: SearchStats,
}

fn classify_all(system: &ActionSystem, word: &GroupWord, upto: usize) -> Result<Vec<IsometryClass>, CombineError> {
    system.actions()[..=upto]
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let c = a.model.classify(&a.evaluate(word)?)?;
            if let IsometryClass::HypothesisViolation { reason } = &c {
                return Err(CombineError::HypothesisViolation { action: i, word: word.clone(), reason: reason.clone() });
            }
            Ok(c)
        })
        .collect()
}

enum Outcome {
    Hyperbolic,
    Fails(Vec<usize>),
    Violation(usize, String),
}

/// One induction step: `f` is hyperbolic in actions `0..k`, `g` in action `k`.
pub fn combine_step(
    system: &ActionSystem,
    f: &GroupWord,
    g: &GroupWord,
    k: usize,
    schedule: &SearchSchedule,
) -> Result<Certificate, CombineError> {
    let actions = &system.actions()[..=k];
    if system.evaluate(k, f)?.is_hyperbolic() {
        let per_action = classify_all(system, f, k)?;
        let stage = StageRecord {
            action: k,
            f: f.clone(),
            g: g.clone(),
            p: 1,
            q: 1,
            a: 1,
            b: 0,
            trivial: true,
            schedule_index: None,
            candidates_tried: 0,
            profile: profile(system, f, g, k)?,
            word: f.clone(),
        };
        return Ok(Certificate {
            word: f.clone(),
            stages: vec![stage],
            per_action,
            search_stats: SearchStats::default(),
        });
    }
    let (fp, gq, p, q, prof) = normalize_powers(system, f, g, k)?;
    let fi: Vec<Isometry> = actions.iter().map(|a| a.evaluate(&fp)).collect::<Result<_, _>>()?;
    let gi: Vec<Isometry> = actions.iter().map(|a| a.evaluate(&gq)).collect::<Result<_, _>>()?;
    let test = |a: u32, b: u32| -> Result<Outcome, Error> {
        let mut fails = Vec::new();
        for (i, act) in actions.iter().enumerate() {
            let iso = compose(&fi[i].pow(i64::from(a)), &gi[i].pow(i64::from(b)))?;
            if !iso.is_hyperbolic() {
                if let IsometryClass::HypothesisViolation { reason } = act.model.classify(&iso)? {
                    return Ok(Outcome::Violation(i, reason));
                }
                fails.push(i);
            }
        }
        Ok(if fails.is_empty() { Outcome::Hyperbolic } else { Outcome::Fails(fails) })
    };
    let mut trials = Vec::new();
    let mut index = 0u64;
    for s in 1..=schedule.max_exponent {
        let shell = SearchSchedule::shell(s);
        let outcomes: Vec<Outcome> = shell.par_iter().map(|&(a, b)| test(a, b)).collect::<Result<_, _>>()?;
        for (&(a, b), outcome) in shell.iter().zip(outcomes) {
            let word = fp.pow(i64::from(a)).mul(&gq.pow(i64::from(b)));
            match outcome {
                Outcome::Violation(action, reason) => {
                    return Err(CombineError::HypothesisViolation { action, word, reason });
                }
                Outcome::Fails(failing_actions) => trials.push(Trial { a, b, failing_actions }),
                Outcome::Hyperbolic => {
                    let per_action = classify_all(system, &word, k)?;
                    let stage = StageRecord {
                        action: k,
                        f: f.clone(),
                        g: g.clone(),
                        p,
                        q,
                        a,
                        b,
                        trivial: false,
                        schedule_index: Some(index),
                        candidates_tried: index + 1,
                        profile: prof,
                        word: word.clone(),
                    };
                    return Ok(Certificate {
                        word,
                        stages: vec![stage],
                        per_action,
                        search_stats: SearchStats { candidates_tried: index + 1, schedule_index: Some(index) },
                    });
                }
            }
            index += 1;
        }
    }
    Err(CombineError::ScheduleExhausted { stage: k, max_exponent: schedule.max_exponent, trials })
}

/// Folds [`combine_step`] over the actions in order.
pub fn simultaneous_hyperbolic(system: &ActionSystem, schedule: &SearchSchedule) -> Result<Certificate, CombineError> {
    let first = witness_for(system, 0, schedule.witness_depth)?;
    let mut cert = Certificate {
        word: first.clone(),
        stages: Vec::new(),
        per_action: classify_all(system, &first, 0)?,
        search_stats: SearchStats::default(),
    };
    for k in 1..system.actions().len() {
        let g = witness_for(system, k, schedule.witness_depth)?;
        let step = combine_step(system, &cert.word, &g, k, schedule)?;
        debug_assert!(step.per_action.iter().all(IsometryClass::is_hyperbolic));
        cert.search_stats.candidates_tried += step.search_stats.candidates_tried;
        cert.search_stats.schedule_index = step.search_stats.schedule_index;
        cert.word = step.word;
        cert.per_action = step.per_action;
        cert.stages.extend(step.stages);
    }
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    pub diagnostic: Option<String>,
}

/// Recomputes every classification from the word alone.
pub fn verify_certificate(system: &ActionSystem, cert: &Certificate) -> Verification {
    let fail = |msg: String| Verification { valid: false, diagnostic: Some(msg) };
    if cert.per_action.len() != system.actions().len() {
        return fail(format!(
            "certificate covers {} actions, system has {}",
            cert.per_action.len(),
            system.actions().len()
        ));
    }
    if let Some(g) = cert.word.generators().find(|g| !system.generators().iter().any(|x| x == g)) {
        return fail(format!("unknown generator {g:?} in {}", cert.word));
    }
    for (i, action) in system.actions().iter().enumerate() {
        let fresh = match action.evaluate(&cert.word).and_then(|iso| action.model.classify(&iso)) {
            Ok(c) => c,
            Err(e) => return fail(format!("action {i}: {e}")),
        };
        if !fresh.is_hyperbolic() {
            return fail(format!("{} is {} in action {i}", cert.word, fresh.tag()));
        }
        if fresh != cert.per_action[i] {
            return fail(format!("stored classification for action {i} does not match recomputation"));
        }
    }
    Verification { valid: true, diagnostic: None }
}
