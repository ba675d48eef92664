//! Finite-automaton algebra over an abstract symbol type.
//!
//! Everything downstream (projections, influenced languages, inclusion
//! checks) is phrased in terms of [`Fsa`]. Epsilon transitions are
//! first-class because erasing homomorphisms produce them;
//! [`Fsa::determinize`] removes them again.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::env;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::OnceLock;

use thiserror::Error;

/// Bound on the symbol types an [`Fsa`] can range over.
pub trait Symbol: Clone + Eq + Ord + Hash + Debug {}
impl<T: Clone + Eq + Ord + Hash + Debug> Symbol for T {}

pub type StateId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FsaError {
    #[error("operand alphabets differ")]
    AlphabetMismatch,
    #[error("subset construction exceeded the state limit of {0}")]
    StateLimit(usize),
}

const DEFAULT_MAX_STATES: usize = 1_000_000;

/// Cap on subset-construction size, read once from SYNCHECK_MAX_STATES.
pub fn max_states() -> usize {
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        env::var("SYNCHECK_MAX_STATES")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_MAX_STATES)
    })
}

/// A nondeterministic finite automaton with optional epsilon moves.
///
/// States are dense ids `0..states`. The represented language is the set
/// of label sequences (epsilon elided) along paths from `initial` to an
/// accepting state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsa<S: Symbol> {
    states: usize,
    alphabet: BTreeSet<S>,
    initial: StateId,
    accepting: BTreeSet<StateId>,
    transitions: Vec<(StateId, Option<S>, StateId)>,
}

/// Finite, exhaustive-up-to-a-bound view of a language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSet<S: Symbol> {
    pub words: BTreeSet<Vec<S>>,
    pub max_len: usize,
}

/// Outcome of an inclusion check, with a shortest counterexample when it
/// fails (ties broken lexicographically on the symbol order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionResult<S: Symbol> {
    pub holds: bool,
    pub counterexample: Option<Vec<S>>,
}

impl<S: Symbol> Fsa<S> {
    pub fn new(states: usize, alphabet: impl IntoIterator<Item = S>, initial: StateId) -> Self {
        let alphabet: BTreeSet<S> = alphabet.into_iter().collect();
        assert!(initial < states, "initial state out of range");
        Fsa {
            states,
            alphabet,
            initial,
            accepting: BTreeSet::new(),
            transitions: Vec::new(),
        }
    }

    /// Automaton accepting only the empty word, over the given alphabet.
    pub fn epsilon_language(alphabet: impl IntoIterator<Item = S>) -> Self {
        let mut a = Fsa::new(1, alphabet, 0);
        a.mark_accepting(0);
        a
    }

    /// Automaton accepting nothing, over the given alphabet.
    pub fn empty_language(alphabet: impl IntoIterator<Item = S>) -> Self {
        Fsa::new(1, alphabet, 0)
    }

    /// Automaton accepting exactly one word.
    pub fn single_word(alphabet: impl IntoIterator<Item = S>, word: &[S]) -> Self {
        let mut a = Fsa::new(word.len() + 1, alphabet, 0);
        for (i, s) in word.iter().enumerate() {
            a.add_transition(i, s.clone(), i + 1);
        }
        a.mark_accepting(word.len());
        a
    }

    pub fn add_transition(&mut self, from: StateId, label: S, to: StateId) {
        assert!(from < self.states && to < self.states);
        assert!(self.alphabet.contains(&label), "label not in alphabet");
        self.transitions.push((from, Some(label), to));
    }

    pub fn add_epsilon(&mut self, from: StateId, to: StateId) {
        assert!(from < self.states && to < self.states);
        self.transitions.push((from, None, to));
    }

    pub fn mark_accepting(&mut self, state: StateId) {
        assert!(state < self.states);
        self.accepting.insert(state);
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn alphabet(&self) -> &BTreeSet<S> {
        &self.alphabet
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting.contains(&s)
    }

    pub fn transitions(&self) -> &[(StateId, Option<S>, StateId)] {
        &self.transitions
    }

    /// Widens the alphabet; the language is unchanged.
    pub fn extend_alphabet(&mut self, symbols: impl IntoIterator<Item = S>) {
        self.alphabet.extend(symbols);
    }

    fn epsilon_closure(&self, set: &BTreeSet<StateId>) -> BTreeSet<StateId> {
        let mut closure = set.clone();
        let mut stack: Vec<StateId> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for (from, label, to) in &self.transitions {
                if *from == s && label.is_none() && closure.insert(*to) {
                    stack.push(*to);
                }
            }
        }
        closure
    }

    fn subset_step(&self, set: &BTreeSet<StateId>, symbol: &S) -> BTreeSet<StateId> {
        let mut next = BTreeSet::new();
        for s in set {
            for (from, label, to) in &self.transitions {
                if from == s && label.as_ref() == Some(symbol) {
                    next.insert(*to);
                }
            }
        }
        self.epsilon_closure(&next)
    }

    /// All words of the language up to `max_len`, by exhaustive subset
    /// traversal. This is the independent oracle the rest of the crate is
    /// checked against.
    pub fn enumerate_words(&self, max_len: usize) -> WordSet<S> {
        let mut words = BTreeSet::new();
        let symbols: Vec<S> = self.alphabet.iter().cloned().collect();
        let start = self.epsilon_closure(&BTreeSet::from([self.initial]));
        let mut frontier: Vec<(Vec<S>, BTreeSet<StateId>)> = vec![(Vec::new(), start)];
        for _ in 0..=max_len {
            let mut next_frontier = Vec::new();
            for (word, set) in frontier.drain(..) {
                if set.iter().any(|s| self.accepting.contains(s)) {
                    words.insert(word.clone());
                }
                if word.len() == max_len {
                    continue;
                }
                for sym in &symbols {
                    let next = self.subset_step(&set, sym);
                    if !next.is_empty() {
                        let mut w = word.clone();
                        w.push(sym.clone());
                        next_frontier.push((w, next));
                    }
                }
            }
            frontier = next_frontier;
        }
        WordSet { words, max_len }
    }

    /// True iff the word is in the language.
    pub fn accepts(&self, word: &[S]) -> bool {
        let mut set = self.epsilon_closure(&BTreeSet::from([self.initial]));
        for sym in word {
            set = self.subset_step(&set, sym);
            if set.is_empty() {
                return false;
            }
        }
        set.iter().any(|s| self.accepting.contains(s))
    }

    /// Subset construction: deterministic, complete, epsilon-free, same
    /// language. Fails only when the construction exceeds [`max_states`].
    pub fn determinize(&self) -> Result<Fsa<S>, FsaError> {
        let limit = max_states();
        let symbols: Vec<S> = self.alphabet.iter().cloned().collect();
        let start = self.epsilon_closure(&BTreeSet::from([self.initial]));
        let mut ids: HashMap<BTreeSet<StateId>, StateId> = HashMap::new();
        let mut subsets: Vec<BTreeSet<StateId>> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert(start.clone(), 0);
        subsets.push(start);
        queue.push_back(0);
        let mut transitions: Vec<(StateId, Option<S>, StateId)> = Vec::new();
        while let Some(id) = queue.pop_front() {
            let set = subsets[id].clone();
            for sym in &symbols {
                let next = self.subset_step(&set, sym);
                let next_id = match ids.get(&next) {
                    Some(&i) => i,
                    None => {
                        let i = subsets.len();
                        if i >= limit {
                            return Err(FsaError::StateLimit(limit));
                        }
                        ids.insert(next.clone(), i);
                        subsets.push(next);
                        queue.push_back(i);
                        i
                    }
                };
                transitions.push((id, Some(sym.clone()), next_id));
            }
        }
        let mut out = Fsa {
            states: subsets.len(),
            alphabet: self.alphabet.clone(),
            initial: 0,
            accepting: BTreeSet::new(),
            transitions,
        };
        for (id, set) in subsets.iter().enumerate() {
            if set.iter().any(|s| self.accepting.contains(s)) {
                out.accepting.insert(id);
            }
        }
        Ok(out)
    }

    /// Complement over the automaton's own alphabet.
    ///
    /// The complement of the empty language over the empty alphabet is
    /// the language containing only the empty word.
    pub fn complement(&self) -> Result<Fsa<S>, FsaError> {
        let mut det = self.determinize()?;
        det.accepting = (0..det.states)
            .filter(|s| !det.accepting.contains(s))
            .collect();
        Ok(det)
    }

    fn product(&self, other: &Fsa<S>) -> Result<(Fsa<S>, Vec<(StateId, StateId)>), FsaError> {
        if self.alphabet != other.alphabet {
            return Err(FsaError::AlphabetMismatch);
        }
        let a = self.determinize()?;
        let b = other.determinize()?;
        let symbols: Vec<S> = a.alphabet.iter().cloned().collect();
        let step = |aut: &Fsa<S>, s: StateId, sym: &S| -> StateId {
            aut.transitions
                .iter()
                .find(|(from, label, _)| *from == s && label.as_ref() == Some(sym))
                .map(|(_, _, to)| *to)
                .expect("determinized automata are complete")
        };
        let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut pairs: Vec<(StateId, StateId)> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert((a.initial, b.initial), 0);
        pairs.push((a.initial, b.initial));
        queue.push_back(0);
        let mut transitions = Vec::new();
        while let Some(id) = queue.pop_front() {
            let (sa, sb) = pairs[id];
            for sym in &symbols {
                let next = (step(&a, sa, sym), step(&b, sb, sym));
                let next_id = *ids.entry(next).or_insert_with(|| {
                    pairs.push(next);
                    queue.push_back(pairs.len() - 1);
                    pairs.len() - 1
                });
                transitions.push((id, Some(sym.clone()), next_id));
            }
        }
        let product = Fsa {
            states: pairs.len(),
            alphabet: a.alphabet.clone(),
            initial: 0,
            accepting: BTreeSet::new(),
            transitions,
        };
        let marked: Vec<(StateId, StateId)> = pairs
            .iter()
            .map(|&(sa, sb)| {
                (
                    a.accepting.contains(&sa) as usize,
                    b.accepting.contains(&sb) as usize,
                )
            })
            .collect();
        Ok((product, marked))
    }

    pub fn intersect(&self, other: &Fsa<S>) -> Result<Fsa<S>, FsaError> {
        let (mut product, marks) = self.product(other)?;
        for (id, &(a, b)) in marks.iter().enumerate() {
            if a == 1 && b == 1 {
                product.accepting.insert(id);
            }
        }
        Ok(product)
    }

    pub fn union(&self, other: &Fsa<S>) -> Result<Fsa<S>, FsaError> {
        let (mut product, marks) = self.product(other)?;
        for (id, &(a, b)) in marks.iter().enumerate() {
            if a == 1 || b == 1 {
                product.accepting.insert(id);
            }
        }
        Ok(product)
    }

    /// Checks `L(sub) ⊆ L(self)`. The counterexample, when inclusion
    /// fails, is a shortest word of `L(sub) \ L(self)`; BFS over the
    /// product in symbol order makes it the lexicographically least one.
    pub fn includes(&self, sub: &Fsa<S>) -> Result<InclusionResult<S>, FsaError> {
        let (product, marks) = self.product(sub)?;
        let bad = |id: StateId| marks[id] == (0, 1);
        let symbols: Vec<S> = product.alphabet.iter().cloned().collect();
        let mut adj: HashMap<StateId, Vec<(S, StateId)>> = HashMap::new();
        for (from, label, to) in &product.transitions {
            adj.entry(*from)
                .or_default()
                .push((label.clone().unwrap(), *to));
        }
        let mut parent: HashMap<StateId, (StateId, S)> = HashMap::new();
        let mut queue = VecDeque::from([product.initial]);
        let mut seen = BTreeSet::from([product.initial]);
        let mut hit = if bad(product.initial) {
            Some(product.initial)
        } else {
            None
        };
        while hit.is_none() {
            let Some(id) = queue.pop_front() else { break };
            for sym in &symbols {
                let Some(edges) = adj.get(&id) else { continue };
                for (label, to) in edges {
                    if label == sym && seen.insert(*to) {
                        parent.insert(*to, (id, sym.clone()));
                        if bad(*to) {
                            hit = Some(*to);
                        }
                        queue.push_back(*to);
                    }
                    if hit.is_some() {
                        break;
                    }
                }
                if hit.is_some() {
                    break;
                }
            }
        }
        match hit {
            None => Ok(InclusionResult {
                holds: true,
                counterexample: None,
            }),
            Some(mut id) => {
                let mut word = Vec::new();
                while let Some((prev, sym)) = parent.get(&id) {
                    word.push(sym.clone());
                    id = *prev;
                }
                word.reverse();
                Ok(InclusionResult {
                    holds: false,
                    counterexample: Some(word),
                })
            }
        }
    }

    /// A shortest accepted word, lexicographically least among those, or
    /// `None` for the empty language. Phrased as an inclusion check
    /// against the empty language so the counterexample policy is shared.
    pub fn shortest_accepted(&self) -> Result<Option<Vec<S>>, FsaError> {
        let empty = Fsa::empty_language(self.alphabet.iter().cloned());
        Ok(empty.includes(self)?.counterexample)
    }

    /// Both-way inclusion.
    pub fn language_equal(&self, other: &Fsa<S>) -> Result<bool, FsaError> {
        Ok(self.includes(other)?.holds && other.includes(self)?.holds)
    }

    pub fn is_empty_language(&self) -> bool {
        let mut seen = BTreeSet::from([self.initial]);
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            if self.accepting.contains(&s) {
                return false;
            }
            for (from, _, to) in &self.transitions {
                if *from == s && seen.insert(*to) {
                    stack.push(*to);
                }
            }
        }
        true
    }

    /// Erasing homomorphism: deletes every symbol failing `keep` from the
    /// language, by relabeling the dropped transitions to epsilon. The
    /// output alphabet is the kept subset.
    pub fn erase(&self, keep: impl Fn(&S) -> bool) -> Fsa<S> {
        let alphabet: BTreeSet<S> = self.alphabet.iter().filter(|s| keep(s)).cloned().collect();
        let transitions = self
            .transitions
            .iter()
            .map(|(from, label, to)| {
                let label = label.clone().filter(|s| keep(s));
                (*from, label, *to)
            })
            .collect();
        Fsa {
            states: self.states,
            alphabet,
            initial: self.initial,
            accepting: self.accepting.clone(),
            transitions,
        }
    }

    /// Relabeling homomorphism: pointwise image of the language under `h`.
    pub fn relabel<T: Symbol>(&self, h: impl Fn(&S) -> T) -> Fsa<T> {
        let alphabet: BTreeSet<T> = self.alphabet.iter().map(&h).collect();
        let transitions = self
            .transitions
            .iter()
            .map(|(from, label, to)| (*from, label.as_ref().map(&h), *to))
            .collect();
        Fsa {
            states: self.states,
            alphabet,
            initial: self.initial,
            accepting: self.accepting.clone(),
            transitions,
        }
    }
}

impl<S: Symbol> WordSet<S> {
    pub fn from_words(words: impl IntoIterator<Item = Vec<S>>, max_len: usize) -> Self {
        WordSet {
            words: words.into_iter().collect(),
            max_len,
        }
    }

    pub fn contains(&self, word: &[S]) -> bool {
        self.words.contains(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_on_x() -> Fsa<char> {
        // two-state loop on symbol x
        let mut a = Fsa::new(2, ['x'], 0);
        a.add_transition(0, 'x', 1);
        a.add_transition(1, 'x', 0);
        a.mark_accepting(0);
        a.mark_accepting(1);
        a
    }

    fn words(a: &Fsa<char>, n: usize) -> BTreeSet<Vec<char>> {
        a.enumerate_words(n).words
    }

    #[test]
    fn enumerate_epsilon_language() {
        let a = Fsa::<char>::epsilon_language(['a']);
        assert_eq!(words(&a, 3), BTreeSet::from([vec![]]));
    }

    #[test]
    fn enumerate_two_state_loop() {
        let a = loop_on_x();
        assert_eq!(
            words(&a, 2),
            BTreeSet::from([vec![], vec!['x'], vec!['x', 'x']])
        );
    }

    #[test]
    fn determinize_preserves_language() {
        let a = loop_on_x();
        let d = a.determinize().unwrap();
        assert_eq!(words(&a, 6), words(&d, 6));
    }

    #[test]
    fn determinize_resolves_epsilon_bypass() {
        // 0 -eps-> 1 -b-> 2, 0 -a-> 2; the bypass word "b" must survive
        let mut a = Fsa::new(3, ['a', 'b'], 0);
        a.add_epsilon(0, 1);
        a.add_transition(1, 'b', 2);
        a.add_transition(0, 'a', 2);
        a.mark_accepting(2);
        let d = a.determinize().unwrap();
        assert!(d.accepts(&['b']));
        assert!(d.accepts(&['a']));
        assert_eq!(words(&a, 6), words(&d, 6));
    }

    #[test]
    fn complement_involution() {
        let mut a = Fsa::new(2, ['a', 'b'], 0);
        a.add_transition(0, 'a', 1);
        a.add_transition(1, 'b', 0);
        a.mark_accepting(1);
        let cc = a.complement().unwrap().complement().unwrap();
        assert_eq!(words(&a, 6), words(&cc, 6));
    }

    #[test]
    fn complement_of_empty_over_empty_alphabet_is_epsilon() {
        let empty = Fsa::<char>::empty_language([]);
        let c = empty.complement().unwrap();
        assert_eq!(words(&c, 3), BTreeSet::from([vec![]]));
    }

    #[test]
    fn intersect_self_is_identity() {
        let a = loop_on_x();
        let i = a.intersect(&a).unwrap();
        assert!(a.language_equal(&i).unwrap());
    }

    #[test]
    fn union_with_empty_is_identity() {
        let a = loop_on_x();
        let empty = Fsa::empty_language(['x']);
        let u = a.union(&empty).unwrap();
        assert!(a.language_equal(&u).unwrap());
    }

    #[test]
    fn alphabet_mismatch_reported() {
        let a = Fsa::<char>::epsilon_language(['a']);
        let b = Fsa::<char>::epsilon_language(['b']);
        assert_eq!(a.intersect(&b).unwrap_err(), FsaError::AlphabetMismatch);
    }

    #[test]
    fn includes_sigma_star_superset() {
        // sup = {a,b}*, sub = {a}*
        let mut sup = Fsa::new(1, ['a', 'b'], 0);
        sup.add_transition(0, 'a', 0);
        sup.add_transition(0, 'b', 0);
        sup.mark_accepting(0);
        let mut sub = Fsa::new(1, ['a', 'b'], 0);
        sub.add_transition(0, 'a', 0);
        sub.mark_accepting(0);
        assert!(sup.includes(&sub).unwrap().holds);
    }

    #[test]
    fn includes_counterexample_is_shortest() {
        // sup accepts {eps, a}; sub accepts {eps, a, aa}
        let mut sup = Fsa::new(2, ['a'], 0);
        sup.add_transition(0, 'a', 1);
        sup.mark_accepting(0);
        sup.mark_accepting(1);
        let mut sub = Fsa::new(3, ['a'], 0);
        sub.add_transition(0, 'a', 1);
        sub.add_transition(1, 'a', 2);
        sub.mark_accepting(0);
        sub.mark_accepting(1);
        sub.mark_accepting(2);
        let r = sup.includes(&sub).unwrap();
        assert!(!r.holds);
        assert_eq!(r.counterexample, Some(vec!['a', 'a']));
    }

    #[test]
    fn includes_agrees_with_intersect_complement() {
        let mut sup = Fsa::new(2, ['a', 'b'], 0);
        sup.add_transition(0, 'a', 1);
        sup.mark_accepting(0);
        sup.mark_accepting(1);
        let mut sub = Fsa::new(2, ['a', 'b'], 0);
        sub.add_transition(0, 'a', 1);
        sub.add_transition(1, 'b', 0);
        sub.mark_accepting(0);
        sub.mark_accepting(1);
        let holds = sup.includes(&sub).unwrap().holds;
        let diff = sup.complement().unwrap().intersect(&sub).unwrap();
        assert_eq!(holds, diff.is_empty_language());
    }

    #[test]
    fn shortest_accepted_prefers_short_then_lex() {
        // accepts {b, ab}; shortest is "b"
        let mut a = Fsa::new(3, ['a', 'b'], 0);
        a.add_transition(0, 'b', 2);
        a.add_transition(0, 'a', 1);
        a.add_transition(1, 'b', 2);
        a.mark_accepting(2);
        assert_eq!(a.shortest_accepted().unwrap(), Some(vec!['b']));
        let empty = Fsa::<char>::empty_language(['a']);
        assert_eq!(empty.shortest_accepted().unwrap(), None);
    }

    #[test]
    fn erase_keep_all_is_identity() {
        let a = loop_on_x();
        let e = a.erase(|_| true);
        assert_eq!(words(&a, 6), words(&e, 6));
    }

    #[test]
    fn erase_drops_symbols() {
        let a = Fsa::single_word(['a', 'b'], &['b', 'a']);
        let e = a.erase(|s| *s == 'b');
        assert_eq!(words(&e, 3), BTreeSet::from([vec!['b']]));
    }

    #[test]
    fn relabel_identity_and_merge() {
        let a = Fsa::single_word(['a', 'b'], &['b', 'a']);
        let id = a.relabel(|s| *s);
        assert_eq!(words(&a, 3), words(&id, 3));
        let merged = a.relabel(|_| 'x');
        assert_eq!(merged.enumerate_words(3).words, BTreeSet::from([vec!['x', 'x']]));
    }
}
