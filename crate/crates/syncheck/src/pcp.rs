//! Post Correspondence Problem instances, their compilation into
//! mailbox networks, and bounded searches on both sides.
//!
//! The compiled network has four participants: I guesses an index
//! sequence and sends it to both word emitters, W and W' emit the
//! letters of the indexed words towards the comparator L, and L accepts
//! only if the two letter streams alternate and match, ending with the
//! send of `ok` that nobody receives. The topology is cyclic, so the
//! tree decider refuses it; behaviour is probed by bounded exploration.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use thiserror::Error;

use crate::network::{Action, FinalMode, Message, Network, NetworkBuilder};
use crate::semantics::{enabled_steps, Bounds, Buffers, Configuration, Execution, Semantics};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PcpError {
    #[error("the alphabet needs at least two symbols")]
    AlphabetTooSmall,
    #[error("the word lists must be nonempty and of equal length")]
    BadWordLists,
    #[error("word {0} is empty")]
    EmptyWord(usize),
    #[error("letter {0} is outside the alphabet")]
    LetterOutsideAlphabet(char),
    #[error("index {0} is out of range")]
    IndexOutOfRange(usize),
}

/// Two equal-length lists of nonempty words over a shared alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcpInstance {
    pub alphabet: BTreeSet<char>,
    pub w: Vec<String>,
    pub w_prime: Vec<String>,
}

impl PcpInstance {
    pub fn new(
        alphabet: impl IntoIterator<Item = char>,
        w: Vec<String>,
        w_prime: Vec<String>,
    ) -> Result<Self, PcpError> {
        let alphabet: BTreeSet<char> = alphabet.into_iter().collect();
        if alphabet.len() < 2 {
            return Err(PcpError::AlphabetTooSmall);
        }
        if w.is_empty() || w.len() != w_prime.len() {
            return Err(PcpError::BadWordLists);
        }
        for (i, word) in w.iter().chain(w_prime.iter()).enumerate() {
            if word.is_empty() {
                return Err(PcpError::EmptyWord(i % w.len() + 1));
            }
            if let Some(c) = word.chars().find(|c| !alphabet.contains(c)) {
                return Err(PcpError::LetterOutsideAlphabet(c));
            }
        }
        Ok(PcpInstance {
            alphabet,
            w,
            w_prime,
        })
    }

    /// Number of word pairs.
    pub fn len(&self) -> usize {
        self.w.len()
    }
}

/// A nonempty index sequence under which both concatenations agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcpSolution {
    pub indices: Vec<usize>,
}

/// Checks whether the 1-based index sequence solves the instance.
pub fn check_solution(inst: &PcpInstance, indices: &[usize]) -> Result<bool, PcpError> {
    if indices.is_empty() {
        return Err(PcpError::BadWordLists);
    }
    let mut top = String::new();
    let mut bottom = String::new();
    for &i in indices {
        if i == 0 || i > inst.len() {
            return Err(PcpError::IndexOutOfRange(i));
        }
        top.push_str(&inst.w[i - 1]);
        bottom.push_str(&inst.w_prime[i - 1]);
    }
    Ok(top == bottom)
}

fn msg(payload: &str, from: &str, to: &str) -> Message {
    Message::new(payload, from, to)
}

/// The word-emitter automaton (W or W'): receives an index, emits the
/// letters of the indexed word one by one, and after the `$` marker
/// announces `end` to the comparator.
fn emitter(b: &mut NetworkBuilder, name: &str, words: &[String]) {
    let mut ts: Vec<(String, Action, String)> = Vec::new();
    for (idx0, word) in words.iter().enumerate() {
        let i = idx0 + 1;
        let index_msg = msg(&i.to_string(), "I", name);
        let chain = |j: usize| format!("q{i},{j}");
        ts.push(("q0".into(), Action::receive(index_msg.clone()), chain(0)));
        ts.push(("qf".into(), Action::receive(index_msg), chain(0)));
        let letters: Vec<char> = word.chars().collect();
        for (j, &letter) in letters.iter().enumerate() {
            let target = if j == letters.len() - 1 {
                "qf".to_string()
            } else {
                chain(j + 1)
            };
            let letter_msg = msg(&letter.to_string(), name, "L");
            ts.push((chain(j), Action::send(letter_msg), target));
        }
    }
    ts.push(("qf".into(), Action::receive(msg("$", "I", name)), "q$".into()));
    ts.push(("q$".into(), Action::send(msg("end", name, "L")), "qe".into()));
    let refs: Vec<(&str, Action, &str)> = ts
        .iter()
        .map(|(f, a, t)| (f.as_str(), a.clone(), t.as_str()))
        .collect();
    b.automaton(name, "q0", &refs, &["qe"]);
}

/// The comparator automaton L: letters from W and W' must alternate and
/// agree; any deviation falls into the absorbing error state `q*`, from
/// which the accepting `qok` is unreachable.
fn comparator(b: &mut NetworkBuilder, alphabet: &BTreeSet<char>) {
    let mut ts: Vec<(String, Action, String)> = Vec::new();
    let state = |a: char| format!("q{a}");
    let recv = |payload: &str, from: &str| Action::receive(msg(payload, from, "L"));
    let mut extended: Vec<String> = alphabet.iter().map(|a| a.to_string()).collect();
    extended.push("end".into());
    for &a in alphabet {
        ts.push(("q0".into(), recv(&a.to_string(), "W"), state(a)));
        ts.push((state(a), recv(&a.to_string(), "W'"), "q0".into()));
        for b_ in &extended {
            if *b_ != a.to_string() {
                ts.push((state(a), recv(b_, "W'"), "q*".into()));
            }
            ts.push((state(a), recv(b_, "W"), "q*".into()));
        }
        ts.push(("qe".into(), recv(&a.to_string(), "W"), "q*".into()));
        ts.push(("qe".into(), recv(&a.to_string(), "W'"), "q*".into()));
    }
    for a in &extended {
        ts.push(("q0".into(), recv(a, "W'"), "q*".into()));
        ts.push(("q*".into(), recv(a, "W"), "q*".into()));
        ts.push(("q*".into(), recv(a, "W'"), "q*".into()));
    }
    ts.push(("q0".into(), recv("end", "W"), "qe".into()));
    ts.push(("qe".into(), recv("end", "W'"), "qe'".into()));
    ts.push(("qe'".into(), Action::send(msg("ok", "L", "I")), "qok".into()));
    let refs: Vec<(&str, Action, &str)> = ts
        .iter()
        .map(|(f, a, t)| (f.as_str(), a.clone(), t.as_str()))
        .collect();
    b.automaton("L", "q0", &refs, &["qok"]);
}

/// Compiles the instance into its four-participant mailbox network, with
/// declared final states (index guesser done, both emitters done,
/// comparator satisfied).
pub fn encode(inst: &PcpInstance) -> Network {
    let mut b = NetworkBuilder::new(FinalMode::DeclaredFinals);
    // index guesser I
    let mut ts: Vec<(String, Action, String)> = Vec::new();
    for i in 1..=inst.len() {
        let qi = format!("q{i}");
        ts.push(("q0".into(), Action::send(msg(&i.to_string(), "I", "W")), qi.clone()));
        ts.push((qi, Action::send(msg(&i.to_string(), "I", "W'")), "q0".into()));
    }
    ts.push(("q0".into(), Action::send(msg("$", "I", "W")), "q$".into()));
    ts.push(("q$".into(), Action::send(msg("$", "I", "W'")), "q$'".into()));
    let refs: Vec<(&str, Action, &str)> = ts
        .iter()
        .map(|(f, a, t)| (f.as_str(), a.clone(), t.as_str()))
        .collect();
    b.automaton("I", "q0", &refs, &["q$'"]);
    emitter(&mut b, "W", &inst.w);
    emitter(&mut b, "W'", &inst.w_prime);
    comparator(&mut b, &inst.alphabet);
    b.build()
}

/// True when every participant can still reach a final state given its
/// current state and the receives its mailbox already forces on it. A
/// participant must consume its mailbox prefix in order to progress, so
/// a queue that drives it into a dead region dooms the configuration.
fn viable(n: &Network, c: &Configuration) -> bool {
    if n.final_mode == FinalMode::AllStatesFinal {
        return true;
    }
    let Buffers::Mailbox(bufs) = &c.buffers else {
        panic!("viability check is for mailbox configurations");
    };
    for (i, p) in n.participants.iter().enumerate() {
        let aut = &n.automata[p];
        let queue: Vec<&Message> = bufs[i].iter().collect();
        // reachable (state, consumed-prefix) pairs; once the known queue
        // is exhausted, future arrivals are unconstrained
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut stack = vec![(c.locals[i], 0usize)];
        seen.insert((c.locals[i], 0));
        let mut ok = false;
        while let Some((s, pos)) = stack.pop() {
            if aut.finals.contains(&s) {
                ok = true;
                break;
            }
            for (from, act, to) in &aut.transitions {
                if *from != s {
                    continue;
                }
                let next = match act.direction {
                    crate::network::Direction::Send => Some((*to, pos)),
                    crate::network::Direction::Receive => {
                        if pos < queue.len() {
                            (*queue[pos] == act.message).then_some((*to, pos + 1))
                        } else {
                            Some((*to, pos))
                        }
                    }
                };
                if let Some(nx) = next {
                    if seen.insert(nx) {
                        stack.push(nx);
                    }
                }
            }
        }
        if !ok {
            return false;
        }
    }
    true
}

/// Bounded mailbox search for an accepting execution. Best-first over
/// configurations: the priority is the send count plus the number of
/// buffered messages, so runs that keep draining their mailboxes are
/// preferred over runs that hoard guesses. Configurations from which
/// some participant can no longer accept are pruned, which keeps the
/// search away from the comparator's error sink. The search is
/// exhaustive within the bounds up to these sound prunings; absence
/// within bounds proves nothing.
pub fn search_accepting_trace(n: &Network, bounds: Bounds) -> Option<Execution> {
    let initial = Configuration::initial(n, Semantics::Mailbox);
    let buffered = |c: &Configuration| -> usize {
        match &c.buffers {
            Buffers::Mailbox(bufs) => bufs.iter().map(|b| b.len()).sum(),
            _ => 0,
        }
    };
    let mut arena: Vec<Configuration> = vec![initial.clone()];
    let mut ids: HashMap<Configuration, usize> = HashMap::from([(initial.clone(), 0)]);
    let mut dist: Vec<usize> = vec![0];
    let mut parent: HashMap<usize, (usize, Action)> = HashMap::new();
    // (priority, sends, id) — min-heap via Reverse
    let mut heap: BinaryHeap<Reverse<(usize, usize, usize)>> = BinaryHeap::new();
    heap.push(Reverse((buffered(&initial), 0, 0)));
    while let Some(Reverse((_, d, id))) = heap.pop() {
        if dist[id] != d {
            continue; // superseded by a cheaper path
        }
        let c = arena[id].clone();
        if c.is_accepting(n) {
            let mut steps = Vec::new();
            let mut cur = id;
            while let Some((prev, act)) = parent.get(&cur) {
                steps.push(act.clone());
                cur = *prev;
            }
            steps.reverse();
            return Some(Execution {
                steps,
                final_config: c,
            });
        }
        let (succ, _) = enabled_steps(n, Semantics::Mailbox, &c, Some(bounds.buffer_bound));
        for (act, next) in succ {
            let cost = usize::from(act.is_send());
            if d + cost > bounds.max_trace_len || !viable(n, &next) {
                continue;
            }
            let next_id = match ids.get(&next) {
                Some(&i) => {
                    if d + cost >= dist[i] {
                        continue;
                    }
                    i
                }
                None => {
                    let i = arena.len();
                    arena.push(next.clone());
                    dist.push(usize::MAX);
                    ids.insert(next.clone(), i);
                    i
                }
            };
            dist[next_id] = d + cost;
            parent.insert(next_id, (id, act));
            let priority = d + cost + buffered(&next);
            heap.push(Reverse((priority, d + cost, next_id)));
        }
    }
    None
}

/// The index sequence guessed along an execution: I's non-marker sends
/// towards W, in order.
pub fn indices_of_execution(e: &Execution) -> Vec<usize> {
    e.steps
        .iter()
        .filter(|a| {
            a.is_send() && a.message.from == "I" && a.message.to == "W" && a.message.payload != "$"
        })
        .map(|a| a.message.payload.parse().expect("index payload"))
        .collect()
}

/// Exhaustive search over index sequences of length at most `max_m`,
/// shortest solution first (ties broken by least index sequence).
/// Branches where neither concatenation is a prefix of the other are
/// discarded — no extension can reconcile them.
pub fn brute_solve(inst: &PcpInstance, max_m: usize) -> Option<PcpSolution> {
    let n = inst.len();
    let mut frontier: Vec<(Vec<usize>, String, String)> =
        vec![(Vec::new(), String::new(), String::new())];
    for _ in 0..max_m {
        let mut next_frontier = Vec::new();
        for (seq, top, bottom) in &frontier {
            for i in 1..=n {
                let mut top = top.clone();
                let mut bottom = bottom.clone();
                top.push_str(&inst.w[i - 1]);
                bottom.push_str(&inst.w_prime[i - 1]);
                if !top.starts_with(&bottom) && !bottom.starts_with(&top) {
                    continue;
                }
                let mut seq = seq.clone();
                seq.push(i);
                if top == bottom {
                    return Some(PcpSolution { indices: seq });
                }
                next_frontier.push((seq, top, bottom));
            }
        }
        frontier = next_frontier;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NotTree;
    use crate::semantics::{explore, Bounds};

    pub fn worked() -> PcpInstance {
        PcpInstance::new(
            ['a', 'b'],
            vec!["a".into(), "b".into(), "abab".into()],
            vec!["ba".into(), "baa".into(), "b".into()],
        )
        .unwrap()
    }

    fn unsolvable() -> PcpInstance {
        PcpInstance::new(['a', 'b'], vec!["a".into()], vec!["b".into()]).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert_eq!(
            PcpInstance::new(['a'], vec!["a".into()], vec!["a".into()]).unwrap_err(),
            PcpError::AlphabetTooSmall
        );
        assert_eq!(
            PcpInstance::new(['a', 'b'], vec!["a".into()], vec![]).unwrap_err(),
            PcpError::BadWordLists
        );
        assert_eq!(
            PcpInstance::new(['a', 'b'], vec!["".into()], vec!["a".into()]).unwrap_err(),
            PcpError::EmptyWord(1)
        );
        assert_eq!(
            PcpInstance::new(['a', 'b'], vec!["c".into()], vec!["a".into()]).unwrap_err(),
            PcpError::LetterOutsideAlphabet('c')
        );
    }

    #[test]
    fn check_solution_examples() {
        let inst = worked();
        assert!(check_solution(&inst, &[2, 1, 3]).unwrap());
        assert!(!check_solution(&inst, &[1]).unwrap());
        assert_eq!(
            check_solution(&inst, &[4]).unwrap_err(),
            PcpError::IndexOutOfRange(4)
        );
        let same = PcpInstance::new(['a', 'b'], vec!["ab".into()], vec!["ab".into()]).unwrap();
        assert!(check_solution(&same, &[1]).unwrap());
    }

    #[test]
    fn encoding_validates_and_is_cyclic() {
        let n = encode(&worked());
        assert!(n.validate().is_empty());
        assert!(matches!(
            n.topology().classify(),
            Err(NotTree::Cycle { .. })
        ));
    }

    #[test]
    fn encoding_has_the_expected_chains() {
        let n = encode(&worked());
        let w = &n.automata["W"];
        for s in ["q3,0", "q3,1", "q3,2", "q3,3"] {
            assert!(w.state_index(s).is_some(), "missing state {s}");
        }
        assert!(w.state_index("q3,4").is_none());
        let l = &n.automata["L"];
        let q0 = l.state_index("q0").unwrap();
        let qa = l.state_index("qa").unwrap();
        let has = |from, act: Action, to| {
            l.transitions.iter().any(|t| *t == (from, act.clone(), to))
        };
        assert!(has(q0, Action::receive(msg("a", "W", "L")), qa));
        assert!(has(qa, Action::receive(msg("a", "W'", "L")), q0));
    }

    #[test]
    fn smallest_encoding_collapses_chains() {
        let inst =
            PcpInstance::new(['a', 'b'], vec!["a".into()], vec!["a".into()]).unwrap();
        let n = encode(&inst);
        assert!(n.validate().is_empty());
        let w = &n.automata["W"];
        assert!(w.state_index("q1,0").is_some());
        assert!(w.state_index("q1,1").is_none());
    }

    #[test]
    fn synchronous_exploration_finds_nothing() {
        let n = encode(&worked());
        let r = explore(&n, Semantics::Sync, Bounds::new(10_000, 0));
        assert!(r.complete);
        assert!(r.visited < 10_000);
        assert!(r.executions.is_empty());
    }

    #[test]
    fn search_recovers_the_known_solution() {
        let n = encode(&worked());
        let e = search_accepting_trace(&n, Bounds::new(40, 12)).expect("accepting execution");
        let trace = e.trace();
        assert_eq!(
            trace.last(),
            Some(&Action::send(msg("ok", "L", "I")))
        );
        assert_eq!(indices_of_execution(&e), vec![2, 1, 3]);
        assert!(check_solution(&worked(), &indices_of_execution(&e)).unwrap());
    }

    #[test]
    fn unsolvable_instance_yields_nothing() {
        let inst = unsolvable();
        assert_eq!(brute_solve(&inst, 6), None);
        let n = encode(&inst);
        assert_eq!(search_accepting_trace(&n, Bounds::new(30, 10)), None);
    }

    #[test]
    fn brute_solver_examples() {
        assert_eq!(brute_solve(&worked(), 3).unwrap().indices, vec![2, 1, 3]);
        let trivial =
            PcpInstance::new(['a', 'b'], vec!["ab".into()], vec!["ab".into()]).unwrap();
        assert_eq!(brute_solve(&trivial, 1).unwrap().indices, vec![1]);
    }

    #[test]
    fn search_agrees_with_brute_on_small_instances() {
        let candidates = [
            PcpInstance::new(['a', 'b'], vec!["ab".into(), "b".into()], vec!["a".into(), "bb".into()])
                .unwrap(),
            PcpInstance::new(['a', 'b'], vec!["ab".into(), "a".into()], vec!["b".into(), "aa".into()])
                .unwrap(),
            unsolvable(),
        ];
        for inst in candidates {
            let solved = brute_solve(&inst, 4);
            let n = encode(&inst);
            let letters: usize = inst.w.iter().chain(inst.w_prime.iter()).map(|w| w.len()).sum();
            let bound = 2 * 4 + 2 + 2 * letters + 3;
            let found = search_accepting_trace(&n, Bounds::new(bound, bound));
            assert_eq!(solved.is_some(), found.is_some(), "instance {inst:?}");
            if let Some(e) = found {
                assert!(check_solution(&inst, &indices_of_execution(&e)).unwrap());
            }
        }
    }
}
