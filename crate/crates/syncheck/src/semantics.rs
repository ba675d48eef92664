//! Executable transition relations for the synchronous, peer-to-peer,
//! and mailbox semantics, plus bounded exploration oracles over them.
//!
//! Conventions: synchronous steps are labeled by the send action, so the
//! trace of an execution is a pure filter on send labels. Accepting
//! configurations do not require empty buffers. Exploration bounds are a
//! maximum trace length (number of sends along a path) and a per-buffer
//! capacity; receives are never bounded because they only drain buffers.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::network::{Action, Direction, FinalMode, Message, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Semantics {
    Sync,
    P2p,
    Mailbox,
}

impl Semantics {
    pub fn name(&self) -> &'static str {
        match self {
            Semantics::Sync => "sync",
            Semantics::P2p => "p2p",
            Semantics::Mailbox => "mailbox",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("sender {0} has no matching send transition")]
    NoMatchingSend(String),
    #[error("receiver {0} has no matching receive transition")]
    NoMatchingReceive(String),
    #[error("participant {0} has no such transition from its current state")]
    NoTransition(String),
    #[error("buffer for {0} is empty or its head does not match")]
    EmptyOrMismatchedBufferHead(String),
    #[error("mailbox head of {receiver} is {head:?}, not the requested {wanted}")]
    MailboxHeadMismatch {
        receiver: String,
        head: Option<Message>,
        wanted: Message,
    },
    #[error("operation requires all-states-final mode")]
    WrongFinalMode,
    #[error("unknown participant {0}")]
    UnknownParticipant(String),
}

/// Buffer family of a configuration; the variant matches the semantics
/// in force.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Buffers {
    Sync,
    /// One FIFO queue per ordered pair, indexed `from * n + to`.
    P2p(Vec<VecDeque<Message>>),
    /// One FIFO mailbox per receiver; entries keep their sender.
    Mailbox(Vec<VecDeque<Message>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    /// One local state index per participant, in network participant order.
    pub locals: Vec<usize>,
    pub buffers: Buffers,
}

impl Configuration {
    pub fn initial(n: &Network, sem: Semantics) -> Self {
        let locals = n
            .participants
            .iter()
            .map(|p| n.automata[p].initial)
            .collect();
        let count = n.participants.len();
        let buffers = match sem {
            Semantics::Sync => Buffers::Sync,
            Semantics::P2p => Buffers::P2p(vec![VecDeque::new(); count * count]),
            Semantics::Mailbox => Buffers::Mailbox(vec![VecDeque::new(); count]),
        };
        Configuration { locals, buffers }
    }

    pub fn is_accepting(&self, n: &Network) -> bool {
        match n.final_mode {
            FinalMode::AllStatesFinal => true,
            FinalMode::DeclaredFinals => n.participants.iter().enumerate().all(|(i, p)| {
                n.automata[p].finals.contains(&self.locals[i])
            }),
        }
    }

    fn largest_buffer(&self) -> usize {
        match &self.buffers {
            Buffers::Sync => 0,
            Buffers::P2p(bufs) | Buffers::Mailbox(bufs) => {
                bufs.iter().map(|b| b.len()).max().unwrap_or(0)
            }
        }
    }
}

/// An action sequence from the initial configuration to `final_config`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub steps: Vec<Action>,
    pub final_config: Configuration,
}

impl Execution {
    /// Projection on send actions (the trace of the execution).
    pub fn trace(&self) -> Vec<Action> {
        self.steps.iter().filter(|a| a.is_send()).cloned().collect()
    }
}

/// Exploration bounds: `max_trace_len` caps the number of sends along a
/// path, `buffer_bound` caps every buffer. `buffer_bound` is ignored for
/// the synchronous semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub max_trace_len: usize,
    pub buffer_bound: usize,
}

impl Bounds {
    pub fn new(max_trace_len: usize, buffer_bound: usize) -> Self {
        Bounds {
            max_trace_len,
            buffer_bound,
        }
    }
}

fn local_of<'a>(n: &'a Network, p: &str) -> &'a crate::network::CommunicatingAutomaton {
    &n.automata[p]
}

/// One synchronous step on message `m`: the send and the matching
/// reception happen as a single transition labeled by the send.
pub fn step_sync(n: &Network, c: &Configuration, m: &Message) -> Result<Configuration, StepError> {
    let pi = n
        .participant_index(&m.from)
        .ok_or_else(|| StepError::UnknownParticipant(m.from.clone()))?;
    let qi = n
        .participant_index(&m.to)
        .ok_or_else(|| StepError::UnknownParticipant(m.to.clone()))?;
    let sender = local_of(n, &m.from);
    let receiver = local_of(n, &m.to);
    let send = Action::send(m.clone());
    let recv = Action::receive(m.clone());
    let s_next = sender
        .enabled(c.locals[pi])
        .find(|(_, a, _)| *a == send)
        .map(|(_, _, to)| *to)
        .ok_or_else(|| StepError::NoMatchingSend(m.from.clone()))?;
    let r_next = receiver
        .enabled(c.locals[qi])
        .find(|(_, a, _)| *a == recv)
        .map(|(_, _, to)| *to)
        .ok_or_else(|| StepError::NoMatchingReceive(m.to.clone()))?;
    let mut next = c.clone();
    next.locals[pi] = s_next;
    next.locals[qi] = r_next;
    Ok(next)
}

/// One peer-to-peer step: a send appends to the (sender, receiver)
/// queue, a reception pops its head.
pub fn step_p2p(n: &Network, c: &Configuration, act: &Action) -> Result<Configuration, StepError> {
    let count = n.participants.len();
    let Buffers::P2p(bufs) = &c.buffers else {
        panic!("p2p step on non-p2p configuration");
    };
    let actor = act.actor().to_string();
    let ai = n
        .participant_index(&actor)
        .ok_or_else(|| StepError::UnknownParticipant(actor.clone()))?;
    let aut = local_of(n, &actor);
    let next_state = aut
        .enabled(c.locals[ai])
        .find(|(_, a, _)| a == act)
        .map(|(_, _, to)| *to)
        .ok_or_else(|| StepError::NoTransition(actor.clone()))?;
    let from_i = n.participant_index(&act.message.from).unwrap();
    let to_i = n.participant_index(&act.message.to).unwrap();
    let slot = from_i * count + to_i;
    let mut bufs = bufs.clone();
    match act.direction {
        Direction::Send => bufs[slot].push_back(act.message.clone()),
        Direction::Receive => match bufs[slot].front() {
            Some(head) if *head == act.message => {
                bufs[slot].pop_front();
            }
            _ => return Err(StepError::EmptyOrMismatchedBufferHead(actor)),
        },
    }
    let mut locals = c.locals.clone();
    locals[ai] = next_state;
    Ok(Configuration {
        locals,
        buffers: Buffers::P2p(bufs),
    })
}

/// One mailbox step: a send appends to the receiver's single mailbox, a
/// reception pops the mailbox head, which must match payload and sender.
pub fn step_mailbox(
    n: &Network,
    c: &Configuration,
    act: &Action,
) -> Result<Configuration, StepError> {
    let Buffers::Mailbox(bufs) = &c.buffers else {
        panic!("mailbox step on non-mailbox configuration");
    };
    let actor = act.actor().to_string();
    let ai = n
        .participant_index(&actor)
        .ok_or_else(|| StepError::UnknownParticipant(actor.clone()))?;
    let aut = local_of(n, &actor);
    let next_state = aut
        .enabled(c.locals[ai])
        .find(|(_, a, _)| a == act)
        .map(|(_, _, to)| *to)
        .ok_or_else(|| StepError::NoTransition(actor.clone()))?;
    let mut bufs = bufs.clone();
    match act.direction {
        Direction::Send => {
            let to_i = n.participant_index(&act.message.to).unwrap();
            bufs[to_i].push_back(act.message.clone());
        }
        Direction::Receive => {
            let head = bufs[ai].front();
            match head {
                Some(h) if *h == act.message => {
                    bufs[ai].pop_front();
                }
                other => {
                    return Err(StepError::MailboxHeadMismatch {
                        receiver: actor,
                        head: other.cloned(),
                        wanted: act.message.clone(),
                    })
                }
            }
        }
    }
    let mut locals = c.locals.clone();
    locals[ai] = next_state;
    Ok(Configuration {
        locals,
        buffers: Buffers::Mailbox(bufs),
    })
}

/// Successor configurations of `c` under `sem`, paired with their step
/// labels, in the global action order. `buffer_bound` of `None` means
/// unbounded; a bounded send that would overflow is omitted and reported
/// through the second return component.
pub fn enabled_steps(
    n: &Network,
    sem: Semantics,
    c: &Configuration,
    buffer_bound: Option<usize>,
) -> (Vec<(Action, Configuration)>, bool) {
    let mut out = Vec::new();
    let mut pruned = false;
    match sem {
        Semantics::Sync => {
            for m in &n.messages {
                if let Ok(next) = step_sync(n, c, m) {
                    out.push((Action::send(m.clone()), next));
                }
            }
        }
        Semantics::P2p | Semantics::Mailbox => {
            let step = match sem {
                Semantics::P2p => step_p2p,
                _ => step_mailbox,
            };
            for (i, p) in n.participants.iter().enumerate() {
                let aut = &n.automata[p];
                for (_, act, _) in aut.enabled(c.locals[i]) {
                    match step(n, c, act) {
                        Ok(next) => {
                            if act.is_send() {
                                if let Some(b) = buffer_bound {
                                    if next.largest_buffer() > b {
                                        pruned = true;
                                        continue;
                                    }
                                }
                            }
                            out.push((act.clone(), next));
                        }
                        Err(_) => {}
                    }
                }
            }
        }
    }
    out.sort_by(|(a, _), (b, _)| a.cmp(b));
    out.dedup();
    (out, pruned)
}

#[derive(Debug, Clone)]
pub struct ExploreResult {
    /// One shortest witness execution per reachable accepting
    /// configuration.
    pub executions: Vec<Execution>,
    /// True iff no transition was pruned by either bound, in which case
    /// the reachable configuration space was covered exhaustively.
    pub complete: bool,
    pub visited: usize,
}

/// Dijkstra-style search over configurations with cost = number of
/// sends. Each configuration is expanded once at its minimal trace
/// length; send edges beyond `max_trace_len` or overflowing a buffer are
/// pruned and clear the `complete` flag.
pub fn explore(n: &Network, sem: Semantics, bounds: Bounds) -> ExploreResult {
    let initial = Configuration::initial(n, sem);
    let buffer_bound = match sem {
        Semantics::Sync => None,
        _ => Some(bounds.buffer_bound),
    };
    let mut dist: HashMap<Configuration, usize> = HashMap::new();
    let mut parent: HashMap<Configuration, (Configuration, Action)> = HashMap::new();
    // 0-1 BFS: receives cost 0, sends cost 1
    let mut queue: VecDeque<Configuration> = VecDeque::new();
    dist.insert(initial.clone(), 0);
    queue.push_back(initial.clone());
    let mut complete = true;
    while let Some(c) = queue.pop_front() {
        let d = dist[&c];
        let (steps, pruned) = enabled_steps(n, sem, &c, buffer_bound);
        if pruned {
            complete = false;
        }
        for (act, next) in steps {
            let cost = if act.is_send() { 1 } else { 0 };
            if d + cost > bounds.max_trace_len {
                if !dist.contains_key(&next) {
                    complete = false;
                }
                continue;
            }
            let better = match dist.get(&next) {
                Some(&old) => d + cost < old,
                None => true,
            };
            if better {
                dist.insert(next.clone(), d + cost);
                parent.insert(next.clone(), (c.clone(), act.clone()));
                if cost == 0 {
                    queue.push_front(next);
                } else {
                    queue.push_back(next);
                }
            }
        }
    }
    let mut executions = Vec::new();
    for c in dist.keys() {
        if c.is_accepting(n) {
            let mut steps = Vec::new();
            let mut cur = c.clone();
            while let Some((prev, act)) = parent.get(&cur) {
                steps.push(act.clone());
                cur = prev.clone();
            }
            steps.reverse();
            executions.push(Execution {
                steps,
                final_config: c.clone(),
            });
        }
    }
    executions.sort_by(|a, b| a.steps.cmp(&b.steps));
    ExploreResult {
        executions,
        complete,
        visited: dist.len(),
    }
}

/// A trace set together with the bounds under which it is exhaustive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSet {
    pub traces: HashSet<Vec<Action>>,
    pub max_trace_len: usize,
    pub buffer_bound: usize,
    /// False iff some send was pruned by the buffer bound, i.e. the set
    /// may miss traces even below `max_trace_len`.
    pub complete: bool,
}

impl TraceSet {
    pub fn sorted(&self) -> Vec<Vec<Action>> {
        let mut out: Vec<Vec<Action>> = self.traces.iter().cloned().collect();
        out.sort();
        out
    }
}

/// The set of traces of bounded executions: BFS over (configuration,
/// trace) pairs, recording the trace at every accepting configuration.
pub fn traces(n: &Network, sem: Semantics, bounds: Bounds) -> TraceSet {
    let initial = Configuration::initial(n, sem);
    let buffer_bound = match sem {
        Semantics::Sync => None,
        _ => Some(bounds.buffer_bound),
    };
    let mut set: HashSet<Vec<Action>> = HashSet::new();
    let mut seen: HashSet<(Configuration, Vec<Action>)> = HashSet::new();
    let mut queue: VecDeque<(Configuration, Vec<Action>)> = VecDeque::new();
    seen.insert((initial.clone(), Vec::new()));
    queue.push_back((initial, Vec::new()));
    let mut complete = true;
    while let Some((c, trace)) = queue.pop_front() {
        if c.is_accepting(n) {
            set.insert(trace.clone());
        }
        let (steps, pruned) = enabled_steps(n, sem, &c, buffer_bound);
        if pruned {
            complete = false;
        }
        for (act, next) in steps {
            let mut t = trace.clone();
            if act.is_send() {
                if t.len() == bounds.max_trace_len {
                    continue;
                }
                t.push(act.clone());
            }
            let key = (next.clone(), t.clone());
            if seen.insert(key) {
                queue.push_back((next, t));
            }
        }
    }
    TraceSet {
        traces: set,
        max_trace_len: bounds.max_trace_len,
        buffer_bound: bounds.buffer_bound,
        complete,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessSide {
    Asynchronous,
    Synchronous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceComparison {
    pub equal_up_to_bounds: bool,
    pub witness: Option<Vec<Action>>,
    pub side: Option<WitnessSide>,
    pub complete: bool,
}

/// Picks a deterministic witness from a set of differing traces: among
/// the prefix-maximal ones (no proper extension in the set), the
/// shortest, then lexicographically least by the global action order.
/// Taking maximal traces keeps the reported difference at the point the
/// two systems have genuinely diverged rather than at the first
/// asynchronous head start.
fn select_witness(diff: &HashSet<Vec<Action>>) -> Option<Vec<Action>> {
    let maximal: Vec<&Vec<Action>> = diff
        .iter()
        .filter(|t| {
            !diff
                .iter()
                .any(|u| u.len() > t.len() && u.starts_with(t.as_slice()))
        })
        .collect();
    maximal
        .into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)))
        .cloned()
}

/// Compares the synchronous trace set with the trace set of `async_sem`
/// under the given bounds. Only meaningful in all-states-final mode,
/// where trace sets are prefix-closed.
pub fn bounded_trace_equality(
    n: &Network,
    async_sem: Semantics,
    bounds: Bounds,
) -> Result<TraceComparison, StepError> {
    if n.final_mode != FinalMode::AllStatesFinal {
        return Err(StepError::WrongFinalMode);
    }
    assert!(async_sem != Semantics::Sync, "compare against an asynchronous semantics");
    let sync = traces(n, Semantics::Sync, bounds);
    let asynchronous = traces(n, async_sem, bounds);
    let mut diff: HashSet<Vec<Action>> = asynchronous
        .traces
        .difference(&sync.traces)
        .cloned()
        .collect();
    let mut side = WitnessSide::Asynchronous;
    if diff.is_empty() {
        diff = sync
            .traces
            .difference(&asynchronous.traces)
            .cloned()
            .collect();
        side = WitnessSide::Synchronous;
    }
    let witness = select_witness(&diff);
    Ok(TraceComparison {
        equal_up_to_bounds: witness.is_none(),
        side: witness.as_ref().map(|_| side),
        witness,
        complete: sync.complete && asynchronous.complete,
    })
}

/// Replays an action sequence from the initial configuration, failing on
/// the first inapplicable step.
pub fn replay(
    n: &Network,
    sem: Semantics,
    steps: &[Action],
) -> Result<Execution, (usize, StepError)> {
    let mut c = Configuration::initial(n, sem);
    for (i, act) in steps.iter().enumerate() {
        c = match sem {
            Semantics::Sync => {
                assert!(act.is_send(), "synchronous steps are labeled by sends");
                step_sync(n, &c, &act.message).map_err(|e| (i, e))?
            }
            Semantics::P2p => step_p2p(n, &c, act).map_err(|e| (i, e))?,
            Semantics::Mailbox => step_mailbox(n, &c, act).map_err(|e| (i, e))?,
        };
    }
    Ok(Execution {
        steps: steps.to_vec(),
        final_config: c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{fig_a, fig_b};
    use crate::network::Message;

    fn act(sign: char, payload: &str, from: &str, to: &str) -> Action {
        let m = Message::new(payload, from, to);
        if sign == '!' {
            Action::send(m)
        } else {
            Action::receive(m)
        }
    }

    #[test]
    fn sync_step_advances_both_sides() {
        let n = fig_a();
        let c0 = Configuration::initial(&n, Semantics::Sync);
        let c1 = step_sync(&n, &c0, &Message::new("b", "q", "p")).unwrap();
        // participants sorted by insertion order: r, q, p
        let qi = n.participant_index("q").unwrap();
        let pi = n.participant_index("p").unwrap();
        let ri = n.participant_index("r").unwrap();
        assert_ne!(c1.locals[qi], c0.locals[qi]);
        assert_ne!(c1.locals[pi], c0.locals[pi]);
        assert_eq!(c1.locals[ri], c0.locals[ri]);
    }

    #[test]
    fn sync_step_blocked_receive() {
        let n = fig_a();
        let c0 = Configuration::initial(&n, Semantics::Sync);
        // ?a is initially not available in A_q
        let err = step_sync(&n, &c0, &Message::new("a", "r", "q")).unwrap_err();
        assert_eq!(err, StepError::NoMatchingReceive("q".to_string()));
    }

    #[test]
    fn sync_step_blocked_send() {
        let n = fig_a();
        let c0 = Configuration::initial(&n, Semantics::Sync);
        let c1 = step_sync(&n, &c0, &Message::new("b", "q", "p")).unwrap();
        // q moved past its send; the send is no longer available
        let err = step_sync(&n, &c1, &Message::new("b", "q", "p")).unwrap_err();
        assert_eq!(err, StepError::NoMatchingSend("q".to_string()));
    }

    #[test]
    fn p2p_fifo_order_is_forced() {
        let n = fig_a();
        let mut c = Configuration::initial(&n, Semantics::P2p);
        for a in [
            act('!', "a", "r", "q"),
            act('!', "b", "q", "p"),
            act('?', "a", "r", "q"),
            act('?', "b", "q", "p"),
        ] {
            c = step_p2p(&n, &c, &a).unwrap();
        }
    }

    #[test]
    fn p2p_receive_from_empty_buffer_fails() {
        let n = fig_a();
        let c = Configuration::initial(&n, Semantics::P2p);
        // force q past its send first so the receive transition exists
        let c = step_p2p(&n, &c, &act('!', "b", "q", "p")).unwrap();
        let err = step_p2p(&n, &c, &act('?', "a", "r", "q")).unwrap_err();
        assert_eq!(err, StepError::EmptyOrMismatchedBufferHead("q".to_string()));
    }

    #[test]
    fn mailbox_execution_from_the_example() {
        // !a !b ?a ?b is a valid mailbox execution with trace !a !b
        let n = fig_a();
        let steps = [
            act('!', "a", "r", "q"),
            act('!', "b", "q", "p"),
            act('?', "a", "r", "q"),
            act('?', "b", "q", "p"),
        ];
        let e = replay(&n, Semantics::Mailbox, &steps).unwrap();
        assert_eq!(
            e.trace(),
            vec![act('!', "a", "r", "q"), act('!', "b", "q", "p")]
        );
    }

    #[test]
    fn mailbox_head_mismatch_reports_head() {
        let n = fig_b();
        let mut c = Configuration::initial(&n, Semantics::Mailbox);
        // p's mailbox receives b then c; receiving c first must fail
        c = step_mailbox(&n, &c, &act('!', "b", "q", "p")).unwrap();
        c = step_mailbox(&n, &c, &act('!', "c", "q", "p")).unwrap();
        let err = step_mailbox(&n, &c, &act('?', "c", "q", "p")).unwrap_err();
        match err {
            StepError::MailboxHeadMismatch { head, .. } => {
                assert_eq!(head, Some(Message::new("b", "q", "p")));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sync_trace_set_fig_a() {
        let n = fig_a();
        let t = traces(&n, Semantics::Sync, Bounds::new(3, 0));
        let expected: HashSet<Vec<Action>> = [
            vec![],
            vec![act('!', "b", "q", "p")],
            vec![act('!', "b", "q", "p"), act('!', "a", "r", "q")],
        ]
        .into_iter()
        .collect();
        assert_eq!(t.traces, expected);
        assert!(t.complete);
    }

    #[test]
    fn mailbox_traces_contain_the_asynchronous_head_start() {
        let n = fig_a();
        let t = traces(&n, Semantics::Mailbox, Bounds::new(4, 2));
        assert!(t
            .traces
            .contains(&vec![act('!', "a", "r", "q"), act('!', "b", "q", "p")]));
        let s = traces(&n, Semantics::Sync, Bounds::new(4, 0));
        assert!(!s
            .traces
            .contains(&vec![act('!', "a", "r", "q"), act('!', "b", "q", "p")]));
    }

    #[test]
    fn fig_b_mailbox_has_bac() {
        let n = fig_b();
        let t = traces(&n, Semantics::Mailbox, Bounds::new(6, 2));
        let w = vec![
            act('!', "b", "q", "p"),
            act('!', "a", "r", "q"),
            act('!', "c", "q", "p"),
        ];
        assert!(t.traces.contains(&w));
    }

    #[test]
    fn compare_fig_a() {
        let n = fig_a();
        let cmp = bounded_trace_equality(&n, Semantics::Mailbox, Bounds::new(2, 1)).unwrap();
        assert!(!cmp.equal_up_to_bounds);
        assert_eq!(
            cmp.witness,
            Some(vec![act('!', "a", "r", "q"), act('!', "b", "q", "p")])
        );
        assert_eq!(cmp.side, Some(WitnessSide::Asynchronous));
    }

    #[test]
    fn compare_fig_b() {
        let n = fig_b();
        let cmp = bounded_trace_equality(&n, Semantics::Mailbox, Bounds::new(3, 2)).unwrap();
        assert!(!cmp.equal_up_to_bounds);
        assert_eq!(
            cmp.witness,
            Some(vec![
                act('!', "b", "q", "p"),
                act('!', "a", "r", "q"),
                act('!', "c", "q", "p"),
            ])
        );
    }

    #[test]
    fn sync_traces_subset_of_mailbox() {
        for n in [fig_a(), fig_b()] {
            let b = Bounds::new(4, 3);
            let s = traces(&n, Semantics::Sync, b);
            let m = traces(&n, Semantics::Mailbox, b);
            assert!(s.traces.is_subset(&m.traces));
        }
    }

    #[test]
    fn p2p_equals_mailbox_on_tree_figures() {
        for n in [fig_a(), fig_b()] {
            let b = Bounds::new(4, 3);
            let p = traces(&n, Semantics::P2p, b);
            let m = traces(&n, Semantics::Mailbox, b);
            assert_eq!(p.traces, m.traces);
        }
    }

    #[test]
    fn empty_network_has_only_the_empty_trace() {
        let n = crate::network::NetworkBuilder::new(FinalMode::AllStatesFinal);
        let mut n = {
            let mut b = n;
            b.automaton("solo", "s0", &[], &[]);
            b.build()
        };
        n.messages.clear();
        let t = traces(&n, Semantics::Mailbox, Bounds::new(3, 2));
        assert_eq!(t.traces, HashSet::from([vec![]]));
    }

    #[test]
    fn explore_determinism() {
        let n = fig_b();
        let a = explore(&n, Semantics::Mailbox, Bounds::new(3, 2));
        let b = explore(&n, Semantics::Mailbox, Bounds::new(3, 2));
        let ta: Vec<_> = a.executions.iter().map(|e| e.steps.clone()).collect();
        let tb: Vec<_> = b.executions.iter().map(|e| e.steps.clone()).collect();
        assert_eq!(ta, tb);
    }
}
