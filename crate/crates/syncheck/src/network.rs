//! The network model: participants, messages, communicating automata,
//! topology extraction and tree classification.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automata::Fsa;

/// A message with payload, sender, and receiver. Two messages with the
/// same payload but different endpoints are distinct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Message {
    pub payload: String,
    pub from: String,
    pub to: String,
}

impl Message {
    pub fn new(payload: &str, from: &str, to: &str) -> Self {
        Message {
            payload: payload.to_string(),
            from: from.to_string(),
            to: to.to_string(),
        }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}>{}", self.payload, self.from, self.to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Send,
    Receive,
}

/// A send or a reception of a message. The derived `Ord` is the global
/// total symbol order used for all deterministic tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Action {
    pub direction: Direction,
    pub message: Message,
}

impl Action {
    pub fn send(m: Message) -> Self {
        Action {
            direction: Direction::Send,
            message: m,
        }
    }

    pub fn receive(m: Message) -> Self {
        Action {
            direction: Direction::Receive,
            message: m,
        }
    }

    pub fn is_send(&self) -> bool {
        self.direction == Direction::Send
    }

    pub fn is_receive(&self) -> bool {
        self.direction == Direction::Receive
    }

    /// The participant performing the action: the sender of a send, the
    /// receiver of a reception.
    pub fn actor(&self) -> &str {
        match self.direction {
            Direction::Send => &self.message.from,
            Direction::Receive => &self.message.to,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.direction {
            Direction::Send => '!',
            Direction::Receive => '?',
        };
        write!(f, "{}{}", sign, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinalMode {
    /// Every configuration is accepting (the Synchronisability Problem).
    AllStatesFinal,
    /// Acceptance is governed by each automaton's declared final states
    /// (the Generalised problem).
    DeclaredFinals,
}

/// One participant's automaton. States are kept by name for reporting;
/// transitions use dense indices into `states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunicatingAutomaton {
    pub participant: String,
    pub states: Vec<String>,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: Vec<(usize, Action, usize)>,
}

impl CommunicatingAutomaton {
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Transitions enabled in `state` (any action).
    pub fn enabled(&self, state: usize) -> impl Iterator<Item = &(usize, Action, usize)> {
        self.transitions.iter().filter(move |(from, _, _)| *from == state)
    }

    /// The automaton's language as an [`Fsa`] over actions, with the given
    /// alphabet and acceptance per `mode`.
    pub fn to_fsa(&self, alphabet: impl IntoIterator<Item = Action>, mode: FinalMode) -> Fsa<Action> {
        let mut fsa = Fsa::new(self.states.len(), alphabet, self.initial);
        for (from, act, to) in &self.transitions {
            fsa.add_transition(*from, act.clone(), *to);
        }
        match mode {
            FinalMode::AllStatesFinal => {
                for s in 0..self.states.len() {
                    fsa.mark_accepting(s);
                }
            }
            FinalMode::DeclaredFinals => {
                for &s in &self.finals {
                    fsa.mark_accepting(s);
                }
            }
        }
        fsa
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    pub participants: Vec<String>,
    pub automata: BTreeMap<String, CommunicatingAutomaton>,
    pub messages: BTreeSet<Message>,
    pub final_mode: FinalMode,
}

/// A single validation finding; violations are data, not failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// A message names the same participant as sender and receiver.
    SelfMessage { message: Message },
    /// A declared message occurs on no transition of any automaton.
    UnusedMessage { message: Message },
    /// A transition's action does not name the owning participant as the
    /// active role.
    WrongActor { participant: String, action: Action },
    /// A transition uses a message absent from the declared message set.
    UndeclaredMessage { participant: String, message: Message },
    /// A participant in the list has no automaton, or vice versa.
    MissingAutomaton { participant: String },
    /// An endpoint of a message is not a declared participant.
    UnknownParticipant { message: Message, participant: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfMessage { message } => {
                write!(f, "message {message} has identical sender and receiver")
            }
            Violation::UnusedMessage { message } => {
                write!(f, "message {message} occurs on no transition")
            }
            Violation::WrongActor { participant, action } => {
                write!(f, "automaton {participant} performs {action} where it is not the active role")
            }
            Violation::UndeclaredMessage { participant, message } => {
                write!(f, "automaton {participant} uses undeclared message {message}")
            }
            Violation::MissingAutomaton { participant } => {
                write!(f, "participant {participant} lacks an automaton (or is undeclared)")
            }
            Violation::UnknownParticipant { message, participant } => {
                write!(f, "message {message} names unknown participant {participant}")
            }
        }
    }
}

/// The oriented communication graph: an edge (p, q) for every message
/// from p to q in the message set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topology {
    pub vertices: Vec<String>,
    pub edges: BTreeSet<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeInfo {
    pub root: String,
    /// parent[p] = q for every non-root p.
    pub parent: BTreeMap<String, String>,
    /// Participants in root-down (topological) order.
    pub order: Vec<String>,
}

impl TreeInfo {
    pub fn children(&self, p: &str) -> Vec<String> {
        let mut out: Vec<String> = self
            .parent
            .iter()
            .filter(|(_, q)| q.as_str() == p)
            .map(|(c, _)| c.clone())
            .collect();
        out.sort();
        out
    }

    /// The unique root-to-q path, inclusive.
    pub fn path_from_root(&self, q: &str) -> Vec<String> {
        let mut path = vec![q.to_string()];
        let mut cur = q.to_string();
        while let Some(parent) = self.parent.get(&cur) {
            path.push(parent.clone());
            cur = parent.clone();
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NotTree {
    Disconnected { components: Vec<String> },
    Cycle { witness: Vec<String> },
    MultipleSenders { participant: String, senders: Vec<String> },
}

impl fmt::Display for NotTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotTree::Disconnected { components } => {
                write!(f, "topology is disconnected (witness nodes: {})", components.join(", "))
            }
            NotTree::Cycle { witness } => {
                write!(f, "topology has a cycle: {}", witness.join(" -> "))
            }
            NotTree::MultipleSenders { participant, senders } => {
                write!(f, "participant {participant} has several senders: {}", senders.join(", "))
            }
        }
    }
}

impl Network {
    /// Checks the structural invariants; an empty list means the network
    /// is well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let declared: BTreeSet<&str> = self.participants.iter().map(|s| s.as_str()).collect();
        for p in &self.participants {
            if !self.automata.contains_key(p) {
                violations.push(Violation::MissingAutomaton {
                    participant: p.clone(),
                });
            }
        }
        for p in self.automata.keys() {
            if !declared.contains(p.as_str()) {
                violations.push(Violation::MissingAutomaton {
                    participant: p.clone(),
                });
            }
        }
        for m in &self.messages {
            if m.from == m.to {
                violations.push(Violation::SelfMessage { message: m.clone() });
            }
            for endpoint in [&m.from, &m.to] {
                if !declared.contains(endpoint.as_str()) {
                    violations.push(Violation::UnknownParticipant {
                        message: m.clone(),
                        participant: endpoint.clone(),
                    });
                }
            }
        }
        let mut used: BTreeSet<&Message> = BTreeSet::new();
        for (p, aut) in &self.automata {
            for (_, act, _) in &aut.transitions {
                if act.actor() != p {
                    violations.push(Violation::WrongActor {
                        participant: p.clone(),
                        action: act.clone(),
                    });
                }
                if !self.messages.contains(&act.message) {
                    violations.push(Violation::UndeclaredMessage {
                        participant: p.clone(),
                        message: act.message.clone(),
                    });
                }
                used.insert(&act.message);
            }
        }
        for m in &self.messages {
            if !used.contains(m) {
                violations.push(Violation::UnusedMessage { message: m.clone() });
            }
        }
        violations
    }

    /// The Def. 2 graph, derived solely from the message set.
    pub fn topology(&self) -> Topology {
        let edges = self
            .messages
            .iter()
            .map(|m| (m.from.clone(), m.to.clone()))
            .collect();
        Topology {
            vertices: self.participants.clone(),
            edges,
        }
    }

    /// Participants with a message addressed to `p`.
    pub fn senders(&self, p: &str) -> BTreeSet<String> {
        self.messages
            .iter()
            .filter(|m| m.to == p)
            .map(|m| m.from.clone())
            .collect()
    }

    /// Participants `p` has a message addressed to.
    pub fn receivers(&self, p: &str) -> BTreeSet<String> {
        self.messages
            .iter()
            .filter(|m| m.from == p)
            .map(|m| m.to.clone())
            .collect()
    }

    /// The full action set of participant `p` derivable from the message
    /// set: sends from `p` and receptions towards `p`.
    pub fn actions_of(&self, p: &str) -> BTreeSet<Action> {
        let mut acts = BTreeSet::new();
        for m in &self.messages {
            if m.from == p {
                acts.insert(Action::send(m.clone()));
            }
            if m.to == p {
                acts.insert(Action::receive(m.clone()));
            }
        }
        acts
    }

    pub fn participant_index(&self, p: &str) -> Option<usize> {
        self.participants.iter().position(|x| x == p)
    }
}

impl Topology {
    /// Tree classification per the tree-topology definition: connected,
    /// acyclic, and at most one sender per participant.
    pub fn classify(&self) -> Result<TreeInfo, NotTree> {
        if self.vertices.is_empty() {
            return Err(NotTree::Disconnected { components: vec![] });
        }
        // connectivity of the underlying undirected graph
        let mut adjacency: HashMap<&str, Vec<&str>> = HashMap::new();
        for (p, q) in &self.edges {
            adjacency.entry(p).or_default().push(q);
            adjacency.entry(q).or_default().push(p);
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut stack = vec![self.vertices[0].as_str()];
        seen.insert(self.vertices[0].as_str());
        while let Some(v) = stack.pop() {
            for w in adjacency.get(v).into_iter().flatten() {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        if seen.len() != self.vertices.len() {
            let inside = self.vertices.iter().find(|v| seen.contains(v.as_str()));
            let outside = self.vertices.iter().find(|v| !seen.contains(v.as_str()));
            return Err(NotTree::Disconnected {
                components: [inside, outside].into_iter().flatten().cloned().collect(),
            });
        }
        // directed cycle detection
        let mut successors: HashMap<&str, Vec<&str>> = HashMap::new();
        for (p, q) in &self.edges {
            successors.entry(p).or_default().push(q);
        }
        if let Some(witness) = self.find_cycle(&successors) {
            return Err(NotTree::Cycle { witness });
        }
        // in-degree at most one
        let mut senders: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (p, q) in &self.edges {
            senders.entry(q).or_default().push(p);
        }
        for (q, ss) in &senders {
            if ss.len() > 1 {
                return Err(NotTree::MultipleSenders {
                    participant: q.to_string(),
                    senders: ss.iter().map(|s| s.to_string()).collect(),
                });
            }
        }
        let parent: BTreeMap<String, String> = senders
            .iter()
            .map(|(q, ss)| (q.to_string(), ss[0].to_string()))
            .collect();
        let roots: Vec<&String> = self
            .vertices
            .iter()
            .filter(|v| !parent.contains_key(*v))
            .collect();
        // acyclic + connected + in-degree <= 1 forces exactly one root
        debug_assert_eq!(roots.len(), 1);
        let root = roots[0].clone();
        let mut order = vec![root.clone()];
        let mut frontier = vec![root.clone()];
        while let Some(p) = frontier.pop() {
            let mut kids: Vec<String> = parent
                .iter()
                .filter(|(_, q)| **q == p)
                .map(|(c, _)| c.clone())
                .collect();
            kids.sort();
            order.extend(kids.iter().cloned());
            frontier.extend(kids);
        }
        Ok(TreeInfo { root, parent, order })
    }

    fn find_cycle(&self, successors: &HashMap<&str, Vec<&str>>) -> Option<Vec<String>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        let mut marks: HashMap<&str, Mark> = self
            .vertices
            .iter()
            .map(|v| (v.as_str(), Mark::White))
            .collect();
        fn visit<'a>(
            v: &'a str,
            successors: &HashMap<&'a str, Vec<&'a str>>,
            marks: &mut HashMap<&'a str, Mark>,
            path: &mut Vec<&'a str>,
        ) -> Option<Vec<String>> {
            marks.insert(v, Mark::Grey);
            path.push(v);
            for w in successors.get(v).into_iter().flatten() {
                match marks.get(w).copied().unwrap_or(Mark::White) {
                    Mark::Grey => {
                        let start = path.iter().position(|x| x == w).unwrap();
                        let mut cycle: Vec<String> =
                            path[start..].iter().map(|s| s.to_string()).collect();
                        cycle.push(w.to_string());
                        return Some(cycle);
                    }
                    Mark::White => {
                        if let Some(c) = visit(w, successors, marks, path) {
                            return Some(c);
                        }
                    }
                    Mark::Black => {}
                }
            }
            path.pop();
            marks.insert(v, Mark::Black);
            None
        }
        let mut path = Vec::new();
        for v in &self.vertices {
            if marks[v.as_str()] == Mark::White {
                if let Some(c) = visit(v, successors, &mut marks, &mut path) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// DOT digraph rendering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph topology {\n");
        for v in &self.vertices {
            out.push_str(&format!("  \"{v}\";\n"));
        }
        for (p, q) in &self.edges {
            out.push_str(&format!("  \"{p}\" -> \"{q}\";\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Convenience builder used by tests, fixtures, and the PCP encoder.
pub struct NetworkBuilder {
    participants: Vec<String>,
    automata: BTreeMap<String, CommunicatingAutomaton>,
    messages: BTreeSet<Message>,
    final_mode: FinalMode,
}

impl NetworkBuilder {
    pub fn new(final_mode: FinalMode) -> Self {
        NetworkBuilder {
            participants: Vec::new(),
            automata: BTreeMap::new(),
            messages: BTreeSet::new(),
            final_mode,
        }
    }

    pub fn message(&mut self, payload: &str, from: &str, to: &str) -> Message {
        let m = Message::new(payload, from, to);
        self.messages.insert(m.clone());
        m
    }

    /// Registers an automaton from (from-state, action, to-state) triples
    /// given by state name. States are created in order of appearance,
    /// starting from `initial`.
    pub fn automaton(
        &mut self,
        participant: &str,
        initial: &str,
        transitions: &[(&str, Action, &str)],
        finals: &[&str],
    ) {
        let mut states: Vec<String> = vec![initial.to_string()];
        let index = |states: &mut Vec<String>, name: &str| -> usize {
            match states.iter().position(|s| s == name) {
                Some(i) => i,
                None => {
                    states.push(name.to_string());
                    states.len() - 1
                }
            }
        };
        let mut ts = Vec::new();
        for (from, act, to) in transitions {
            let f = index(&mut states, from);
            let t = index(&mut states, to);
            self.messages.insert(act.message.clone());
            ts.push((f, act.clone(), t));
        }
        let finals = finals
            .iter()
            .map(|name| index(&mut states, name))
            .collect();
        self.participants.push(participant.to_string());
        self.automata.insert(
            participant.to_string(),
            CommunicatingAutomaton {
                participant: participant.to_string(),
                states,
                initial: 0,
                finals,
                transitions: ts,
            },
        );
    }

    pub fn build(self) -> Network {
        Network {
            participants: self.participants,
            automata: self.automata,
            messages: self.messages,
            final_mode: self.final_mode,
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The three-node chain r -> q -> p where q must send before it can
    /// receive.
    pub fn fig_a() -> Network {
        let mut b = NetworkBuilder::new(FinalMode::AllStatesFinal);
        let a_rq = Message::new("a", "r", "q");
        let b_qp = Message::new("b", "q", "p");
        b.automaton("r", "s0", &[("s0", Action::send(a_rq.clone()), "s1")], &[]);
        b.automaton(
            "q",
            "s0",
            &[
                ("s0", Action::send(b_qp.clone()), "s1"),
                ("s1", Action::receive(a_rq), "s2"),
            ],
            &[],
        );
        b.automaton("p", "s0", &[("s0", Action::receive(b_qp), "s1")], &[]);
        b.build()
    }

    /// The three-node chain r -> q -> p with branching in q and p.
    pub fn fig_b() -> Network {
        let mut b = NetworkBuilder::new(FinalMode::AllStatesFinal);
        let a_rq = Message::new("a", "r", "q");
        let b_qp = Message::new("b", "q", "p");
        let c_qp = Message::new("c", "q", "p");
        b.automaton("r", "s0", &[("s0", Action::send(a_rq.clone()), "s1")], &[]);
        b.automaton(
            "q",
            "s0",
            &[
                ("s0", Action::receive(a_rq.clone()), "s1"),
                ("s1", Action::send(b_qp.clone()), "s2"),
                ("s2", Action::send(c_qp.clone()), "s3"),
                ("s0", Action::send(b_qp.clone()), "s4"),
                ("s4", Action::send(c_qp.clone()), "s5"),
                ("s5", Action::receive(a_rq), "s6"),
            ],
            &[],
        );
        b.automaton(
            "p",
            "s0",
            &[
                ("s0", Action::receive(b_qp.clone()), "s1"),
                ("s1", Action::receive(c_qp.clone()), "s2"),
                ("s0", Action::receive(c_qp), "s3"),
                ("s3", Action::receive(b_qp), "s4"),
            ],
            &[],
        );
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::{fig_a, fig_b};
    use super::*;

    #[test]
    fn fig_a_validates() {
        assert!(fig_a().validate().is_empty());
        assert!(fig_b().validate().is_empty());
    }

    #[test]
    fn unused_message_is_flagged() {
        let mut n = fig_a();
        n.messages.insert(Message::new("ghost", "r", "p"));
        let vs = n.validate();
        assert!(vs
            .iter()
            .any(|v| matches!(v, Violation::UnusedMessage { message } if message.payload == "ghost")));
    }

    #[test]
    fn wrong_actor_is_flagged() {
        let mut n = fig_a();
        // r claims a send that belongs to q
        let bogus = Action::send(Message::new("b", "q", "p"));
        let aut = n.automata.get_mut("r").unwrap();
        aut.transitions.push((0, bogus, 0));
        let vs = n.validate();
        assert!(vs
            .iter()
            .any(|v| matches!(v, Violation::WrongActor { participant, .. } if participant == "r")));
    }

    #[test]
    fn fig_a_topology_and_tree() {
        let n = fig_a();
        let t = n.topology();
        assert_eq!(
            t.edges,
            BTreeSet::from([
                ("r".to_string(), "q".to_string()),
                ("q".to_string(), "p".to_string())
            ])
        );
        let info = t.classify().unwrap();
        assert_eq!(info.root, "r");
        assert_eq!(info.parent.get("q"), Some(&"r".to_string()));
        assert_eq!(info.parent.get("p"), Some(&"q".to_string()));
        assert_eq!(info.path_from_root("p"), vec!["r", "q", "p"]);
    }

    #[test]
    fn disjoint_edges_are_disconnected() {
        let t = Topology {
            vertices: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            edges: BTreeSet::from([
                ("a".to_string(), "b".to_string()),
                ("c".to_string(), "d".to_string()),
            ]),
        };
        assert!(matches!(t.classify(), Err(NotTree::Disconnected { .. })));
    }

    #[test]
    fn isolated_participant_is_a_trivial_tree() {
        let t = Topology {
            vertices: vec!["solo".into()],
            edges: BTreeSet::new(),
        };
        let info = t.classify().unwrap();
        assert_eq!(info.root, "solo");
        assert!(info.parent.is_empty());
    }

    #[test]
    fn senders_and_receivers() {
        let n = fig_a();
        assert_eq!(n.senders("p"), BTreeSet::from(["q".to_string()]));
        assert_eq!(n.senders("r"), BTreeSet::new());
        assert_eq!(n.receivers("q"), BTreeSet::from(["p".to_string()]));
    }
}
