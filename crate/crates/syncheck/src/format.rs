//! File formats: JSON schemas for networks and PCP instances, with
//! reference checking on load so later passes can assume well-formed
//! indices. Semantic problems (self-messages, wrong actors, ...) are
//! left to `Network::validate`; this module only rejects files that
//! cannot be represented at all.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{Action, CommunicatingAutomaton, FinalMode, Message, Network};
use crate::pcp::{PcpError, PcpInstance};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("automaton {automaton}: unknown state {state}")]
    UnknownState { automaton: String, state: String },
    #[error("automaton {automaton}: action must be \"!\" or \"?\", got {act:?}")]
    BadAction { automaton: String, act: String },
    #[error("final_mode must be \"all\" or \"declared\", got {0:?}")]
    BadFinalMode(String),
    #[error("alphabet entries must be single characters, got {0:?}")]
    BadAlphabetEntry(String),
    #[error("invalid instance: {0}")]
    Pcp(#[from] PcpError),
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    participants: Vec<String>,
    messages: Vec<MessageFile>,
    automata: BTreeMap<String, AutomatonFile>,
    final_mode: String,
}

#[derive(Serialize, Deserialize)]
struct MessageFile {
    payload: String,
    from: String,
    to: String,
}

#[derive(Serialize, Deserialize)]
struct AutomatonFile {
    states: Vec<String>,
    initial: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    finals: Vec<String>,
    transitions: Vec<TransitionFile>,
}

/// One transition line: `act` is `"!"` or `"?"`, `peer` the other
/// endpoint (receiver of a send, sender of a reception).
#[derive(Serialize, Deserialize)]
struct TransitionFile {
    from: String,
    act: String,
    payload: String,
    peer: String,
    to: String,
}

pub fn parse_network(text: &str) -> Result<Network, FormatError> {
    let file: NetworkFile = serde_json::from_str(text)?;
    let final_mode = match file.final_mode.as_str() {
        "all" => FinalMode::AllStatesFinal,
        "declared" => FinalMode::DeclaredFinals,
        other => return Err(FormatError::BadFinalMode(other.to_string())),
    };
    let messages: BTreeSet<Message> = file
        .messages
        .iter()
        .map(|m| Message::new(&m.payload, &m.from, &m.to))
        .collect();
    let mut automata = BTreeMap::new();
    for (participant, aut) in &file.automata {
        let state_index = |name: &str| -> Result<usize, FormatError> {
            aut.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| FormatError::UnknownState {
                    automaton: participant.clone(),
                    state: name.to_string(),
                })
        };
        let initial = state_index(&aut.initial)?;
        let mut finals = BTreeSet::new();
        for f in &aut.finals {
            finals.insert(state_index(f)?);
        }
        let mut transitions = Vec::new();
        for t in &aut.transitions {
            let action = match t.act.as_str() {
                "!" => Action::send(Message::new(&t.payload, participant, &t.peer)),
                "?" => Action::receive(Message::new(&t.payload, &t.peer, participant)),
                other => {
                    return Err(FormatError::BadAction {
                        automaton: participant.clone(),
                        act: other.to_string(),
                    })
                }
            };
            transitions.push((state_index(&t.from)?, action, state_index(&t.to)?));
        }
        automata.insert(
            participant.clone(),
            CommunicatingAutomaton {
                participant: participant.clone(),
                states: aut.states.clone(),
                initial,
                finals,
                transitions,
            },
        );
    }
    Ok(Network {
        participants: file.participants,
        automata,
        messages,
        final_mode,
    })
}

pub fn render_network(n: &Network) -> String {
    let file = NetworkFile {
        participants: n.participants.clone(),
        messages: n
            .messages
            .iter()
            .map(|m| MessageFile {
                payload: m.payload.clone(),
                from: m.from.clone(),
                to: m.to.clone(),
            })
            .collect(),
        automata: n
            .automata
            .iter()
            .map(|(p, aut)| {
                let transitions = aut
                    .transitions
                    .iter()
                    .map(|(from, act, to)| TransitionFile {
                        from: aut.states[*from].clone(),
                        act: if act.is_send() { "!" } else { "?" }.to_string(),
                        payload: act.message.payload.clone(),
                        peer: if act.is_send() {
                            act.message.to.clone()
                        } else {
                            act.message.from.clone()
                        },
                        to: aut.states[*to].clone(),
                    })
                    .collect();
                (
                    p.clone(),
                    AutomatonFile {
                        states: aut.states.clone(),
                        initial: aut.states[aut.initial].clone(),
                        finals: aut.finals.iter().map(|&f| aut.states[f].clone()).collect(),
                        transitions,
                    },
                )
            })
            .collect(),
        final_mode: match n.final_mode {
            FinalMode::AllStatesFinal => "all",
            FinalMode::DeclaredFinals => "declared",
        }
        .to_string(),
    };
    serde_json::to_string_pretty(&file).expect("network serialization")
}

#[derive(Serialize, Deserialize)]
struct PcpFile {
    alphabet: Vec<String>,
    w: Vec<String>,
    w_prime: Vec<String>,
}

pub fn parse_pcp(text: &str) -> Result<PcpInstance, FormatError> {
    let file: PcpFile = serde_json::from_str(text)?;
    let mut alphabet = Vec::new();
    for entry in &file.alphabet {
        let mut chars = entry.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => alphabet.push(c),
            _ => return Err(FormatError::BadAlphabetEntry(entry.clone())),
        }
    }
    Ok(PcpInstance::new(alphabet, file.w, file.w_prime)?)
}

pub fn render_pcp(inst: &PcpInstance) -> String {
    let file = PcpFile {
        alphabet: inst.alphabet.iter().map(|c| c.to_string()).collect(),
        w: inst.w.clone(),
        w_prime: inst.w_prime.clone(),
    };
    serde_json::to_string_pretty(&file).expect("instance serialization")
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG_A: &str = r#"{
        "participants": ["r", "q", "p"],
        "messages": [
            {"payload": "a", "from": "r", "to": "q"},
            {"payload": "b", "from": "q", "to": "p"}
        ],
        "automata": {
            "r": {"states": ["s0", "s1"], "initial": "s0",
                  "transitions": [{"from": "s0", "act": "!", "payload": "a", "peer": "q", "to": "s1"}]},
            "q": {"states": ["s0", "s1", "s2"], "initial": "s0",
                  "transitions": [
                      {"from": "s0", "act": "!", "payload": "b", "peer": "p", "to": "s1"},
                      {"from": "s1", "act": "?", "payload": "a", "peer": "r", "to": "s2"}]},
            "p": {"states": ["s0", "s1"], "initial": "s0",
                  "transitions": [{"from": "s0", "act": "?", "payload": "b", "peer": "q", "to": "s1"}]}
        },
        "final_mode": "all"
    }"#;

    #[test]
    fn network_round_trip() {
        let n = parse_network(FIG_A).unwrap();
        assert!(n.validate().is_empty());
        assert_eq!(n.participants, vec!["r", "q", "p"]);
        let again = parse_network(&render_network(&n)).unwrap();
        assert_eq!(again.participants, n.participants);
        assert_eq!(again.messages, n.messages);
        assert_eq!(again.automata, n.automata);
    }

    #[test]
    fn unknown_state_is_rejected() {
        let broken = r#"{
            "participants": ["p"],
            "messages": [],
            "automata": {"p": {"states": ["s0"], "initial": "sX", "transitions": []}},
            "final_mode": "all"
        }"#;
        assert!(matches!(
            parse_network(broken),
            Err(FormatError::UnknownState { .. })
        ));
    }

    #[test]
    fn bad_final_mode_is_rejected() {
        let broken = FIG_A.replace("\"all\"", "\"some\"");
        assert!(matches!(
            parse_network(&broken),
            Err(FormatError::BadFinalMode(_))
        ));
    }

    #[test]
    fn pcp_round_trip() {
        let text = r#"{"alphabet": ["a", "b"], "w": ["a", "b", "abab"], "w_prime": ["ba", "baa", "b"]}"#;
        let inst = parse_pcp(text).unwrap();
        assert_eq!(inst.w, vec!["a", "b", "abab"]);
        let again = parse_pcp(&render_pcp(&inst)).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn bad_alphabet_entry_is_rejected() {
        let text = r#"{"alphabet": ["ab"], "w": ["a"], "w_prime": ["b"]}"#;
        assert!(matches!(
            parse_pcp(text),
            Err(FormatError::BadAlphabetEntry(_))
        ));
    }
}
