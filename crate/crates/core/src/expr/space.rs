use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Func;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("at least one {0} variable is required")]
    Empty(&'static str),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("`{0}` is reserved for a built-in function")]
    Reserved(String),
    #[error("variable `{0}` is declared more than once")]
    Duplicate(String),
}

/// Names of the state variables x^i, the time variable, and the Wiener variables w^k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarSpace {
    states: Vec<String>,
    time: String,
    wiener: Vec<String>,
}

pub(crate) fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarSpace {
    pub fn new<S: AsRef<str>>(states: &[S], time: &str, wiener: &[S]) -> Result<Self, SpaceError> {
        let states: Vec<String> = states.iter().map(|s| s.as_ref().to_string()).collect();
        let wiener: Vec<String> = wiener.iter().map(|s| s.as_ref().to_string()).collect();
        if states.is_empty() {
            return Err(SpaceError::Empty("state"));
        }
        if wiener.is_empty() {
            return Err(SpaceError::Empty("Wiener"));
        }
        let mut seen = BTreeSet::new();
        for name in states.iter().chain(std::iter::once(&time.to_string())).chain(wiener.iter()) {
            if !valid_identifier(name) {
                return Err(SpaceError::InvalidName(name.clone()));
            }
            if Func::from_name(name).is_some() {
                return Err(SpaceError::Reserved(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(SpaceError::Duplicate(name.clone()));
            }
        }
        Ok(VarSpace { states, time: time.to_string(), wiener })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn time(&self) -> &str {
        &self.time
    }

    pub fn wiener(&self) -> &[String] {
        &self.wiener
    }

    /// n, the number of state variables.
    pub fn n(&self) -> usize {
        self.states.len()
    }

    /// m, the number of Wiener processes.
    pub fn m(&self) -> usize {
        self.wiener.len()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.time == name || self.states.iter().any(|s| s == name) || self.wiener.iter().any(|s| s == name)
    }

    pub fn all_names(&self) -> Vec<String> {
        let mut v = self.states.clone();
        v.push(self.time.clone());
        v.extend(self.wiener.iter().cloned());
        v
    }

    /// Same time and Wiener names, new state names.
    pub fn with_states<S: AsRef<str>>(&self, states: &[S]) -> Result<VarSpace, SpaceError> {
        let states: Vec<&str> = states.iter().map(|s| s.as_ref()).collect();
        let wiener: Vec<&str> = self.wiener.iter().map(|s| s.as_str()).collect();
        VarSpace::new(&states, &self.time, &wiener)
    }

    /// Same states and time, Wiener names replaced.
    pub fn with_wiener<S: AsRef<str>>(&self, wiener: &[S]) -> Result<VarSpace, SpaceError> {
        let wiener: Vec<&str> = wiener.iter().map(|s| s.as_ref()).collect();
        let states: Vec<&str> = self.states.iter().map(|s| s.as_str()).collect();
        VarSpace::new(&states, &self.time, &wiener)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_spaces() {
        assert_eq!(VarSpace::new(&["x", "x"], "t", &["w"]), Err(SpaceError::Duplicate("x".into())));
        assert_eq!(VarSpace::new(&["x"], "x", &["w"]), Err(SpaceError::Duplicate("x".into())));
        assert_eq!(VarSpace::new(&["exp"], "t", &["w"]), Err(SpaceError::Reserved("exp".into())));
        assert_eq!(VarSpace::new(&["1x"], "t", &["w"]), Err(SpaceError::InvalidName("1x".into())));
        let none: [&str; 0] = [];
        assert_eq!(VarSpace::new(&none, "t", &["w"]), Err(SpaceError::Empty("state")));
        assert_eq!(VarSpace::new(&["x"], "t", &none), Err(SpaceError::Empty("Wiener")));
    }

    #[test]
    fn accessors() {
        let s = VarSpace::new(&["x", "y"], "t", &["w1", "w2", "w3"]).unwrap();
        assert_eq!((s.n(), s.m()), (2, 3));
        assert!(s.contains("w2"));
        assert!(!s.contains("z"));
    }
}
