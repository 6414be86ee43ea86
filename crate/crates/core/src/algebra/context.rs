use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered variable names, optionally followed by the deformation parameter `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarContext {
    names: Vec<String>,
    has_e: bool,
}

pub type Ctx = Arc<VarContext>;

pub const E_NAME: &str = "e";

impl VarContext {
    /// A context over the given space variables, without `e`.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Ctx> {
        Self::build(names.iter().map(|s| s.as_ref().to_string()).collect(), false)
    }

    /// A context over the given space variables with `e` appended as the last variable.
    pub fn with_e<S: AsRef<str>>(names: &[S]) -> Result<Ctx> {
        let mut all: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        all.push(E_NAME.to_string());
        Self::build(all, true)
    }

    /// Variables `prefix1..prefixN`.
    pub fn numbered(prefix: &str, n: usize) -> Ctx {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Self::build(names, false).expect("numbered names are unique")
    }

    fn build(names: Vec<String>, has_e: bool) -> Result<Ctx> {
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() || !a.chars().next().unwrap().is_alphabetic() {
                return Err(Error::InvalidInput(format!("bad variable name `{a}`")));
            }
            if !a.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::InvalidInput(format!("bad variable name `{a}`")));
            }
            if names[..i].contains(a) {
                return Err(Error::InvalidInput(format!("duplicate variable `{a}`")));
            }
            let last = i + 1 == names.len();
            if a == E_NAME && !(has_e && last) {
                return Err(Error::InvalidInput(
                    "`e` is reserved for the deformation parameter".into(),
                ));
            }
        }
        Ok(Arc::new(VarContext { names, has_e }))
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    /// Number of space variables (excluding `e`).
    pub fn space_dim(&self) -> usize {
        self.names.len() - usize::from(self.has_e)
    }

    pub fn has_e(&self) -> bool {
        self.has_e
    }

    pub fn e_index(&self) -> Option<usize> {
        self.has_e.then(|| self.names.len() - 1)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn space_names(&self) -> &[String] {
        &self.names[..self.space_dim()]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The same space variables with `e` appended (identity if already present).
    pub fn extend_e(self: &Arc<Self>) -> Ctx {
        if self.has_e {
            return self.clone();
        }
        Self::with_e(&self.names).expect("extending a valid context")
    }

    /// The space variables only.
    pub fn strip_e(self: &Arc<Self>) -> Ctx {
        if !self.has_e {
            return self.clone();
        }
        Self::new(self.space_names()).expect("sub-context of a valid context")
    }
}
