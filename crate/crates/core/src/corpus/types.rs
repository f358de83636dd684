use serde::{Deserialize, Serialize};

/// One analyzed token. `head` is an in-sentence index (absent for the root);
/// `deprel` is the dependency label of the arc to the head.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: String,
    #[serde(default)]
    pub head: Option<usize>,
    #[serde(default)]
    pub deprel: Option<String>,
}

impl Token {
    /// Shorthand used by tests and generators.
    pub fn new(lemma: &str, pos: &str) -> Self {
        Token {
            surface: lemma.to_string(),
            lemma: lemma.to_string(),
            pos: pos.to_string(),
            head: None,
            deprel: None,
        }
    }

    pub fn with_head(mut self, head: usize, deprel: &str) -> Self {
        self.head = Some(head);
        self.deprel = Some(deprel.to_string());
        self
    }
}

/// One occurrence of a target word with its sentence. Training instances
/// carry a `sense_id`; test instances may not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub target_lemma: String,
    pub target_index: usize,
    #[serde(default)]
    pub sense_id: Option<String>,
    pub tokens: Vec<Token>,
}

/// A sentence of a raw (global) corpus: the same token layout without
/// target or sense fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

pub(crate) fn validate_tokens(tokens: &[Token]) -> Result<(), String> {
    if tokens.is_empty() {
        return Err("tokens must be non-empty".to_string());
    }
    for (i, tok) in tokens.iter().enumerate() {
        if let Some(h) = tok.head {
            if h >= tokens.len() {
                return Err(format!(
                    "token {} has head index {} outside sentence of length {}",
                    i,
                    h,
                    tokens.len()
                ));
            }
            if h == i {
                return Err(format!("token {} is its own head", i));
            }
        }
    }
    Ok(())
}

impl Instance {
    pub(crate) fn validate(&self) -> Result<(), String> {
        validate_tokens(&self.tokens)?;
        if self.target_index >= self.tokens.len() {
            return Err(format!(
                "target_index {} outside sentence of length {}",
                self.target_index,
                self.tokens.len()
            ));
        }
        Ok(())
    }
}

impl Sentence {
    pub(crate) fn validate(&self) -> Result<(), String> {
        validate_tokens(&self.tokens)
    }
}
