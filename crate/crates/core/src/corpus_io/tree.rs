//! Penn Treebank style bracketed constituency trees.
//!
//! Preterminals are folded into their word: `(DT the)` becomes a leaf node
//! labelled `DT` whose token is `the/DT`. A node therefore holds either
//! children or a token, never both.

use std::fmt;

use thiserror::Error;

use super::Token;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("unbalanced brackets at byte {0}")]
    UnbalancedBrackets(usize),
    #[error("empty constituent at byte {0}")]
    EmptyConstituent(usize),
    #[error("trailing input at byte {0}")]
    TrailingInput(usize),
    #[error("malformed constituent at byte {0}: a node holds either subtrees or one word")]
    MixedConstituent(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    label: String,
    children: Vec<ParseTree>,
    token: Option<Token>,
}

impl ParseTree {
    /// Leaf node for a preterminal; the token's tag is the label.
    pub fn leaf(label: impl Into<String>, surface: impl Into<String>) -> Self {
        let label = label.into();
        ParseTree {
            token: Some(Token::new(surface, Some(label.clone()))),
            label,
            children: Vec::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        ParseTree {
            label: label.into(),
            children,
            token: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn children(&self) -> &[ParseTree] {
        &self.children
    }

    pub fn token(&self) -> Option<&Token> {
        self.token.as_ref()
    }

    pub fn is_leaf(&self) -> bool {
        self.token.is_some()
    }

    /// Label with function tags and indices removed, so `NP-SBJ-1` is `NP`.
    /// Labels that begin with `-` (`-NONE-`, `-LRB-`) are returned whole.
    pub fn base_label(&self) -> &str {
        if self.label.starts_with('-') {
            return &self.label;
        }
        match self.label.find(['-', '=']) {
            Some(i) => &self.label[..i],
            None => &self.label,
        }
    }

    /// Tokens in left-to-right order.
    pub fn leaves(&self) -> Vec<&Token> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Token>) {
        match &self.token {
            Some(t) => out.push(t),
            None => self.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self.token {
            Some(_) => 1,
            None => self.children.iter().map(ParseTree::leaf_count).sum(),
        }
    }

    /// Edges on the longest path from this node down to a word. The edge
    /// from a preterminal to its word counts, so `(DT the)` has height 1.
    pub fn height(&self) -> usize {
        match self.token {
            Some(_) => 1,
            None => {
                1 + self
                    .children
                    .iter()
                    .map(ParseTree::height)
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    /// Number of nodes (preterminals included) whose base label equals `label`.
    pub fn count_label(&self, label: &str) -> usize {
        let own = usize::from(self.base_label() == label);
        own + self
            .children
            .iter()
            .map(|c| c.count_label(label))
            .sum::<usize>()
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(ParseTree::node_count)
            .sum::<usize>()
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.token {
            Some(t) => write!(f, "({} {})", self.label, t.surface()),
            None => {
                write!(f, "({}", self.label)?;
                for c in &self.children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parse one bracketed tree. A wrapper root with an empty label and a
/// single child, as written by many treebanks (`( (S ...) )`), is unwrapped.
pub fn parse_bracketed_tree(text: &str) -> Result<ParseTree, TreeError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        text,
        pos: 0,
    };
    parser.skip_ws();
    if parser.peek() != Some(b'(') {
        return Err(if parser.pos >= parser.src.len() {
            TreeError::EmptyConstituent(parser.pos)
        } else {
            TreeError::UnbalancedBrackets(parser.pos)
        });
    }
    let tree = parser.parse_node()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(if parser.peek() == Some(b')') {
            TreeError::UnbalancedBrackets(parser.pos)
        } else {
            TreeError::TrailingInput(parser.pos)
        });
    }
    Ok(tree)
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    /// Reads a run of non-space, non-bracket bytes.
    fn atom(&mut self) -> &'a str {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|b| !b.is_ascii_whitespace() && b != b'(' && b != b')')
        {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn parse_node(&mut self) -> Result<ParseTree, TreeError> {
        let open = self.pos;
        self.pos += 1; // '('
        self.skip_ws();
        let label = self.atom().to_string();
        self.skip_ws();

        match self.peek() {
            None => Err(TreeError::UnbalancedBrackets(open)),
            Some(b')') => Err(TreeError::EmptyConstituent(open)),
            Some(b'(') => {
                let mut children = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(TreeError::UnbalancedBrackets(open)),
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(b'(') => children.push(self.parse_node()?),
                        Some(_) => return Err(TreeError::MixedConstituent(self.pos)),
                    }
                }
                if label.is_empty() {
                    if children.len() == 1 {
                        return Ok(children.pop().expect("one child"));
                    }
                    return Err(TreeError::EmptyConstituent(open));
                }
                Ok(ParseTree::node(label, children))
            }
            Some(_) => {
                let word_at = self.pos;
                let word = self.atom().to_string();
                self.skip_ws();
                match self.peek() {
                    None => Err(TreeError::UnbalancedBrackets(open)),
                    Some(b')') => {
                        self.pos += 1;
                        if label.is_empty() {
                            return Err(TreeError::EmptyConstituent(open));
                        }
                        Ok(ParseTree::leaf(label, word))
                    }
                    Some(_) => Err(TreeError::MixedConstituent(word_at)),
                }
            }
        }
    }
}
