use alloc::borrow::Cow;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// A finite set of symbols, addressed by index `0..size`.
///
/// Symbol names are optional; without them a symbol prints as its index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    name: String,
    size: usize,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, size: usize) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::Validation(format!(
                "alphabet `{name}` must have at least one symbol"
            )));
        }
        Ok(Self {
            name,
            size,
            labels: None,
        })
    }

    pub fn with_labels<S: Into<String>>(name: impl Into<String>, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let name = name.into();
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Validation(format!(
                "alphabet `{name}` must have at least one symbol"
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::Validation(format!("alphabet `{name}` repeats symbol `{label}`")));
            }
        }
        Ok(Self {
            name,
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Explicit symbol names, if any were given.
    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of symbol `index`.
    pub fn label(&self, index: usize) -> Cow<'_, str> {
        match &self.labels {
            Some(labels) => Cow::Borrowed(labels[index].as_str()),
            None => Cow::Owned(index.to_string()),
        }
    }

    /// Index of the symbol printed as `label`.
    pub fn position(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(labels) => labels.iter().position(|l| l == label),
            None => label.parse::<usize>().ok().filter(|&i| i < self.size),
        }
    }

    /// Same copy of the alphabet under another name.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Two alphabets can feed each other when they have the same size and
    /// agree on symbol names wherever both carry them.
    pub fn compatible(&self, other: &Alphabet) -> bool {
        self.size == other.size
            && match (&self.labels, &other.labels) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            }
    }
}
