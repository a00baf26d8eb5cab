use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::EvidenceError;
use crate::set::FocalSet;

/// Largest supported frame; focal sets are single-word bitsets.
pub const MAX_FRAME_SIZE: usize = 64;

/// A frame of discernment: an ordered list of distinct element labels.
///
/// Cloning is cheap (shared inner). Two frames are equal when their label
/// sequences are equal, so independently constructed frames interoperate.
#[derive(Clone)]
pub struct Frame {
    inner: Arc<Inner>,
}

struct Inner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Frame {
    /// Builds a frame from distinct labels. Labels must be nonempty and free
    /// of whitespace, `,` and `#` so that every bpa can round-trip through the
    /// text document format.
    pub fn new<I, S>(labels: I) -> Result<Frame, EvidenceError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_FRAME_SIZE {
            return Err(EvidenceError::FrameSize(labels.len()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty()
                || label
                    .chars()
                    .any(|c| c.is_whitespace() || c == ',' || c == '#')
            {
                return Err(EvidenceError::InvalidLabel(label.clone()));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(EvidenceError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Frame {
            inner: Arc::new(Inner { labels, index }),
        })
    }

    /// Frame with generated labels `x1..xN`.
    pub fn of_size(n: usize) -> Result<Frame, EvidenceError> {
        if n == 0 || n > MAX_FRAME_SIZE {
            return Err(EvidenceError::FrameSize(n));
        }
        Frame::new((1..=n).map(|i| format!("x{i}")))
    }

    pub fn size(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.inner.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.inner.index.get(label).copied()
    }

    /// Bit mask covering every element of the frame.
    pub fn mask(&self) -> u64 {
        if self.size() == MAX_FRAME_SIZE {
            !0
        } else {
            (1u64 << self.size()) - 1
        }
    }

    /// The full set Θ.
    pub fn full_set(&self) -> FocalSet {
        FocalSet::from_bits(self.mask())
    }

    pub fn contains_set(&self, set: FocalSet) -> bool {
        set.bits() & !self.mask() == 0
    }

    /// Resolves labels into a set. Unknown labels are rejected.
    pub fn set_of<I, S>(&self, labels: I) -> Result<FocalSet, EvidenceError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u64;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| EvidenceError::UnknownElement(label.to_string()))?;
            bits |= 1 << i;
        }
        Ok(FocalSet::from_bits(bits))
    }

    /// Labels of a set's members, in frame order.
    pub fn labels_of(&self, set: FocalSet) -> Vec<&str> {
        set.indices().map(|i| self.label(i)).collect()
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Frame) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.labels == other.inner.labels
    }
}

impl Eq for Frame {}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({})", self.inner.labels.join(" "))
    }
}
