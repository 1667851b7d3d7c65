use std::fmt;

use crate::bitset::ElementSet;

use super::ColouredElement;

/// A rainbow independent set: coloured elements with distinct elements, distinct colours and
/// an independent underlying set.
///
/// Values are built through [`super::Universe::ris`] (validated) or by the crate's move
/// primitives, which re-validate in debug builds.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Ris {
    elems: Vec<ColouredElement>,
    under: ElementSet,
    colours: ElementSet,
}

impl Ris {
    pub fn empty() -> Self {
        Self::default()
    }

    pub(crate) fn from_valid(mut elems: Vec<ColouredElement>) -> Self {
        elems.sort_unstable();
        let under = elems.iter().map(|e| e.x).collect();
        let colours = elems.iter().map(|e| e.c).collect();
        Self {
            elems,
            under,
            colours,
        }
    }

    /// Elements in ascending `(x, c)` order.
    pub fn elements(&self) -> &[ColouredElement] {
        &self.elems
    }

    pub fn iter(&self) -> impl Iterator<Item = ColouredElement> + '_ {
        self.elems.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// The underlying element set.
    pub fn underline(&self) -> &ElementSet {
        &self.under
    }

    pub fn colours(&self) -> &ElementSet {
        &self.colours
    }

    pub fn has_colour(&self, c: usize) -> bool {
        self.colours.contains(c)
    }

    pub fn contains(&self, e: ColouredElement) -> bool {
        self.under.contains(e.x) && self.elems.binary_search(&e).is_ok()
    }

    /// The member with colour `c`, if any.
    pub fn with_colour(&self, c: usize) -> Option<ColouredElement> {
        if !self.colours.contains(c) {
            return None;
        }
        self.elems.iter().copied().find(|e| e.c == c)
    }

    /// The member whose element is `x`, if any.
    pub fn with_element(&self, x: usize) -> Option<ColouredElement> {
        if !self.under.contains(x) {
            return None;
        }
        self.elems.iter().copied().find(|e| e.x == x)
    }

    /// Colours in `1..=n` absent from the set, ascending.
    pub fn missing_colours(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (1..=n).filter(move |&c| !self.colours.contains(c))
    }

    /// The set with `remove` taken out and `add` put in; no validation.
    pub(crate) fn edited(&self, remove: &[ColouredElement], add: &[ColouredElement]) -> Self {
        let mut elems: Vec<_> = self
            .elems
            .iter()
            .copied()
            .filter(|e| !remove.contains(e))
            .collect();
        elems.extend_from_slice(add);
        Self::from_valid(elems)
    }
}

impl fmt::Debug for Ris {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl fmt::Display for Ris {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}
