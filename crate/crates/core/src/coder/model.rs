use num_integer::Integer;
use num_rational::Ratio;

use crate::typemath::{Composition, Symbol};
use crate::{Error, Result};

/// Output model that draws symbols without replacement from a composition.
///
/// The next symbol is `a` with probability `n'_a / n'`, where `n'_a` is how
/// many `a` are still to be placed and `n'` how many symbols are left in
/// the block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceModel {
    initial: Composition,
    remaining: Vec<u64>,
    total: u64,
}

impl SourceModel {
    pub fn new(comp: &Composition) -> Self {
        SourceModel {
            initial: comp.clone(),
            remaining: comp.counts().to_vec(),
            total: comp.n(),
        }
    }

    pub fn initial(&self) -> &Composition {
        &self.initial
    }

    /// Counts still to be drawn, per symbol.
    pub fn remaining(&self) -> &[u64] {
        &self.remaining
    }

    pub fn remaining_total(&self) -> u64 {
        self.total
    }

    /// Exact probabilities of the next symbol.
    pub fn next_symbol_distribution(&self) -> Result<Vec<Ratio<u64>>> {
        if self.total == 0 {
            return Err(Error::Exhausted);
        }
        Ok(self
            .remaining
            .iter()
            .map(|&c| Ratio::new(c, self.total))
            .collect())
    }

    /// Removes one `a` from the pool.
    pub fn draw(&mut self, a: Symbol) -> Result<()> {
        if self.total == 0 {
            return Err(Error::Exhausted);
        }
        match self.remaining.get_mut(a as usize) {
            Some(c) if *c > 0 => {
                *c -= 1;
                self.total -= 1;
                Ok(())
            }
            _ => Err(Error::CompositionMismatch),
        }
    }

    /// Smallest symbol with a nonzero remaining count after `a`.
    pub(crate) fn next_present(&self, a: usize) -> Option<usize> {
        (a + 1..self.remaining.len()).find(|&b| self.remaining[b] > 0)
    }

    pub(crate) fn first_present(&self) -> usize {
        self.remaining
            .iter()
            .position(|&c| c > 0)
            .expect("model is not exhausted")
    }

    /// Cofactors for drawing `a` when `below` symbols sort before it.
    ///
    /// With `g = gcd(n', below, n'_a)`, the completion count `C` of the
    /// current prefix is divisible by `n' / g`, so the offset `C below / n'`
    /// and the new count `C n'_a / n'` follow from one exact division.
    pub(crate) fn split(&self, a: usize, below: u64) -> Split {
        let count = self.remaining[a];
        let g = self.total.gcd(&below).gcd(&count);
        Split {
            divisor: self.total / g,
            below: below / g,
            count: count / g,
        }
    }

    /// Remaining count of all symbols below `a`.
    pub(crate) fn below(&self, a: usize) -> u64 {
        self.remaining[..a].iter().sum()
    }
}

/// See [`SourceModel::split`].
pub(crate) struct Split {
    pub divisor: u64,
    pub below: u64,
    pub count: u64,
}
