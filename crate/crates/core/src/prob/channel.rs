use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::joint::checked_cells;
use super::{Alphabet, RAW_SUM_TOLERANCE};
use crate::{Error, Result};

/// Row-stochastic conditional distribution `p(output | input)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    input: Alphabet,
    output: Alphabet,
    rows: Vec<f64>,
}

impl Channel {
    /// `rows` is row-major, one row per input symbol. Each row is validated
    /// to sum to one within `RAW_SUM_TOLERANCE` and then renormalized.
    pub fn new(input: Alphabet, output: Alphabet, mut rows: Vec<f64>) -> Result<Self> {
        let cells = checked_cells([input.size(), output.size()])?;
        if rows.len() != cells {
            return Err(Error::Validation(format!(
                "channel `{}`->`{}` needs {cells} entries, got {}",
                input.name(),
                output.name(),
                rows.len()
            )));
        }
        let width = output.size();
        for (i, row) in rows.chunks_mut(width).enumerate() {
            if let Some(bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
                return Err(Error::Validation(format!("channel row {i} has invalid entry {bad}")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > RAW_SUM_TOLERANCE {
                return Err(Error::Validation(format!(
                    "channel row {i} sums to {total}, expected 1"
                )));
            }
            if total != 1.0 {
                row.iter_mut().for_each(|p| *p /= total);
            }
        }
        Ok(Self { input, output, rows })
    }

    /// Deterministic channel sending input `i` to output `map[i]`.
    pub fn deterministic(input: Alphabet, output: Alphabet, map: &[usize]) -> Result<Self> {
        if map.len() != input.size() {
            return Err(Error::Usage(format!(
                "deterministic map has {} entries for {} inputs",
                map.len(),
                input.size()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&z| z >= output.size()) {
            return Err(Error::Usage(format!(
                "deterministic map targets symbol {bad} outside the output"
            )));
        }
        let width = output.size();
        let mut rows = vec![0.0; checked_cells([input.size(), width])?];
        for (i, &z) in map.iter().enumerate() {
            rows[i * width + z] = 1.0;
        }
        Ok(Self { input, output, rows })
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        let map: Vec<usize> = (0..alphabet.size()).collect();
        Self::deterministic(alphabet.clone(), alphabet, &map).expect("identity map is in range")
    }

    /// Every input goes to `symbol`.
    pub fn constant(input: Alphabet, output: Alphabet, symbol: usize) -> Result<Self> {
        let map = vec![symbol; input.size()];
        Self::deterministic(input, output, &map)
    }

    /// Binary symmetric channel with crossover `epsilon`.
    pub fn binary_symmetric(input: Alphabet, output: Alphabet, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Domain(format!("crossover {epsilon} outside [0, 1]")));
        }
        if input.size() != 2 || output.size() != 2 {
            return Err(Error::Usage("binary symmetric channel needs binary alphabets".into()));
        }
        Self::new(input, output, vec![1.0 - epsilon, epsilon, epsilon, 1.0 - epsilon])
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    /// Full row-major table.
    pub fn table(&self) -> &[f64] {
        &self.rows
    }

    pub fn row(&self, input: usize) -> &[f64] {
        let width = self.output.size();
        &self.rows[input * width..(input + 1) * width]
    }

    pub fn get(&self, input: usize, output: usize) -> f64 {
        self.rows[input * self.output.size() + output]
    }

    /// Deterministic map, if every row is a point mass.
    pub fn as_map(&self) -> Option<Vec<usize>> {
        (0..self.input.size())
            .map(|i| {
                let row = self.row(i);
                row.iter()
                    .position(|&p| p == 1.0)
                    .filter(|_| row.iter().filter(|&&p| p != 0.0).count() == 1)
            })
            .collect()
    }

    /// Serial composition: `self` followed by `next`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if !self.output.compatible(&next.input) {
            return Err(Error::Usage(format!(
                "cannot compose `{}` output with `{}` input",
                self.output.name(),
                next.input.name()
            )));
        }
        let (n_in, n_mid, n_out) = (self.input.size(), self.output.size(), next.output.size());
        let mut rows = vec![0.0; checked_cells([n_in, n_out])?];
        for i in 0..n_in {
            for m in 0..n_mid {
                let p = self.rows[i * n_mid + m];
                if p == 0.0 {
                    continue;
                }
                for o in 0..n_out {
                    rows[i * n_out + o] += p * next.rows[m * n_out + o];
                }
            }
        }
        Channel::new(self.input.clone(), next.output.clone(), rows)
    }
}
