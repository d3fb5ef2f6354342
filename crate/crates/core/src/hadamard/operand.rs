use crate::error::{Error, Result};

/// The dense `C` operand of a Hadamard product, evaluated lazily at
/// individual `(row, column)` positions.
///
/// For volume products the row and column index spaces coincide. For
/// facet products the row space of direction `j` is the facet layout with
/// extent `m` in direction `j`.
pub trait TwoPointOperand {
    /// `(row space length, column space length)` seen by `direction`.
    fn index_spaces(&self, direction: usize) -> (usize, usize);

    fn value(&self, direction: usize, row: usize, column: usize) -> f64;
}

/// Nodal states that generate an operand: one vector on the volume nodes,
/// and optionally one vector per direction on that direction's facet rows.
#[derive(Clone, Debug)]
pub struct NodalStates<'a> {
    columns: &'a [f64],
    facet_rows: Option<Vec<&'a [f64]>>,
}

impl<'a> NodalStates<'a> {
    pub fn volume(values: &'a [f64]) -> Self {
        NodalStates {
            columns: values,
            facet_rows: None,
        }
    }

    pub fn facet(rows_per_direction: Vec<&'a [f64]>, columns: &'a [f64]) -> Result<Self> {
        if rows_per_direction.is_empty() {
            return Err(Error::invalid(
                "facet operand needs row states per direction",
            ));
        }
        Ok(NodalStates {
            columns,
            facet_rows: Some(rows_per_direction),
        })
    }

    #[inline]
    pub fn rows(&self, direction: usize) -> &'a [f64] {
        match &self.facet_rows {
            Some(rows) => rows[direction],
            None => self.columns,
        }
    }

    #[inline]
    pub fn columns(&self) -> &'a [f64] {
        self.columns
    }

    fn index_spaces(&self, direction: usize) -> (usize, usize) {
        (self.rows(direction).len(), self.columns.len())
    }
}

/// `C_ij = c_i c_j`.
#[derive(Clone, Debug)]
pub struct RankOne<'a> {
    states: NodalStates<'a>,
}

impl<'a> RankOne<'a> {
    pub fn new(c: &'a [f64]) -> Self {
        RankOne {
            states: NodalStates::volume(c),
        }
    }

    pub fn from_states(states: NodalStates<'a>) -> Self {
        RankOne { states }
    }
}

impl TwoPointOperand for RankOne<'_> {
    fn index_spaces(&self, direction: usize) -> (usize, usize) {
        self.states.index_spaces(direction)
    }

    #[inline]
    fn value(&self, direction: usize, row: usize, column: usize) -> f64 {
        self.states.rows(direction)[row] * self.states.columns()[column]
    }
}

/// `C_ij = f(u_i, u_j)` for a two-point function `f`.
#[derive(Clone, Debug)]
pub struct PairFunction<'a, F> {
    f: F,
    states: NodalStates<'a>,
}

impl<'a, F: Fn(f64, f64) -> f64> PairFunction<'a, F> {
    pub fn new(f: F, u: &'a [f64]) -> Self {
        PairFunction {
            f,
            states: NodalStates::volume(u),
        }
    }

    pub fn from_states(f: F, states: NodalStates<'a>) -> Self {
        PairFunction { f, states }
    }
}

impl<F: Fn(f64, f64) -> f64> TwoPointOperand for PairFunction<'_, F> {
    fn index_spaces(&self, direction: usize) -> (usize, usize) {
        self.states.index_spaces(direction)
    }

    #[inline]
    fn value(&self, direction: usize, row: usize, column: usize) -> f64 {
        (self.f)(
            self.states.rows(direction)[row],
            self.states.columns()[column],
        )
    }
}
