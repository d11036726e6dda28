//! Reduced boundary-matrix decompositions and persistence pairings.
//!
//! A [`Decomposition`] stores `D = R U` for the boundary matrix `D` of the
//! current filter, with `R` reduced and `U` upper unitriangular. `U` is kept
//! as its transpose so that the row operations it receives become column
//! operations. Logical indices are filter positions; physical indices are
//! flat cell indices, so both matrices share the filter order as their row
//! and column permutation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::filtration::Filter;
use crate::matrix::PermutedMatrix;
use crate::mesh::{boundary_columns, SimplexId, SurfaceMesh};

/// What a cell does in the pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Gives death to the class born at the given cell.
    Kills(SimplexId),
    /// Gives birth to a class that dies at the given cell.
    KilledBy(SimplexId),
    /// Gives birth to a class that never dies.
    Essential,
}

impl Role {
    pub fn gives_death(self) -> bool {
        matches!(self, Role::Kills(_))
    }

    pub fn gives_birth(self) -> bool {
        !self.gives_death()
    }

    pub fn partner(self) -> Option<SimplexId> {
        match self {
            Role::Kills(c) | Role::KilledBy(c) => Some(c),
            Role::Essential => None,
        }
    }
}

/// Birth-death pairs and unpaired cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pairing {
    pub pairs: BTreeSet<(SimplexId, SimplexId)>,
    pub essentials: BTreeSet<SimplexId>,
}

impl Pairing {
    /// Number of essential cells per dimension -1, 0, 1, 2.
    pub fn essential_counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for s in &self.essentials {
            c[(s.dim + 1) as usize] += 1;
        }
        c
    }

    /// Cells whose partner (or essential status) differs between two pairings.
    pub fn changed_cells(&self, other: &Pairing) -> BTreeSet<SimplexId> {
        let mut out = BTreeSet::new();
        for &(b, d) in self.pairs.symmetric_difference(&other.pairs) {
            out.insert(b);
            out.insert(d);
        }
        out.extend(self.essentials.symmetric_difference(&other.essentials));
        out
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition<'m> {
    pub(crate) mesh: &'m SurfaceMesh,
    pub(crate) filter: Filter,
    pub(crate) r: PermutedMatrix,
    pub(crate) ut: PermutedMatrix,
}

/// Left-to-right column reduction of the boundary matrix of `filter`.
pub fn reduce_from_scratch<'m>(mesh: &'m SurfaceMesh, filter: Filter) -> Decomposition<'m> {
    let n = mesh.num_cells();
    assert_eq!(filter.len(), n, "filter does not belong to this mesh");
    let mut r = PermutedMatrix::from_columns(n, boundary_columns(mesh));
    let mut ut = PermutedMatrix::identity(n);
    r.set_permutations(filter.order(), filter.order());
    ut.set_permutations(filter.order(), filter.order());

    let mut pivot: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        while let Some(low) = r.low(j) {
            match pivot[low] {
                Some(k) => {
                    r.add_column(k, j);
                    // R_j += R_k is U row k += row j.
                    ut.add_column(j, k);
                }
                None => {
                    pivot[low] = Some(j);
                    break;
                }
            }
        }
    }
    Decomposition { mesh, filter, r, ut }
}

impl<'m> Decomposition<'m> {
    pub fn mesh(&self) -> &'m SurfaceMesh {
        self.mesh
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn reduced(&self) -> &PermutedMatrix {
        &self.r
    }

    pub fn update_transposed(&self) -> &PermutedMatrix {
        &self.ut
    }

    pub fn len(&self) -> usize {
        self.filter.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filter.is_empty()
    }

    pub fn cell_at(&self, position: usize) -> SimplexId {
        self.mesh.simplex(self.filter.cell_at(position))
    }

    /// Logical row of the lowest entry of logical column `j`.
    pub fn low(&self, j: usize) -> Option<usize> {
        self.r.low(j)
    }

    /// `R_dst += R_src`, mirrored into `U` as row `src` += row `dst`.
    pub fn add_column(&mut self, src: usize, dst: usize) {
        self.r.add_column(src, dst);
        self.ut.add_column(dst, src);
    }

    /// Exchange positions `i` and `i + 1` in the filter and in both matrices.
    /// No repair happens here; see [`Decomposition::transpose`].
    pub fn swap_adjacent(&mut self, i: usize) {
        self.r.swap_rows(i);
        self.r.swap_cols(i);
        self.ut.swap_rows(i);
        self.ut.swap_cols(i);
        self.filter.swap_adjacent(i);
    }

    /// Role of the cell at a filter position.
    pub fn role_at(&self, position: usize) -> Role {
        if let Some(low) = self.r.low(position) {
            Role::Kills(self.cell_at(low))
        } else if let Some(k) = self.r.column_with_low(position, None) {
            Role::KilledBy(self.cell_at(k))
        } else {
            Role::Essential
        }
    }

    pub fn role_of(&self, cell: SimplexId) -> Role {
        self.role_at(self.filter.position_of(self.mesh.flat_index(cell)))
    }

    pub fn pairing(&self) -> Pairing {
        let mut p = Pairing::default();
        for j in 0..self.len() {
            match self.role_at(j) {
                Role::Kills(birth) => {
                    p.pairs.insert((birth, self.cell_at(j)));
                }
                Role::Essential => {
                    p.essentials.insert(self.cell_at(j));
                }
                Role::KilledBy(_) => {}
            }
        }
        p
    }

    /// Memo coherence, reducedness and triangularity of `U`.
    pub fn check_invariants(&self) -> Result<(), String> {
        self.r.check_lows()?;
        if !self.r.is_reduced() {
            return Err("lows of R are not distinct".into());
        }
        for j in 0..self.len() {
            if !self.ut.get(j, j) {
                return Err(format!("U has a zero diagonal entry at {j}"));
            }
            // Column j of U^T is row j of U; it must not reach left of the diagonal.
            if self.ut.column(j).first() != Some(&j) {
                return Err(format!("U is not upper triangular in row {j}"));
            }
        }
        Ok(())
    }

    /// Dense check of `D = R U` in filter coordinates. Quadratic memory; meant
    /// for small complexes in tests.
    pub fn check_factorization(&self) -> Result<(), String> {
        let n = self.len();
        let boundary = boundary_columns(self.mesh);
        let r = self.r.to_dense();
        let ut = self.ut.to_dense();
        for j in 0..n {
            let mut col = vec![false; n];
            for k in 0..n {
                // (R U)_{:, j} = sum_k R_{:, k} U_{k, j}, and U_{k, j} = Ut_{j, k}.
                if ut[j][k] {
                    for i in 0..n {
                        col[i] ^= r[i][k];
                    }
                }
            }
            let mut expect = vec![false; n];
            for &f in &boundary[self.filter.cell_at(j)] {
                expect[self.filter.position_of(f as usize)] = true;
            }
            if col != expect {
                return Err(format!("column {j} of R U differs from D"));
            }
        }
        Ok(())
    }

    /// The debug dump of `R`.
    pub fn dump(&self) -> String {
        self.r.dump()
    }
}
