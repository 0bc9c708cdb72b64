//! `B`-linear algebra inside `F`: the trace kernel, root spaces and their
//! intersections, basis completion, trace-orthogonal dual bases, and
//! coordinate extraction.
//!
//! All computations reduce to Gaussian elimination on `B`-coordinate vectors
//! relative to the power basis `{1, g, ..., g^(t-1)}` of `F` over `B`, with
//! pivots chosen left to right. Two equal subspaces therefore always produce
//! identical canonical bases, which keeps golden transcripts stable.

use crate::error::{Error, Result};
use crate::field::{Bel, Fel, FieldTower};

/// A `B`-linear subspace of `F` in canonical reduced basis form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Vec<Fel>,
}

impl Subspace {
    pub fn basis(&self) -> &[Fel] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, tower: &FieldTower, x: Fel) -> bool {
        express_in_span(tower, x, &self.basis).is_some()
    }

    /// All `|B|^dim` members, in lexicographic coefficient order.
    pub fn elements(&self, tower: &FieldTower) -> Vec<Fel> {
        let b = tower.subfield_elements();
        let mut out = vec![Fel::ZERO];
        for &g in &self.basis {
            let mut next = Vec::with_capacity(out.len() * b.len());
            for &c in &b {
                let cg = tower.mul(c, g);
                for &e in &out {
                    next.push(tower.add(e, cg));
                }
            }
            out = next;
        }
        out
    }
}

/// A basis of `F` over `B` together with its trace-orthogonal dual once
/// computed: `Tr(u_i * dual_j) = 1` if `i = j` and `0` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceBasis {
    pub elements: Vec<Fel>,
    pub dual: Option<Vec<Fel>>,
}

impl TraceBasis {
    pub fn new(elements: Vec<Fel>) -> Self {
        TraceBasis { elements, dual: None }
    }
}

// --- Gaussian elimination over B (entries are subfield elements of F) ---

/// Reduced row echelon form in place; returns the pivot column of each
/// surviving row. Rows are B-coordinate vectors of length t.
#[allow(clippy::needless_range_loop)] // elimination reads one row while writing another
fn rref(tower: &FieldTower, rows: &mut Vec<Vec<Bel>>) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = tower.inv(rows[r][col]).expect("pivot is nonzero");
        for v in rows[r].iter_mut() {
            *v = tower.mul(*v, inv);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col];
                for c in 0..width {
                    let sub = tower.mul(factor, rows[r][c]);
                    rows[i][c] = tower.sub(rows[i][c], sub);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

fn coord_rows(tower: &FieldTower, generators: &[Fel]) -> Vec<Vec<Bel>> {
    generators.iter().map(|&g| tower.subfield_coords(g)).collect()
}

/// Canonicalizes a generating set into the reduced basis of its span.
pub fn span(tower: &FieldTower, generators: &[Fel]) -> Subspace {
    let mut rows = coord_rows(tower, generators);
    rref(tower, &mut rows);
    let basis = rows
        .iter()
        .map(|row| tower.from_subfield_coords(row).expect("row has width t"))
        .collect();
    Subspace { basis }
}

/// `B`-rank of a set of elements of `F`.
pub fn rank(tower: &FieldTower, elements: &[Fel]) -> usize {
    let mut rows = coord_rows(tower, elements);
    rref(tower, &mut rows);
    rows.len()
}

/// Coordinates of `a` relative to an arbitrary full-rank basis, so that
/// `sum coords_i * basis_i = a`.
pub fn b_coords(tower: &FieldTower, a: Fel, basis: &TraceBasis) -> Result<Vec<Bel>> {
    let t = tower.t() as usize;
    if basis.elements.len() != t || rank(tower, &basis.elements) != t {
        return Err(Error::RankError("basis of F over B must have rank t"));
    }
    express_in_span(tower, a, &basis.elements)
        .ok_or(Error::Internal("full-rank basis failed to express an element"))
}

/// The kernel `{z : Tr(z * mult) = 0 for every mult}` of a family of
/// trace functionals, as a canonical subspace.
fn kernel_of_trace_functionals(tower: &FieldTower, multipliers: &[Fel]) -> Subspace {
    let t = tower.t() as usize;
    // Functional matrix over B: entry (r, j) = Tr(mult_r * basis_j).
    let mut rows: Vec<Vec<Bel>> = multipliers
        .iter()
        .map(|&mu| {
            tower
                .power_basis()
                .iter()
                .map(|&bj| tower.trace(tower.mul(mu, bj)))
                .collect()
        })
        .collect();
    let pivots = rref(tower, &mut rows);
    // Null space: one basis vector per free column.
    let mut kernel_gens = Vec::with_capacity(t - pivots.len());
    for free in 0..t {
        if pivots.contains(&free) {
            continue;
        }
        let mut coords = vec![Fel::ZERO; t];
        coords[free] = Fel::ONE;
        for (r, &pc) in pivots.iter().enumerate() {
            coords[pc] = tower.neg(rows[r][free]);
        }
        kernel_gens.push(tower.from_subfield_coords(&coords).expect("width t"));
    }
    span(tower, &kernel_gens)
}

/// Kernel `K` of the trace map; dimension `t - 1`.
pub fn trace_kernel(tower: &FieldTower) -> Subspace {
    kernel_of_trace_functionals(tower, &[Fel::ONE])
}

/// Root space `K_{alpha,beta} = {z : Tr(z*(beta-alpha)) = 0}`, the set of
/// `z` with `Tr(z*alpha) = Tr(z*beta)`. Symmetric in its arguments and of
/// dimension `t - 1`.
pub fn root_space(tower: &FieldTower, alpha: Fel, beta: Fel) -> Result<Subspace> {
    if alpha == beta {
        return Err(Error::DegenerateInput("root space needs two distinct points"));
    }
    Ok(kernel_of_trace_functionals(tower, &[tower.sub(beta, alpha)]))
}

/// Intersection `K_{alpha,beta,gamma}` of the pairwise root spaces; its
/// dimension is `t - 2` or `t - 1`.
pub fn triple_root_space(tower: &FieldTower, alpha: Fel, beta: Fel, gamma: Fel) -> Result<Subspace> {
    if alpha == beta || beta == gamma || alpha == gamma {
        return Err(Error::DegenerateInput("triple root space needs distinct points"));
    }
    Ok(kernel_of_trace_functionals(
        tower,
        &[tower.sub(beta, alpha), tower.sub(gamma, beta)],
    ))
}

/// Completes an independent set to a basis of `F` over `B` by scanning the
/// canonical field enumeration and keeping every element that increases the
/// rank. The input elements are preserved as a prefix.
pub fn complete_basis(tower: &FieldTower, prefix: &[Fel]) -> Result<TraceBasis> {
    let t = tower.t() as usize;
    let mut rows = coord_rows(tower, prefix);
    let kept = {
        let mut probe = rows.clone();
        rref(tower, &mut probe);
        probe.len()
    };
    if kept != prefix.len() {
        return Err(Error::RankError("prefix is dependent over B"));
    }
    let mut elements = prefix.to_vec();
    if elements.len() < t {
        for cand in tower.elements() {
            rows.push(tower.subfield_coords(cand));
            let mut probe = rows.clone();
            rref(tower, &mut probe);
            if probe.len() == rows.len() {
                elements.push(cand);
                if elements.len() == t {
                    break;
                }
            } else {
                rows.pop();
            }
        }
    }
    if elements.len() != t {
        return Err(Error::Internal("field enumeration failed to complete a basis"));
    }
    Ok(TraceBasis::new(elements))
}

/// Fills in the trace-orthogonal dual of a full-rank basis:
/// `Tr(u_i * dual_j)` is `1` exactly when `i = j`.
pub fn dual_basis(tower: &FieldTower, basis: &TraceBasis) -> Result<TraceBasis> {
    let t = tower.t() as usize;
    if basis.elements.len() != t {
        return Err(Error::RankError("dual basis needs t elements"));
    }
    // Solve Tr(u_i * d_j) = delta_ij with d_j = sum_l y_l * g^l:
    // the Gram matrix A[i][l] = Tr(u_i * g^l) over B is inverted once.
    let gram: Vec<Vec<Bel>> = basis
        .elements
        .iter()
        .map(|&u| {
            tower
                .power_basis()
                .iter()
                .map(|&bl| tower.trace(tower.mul(u, bl)))
                .collect()
        })
        .collect();
    let inv = invert_b_matrix(tower, &gram)
        .ok_or(Error::RankError("basis is rank-deficient over B"))?;
    let dual = (0..t)
        .map(|j| {
            let coords: Vec<Bel> = (0..t).map(|l| inv[l][j]).collect();
            tower.from_subfield_coords(&coords).expect("width t")
        })
        .collect();
    Ok(TraceBasis { elements: basis.elements.clone(), dual: Some(dual) })
}

#[allow(clippy::needless_range_loop)] // elimination reads one row while writing another
fn invert_b_matrix(tower: &FieldTower, mat: &[Vec<Bel>]) -> Option<Vec<Vec<Bel>>> {
    let n = mat.len();
    let mut work: Vec<Vec<Bel>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Fel::ONE } else { Fel::ZERO }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot);
        let inv = tower.inv(work[col][col]).expect("pivot nonzero");
        for v in work[col].iter_mut() {
            *v = tower.mul(*v, inv);
        }
        for r in 0..n {
            if r != col && !work[r][col].is_zero() {
                let factor = work[r][col];
                for c in 0..2 * n {
                    let sub = tower.mul(factor, work[col][c]);
                    work[r][c] = tower.sub(work[r][c], sub);
                }
            }
        }
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Expresses `x` as a `B`-linear combination of `generators`, returning the
/// coefficient sequence, or `None` when `x` lies outside the span. The
/// `None` case is a meaningful branch signal, not a failure.
pub fn express_in_span(tower: &FieldTower, x: Fel, generators: &[Fel]) -> Option<Vec<Bel>> {
    if generators.is_empty() {
        return x.is_zero().then(Vec::new);
    }
    let t = tower.t() as usize;
    let g = generators.len();
    // Augmented system: columns are generator coordinates, last column is x.
    let cols: Vec<Vec<Bel>> = generators.iter().map(|&gen| tower.subfield_coords(gen)).collect();
    let target = tower.subfield_coords(x);
    let mut rows: Vec<Vec<Bel>> = (0..t)
        .map(|r| {
            let mut row: Vec<Bel> = cols.iter().map(|c| c[r]).collect();
            row.push(target[r]);
            row
        })
        .collect();
    let pivots = rref(tower, &mut rows);
    let mut coeffs = vec![Fel::ZERO; g];
    for (r, &pc) in pivots.iter().enumerate() {
        if pc == g {
            return None; // pivot in the augmented column: inconsistent
        }
        // Free variables stay zero, so the pivot value is the coefficient.
        coeffs[pc] = rows[r][g];
    }
    // With free variables zeroed the solution must reproduce x exactly.
    let mut check = Fel::ZERO;
    for (c, gen) in coeffs.iter().zip(generators) {
        check = tower.add(check, tower.mul(*c, *gen));
    }
    (check == x).then_some(coeffs)
}
