//! Block anti-triangular form of symmetric pencils.
//!
//! Every symmetric pencil `S` can be written `S = Qᵀ Z Q` with `Q` unitary
//! and `Z` block anti-triangular: a symmetric corner `A`, a coupling block
//! `B`, a regular symmetric block carrying the elementary divisors, a block
//! carrying only the right minimal indices, and exact zero blocks. The
//! construction is witness-driven: the caller supplies `W` with
//! `S = Wᵀ K W`, where `K` is the canonical direct sum permuted into
//! anti-diagonal shape; QR-factoring `Wᵀ` and pushing the triangular factor
//! through `K` produces `Z`. Computing such a `W` from scratch for an
//! arbitrary symmetric pencil is a separate hard problem and is not
//! attempted here.

use crate::canonical::{descriptor_to_pencil, CanonicalBlock, Level, StructureDescriptor};
use crate::error::{Error, Result};
use crate::linalg::qr_square;
use crate::matrix::ComplexMatrix;
use crate::pencil::{Pencil, SymmetricPencil};

/// Conformal partition sizes of the anti-triangular form: `c` is the sum of
/// the right minimal indices, `p` their count, `rho` the regular size. The
/// three block dimensions are `(c, rho, c + p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AntiSizes {
    pub c: usize,
    pub rho: usize,
    pub p: usize,
}

impl AntiSizes {
    pub fn total(&self) -> usize {
        2 * self.c + self.p + self.rho
    }
}

/// The factored form `S = Qᵀ Z Q`.
#[derive(Clone, Debug)]
pub struct AntiTriangularForm {
    /// Unitary transform.
    pub q: ComplexMatrix,
    /// Symmetric corner block (`c x c`).
    pub a_part: SymmetricPencil,
    /// Coupling block (`c x rho`).
    pub b_part: Pencil,
    /// Regular symmetric block with the elementary divisors of `S`.
    pub s_reg: SymmetricPencil,
    /// Block whose eigenstructure is exactly the right minimal indices
    /// (`c x (c+p)`).
    pub s_right: Pencil,
    pub sizes: AntiSizes,
}

impl AntiTriangularForm {
    /// Assembles `Z` with the zero blocks exactly zero.
    pub fn assembled(&self) -> SymmetricPencil {
        let AntiSizes { c, rho, .. } = self.sizes;
        let n = self.sizes.total();
        let mut a = ComplexMatrix::zeros(n, n);
        let mut b = ComplexMatrix::zeros(n, n);
        a.set_block(0, 0, self.a_part.a());
        b.set_block(0, 0, self.a_part.b());
        a.set_block(0, c, self.b_part.a());
        b.set_block(0, c, self.b_part.b());
        a.set_block(c, c, self.s_reg.a());
        b.set_block(c, c, self.s_reg.b());
        a.set_block(0, c + rho, self.s_right.a());
        b.set_block(0, c + rho, self.s_right.b());
        // mirror the off-diagonal blocks
        let bt = self.b_part.transpose();
        a.set_block(c, 0, bt.a());
        b.set_block(c, 0, bt.b());
        let rt = self.s_right.transpose();
        a.set_block(c + rho, 0, rt.a());
        b.set_block(c + rho, 0, rt.b());
        SymmetricPencil::new(Pencil::new(a, b).expect("assembled blocks are conformal"))
            .expect("assembled form is symmetric by construction")
    }

    /// `Qᵀ Z Q`, which reproduces the input pencil up to roundoff.
    pub fn reconstruct(&self) -> SymmetricPencil {
        self.assembled().congruence(&self.q).expect("q is square")
    }
}

fn conjugate_pencil(left: &ComplexMatrix, p: &Pencil, right: &ComplexMatrix) -> Pencil {
    Pencil::new(&(left * p.a()) * right, &(left * p.b()) * right)
        .expect("conformal by construction")
}

/// Builds the permuted canonical pencil `K = [[0,0,L],[0,J,0],[Lᵀ,0,0]]`
/// together with the permutation matrix `P` such that `K = Pᵀ C P` for the
/// canonical direct sum `C` of the descriptor. A witness `V` with
/// `S = Vᵀ C V` therefore yields `W = Pᵀ V` with `S = Wᵀ K W`.
pub fn permuted_canonical(
    d: &StructureDescriptor,
) -> Result<(SymmetricPencil, ComplexMatrix, AntiSizes)> {
    if d.level() == Level::Bundle {
        return Err(Error::InvalidDescriptor(
            "anti-triangular form needs concrete eigenvalues".into(),
        ));
    }
    let degrees = d.minimal_degrees();
    let c: usize = degrees.iter().sum();
    let p = degrees.len();
    let n = d.realized_size();
    let rho = n - 2 * c - p;
    let sizes = AntiSizes { c, rho, p };

    // Index map from the canonical direct sum into the permuted layout:
    // [0, c): rows of the L blocks (largest degree at the bottom-left),
    // [c, c+rho): regular part, [c+rho, n): columns of the L blocks.
    let mut perm = vec![0usize; n];
    let mut off = 0; // offset in the direct sum
    let mut row_off = c; // filled bottom-up
    let mut col_off = c + rho;
    let mut reg_off = c;
    for block in d.blocks() {
        match *block {
            CanonicalBlock::MinimalPair { d: deg } => {
                // first deg+1 indices of M_d are the columns of L_d,
                // the last deg are its rows
                for k in 0..=deg {
                    perm[off + k] = col_off + k;
                }
                row_off -= deg;
                for k in 0..deg {
                    perm[off + deg + 1 + k] = row_off + k;
                }
                col_off += deg + 1;
                off += 2 * deg + 1;
            }
            _ => {
                let size = block.realized_size();
                for k in 0..size {
                    perm[off + k] = reg_off + k;
                }
                reg_off += size;
                off += size;
            }
        }
    }

    let canonical = descriptor_to_pencil(d)?;
    let mut a = ComplexMatrix::zeros(n, n);
    let mut b = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(perm[i], perm[j])] = canonical.a()[(i, j)];
            b[(perm[i], perm[j])] = canonical.b()[(i, j)];
        }
    }
    let k = SymmetricPencil::new(Pencil::new(a, b)?)?;
    let pmat = ComplexMatrix::permutation(&perm);
    Ok((k, pmat, sizes))
}

/// Computes the anti-triangular form of `s` from a congruence witness `W`
/// satisfying `s = Wᵀ K W` with `K` the permuted canonical form of the
/// descriptor. The residual of that identity is checked against
/// `tol * ‖s‖` before factoring.
pub fn anti_triangular(
    s: &SymmetricPencil,
    descriptor: &StructureDescriptor,
    witness: &ComplexMatrix,
    tol: f64,
) -> Result<AntiTriangularForm> {
    let n = s.size();
    if witness.rows() != n || witness.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "witness is {}x{}, pencil has size {n}",
            witness.rows(),
            witness.cols()
        )));
    }
    let (k, _pmat, sizes) = permuted_canonical(descriptor)?;
    if sizes.total() != n {
        return Err(Error::DimensionMismatch(format!(
            "descriptor realizes size {}, pencil has size {n}",
            sizes.total()
        )));
    }

    let rebuilt = k.congruence(witness)?;
    let residual = rebuilt.pencil().sub(s.pencil())?.norm();
    let bound = tol * s.norm().max(1e-300);
    if residual > bound {
        return Err(Error::InvalidWitness {
            residual,
            tolerance: bound,
        });
    }

    // Wᵀ = Q̃ R with Q̃ unitary; then s = Qᵀ (R K Rᵀ) Q for Q = Q̃ᵀ.
    let (q_tilde, r) = qr_square(&witness.transpose());
    let q = q_tilde.transpose();

    let AntiSizes { c, rho, p } = sizes;
    let n1 = c;
    let n2 = c + rho;
    let r11 = r.submatrix(0, n1, 0, n1);
    let r12 = r.submatrix(0, n1, n1, n2);
    let r13 = r.submatrix(0, n1, n2, n);
    let r22 = r.submatrix(n1, n2, n1, n2);
    let r23 = r.submatrix(n1, n2, n2, n);
    let r33 = r.submatrix(n2, n, n2, n);

    let l_pencil = Pencil::new(
        k.a().submatrix(0, n1, n2, n),
        k.b().submatrix(0, n1, n2, n),
    )?;
    let j_pencil = Pencil::new(
        k.a().submatrix(n1, n2, n1, n2),
        k.b().submatrix(n1, n2, n1, n2),
    )?;

    let lt = l_pencil.transpose();
    let z11 = conjugate_pencil(&r13, &lt, &r11.transpose())
        .add(&conjugate_pencil(&r12, &j_pencil, &r12.transpose()))?
        .add(&conjugate_pencil(&r11, &l_pencil, &r13.transpose()))?;
    let z12 = conjugate_pencil(&r12, &j_pencil, &r22.transpose())
        .add(&conjugate_pencil(&r11, &l_pencil, &r23.transpose()))?;
    let z13 = conjugate_pencil(&r11, &l_pencil, &r33.transpose());
    let z22 = conjugate_pencil(&r22, &j_pencil, &r22.transpose());

    let a_part = SymmetricPencil::new(Pencil::new(
        z11.a().symmetrize(),
        z11.b().symmetrize(),
    )?)?;
    let s_reg = SymmetricPencil::new(Pencil::new(
        z22.a().symmetrize(),
        z22.b().symmetrize(),
    )?)?;
    let _ = p;

    Ok(AntiTriangularForm {
        q,
        a_part,
        b_part: z12,
        s_reg,
        s_right: z13,
        sizes,
    })
}
