//! The four quadratic generator families over a mode pair `(i, j)`:
//!
//! ```text
//! hopping-re:  a†_i a_j + a†_j a_i        hopping-im:  i (a†_i a_j - a†_j a_i)
//! pairing-re:  a_i a_j + a†_i a†_j        pairing-im:  i (a_i a_j - a†_i a†_j)
//! ```
//!
//! Real linear combinations of these (per field) generate every Bogolyubov
//! transformation of the two-field system. Both realizations are provided:
//! the exact coefficient form, and the truncated Fock matrix assembled from
//! embedded ladder operators. The two routes are independent by construction
//! and cross-validated in the tests.

use num_complex::Complex64;
use rand::Rng;

use crate::coeff::CoefficientMatrix;
use crate::error::{Error, Result};
use crate::fock::{embed_operator, ladder_matrix, CsMat, Field, FockOperator, ModeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuadKind {
    HoppingRe,
    HoppingIm,
    PairingRe,
    PairingIm,
}

pub const QUAD_KINDS: [QuadKind; 4] =
    [QuadKind::HoppingRe, QuadKind::HoppingIm, QuadKind::PairingRe, QuadKind::PairingIm];

impl QuadKind {
    /// Conventional 1-based index of the family.
    pub fn from_index(xi: u8) -> Result<Self> {
        match xi {
            1 => Ok(QuadKind::HoppingRe),
            2 => Ok(QuadKind::HoppingIm),
            3 => Ok(QuadKind::PairingRe),
            4 => Ok(QuadKind::PairingIm),
            _ => Err(Error::InvalidParameter(format!("generator index {xi} not in 1..=4"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            QuadKind::HoppingRe => 1,
            QuadKind::HoppingIm => 2,
            QuadKind::PairingRe => 3,
            QuadKind::PairingIm => 4,
        }
    }
}

fn check_modes(i: usize, j: usize, n_modes: usize) -> Result<()> {
    if i >= n_modes || j >= n_modes {
        return Err(Error::SlotOutOfRange { slot: i.max(j), n_slots: n_modes });
    }
    Ok(())
}

/// Exact coefficient representation of one generator on one field.
pub fn generator_coeff(
    kind: QuadKind,
    i: usize,
    j: usize,
    field: Field,
    labels: &[f64],
) -> Result<CoefficientMatrix> {
    check_modes(i, j, labels.len())?;
    let m = labels.len();
    let off = match field {
        Field::A => 0,
        Field::B => m,
    };
    let (si, sj) = (off + i, off + j);
    let one = Complex64::new(1.0, 0.0);
    let im = Complex64::new(0.0, 1.0);
    let mut k = CoefficientMatrix::zero(labels);
    match kind {
        QuadKind::HoppingRe => {
            k.add_number_term(si, sj, one);
            k.add_number_term(sj, si, one);
        }
        QuadKind::HoppingIm => {
            k.add_number_term(si, sj, im);
            k.add_number_term(sj, si, -im);
        }
        QuadKind::PairingRe => {
            k.add_raising_term(si, sj, one);
            k.add_lowering_term(si, sj, one);
        }
        QuadKind::PairingIm => {
            k.add_lowering_term(si, sj, im);
            k.add_raising_term(si, sj, -im);
        }
    }
    Ok(k)
}

/// Truncated Fock realization of one generator, assembled from embedded
/// ladder matrices and sparse products.
pub fn generator_fock(
    kind: QuadKind,
    i: usize,
    j: usize,
    field: Field,
    modeset: &ModeSet,
) -> Result<FockOperator> {
    check_modes(i, j, modeset.n_modes())?;
    let ladder = ladder_matrix(modeset.cutoff())?;
    let ai = embed_operator(&ladder, modeset.slot(field, i), modeset)?.mat;
    let aj = embed_operator(&ladder, modeset.slot(field, j), modeset)?.mat;
    let adi = ai.adjoint();
    let adj = aj.adjoint();
    let one = Complex64::new(1.0, 0.0);
    let im = Complex64::new(0.0, 1.0);
    let mat: CsMat = match kind {
        QuadKind::HoppingRe => adi.matmul(&aj).combine(one, &adj.matmul(&ai), one),
        QuadKind::HoppingIm => adi.matmul(&aj).combine(im, &adj.matmul(&ai), -im),
        QuadKind::PairingRe => ai.matmul(&aj).combine(one, &adi.matmul(&adj), one),
        QuadKind::PairingIm => ai.matmul(&aj).combine(im, &adi.matmul(&adj), -im),
    };
    Ok(FockOperator::new(mat))
}

/// Real coefficient table over generator terms `(kind, i, j)` for one field.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeneratorTable {
    pub terms: Vec<(QuadKind, usize, usize, f64)>,
}

impl GeneratorTable {
    pub fn new(terms: Vec<(QuadKind, usize, usize, f64)>) -> Self {
        GeneratorTable { terms }
    }

    /// One term per independent generator, coefficients uniform in
    /// `[-strength, strength]`. The draw order is fixed, so a seeded RNG
    /// yields a reproducible table.
    pub fn random<R: Rng>(rng: &mut R, n_modes: usize, strength: f64) -> Self {
        let mut terms = Vec::new();
        for kind in QUAD_KINDS {
            for i in 0..n_modes {
                for j in i..n_modes {
                    if kind == QuadKind::HoppingIm && i == j {
                        continue; // identically zero generator
                    }
                    let v = if strength > 0.0 {
                        rng.gen_range(-strength..=strength)
                    } else {
                        0.0
                    };
                    terms.push((kind, i, j, v));
                }
            }
        }
        GeneratorTable { terms }
    }
}

/// Assemble the two-field generator `H = sum D G (field A) + sum D̃ G̃ (field B)`.
///
/// Interchanging the fields maps one sum onto the other, so the result is
/// field-symmetric exactly when the two tables agree; query it through
/// [`CoefficientMatrix::is_field_symmetric`].
pub fn assemble_hamiltonian(
    d: &GeneratorTable,
    d_tilde: &GeneratorTable,
    labels: &[f64],
) -> Result<CoefficientMatrix> {
    let mut h = CoefficientMatrix::zero(labels);
    for (table, field) in [(d, Field::A), (d_tilde, Field::B)] {
        for &(kind, i, j, v) in &table.terms {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "coefficient for ({:?}, {i}, {j}) is not a finite real number",
                    kind
                )));
            }
            let g = generator_coeff(kind, i, j, field, labels)?;
            h = h.add(&g.scale(Complex64::new(v, 0.0)))?;
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::quad_bracket;
    use crate::fock::FockVector;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hopping_re_diagonal_counts_twice() {
        // G(1)_ii |n> = 2n |n>
        let ms = ModeSet::new(&[1.0], 4).unwrap();
        let g = generator_fock(QuadKind::HoppingRe, 0, 0, Field::A, &ms).unwrap();
        for n in 0..=4 {
            let st = FockVector::basis_state(&ms, &[n, 0]).unwrap();
            let out = g.apply(&st).unwrap();
            let got = out.amplitudes[ms.index_of(&[n, 0])];
            assert!((got - c(2.0 * n as f64, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn hopping_im_vanishes_on_diagonal() {
        let k = generator_coeff(QuadKind::HoppingIm, 0, 0, Field::A, &[1.0]).unwrap();
        assert_eq!(k.norm(), 0.0);
        let ms = ModeSet::new(&[1.0], 3).unwrap();
        let g = generator_fock(QuadKind::HoppingIm, 0, 0, Field::A, &ms).unwrap();
        assert_eq!(g.mat.nnz(), 0);
    }

    #[test]
    fn pairing_re_creates_cross_pair_from_vacuum() {
        let ms = ModeSet::new(&[1.0, -1.0], 3).unwrap();
        let g = generator_fock(QuadKind::PairingRe, 0, 1, Field::A, &ms).unwrap();
        let out = g.apply(&FockVector::vacuum(&ms)).unwrap();
        let target = ms.index_of(&[1, 1, 0, 0]);
        assert_eq!(out.amplitudes[target], c(1.0, 0.0));
        assert!((out.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn all_generators_hermitian_in_both_representations() {
        let ms = ModeSet::new(&[1.0, -1.0], 3).unwrap();
        for kind in QUAD_KINDS {
            for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                for field in [Field::A, Field::B] {
                    let k = generator_coeff(kind, i, j, field, ms.labels()).unwrap();
                    assert!(k.is_hermitian(), "{kind:?} coeff not hermitian");
                    let g = generator_fock(kind, i, j, field, &ms).unwrap();
                    assert!(g.hermitian, "{kind:?} fock not hermitian");
                }
            }
        }
    }

    #[test]
    fn coeff_to_fock_matches_direct_fock_on_interior() {
        // representation round-trip at cutoff 4, every family and index pair
        let ms = ModeSet::new(&[1.0, -1.0], 4).unwrap();
        let interior = ms.interior_indices(2);
        for kind in QUAD_KINDS {
            for (i, j) in [(0, 0), (0, 1), (1, 1)] {
                for field in [Field::A, Field::B] {
                    let via_coeff = generator_coeff(kind, i, j, field, ms.labels())
                        .unwrap()
                        .to_fock(&ms)
                        .unwrap();
                    let direct = generator_fock(kind, i, j, field, &ms).unwrap();
                    let diff = via_coeff.mat.combine(c(1.0, 0.0), &direct.mat, c(-1.0, 0.0));
                    let d = diff.to_dense();
                    let mut max = 0.0f64;
                    for &r in &interior {
                        for &cc in &interior {
                            max = max.max(d[(r, cc)].norm());
                        }
                    }
                    assert!(max < 1e-14, "{kind:?} ({i},{j}) interior mismatch {max}");
                }
            }
        }
    }

    #[test]
    fn representation_is_linear() {
        let labels = [1.0, -1.0];
        let g1 = generator_coeff(QuadKind::HoppingRe, 0, 1, Field::A, &labels).unwrap();
        let g2 = generator_coeff(QuadKind::PairingIm, 0, 0, Field::B, &labels).unwrap();
        let sum = g1.scale(c(2.5, 0.0)).add(&g2.scale(c(-0.5, 0.0))).unwrap();
        let expect = assemble_hamiltonian(
            &GeneratorTable::new(vec![(QuadKind::HoppingRe, 0, 1, 2.5)]),
            &GeneratorTable::new(vec![(QuadKind::PairingIm, 0, 0, -0.5)]),
            &labels,
        )
        .unwrap();
        let diff = sum.add(&expect.scale(c(-1.0, 0.0))).unwrap();
        assert_eq!(diff.norm(), 0.0);
    }

    #[test]
    fn quad_bracket_matches_fock_commutator_on_interior() {
        // the coefficient-space bracket against a brute-force Fock commutator
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for cutoff in [4usize, 6] {
            let ms = ModeSet::new(&[1.0, -1.0], cutoff).unwrap();
            for _ in 0..3 {
                let t1 = GeneratorTable::random(&mut rng, 2, 0.8);
                let t2 = GeneratorTable::random(&mut rng, 2, 0.8);
                let u1 = GeneratorTable::random(&mut rng, 2, 0.8);
                let u2 = GeneratorTable::random(&mut rng, 2, 0.8);
                let k1 = assemble_hamiltonian(&t1, &t2, ms.labels()).unwrap();
                let k2 = assemble_hamiltonian(&u1, &u2, ms.labels()).unwrap();

                let bracket = quad_bracket(&k1, &k2).unwrap().to_fock(&ms).unwrap();
                let f1 = k1.to_fock(&ms).unwrap();
                let f2 = k2.to_fock(&ms).unwrap();
                let comm = f1.mat.matmul(&f2.mat).combine(
                    c(1.0, 0.0),
                    &f2.mat.matmul(&f1.mat),
                    c(-1.0, 0.0),
                );

                let interior = ms.interior_indices(2);
                let db = bracket.mat.to_dense();
                let dc = comm.to_dense();
                let mut num = 0.0f64;
                let mut den = 0.0f64;
                for &r in &interior {
                    for &cc in &interior {
                        num += (db[(r, cc)] - dc[(r, cc)]).norm_sqr();
                        den += dc[(r, cc)].norm_sqr();
                    }
                }
                let rel = num.sqrt() / den.sqrt().max(1e-300);
                assert!(rel < 1e-12, "interior bracket mismatch {rel} at cutoff {cutoff}");
            }
        }
    }

    #[test]
    fn non_finite_coefficients_are_rejected() {
        let table = GeneratorTable::new(vec![(QuadKind::PairingRe, 0, 0, f64::NAN)]);
        assert!(assemble_hamiltonian(&table, &table, &[1.0]).is_err());
    }

    #[test]
    fn assemble_zero_is_zero() {
        let labels = [1.0];
        let empty = GeneratorTable::default();
        let h = assemble_hamiltonian(&empty, &empty, &labels).unwrap();
        assert_eq!(h.norm(), 0.0);
        assert!(h.is_field_symmetric());
    }

    #[test]
    fn symmetry_flag_tracks_tables() {
        let labels = [1.0, -1.0];
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let d = GeneratorTable::random(&mut rng, 2, 0.5);
        let sym = assemble_hamiltonian(&d, &d, &labels).unwrap();
        assert!(sym.is_field_symmetric());

        // single pairing term on field A only
        let one_sided = assemble_hamiltonian(
            &GeneratorTable::new(vec![(QuadKind::PairingRe, 0, 0, 0.4)]),
            &GeneratorTable::default(),
            &labels,
        )
        .unwrap();
        assert!(!one_sided.is_field_symmetric());
    }

    #[test]
    fn field_swap_leaves_symmetric_entries_unchanged() {
        let labels = [1.0, -1.0];
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let d = GeneratorTable::random(&mut rng, 2, 0.5);
        let h = assemble_hamiltonian(&d, &d, &labels).unwrap();
        // explicit check on the assembled 2N x 2N entries
        let m = 2;
        let e = h.entries();
        let n = 2 * m;
        let swap = |p: usize| (p + m) % n;
        for p in 0..n {
            for q in 0..n {
                assert_eq!(e[(p, q)], e[(swap(p), swap(q))]);
                assert_eq!(e[(n + p, n + q)], e[(n + swap(p), n + swap(q))]);
            }
        }
        let _: DMatrix<Complex64> = e;
    }
}
