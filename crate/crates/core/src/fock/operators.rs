use crate::error::Result;
use crate::params::Truncation;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
    C,
}

/// Annihilation operator of `mode` embedded in the three-mode tensor space,
/// with <n-1|op|n> = sqrt(n).
pub fn build_mode_operator(mode: Mode, trunc: &Truncation, dim_cap: usize) -> Result<CsrMatrix> {
    trunc.validate(dim_cap)?;
    Ok(mode_operator(mode, trunc))
}

pub(crate) fn mode_operator(mode: Mode, trunc: &Truncation) -> CsrMatrix {
    let d = trunc.dim();
    let mut t = Vec::with_capacity(d);
    for i in 0..d {
        let (na, nb, nc) = trunc.occupations(i);
        let (n, j) = match mode {
            Mode::A if na > 0 => (na, trunc.index(na - 1, nb, nc)),
            Mode::B if nb > 0 => (nb, trunc.index(na, nb - 1, nc)),
            Mode::C if nc > 0 => (nc, trunc.index(na, nb, nc - 1)),
            _ => continue,
        };
        t.push((j, i, (n as f64).sqrt()));
    }
    CsrMatrix::from_triplets(d, d, &t)
}

/// Sparse product of two square matrices.
pub(crate) fn matmul(x: &CsrMatrix, y: &CsrMatrix) -> CsrMatrix {
    let mut t = Vec::new();
    for r in 0..x.nrows() {
        for (k, xv) in x.row(r) {
            for (c, yv) in y.row(k) {
                t.push((r, c, xv * yv));
            }
        }
    }
    CsrMatrix::from_triplets(x.nrows(), y.ncols(), &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::DEFAULT_DIM_CAP;

    #[test]
    fn mode_a_single_excitation() {
        let t = Truncation::new(1, 1, 1);
        let a = build_mode_operator(Mode::A, &t, DEFAULT_DIM_CAP).unwrap();
        for nb in 0..2 {
            for nc in 0..2 {
                assert_eq!(a.get(t.index(0, nb, nc), t.index(1, nb, nc)), 1.0);
            }
        }
        assert_eq!(a.nnz(), 4);
    }

    #[test]
    fn mode_b_ladder_elements() {
        let t = Truncation::new(1, 2, 1);
        let b = build_mode_operator(Mode::B, &t, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(b.get(t.index(0, 0, 0), t.index(0, 1, 0)), 1.0);
        assert!((b.get(t.index(1, 1, 1), t.index(1, 2, 1)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.get(t.index(0, 1, 0), t.index(0, 0, 0)), 0.0);
    }

    #[test]
    fn commutator_is_identity_except_edge() {
        let t = Truncation::new(3, 2, 4);
        for mode in [Mode::A, Mode::B, Mode::C] {
            let x = mode_operator(mode, &t);
            let xd = x.transpose();
            let xxd = matmul(&x, &xd);
            let xdx = matmul(&xd, &x);
            for i in 0..t.dim() {
                let (na, nb, nc) = t.occupations(i);
                let (n, top) = match mode {
                    Mode::A => (na, t.n_a),
                    Mode::B => (nb, t.n_b),
                    Mode::C => (nc, t.n_c),
                };
                for j in 0..t.dim() {
                    let comm = xxd.get(i, j) - xdx.get(i, j);
                    let expect = match (i == j, n == top) {
                        (false, _) => 0.0,
                        (true, false) => 1.0,
                        (true, true) => -(top as f64),
                    };
                    assert!((comm - expect).abs() < 1e-12, "{mode:?} ({i},{j})");
                }
            }
        }
    }
}
