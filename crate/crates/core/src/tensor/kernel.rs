use nalgebra::DMatrix;
use num_complex::Complex64;

use super::qubit_mask;

const MAX_BLOCK: usize = 1 << super::MAX_LOCAL_QUBITS;

/// A (possibly controlled) local matrix ready to be streamed over a register.
///
/// The matrix acts on `targets` of every basis sector whose `controls` match
/// their required values; other sectors are left alone when applied as a
/// gate and annihilated when applied as a Hermitian term.
#[derive(Debug, Clone)]
pub(crate) struct CompiledGate {
    n: usize,
    fixed_mask: usize,
    control_value: usize,
    offsets: Vec<usize>,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    /// Row-major dense block.
    Dense(Vec<Complex64>),
    Diagonal(Vec<Complex64>),
}

impl CompiledGate {
    /// Caller guarantees targets/controls are distinct and in range, and that
    /// `matrix` is `2^|targets|` square.
    pub(crate) fn new(
        n: usize,
        controls: &[(usize, bool)],
        targets: &[usize],
        matrix: &DMatrix<Complex64>,
    ) -> Self {
        let k = targets.len();
        let dim = 1 << k;
        debug_assert_eq!(matrix.nrows(), dim);
        let mut fixed_mask = 0;
        let mut control_value = 0;
        for &(q, v) in controls {
            fixed_mask |= qubit_mask(n, q);
            if v {
                control_value |= qubit_mask(n, q);
            }
        }
        let masks: Vec<usize> = targets.iter().map(|&q| qubit_mask(n, q)).collect();
        for m in &masks {
            fixed_mask |= m;
        }
        let offsets = (0..dim)
            .map(|local| {
                (0..k)
                    .filter(|t| (local >> (k - 1 - t)) & 1 == 1)
                    .map(|t| masks[t])
                    .sum()
            })
            .collect();
        let diagonal = (0..dim).all(|r| (0..dim).all(|c| r == c || matrix[(r, c)].norm() == 0.0));
        let kind = if diagonal {
            Kind::Diagonal((0..dim).map(|i| matrix[(i, i)]).collect())
        } else {
            let mut rm = Vec::with_capacity(dim * dim);
            for r in 0..dim {
                for c in 0..dim {
                    rm.push(matrix[(r, c)]);
                }
            }
            Kind::Dense(rm)
        };
        Self {
            n,
            fixed_mask,
            control_value,
            offsets,
            kind,
        }
    }

    /// Visits every base index: fixed bits cleared except required controls.
    #[inline]
    fn for_each_base(&self, mut f: impl FnMut(usize)) {
        let full = if self.n == 0 { 0 } else { usize::MAX >> (usize::BITS as usize - self.n) };
        let free = full & !self.fixed_mask;
        let mut s = 0usize;
        loop {
            f(s | self.control_value);
            if s == free {
                break;
            }
            s = s.wrapping_sub(free) & free;
        }
    }

    /// In-place `ψ ← G ψ` (identity outside the control sector).
    pub(crate) fn apply(&self, amps: &mut [Complex64]) {
        let offs = &self.offsets;
        match &self.kind {
            Kind::Diagonal(d) => self.for_each_base(|base| {
                for (o, p) in offs.iter().zip(d) {
                    amps[base + o] *= p;
                }
            }),
            Kind::Dense(u) => {
                let dim = offs.len();
                let mut buf = [Complex64::new(0.0, 0.0); MAX_BLOCK];
                self.for_each_base(|base| {
                    for j in 0..dim {
                        buf[j] = amps[base + offs[j]];
                    }
                    for r in 0..dim {
                        let row = &u[r * dim..(r + 1) * dim];
                        let mut acc = Complex64::new(0.0, 0.0);
                        for c in 0..dim {
                            acc += row[c] * buf[c];
                        }
                        amps[base + offs[r]] = acc;
                    }
                });
            }
        }
    }

    /// `dst += coef · (P_controls ⊗ M) src`.
    pub(crate) fn accumulate(&self, coef: f64, src: &[Complex64], dst: &mut [Complex64]) {
        let offs = &self.offsets;
        match &self.kind {
            Kind::Diagonal(d) => self.for_each_base(|base| {
                for (o, p) in offs.iter().zip(d) {
                    dst[base + o] += p * src[base + o] * coef;
                }
            }),
            Kind::Dense(u) => {
                let dim = offs.len();
                self.for_each_base(|base| {
                    for r in 0..dim {
                        let row = &u[r * dim..(r + 1) * dim];
                        let mut acc = Complex64::new(0.0, 0.0);
                        for c in 0..dim {
                            acc += row[c] * src[base + offs[c]];
                        }
                        dst[base + offs[r]] += acc * coef;
                    }
                });
            }
        }
    }
}
