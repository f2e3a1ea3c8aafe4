//! Polar code construction and encoding.
//!
//! Bits are stored one per `u8` (0 or 1). Position `i` of the input vector
//! `u` maps to qubit `q_i` in the decoder circuit.

use crate::{Error, Result};

/// Dense matrix over GF(2), rows packed into `u64` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    /// Kronecker product over GF(2).
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                if !self.get(r1, c1) {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        if other.get(r2, c2) {
                            out.set(r1 * other.rows + r2, c1 * other.cols + c2, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch { expected: self.cols, actual: other.rows });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let (dst, src) = (r * out.words, other.row_words(k));
                    for (d, s) in out.data[dst..dst + out.words].iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix over GF(2).
    pub fn left_mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, actual: v.len() });
        }
        let mut acc = vec![0u64; self.words];
        for (r, &bit) in v.iter().enumerate() {
            if bit & 1 == 1 {
                for (a, s) in acc.iter_mut().zip(self.row_words(r)) {
                    *a ^= s;
                }
            }
        }
        Ok((0..self.cols).map(|c| ((acc[c / 64] >> (c % 64)) & 1) as u8).collect())
    }
}

/// `G_2^{⊗d}` with `G_2 = [[1,0],[1,1]]`.
pub fn build_generator(d: usize) -> Result<BitMatrix> {
    if !(1..=16).contains(&d) {
        return Err(Error::DepthOutOfRange(d));
    }
    let mut kernel = BitMatrix::zeros(2, 2);
    kernel.set(0, 0, true);
    kernel.set(1, 0, true);
    kernel.set(1, 1, true);
    let mut g = kernel.clone();
    for _ in 1..d {
        g = g.kron(&kernel);
    }
    Ok(g)
}

/// Frozen mask (`true` = frozen) from the BEC(0.5) Bhattacharyya recursion.
///
/// Data positions are the `k` smallest parameters; ties go to the lower index.
pub fn select_frozen(n: usize, k: usize) -> Result<Vec<bool>> {
    if n < 2 || !n.is_power_of_two() || k == 0 || k > n {
        return Err(Error::InvalidCode { n, k });
    }
    let mut z = vec![0.5f64];
    while z.len() < n {
        z = z.iter().flat_map(|&p| [2.0 * p - p * p, p * p]).collect();
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
    let mut frozen = vec![true; n];
    for &i in &order[..k] {
        frozen[i] = false;
    }
    Ok(frozen)
}

/// XOR operations of the encoder butterfly as `(source, destination)` pairs,
/// in execution order: stage strides 1, 2, ..., n/2, ascending destination
/// within a stage. Each pair performs `v[destination] ^= v[source]`.
pub fn butterfly_xors(n: usize) -> Vec<(usize, usize)> {
    let mut ops = Vec::with_capacity(n / 2 * n.trailing_zeros() as usize);
    let mut stride = 1;
    while stride < n {
        for i in (0..n).filter(|i| i & stride == 0) {
            ops.push((i + stride, i));
        }
        stride <<= 1;
    }
    ops
}

/// Encodes by running the butterfly XOR network in place.
pub fn encode_butterfly(u: &[u8]) -> Vec<u8> {
    let mut v = u.to_vec();
    for (src, dst) in butterfly_xors(v.len()) {
        v[dst] ^= v[src];
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarCode {
    n: usize,
    k: usize,
    d: usize,
    frozen_mask: Vec<bool>,
    data_positions: Vec<usize>,
    generator: BitMatrix,
}

impl PolarCode {
    /// Builds the code with the default reliability construction.
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let frozen = select_frozen(n, k)?;
        Self::with_frozen_mask(frozen)
    }

    pub fn with_frozen_mask(frozen_mask: Vec<bool>) -> Result<Self> {
        let n = frozen_mask.len();
        let k = frozen_mask.iter().filter(|f| !**f).count();
        if n < 2 || !n.is_power_of_two() || k == 0 {
            return Err(Error::InvalidCode { n, k });
        }
        let d = n.trailing_zeros() as usize;
        let generator = build_generator(d)?;
        let data_positions = (0..n).filter(|&i| !frozen_mask[i]).collect();
        Ok(PolarCode { n, k, d, frozen_mask, data_positions, generator })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen_mask
    }

    /// Non-frozen positions in ascending order.
    pub fn data_positions(&self) -> &[usize] {
        &self.data_positions
    }

    pub fn frozen_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| self.frozen_mask[i])
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// Scatters message bits into the data positions.
    pub fn input_vector(&self, m: &[u8]) -> Result<Vec<u8>> {
        if m.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, actual: m.len() });
        }
        let mut u = vec![0u8; self.n];
        for (&pos, &bit) in self.data_positions.iter().zip(m) {
            u[pos] = bit & 1;
        }
        Ok(u)
    }

    /// Returns `(u, x)` with `x = u·G_N`.
    pub fn encode(&self, m: &[u8]) -> Result<(Vec<u8>, Vec<u8>)> {
        let u = self.input_vector(m)?;
        let x = self.generator.left_mul_vec(&u)?;
        Ok((u, x))
    }

    /// Gathers the data positions of an input vector.
    pub fn extract_message(&self, u: &[u8]) -> Vec<u8> {
        self.data_positions.iter().map(|&p| u[p]).collect()
    }

    /// True when every frozen position of `u` is zero.
    pub fn is_valid_input(&self, u: &[u8]) -> bool {
        self.frozen_positions().all(|i| u[i] == 0)
    }

    /// Message bits of integer `index` (bit `j` of the index is `m_j`).
    pub fn message_from_index(&self, index: usize) -> Vec<u8> {
        (0..self.k).map(|j| ((index >> j) & 1) as u8).collect()
    }

    /// Basis-state index `Σ u_i 2^i` of the input vector for message `index`.
    pub fn basis_index_of_message(&self, index: usize) -> usize {
        self.data_positions
            .iter()
            .enumerate()
            .filter(|(j, _)| (index >> j) & 1 == 1)
            .fold(0, |acc, (_, &p)| acc | (1 << p))
    }

    /// Every codeword `x` in message-index order.
    pub fn codebook(&self) -> Result<Vec<Vec<u8>>> {
        if self.k > 20 {
            return Err(Error::EnumerationTooLarge(self.k));
        }
        (0..1usize << self.k)
            .map(|idx| self.encode(&self.message_from_index(idx)).map(|(_, x)| x))
            .collect()
    }
}

/// Unpacks a basis-state index into `n` bits, `q_0` first.
pub fn index_to_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> i) & 1) as u8).collect()
}

pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((b as usize & 1) << i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(m: &BitMatrix) -> Vec<Vec<u8>> {
        (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c) as u8).collect()).collect()
    }

    #[test]
    fn generator_small_depths() {
        assert_eq!(dense(&build_generator(1).unwrap()), vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(
            dense(&build_generator(2).unwrap()),
            vec![vec![1, 0, 0, 0], vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![1, 1, 1, 1]]
        );
    }

    #[test]
    fn generator_matches_subset_rule_and_is_involution() {
        for d in 1..=5 {
            let g = build_generator(d).unwrap();
            let n = 1 << d;
            for r in 0..n {
                for c in 0..n {
                    assert_eq!(g.get(r, c), c & !r == 0);
                }
                assert!(g.get(r, r));
            }
            assert_eq!(g.mul(&g).unwrap(), BitMatrix::identity(n));
        }
    }

    #[test]
    fn generator_depth_guard() {
        assert_eq!(build_generator(0), Err(Error::DepthOutOfRange(0)));
        assert_eq!(build_generator(17), Err(Error::DepthOutOfRange(17)));
    }

    fn data_of(mask: &[bool]) -> Vec<usize> {
        (0..mask.len()).filter(|&i| !mask[i]).collect()
    }

    #[test]
    fn frozen_selection_examples() {
        assert_eq!(data_of(&select_frozen(2, 2).unwrap()), vec![0, 1]);
        assert_eq!(data_of(&select_frozen(8, 4).unwrap()), vec![3, 5, 6, 7]);
        assert_eq!(data_of(&select_frozen(4, 1).unwrap()), vec![3]);
        // |160> = 0b1010_0000 lies in the valid subspace of the (8,4) code.
        let mask = select_frozen(8, 4).unwrap();
        assert!((0..8).filter(|i| 160 >> i & 1 == 1).all(|i| !mask[i]));
    }

    #[test]
    fn frozen_selection_rejects_bad_parameters() {
        assert!(select_frozen(6, 3).is_err());
        assert!(select_frozen(8, 0).is_err());
        assert!(select_frozen(8, 9).is_err());
        assert!(select_frozen(1, 1).is_err());
    }

    #[test]
    fn encode_examples() {
        let code = PolarCode::new(8, 4).unwrap();
        let (u, x) = code.encode(&[0, 0, 0, 0]).unwrap();
        assert_eq!(u, vec![0; 8]);
        assert_eq!(x, vec![0; 8]);

        let rate1 = PolarCode::new(2, 2).unwrap();
        assert_eq!(rate1.encode(&[0, 1]).unwrap().1, vec![1, 1]);

        assert_eq!(
            code.encode(&[1, 0]),
            Err(Error::LengthMismatch { expected: 4, actual: 2 })
        );
    }

    #[test]
    fn message_index_round_trip() {
        let code = PolarCode::new(8, 4).unwrap();
        for idx in 0..16 {
            let m = code.message_from_index(idx);
            let (u, _) = code.encode(&m).unwrap();
            assert_eq!(bits_to_index(&u), code.basis_index_of_message(idx));
            assert_eq!(code.extract_message(&u), m);
        }
    }

    proptest! {
        #[test]
        fn matrix_encoding_matches_butterfly(d in 1usize..=6, seed in any::<u64>()) {
            let n = 1 << d;
            let u: Vec<u8> = (0..n).map(|i| ((seed.rotate_left(i as u32) >> 3) & 1) as u8).collect();
            let g = build_generator(d).unwrap();
            prop_assert_eq!(g.left_mul_vec(&u).unwrap(), encode_butterfly(&u));
        }

        #[test]
        fn encoding_is_linear_and_involutive(a in 0usize..16, b in 0usize..16) {
            let code = PolarCode::new(8, 4).unwrap();
            let (ua, xa) = code.encode(&code.message_from_index(a)).unwrap();
            let (ub, xb) = code.encode(&code.message_from_index(b)).unwrap();
            let (_, xab) = code.encode(&code.message_from_index(a ^ b)).unwrap();
            let sum: Vec<u8> = xa.iter().zip(&xb).map(|(p, q)| p ^ q).collect();
            prop_assert_eq!(xab, sum);
            prop_assert_eq!(code.generator().left_mul_vec(&xa).unwrap(), ua.clone());
            prop_assert!(code.is_valid_input(&ua) && code.is_valid_input(&ub));
        }
    }

    #[test]
    fn involution_exhaustive_n16() {
        let g = build_generator(4).unwrap();
        for idx in 0..1usize << 16 {
            let u = index_to_bits(idx, 16);
            let x = g.left_mul_vec(&u).unwrap();
            assert_eq!(g.left_mul_vec(&x).unwrap(), u);
        }
    }
}
