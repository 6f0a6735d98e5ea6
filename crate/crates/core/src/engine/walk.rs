//! Window maximization over `±1` walks.
//!
//! The largest `|sum|` over contiguous windows of a `±1` sequence equals
//! `max_j P_j - min_j P_j` over its prefix sums `P_0 = 0, P_1, ..., P_L`.
//! The lexicographically smallest maximizing window starts right after the
//! earlier of the first maximum and the first minimum, and ends at the later
//! one.

use crate::error::{Error, Result};
use crate::sequence::{tail_mask, WORD_BITS};

/// Prefix sums `P_0 = 0, ..., P_L` of a `±1` sequence of length `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixArray {
    values: Vec<i64>,
}

impl PrefixArray {
    pub fn from_steps(steps: impl IntoIterator<Item = i8>) -> Result<Self> {
        let mut values = vec![0i64];
        for (j, step) in steps.into_iter().enumerate() {
            if step != 1 && step != -1 {
                return Err(Error::domain(
                    "unit steps",
                    format!("step {} is {step}", j + 1),
                ));
            }
            values.push(values[j] + i64::from(step));
        }
        Self::from_values(values)
    }

    pub fn from_values(values: Vec<i64>) -> Result<Self> {
        if values.first() != Some(&0) {
            return Err(Error::domain("P_0 = 0", format!("{:?}", values.first())));
        }
        if values.len() < 2 {
            return Err(Error::domain("window range L >= 1", "no steps"));
        }
        if let Some(j) = values.windows(2).position(|w| (w[1] - w[0]).abs() != 1) {
            return Err(Error::domain(
                "unit steps",
                format!("P_{} - P_{} = {}", j + 1, j, values[j + 1] - values[j]),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Window range length `L`.
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }
}

/// Largest `|sum|` over windows and the lexicographically smallest 1-based
/// window `(m1, m2)` attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowMax {
    pub value: u64,
    pub m1: usize,
    pub m2: usize,
}

pub fn window_max_abs(prefix: &PrefixArray) -> WindowMax {
    let mut ext = Extremes::default();
    for (j, &p) in prefix.values.iter().enumerate().skip(1) {
        let p = p as i32;
        if p > ext.max {
            ext.max = p;
            ext.argmax = j as u32;
        }
        if p < ext.min {
            ext.min = p;
            ext.argmin = j as u32;
        }
    }
    ext.window()
}

/// First-occurrence extremes of a walk starting at `P_0 = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Extremes {
    pub max: i32,
    pub argmax: u32,
    pub min: i32,
    pub argmin: u32,
}

impl Extremes {
    pub fn window(&self) -> WindowMax {
        let (lo, hi) = if self.argmax < self.argmin {
            (self.argmax, self.argmin)
        } else {
            (self.argmin, self.argmax)
        };
        WindowMax {
            value: (self.max - self.min) as u64,
            m1: lo as usize + 1,
            m2: hi as usize,
        }
    }
}

/// Walk summary of one byte of product bits (bit set = step -1), LSB first.
#[derive(Clone, Copy)]
struct ByteWalk {
    sum: i8,
    max: i8,
    min: i8,
    argmax: u8,
    argmin: u8,
}

const fn byte_walk(b: u8) -> ByteWalk {
    let mut p: i8 = 0;
    let mut w = ByteWalk {
        sum: 0,
        max: i8::MIN,
        min: i8::MAX,
        argmax: 0,
        argmin: 0,
    };
    let mut j = 0;
    while j < 8 {
        p += if (b >> j) & 1 == 1 { -1 } else { 1 };
        if p > w.max {
            w.max = p;
            w.argmax = j + 1;
        }
        if p < w.min {
            w.min = p;
            w.argmin = j + 1;
        }
        j += 1;
    }
    w.sum = p;
    w
}

static BYTE_WALKS: [ByteWalk; 256] = {
    let mut t = [ByteWalk {
        sum: 0,
        max: 0,
        min: 0,
        argmax: 0,
        argmin: 0,
    }; 256];
    let mut b = 0;
    while b < 256 {
        t[b] = byte_walk(b as u8);
        b += 1;
    }
    t
};

/// Product words `a[w] ^ b[w]` covering the first `len` bits, with bits past
/// `len` cleared.
#[inline(always)]
fn product_words<'a>(a: &'a [u64], b: &'a [u64], len: usize) -> impl Iterator<Item = u64> + 'a {
    let nw = len.div_ceil(WORD_BITS);
    let mask = tail_mask(len);
    a[..nw]
        .iter()
        .zip(&b[..nw])
        .enumerate()
        .map(move |(w, (x, y))| if w + 1 == nw { (x ^ y) & mask } else { x ^ y })
}

/// `max P - min P` for the walk of `a ^ b` over its first `len` bits.
#[inline]
pub(crate) fn xor_range(a: &[u64], b: &[u64], len: usize) -> u32 {
    let (mut p, mut hi, mut lo) = (0i32, 0i32, 0i32);
    let full_bytes = len / 8;
    let mut byte_idx = 0;
    let mut last = 0u64;
    for word in product_words(a, b, len) {
        let mut x = word;
        let take = (full_bytes - byte_idx).min(8);
        for _ in 0..take {
            let t = BYTE_WALKS[(x & 0xff) as usize];
            hi = hi.max(p + i32::from(t.max));
            lo = lo.min(p + i32::from(t.min));
            p += i32::from(t.sum);
            x >>= 8;
        }
        byte_idx += take;
        last = x;
    }
    for _ in 0..len % 8 {
        p += if last & 1 == 1 { -1 } else { 1 };
        hi = hi.max(p);
        lo = lo.min(p);
        last >>= 1;
    }
    (hi - lo) as u32
}

/// First-occurrence extremes of the walk of `a ^ b` over its first `len` bits.
pub(crate) fn xor_extremes(a: &[u64], b: &[u64], len: usize) -> Extremes {
    let mut e = Extremes::default();
    let mut p = 0i32;
    let mut pos = 0u32;
    let full_bytes = len / 8;
    let mut byte_idx = 0;
    let mut last = 0u64;
    for word in product_words(a, b, len) {
        let mut x = word;
        let take = (full_bytes - byte_idx).min(8);
        for _ in 0..take {
            let t = BYTE_WALKS[(x & 0xff) as usize];
            if p + i32::from(t.max) > e.max {
                e.max = p + i32::from(t.max);
                e.argmax = pos + u32::from(t.argmax);
            }
            if p + i32::from(t.min) < e.min {
                e.min = p + i32::from(t.min);
                e.argmin = pos + u32::from(t.argmin);
            }
            p += i32::from(t.sum);
            pos += 8;
            x >>= 8;
        }
        byte_idx += take;
        last = x;
    }
    for _ in 0..len % 8 {
        p += if last & 1 == 1 { -1 } else { 1 };
        pos += 1;
        if p > e.max {
            e.max = p;
            e.argmax = pos;
        }
        if p < e.min {
            e.min = p;
            e.argmin = pos;
        }
        last >>= 1;
    }
    e
}

/// Word `i` of `src` shifted down by `d` bits: bit `j` is bit `j + d` of
/// `src`, reading zeros past its end.
#[inline(always)]
pub(crate) fn shifted_word(src: &[u64], d: usize, i: usize) -> u64 {
    let (q, r) = (d / WORD_BITS, d % WORD_BITS);
    let lo = src.get(i + q).copied().unwrap_or(0);
    if r == 0 {
        return lo;
    }
    let hi = src.get(i + q + 1).copied().unwrap_or(0);
    (lo >> r) | (hi << (WORD_BITS - r))
}

pub(crate) fn shift_into(src: &[u64], d: usize, out: &mut [u64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = shifted_word(src, d, i);
    }
}

/// Cheap upper bound on the walk range of `acc ^ (src >> d)` over its first
/// `len` bits, from per-word popcounts: inside a 64-step block with `c`
/// down-steps the walk stays within `[P - c, P + 64 - c]` of its entry
/// value `P`.
pub(crate) fn shifted_range_bound(acc: &[u64], src: &[u64], d: usize, len: usize) -> u32 {
    let full = len / WORD_BITS;
    let (mut p, mut hi, mut lo) = (0i32, 0i32, 0i32);
    for (i, x) in acc[..full].iter().enumerate() {
        let c = (x ^ shifted_word(src, d, i)).count_ones() as i32;
        hi = hi.max(p + 64 - c);
        lo = lo.min(p - c);
        p += 64 - 2 * c;
    }
    let rem = len % WORD_BITS;
    if rem != 0 {
        let x = (acc[full] ^ shifted_word(src, d, full)) & tail_mask(len);
        let c = x.count_ones() as i32;
        hi = hi.max(p + rem as i32 - c);
        lo = lo.min(p - c);
    }
    (hi - lo) as u32
}

/// Signature shared by the block-bound implementations.
pub(crate) type RangeBound = fn(&[u64], &[u64], usize, usize) -> u32;

/// The fastest block-bound implementation the running CPU supports.
pub(crate) fn best_range_bound() -> RangeBound {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx512f")
            && std::arch::is_x86_feature_detected!("avx512vpopcntdq")
        {
            return avx512::shifted_range_bound;
        }
    }
    shifted_range_bound
}

#[cfg(target_arch = "x86_64")]
mod avx512 {
    use super::WORD_BITS;
    use std::arch::x86_64::*;

    /// Same value as [`super::shifted_range_bound`], eight words at a time.
    /// Only handed out by [`super::best_range_bound`] after feature detection.
    pub(super) fn shifted_range_bound(acc: &[u64], src: &[u64], d: usize, len: usize) -> u32 {
        // SAFETY: selected only when avx512f and avx512vpopcntdq are present.
        unsafe { bound(acc, src, d, len) }
    }

    #[target_feature(enable = "avx512f,avx512vpopcntdq")]
    unsafe fn bound(acc: &[u64], src: &[u64], d: usize, len: usize) -> u32 {
        let words = len.div_ceil(WORD_BITS);
        let (q, r) = (d / WORD_BITS, d % WORD_BITS);
        // Valid lanes read src up to index q + words; every engine row
        // carries a padding word that covers it.
        assert!(acc.len() >= words && src.len() > q + words);
        let zero = _mm512_setzero_si512();
        let ones = _mm512_set1_epi64(-1);
        let word_bits = _mm512_set1_epi64(WORD_BITS as i64);
        let last_lane = _mm512_set1_epi64(7);
        let down = _mm_cvtsi64_si128(r as i64);
        // A count of 64 clears the lane, which is what r = 0 needs.
        let up = _mm_cvtsi64_si128((WORD_BITS - r) as i64);
        // Bits of the walk left before lane j of the current chunk.
        let mut left = _mm512_sub_epi64(
            _mm512_set1_epi64(len as i64),
            _mm512_set_epi64(448, 384, 320, 256, 192, 128, 64, 0),
        );
        let chunk_bits = _mm512_set1_epi64(8 * WORD_BITS as i64);
        let mut carry = zero;
        let mut hi = zero;
        let mut lo = zero;
        for i in (0..words).step_by(8) {
            let valid: __mmask8 = if words - i >= 8 {
                0xff
            } else {
                (1u8 << (words - i)) - 1
            };
            // SAFETY: masked lanes are not read; valid lanes are in bounds
            // by the assert above.
            let (x, lo_words, hi_words) = unsafe {
                (
                    _mm512_maskz_loadu_epi64(valid, acc.as_ptr().add(i).cast()),
                    _mm512_maskz_loadu_epi64(valid, src.as_ptr().add(q + i).cast()),
                    _mm512_maskz_loadu_epi64(valid, src.as_ptr().add(q + i + 1).cast()),
                )
            };
            // Block length of each lane: 64, the tail length, or 0.
            let block = _mm512_min_epi64(_mm512_max_epi64(left, zero), word_bits);
            let keep = _mm512_andnot_si512(_mm512_sllv_epi64(ones, block), ones);
            let y = _mm512_or_si512(
                _mm512_srl_epi64(lo_words, down),
                _mm512_sll_epi64(hi_words, up),
            );
            let c = _mm512_popcnt_epi64(_mm512_and_si512(_mm512_xor_si512(x, y), keep));
            let step = _mm512_sub_epi64(block, _mm512_add_epi64(c, c));
            let mut incl = step;
            incl = _mm512_add_epi64(incl, _mm512_alignr_epi64::<7>(incl, zero));
            incl = _mm512_add_epi64(incl, _mm512_alignr_epi64::<6>(incl, zero));
            incl = _mm512_add_epi64(incl, _mm512_alignr_epi64::<4>(incl, zero));
            incl = _mm512_add_epi64(incl, carry);
            let entry = _mm512_sub_epi64(incl, step);
            hi = _mm512_max_epi64(hi, _mm512_sub_epi64(_mm512_add_epi64(entry, block), c));
            lo = _mm512_min_epi64(lo, _mm512_sub_epi64(entry, c));
            carry = _mm512_permutexvar_epi64(last_lane, incl);
            left = _mm512_sub_epi64(left, chunk_bits);
        }
        (_mm512_reduce_max_epi64(hi) - _mm512_reduce_min_epi64(lo)) as u32
    }
}
