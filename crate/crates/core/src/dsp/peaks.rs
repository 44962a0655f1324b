/// Local maxima (or minima, for [`find_troughs`]) that passed a prominence threshold.
///
/// `left_bases`/`right_bases` are the positions of the minima that define each
/// prominence; `values` are always amplitudes of the signal that was passed in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PeakSet {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub prominences: Vec<f64>,
    pub left_bases: Vec<usize>,
    pub right_bases: Vec<usize>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Left-most sample of every strict local maximum, plateaus included.
/// A plateau touching either end of the signal is not a maximum.
fn local_maxima(x: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let mut i = 1;
    while i < n - 1 {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead < n - 1 && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                out.push(i);
            }
            i = ahead;
        } else {
            i += 1;
        }
    }
    out
}

/// Range-minimum table returning the left-most position of the minimum.
struct MinTable<'a> {
    x: &'a [f64],
    levels: Vec<Vec<usize>>,
}

impl<'a> MinTable<'a> {
    fn new(x: &'a [f64]) -> Self {
        let mut levels = vec![(0..x.len()).collect::<Vec<_>>()];
        let mut span = 1;
        while 2 * span <= x.len() {
            let prev = levels.last().unwrap();
            let next = (0..=x.len() - 2 * span).map(|i| Self::pick(x, prev[i], prev[i + span])).collect();
            levels.push(next);
            span *= 2;
        }
        Self { x, levels }
    }

    fn pick(x: &[f64], a: usize, b: usize) -> usize {
        if x[b] < x[a] || (x[b] == x[a] && b < a) {
            b
        } else {
            a
        }
    }

    /// Inclusive range.
    fn argmin(&self, lo: usize, hi: usize) -> usize {
        let len = hi - lo + 1;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        let lvl = &self.levels[k];
        Self::pick(self.x, lvl[lo], lvl[hi + 1 - (1 << k)])
    }
}

/// Finds every local maximum whose topographic prominence is at least
/// `min_prominence`. The prominence search window is the whole signal.
pub fn find_peaks(signal: &[f64], min_prominence: f64) -> PeakSet {
    let n = signal.len();
    let candidates = local_maxima(signal);
    if candidates.is_empty() {
        return PeakSet::default();
    }

    // Nearest strictly higher sample on each side, via monotone stacks.
    let mut higher_left = vec![None; n];
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..n {
        while let Some(&top) = stack.last() {
            if signal[top] <= signal[i] {
                stack.pop();
            } else {
                break;
            }
        }
        higher_left[i] = stack.last().copied();
        stack.push(i);
    }
    let mut higher_right = vec![None; n];
    stack.clear();
    for i in (0..n).rev() {
        while let Some(&top) = stack.last() {
            if signal[top] <= signal[i] {
                stack.pop();
            } else {
                break;
            }
        }
        higher_right[i] = stack.last().copied();
        stack.push(i);
    }

    let table = MinTable::new(signal);
    let mut out = PeakSet::default();
    for p in candidates {
        let lo = higher_left[p].map_or(0, |h| h + 1);
        let hi = higher_right[p].map_or(n - 1, |h| h - 1);
        let left_base = table.argmin(lo, p);
        let right_base = table.argmin(p, hi);
        let reference = signal[left_base].max(signal[right_base]);
        let prominence = signal[p] - reference;
        if prominence >= min_prominence {
            out.indices.push(p);
            out.values.push(signal[p]);
            out.prominences.push(prominence);
            out.left_bases.push(left_base);
            out.right_bases.push(right_base);
        }
    }
    out
}

/// Local minima of `signal`, found as peaks of the negated signal.
pub fn find_troughs(signal: &[f64], min_prominence: f64) -> PeakSet {
    let negated: Vec<f64> = signal.iter().map(|v| -v).collect();
    let mut set = find_peaks(&negated, min_prominence);
    for v in &mut set.values {
        *v = -*v;
    }
    set
}

/// Width of a peak at `reference` height, in fractional samples, bounded by the
/// peak's bases. Crossings are located by linear interpolation.
pub fn half_height_width(
    signal: &[f64],
    peak: usize,
    reference: f64,
    left_base: usize,
    right_base: usize,
) -> (f64, f64) {
    let mut i = peak;
    while i > left_base && signal[i] > reference {
        i -= 1;
    }
    let mut left = i as f64;
    if signal[i] < reference {
        left += (reference - signal[i]) / (signal[i + 1] - signal[i]);
    }
    let mut j = peak;
    while j < right_base && signal[j] > reference {
        j += 1;
    }
    let mut right = j as f64;
    if signal[j] < reference {
        right -= (reference - signal[j]) / (signal[j - 1] - signal[j]);
    }
    (left, right)
}
