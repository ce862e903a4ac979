//! Upper envelope of a finite family of lines over an interval, and the
//! exact integral of its square. Used cell by cell for the maximal-function
//! integrals, where the candidates are the signed prefix sums.

/// A line y = slope * x + intercept.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

fn intersection(a: Line, b: Line) -> f64 {
    (b.intercept - a.intercept) / (a.slope - b.slope)
}

/// Pieces of the upper envelope over [x_lo, x_hi]: (start, line), sorted by
/// start; each piece extends to the next start (the last to x_hi).
pub fn upper_envelope(lines: &[Line], x_lo: f64, x_hi: f64) -> Vec<(f64, Line)> {
    assert!(x_hi >= x_lo);
    assert!(!lines.is_empty());
    // Sort by slope; among equal slopes only the largest intercept matters.
    let mut sorted = lines.to_vec();
    sorted.sort_by(|a, b| {
        a.slope
            .partial_cmp(&b.slope)
            .unwrap()
            .then(a.intercept.partial_cmp(&b.intercept).unwrap())
    });
    let mut hull: Vec<Line> = Vec::with_capacity(sorted.len());
    for l in sorted {
        while let Some(&top) = hull.last() {
            if l.slope == top.slope {
                // same slope, l has the larger intercept
                hull.pop();
                continue;
            }
            if hull.len() >= 2 {
                let below = hull[hull.len() - 2];
                // top becomes irrelevant when l overtakes it no later than
                // top overtakes the line below it
                if intersection(l, below) <= intersection(top, below) {
                    hull.pop();
                    continue;
                }
            }
            break;
        }
        hull.push(l);
    }
    // Breakpoints between consecutive hull lines, then clip to the interval.
    let mut pieces: Vec<(f64, Line)> = Vec::with_capacity(hull.len());
    let mut start = f64::NEG_INFINITY;
    for (i, &l) in hull.iter().enumerate() {
        let begin = if i == 0 {
            f64::NEG_INFINITY
        } else {
            intersection(l, hull[i - 1])
        };
        start = start.max(begin);
        pieces.push((start, l));
    }
    let mut clipped: Vec<(f64, Line)> = Vec::new();
    for (i, &(begin, l)) in pieces.iter().enumerate() {
        let end = pieces.get(i + 1).map(|&(b, _)| b).unwrap_or(f64::INFINITY);
        if end <= x_lo || begin >= x_hi {
            continue;
        }
        clipped.push((begin.max(x_lo), l));
    }
    if clipped.is_empty() {
        // degenerate interval: evaluate at the point
        let best = hull
            .iter()
            .copied()
            .max_by(|a, b| a.at(x_lo).partial_cmp(&b.at(x_lo)).unwrap())
            .unwrap();
        clipped.push((x_lo, best));
    }
    clipped
}

/// Exact integral of (a x + b)^2 over [u, v].
fn segment_sq_integral(l: Line, u: f64, v: f64) -> f64 {
    if l.slope == 0.0 {
        return l.intercept * l.intercept * (v - u);
    }
    let fu = l.at(u);
    let fv = l.at(v);
    (fv * fv * fv - fu * fu * fu) / (3.0 * l.slope)
}

/// Integral of the squared upper envelope of `lines` over [x_lo, x_hi].
pub fn envelope_sq_integral(lines: &[Line], x_lo: f64, x_hi: f64) -> f64 {
    let pieces = upper_envelope(lines, x_lo, x_hi);
    let mut total = 0.0;
    for (i, &(begin, l)) in pieces.iter().enumerate() {
        let end = pieces.get(i + 1).map(|&(b, _)| b).unwrap_or(x_hi);
        let end = end.min(x_hi);
        if end > begin {
            total += segment_sq_integral(l, begin, end);
        }
    }
    total
}
