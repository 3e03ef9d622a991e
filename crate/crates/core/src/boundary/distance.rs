//! Exact Euclidean nearest-site assignment on a pixel grid.
//!
//! Two separable passes. The column pass records, for every pixel, the
//! closest site in its own column. The row pass takes the lower envelope of
//! the parabolas `(x - x')² + dy(x')²` over the columns of one row, in exact
//! integer arithmetic. Ties resolve to the site with the smaller row, then
//! the smaller column.

/// Site coordinate as `(row, col)`.
pub type Site = (usize, usize);

/// Nearest site of every pixel, row-major. `None` everywhere when there are
/// no sites.
pub fn nearest_sites(width: usize, height: usize, is_site: &[bool]) -> Vec<Option<Site>> {
    assert_eq!(is_site.len(), width * height);
    let column_best = column_pass(width, height, is_site);
    let mut out = vec![None; width * height];
    let mut stack: Vec<(usize, i64)> = Vec::with_capacity(width);

    for y in 0..height {
        let row = &column_best[y * width..(y + 1) * width];
        stack.clear();
        for (col, cand) in row.iter().enumerate() {
            let Some(site_row) = *cand else { continue };
            let g2 = sq(y as i64 - site_row as i64);
            loop {
                let Some(&(top, top_start)) = stack.last() else {
                    stack.push((col, 0));
                    break;
                };
                let top_row = row[top].expect("stacked columns have sites");
                let top_g2 = sq(y as i64 - top_row as i64);
                let start = first_win(top, top_g2, top_row, col, g2, site_row);
                if start <= top_start {
                    stack.pop();
                    continue;
                }
                if start < width as i64 {
                    stack.push((col, start));
                }
                break;
            }
        }
        if stack.is_empty() {
            continue;
        }
        let mut k = 0;
        for x in 0..width {
            while k + 1 < stack.len() && stack[k + 1].1 <= x as i64 {
                k += 1;
            }
            let col = stack[k].0;
            out[y * width + x] = Some((row[col].expect("stacked columns have sites"), col));
        }
    }
    out
}

fn sq(v: i64) -> i64 {
    v * v
}

/// Closest site row in each pixel's own column; ties go to the row above.
fn column_pass(width: usize, height: usize, is_site: &[bool]) -> Vec<Option<usize>> {
    let mut best = vec![None; width * height];
    for x in 0..width {
        let mut above = None;
        for y in 0..height {
            if is_site[y * width + x] {
                above = Some(y);
            }
            best[y * width + x] = above;
        }
        let mut below: Option<usize> = None;
        for y in (0..height).rev() {
            if is_site[y * width + x] {
                below = Some(y);
            }
            let i = y * width + x;
            best[i] = match (best[i], below) {
                (Some(a), Some(b)) => Some(if y - a <= b - y { a } else { b }),
                (a, b) => a.or(b),
            };
        }
    }
    best
}

/// First integer `x` at which column `q`'s candidate beats column `p`'s
/// (`p < q`), comparing `(distance², row, col)` lexicographically.
fn first_win(p: usize, gp2: i64, rp: usize, q: usize, gq2: i64, rq: usize) -> i64 {
    let (p, q) = (p as i64, q as i64);
    let num = q * q - p * p + gq2 - gp2;
    let den = 2 * (q - p);
    let floor = num.div_euclid(den);
    if num.rem_euclid(den) == 0 && rq < rp {
        floor
    } else {
        floor + 1
    }
}

/// Squared distance between two grid points.
pub fn dist2(a: Site, b: Site) -> u64 {
    let dr = a.0.abs_diff(b.0) as u64;
    let dc = a.1.abs_diff(b.1) as u64;
    dr * dr + dc * dc
}
