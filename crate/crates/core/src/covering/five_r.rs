use crate::space::{Ball, HomogeneousSpace};

/// Greedy 5R selection: balls are taken by decreasing radius, ties by lowest
/// center index, and kept when disjoint from everything kept so far. Returns
/// indices into `balls`, in selection order.
pub fn five_r_cover(space: &HomogeneousSpace, balls: &[Ball]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&a, &b| {
        balls[b].radius().total_cmp(&balls[a].radius()).then(balls[a].center().cmp(&balls[b].center())).then(a.cmp(&b))
    });
    let mut taken = vec![false; space.len()];
    let mut out = Vec::new();
    for i in order {
        let m = balls[i].members();
        if m.iter().all(|&j| !taken[j]) {
            for &j in m {
                taken[j] = true;
            }
            out.push(i);
        }
    }
    out
}

/// Same selection over balls described by `(center, scale, factor)`, building
/// members only for candidates that are actually tested.
pub(super) fn greedy_disjoint(space: &HomogeneousSpace, mut cands: Vec<(usize, i32, f64)>) -> Vec<Ball> {
    cands.sort_by(|a, b| {
        let (ra, rb) = (a.2 * 2f64.powi(a.1), b.2 * 2f64.powi(b.1));
        rb.total_cmp(&ra).then(a.0.cmp(&b.0))
    });
    cands.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1 && a.2 == b.2);
    let mut taken = vec![false; space.len()];
    let mut out = Vec::new();
    for (c, s, f) in cands {
        if taken[c] {
            continue;
        }
        let ball = space.ball_scaled(c, s, f);
        if ball.members().iter().all(|&j| !taken[j]) {
            for &j in ball.members() {
                taken[j] = true;
            }
            out.push(ball);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_space, GridSpec};

    #[test]
    fn identical_balls_select_one() {
        let s = build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![16.0])).unwrap();
        let b = s.ball(s.origin(), 2);
        assert_eq!(five_r_cover(&s, &[b.clone(), b]), vec![0]);
    }

    #[test]
    fn unit_balls_everywhere() {
        let s = build_grid_space(&GridSpec::new(vec![1.0], 1.0, vec![16.0])).unwrap();
        let balls: Vec<Ball> = (0..s.len()).map(|c| s.ball(c, 1)).collect();
        let sel = five_r_cover(&s, &balls);
        for (a, &i) in sel.iter().enumerate() {
            for &j in &sel[a + 1..] {
                assert!(!balls[i].intersects(&balls[j]));
            }
        }
        let mut covered = vec![false; s.len()];
        for &i in &sel {
            for &m in balls[i].dilate(&s, 5.0).members() {
                covered[m] = true;
            }
        }
        assert!(covered.iter().all(|&c| c));
    }
}
