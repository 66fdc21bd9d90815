use super::check::{dual_exponent, random_host, test_function, ImprovingConfig};
use crate::error::{invalid, Result};
use crate::function::GridFunction;
use crate::operators::SingleScaleFamily;
use crate::seeding;
use crate::stopping::{build_stopping_ladder, certify_sparse, StoppingConfig};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConverseReport {
    /// Largest recorded ratio `|⟨T_σ^τ f₁, f₂⟩| / sparse form`.
    pub sparse_constant: f64,
    pub i_conv: f64,
    pub i_emp: f64,
    /// `I_conv / I_emp`, absent when `I_emp = 0`.
    pub ratio: Option<f64>,
}

/// `u|u|^{p′−2}` on `members` (a unimodular point mass at the maximum of `|u|`
/// when `p′ = ∞`): the function realizing `⟨u⟩_{p′}` by duality.
fn dual_extremizer(u: &GridFunction, members: &[usize], q: f64) -> GridFunction {
    let mut g = GridFunction::zeros(u.len());
    if q.is_infinite() {
        let best = members.iter().copied().max_by(|&a, &b| u.get(a).norm().total_cmp(&u.get(b).norm()));
        if let Some(x) = best {
            let v = u.get(x);
            if v.norm() > 0.0 {
                g.set(x, v / v.norm());
            }
        }
    } else {
        for &x in members {
            let v = u.get(x);
            if v.norm() > 0.0 {
                g.set(x, v * v.norm().powf(q - 2.0));
            }
        }
    }
    g
}

/// Single-scale improving constant implied by recorded sparse bounds: for each
/// trial `(f, L)` the pairing of `T(s)(f1_L)` with its dual extremizer `g` on
/// `c_oL` is bounded by `C · Σ_S |B|⟨f1_L⟩⟨g⟩` with `C` the recorded constant,
/// which bounds `⟨T(s)(f1_L)⟩_{p₂′,c_oL}` after dividing by `|c_oL|⟨g⟩_{p₂,c_oL}`.
pub fn converse_extract(
    sparse_ratios: &[f64],
    family: &dyn SingleScaleFamily,
    s: i32,
    p1: f64,
    p2: f64,
    cfg: &ImprovingConfig,
) -> Result<ConverseReport> {
    if sparse_ratios.is_empty() {
        return invalid("no sparse verification records");
    }
    if !family.scales().contains(&s) {
        return invalid(format!("scale {s} is outside the family range {:?}", family.scales()));
    }
    let constant = sparse_ratios.iter().copied().fold(0.0, f64::max);
    let space = family.space().clone();
    let c_o = family.c_o();
    let q = dual_exponent(p2);
    let local = ImprovingConfig { gamma2: c_o, ..*cfg };
    let mut stop = StoppingConfig::new(&space, c_o, p1, p2);
    stop.zeta_min = Some(0.01);
    let mut rng = seeding::stream(cfg.seed, 0xc0);
    let (mut i_conv, mut i_emp): (f64, f64) = (0.0, 0.0);
    for t in 0..cfg.trials {
        let l = random_host(&space, s, &local, &mut rng);
        let f = test_function(&space, &l, t, &mut rng);
        let size = f.avg_p(&space, p1, l.members());
        if size == 0.0 {
            continue;
        }
        let u = family.apply(s, &f);
        let wide = space.members_within(l.center(), c_o * l.radius());
        i_emp = i_emp.max(u.avg_p(&space, q, &wide) / size);
        let g = dual_extremizer(&u, &wide, q);
        let g_size = g.avg_p(&space, p2, &wide);
        if g_size == 0.0 || constant == 0.0 {
            continue;
        }
        let ladder = build_stopping_ladder(&space, &f, &g, &l, &stop)?;
        let collection = match ladder.collection {
            Some(c) => c,
            None => certify_sparse(&space, &ladder)?,
        };
        let form = collection.form(&space, &f, &g, p1, p2);
        let measure = space.measure_of(&wide);
        i_conv = i_conv.max(constant * form / (measure * g_size * size));
    }
    let ratio = (i_emp > 0.0).then(|| i_conv / i_emp);
    Ok(ConverseReport { sparse_constant: constant, i_conv, i_emp, ratio })
}
