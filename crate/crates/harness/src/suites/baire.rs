//! Baire category on boxes covered by finitely many closed sets: the located
//! ball must sit inside the reported set, re-checked on a grid ten times
//! finer than the search's own verification grid.

use condan::algebra::Algebra;
use condan::analysis::{baire_locate, box_grid, BaireSchedule};

use crate::case::{Case, Section};
use crate::generate::{gen_closed_cover, Instance};
use crate::SuiteConfig;

/// Instances per configured case are `1 / CASE_DIVISOR`.
pub const CASE_DIVISOR: usize = 10;
pub const SCHEDULE: BaireSchedule = BaireSchedule { max_level: 6, verify_factor: 10 };

fn locate_case(case: &mut Case, m: usize, cap: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let Some(inst) = case.generate(|rng| gen_closed_cover(rng, alg, cap)) else { return };
    case.instance(inst.to_json());
    let Instance::ClosedCover { space, sets } = inst else { unreachable!("closed cover generator") };
    let Some(loc) = case.ok("baire_locate", baire_locate(&space, &sets, &SCHEDULE)) else { return };
    let steps = 10 * SCHEDULE.verify_factor;
    let mut outside = 0usize;
    let mut first = None;
    for (t, c) in loc.center.iter() {
        let r = *loc.radius.at(t);
        let n = loc.index.at(t) as usize;
        if r <= 0.0 || n == 0 || n > sets.len() {
            case.require("ball_well_formed", false, || format!("radius {r}, index {n} on atom {t}"));
            return;
        }
        let e = sets[n - 1].at(t);
        let bounds: Vec<(f64, f64)> = c.iter().map(|x| (x - r, x + r)).collect();
        let sp = space.at(t);
        for p in box_grid(&bounds, steps) {
            let in_space = p.iter().zip(sp).all(|(x, (lo, hi))| *x >= lo - 1e-12 && *x <= hi + 1e-12);
            if !(in_space && e.contains(&p, 1e-12)) {
                outside += 1;
                first.get_or_insert((t, p));
            }
        }
    }
    case.require("ball_inside_set", outside == 0, || format!("{outside} points outside, first {first:?}"));
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let m = config.atoms;
    let cap = config.dims(2);
    vec![Section::new("locate", config.cases.div_ceil(CASE_DIVISOR), move |case| locate_case(case, m, cap))]
}
