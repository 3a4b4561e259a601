use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linesearch::try_minimize_plane;
use crate::objective::Oracle;

use super::{
    affine, drive, search_atoms, Algorithm, Candidate, GreedyOptions, GreedyTrace, Iterate, RunSetup,
    StepOutcome,
};

/// `G' = (1 - w) G + b g`, searched over `(w, b)` in the plane.
pub(crate) fn free_relaxation(
    values: &Oracle,
    dict: &Dictionary,
    current: &Iterate<'_>,
    atom: usize,
    ls_depth: u32,
    half_width: f64,
) -> Result<Candidate<(f64, f64)>> {
    let g = dict.atoms()[atom].as_slice();
    let res = try_minimize_plane(
        |w, b| values.evaluate(&affine(1.0 - w, current.point, b, g)),
        ls_depth,
        half_width,
    )
    .map_err(|e| match e {
        Error::NonCoercive(msg) => Error::NonCoercive(format!(
            "atom {atom} ({}): {msg}",
            dict.label(atom).unwrap_or("?")
        )),
        other => other,
    })?;
    Ok(Candidate {
        value: res.f_best,
        certificate: res.certified_gap,
        box_runs: res.box_runs,
        payload: (res.point[0], res.point[1]),
    })
}

pub(crate) fn rescaled(current: &Iterate<'_>, atom: usize, w: f64, b: f64) -> crate::dictionary::Combination {
    let mut c = current.coefficients.clone();
    c.scale(1.0 - w);
    c.add(atom, b);
    c
}

/// One free-relaxation step: for every atom `g`, minimizes
/// `E(alpha G + beta g)` over the plane and keeps the best atom.
pub fn egafr_step(
    values: &Oracle,
    dict: &Dictionary,
    current: &Iterate<'_>,
    ls_depth: u32,
    half_width: f64,
) -> Result<StepOutcome> {
    let best = search_atoms(dict, |i| free_relaxation(values, dict, current, i, ls_depth, half_width))?;
    let (w, beta) = best.payload;
    Ok(StepOutcome {
        atom: best.atom,
        lambda: None,
        w: Some(w),
        alpha: Some(1.0 - w),
        beta: Some(beta),
        coefficients: rescaled(current, best.atom, w, beta),
        observed: best.value,
        certificate: best.certificate,
        box_runs: best.box_runs,
    })
}

/// Greedy algorithm with free relaxation.
pub fn egafr_run(oracle: &Oracle, dict: &Dictionary, opts: &GreedyOptions) -> Result<GreedyTrace> {
    let setup = RunSetup { algorithm: Algorithm::Egafr, schedule: None, weakness: None };
    drive(oracle, dict, opts, setup, |values, current, _| {
        egafr_step(values, dict, current, opts.ls_depth, opts.initial_half_width)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{Linear, Quadratic};
    use crate::space::NormOrder;

    #[test]
    fn first_step_projects_onto_best_axis() {
        let o = Oracle::new(Quadratic::new(vec![1.5, 0.5]).unwrap());
        let d = Dictionary::canonical(2, NormOrder::L2).unwrap();
        let t = egafr_run(&o, &d, &GreedyOptions::new(2).with_depth(30)).unwrap();
        let r1 = &t.records[0];
        assert_eq!(d.label(r1.atom), Some("+e1"));
        assert!((r1.objective - 0.25).abs() <= r1.delta_eff + 1e-12);
        assert!(t.records[1].objective <= 1e-10);
        assert!(t.records[1].support <= 2);
    }

    #[test]
    fn origin_minimizer_stays_put() {
        let o = Oracle::new(Quadratic::new(vec![0.0, 0.0]).unwrap());
        let d = Dictionary::canonical(2, NormOrder::L2).unwrap();
        let t = egafr_run(&o, &d, &GreedyOptions::new(3).with_depth(20)).unwrap();
        for r in &t.records {
            assert!(r.objective <= r.delta_eff);
            assert!(r.beta.unwrap().abs() <= r.delta_eff.sqrt() + 1e-12);
        }
    }

    #[test]
    fn non_coercive_error_names_the_atom() {
        let o = Oracle::new(Linear::new(vec![1.0, 0.5]).unwrap());
        let d = Dictionary::canonical(2, NormOrder::L2).unwrap();
        let err = egafr_run(&o, &d, &GreedyOptions::new(1).with_depth(4)).unwrap_err();
        match err {
            Error::NonCoercive(msg) => assert!(msg.contains("atom 0 (+e1)")),
            other => panic!("unexpected {other}"),
        }
    }
}
