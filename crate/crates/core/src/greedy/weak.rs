use serde::{Deserialize, Serialize};

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::linesearch::UnivariateSearch;
use crate::objective::Oracle;
use crate::space::dot;

use super::egafr::{free_relaxation, rescaled};
use super::{affine, drive, Algorithm, GreedyOptions, GreedyTrace, Iterate, RunSetup, StepOutcome, WeaknessSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMode {
    /// Score `<-E'(G), g - G>`.
    Relative,
    /// Score `<-E'(G), g>`.
    Absolute,
}

/// Atom maximizing the selection score at `point`, lowest index on ties.
///
/// The dictionary is finite, so the supremum is attained and the exact
/// maximizer satisfies the weakness condition for every `t` in `(0, 1]`.
pub fn select_atom_gradient(
    oracle: &Oracle,
    dict: &Dictionary,
    point: &[f64],
    _t: WeaknessSchedule,
    mode: SelectionMode,
) -> Result<usize> {
    if dict.is_empty() {
        return Err(Error::input("dictionary is empty"));
    }
    let grad = oracle.gradient(point)?;
    let offset = match mode {
        SelectionMode::Relative => dot(&grad, point),
        SelectionMode::Absolute => 0.0,
    };
    let scores = dict.atoms().iter().map(|g| offset - dot(&grad, g.as_slice()));
    let (best, _) = scores
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, s)| if s > b.1 { (i, s) } else { b });
    Ok(best)
}

/// One weak relaxed step: gradient selection, then a line search in `lambda`.
pub fn wrga_step(
    values: &Oracle,
    gradient: &Oracle,
    dict: &Dictionary,
    current: &Iterate<'_>,
    t: WeaknessSchedule,
    ls_depth: u32,
) -> Result<StepOutcome> {
    let atom = select_atom_gradient(gradient, dict, current.point, t, SelectionMode::Relative)?;
    let g = dict.atoms()[atom].as_slice();
    let res = UnivariateSearch::unit(ls_depth)
        .with_delta(values.delta())
        .try_minimize(|l| values.evaluate(&affine(1.0 - l, current.point, l, g)))?;
    let lambda = res.x_best;
    let mut coefficients = current.coefficients.clone();
    coefficients.scale(1.0 - lambda);
    coefficients.add(atom, lambda);
    Ok(StepOutcome {
        atom,
        lambda: Some(lambda),
        w: None,
        alpha: None,
        beta: None,
        coefficients,
        observed: res.f_best,
        certificate: res.certified_gap,
        box_runs: 0,
    })
}

/// One weak free-relaxation step: gradient selection, then a plane search
/// over `(w, lambda)` for `E((1 - w) G + lambda g)`.
pub fn wgafr_step(
    values: &Oracle,
    gradient: &Oracle,
    dict: &Dictionary,
    current: &Iterate<'_>,
    t: WeaknessSchedule,
    ls_depth: u32,
    half_width: f64,
) -> Result<StepOutcome> {
    let atom = select_atom_gradient(gradient, dict, current.point, t, SelectionMode::Absolute)?;
    let res = free_relaxation(values, dict, current, atom, ls_depth, half_width)?;
    let (w, lambda) = res.payload;
    Ok(StepOutcome {
        atom,
        lambda: Some(lambda),
        w: Some(w),
        alpha: Some(1.0 - w),
        beta: None,
        coefficients: rescaled(current, atom, w, lambda),
        observed: res.value,
        certificate: res.certificate,
        box_runs: res.box_runs,
    })
}

/// Weak relaxed greedy algorithm. Gradients come from `oracle` itself,
/// values from its corrupted copy when `opts.delta > 0`.
pub fn wrga_run(
    oracle: &Oracle,
    dict: &Dictionary,
    t: WeaknessSchedule,
    opts: &GreedyOptions,
) -> Result<GreedyTrace> {
    let setup = RunSetup { algorithm: Algorithm::Wrga, schedule: None, weakness: Some(t.t()) };
    drive(oracle, dict, opts, setup, |values, current, _| {
        wrga_step(values, oracle, dict, current, t, opts.ls_depth)
    })
}

/// Weak greedy algorithm with free relaxation.
pub fn wgafr_run(
    oracle: &Oracle,
    dict: &Dictionary,
    t: WeaknessSchedule,
    opts: &GreedyOptions,
) -> Result<GreedyTrace> {
    let setup = RunSetup { algorithm: Algorithm::Wgafr, schedule: None, weakness: Some(t.t()) };
    drive(oracle, dict, opts, setup, |values, current, _| {
        wgafr_step(values, oracle, dict, current, t, opts.ls_depth, opts.initial_half_width)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{FnObjective, Quadratic};
    use crate::space::NormOrder;

    fn setup(center: &[f64]) -> (Oracle, Dictionary) {
        (
            Oracle::new(Quadratic::new(center.to_vec()).unwrap()),
            Dictionary::canonical(center.len(), NormOrder::L2).unwrap(),
        )
    }

    #[test]
    fn absolute_selection_example() {
        let (o, d) = setup(&[0.3, 0.2]);
        let t = WeaknessSchedule::default();
        let i = select_atom_gradient(&o, &d, &[0.0, 0.0], t, SelectionMode::Absolute).unwrap();
        assert_eq!(d.label(i), Some("+e1"));
        let j = select_atom_gradient(&o, &d, &[0.0, 0.0], t, SelectionMode::Relative).unwrap();
        assert_eq!(i, j);
    }

    #[test]
    fn zero_gradient_ties_to_first_atom() {
        let (o, d) = setup(&[0.3, 0.2]);
        let t = WeaknessSchedule::default();
        let i = select_atom_gradient(&o, &d, &[0.3, 0.2], t, SelectionMode::Relative).unwrap();
        assert_eq!(i, 0);
    }

    #[test]
    fn missing_gradient_is_unsupported() {
        let o = Oracle::new(FnObjective::new("plain", 2, |x| x[0] * x[0] + x[1] * x[1]));
        let d = Dictionary::canonical(2, NormOrder::L2).unwrap();
        let r = select_atom_gradient(&o, &d, &[0.0, 0.0], WeaknessSchedule::default(), SelectionMode::Absolute);
        assert!(matches!(r, Err(Error::Unsupported(_))));
        let corrupted = Oracle::new(Quadratic::new(vec![0.3, 0.2]).unwrap()).corrupt(0.1, 1).unwrap();
        assert!(wrga_run(&corrupted, &d, WeaknessSchedule::default(), &GreedyOptions::new(1)).is_err());
    }

    #[test]
    fn wrga_first_step_matches_rega() {
        let (o, d) = setup(&[0.3, 0.2]);
        let t = wrga_run(&o, &d, WeaknessSchedule::default(), &GreedyOptions::new(1).with_depth(40)).unwrap();
        let r = &t.records[0];
        assert_eq!(d.label(r.atom), Some("+e1"));
        assert!((r.lambda.unwrap() - 0.3).abs() < 1e-6);
        assert!((r.objective - 0.04).abs() < 1e-10);
        assert!(r.evals <= 3 + 2 * 40);
    }

    #[test]
    fn weakness_does_not_change_the_trace() {
        let (o, d) = setup(&[0.6, 0.4]);
        let opts = GreedyOptions::new(15).with_depth(20);
        let a = wrga_run(&o, &d, WeaknessSchedule::new(0.5).unwrap(), &opts).unwrap();
        let b = wrga_run(&o, &d, WeaknessSchedule::new(1.0).unwrap(), &opts).unwrap();
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn wgafr_first_step_example() {
        let (o, d) = setup(&[1.5, 0.5]);
        let t = wgafr_run(&o, &d, WeaknessSchedule::default(), &GreedyOptions::new(3).with_depth(30)).unwrap();
        let r = &t.records[0];
        assert_eq!(d.label(r.atom), Some("+e1"));
        assert!((r.objective - 0.25).abs() <= r.delta_eff + 1e-12);
        let mut prev = t.initial_objective;
        for r in &t.records {
            assert!(r.objective <= prev + r.delta_eff);
            prev = r.objective;
        }
    }
}
