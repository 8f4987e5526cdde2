use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::Method;
use crate::error::{Error, Result};
use crate::series::{MapF, PolyMap};

#[derive(Clone, Debug)]
pub struct MethodRun {
    pub method: Method,
    pub elapsed: Duration,
    pub result: PolyMap,
}

/// Outcome of a successful cross-check: every run agreed and the common
/// result inverts `F` on both sides through `degree`.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    pub degree: u32,
    pub runs: Vec<MethodRun>,
    /// Requested methods whose precondition failed, with the reason.
    pub skipped: Vec<(Method, String)>,
    pub inverse: PolyMap,
}

fn describe(a: Method, b: Method, x: &PolyMap, y: &PolyMap, d: u32) -> Option<String> {
    x.first_difference(y, d).map(|(i, e, p, q)| {
        format!(
            "{a} and {b} differ at component {}, exponent {:?}: {p} vs {q}",
            i + 1,
            e.as_slice()
        )
    })
}

/// Runs `methods` (in parallel when `parallel` is set), checks that all
/// results agree through degree `d` and that `F(G) = G(F) = z` there.
///
/// Results are reported in the order of `methods` regardless of scheduling.
pub fn cross_check(f: &MapF, d: u32, methods: &[Method], parallel: bool) -> Result<CrossCheck> {
    let mut skipped = Vec::new();
    let mut todo = Vec::new();
    for &m in methods {
        if todo.contains(&m) {
            continue;
        }
        match m.applicable(f) {
            Ok(()) => todo.push(m),
            Err(e) => skipped.push((m, e.to_string())),
        }
    }
    if todo.is_empty() {
        return Err(Error::Invalid("no applicable method selected".into()));
    }
    let run = |m: &Method| -> Result<MethodRun> {
        let start = Instant::now();
        let result = m.invert(f, d)?;
        Ok(MethodRun {
            method: *m,
            elapsed: start.elapsed(),
            result,
        })
    };
    let runs: Vec<MethodRun> = if parallel {
        todo.par_iter().map(run).collect::<Result<_>>()?
    } else {
        todo.iter().map(run).collect::<Result<_>>()?
    };

    let base = &runs[0];
    for other in &runs[1..] {
        if let Some(msg) = describe(base.method, other.method, &base.result, &other.result, d) {
            return Err(Error::Disagreement(msg));
        }
    }
    let g = base.result.truncate(d);
    let fd = f.with_precision(d)?;
    let id = PolyMap::identity(f.n(), d);
    let fg = fd.f().compose_to(&g, d)?;
    if let Some((i, e, p, q)) = fg.first_difference(&id, d) {
        return Err(Error::Disagreement(format!(
            "F(G) != z at component {}, exponent {:?}: {p} vs {q}",
            i + 1,
            e.as_slice()
        )));
    }
    let gf = g.compose_to(fd.f(), d)?;
    if let Some((i, e, p, q)) = gf.first_difference(&id, d) {
        return Err(Error::Disagreement(format!(
            "G(F) != z at component {}, exponent {:?}: {p} vs {q}",
            i + 1,
            e.as_slice()
        )));
    }
    Ok(CrossCheck {
        degree: d,
        runs,
        skipped,
        inverse: g,
    })
}
