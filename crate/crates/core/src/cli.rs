//! Command dispatch: every verdict-producing computation behind one
//! string command, returning a deterministic report envelope. Negative
//! mathematical verdicts are successful runs; only malformed input or
//! unsatisfiable preconditions are errors.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::cech::{ext, global_homs};
use crate::deform::{run_tower, solve_extension, ExtensionReport};
use crate::error::{NcError, Result};
use crate::input::Workspace;
use crate::qcoh::{ElemMat, LocallyFreeModule};
use crate::report::{digest, ReportEnvelope};
use crate::rewrite::FreeElem;
use crate::scheme::{DeformationTower, NcScheme, ValidationReport};
use crate::tilt::{
    end_algebra, flatness_check, generation_check, phi_image, pretilting_check, reduction_compare,
    BoundedComplex, EndomorphismAlgebra,
};

pub const COMMANDS: &[&str] = &[
    "validate-scheme",
    "validate-tower",
    "cohomology",
    "ext",
    "hom",
    "obstruct",
    "extend",
    "tower",
    "endalg",
    "tilt-check",
    "generate-check",
    "phi",
];

pub fn run(
    ws: &Workspace,
    command: &str,
    args: &[(String, String)],
    input_text: &str,
) -> Result<ReportEnvelope> {
    let mut warnings = Vec::new();
    let results = dispatch(ws, command, args, &mut warnings)?;
    Ok(ReportEnvelope {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        input_sha256: digest(input_text),
        command: command.to_string(),
        args: args.to_vec(),
        window: ws.window,
        pmax: ws.pmax,
        results,
        warnings,
        assumptions: ws.assumptions.clone(),
    })
}

fn arg<'a>(args: &'a [(String, String)], key: &str) -> Result<&'a str> {
    args.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| NcError::Input(format!("missing required argument `{key}=<name>`")))
}

fn module(ws: &Workspace, name: &str, warnings: &mut Vec<String>) -> Result<LocallyFreeModule> {
    let mut m = ws
        .modules
        .get(name)
        .ok_or_else(|| NcError::Input(format!("unknown module `{name}`")))?
        .clone();
    let rep = m.validate(&ws.scheme, &ws.window)?;
    if !rep.ok() {
        return Err(NcError::Input(format!(
            "module `{name}` fails validation: {}",
            rep.failures.join("; ")
        )));
    }
    warnings.extend(rep.warnings);
    Ok(m)
}

/// The structure module: rank one, zero shifts, identity gluings.
fn unit_module(scheme: &NcScheme, window: &crate::scheme::Window) -> Result<LocallyFreeModule> {
    let d = scheme.poset.len();
    let ring = scheme.ring();
    let mut gluings = BTreeMap::new();
    for i in 0..d {
        for j in 0..d {
            if scheme.poset.lt(i, j) {
                gluings.insert((i, j), ElemMat::from_rows(vec![vec![FreeElem::one(ring)]]));
            }
        }
    }
    let mut m = LocallyFreeModule::new("O".into(), scheme, 1, vec![vec![0]; d], gluings)?;
    let rep = m.validate(scheme, window)?;
    if !rep.ok() {
        return Err(NcError::Input(format!(
            "structure module fails validation: {}",
            rep.failures.join("; ")
        )));
    }
    Ok(m)
}

fn object(ws: &Workspace, name: &str, warnings: &mut Vec<String>) -> Result<BoundedComplex> {
    let summands = ws
        .objects
        .get(name)
        .ok_or_else(|| NcError::Input(format!("unknown object `{name}`")))?;
    let mut out = Vec::new();
    for (d, m) in summands {
        out.push((*d, module(ws, m, warnings)?));
    }
    Ok(BoundedComplex {
        name: name.to_string(),
        summands: out,
    })
}

fn validation_json(rep: &ValidationReport) -> Value {
    json!({
        "ok": rep.ok(),
        "failures": rep.failures,
        "warnings": rep.warnings,
    })
}

fn pieces_json(pieces: &[crate::cech::CohomologyPiece]) -> Value {
    Value::Array(
        pieces
            .iter()
            .map(|c| {
                json!({
                    "p": c.p,
                    "weight": c.weight,
                    "dim": c.dim,
                    "capped": c.capped,
                })
            })
            .collect(),
    )
}

fn extension_json(rep: &ExtensionReport) -> Value {
    json!({
        "level": rep.level,
        "obstruction_zero": rep.obstruction_zero,
        "closed": rep.closed,
        "solvable": rep.solvable,
        "h1_dim": rep.h1_dim,
        "h2_rank_excess": rep.h2_rank_excess,
        "capped": rep.capped,
    })
}

fn endalg_json(e: &EndomorphismAlgebra, order: u32) -> Result<Value> {
    let flat = flatness_check(e, order)?;
    let verify = e.verify(order);
    Ok(json!({
        "dim": e.dim,
        "basis_weights": e.basis.iter().map(|b| b.weight).collect::<Vec<_>>(),
        "unit": e.unit.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "structure_constants": e
            .constants
            .iter()
            .map(|(a, b, c, s)| json!([a, b, c, s.to_string()]))
            .collect::<Vec<_>>(),
        "complete": e.complete,
        "capped": e.capped,
        "axioms_ok": verify.is_ok(),
        "flat": flat.flat,
        "rank_over_r": flat.rank,
        "t_boundary": flat.boundary,
    }))
}

fn tower_of(ws: &Workspace) -> Result<DeformationTower> {
    if ws.scheme.ring().order < 2 {
        return Err(NcError::Input(
            "deformation commands need a ring of order at least 2".into(),
        ));
    }
    DeformationTower::from_top(ws.scheme.clone())
}

/// The level-one reduction of a declared module, validated on the base of
/// the tower.
fn base_module(
    ws: &Workspace,
    tower: &DeformationTower,
    name: &str,
    warnings: &mut Vec<String>,
) -> Result<LocallyFreeModule> {
    let m = module(ws, name, warnings)?;
    m.reduce(&tower.levels[0], &ws.window)
}

fn dispatch(
    ws: &Workspace,
    command: &str,
    args: &[(String, String)],
    warnings: &mut Vec<String>,
) -> Result<Value> {
    let scheme = &ws.scheme;
    let window = &ws.window;
    match command {
        "validate-scheme" => {
            let rep = scheme.validate(window)?;
            let mut modules = Map::new();
            for (name, m) in &ws.modules {
                let mut m = m.clone();
                let r = m.validate(scheme, window)?;
                modules.insert(name.clone(), validation_json(&r));
            }
            Ok(json!({
                "scheme": validation_json(&rep),
                "modules": Value::Object(modules),
            }))
        }
        "validate-tower" => {
            let tower = tower_of(ws)?;
            let rep = tower.validate(window)?;
            Ok(json!({
                "name": ws.tower,
                "levels": tower.levels.len(),
                "tower": validation_json(&rep),
            }))
        }
        "cohomology" => {
            let m = module(ws, arg(args, "M")?, warnings)?;
            let unit = unit_module(scheme, window)?;
            let pieces = ext(scheme, &unit, &m, window, ws.pmax)?;
            Ok(json!({ "pieces": pieces_json(&pieces) }))
        }
        "ext" => {
            let f = module(ws, arg(args, "F")?, warnings)?;
            let n = module(ws, arg(args, "N")?, warnings)?;
            let pieces = ext(scheme, &f, &n, window, ws.pmax)?;
            Ok(json!({ "pieces": pieces_json(&pieces) }))
        }
        "hom" => {
            let f = module(ws, arg(args, "F")?, warnings)?;
            let n = module(ws, arg(args, "N")?, warnings)?;
            let pieces = ext(scheme, &f, &n, window, 0)?;
            let mut basis = Vec::new();
            for c in &pieces {
                for h in global_homs(scheme, &f, &n, c)? {
                    let charts: Vec<Value> = h
                        .mats
                        .iter()
                        .enumerate()
                        .map(|(l, m)| {
                            let alph = scheme.algebras[l].alphabet();
                            let rows: Vec<Vec<String>> = (0..m.rows)
                                .map(|r| (0..m.cols).map(|cc| m.get(r, cc).display(alph)).collect())
                                .collect();
                            json!({ "chart": scheme.poset.name(l), "mat": rows })
                        })
                        .collect();
                    basis.push(json!({ "weight": h.weight, "charts": charts }));
                }
            }
            Ok(json!({
                "pieces": pieces_json(&pieces),
                "total_dim": pieces.iter().map(|c| c.dim).sum::<usize>(),
                "basis": basis,
            }))
        }
        "obstruct" => {
            let tower = tower_of(ws)?;
            let m = base_module(ws, &tower, arg(args, "F")?, warnings)?;
            let rep = solve_extension(&tower.levels[1], &m, window.length_cap)?;
            Ok(json!({
                "level": rep.level,
                "obstruction_zero": rep.obstruction_zero,
                "closed": rep.closed,
                "capped": rep.capped,
            }))
        }
        "extend" => {
            let tower = tower_of(ws)?;
            let m = base_module(ws, &tower, arg(args, "F")?, warnings)?;
            let rep = solve_extension(&tower.levels[1], &m, window.length_cap)?;
            Ok(extension_json(&rep))
        }
        "tower" => {
            let tower = tower_of(ws)?;
            let m = base_module(ws, &tower, arg(args, "F")?, warnings)?;
            let (reports, final_module) = run_tower(&tower, &m, window)?;
            let mut final_json = Value::Null;
            if let Some(mut fm) = final_module {
                let rep = fm.validate(tower.top(), window)?;
                let e = end_algebra(tower.top(), &fm, window)?;
                let flat = flatness_check(&e, tower.top().ring().order)?;
                final_json = json!({
                    "valid": rep.ok(),
                    "end_dim": e.dim,
                    "end_flat": flat.flat,
                    "end_rank_over_r": flat.rank,
                    "end_capped": e.capped,
                    "t_boundary": flat.boundary,
                });
            }
            Ok(json!({
                "name": ws.tower,
                "levels": reports.iter().map(extension_json).collect::<Vec<_>>(),
                "completed": final_json != Value::Null,
                "final": final_json,
            }))
        }
        "endalg" => {
            let f = module(ws, arg(args, "F")?, warnings)?;
            let e = end_algebra(scheme, &f, window)?;
            endalg_json(&e, scheme.ring().order)
        }
        "tilt-check" => {
            let name = arg(args, "F")?;
            let f = module(ws, name, warnings)?;
            let pre = pretilting_check(scheme, &f, window, ws.pmax)?;
            let e = end_algebra(scheme, &f, window)?;
            let order = scheme.ring().order;
            let mut reduction = Value::Null;
            if order > 1 {
                let base = scheme.truncate(1)?;
                let f0 = f.reduce(&base, window)?;
                let e0 = end_algebra(&base, &f0, window)?;
                let red = reduction_compare(&base, &f0, &e, &e0)?;
                if red.in_window_only {
                    warnings.push(format!(
                        "reduction comparison is in-window only: {} pairs checked, {} skipped",
                        red.pairs_checked, red.pairs_skipped
                    ));
                }
                reduction = json!({
                    "matches": red.matches,
                    "onto": red.onto,
                    "unit_ok": red.unit_ok,
                    "pairs_checked": red.pairs_checked,
                    "pairs_skipped": red.pairs_skipped,
                    "elements_skipped": red.elements_skipped,
                    "in_window_only": red.in_window_only,
                });
            }
            if pre.in_window_only {
                warnings.push("pretilting verdict is in-window only".into());
            }
            Ok(json!({
                "pretilting": pre.pretilting,
                "in_window_only": pre.in_window_only,
                "ext_table": pre
                    .ext_table
                    .iter()
                    .map(|x| json!({"p": x.p, "weight": x.weight, "dim": x.dim, "capped": x.capped}))
                    .collect::<Vec<_>>(),
                "end_algebra": endalg_json(&e, order)?,
                "reduction": reduction,
            }))
        }
        "generate-check" => {
            let f = module(ws, arg(args, "F")?, warnings)?;
            let x = object(ws, arg(args, "X")?, warnings)?;
            let rep = generation_check(scheme, &f, &x, window, ws.pmax)?;
            if rep.in_window_only {
                warnings.push("some graded pieces were capped; vanishing is in-window only".into());
            }
            Ok(json!({
                "object": x.name,
                "dims": rep
                    .dims
                    .iter()
                    .map(|(p, d)| json!([p, d]))
                    .collect::<Vec<_>>(),
                "witness": rep.witness,
                "in_window_only": rep.in_window_only,
            }))
        }
        "phi" => {
            let f = module(ws, arg(args, "F")?, warnings)?;
            let x = object(ws, arg(args, "X")?, warnings)?;
            let pre = pretilting_check(scheme, &f, window, ws.pmax)?;
            if !pre.pretilting {
                warnings.push("source module is not pretilting in the window".into());
            }
            let e = end_algebra(scheme, &f, window)?;
            let img = phi_image(scheme, &f, &e, &x, window)?;
            Ok(json!({
                "object": img.object,
                "degrees": img
                    .degrees
                    .iter()
                    .map(|d| json!({"p": d.p, "dim": d.dim, "boundary": d.boundary}))
                    .collect::<Vec<_>>(),
                "action_ok": img.action_ok,
                "euler_ok": img.euler_ok,
                "in_window_only": img.in_window_only,
            }))
        }
        other => Err(NcError::Input(format!(
            "unknown command `{other}`; expected one of {}",
            COMMANDS.join(", ")
        ))),
    }
}
