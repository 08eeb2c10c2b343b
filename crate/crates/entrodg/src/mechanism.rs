//! Mechanism/thermodynamics input file: parsing, validation, serialization.
//!
//! The format is a sectioned, line-oriented text file (see
//! `docs/mechanism-format.md` for the grammar): an `elements` table, one
//! `species` block per species with a two-range NASA-7 fit, and one
//! `reaction` block per reaction. Reaction equations use `<=>` for
//! reversible and `=>` for irreversible reactions, `+ M` for three-body
//! colliders, and `(+M)` for pressure-dependent reactions.
//!
//! Validation at load establishes what the rate evaluator assumes: every
//! referenced species is declared, every reaction balances each chemical
//! element (hence mass), activation energies are nonnegative, and the
//! thermodynamic fits are continuous across their range junction.

use std::collections::HashMap;

use thiserror::Error;

use crate::kinetics::{ArrheniusRate, FalloffBlend, Mechanism, RateLaw, Reaction};
use crate::thermo::{GasModel, ModelError, SpeciesThermo};
use crate::Float;

/// The mechanism shipped with the solver.
pub const BUILTIN_MECHANISM: &str = include_str!("../data/h2_o2_ar.mech");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechanismError {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("validation error in {context}: {msg}")]
    Validation { context: String, msg: String },
    #[error("line {line}: duplicate species {name}")]
    DuplicateSpecies { line: usize, name: String },
    #[error("line {line}: unknown species {name}")]
    UnknownSpecies { line: usize, name: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> MechanismError {
    MechanismError::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn verr(context: impl Into<String>, msg: impl Into<String>) -> MechanismError {
    MechanismError::Validation {
        context: context.into(),
        msg: msg.into(),
    }
}

/// Collider treatment inferred from the equation text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyKind {
    None,
    /// `+ M` on both sides: rate of progress scaled by the collider sum.
    ThreeBody,
    /// `(+M)` on both sides: falloff or chemically activated.
    PressureDependent,
}

/// Parsed reaction equation, species unresolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedEquation {
    pub lhs: Vec<(String, Float)>,
    pub rhs: Vec<(String, Float)>,
    pub reversible: bool,
    pub body: BodyKind,
}

/// Parses `"2 H2 + O2 <=> 2 H2O"`-style equations.
///
/// Grammar: `side := term ('+' term)*`, `term := [coefficient] species | 'M'`,
/// with `(+M)` stripped before splitting. Duplicate species accumulate.
pub fn parse_reaction_equation(text: &str) -> Result<ParsedEquation, MechanismError> {
    let (lhs_text, rhs_text, reversible) = if let Some(pos) = text.find("<=>") {
        (&text[..pos], &text[pos + 3..], true)
    } else if let Some(pos) = text.find("=>") {
        (&text[..pos], &text[pos + 2..], false)
    } else {
        return Err(perr(0, 0, format!("missing '=>' or '<=>' in '{}'", text.trim())));
    };

    let mut body = BodyKind::None;
    let lhs = parse_side(lhs_text, &mut body, text)?;
    let mut rhs_body = BodyKind::None;
    let rhs = parse_side(rhs_text, &mut rhs_body, text)?;
    if body != rhs_body {
        return Err(perr(
            0,
            0,
            format!("collider must appear on both sides of '{}'", text.trim()),
        ));
    }
    Ok(ParsedEquation {
        lhs,
        rhs,
        reversible,
        body,
    })
}

fn parse_side(
    side: &str,
    body: &mut BodyKind,
    whole: &str,
) -> Result<Vec<(String, Float)>, MechanismError> {
    let mut text = side.to_string();
    while let Some(pos) = text.find("(+M)") {
        if *body == BodyKind::ThreeBody {
            return Err(perr(0, 0, format!("mixed collider notation in '{whole}'")));
        }
        *body = BodyKind::PressureDependent;
        text.replace_range(pos..pos + 4, " ");
    }
    let mut terms: Vec<(String, Float)> = Vec::new();
    for raw in text.split('+') {
        let tok = raw.trim();
        if tok.is_empty() {
            if text.trim().is_empty() {
                continue;
            }
            return Err(perr(0, 0, format!("empty term in '{}'", whole.trim())));
        }
        if tok == "M" {
            if *body == BodyKind::PressureDependent {
                return Err(perr(0, 0, format!("mixed collider notation in '{whole}'")));
            }
            *body = BodyKind::ThreeBody;
            continue;
        }
        let (coeff, name) = split_coefficient(tok)
            .ok_or_else(|| perr(0, 0, format!("cannot parse term '{tok}' in '{}'", whole.trim())))?;
        if let Some(entry) = terms.iter_mut().find(|(n, _)| *n == name) {
            entry.1 += coeff;
        } else {
            terms.push((name, coeff));
        }
    }
    if terms.is_empty() {
        return Err(perr(0, 0, format!("empty reaction side in '{}'", whole.trim())));
    }
    Ok(terms)
}

/// Splits an optional leading decimal coefficient from a species name.
fn split_coefficient(tok: &str) -> Option<(Float, String)> {
    let mut end = 0;
    let bytes = tok.as_bytes();
    while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
        end += 1;
    }
    if end == 0 {
        return Some((1.0, tok.to_string()));
    }
    let name = tok[end..].trim();
    if name.is_empty() {
        return None; // bare number is not a species
    }
    let coeff: Float = tok[..end].parse().ok()?;
    if coeff <= 0.0 {
        return None;
    }
    Some((coeff, name.to_string()))
}

#[derive(Debug, Default)]
struct SpeciesBlock {
    line: usize,
    name: String,
    composition: Vec<(String, Float)>,
    declared_weight: Option<Float>,
    temps: Option<(Float, Float, Float)>,
    low: Option<[Float; 7]>,
    high: Option<[Float; 7]>,
}

#[derive(Debug, Default)]
struct ReactionBlock {
    line: usize,
    equation: String,
    parsed: Option<ParsedEquation>,
    rate: Option<ArrheniusRate>,
    low: Option<ArrheniusRate>,
    high: Option<ArrheniusRate>,
    troe: Option<(Float, Float, Float, Option<Float>)>,
    chem_activated: bool,
    reverse: Option<ArrheniusRate>,
    efficiencies: Vec<(String, Float, usize)>,
}

/// Parses and fully validates a mechanism file.
pub fn parse_mechanism(text: &str) -> Result<(GasModel, Mechanism), MechanismError> {
    let mut elements: Vec<(String, Float)> = Vec::new();
    let mut species: Vec<SpeciesBlock> = Vec::new();
    let mut reactions: Vec<ReactionBlock> = Vec::new();

    #[derive(PartialEq)]
    enum Section {
        Top,
        Elements,
        Species,
        Reaction,
    }
    let mut section = Section::Top;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut words = trimmed.split_whitespace();
        let key = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        match key {
            "elements" => {
                section = Section::Elements;
            }
            "species" => {
                let name = rest
                    .first()
                    .ok_or_else(|| perr(line, 1, "species block needs a name"))?;
                species.push(SpeciesBlock {
                    line,
                    name: name.to_string(),
                    ..Default::default()
                });
                section = Section::Species;
            }
            "reaction" => {
                let equation = trimmed["reaction".len()..].trim().to_string();
                if equation.is_empty() {
                    return Err(perr(line, 1, "reaction block needs an equation"));
                }
                let parsed = parse_reaction_equation(&equation).map_err(|e| match e {
                    MechanismError::Parse { msg, .. } => perr(line, 1, msg),
                    other => other,
                })?;
                reactions.push(ReactionBlock {
                    line,
                    equation,
                    parsed: Some(parsed),
                    ..Default::default()
                });
                section = Section::Reaction;
            }
            _ => match section {
                Section::Elements => {
                    let weight: Float = rest
                        .first()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| perr(line, 1, "element entry: NAME WEIGHT"))?;
                    elements.push((key.to_string(), weight));
                }
                Section::Species => {
                    let block = species.last_mut().unwrap();
                    parse_species_key(block, key, &rest, line)?;
                }
                Section::Reaction => {
                    let block = reactions.last_mut().unwrap();
                    parse_reaction_key(block, key, &rest, line)?;
                }
                Section::Top => {
                    return Err(perr(line, 1, format!("unexpected token '{key}'")));
                }
            },
        }
    }

    build_model(elements, species, reactions)
}

fn parse_numbers(rest: &[&str], n: usize, line: usize, what: &str) -> Result<Vec<Float>, MechanismError> {
    if rest.len() != n {
        return Err(perr(line, 1, format!("{what} expects {n} numbers, found {}", rest.len())));
    }
    rest.iter()
        .map(|w| {
            w.parse()
                .map_err(|_| perr(line, 1, format!("{what}: cannot parse number '{w}'")))
        })
        .collect()
}

fn parse_species_key(
    block: &mut SpeciesBlock,
    key: &str,
    rest: &[&str],
    line: usize,
) -> Result<(), MechanismError> {
    match key {
        "composition" => {
            for item in rest {
                let (el, count) = item
                    .split_once(':')
                    .ok_or_else(|| perr(line, 1, "composition entries are ELEMENT:COUNT"))?;
                let count: Float = count
                    .parse()
                    .map_err(|_| perr(line, 1, format!("bad atom count '{count}'")))?;
                block.composition.push((el.to_string(), count));
            }
        }
        "weight" => {
            let w = parse_numbers(rest, 1, line, "weight")?;
            block.declared_weight = Some(w[0]);
        }
        "nasa7" => {
            let t = parse_numbers(rest, 3, line, "nasa7")?;
            block.temps = Some((t[0], t[1], t[2]));
        }
        "low" | "high" => {
            let v = parse_numbers(rest, 7, line, key)?;
            let mut a = [0.0; 7];
            a.copy_from_slice(&v);
            if key == "low" {
                block.low = Some(a);
            } else {
                block.high = Some(a);
            }
        }
        other => return Err(perr(line, 1, format!("unknown species key '{other}'"))),
    }
    Ok(())
}

fn parse_rate_triplet(rest: &[&str], line: usize, what: &str) -> Result<ArrheniusRate, MechanismError> {
    let v = parse_numbers(rest, 3, line, what)?;
    Ok(ArrheniusRate {
        a: v[0],
        b: v[1],
        e: v[2],
    })
}

fn parse_reaction_key(
    block: &mut ReactionBlock,
    key: &str,
    rest: &[&str],
    line: usize,
) -> Result<(), MechanismError> {
    match key {
        "rate" => block.rate = Some(parse_rate_triplet(rest, line, "rate")?),
        "low" => block.low = Some(parse_rate_triplet(rest, line, "low")?),
        "high" => block.high = Some(parse_rate_triplet(rest, line, "high")?),
        "rev" => block.reverse = Some(parse_rate_triplet(rest, line, "rev")?),
        "troe" => {
            if rest.len() != 3 && rest.len() != 4 {
                return Err(perr(line, 1, "troe expects 3 or 4 numbers"));
            }
            let v: Vec<Float> = rest
                .iter()
                .map(|w| {
                    w.parse()
                        .map_err(|_| perr(line, 1, format!("troe: cannot parse '{w}'")))
                })
                .collect::<Result<_, _>>()?;
            block.troe = Some((v[0], v[1], v[2], v.get(3).copied()));
        }
        "type" => {
            match rest.first().copied() {
                Some("chemically-activated") => block.chem_activated = true,
                Some("falloff") => block.chem_activated = false,
                other => {
                    return Err(perr(
                        line,
                        1,
                        format!("unknown reaction type {:?}", other.unwrap_or("")),
                    ))
                }
            };
        }
        "efficiencies" => {
            for item in rest {
                let (name, val) = item
                    .split_once(':')
                    .ok_or_else(|| perr(line, 1, "efficiencies are SPECIES:VALUE"))?;
                let val: Float = val
                    .parse()
                    .map_err(|_| perr(line, 1, format!("bad efficiency '{val}'")))?;
                block.efficiencies.push((name.to_string(), val, line));
            }
        }
        other => return Err(perr(line, 1, format!("unknown reaction key '{other}'"))),
    }
    Ok(())
}

fn build_model(
    elements: Vec<(String, Float)>,
    species_blocks: Vec<SpeciesBlock>,
    reaction_blocks: Vec<ReactionBlock>,
) -> Result<(GasModel, Mechanism), MechanismError> {
    let element_weights: HashMap<&str, Float> =
        elements.iter().map(|(n, w)| (n.as_str(), *w)).collect();

    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut species: Vec<SpeciesThermo> = Vec::new();
    for block in &species_blocks {
        if seen.insert(block.name.clone(), block.line).is_some() {
            return Err(MechanismError::DuplicateSpecies {
                line: block.line,
                name: block.name.clone(),
            });
        }
        if block.composition.is_empty() {
            return Err(verr(&block.name, "missing composition"));
        }
        let mut w = 0.0;
        for (el, count) in &block.composition {
            let aw = element_weights
                .get(el.as_str())
                .ok_or_else(|| verr(&block.name, format!("undeclared element {el}")))?;
            w += aw * count;
        }
        if let Some(declared) = block.declared_weight {
            if (declared - w).abs() > 1e-4 * w {
                return Err(verr(
                    &block.name,
                    format!("declared weight {declared} mismatches composition weight {w}"),
                ));
            }
        }
        let (t_lo, t_mid, t_hi) = block
            .temps
            .ok_or_else(|| verr(&block.name, "missing nasa7 temperature line"))?;
        let low = block
            .low
            .ok_or_else(|| verr(&block.name, "missing low-range coefficients"))?;
        let high = block
            .high
            .ok_or_else(|| verr(&block.name, "missing high-range coefficients"))?;
        species.push(SpeciesThermo::new(
            block.name.clone(),
            w,
            block.composition.clone(),
            vec![(t_lo, t_mid, low), (t_mid, t_hi, high)],
        )?);
    }

    let model = GasModel::new(species)?;
    let ns = model.n_species();

    let mut reactions: Vec<Reaction> = Vec::new();
    for block in &reaction_blocks {
        let parsed = block.parsed.as_ref().unwrap();
        let context = block.equation.clone();

        let resolve = |side: &[(String, Float)]| -> Result<Vec<(usize, Float)>, MechanismError> {
            side.iter()
                .map(|(name, nu)| {
                    model
                        .species_index(name)
                        .map(|i| (i, *nu))
                        .ok_or_else(|| MechanismError::UnknownSpecies {
                            line: block.line,
                            name: name.clone(),
                        })
                })
                .collect()
        };
        let nu_f = resolve(&parsed.lhs)?;
        let nu_r = resolve(&parsed.rhs)?;

        // Elemental balance, which implies mass balance.
        for (e_idx, e_name) in model.elements().iter().enumerate() {
            let count = |side: &[(usize, Float)]| -> Float {
                side.iter()
                    .map(|&(i, nu)| nu * model.atom_count(e_idx, i))
                    .sum()
            };
            let (lhs, rhs) = (count(&nu_f), count(&nu_r));
            if (lhs - rhs).abs() > 1e-10 * lhs.abs().max(rhs.abs()).max(1.0) {
                return Err(verr(
                    &context,
                    format!("element {e_name} unbalanced: {lhs} vs {rhs}"),
                ));
            }
        }
        // Mass balance asserted directly as well.
        let mass = |side: &[(usize, Float)]| -> Float {
            side.iter()
                .map(|&(i, nu)| nu * model.species()[i].w)
                .sum()
        };
        let (ml, mr) = (mass(&nu_f), mass(&nu_r));
        if (ml - mr).abs() > 1e-10 * ml.abs().max(mr.abs()) {
            return Err(verr(&context, format!("mass unbalanced: {ml} vs {mr}")));
        }

        let efficiencies = |default_needed: bool| -> Result<Vec<Float>, MechanismError> {
            let mut eff = vec![1.0; ns];
            for (name, val, line) in &block.efficiencies {
                let idx = model
                    .species_index(name)
                    .ok_or_else(|| MechanismError::UnknownSpecies {
                        line: *line,
                        name: name.clone(),
                    })?;
                if *val < 0.0 {
                    return Err(verr(&context, format!("negative efficiency for {name}")));
                }
                eff[idx] = *val;
            }
            let _ = default_needed;
            Ok(eff)
        };

        let check = |rate: &ArrheniusRate, what: &str| -> Result<(), MechanismError> {
            if rate.a <= 0.0 {
                return Err(verr(&context, format!("{what}: A must be positive")));
            }
            if rate.e < 0.0 {
                return Err(verr(&context, format!("{what}: E must be nonnegative")));
            }
            Ok(())
        };

        let rate_law = match parsed.body {
            BodyKind::PressureDependent => {
                let low = block
                    .low
                    .ok_or_else(|| verr(&context, "pressure-dependent reaction needs 'low'"))?;
                let high = block
                    .high
                    .ok_or_else(|| verr(&context, "pressure-dependent reaction needs 'high'"))?;
                check(&low, "low")?;
                check(&high, "high")?;
                let blend = match block.troe {
                    Some((alpha, t3, t1, t2)) => FalloffBlend::Troe { alpha, t3, t1, t2 },
                    None => FalloffBlend::Lindemann,
                };
                let eff = efficiencies(true)?;
                if block.chem_activated {
                    RateLaw::ChemicallyActivated {
                        low,
                        high,
                        efficiencies: eff,
                        blend,
                    }
                } else {
                    RateLaw::Falloff {
                        low,
                        high,
                        efficiencies: eff,
                        blend,
                    }
                }
            }
            BodyKind::ThreeBody => {
                let rate = block
                    .rate
                    .ok_or_else(|| verr(&context, "three-body reaction needs 'rate'"))?;
                check(&rate, "rate")?;
                RateLaw::ThreeBody {
                    rate,
                    efficiencies: efficiencies(true)?,
                }
            }
            BodyKind::None => {
                let rate = block
                    .rate
                    .ok_or_else(|| verr(&context, "reaction needs 'rate'"))?;
                check(&rate, "rate")?;
                if !block.efficiencies.is_empty() {
                    return Err(verr(&context, "efficiencies without a collider"));
                }
                RateLaw::Arrhenius(rate)
            }
        };

        let mut reaction = Reaction::new(
            block.equation.clone(),
            nu_f,
            nu_r,
            parsed.reversible,
            rate_law,
        );
        if let Some(rev) = block.reverse {
            check(&rev, "rev")?;
            reaction = reaction.with_explicit_reverse(rev);
        }
        reactions.push(reaction);
    }

    Ok((model, Mechanism { reactions }))
}

/// Canonical text form of a model + mechanism; `parse(serialize(m))`
/// reproduces the same structures.
pub fn serialize(model: &GasModel, mech: &Mechanism) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let mut elements: Vec<(String, Float)> = Vec::new();
    for sp in model.species() {
        for (el, _) in &sp.composition {
            if !elements.iter().any(|(e, _)| e == el) {
                // Atomic weights are not stored in the model; recover them by
                // solving the species-weight relations (single-element species
                // first, which the shipped data always provides).
                elements.push((el.clone(), 0.0));
            }
        }
    }
    // Solve for atomic weights from species compositions.
    for _ in 0..elements.len() {
        for sp in model.species() {
            let mut unknown = None;
            let mut known_mass = 0.0;
            for (el, count) in &sp.composition {
                let w = elements.iter().find(|(e, _)| e == el).unwrap().1;
                if w == 0.0 {
                    if unknown.is_some() {
                        unknown = Some((el.clone(), Float::NAN));
                        break;
                    }
                    unknown = Some((el.clone(), *count));
                } else {
                    known_mass += w * count;
                }
            }
            if let Some((el, count)) = unknown {
                if count.is_finite() {
                    let w = (sp.w - known_mass) / count;
                    elements.iter_mut().find(|(e, _)| *e == el).unwrap().1 = w;
                }
            }
        }
    }
    out.push_str("elements\n");
    for (el, w) in &elements {
        writeln!(out, "  {el} {w}").unwrap();
    }
    for sp in model.species() {
        writeln!(out, "\nspecies {}", sp.name).unwrap();
        let comp: Vec<String> = sp
            .composition
            .iter()
            .map(|(e, n)| format!("{e}:{n}"))
            .collect();
        writeln!(out, "  composition {}", comp.join(" ")).unwrap();
        writeln!(
            out,
            "  nasa7 {} {} {}",
            sp.ranges[0].t_lo, sp.ranges[0].t_hi, sp.ranges[1].t_hi
        )
        .unwrap();
        for (tag, rg) in [("low ", &sp.ranges[0]), ("high", &sp.ranges[1])] {
            let coeffs: Vec<String> = rg.a.iter().map(|v| format!("{v}")).collect();
            writeln!(out, "  {tag} {}", coeffs.join(" ")).unwrap();
        }
    }
    for rxn in &mech.reactions {
        writeln!(out, "\nreaction {}", rxn.equation).unwrap();
        let write_rate = |out: &mut String, key: &str, r: &ArrheniusRate| {
            writeln!(out, "  {key} {} {} {}", r.a, r.b, r.e).unwrap();
        };
        let eff = |out: &mut String, eff: &[Float]| {
            let items: Vec<String> = eff
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 1.0)
                .map(|(i, v)| format!("{}:{}", model.species()[i].name, v))
                .collect();
            if !items.is_empty() {
                writeln!(out, "  efficiencies {}", items.join(" ")).unwrap();
            }
        };
        match &rxn.rate {
            RateLaw::Arrhenius(r) => write_rate(&mut out, "rate", r),
            RateLaw::ThreeBody { rate, efficiencies } => {
                write_rate(&mut out, "rate", rate);
                eff(&mut out, efficiencies);
            }
            RateLaw::Falloff {
                low,
                high,
                efficiencies,
                blend,
            }
            | RateLaw::ChemicallyActivated {
                low,
                high,
                efficiencies,
                blend,
            } => {
                if matches!(rxn.rate, RateLaw::ChemicallyActivated { .. }) {
                    writeln!(out, "  type chemically-activated").unwrap();
                }
                write_rate(&mut out, "high", high);
                write_rate(&mut out, "low", low);
                if let FalloffBlend::Troe { alpha, t3, t1, t2 } = blend {
                    match t2 {
                        Some(t2) => writeln!(out, "  troe {alpha} {t3} {t1} {t2}").unwrap(),
                        None => writeln!(out, "  troe {alpha} {t3} {t1}").unwrap(),
                    }
                }
                eff(&mut out, efficiencies);
            }
        }
        if let Some(rev) = &rxn.explicit_reverse {
            write_rate(&mut out, "rev", rev);
        }
    }
    out
}

/// Loads the shipped H2-O2-Ar mechanism.
pub fn load_builtin() -> Result<(GasModel, Mechanism), MechanismError> {
    parse_mechanism(BUILTIN_MECHANISM)
}

/// Restricts a model/mechanism pair to the named species (declaration order
/// is preserved). Reactions survive only if every participant is kept;
/// third-body efficiencies of removed species are dropped.
pub fn subset(
    model: &GasModel,
    mech: &Mechanism,
    keep: &[&str],
) -> Result<(GasModel, Mechanism), MechanismError> {
    let mut old_to_new: Vec<Option<usize>> = vec![None; model.n_species()];
    let mut species = Vec::new();
    for sp in model.species() {
        if keep.contains(&sp.name.as_str()) {
            old_to_new[model.species_index(&sp.name).unwrap()] = Some(species.len());
            species.push(sp.clone());
        }
    }
    for name in keep {
        if model.species_index(name).is_none() {
            return Err(MechanismError::UnknownSpecies {
                line: 0,
                name: name.to_string(),
            });
        }
    }
    let new_model = GasModel::new(species)?.with_policy(model.policy());
    let remap_sparse = |side: &[(usize, Float)]| -> Option<Vec<(usize, Float)>> {
        side.iter()
            .map(|&(i, nu)| old_to_new[i].map(|j| (j, nu)))
            .collect()
    };
    let remap_eff = |eff: &[Float]| -> Vec<Float> {
        (0..model.n_species())
            .filter_map(|i| old_to_new[i].map(|_| eff[i]))
            .collect()
    };
    let mut reactions = Vec::new();
    for rxn in &mech.reactions {
        let (Some(nu_f), Some(nu_r)) = (remap_sparse(&rxn.nu_f), remap_sparse(&rxn.nu_r)) else {
            continue;
        };
        let rate = match &rxn.rate {
            RateLaw::Arrhenius(r) => RateLaw::Arrhenius(*r),
            RateLaw::ThreeBody { rate, efficiencies } => RateLaw::ThreeBody {
                rate: *rate,
                efficiencies: remap_eff(efficiencies),
            },
            RateLaw::Falloff {
                low,
                high,
                efficiencies,
                blend,
            } => RateLaw::Falloff {
                low: *low,
                high: *high,
                efficiencies: remap_eff(efficiencies),
                blend: *blend,
            },
            RateLaw::ChemicallyActivated {
                low,
                high,
                efficiencies,
                blend,
            } => RateLaw::ChemicallyActivated {
                low: *low,
                high: *high,
                efficiencies: remap_eff(efficiencies),
                blend: *blend,
            },
        };
        let mut new_rxn = Reaction::new(
            rxn.equation.clone(),
            nu_f,
            nu_r,
            rxn.reversible,
            rate,
        );
        if let Some(rev) = rxn.explicit_reverse {
            new_rxn = new_rxn.with_explicit_reverse(rev);
        }
        reactions.push(new_rxn);
    }
    Ok((new_model, Mechanism { reactions }))
}
