use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use pircon_core::coxeter::{CoxeterSpec, CoxeterSystem, DiagramAutomorphism, TwistedSets};
use pircon_core::FinitePoset;

use crate::{GlobalOpts, SourceArgs, Subset};

pub fn read_poset(path: &Path, max_elements: usize) -> Result<FinitePoset> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let p = FinitePoset::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    check_size(&p, max_elements)?;
    Ok(p)
}

pub fn check_size(p: &FinitePoset, max_elements: usize) -> Result<()> {
    if p.len() > max_elements {
        bail!("poset has {} elements, above the limit {max_elements}", p.len());
    }
    Ok(())
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
pub fn read_coxeter(arg: &str) -> Result<CoxeterSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    Ok(CoxeterSpec::from_json(&text)?)
}

pub fn build_group(g: &GlobalOpts, spec: &CoxeterSpec) -> Result<(CoxeterSystem, DiagramAutomorphism)> {
    Ok(spec.build(g.max_group_order)?)
}

/// Elements of the requested subset, optionally restricted to an ideal, increasing.
pub fn coxeter_subset(
    group: &CoxeterSystem,
    sets: &TwistedSets<'_>,
    subset: Subset,
    below: Option<&str>,
) -> Result<Vec<usize>> {
    let base: Vec<usize> = match subset {
        Subset::W => group.all_elements(),
        Subset::Iota => sets.identities().to_vec(),
        Subset::Involutions => sets.involutions().to_vec(),
    };
    let Some(word) = below else { return Ok(base) };
    let w = group.parse(word)?;
    if base.binary_search(&w).is_err() {
        bail!("`{}` is not in the chosen subset", group.name(w));
    }
    Ok(base.into_iter().filter(|&x| group.bruhat_leq(x, w)).collect())
}

pub fn source_inputs(a: &SourceArgs) -> Value {
    match (&a.poset, &a.coxeter) {
        (Some(p), _) => json!({ "poset": p.display().to_string() }),
        (None, Some(c)) => json!({
            "coxeter": c,
            "subset": format!("{:?}", a.subset).to_lowercase(),
            "below": a.below,
        }),
        (None, None) => Value::Null,
    }
}
