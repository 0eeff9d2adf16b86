//! One function per subcommand. Each returns its inputs, checks and outputs;
//! the envelope (seed, status, timing) is added by [`super::run`].

use super::config::{load_operator_file, parse_config, Model, NamedValuation};
use super::{usage, CliError, Command, GlobalArgs, Outcome, TGrid};
use crate::groupoid::{equivariant_maps, slice_groupoid, slice_object, EquivariantMap, FiniteAction};
use crate::invariant::{
    change_of_variables, check_axioms, counting_valuation, epi_mass, fiber_product_oracle, glue_measures,
    pullback_measure, ChiSection, InvariantMeasure, MeasureClass, MeasureError, ObjectMeasure,
};
use crate::modular::{
    commutant_basis, kms_check, kms_function, measure_from_state, non_trace_witness, state_from_measure, theta,
    trace_check, weight, DensitySection, ModularError, OperatorMatrix, VectorMap,
};
use crate::random::seeded_rng;
use crate::report::Check;
use crate::tolerance::rel_deviation;
use crate::valuation::{radon_nikodym, OrbitFunction, Valuation};
use clap::Args;
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Map, Value};
use std::collections::BTreeSet;
use std::path::Path;

const DEFAULT_GRID: (f64, f64, f64) = (-5.0, 5.0, 0.5);
/// Maps enumerated per ordered pair of actions in `measure-check`.
const DEFAULT_MAP_LIMIT: usize = 16;
/// Covers compared pairwise in `extend`.
const MAX_COVERS: usize = 8;
/// Commutant basis elements used to form pairs in `trace`.
const MAX_TRACE_BASIS: usize = 12;

#[derive(Debug, Clone, Args)]
pub struct OrbitsArgs {
    /// Restrict to one action.
    #[arg(long)]
    pub action: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureCheckArgs {
    /// An entry of `invariant_measures`; all of them when omitted.
    #[arg(long)]
    pub measure: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MAP_LIMIT)]
    pub map_limit: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ChangeOfVarsArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub measure: Option<String>,
    /// Random test functions of each kind.
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ExtendArgs {
    #[arg(long)]
    pub object: String,
    /// Comma-separated measures forming the class.
    #[arg(long, value_delimiter = ',', required = true)]
    pub class: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GlueArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub section: String,
}

#[derive(Debug, Clone, Args)]
pub struct ChiArgs {
    #[arg(long)]
    pub object: String,
    /// Defaults to the counting section.
    #[arg(long)]
    pub section: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct RnArgs {
    #[arg(long)]
    pub mu: String,
    #[arg(long)]
    pub nu: String,
    #[arg(long)]
    pub object: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ModularFlowArgs {
    /// Operator name or file.
    #[arg(long)]
    pub operator: String,
    /// Defaults to the only measure on the operator's carrier.
    #[arg(long)]
    pub section: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct KmsArgs {
    #[arg(long)]
    pub u: String,
    #[arg(long)]
    pub v: String,
    #[arg(long)]
    pub measure: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub section: String,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub measure: String,
    /// Rescale the measure to total mass one first.
    #[arg(long)]
    pub normalize: bool,
}

struct Ctx<'a> {
    global: &'a GlobalArgs,
    model: Model,
}

impl Ctx<'_> {
    fn tol(&self) -> f64 {
        self.global.tolerance
    }

    fn grid(&self) -> Vec<f64> {
        match &self.global.t_grid {
            Some(TGrid(ts)) => ts.clone(),
            None => {
                let (a, b, s) = DEFAULT_GRID;
                super::parse_t_grid(&format!("{a}:{b}:{s}")).expect("default grid").0
            }
        }
    }

    fn action(&self, name: &str) -> Result<&FiniteAction, CliError> {
        self.model
            .actions
            .get(name)
            .ok_or_else(|| usage(format!("unknown action `{name}`")))
    }

    fn measure(&self, name: &str) -> Result<&NamedValuation, CliError> {
        self.model
            .measures
            .get(name)
            .ok_or_else(|| usage(format!("unknown measure `{name}`")))
    }

    fn map(&self, name: &str) -> Result<&EquivariantMap, CliError> {
        self.model
            .maps
            .get(name)
            .map(|m| &m.map)
            .ok_or_else(|| usage(format!("unknown map `{name}`")))
    }

    fn action_name(&self, x: &FiniteAction) -> Option<&str> {
        self.model.actions.iter().find(|(_, a)| *a == x).map(|(n, _)| n.as_str())
    }

    /// A named operator, else a file relative to the working directory or the config.
    fn operator(&self, spec: &str) -> Result<OperatorMatrix, CliError> {
        if let Some(op) = self.model.operators.get(spec) {
            return Ok(op.clone());
        }
        let direct = Path::new(spec).to_path_buf();
        let path = if direct.exists() {
            direct
        } else {
            let dir = self.global.config.as_deref().map(super::config::config_dir).unwrap_or_default();
            dir.join(spec)
        };
        if !path.exists() {
            return Err(usage(format!("`{spec}` is neither an operator name nor a file")));
        }
        Ok(load_operator_file(&self.model, &path)?)
    }

    /// The named measure, else the only one living on `x`.
    fn measure_on(&self, name: Option<&str>, x: &FiniteAction) -> Result<(String, Valuation), CliError> {
        if let Some(n) = name {
            let m = self.measure(n)?;
            if m.valuation.carrier() != x {
                return Err(usage(format!("measure `{n}` does not live on the operator's carrier")));
            }
            return Ok((n.to_string(), m.valuation.clone()));
        }
        let found: Vec<_> = self.model.measures.iter().filter(|(_, m)| m.valuation.carrier() == x).collect();
        match found[..] {
            [(n, m)] => Ok((n.clone(), m.valuation.clone())),
            [] => Err(usage("no measure lives on the operator's carrier")),
            _ => Err(usage("several measures live on the operator's carrier; pass one explicitly")),
        }
    }

    /// Configured invariant measures (one if named); unit weights when none exist.
    fn invariant_measures(&self, name: Option<&str>) -> Result<Vec<(String, InvariantMeasure)>, CliError> {
        if let Some(n) = name {
            let mu = self
                .model
                .invariant_measures
                .get(n)
                .ok_or_else(|| usage(format!("unknown invariant measure `{n}`")))?;
            return Ok(vec![(n.to_string(), mu.clone())]);
        }
        if self.model.invariant_measures.is_empty() {
            let g = &self.model.groupoid;
            let unit = InvariantMeasure::new(g, vec![1.0; g.num_components()]).expect("unit weights are positive");
            return Ok(vec![("unit".into(), unit)]);
        }
        Ok(self.model.invariant_measures.iter().map(|(n, m)| (n.clone(), m.clone())).collect())
    }
}

pub fn dispatch(command: &Command, global: &GlobalArgs) -> Result<Outcome, CliError> {
    let path = global
        .config
        .as_deref()
        .ok_or_else(|| usage("--config <path> is required"))?;
    if let Command::Validate = command {
        return Ok(validate(path));
    }
    let ctx = Ctx {
        global,
        model: parse_config(path)?,
    };
    match command {
        Command::Validate => unreachable!("handled above"),
        Command::Orbits(a) => orbits(&ctx, a),
        Command::MeasureCheck(a) => measure_check(&ctx, a),
        Command::ChangeOfVars(a) => change_of_vars(&ctx, a),
        Command::Extend(a) => extend(&ctx, a),
        Command::Glue(a) => glue(&ctx, a),
        Command::Chi(a) => chi(&ctx, a),
        Command::Rn(a) => rn(&ctx, a),
        Command::ModularFlow(a) => modular_flow(&ctx, a),
        Command::Kms(a) => kms(&ctx, a),
        Command::Trace(a) => trace(&ctx, a),
        Command::State(a) => state(&ctx, a),
    }
}

fn complex(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn entries_json(a: &OperatorMatrix) -> Value {
    Value::Array(a.to_entries().into_iter().map(|(x, y, re, im)| json!([x, y, re, im])).collect())
}

fn inputs(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn validate(path: &Path) -> Outcome {
    let mut out = Outcome::default();
    match parse_config(path) {
        Ok(m) => {
            out.checks.push(Check::pass("config:valid"));
            let g = &m.groupoid;
            out.outputs.insert("objects".into(), json!(g.num_objects()));
            out.outputs.insert("morphisms".into(), json!(g.num_morphisms()));
            out.outputs.insert("components".into(), json!(g.num_components()));
            let orbits: Map<String, Value> = m.actions.iter().map(|(n, x)| (n.clone(), json!(x.num_orbits()))).collect();
            out.outputs.insert("orbits".into(), Value::Object(orbits));
        }
        Err(e) => out.checks.push(Check::fail("config:valid", e.to_string())),
    }
    out
}

/// Transport closure of one element, computed without the cached orbits.
fn closure(x: &FiniteAction, start: usize) -> BTreeSet<usize> {
    let g = x.groupoid();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(e) = stack.pop() {
        for &m in g.out_morphisms(x.object_of(e)) {
            let next = x.act(m, e);
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen
}

fn orbits(ctx: &Ctx, args: &OrbitsArgs) -> Result<Outcome, CliError> {
    let names: Vec<&String> = match &args.action {
        Some(a) => {
            ctx.action(a)?;
            ctx.model.actions.keys().filter(|k| *k == a).collect()
        }
        None => ctx.model.actions.keys().collect(),
    };
    let mut out = Outcome {
        inputs: inputs(&[("action", json!(args.action))]),
        ..Default::default()
    };
    let g = &ctx.model.groupoid;
    for name in names {
        let x = &ctx.model.actions[name];
        let mut covered = vec![0usize; x.len()];
        let mut bad = None;
        for orbit in x.orbits() {
            for &e in orbit {
                covered[e] += 1;
            }
            let expected: BTreeSet<usize> = orbit.iter().copied().collect();
            if bad.is_none() && closure(x, orbit[0]) != expected {
                bad = Some(format!("orbit of {} is not its transport closure", x.element_name(orbit[0])));
            }
        }
        if let Some(e) = covered.iter().position(|&c| c != 1) {
            bad.get_or_insert(format!("{} lies in {} orbits", x.element_name(e), covered[e]));
        }
        out.checks.push(match bad {
            None => Check::pass(format!("orbits:{name}:partition")),
            Some(w) => Check::fail(format!("orbits:{name}:partition"), w),
        });

        let mut stab_bad = None;
        let mut stabilizers = Map::new();
        for e in 0..x.len() {
            let s = x.object_of(e);
            let stab = x.stabilizer_order(e);
            let in_fiber = x.orbits()[x.orbit_of(e)].iter().filter(|&&k| x.object_of(k) == s).count();
            let ends = g.endomorphisms(s).count();
            if stab * in_fiber != ends && stab_bad.is_none() {
                stab_bad = Some(format!("{}: |Stab| = {stab}, |orbit in fiber| = {in_fiber}, |End| = {ends}", x.element_name(e)));
            }
            stabilizers.insert(x.element_name(e).to_string(), json!(stab));
        }
        out.checks.push(match stab_bad {
            None => Check::pass(format!("orbits:{name}:orbit_stabilizer")),
            Some(w) => Check::fail(format!("orbits:{name}:orbit_stabilizer"), w),
        });

        let orbit_names: Vec<Vec<&str>> = x
            .orbits()
            .iter()
            .map(|o| o.iter().map(|&e| x.element_name(e)).collect())
            .collect();
        let cardinal: Map<String, Value> = x
            .internal_cardinal()
            .iter()
            .enumerate()
            .map(|(c, n)| (g.component_representative(c).to_string(), json!(n)))
            .collect();
        out.outputs.insert(
            name.clone(),
            json!({"orbits": orbit_names, "stabilizers": stabilizers, "internal_cardinal": cardinal}),
        );
    }
    Ok(out)
}

fn measure_check(ctx: &Ctx, args: &MeasureCheckArgs) -> Result<Outcome, CliError> {
    let model = &ctx.model;
    let g = &model.groupoid;
    let mut objects: Vec<(String, FiniteAction)> = model.actions.iter().map(|(n, x)| (n.clone(), x.clone())).collect();
    objects.push(("terminal".into(), FiniteAction::terminal(g)));
    let mut maps: Vec<(String, EquivariantMap)> = model.maps.iter().map(|(n, m)| (n.clone(), m.map.clone())).collect();
    for (a, x) in &model.actions {
        maps.push((format!("{a}->terminal"), EquivariantMap::to_terminal(x)));
        for (b, y) in &model.actions {
            let found = equivariant_maps(x, y, args.map_limit).map_err(|e| usage(e.to_string()))?;
            // only n-to-1 maps carry an axiom; the rest would be n/a noise
            let n_to_1 = found.into_iter().filter(|f| f.fiber_profile().n_to_1.is_some_and(|n| n > 0));
            for (k, f) in n_to_1.enumerate() {
                maps.push((format!("{a}->{b}#{k}"), f));
            }
        }
    }

    let mut out = Outcome {
        inputs: inputs(&[("measure", json!(args.measure)), ("map_limit", json!(args.map_limit))]),
        ..Default::default()
    };
    let tol = ctx.tol();
    for (mname, mu) in ctx.invariant_measures(args.measure.as_deref())? {
        for c in check_axioms(&mu, g, &objects, &maps, tol) {
            out.checks.push(Check {
                name: format!("{mname}/{}", c.name),
                ..c
            });
        }
        for (fname, f) in maps.iter().filter(|(_, f)| f.is_epi()) {
            let label = format!("{mname}/epi:{fname}");
            let lhs = epi_mass(f, &mu).map_err(|e| usage(e.to_string()))?;
            let rhs = mu.measure(f.target());
            out.checks.push(Check::compare(label, lhs, rhs, tol, format!("{fname}: {lhs} vs {rhs}")));
        }
        let masses: Map<String, Value> = objects.iter().map(|(n, x)| (n.clone(), json!(mu.measure(x)))).collect();
        out.outputs.insert(mname.clone(), json!({"weights": mu.to_map(), "mass": masses}));
    }
    for (name, x) in &model.actions {
        let label = format!("integrability:{name}");
        out.checks.push(match counting_valuation(x) {
            None => Check::not_applicable(label, "empty object"),
            Some(v) if v.is_finite() && v.is_well_supported() && v.total() > 0.0 => Check::pass(label),
            Some(v) => Check::fail(label, format!("counting valuation has total {}", v.total())),
        });
    }
    out.outputs.insert("maps_checked".into(), json!(maps.len()));
    Ok(out)
}

fn change_of_vars(ctx: &Ctx, args: &ChangeOfVarsArgs) -> Result<Outcome, CliError> {
    let f = ctx.map(&args.map)?;
    let (mname, mu) = ctx.invariant_measures(args.measure.as_deref())?.remove(0);
    let y = f.source();
    let tol = ctx.tol();
    let mut rng = seeded_rng(ctx.global.seed);
    let mut samples: Vec<(String, OrbitFunction<Complex64>)> = Vec::new();
    for o in 0..y.num_orbits() {
        let rep = y.element_name(y.orbit_representative(o));
        let h = OrbitFunction::indicator(y, &y.orbit_subobject(o)).expect("orbits are invariant");
        samples.push((format!("cov:indicator[{rep}]"), h.to_complex()));
    }
    samples.push(("cov:constant".into(), OrbitFunction::constant(y, Complex64::new(1.0, 0.0))));
    for k in 0..args.samples {
        let real: Vec<Complex64> = (0..y.num_orbits())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
            .collect();
        samples.push((format!("cov:linear[{k}]"), OrbitFunction::from_values(y, real).expect("length")));
    }
    for k in 0..args.samples {
        let values: Vec<Complex64> = (0..y.num_orbits())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        samples.push((format!("cov:complex[{k}]"), OrbitFunction::from_values(y, values).expect("length")));
    }
    let mut out = Outcome {
        inputs: inputs(&[("map", json!(args.map)), ("measure", json!(mname)), ("samples", json!(args.samples))]),
        ..Default::default()
    };
    let mut integrals = Map::new();
    for (name, h) in samples {
        match change_of_variables(f, &h, &mu) {
            Ok(cv) => {
                out.checks.push(Check::from_deviation(
                    name.clone(),
                    cv.relative_deviation(),
                    tol,
                    format!("lhs {} vs rhs {}", cv.lhs, cv.rhs),
                ));
                integrals.insert(name, json!({"lhs": complex(cv.lhs), "rhs": complex(cv.rhs)}));
            }
            Err(e) => out.checks.push(Check::fail(name, e.to_string())),
        }
    }
    out.outputs.insert("integrals".into(), Value::Object(integrals));
    Ok(out)
}

fn extend(ctx: &Ctx, args: &ExtendArgs) -> Result<Outcome, CliError> {
    let x = ctx.action(&args.object)?;
    let members = args
        .class
        .iter()
        .map(|n| ctx.measure(n).map(|m| (n.clone(), m.valuation.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let class = MeasureClass::new(members);
    let sample: Vec<(String, FiniteAction)> = ctx.model.actions.iter().map(|(n, a)| (n.clone(), a.clone())).collect();
    let tol = ctx.tol();
    let mut out = Outcome {
        inputs: inputs(&[("object", json!(args.object)), ("class", json!(args.class))]),
        ..Default::default()
    };

    out.checks.push(match class.check_downward_closed(&sample) {
        Ok(()) => Check::pass("extend:downward_closed"),
        Err(e) => Check::fail("extend:downward_closed", e.to_string()),
    });
    let covers = class.covers(x).map_err(|e| usage(e.to_string()))?;
    out.checks.push(if covers.is_empty() {
        Check::fail("extend:covered", "no epimorphism from a class member")
    } else {
        Check::pass("extend:covered")
    });
    let used = &covers[..covers.len().min(MAX_COVERS)];
    let mut cover_values = Vec::new();
    for (i, f) in used {
        let (name, nu) = &class.members()[*i];
        let v = crate::invariant::extend_along(nu, f).map_err(|e| usage(e.to_string()))?;
        cover_values.push(json!({"member": name, "value": v, "image": f.images().iter().map(|&e| x.element_name(e)).collect::<Vec<_>>()}));
    }
    if used.len() < 2 {
        out.checks.push(Check::not_applicable("extend:agree", "fewer than two covers"));
    }
    let mut oracles = Vec::new();
    for a in 0..used.len() {
        for b in a + 1..used.len() {
            let ((i, f), (j, g)) = (&used[a], &used[b]);
            let label = format!("extend:agree[{a},{b}]");
            match fiber_product_oracle(f, &class.members()[*i].1, g, &class.members()[*j].1) {
                Ok(o) => {
                    out.checks.push(Check::from_deviation(
                        label,
                        o.max_deviation(),
                        tol,
                        format!("{} vs {} (fiber product {})", o.via_first, o.via_second, o.fiber_product),
                    ));
                    oracles.push(json!({
                        "covers": [a, b],
                        "via_first": o.via_first,
                        "via_second": o.via_second,
                        "fiber_product": o.fiber_product,
                        "fiber_product_size": o.fiber_product_size,
                    }));
                }
                Err(e) => out.checks.push(Check::fail(label, e.to_string())),
            }
        }
    }
    if let Ok(v) = class.extend(x, &sample) {
        out.outputs.insert("value".into(), json!(v.value));
        out.outputs.insert("cover".into(), json!(v.cover));
    }
    out.outputs.insert("covers".into(), Value::Array(cover_values));
    out.outputs.insert("covers_found".into(), json!(covers.len()));
    out.outputs.insert("oracles".into(), Value::Array(oracles));
    Ok(out)
}

fn max_rel_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&p, &q)| rel_deviation(p, q)).fold(0.0, f64::max)
}

fn section_of(ctx: &Ctx, name: &str, on: &FiniteAction) -> Result<ChiSection, CliError> {
    let m = ctx.measure(name)?;
    if m.valuation.carrier() != on {
        return Err(usage(format!("measure `{name}` lives on `{}`", m.on)));
    }
    ChiSection::from_valuation(&m.valuation).map_err(|e| usage(format!("measure `{name}`: {e}")))
}

fn glue(ctx: &Ctx, args: &GlueArgs) -> Result<Outcome, CliError> {
    let f = ctx.map(&args.map)?;
    let lambda = section_of(ctx, &args.section, f.source())?;
    let tol = ctx.tol();
    let mut out = Outcome {
        inputs: inputs(&[("map", json!(args.map)), ("section", json!(args.section))]),
        ..Default::default()
    };
    match glue_measures(f, &lambda, tol) {
        Ok(nu) => {
            out.checks.push(Check::pass("glue:descent"));
            let back = pullback_measure(f, &nu).map_err(|e| usage(e.to_string()))?;
            out.checks.push(Check::from_deviation(
                "glue:pullback_of_glue",
                max_rel_deviation(back.values(), lambda.values()),
                tol,
                "pullback of the glued section differs",
            ));
            match glue_measures(f, &back, tol) {
                Ok(again) => out.checks.push(Check::from_deviation(
                    "glue:glue_of_pullback",
                    max_rel_deviation(again.values(), nu.values()),
                    tol,
                    "gluing the pullback differs",
                )),
                Err(e) => out.checks.push(Check::fail("glue:glue_of_pullback", e.to_string())),
            }
            out.outputs.insert("glued".into(), json!(nu.to_map()));
        }
        Err(e @ MeasureError::DescentFailure { .. }) | Err(e @ MeasureError::NotEpi) => {
            out.checks.push(Check::fail("glue:descent", e.to_string()));
        }
        Err(e) => return Err(usage(e.to_string())),
    }
    Ok(out)
}

fn chi(ctx: &Ctx, args: &ChiArgs) -> Result<Outcome, CliError> {
    let x = ctx.action(&args.object)?;
    if x.is_empty() {
        return Err(usage("sections over the empty object carry no data"));
    }
    let lambda = match &args.section {
        Some(n) => section_of(ctx, n, x)?,
        None => ChiSection::from_valuation(&Valuation::counting(x)).expect("counting is positive"),
    };
    let tol = ctx.tol();
    let mut out = Outcome {
        inputs: inputs(&[("object", json!(args.object)), ("section", json!(args.section))]),
        ..Default::default()
    };

    let slice = lambda.to_slice_measure();
    match ChiSection::from_slice_measure(x, &slice) {
        Ok(back) if back == lambda => out.checks.push(Check::pass("chi:slice_round_trip")),
        Ok(back) => out.checks.push(Check::fail(
            "chi:slice_round_trip",
            format!("{:?} vs {:?}", back.values(), lambda.values()),
        )),
        Err(e) => out.checks.push(Check::fail("chi:slice_round_trip", e.to_string())),
    }

    let sg = slice_groupoid(x);
    let mut over: Vec<(String, EquivariantMap)> = vec![("id".into(), EquivariantMap::identity(x))];
    over.extend(ctx.model.maps.iter().filter(|(_, m)| m.map.target() == x).map(|(n, m)| (n.clone(), m.map.clone())));
    let mut masses = Map::new();
    for (name, p) in &over {
        let label = format!("chi:slice_mass:{name}");
        let direct = lambda.slice_mass(p).map_err(|e| usage(e.to_string()))?;
        match slice_object(p, &sg).map_err(MeasureError::from).and_then(|v| slice.evaluate(&v)) {
            Ok(via_slice) => out.checks.push(Check::compare(label, direct, via_slice, tol, format!("{direct} vs {via_slice}"))),
            Err(e) => out.checks.push(Check::fail(label, e.to_string())),
        }
        masses.insert(name.clone(), json!(direct));
    }

    let counting = ChiSection::from_valuation(&Valuation::counting(x)).expect("counting is positive");
    let ratio = lambda.principal_ratio(&counting).map_err(|e| usage(e.to_string()))?;
    let moved = lambda.principal_action(&ratio).map_err(|e| usage(e.to_string()))?;
    out.checks.push(Check::from_deviation(
        "chi:principal_transitive",
        max_rel_deviation(moved.values(), counting.values()),
        tol,
        "ratio does not carry the section to the counting section",
    ));
    let trivial = lambda.principal_ratio(&lambda).map_err(|e| usage(e.to_string()))?;
    out.checks.push(Check::from_deviation(
        "chi:principal_free",
        trivial.values().iter().map(|&v| (v - 1.0).abs()).fold(0.0, f64::max),
        tol,
        "stabilizer of the section is nontrivial",
    ));

    if *x == FiniteAction::terminal(&ctx.model.groupoid) {
        match lambda.to_global() {
            Ok(mu) if ChiSection::from_global(&mu) == lambda => out.checks.push(Check::pass("chi:global_round_trip")),
            Ok(_) => out.checks.push(Check::fail("chi:global_round_trip", "global measure does not return the section")),
            Err(e) => out.checks.push(Check::fail("chi:global_round_trip", e.to_string())),
        }
    }

    out.outputs.insert("section".into(), json!(lambda.to_map()));
    out.outputs.insert("slice_weights".into(), json!(slice.to_map()));
    out.outputs.insert("slice_masses".into(), Value::Object(masses));
    out.outputs.insert("ratio_to_counting".into(), json!(ratio.to_map()));
    Ok(out)
}

fn rn(ctx: &Ctx, args: &RnArgs) -> Result<Outcome, CliError> {
    let (mu, nu) = (ctx.measure(&args.mu)?, ctx.measure(&args.nu)?);
    if let Some(obj) = &args.object {
        ctx.action(obj)?;
        for (n, m) in [(&args.mu, mu), (&args.nu, nu)] {
            if &m.on != obj {
                return Err(usage(format!("measure `{n}` lives on `{}`, not `{obj}`", m.on)));
            }
        }
    }
    let mut out = Outcome {
        inputs: inputs(&[("mu", json!(args.mu)), ("nu", json!(args.nu)), ("object", json!(args.object))]),
        ..Default::default()
    };
    match radon_nikodym(&mu.valuation, &nu.valuation) {
        Ok(f) => {
            out.checks.push(Check::pass("rn:defined"));
            let rebuilt = nu.valuation.scaled_by(&f).map_err(|e| usage(e.to_string()))?;
            out.checks.push(Check::from_deviation(
                "rn:reconstructs",
                max_rel_deviation(rebuilt.weights(), mu.valuation.weights()),
                ctx.tol(),
                "f·nu differs from mu",
            ));
            out.outputs.insert("density".into(), json!(f.to_map()));
        }
        Err(e) => out.checks.push(Check::fail("rn:defined", e.to_string())),
    }
    Ok(out)
}

/// `diag(λ̂)^{-it} · a · diag(λ̂)^{it}` by dense products.
fn conjugation_oracle(a: &OperatorMatrix, t: f64, lambda: &DensitySection) -> Array2<Complex64> {
    let n = lambda.values().len();
    let mut left = Array2::zeros((n, n));
    let mut right = Array2::zeros((n, n));
    for (k, &l) in lambda.values().iter().enumerate() {
        left[[k, k]] = Complex64::new(l, 0.0).powc(Complex64::new(0.0, -t));
        right[[k, k]] = Complex64::new(l, 0.0).powc(Complex64::new(0.0, t));
    }
    left.dot(a.matrix()).dot(&right)
}

fn max_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

fn modular_flow(ctx: &Ctx, args: &ModularFlowArgs) -> Result<Outcome, CliError> {
    let a = ctx.operator(&args.operator)?;
    let x = a.carrier();
    let (sname, mu) = ctx.measure_on(args.section.as_deref(), x)?;
    let lambda = DensitySection::from_valuation(&mu).map_err(|e| usage(e.to_string()))?;
    let ts = ctx.grid();
    let tol = ctx.tol();
    let scale = a.max_norm().max(f64::MIN_POSITIVE);
    let run = |t: f64| theta(&a, t, &lambda).map_err(|e| usage(e.to_string()));

    let mut oracle = (0.0f64, 0.0);
    let mut group = (0.0f64, (0.0, 0.0));
    let mut flowed = Vec::with_capacity(ts.len());
    for &t in &ts {
        let th = run(t)?;
        let d = max_diff(th.matrix(), &conjugation_oracle(&a, t, &lambda)) / scale;
        if d > oracle.0 {
            oracle = (d, t);
        }
        flowed.push(th);
    }
    for (i, &s) in ts.iter().enumerate() {
        for &t in &ts {
            let lhs = theta(&flowed[i], t, &lambda).map_err(|e| usage(e.to_string()))?;
            let d = max_diff(lhs.matrix(), run(s + t)?.matrix()) / scale;
            if d > group.0 {
                group = (d, (s, t));
            }
        }
    }
    let mut out = Outcome {
        inputs: inputs(&[("operator", json!(args.operator)), ("section", json!(sname))]),
        ..Default::default()
    };
    out.checks.push(Check::from_deviation("flow:oracle", oracle.0, tol, format!("t = {}", oracle.1)));
    out.checks.push(Check::from_deviation(
        "flow:group_law",
        group.0,
        tol,
        format!("s = {}, t = {}", group.1 .0, group.1 .1),
    ));
    if a.is_in_algebra() {
        match flowed.iter().zip(&ts).find(|(th, _)| !th.is_in_algebra()) {
            None => out.checks.push(Check::pass("flow:in_algebra")),
            Some((_, t)) => out.checks.push(Check::fail("flow:in_algebra", format!("t = {t}"))),
        }
    } else {
        out.checks.push(Check::not_applicable("flow:in_algebra", "operator is not in the commutant"));
    }
    match weight(&a, &mu) {
        Ok(w0) => {
            let mut worst = (0.0f64, 0.0);
            for (th, &t) in flowed.iter().zip(&ts) {
                let d = match weight(th, &mu) {
                    Ok(w) => (w - w0).norm() / w0.norm().max(scale * mu.total()),
                    Err(_) => f64::INFINITY,
                };
                if d > worst.0 {
                    worst = (d, t);
                }
            }
            out.checks.push(Check::from_deviation("flow:weight_invariance", worst.0, tol, format!("t = {}", worst.1)));
            out.outputs.insert("weight".into(), complex(w0));
        }
        Err(_) => out.checks.push(Check::not_applicable("flow:weight_invariance", "diagonal is not orbit-constant")),
    }
    out.outputs.insert("density".into(), json!(lambda.values()));
    out.outputs.insert("theta_at_1".into(), entries_json(&run(1.0)?));
    out.outputs.insert("samples".into(), json!(ts.len()));
    Ok(out)
}

fn kms(ctx: &Ctx, args: &KmsArgs) -> Result<Outcome, CliError> {
    let u = ctx.operator(&args.u)?;
    let v = ctx.operator(&args.v)?;
    if u.carrier() != v.carrier() {
        return Err(usage("u and v act on different carriers"));
    }
    let (mname, mu) = ctx.measure_on(args.measure.as_deref(), u.carrier())?;
    let lambda = DensitySection::from_valuation(&mu).map_err(|e| usage(e.to_string()))?;
    let ts = ctx.grid();
    let mut out = Outcome {
        inputs: inputs(&[("u", json!(args.u)), ("v", json!(args.v)), ("measure", json!(mname))]),
        ..Default::default()
    };
    if let Some(carrier) = ctx.action_name(u.carrier()) {
        out.inputs.insert("carrier".into(), json!(carrier));
    }
    match kms_check(&u, &v, &ts, &lambda, &mu, ctx.tol()) {
        Ok(report) => {
            out.checks.extend(report.checks);
            let points: Vec<Value> = report
                .points
                .iter()
                .map(|p| {
                    json!({
                        "t": p.t,
                        "f_real": complex(p.f_real),
                        "weight_real": p.weight_real.map(complex),
                        "f_shifted": complex(p.f_shifted),
                        "weight_shifted": p.weight_shifted.map(complex),
                    })
                })
                .collect();
            out.outputs.insert("points".into(), Value::Array(points));
            let at = |z| kms_function(&u, &v, z, &lambda, &mu).map(complex).ok();
            out.outputs.insert("f_at_0".into(), json!(at(Complex64::new(0.0, 0.0))));
            out.outputs.insert("f_at_minus_i".into(), json!(at(Complex64::new(0.0, -1.0))));
        }
        Err(e @ ModularError::NotInAlgebra { .. }) => out.checks.push(Check::fail("kms:inputs", e.to_string())),
        Err(e) => return Err(usage(e.to_string())),
    }
    Ok(out)
}

fn trace(ctx: &Ctx, args: &TraceArgs) -> Result<Outcome, CliError> {
    let m = ctx.measure(&args.section)?;
    let lambda = DensitySection::from_valuation(&m.valuation).map_err(|e| usage(e.to_string()))?;
    let mut out = Outcome {
        inputs: inputs(&[("section", json!(args.section))]),
        ..Default::default()
    };
    out.outputs.insert("density".into(), json!(lambda.values()));
    if lambda.is_component_constant() {
        let basis: Vec<OperatorMatrix> = commutant_basis(lambda.carrier()).into_iter().take(MAX_TRACE_BASIS).collect();
        let pairs: Vec<(OperatorMatrix, OperatorMatrix)> = basis
            .iter()
            .flat_map(|u| basis.iter().map(move |v| (u.clone(), v.clone())))
            .collect();
        let checks = trace_check(&lambda, &pairs, &ctx.grid(), ctx.tol()).map_err(|e| usage(e.to_string()))?;
        let ok = !checks.iter().any(Check::is_fail);
        out.checks.extend(checks);
        out.checks.push(if ok {
            Check::pass("trace:dichotomy").with_witness("component-constant density: the weight is a trace")
        } else {
            Check::fail("trace:dichotomy", "component-constant density but the weight is not a trace")
        });
        out.outputs.insert("component_constant".into(), json!(true));
        out.outputs.insert("pairs".into(), json!(pairs.len()));
    } else {
        out.outputs.insert("component_constant".into(), json!(false));
        match non_trace_witness(&lambda) {
            Some(w) if w.weight_uv != w.weight_vu => {
                out.checks.push(
                    Check::pass("trace:dichotomy")
                        .with_witness(format!(
                            "pair ({}, {}): w(uv) = {}, w(vu) = {}",
                            w.pair.0, w.pair.1, w.weight_uv, w.weight_vu
                        ))
                        .with_deviation(w.relative_deviation()),
                );
                out.outputs.insert(
                    "witness".into(),
                    json!({
                        "pair": [w.pair.0, w.pair.1],
                        "u": entries_json(&w.u),
                        "v": entries_json(&w.v),
                        "weight_uv": complex(w.weight_uv),
                        "weight_vu": complex(w.weight_vu),
                        "relative_deviation": w.relative_deviation(),
                    }),
                );
            }
            _ => out.checks.push(Check::fail("trace:dichotomy", "density varies on a component but no witness was found")),
        }
    }
    Ok(out)
}

fn state(ctx: &Ctx, args: &StateArgs) -> Result<Outcome, CliError> {
    let m = ctx.measure(&args.measure)?;
    let mu = if args.normalize {
        m.valuation.normalized().ok_or_else(|| usage("cannot normalize a zero measure"))?
    } else {
        m.valuation.clone()
    };
    let x = mu.carrier();
    let mut out = Outcome {
        inputs: inputs(&[("measure", json!(args.measure)), ("normalize", json!(args.normalize))]),
        ..Default::default()
    };
    // e_x at the orbit representatives has norm one, so η(1) = μ(X)
    let v = VectorMap::basis(x);
    match state_from_measure(&v, &mu) {
        Ok(eta) => {
            out.checks.push(Check::pass("state:normalized"));
            let back = measure_from_state(&eta).map_err(|e| usage(e.to_string()))?;
            out.checks.push(Check::from_deviation(
                "state:round_trip",
                max_rel_deviation(back.weights(), mu.weights()),
                ctx.tol(),
                format!("{:?} vs {:?}", back.weights(), mu.weights()),
            ));
            let one = eta
                .evaluate(&OperatorMatrix::identity(x))
                .map_err(|e| usage(e.to_string()))?;
            let mut positive = true;
            for b in commutant_basis(x) {
                let bb = b.adjoint().matmul(&b).map_err(|e| usage(e.to_string()))?;
                let val = eta.evaluate(&bb).map_err(|e| usage(e.to_string()))?;
                positive &= val.re >= -ctx.tol() && val.im.abs() <= ctx.tol() * (1.0 + val.re.abs());
            }
            out.checks.push(if positive {
                Check::pass("state:positive")
            } else {
                Check::fail("state:positive", "eta(b*b) is not a nonnegative real")
            });
            out.outputs.insert("eta_of_one".into(), complex(one));
            out.outputs.insert("recovered".into(), json!(back.to_map()));
        }
        Err(e @ ModularError::NotNormalized(_)) => {
            out.checks.push(Check::fail("state:normalized", format!("{e}; pass --normalize")));
        }
        Err(e) => return Err(usage(e.to_string())),
    }
    Ok(out)
}
