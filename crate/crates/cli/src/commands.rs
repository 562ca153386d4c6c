use std::collections::BTreeMap;

use nhk_core::curved_modules::{g_functor, verify_counit, verify_s_vs_f, CohomologyTable, KoszulPair, UComplex};
use nhk_core::exact_linalg::{parse_scalar, Scalar};
use nhk_core::gallery::{
    build_enveloping, build_graded_hecke, build_preprojective_data, build_sra, build_weyl, default_gallery,
    standard_symplectic, symmetric_algebra, GroupData, LieData, QuiverData, SraData,
};
use nhk_core::nonhomogeneous::{curved_dual, pbw_check_with, NonhomogeneousPresentation};
use nhk_core::quadratic::koszulness_check;
use nhk_core::resolutions::{ext_modules, free_resolution, hochschild_truncated};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::document::{emit_presentation, matrix_json, parse_complex, parse_module, parse_presentation, vector_json};
use crate::{read_input, Cli, Command, VerifyCheck};

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
}

impl From<crate::document::DocError> for Failure {
    fn from(e: crate::document::DocError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

pub struct Output {
    pub text: String,
    pub pass: bool,
}

fn digest(inputs: &[&str]) -> String {
    let mut h = Sha256::new();
    for s in inputs {
        h.update(s.as_bytes());
        h.update([0u8]);
    }
    format!("sha256:{:x}", h.finalize())
}

fn table_json(t: &CohomologyTable) -> Value {
    Value::Object(t.dims.iter().map(|(p, d)| (p.to_string(), json!(d))).collect())
}

struct Report {
    command: String,
    inputs: Vec<String>,
    cutoffs: Map<String, Value>,
    results: Map<String, Value>,
    pass: bool,
}

impl Report {
    fn new(command: &str, inputs: Vec<String>) -> Self {
        Report { command: command.into(), inputs, cutoffs: Map::new(), results: Map::new(), pass: true }
    }

    fn cutoff(&mut self, k: &str, v: usize) {
        self.cutoffs.insert(k.into(), json!(v));
    }

    fn set(&mut self, k: &str, v: Value) {
        self.results.insert(k.into(), v);
    }

    fn fail_with(&mut self, msg: String) {
        self.pass = false;
        self.set("error", json!(msg));
    }

    fn render(self, as_json: bool) -> Output {
        let refs: Vec<&str> = self.inputs.iter().map(|s| s.as_str()).collect();
        let verdict = if self.pass { "pass" } else { "fail" };
        let doc = json!({
            "command": self.command,
            "input_digest": digest(&refs),
            "tool_version": env!("CARGO_PKG_VERSION"),
            "cutoffs": self.cutoffs,
            "results": self.results,
            "verdict": verdict,
        });
        let text = if as_json {
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("report serializes"))
        } else {
            let mut lines = vec![format!("command  {}", self.command), format!("digest   {}", doc["input_digest"].as_str().unwrap())];
            for (k, v) in doc["cutoffs"].as_object().unwrap() {
                lines.push(format!("cutoff   {k} = {v}"));
            }
            let mut rows = Vec::new();
            flatten("", &doc["results"], &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in rows {
                lines.push(format!("  {k:width$}  {v}"));
            }
            lines.push(format!("verdict  {verdict}"));
            lines.join("\n") + "\n"
        };
        Output { text, pass: self.pass }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !m.is_empty() && (prefix.is_empty() || m.values().any(|x| x.is_object())) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::String(s) => out.push((prefix.into(), s.clone())),
        _ => out.push((prefix.into(), v.to_string())),
    }
}

fn load(file: &Option<String>) -> Result<(String, NonhomogeneousPresentation), Failure> {
    let text = read_input(file.as_deref())?;
    let doc = parse_presentation(&text)?;
    if let Some(name) = &doc.name {
        if name.is_empty() {
            return Err(Failure::Invalid("name: must not be empty".into()));
        }
    }
    Ok((text, doc.presentation))
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Pbw { file, koszul_cutoff } => {
            let (text, p) = load(file)?;
            let mut r = Report::new("pbw", vec![text]);
            r.cutoff("koszul", *koszul_cutoff);
            match pbw_check_with(&p, *koszul_cutoff) {
                Ok(rep) => {
                    r.set("q_dim", json!(rep.q_dim));
                    r.set("intersection_dim", json!(rep.intersection_dim));
                    r.set("conditions", json!({"1": rep.cond1, "2": rep.cond2, "3": rep.cond3}));
                    r.set("koszul_verdict", json!(rep.koszul_verdict));
                    r.set("pbw", json!(rep.pbw()));
                    r.set("summary", json!(rep.summary()));
                    if let Some(w) = &rep.witness {
                        r.set(
                            "witness",
                            json!({"condition": w.condition, "element": vector_json(&w.element), "residual": vector_json(&w.residual)}),
                        );
                    }
                    r.pass = rep.pass();
                }
                Err(e) => r.fail_with(e.to_string()),
            }
            Ok(r.render(cli.json))
        }
        Command::Dualize { file, max_degree } => {
            let (text, p) = load(file)?;
            let mut r = Report::new("dualize", vec![text]);
            r.cutoff("max_degree", *max_degree);
            match curved_dual(&p, (*max_degree).max(2)) {
                Ok(l) => {
                    r.set("dims", json!(l.dims()));
                    if l.differential_is_zero() {
                        r.set("differential", json!("d = 0"));
                    } else {
                        let ds: Map<String, Value> = l.d.iter().enumerate().map(|(n, m)| (n.to_string(), matrix_json(m))).collect();
                        r.set("differential", Value::Object(ds));
                    }
                    r.set("curvature", vector_json(&l.curvature));
                    r.set("top_degree", json!(l.top_degree()));
                    let rep = nhk_core::nonhomogeneous::verify_cdga(&l);
                    r.set("cdga", json!(rep.summary()));
                    r.pass = rep.pass();
                }
                Err(e) => r.fail_with(e.to_string()),
            }
            Ok(r.render(cli.json))
        }
        Command::Koszul { file, max_degree } => {
            let (text, p) = load(file)?;
            let mut r = Report::new("koszul", vec![text]);
            r.cutoff("max_degree", *max_degree);
            match koszulness_check(p.quadratic(), *max_degree) {
                Ok(rep) => {
                    r.set("verdict_text", json!(rep.verdict()));
                    let strands: Map<String, Value> = rep
                        .strands
                        .iter()
                        .map(|s| {
                            (
                                s.internal_degree.to_string(),
                                json!({"dims": s.dims, "exact": s.exact, "euler": s.euler_characteristic}),
                            )
                        })
                        .collect();
                    r.set("strands", Value::Object(strands));
                    r.set("warnings", json!(rep.warnings));
                    if let Some(f) = &rep.failure {
                        r.set(
                            "witness",
                            json!({"internal_degree": f.internal_degree, "position": f.position, "cocycle": vector_json(&f.witness)}),
                        );
                    }
                    r.pass = rep.pass();
                }
                Err(e) => r.fail_with(e.to_string()),
            }
            Ok(r.render(cli.json))
        }
        Command::Resolve { file, module, cutoff } => {
            let (text, p) = load(file)?;
            let mtext = read_input(Some(module))?;
            let m = parse_module(&mtext, &p)?;
            let mut r = Report::new("resolve", vec![text, mtext]);
            r.cutoff("filtration", *cutoff);
            match free_resolution(&p, &m, *cutoff) {
                Ok(res) => {
                    r.set("ranks", json!(res.ranks));
                    r.set("bimodule_ranks", json!(res.bimodule_ranks));
                    r.set("window_dims", json!(res.complex.dims));
                    r.set("cohomology", table_json(&res.cohomology));
                    r.set("augmentation_kills_image", json!(res.augmentation_kills_image));
                    r.set("augmentation_surjective", json!(res.augmentation_surjective));
                    r.pass = res.pass();
                    r.set("exact_in_window", json!(r.pass));
                }
                Err(e) => r.fail_with(e.to_string()),
            }
            Ok(r.render(cli.json))
        }
        Command::Ext { file, source, target } => {
            let (text, p) = load(file)?;
            let stext = read_input(Some(source))?;
            let ttext = read_input(Some(target))?;
            let m = parse_module(&stext, &p)?;
            let n = parse_module(&ttext, &p)?;
            let mut r = Report::new("ext", vec![text, stext, ttext]);
            match ext_modules(&p, &m, &n) {
                Ok(e) => {
                    r.set("dims", json!(e.dims));
                    r.set("resolution_side", json!(e.resolution_side));
                    r.set("hom_dim", json!(e.hom_dim));
                    r.set("paths_agree", json!(e.paths_agree()));
                    r.set("ext0_matches_hom", json!(e.ext0_matches()));
                    r.pass = e.pass();
                }
                Err(e) => r.fail_with(e.to_string()),
            }
            Ok(r.render(cli.json))
        }
        Command::Hochschild { file, cutoff } => {
            let (text, p) = load(file)?;
            let mut r = Report::new("hochschild", vec![text]);
            r.cutoff("window", *cutoff);
            r.cutoff("window_next", cutoff + 1);
            match hochschild_truncated(&p, *cutoff) {
                Ok(h) => {
                    let degrees: Map<String, Value> = h
                        .stable
                        .iter()
                        .enumerate()
                        .map(|(i, s)| {
                            (i.to_string(), json!({"dim": h.dim(i), "dim_next": h.at_next.get(i as i64), "stable": s}))
                        })
                        .collect();
                    r.set("degrees", Value::Object(degrees));
                }
                Err(e) => r.fail_with(e.to_string()),
            }
            Ok(r.render(cli.json))
        }
        Command::Verify { check, file, module, cutoff } => {
            let (text, p) = load(file)?;
            let mtext = read_input(Some(module))?;
            let m = parse_complex(&mtext, &p)?;
            let name = match check {
                VerifyCheck::Counit => "verify counit",
                VerifyCheck::SVsF => "verify s-vs-f",
            };
            let mut r = Report::new(name, vec![text, mtext]);
            r.cutoff("j", *cutoff);
            r.cutoff("j_next", cutoff + 1);
            match verify(&p, &m, *check, *cutoff) {
                Ok((results, pass)) => {
                    for (k, v) in results {
                        r.set(&k, v);
                    }
                    r.pass = pass;
                }
                Err(e) => r.fail_with(e),
            }
            Ok(r.render(cli.json))
        }
        Command::Gallery { name, dim, lie, group, t, c, quiver, lambda, n, .. } => {
            if name == "list" {
                let mut names = vec!["weyl", "enveloping", "sra", "hecke", "preprojective", "sym"]
                    .into_iter()
                    .map(String::from)
                    .collect::<Vec<_>>();
                names.extend(default_gallery().map_err(|e| Failure::Invalid(e.to_string()))?.into_iter().map(|i| i.name));
                return Ok(Output { text: names.join("\n") + "\n", pass: true });
            }
            let args = GalleryArgs { dim: *dim, lie: lie.clone(), group: group.clone(), t: t.clone(), c: c.clone(), quiver: quiver.clone(), lambda: lambda.clone(), n: *n };
            let (label, p, metadata) = gallery(name, &args)?;
            let doc = emit_presentation(&label, &p, &metadata);
            Ok(Output { text: format!("{}\n", serde_json::to_string_pretty(&doc).expect("document serializes")), pass: true })
        }
    }
}

fn verify(p: &NonhomogeneousPresentation, m: &UComplex, check: VerifyCheck, j: usize) -> Result<(Vec<(String, Value)>, bool), String> {
    let pair = KoszulPair::new(p).map_err(|e| e.to_string())?;
    match check {
        VerifyCheck::Counit => {
            let r = verify_counit(&pair, m, j).map_err(|e| e.to_string())?;
            Ok((
                vec![
                    ("module".into(), table_json(&r.module)),
                    ("f_j".into(), table_json(&r.at_j)),
                    ("f_j_next".into(), table_json(&r.at_j_plus_one)),
                    ("matches".into(), json!(r.matches())),
                    ("stable".into(), json!(r.stable())),
                ],
                r.pass(),
            ))
        }
        VerifyCheck::SVsF => {
            let g = g_functor(&pair, m).map_err(|e| e.to_string())?;
            let r = verify_s_vs_f(&g, j).map_err(|e| e.to_string())?;
            Ok((
                vec![
                    ("s".into(), table_json(&r.s)),
                    ("f_j".into(), table_json(&r.at_j)),
                    ("f_j_next".into(), table_json(&r.at_j_plus_one)),
                    ("matches".into(), json!(r.matches())),
                    ("stable".into(), json!(r.stable())),
                    ("s_acyclic".into(), json!(r.s_acyclic)),
                ],
                r.pass(),
            ))
        }
    }
}

struct GalleryArgs {
    dim: Option<usize>,
    lie: Option<String>,
    group: Option<String>,
    t: Option<String>,
    c: Option<String>,
    quiver: Option<String>,
    lambda: Option<String>,
    n: Option<usize>,
}

fn param(v: &Option<String>, flag: &str, default: i64) -> Result<Scalar, Failure> {
    match v {
        None => Ok(Scalar::from_integer(default.into())),
        Some(s) => parse_scalar(s).ok_or_else(|| Failure::Invalid(format!("--{flag}: expected a fraction, got {s:?}"))),
    }
}

fn invalid<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Invalid(e.to_string())
}

type Built = (String, NonhomogeneousPresentation, BTreeMap<String, Value>);

fn gallery(name: &str, a: &GalleryArgs) -> Result<Built, Failure> {
    let mut meta = BTreeMap::new();
    let p = match name {
        "weyl" => {
            let dim = a.dim.unwrap_or(2);
            if dim % 2 != 0 {
                return Err(Failure::Invalid("--dim must be even".into()));
            }
            build_weyl(&standard_symplectic(dim / 2)).map_err(invalid)?
        }
        "enveloping" => {
            let lie = match a.lie.as_deref().unwrap_or("sl2") {
                "sl2" => LieData::sl2(),
                "heisenberg" => LieData::heisenberg(),
                "nonabelian2" => LieData::nonabelian2(),
                "abelian" => LieData::abelian(a.n.unwrap_or(2)),
                other => return Err(Failure::Invalid(format!("unknown Lie algebra {other:?}"))),
            };
            build_enveloping(&lie, None).map_err(invalid)?
        }
        "sym" => {
            let q = symmetric_algebra(a.n.unwrap_or(2)).map_err(invalid)?;
            NonhomogeneousPresentation::from_quadratic(&q).map_err(invalid)?
        }
        "sra" | "hecke" => {
            let group = match a.group.as_deref().unwrap_or("z2") {
                "z2" => GroupData::z2(2),
                "plane-swap" => GroupData::plane_swap(),
                g if g.starts_with("cyclic") => {
                    let order: usize = g["cyclic".len()..].parse().map_err(|_| Failure::Invalid(format!("bad group {g:?}")))?;
                    GroupData::cyclic(order).map_err(invalid)?
                }
                other => return Err(Failure::Invalid(format!("unknown group {other:?}"))),
            };
            let omega = standard_symplectic(group.v_dim() / 2);
            let t = param(&a.t, "t", 1)?;
            let c = param(&a.c, "c", 1)?;
            meta.insert("t".into(), json!(nhk_core::exact_linalg::format_scalar(&t)));
            meta.insert("c".into(), json!(nhk_core::exact_linalg::format_scalar(&c)));
            let data = SraData::new(group, omega, t, c);
            if name == "sra" {
                build_sra(&data).map_err(invalid)?
            } else {
                data.validate().map_err(invalid)?;
                build_graded_hecke(&data.group, &data.forms()).map_err(invalid)?
            }
        }
        "preprojective" => {
            let quiver = a.quiver.as_deref().unwrap_or("kronecker");
            let q = match quiver {
                "kronecker" => QuiverData::kronecker(),
                "jordan" => QuiverData::jordan(Scalar::from_integer(0.into())),
                s if s.starts_with("cyclic") => QuiverData::cyclic(s["cyclic".len()..].parse().map_err(|_| Failure::Invalid(format!("bad quiver {s:?}")))?),
                s if s.starts_with('a') => QuiverData::a_n(s[1..].parse().map_err(|_| Failure::Invalid(format!("bad quiver {s:?}")))?),
                other => return Err(Failure::Invalid(format!("unknown quiver {other:?}"))),
            };
            let q = match &a.lambda {
                None => q,
                Some(l) => {
                    let vals: Vec<Scalar> = l
                        .split(',')
                        .map(|s| parse_scalar(s).ok_or_else(|| Failure::Invalid(format!("--lambda: bad value {s:?}"))))
                        .collect::<Result<_, _>>()?;
                    q.with_lambda(vals).map_err(invalid)?
                }
            };
            let d = build_preprojective_data(&q).map_err(invalid)?;
            meta.insert("graph_type".into(), json!(format!("{:?}", d.graph_type)));
            if !d.warnings.is_empty() {
                meta.insert("warnings".into(), json!(d.warnings));
            }
            if !d.reversed_arrows.is_empty() {
                meta.insert("reversed_arrows".into(), json!(d.reversed_arrows));
            }
            d.presentation
        }
        other => {
            let items = default_gallery().map_err(invalid)?;
            let item = items
                .into_iter()
                .find(|i| i.name == other)
                .ok_or_else(|| Failure::Invalid(format!("unknown gallery entry {other:?}; try `gallery list`")))?;
            for w in &item.warnings {
                meta.insert("warning".into(), json!(w));
            }
            for (k, v) in &item.metadata {
                meta.insert(k.clone(), json!(v));
            }
            item.presentation
        }
    };
    Ok((name.to_string(), p, meta))
}
