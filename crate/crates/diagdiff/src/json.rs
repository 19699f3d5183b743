//! JSON wire format for diagrams, sums, tensors, and check reports. Writers
//! produce a canonical form (sorted keys, shortest round-trip floats) so that
//! equal values serialise to identical bytes.

use crate::autodiff::GradCheckReport;
use crate::diagram::{
    ColourRegistry, DiagBox, Diagram, DiagramError, FormalSum, GreenLabel, Layer, Ob, Term, Ty,
};
use crate::rig::PhaseExpr;
use crate::tensor::Tensor;
use crate::zx::StoneReport;
use num_complex::Complex64;
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

fn bad(msg: impl Into<String>) -> JsonError {
    JsonError::Malformed(msg.into())
}

fn complex_to_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn complex_from_value(v: &Value) -> Result<Complex64, JsonError> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| bad("a complex number must be a [re, im] pair"))?;
    let re = pair[0].as_f64().ok_or_else(|| bad("re must be a number"))?;
    let im = pair[1].as_f64().ok_or_else(|| bad("im must be a number"))?;
    Ok(Complex64::new(re, im))
}

fn ob_to_value(ob: Ob) -> Value {
    match ob {
        Ob::Qubit => json!("q"),
        Ob::Bit => json!("c"),
        Ob::Dim(d) => json!({ "dim": d }),
    }
}

fn ob_from_value(v: &Value) -> Result<Ob, JsonError> {
    match v {
        Value::String(s) if s == "q" => Ok(Ob::Qubit),
        Value::String(s) if s == "c" => Ok(Ob::Bit),
        Value::Object(m) => {
            let d = m
                .get("dim")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("wire object must be {\"dim\": n}"))?;
            Ok(Ob::Dim(d as usize))
        }
        other => Err(bad(format!(
            "wire must be \"q\", \"c\", or {{\"dim\": n}}, got {other}"
        ))),
    }
}

fn ty_to_value(ty: &Ty) -> Value {
    Value::Array(ty.0.iter().map(|&ob| ob_to_value(ob)).collect())
}

fn ty_from_value(v: &Value) -> Result<Ty, JsonError> {
    let arr = v.as_array().ok_or_else(|| bad("a type must be a list of wires"))?;
    Ok(Ty(arr.iter().map(ob_from_value).collect::<Result<_, _>>()?))
}

pub fn phase_to_value(p: &PhaseExpr) -> Value {
    let mut coeffs = Map::new();
    for (&i, &c) in &p.coeffs {
        coeffs.insert(i.to_string(), json!(c));
    }
    json!({ "const": p.constant, "coeffs": coeffs })
}

pub fn phase_from_value(v: &Value) -> Result<PhaseExpr, JsonError> {
    let obj = v.as_object().ok_or_else(|| bad("a phase must be an object"))?;
    let konst = match obj.get("const") {
        Some(c) => c.as_f64().ok_or_else(|| bad("phase const must be a number"))?,
        None => 0.0,
    };
    let mut phase = PhaseExpr::constant(konst);
    if let Some(coeffs) = obj.get("coeffs") {
        let map = coeffs
            .as_object()
            .ok_or_else(|| bad("phase coeffs must be an object"))?;
        for (k, c) in map {
            let i: usize = k
                .parse()
                .map_err(|_| bad(format!("phase coefficient key {k:?} is not an index")))?;
            let c = c.as_f64().ok_or_else(|| bad("phase coefficient must be a number"))?;
            phase = phase.plus_theta(i, c);
        }
    }
    Ok(phase)
}

pub fn box_to_value(bx: &DiagBox) -> Value {
    use crate::diagram::BoxKind::*;
    match &bx.kind {
        Spider { m, n, phase, ob } => {
            if *ob == Ob::Qubit {
                json!({ "kind": "zspider", "m": m, "n": n, "phase": phase_to_value(phase) })
            } else {
                json!({ "kind": "zspider", "m": m, "n": n, "ob": ob_to_value(*ob) })
            }
        }
        Hadamard => json!({ "kind": "h" }),
        Swap { a, b } => {
            if *a == Ob::Qubit && *b == Ob::Qubit {
                json!({ "kind": "swap" })
            } else {
                json!({ "kind": "swap", "obs": [ob_to_value(*a), ob_to_value(*b)] })
            }
        }
        Green { m, n, label } => {
            let label = match label {
                GreenLabel::Const(z) => complex_to_value(*z),
                GreenLabel::Var => json!("t"),
            };
            json!({ "kind": "green", "m": m, "n": n, "label": label })
        }
        Scalar(z) => json!({ "kind": "scalar", "value": complex_to_value(*z) }),
        Measure => json!({ "kind": "measure" }),
        Encode => json!({ "kind": "encode" }),
        Doubled(inner) => json!({ "kind": "doubled", "inner": box_to_value(inner) }),
        AffineMap { name, entries } => json!({
            "kind": "affine",
            "name": name,
            "dom": ty_to_value(&bx.dom),
            "cod": ty_to_value(&bx.cod),
            "entries": entries.iter().map(phase_to_value).collect::<Vec<_>>(),
        }),
        Bubble { colour, inner } => json!({
            "kind": "bubble",
            "colour": colour,
            "inner": sum_to_value(inner),
        }),
        BubbleJvp {
            colour,
            point,
            tangent,
        } => json!({
            "kind": "bubble_jvp",
            "colour": colour,
            "point": sum_to_value(point),
            "tangent": sum_to_value(tangent),
        }),
        Plain { name } => json!({
            "kind": "plain",
            "name": name,
            "dom": ty_to_value(&bx.dom),
            "cod": ty_to_value(&bx.cod),
        }),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, kind: &str) -> Result<&'a Value, JsonError> {
    obj.get(key)
        .ok_or_else(|| bad(format!("{kind} box is missing {key:?}")))
}

fn usize_field(obj: &Map<String, Value>, key: &str, kind: &str) -> Result<usize, JsonError> {
    field(obj, key, kind)?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| bad(format!("{kind} box field {key:?} must be a non-negative integer")))
}

pub fn box_from_value(v: &Value, registry: &ColourRegistry) -> Result<DiagBox, JsonError> {
    let obj = v.as_object().ok_or_else(|| bad("a box must be an object"))?;
    let kind = field(obj, "kind", "every")?
        .as_str()
        .ok_or_else(|| bad("box kind must be a string"))?;
    match kind {
        "zspider" => {
            let m = usize_field(obj, "m", "zspider")?;
            let n = usize_field(obj, "n", "zspider")?;
            let ob = match obj.get("ob") {
                Some(o) => ob_from_value(o)?,
                None => Ob::Qubit,
            };
            if ob == Ob::Qubit {
                let phase = match obj.get("phase") {
                    Some(p) => phase_from_value(p)?,
                    None => PhaseExpr::constant(0.0),
                };
                Ok(DiagBox::z_spider(m, n, phase))
            } else {
                if obj.get("phase").map(phase_from_value).transpose()?.is_some_and(
                    |p| !(p.is_constant() && p.constant == 0.0),
                ) {
                    return Err(bad("classical spiders carry no phase"));
                }
                Ok(DiagBox::classical_spider(ob, m, n)?)
            }
        }
        "h" => Ok(DiagBox::hadamard()),
        "swap" => match obj.get("obs") {
            None => Ok(DiagBox::swap(Ob::Qubit, Ob::Qubit)),
            Some(obs) => {
                let pair = obs
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| bad("swap obs must be a pair of wires"))?;
                Ok(DiagBox::swap(ob_from_value(&pair[0])?, ob_from_value(&pair[1])?))
            }
        },
        "green" => {
            let m = usize_field(obj, "m", "green")?;
            let n = usize_field(obj, "n", "green")?;
            let label = match field(obj, "label", "green")? {
                Value::String(s) if s == "t" => GreenLabel::Var,
                other => GreenLabel::Const(complex_from_value(other)?),
            };
            Ok(DiagBox::green(m, n, label))
        }
        "scalar" => Ok(DiagBox::scalar(complex_from_value(field(obj, "value", "scalar")?)?)),
        "measure" => Ok(DiagBox::measure()),
        "encode" => Ok(DiagBox::encode()),
        "doubled" => {
            let inner = box_from_value(field(obj, "inner", "doubled")?, registry)?;
            Ok(DiagBox::doubled(inner)?)
        }
        "affine" => {
            let name = field(obj, "name", "affine")?
                .as_str()
                .ok_or_else(|| bad("affine box name must be a string"))?;
            let dom = ty_from_value(field(obj, "dom", "affine")?)?;
            let cod = ty_from_value(field(obj, "cod", "affine")?)?;
            let entries = field(obj, "entries", "affine")?
                .as_array()
                .ok_or_else(|| bad("affine box entries must be a list of phases"))?
                .iter()
                .map(phase_from_value)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(DiagBox::affine_map(name, dom, cod, entries)?)
        }
        "bubble" => {
            let colour = field(obj, "colour", "bubble")?
                .as_str()
                .ok_or_else(|| bad("bubble colour must be a string"))?;
            let inner = sum_from_value(field(obj, "inner", "bubble")?, registry)?;
            Ok(DiagBox::bubble(colour, inner, registry)?)
        }
        "bubble_jvp" => {
            let colour = field(obj, "colour", "bubble_jvp")?
                .as_str()
                .ok_or_else(|| bad("bubble_jvp colour must be a string"))?;
            let point = sum_from_value(field(obj, "point", "bubble_jvp")?, registry)?;
            let tangent = sum_from_value(field(obj, "tangent", "bubble_jvp")?, registry)?;
            Ok(DiagBox::bubble_jvp(colour, point, tangent, registry)?)
        }
        "plain" => {
            let name = field(obj, "name", "plain")?
                .as_str()
                .ok_or_else(|| bad("plain box name must be a string"))?;
            let dom = ty_from_value(field(obj, "dom", "plain")?)?;
            let cod = ty_from_value(field(obj, "cod", "plain")?)?;
            Ok(DiagBox::plain(name, dom, cod))
        }
        other => Err(bad(format!("unknown box kind {other:?}"))),
    }
}

pub fn diagram_to_value(d: &Diagram) -> Value {
    let layers: Vec<Value> = d
        .layers()
        .iter()
        .map(|l| json!({ "offset": l.offset, "box": box_to_value(&l.bx) }))
        .collect();
    json!({
        "dom": ty_to_value(d.dom()),
        "cod": ty_to_value(d.cod()),
        "layers": layers,
    })
}

pub fn diagram_from_value(v: &Value, registry: &ColourRegistry) -> Result<Diagram, JsonError> {
    let obj = v.as_object().ok_or_else(|| bad("a diagram must be an object"))?;
    let dom = ty_from_value(
        obj.get("dom")
            .ok_or_else(|| bad("diagram is missing \"dom\""))?,
    )?;
    let mut layers = Vec::new();
    for (i, lv) in obj
        .get("layers")
        .ok_or_else(|| bad("diagram is missing \"layers\""))?
        .as_array()
        .ok_or_else(|| bad("diagram layers must be a list"))?
        .iter()
        .enumerate()
    {
        let lobj = lv
            .as_object()
            .ok_or_else(|| bad(format!("layer {i} must be an object")))?;
        let offset = lobj
            .get("offset")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad(format!("layer {i} is missing a numeric \"offset\"")))?
            as usize;
        let bx = box_from_value(
            lobj.get("box")
                .ok_or_else(|| bad(format!("layer {i} is missing \"box\"")))?,
            registry,
        )?;
        layers.push(Layer { offset, bx });
    }
    let d = Diagram::new(dom, layers)?;
    if let Some(cod_v) = obj.get("cod") {
        let declared = ty_from_value(cod_v)?;
        if &declared != d.cod() {
            return Err(JsonError::Diagram(DiagramError::CodMismatch {
                expected: declared.to_string(),
                found: d.cod().to_string(),
            }));
        }
    }
    Ok(d)
}

pub fn sum_to_value(sum: &FormalSum) -> Value {
    let terms: Vec<Value> = sum
        .terms()
        .iter()
        .map(|t| {
            json!({
                "coeff": complex_to_value(t.coeff),
                "diagram": diagram_to_value(&t.diagram),
            })
        })
        .collect();
    json!({
        "dom": ty_to_value(&sum.dom),
        "cod": ty_to_value(&sum.cod),
        "terms": terms,
    })
}

pub fn sum_from_value(v: &Value, registry: &ColourRegistry) -> Result<FormalSum, JsonError> {
    let obj = v.as_object().ok_or_else(|| bad("a sum must be an object"))?;
    let mut terms = Vec::new();
    for (i, tv) in obj
        .get("terms")
        .ok_or_else(|| bad("sum is missing \"terms\""))?
        .as_array()
        .ok_or_else(|| bad("sum terms must be a list"))?
        .iter()
        .enumerate()
    {
        let tobj = tv
            .as_object()
            .ok_or_else(|| bad(format!("term {i} must be an object")))?;
        let coeff = complex_from_value(
            tobj.get("coeff")
                .ok_or_else(|| bad(format!("term {i} is missing \"coeff\"")))?,
        )?;
        let diagram = diagram_from_value(
            tobj.get("diagram")
                .ok_or_else(|| bad(format!("term {i} is missing \"diagram\"")))?,
            registry,
        )?;
        terms.push(Term { coeff, diagram });
    }
    let boundary = match (obj.get("dom"), obj.get("cod")) {
        (Some(d), Some(c)) => Some((ty_from_value(d)?, ty_from_value(c)?)),
        _ => None,
    };
    let (dom, cod) = match (boundary, terms.first()) {
        (Some(b), _) => b,
        (None, Some(t)) => (t.diagram.dom().clone(), t.diagram.cod().clone()),
        (None, None) => {
            return Err(bad("an empty sum needs explicit \"dom\" and \"cod\""));
        }
    };
    Ok(FormalSum::from_terms(dom, cod, terms)?)
}

/// Read either a bare diagram or a formal sum, detected by shape.
pub fn any_sum_from_value(v: &Value, registry: &ColourRegistry) -> Result<FormalSum, JsonError> {
    let obj = v.as_object().ok_or_else(|| bad("input must be a JSON object"))?;
    if obj.contains_key("terms") {
        sum_from_value(v, registry)
    } else if obj.contains_key("layers") {
        Ok(FormalSum::from_diagram(diagram_from_value(v, registry)?))
    } else {
        Err(bad("input must have \"layers\" (a diagram) or \"terms\" (a sum)"))
    }
}

pub fn tensor_to_value(t: &Tensor<Complex64>) -> Value {
    json!({
        "dom_dims": t.dom_dims,
        "cod_dims": t.cod_dims,
        "data": t.data.iter().map(|&z| complex_to_value(z)).collect::<Vec<_>>(),
    })
}

pub fn tensor_from_value(v: &Value) -> Result<Tensor<Complex64>, JsonError> {
    let obj = v.as_object().ok_or_else(|| bad("a tensor must be an object"))?;
    let dims = |key: &str| -> Result<Vec<usize>, JsonError> {
        obj.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| bad(format!("tensor is missing {key:?}")))?
            .iter()
            .map(|d| {
                d.as_u64()
                    .map(|v| v as usize)
                    .ok_or_else(|| bad(format!("{key} entries must be integers")))
            })
            .collect()
    };
    let dom_dims = dims("dom_dims")?;
    let cod_dims = dims("cod_dims")?;
    let data: Vec<Complex64> = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("tensor is missing \"data\""))?
        .iter()
        .map(complex_from_value)
        .collect::<Result<_, _>>()?;
    let expect: usize = dom_dims.iter().product::<usize>() * cod_dims.iter().product::<usize>();
    if data.len() != expect {
        return Err(bad(format!(
            "tensor data has {} entries but the dimensions require {expect}",
            data.len()
        )));
    }
    Ok(Tensor {
        dom_dims,
        cod_dims,
        data,
    })
}

pub fn gradcheck_report_to_value(r: &GradCheckReport) -> Value {
    let points: Vec<Value> = r
        .points
        .iter()
        .map(|p| {
            json!({
                "param": p.param,
                "theta": p.theta,
                "exact_disagreement": p.exact_disagreement,
                "fd_disagreement": p.fd_disagreement,
                "pass": p.pass,
            })
        })
        .collect();
    json!({
        "pass": r.pass,
        "max_exact_disagreement": r.max_exact_disagreement,
        "max_fd_disagreement": r.max_fd_disagreement,
        "points": points,
    })
}

pub fn stone_report_to_value(r: &StoneReport) -> Value {
    let grid: Vec<Value> = r.grid.iter().map(|&(t, d)| json!([t, d])).collect();
    json!({
        "pass": r.pass,
        "tolerance": r.tolerance,
        "max_deviation": r.max_deviation,
        "unitarity_defect": r.unitarity_defect,
        "hermiticity_defect": r.hermiticity_defect,
        "identity_defect": r.identity_defect,
        "grid": grid,
        "generator": tensor_to_value(&r.generator),
    })
}

/// Canonical pretty text for any value: two-space indent, sorted keys,
/// trailing newline.
pub fn to_pretty_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialising JSON values cannot fail");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::interp::interpret;

    fn reg() -> ColourRegistry {
        ColourRegistry::standard()
    }

    #[test]
    fn phase_round_trips() {
        let p = PhaseExpr::constant(0.25).plus_theta(0, 2.0).plus_theta(3, -1.0);
        let v = phase_to_value(&p);
        assert_eq!(phase_from_value(&v).unwrap(), p);
    }

    #[test]
    fn diagram_round_trips_through_values() {
        let d = Diagram::from_box(DiagBox::z_spider(1, 2, PhaseExpr::theta(0)))
            .then_at(1, DiagBox::hadamard())
            .unwrap()
            .then_at(0, DiagBox::swap(Ob::Qubit, Ob::Qubit))
            .unwrap();
        let v = diagram_to_value(&d);
        let back = diagram_from_value(&v, &reg()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn sum_round_trips_with_coefficients() {
        let t1 = Diagram::from_box(DiagBox::z_spider(1, 1, PhaseExpr::theta(0)));
        let t2 = Diagram::from_box(DiagBox::hadamard());
        let sum = FormalSum::from_diagram(t1)
            .scale(Complex64::new(0.0, 0.5))
            .add(&FormalSum::from_diagram(t2).scale(Complex64::new(-2.0, 0.0)))
            .unwrap();
        let v = sum_to_value(&sum);
        let back = sum_from_value(&v, &reg()).unwrap();
        assert_eq!(back, sum);
    }

    #[test]
    fn empty_sum_needs_a_boundary_and_keeps_it() {
        let zero = FormalSum::zero(Ty::qubits(1), Ty::qubits(2));
        let v = sum_to_value(&zero);
        let back = sum_from_value(&v, &reg()).unwrap();
        assert_eq!(back.dom, zero.dom);
        assert_eq!(back.cod, zero.cod);
        assert!(back.is_zero());
        assert!(sum_from_value(&json!({ "terms": [] }), &reg()).is_err());
    }

    #[test]
    fn cq_boxes_round_trip() {
        let inner = DiagBox::z_spider(1, 1, PhaseExpr::theta(0));
        let d = Diagram::from_box(DiagBox::doubled(inner).unwrap())
            .compose(&Diagram::from_box(DiagBox::measure()))
            .unwrap();
        let v = diagram_to_value(&d);
        let back = diagram_from_value(&v, &reg()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn bubble_boxes_nest_the_sum_schema() {
        let inner = FormalSum::from_diagram(Diagram::from_box(DiagBox::z_spider(
            0,
            0,
            PhaseExpr::theta(0),
        )));
        let bx = DiagBox::bubble("sigmoid", inner, &reg()).unwrap();
        let v = box_to_value(&bx);
        assert_eq!(v["kind"], json!("bubble"));
        assert!(v["inner"]["terms"].is_array());
        let back = box_from_value(&v, &reg()).unwrap();
        assert_eq!(back, bx);
    }

    #[test]
    fn affine_and_plain_boxes_round_trip() {
        let w = DiagBox::affine_map(
            "w",
            Ty(vec![Ob::Dim(3)]),
            Ty(vec![Ob::Bit]),
            vec![
                PhaseExpr::theta(0),
                PhaseExpr::constant(1.0),
                PhaseExpr::constant(0.5),
                PhaseExpr::constant(0.0),
                PhaseExpr::theta(1),
                PhaseExpr::constant(-2.0),
            ],
        )
        .unwrap();
        let p = DiagBox::plain("oracle", Ty::qubits(2), Ty::qubits(2));
        for bx in [w, p] {
            let v = box_to_value(&bx);
            assert_eq!(box_from_value(&v, &reg()).unwrap(), bx);
        }
    }

    #[test]
    fn green_labels_round_trip() {
        for label in [GreenLabel::Var, GreenLabel::Const(Complex64::new(0.5, -1.5))] {
            let bx = DiagBox::green(2, 1, label);
            let v = box_to_value(&bx);
            assert_eq!(box_from_value(&v, &reg()).unwrap(), bx);
        }
    }

    #[test]
    fn declared_codomain_is_checked() {
        let d = Diagram::from_box(DiagBox::z_spider(1, 2, PhaseExpr::constant(0.0)));
        let mut v = diagram_to_value(&d);
        v["cod"] = json!(["q"]);
        assert!(matches!(
            diagram_from_value(&v, &reg()),
            Err(JsonError::Diagram(DiagramError::CodMismatch { .. }))
        ));
    }

    #[test]
    fn tensor_round_trips_exactly() {
        let d = Diagram::from_box(DiagBox::z_spider(1, 1, PhaseExpr::theta(0)))
            .then_at(0, DiagBox::hadamard())
            .unwrap();
        let t = interpret(&FormalSum::from_diagram(d), &[0.31], &reg()).unwrap();
        let v = tensor_to_value(&t);
        let back = tensor_from_value(&v).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn tensor_data_length_is_validated() {
        let v = json!({ "dom_dims": [2], "cod_dims": [2], "data": [[1.0, 0.0]] });
        assert!(tensor_from_value(&v).is_err());
    }

    #[test]
    fn serialisation_is_deterministic() {
        let d = Diagram::from_box(DiagBox::z_spider(2, 1, PhaseExpr::theta(1)))
            .then_at(0, DiagBox::hadamard())
            .unwrap();
        let sum = FormalSum::from_diagram(d);
        let a = to_pretty_string(&sum_to_value(&sum));
        let b = to_pretty_string(&sum_to_value(&sum_from_value(
            &serde_json::from_str(&a).unwrap(),
            &reg(),
        )
        .unwrap()));
        assert_eq!(a, b);
    }

    #[test]
    fn bare_diagram_or_sum_is_detected() {
        let d = Diagram::from_box(DiagBox::hadamard());
        let from_diag = any_sum_from_value(&diagram_to_value(&d), &reg()).unwrap();
        let from_sum =
            any_sum_from_value(&sum_to_value(&FormalSum::from_diagram(d)), &reg()).unwrap();
        assert_eq!(from_diag, from_sum);
        assert!(any_sum_from_value(&json!({}), &reg()).is_err());
    }

    #[test]
    fn unknown_kinds_are_rejected() {
        assert!(matches!(
            box_from_value(&json!({ "kind": "mystery" }), &reg()),
            Err(JsonError::Malformed(_))
        ));
    }
}
