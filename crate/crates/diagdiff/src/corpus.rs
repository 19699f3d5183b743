//! The committed circuit corpus: named builders for every JSON file under
//! `corpus/`, plus the writer that regenerates them.

use crate::cqmap::double_diagram;
use crate::diagram::{ColourRegistry, DiagBox, Diagram, FormalSum, Ob, Ty};
use crate::json::{sum_to_value, to_pretty_string};
use crate::rig::PhaseExpr;
use crate::zx;
use num_complex::Complex64;
use std::path::{Path, PathBuf};

pub struct CorpusEntry {
    pub name: &'static str,
    pub sum: FormalSum,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn theta(i: usize) -> PhaseExpr {
    PhaseExpr::theta(i)
}

/// `|0…0⟩` on `n` qubits: one X spider per wire and the normalising scalar.
fn prep_zeros(n: usize) -> Diagram {
    let mut d = Diagram::id(Ty::unit());
    for _ in 0..n {
        d = d.tensor(&zx::x_spider(0, 1, PhaseExpr::constant(0.0)));
    }
    d.tensor(&Diagram::from_box(DiagBox::scalar(c(
        std::f64::consts::FRAC_1_SQRT_2.powi(n as i32),
        0.0,
    ))))
}

fn measured(circuit: &Diagram) -> Diagram {
    let n = circuit.cod().0.len();
    let mut d = double_diagram(circuit).expect("corpus circuits are pure");
    for k in 0..n {
        d = d
            .then_at(k, DiagBox::measure())
            .expect("measuring a qubit wire");
    }
    d
}

fn hadamard() -> Diagram {
    Diagram::from_box(DiagBox::hadamard())
}

fn wire() -> Diagram {
    Diagram::id(Ty::qubits(1))
}

/// The exact corpus, in file order. Pure ZX circuits first, then doubled
/// measured circuits, then bubbled post-processing.
pub fn corpus(registry: &ColourRegistry) -> Vec<CorpusEntry> {
    let mut entries = Vec::new();
    let mut add = |name: &'static str, d: Diagram| {
        entries.push(CorpusEntry {
            name,
            sum: FormalSum::from_diagram(d),
        });
    };

    // Pure circuits.
    add("h", hadamard());
    add("identity", wire());
    add("rz", zx::rz(theta(0)));
    add(
        "coefficient-2theta",
        Diagram::from_box(DiagBox::z_spider(
            1,
            1,
            PhaseExpr::constant(0.0).plus_theta(0, 2.0),
        )),
    );
    add("bell", {
        let fan = Diagram::from_box(DiagBox::z_spider(0, 1, PhaseExpr::constant(0.0)))
            .compose(&Diagram::from_box(DiagBox::z_spider(
                1,
                2,
                PhaseExpr::constant(0.0),
            )))
            .unwrap();
        fan.tensor(&Diagram::from_box(DiagBox::scalar(c(
            std::f64::consts::FRAC_1_SQRT_2,
            0.0,
        ))))
    });
    add("stone-rzrx", zx::rz_rx());
    add("stone-pauli-zx", zx::pauli_zx_gadget());

    // Doubled circuits with measurement.
    add("rz-rx-cnot-measure", {
        let u = prep_zeros(2)
            .compose(&zx::rz(theta(0)).tensor(&zx::rx(theta(1))))
            .unwrap()
            .compose(&zx::cnot())
            .unwrap();
        measured(&u)
    });
    add("bell-measure", {
        let u = prep_zeros(2)
            .compose(&hadamard().tensor(&wire()))
            .unwrap()
            .compose(&zx::cnot())
            .unwrap();
        measured(&u)
    });
    add("rz-h-measure", {
        let u = prep_zeros(1)
            .compose(&zx::rz(theta(0)))
            .unwrap()
            .compose(&hadamard())
            .unwrap();
        measured(&u)
    });
    add("rx-measure", {
        let u = prep_zeros(1).compose(&zx::rx(theta(0))).unwrap();
        measured(&u)
    });
    add("two-param-affine-measure", {
        let phase = PhaseExpr::constant(0.5).plus_theta(0, 1.0).plus_theta(1, 2.0);
        let u = prep_zeros(1)
            .compose(&hadamard())
            .unwrap()
            .compose(&zx::rz(phase))
            .unwrap()
            .compose(&hadamard())
            .unwrap();
        measured(&u)
    });
    add("same-theta-twice-measure", {
        let u = prep_zeros(1)
            .compose(&zx::rx(theta(0)))
            .unwrap()
            .compose(&hadamard())
            .unwrap()
            .compose(&zx::rx(theta(0)))
            .unwrap();
        measured(&u)
    });
    add("ghz-rx-measure", {
        let u = prep_zeros(3)
            .compose(&hadamard().tensor(&wire()).tensor(&wire()))
            .unwrap()
            .compose(&zx::cnot().tensor(&wire()))
            .unwrap()
            .compose(&wire().tensor(&zx::cnot()))
            .unwrap()
            .compose(&wire().tensor(&wire()).tensor(&zx::rx(theta(0))))
            .unwrap();
        measured(&u)
    });
    add("multi-leg-spider-measure", {
        // A CNOT whose copy spider carries the phase: Z^{1,2}(θ) fuses to
        // Rz(θ) followed by a plain copy, so the circuit stays unitary.
        let phased_cnot = Diagram::id(Ty::qubits(2))
            .then_at(0, DiagBox::z_spider(1, 2, theta(0)))
            .unwrap()
            .compose(&wire().tensor(&zx::x_spider(2, 1, PhaseExpr::constant(0.0))))
            .unwrap()
            .tensor(&Diagram::from_box(DiagBox::scalar(c(
                std::f64::consts::SQRT_2,
                0.0,
            ))));
        let u = prep_zeros(2)
            .compose(&hadamard().tensor(&wire()))
            .unwrap()
            .compose(&phased_cnot)
            .unwrap()
            .compose(&hadamard().tensor(&hadamard()))
            .unwrap();
        measured(&u)
    });
    add("entangled-rx-measure", {
        let u = prep_zeros(2)
            .compose(&hadamard().tensor(&wire()))
            .unwrap()
            .compose(&zx::cnot())
            .unwrap()
            .compose(&wire().tensor(&zx::rx(theta(0))))
            .unwrap()
            .compose(&zx::cnot())
            .unwrap();
        measured(&u)
    });
    add("four-param-measure", {
        let u = prep_zeros(2)
            .compose(&zx::rx(theta(0)).tensor(&zx::rx(theta(1))))
            .unwrap()
            .compose(&zx::cnot())
            .unwrap()
            .compose(&zx::rx(theta(2)).tensor(&zx::rx(theta(3))))
            .unwrap();
        measured(&u)
    });
    add("encode-rx-measure", {
        let flip = double_diagram(&zx::rx(theta(0))).expect("pure rotation");
        Diagram::from_box(DiagBox::encode())
            .compose(&flip)
            .unwrap()
            .compose(&Diagram::from_box(DiagBox::measure()))
            .unwrap()
    });

    // Bubbled post-processing.
    add("sigmoid-expectation", {
        let inner = FormalSum::from_diagram(Diagram::from_box(DiagBox::z_spider(
            0,
            0,
            theta(0),
        )));
        Diagram::from_box(DiagBox::bubble("sigmoid", inner, registry).unwrap())
    });
    entries.push(CorpusEntry {
        name: "two-layer-net",
        sum: two_layer_net(registry),
    });

    entries
}

/// A two-input, two-hidden, one-output sigmoid network with all weights and
/// biases as parameters θ0…θ8.
fn two_layer_net(registry: &ColourRegistry) -> FormalSum {
    let input = FormalSum::from_diagram(Diagram::from_box(
        DiagBox::affine_map(
            "x",
            Ty::unit(),
            Ty(vec![Ob::Dim(2)]),
            vec![PhaseExpr::constant(0.7), PhaseExpr::constant(-0.3)],
        )
        .unwrap(),
    ));
    let w1 = DiagBox::affine_map(
        "w1",
        Ty(vec![Ob::Dim(2)]),
        Ty(vec![Ob::Dim(2)]),
        vec![theta(0), theta(1), theta(2), theta(3)],
    )
    .unwrap();
    let b1 = DiagBox::affine_map(
        "b1",
        Ty::unit(),
        Ty(vec![Ob::Dim(2)]),
        vec![theta(4), theta(5)],
    )
    .unwrap();
    let w2 = DiagBox::affine_map(
        "w2",
        Ty(vec![Ob::Dim(2)]),
        Ty(vec![Ob::Dim(1)]),
        vec![theta(6), theta(7)],
    )
    .unwrap();
    let b2 = DiagBox::affine_map("b2", Ty::unit(), Ty(vec![Ob::Dim(1)]), vec![theta(8)]).unwrap();
    let hidden =
        crate::autodiff::nn_layer(&input, &w1, &b1, "sigmoid", registry).expect("hidden layer");
    crate::autodiff::nn_layer(&hidden, &w2, &b2, "sigmoid", registry).expect("output layer")
}

/// The committed location of the corpus, relative to this crate.
pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("corpus")
}

/// Serialise one entry exactly as its file is committed.
pub fn render(entry: &CorpusEntry) -> String {
    to_pretty_string(&sum_to_value(&entry.sum))
}

/// Rewrite every corpus file from its builder.
pub fn write_corpus(dir: &Path, registry: &ColourRegistry) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for entry in corpus(registry) {
        std::fs::write(dir.join(format!("{}.json", entry.name)), render(&entry))?;
    }
    Ok(())
}
