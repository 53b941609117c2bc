//! Sample models and a seeded random model generator, used by the test
//! suites and handy for trying the CLI.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    allowed_categories, Cause, Component, ComponentMode, ControlPlan, DesignModel, Effect,
    ElementDomain, ElementId, FailureCategory, FailureMode, Flow, FlowKind, Frequency, Function,
    FunctionMode, MappingEdge, Meta, Rank, Requirement, RequirementMode,
};
use crate::rating::{
    detection_band, occurrence_band, severity_band, ComponentSeverity, ControlMethod,
    FunctionSeverity, RankBand, RequirementSeverity, SeverityClass,
};
use crate::validate::{validate_model, FindingCode, Strictness};

fn id(s: &str) -> ElementId {
    ElementId::new(s).expect("fixture ids are valid tokens")
}

fn rank(v: i64) -> Rank {
    Rank::new(v).expect("fixture ranks are in range")
}

/// The control class whose detection band contains `r`.
pub fn method_for(r: Rank) -> ControlMethod {
    ControlMethod::ALL
        .iter()
        .copied()
        .find(|&m| detection_band(m).contains(r))
        .expect("the five bands cover 1..=10")
}

/// Terse builder for hand-written test models.
#[derive(Debug, Default)]
pub struct ModelBuilder {
    model: DesignModel,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn requirement(mut self, rid: &str) -> Self {
        self.model.requirements.push(Requirement {
            id: id(rid),
            text: format!("requirement {rid}"),
        });
        self
    }

    pub fn function(mut self, fid: &str) -> Self {
        self.model.functions.push(Function {
            id: id(fid),
            verb: "provide".into(),
            noun: format!("capability {fid}"),
            inputs: Vec::new(),
            outputs: Vec::new(),
        });
        self
    }

    pub fn component(mut self, cid: &str) -> Self {
        self.model.components.push(Component {
            id: id(cid),
            name: format!("part {cid}"),
            concept: None,
        });
        self
    }

    pub fn rf(mut self, r: &str, f: &str) -> Self {
        self.model.rf.push(MappingEdge::new(id(r), id(f)));
        self
    }

    pub fn fc(mut self, f: &str, c: &str) -> Self {
        self.model.fc.push(MappingEdge::new(id(f), id(c)));
        self
    }

    /// Requirement failure mode with one effect of the given severity.
    pub fn requirement_mode(mut self, fm: &str, r: &str, severity: i64) -> Self {
        let mut effect = Effect::new(format!("effect of {fm}"));
        effect.severity_rank = Some(rank(severity));
        self.model.failure_modes.push(FailureMode {
            id: id(fm),
            element: id(r),
            category: FailureCategory::Requirement(RequirementMode::Absence),
            description: format!("failure {fm}"),
            effects: vec![effect],
            causes: vec![Cause::new(format!("cause of {fm}"))],
            control: None,
        });
        self
    }

    /// Function failure mode, optionally with a severity-rated effect.
    pub fn function_mode(mut self, fm: &str, f: &str, severity: Option<i64>) -> Self {
        let effects = severity
            .map(|s| {
                let mut e = Effect::new(format!("effect of {fm}"));
                e.severity_rank = Some(rank(s));
                vec![e]
            })
            .unwrap_or_default();
        self.model.failure_modes.push(FailureMode {
            id: id(fm),
            element: id(f),
            category: FailureCategory::Function(FunctionMode::Malfunction),
            description: format!("failure {fm}"),
            effects,
            causes: vec![Cause::new(format!("cause of {fm}"))],
            control: None,
        });
        self
    }

    /// Component failure mode with one effect per severity, one cause per
    /// occurrence and, if given, a control plan of that detection rank.
    pub fn component_mode(
        mut self,
        fm: &str,
        c: &str,
        severities: &[i64],
        occurrences: &[i64],
        detection: Option<i64>,
    ) -> Self {
        let effects = severities
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let mut e = Effect::new(format!("effect {k} of {fm}"));
                e.severity_rank = Some(rank(s));
                e
            })
            .collect();
        let causes = occurrences
            .iter()
            .enumerate()
            .map(|(k, &o)| {
                let mut cause = Cause::new(format!("cause {k} of {fm}"));
                cause.occurrence_rank = Some(rank(o));
                cause
            })
            .collect();
        let control = detection.map(|d| ControlPlan {
            method_class: method_for(rank(d)),
            method_text: None,
            detection_rank: Some(rank(d)),
        });
        self.model.failure_modes.push(FailureMode {
            id: id(fm),
            element: id(c),
            category: FailureCategory::Component(ComponentMode::Damaged),
            description: format!("failure {fm}"),
            effects,
            causes,
            control,
        });
        self
    }

    pub fn build(self) -> DesignModel {
        self.model
    }
}

fn rated_effect(text: &str, class: SeverityClass, r: i64) -> Effect {
    Effect {
        text: text.into(),
        severity_class: Some(class),
        severity_rank: Some(rank(r)),
    }
}

fn rated_cause(text: &str, r: i64) -> Cause {
    Cause {
        text: text.into(),
        occurrence_rank: Some(rank(r)),
        frequency: None,
    }
}

/// The phone camera model: one requirement, one function and one component,
/// fully rated, with the component damage propagating up to a user-visible
/// failure.
pub fn camera_model() -> DesignModel {
    DesignModel {
        meta: Meta {
            product: "Smartphone camera".into(),
            version: "1".into(),
        },
        requirements: vec![Requirement {
            id: id("r_photo"),
            text: "Take photos with the phone".into(),
        }],
        functions: vec![Function {
            id: id("f_exec"),
            verb: "execute".into(),
            noun: "camera module".into(),
            inputs: vec![Flow {
                description: "shutter command".into(),
                kind: FlowKind::Information,
            }],
            outputs: vec![Flow {
                description: "image data".into(),
                kind: FlowKind::Information,
            }],
        }],
        components: vec![Component {
            id: id("c_cam"),
            name: "Camera module".into(),
            concept: Some("CMOS sensor module on the main board".into()),
        }],
        rf: vec![MappingEdge::new(id("r_photo"), id("f_exec"))],
        fc: vec![MappingEdge::new(id("f_exec"), id("c_cam"))],
        failure_modes: vec![
            FailureMode {
                id: id("fm_cam"),
                element: id("c_cam"),
                category: FailureCategory::Component(ComponentMode::Damaged),
                description: "Camera module is damaged".into(),
                effects: vec![rated_effect(
                    "Camera module cannot be executed",
                    SeverityClass::Component(ComponentSeverity::PrimaryFunctionEffect),
                    8,
                )],
                causes: vec![
                    rated_cause("Lack of R/C components for protection", 7),
                    rated_cause("Incorrect circuit design", 4),
                ],
                control: Some(ControlPlan {
                    method_class: ControlMethod::DesignAnalysis,
                    method_text: Some("Circuit design review".into()),
                    detection_rank: Some(rank(8)),
                }),
            },
            FailureMode {
                id: id("fm_exec"),
                element: id("f_exec"),
                category: FailureCategory::Function(FunctionMode::Malfunction),
                description: "Camera module cannot be executed".into(),
                effects: vec![rated_effect(
                    "A user cannot take photos",
                    SeverityClass::Function(FunctionSeverity::DifficultToOperate),
                    8,
                )],
                causes: vec![
                    Cause::new("Camera module is damaged"),
                    Cause::new("Lack of power supply"),
                    Cause::new("Incorrect pattern"),
                ],
                control: None,
            },
            FailureMode {
                id: id("fm_photo"),
                element: id("r_photo"),
                category: FailureCategory::Requirement(RequirementMode::Absence),
                description: "A user cannot take photos".into(),
                effects: vec![rated_effect(
                    "Users move to another phone brand",
                    SeverityClass::Requirement(RequirementSeverity::ChooseCompetitor),
                    8,
                )],
                causes: vec![Cause::new("Camera module cannot be executed")],
                control: None,
            },
        ],
    }
}

fn fm(
    fid: &str,
    element: &str,
    category: FailureCategory,
    description: &str,
    effects: Vec<Effect>,
    causes: Vec<Cause>,
    control: Option<ControlPlan>,
) -> FailureMode {
    FailureMode {
        id: id(fid),
        element: id(element),
        category,
        description: description.into(),
        effects,
        causes,
        control,
    }
}

fn control(method: ControlMethod, r: i64) -> Option<ControlPlan> {
    Some(ControlPlan {
        method_class: method,
        method_text: None,
        detection_rank: Some(rank(r)),
    })
}

/// Smartphone model covering the three taxonomies: an always-on internet
/// requirement with three of its five modes, an image display function with
/// two modes, and a GSM transceiver with three component modes.
pub fn smartphone_model() -> DesignModel {
    use ComponentMode as CM;
    use FunctionMode as FM;
    use RequirementMode as RM;
    let req = FailureCategory::Requirement;
    let fun = FailureCategory::Function;
    let comp = FailureCategory::Component;
    let req_sev = |t: &str, c, r| vec![rated_effect(t, SeverityClass::Requirement(c), r)];
    let fun_sev = |t: &str, c, r| vec![rated_effect(t, SeverityClass::Function(c), r)];
    let comp_sev = |t: &str, c, r| vec![rated_effect(t, SeverityClass::Component(c), r)];

    DesignModel {
        meta: Meta {
            product: "Smartphone".into(),
            version: "0.3".into(),
        },
        requirements: vec![
            Requirement {
                id: id("r_net"),
                text: "have an internet connection at all times".into(),
            },
            Requirement {
                id: id("r_view"),
                text: "view pictures on the phone".into(),
            },
        ],
        functions: vec![
            Function {
                id: id("f_connect"),
                verb: "connect".into(),
                noun: "mobile network".into(),
                inputs: vec![Flow {
                    description: "battery power".into(),
                    kind: FlowKind::Energy,
                }],
                outputs: vec![Flow {
                    description: "data link".into(),
                    kind: FlowKind::Information,
                }],
            },
            Function {
                id: id("f_display"),
                verb: "display".into(),
                noun: "images".into(),
                inputs: vec![Flow {
                    description: "image data".into(),
                    kind: FlowKind::Information,
                }],
                outputs: vec![Flow {
                    description: "light".into(),
                    kind: FlowKind::Energy,
                }],
            },
        ],
        components: vec![
            Component {
                id: id("c_gsm"),
                name: "GSM transceiver".into(),
                concept: None,
            },
            Component {
                id: id("c_lcd"),
                name: "LCD panel".into(),
                concept: Some("backlit TFT display".into()),
            },
        ],
        rf: vec![
            MappingEdge::new(id("r_net"), id("f_connect")),
            MappingEdge::new(id("r_view"), id("f_display")),
        ],
        fc: vec![
            MappingEdge::new(id("f_connect"), id("c_gsm")),
            MappingEdge::new(id("f_display"), id("c_lcd")),
        ],
        failure_modes: vec![
            fm(
                "fm_net_absent",
                "r_net",
                req(RM::Absence),
                "No internet connection can be established",
                req_sev(
                    "Users return the phone",
                    RequirementSeverity::ReturnToFix,
                    6,
                ),
                vec![Cause::new("Network function fails")],
                None,
            ),
            fm(
                "fm_net_intermittent",
                "r_net",
                req(RM::Intermittence),
                "The connection keeps dropping",
                req_sev(
                    "Users pick another brand",
                    RequirementSeverity::ChooseCompetitor,
                    7,
                ),
                vec![Cause::new("Weak reception")],
                None,
            ),
            fm(
                "fm_net_slow",
                "r_net",
                req(RM::ImproperOccurrence),
                "Connecting takes a long time",
                req_sev("Users live with it", RequirementSeverity::Tolerate, 3),
                vec![Cause::new("Slow network registration")],
                None,
            ),
            fm(
                "fm_view_absent",
                "r_view",
                req(RM::Absence),
                "Pictures cannot be viewed",
                req_sev(
                    "Users return the phone",
                    RequirementSeverity::ReturnToFix,
                    5,
                ),
                vec![Cause::new("Display function fails")],
                None,
            ),
            fm(
                "fm_connect_fail",
                "f_connect",
                fun(FM::Malfunction),
                "The phone does not connect",
                fun_sev("No data service", FunctionSeverity::DifficultToOperate, 7),
                vec![Cause::new("Transceiver damaged")],
                None,
            ),
            fm(
                "fm_display_none",
                "f_display",
                fun(FM::Malfunction),
                "Images are not displayed",
                fun_sev("Screen stays dark", FunctionSeverity::DifficultToOperate, 8),
                vec![Cause::new("Panel damaged")],
                None,
            ),
            fm(
                "fm_display_noise",
                "f_display",
                fun(FM::Interference),
                "The image display is disturbed",
                fun_sev(
                    "Flicker and artefacts",
                    FunctionSeverity::UnderStandardPerformance,
                    5,
                ),
                vec![Cause::new("Radiated noise from the radio")],
                None,
            ),
            fm(
                "fm_gsm_damaged",
                "c_gsm",
                comp(CM::Damaged),
                "The GSM transceiver is damaged (burned out, or discharged)",
                comp_sev("No radio link", ComponentSeverity::PrimaryFunctionEffect, 8),
                vec![rated_cause("Over-voltage on the supply rail", 4)],
                control(ControlMethod::PassFailOrReliabilityTest, 3),
            ),
            fm(
                "fm_gsm_efficiency",
                "c_gsm",
                comp(CM::LossOfEfficiency),
                "The transceiver struggles to reach the network while powered",
                comp_sev(
                    "Dropped calls",
                    ComponentSeverity::SecondaryFunctionEffect,
                    6,
                ),
                vec![Cause {
                    text: "Antenna detuned by the housing".into(),
                    occurrence_rank: None,
                    frequency: Some(Frequency::new(1, 400).expect("positive")),
                }],
                control(ControlMethod::DesignAnalysis, 7),
            ),
            fm(
                "fm_gsm_emi",
                "c_gsm",
                comp(CM::EMI),
                "The transceiver emits radiation",
                comp_sev("Display noise", ComponentSeverity::NonFunctionalEffect, 4),
                vec![rated_cause("Missing shielding can", 5)],
                control(ControlMethod::StandardDesignDocuments, 6),
            ),
            fm(
                "fm_lcd_damaged",
                "c_lcd",
                comp(CM::Damaged),
                "The LCD panel is cracked",
                comp_sev("No picture", ComponentSeverity::PrimaryFunctionEffect, 7),
                vec![rated_cause("Drop impact", 6)],
                control(ControlMethod::RealLifeProductTest, 1),
            ),
        ],
    }
}

/// Knobs for [`random_model`].
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    /// Upper bound on each of m, n and p; each is at least 1.
    pub max_elements: usize,
    pub edge_probability: f64,
    pub max_modes_per_element: usize,
    /// Drop non-component failure modes that could not be rated, so the
    /// model passes analysis-ready validation.
    pub analysis_ready: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            max_elements: 4,
            edge_probability: 0.5,
            max_modes_per_element: 2,
            analysis_ready: true,
        }
    }
}

const TEXTS: &[&str] = &[
    "Camera module is damaged",
    "burned out, or discharged",
    "Kamera-Modul beschädigt",
    "reports \"no signal\"",
    "line one\nline two",
    "pipe | separated",
    "Lack of power supply",
    "low battery warning",
    "信号丢失",
    "  padded  ",
];

fn text(rng: &mut impl Rng) -> String {
    TEXTS.choose(rng).expect("non-empty").to_string()
}

fn random_rank_in(rng: &mut impl Rng, band: RankBand) -> Rank {
    rank(rng.gen_range(i64::from(band.lo().value())..=i64::from(band.hi().value())))
}

fn random_effect(rng: &mut impl Rng, domain: ElementDomain, rated: bool) -> Effect {
    let mut effect = Effect::new(text(rng));
    if !rated {
        return effect;
    }
    let classes = SeverityClass::all(domain);
    match rng.gen_range(0..3) {
        0 => effect.severity_rank = Some(rank(rng.gen_range(1..=10))),
        1 => effect.severity_class = Some(*classes.choose(rng).expect("five classes")),
        _ => {
            let class = *classes.choose(rng).expect("five classes");
            effect.severity_class = Some(class);
            effect.severity_rank = Some(random_rank_in(rng, severity_band(class)));
        }
    }
    effect
}

const DENOMINATORS: &[u64] = &[
    2, 10, 20, 21, 100, 125, 126, 400, 1250, 5000, 10_000, 10_001, 50_000, 100_000, 500_000,
    1_000_000, 2_000_000,
];

fn random_cause(rng: &mut impl Rng, rated: bool) -> Cause {
    let mut cause = Cause::new(text(rng));
    if !rated {
        return cause;
    }
    let frequency = Frequency::new(
        rng.gen_range(1..=3),
        *DENOMINATORS.choose(rng).expect("non-empty"),
    )
    .expect("positive");
    match rng.gen_range(0..3) {
        0 => cause.occurrence_rank = Some(rank(rng.gen_range(1..=10))),
        1 => cause.frequency = Some(frequency),
        _ => {
            cause.frequency = Some(frequency);
            cause.occurrence_rank = Some(random_rank_in(rng, occurrence_band(frequency)));
        }
    }
    cause
}

fn random_control(rng: &mut impl Rng) -> ControlPlan {
    let method = *ControlMethod::ALL.choose(rng).expect("five classes");
    ControlPlan {
        method_class: method,
        method_text: rng.gen_bool(0.5).then(|| text(rng)),
        detection_rank: rng
            .gen_bool(0.5)
            .then(|| random_rank_in(rng, detection_band(method))),
    }
}

fn random_flows(rng: &mut impl Rng) -> Vec<Flow> {
    let kinds = [FlowKind::Material, FlowKind::Energy, FlowKind::Information];
    (0..rng.gen_range(0..=2))
        .map(|_| Flow {
            description: text(rng),
            kind: *kinds.choose(rng).expect("three kinds"),
        })
        .collect()
}

/// A random structurally valid model with rated requirement and component
/// failure modes.
pub fn random_model(rng: &mut impl Rng, config: GenConfig) -> DesignModel {
    let mut model = DesignModel {
        meta: Meta {
            product: text(rng),
            version: format!("{}", rng.gen_range(0..100)),
        },
        ..Default::default()
    };
    let (m, n, p) = (
        rng.gen_range(1..=config.max_elements.max(1)),
        rng.gen_range(1..=config.max_elements.max(1)),
        rng.gen_range(1..=config.max_elements.max(1)),
    );
    for i in 0..m {
        model.requirements.push(Requirement {
            id: id(&format!("r{i}")),
            text: text(rng),
        });
    }
    for i in 0..n {
        model.functions.push(Function {
            id: id(&format!("f{i}")),
            verb: "provide".into(),
            noun: text(rng),
            inputs: random_flows(rng),
            outputs: random_flows(rng),
        });
    }
    for i in 0..p {
        model.components.push(Component {
            id: id(&format!("c{i}")),
            name: text(rng),
            concept: rng.gen_bool(0.3).then(|| text(rng)),
        });
    }
    for r in &model.requirements {
        for f in &model.functions {
            if rng.gen_bool(config.edge_probability) {
                model.rf.push(MappingEdge::new(r.id.clone(), f.id.clone()));
            }
        }
    }
    for f in &model.functions {
        for c in &model.components {
            if rng.gen_bool(config.edge_probability) {
                model.fc.push(MappingEdge::new(f.id.clone(), c.id.clone()));
            }
        }
    }
    model.rf.shuffle(rng);
    model.fc.shuffle(rng);

    let owners: Vec<(ElementId, ElementDomain)> = ElementDomain::ALL
        .into_iter()
        .flat_map(|d| {
            model
                .element_ids(d)
                .into_iter()
                .map(move |id| (id.clone(), d))
        })
        .collect();
    let mut serial = 0;
    for (owner, domain) in owners {
        for _ in 0..rng.gen_range(0..=config.max_modes_per_element) {
            serial += 1;
            let category = *allowed_categories(domain).choose(rng).expect("non-empty");
            let (effects, causes, control) = match domain {
                ElementDomain::Requirement => (
                    (0..rng.gen_range(1..=2))
                        .map(|_| random_effect(rng, domain, true))
                        .collect(),
                    (0..rng.gen_range(0..=2))
                        .map(|_| {
                            let rated = rng.gen_bool(0.2);
                            random_cause(rng, rated)
                        })
                        .collect(),
                    None,
                ),
                ElementDomain::Function => {
                    let rated = rng.gen_bool(0.6);
                    (
                        (0..rng.gen_range(0..=2))
                            .map(|_| random_effect(rng, domain, rated))
                            .collect(),
                        (0..rng.gen_range(0..=2))
                            .map(|_| {
                                let rated = rng.gen_bool(0.2);
                                random_cause(rng, rated)
                            })
                            .collect(),
                        rng.gen_bool(0.3).then(|| random_control(rng)),
                    )
                }
                ElementDomain::Component => (
                    (0..rng.gen_range(1..=2))
                        .map(|_| random_effect(rng, domain, true))
                        .collect(),
                    (0..rng.gen_range(1..=2))
                        .map(|_| random_cause(rng, true))
                        .collect(),
                    Some(random_control(rng)),
                ),
            };
            model.failure_modes.push(FailureMode {
                id: id(&format!("fm{serial}")),
                element: owner.clone(),
                category,
                description: text(rng),
                effects,
                causes,
                control,
            });
        }
    }
    model.failure_modes.shuffle(rng);

    if config.analysis_ready {
        let report = validate_model(&model, Strictness::AnalysisReady);
        let drop: Vec<String> = report
            .errors()
            .filter(|f| {
                matches!(
                    f.code,
                    FindingCode::UnresolvableSeverity | FindingCode::UnresolvableOccurrence
                )
            })
            .map(|f| f.path.trim_start_matches("failure_mode:").to_string())
            .collect();
        model
            .failure_modes
            .retain(|fm| !drop.iter().any(|d| d == fm.id.as_str()));
    }
    model
}

/// The same model with elements, edges and failure modes reordered.
pub fn permuted(model: &DesignModel, rng: &mut impl Rng) -> DesignModel {
    let mut out = model.clone();
    out.requirements.shuffle(rng);
    out.functions.shuffle(rng);
    out.components.shuffle(rng);
    out.rf.shuffle(rng);
    out.fc.shuffle(rng);
    out.failure_modes.shuffle(rng);
    out
}
