//! Names, relation types and question phrasing for the synthetic
//! multiple-sclerosis knowledge graph.

pub(super) struct LabelSpec {
    pub label: &'static str,
    pub id_prefix: &'static str,
    pub names: &'static [&'static str],
}

pub(super) const LABELS: &[LabelSpec] = &[
    LabelSpec {
        label: "drug",
        id_prefix: "DB",
        names: &[
            "fingolimod",
            "interferon beta-1a",
            "natalizumab",
            "ocrelizumab",
            "glatiramer acetate",
            "dimethyl fumarate",
            "teriflunomide",
            "cladribine",
            "alemtuzumab",
            "siponimod",
            "ozanimod",
            "mitoxantrone",
            "methylprednisolone",
            "baclofen",
            "tizanidine",
            "dalfampridine",
            "rituximab",
            "ibrutinib",
            "venetoclax",
            "chlorambucil",
            "fludarabine",
            "cyclophosphamide",
            "prednisone",
            "amantadine",
            "modafinil",
        ],
    },
    LabelSpec {
        label: "disease",
        id_prefix: "MONDO",
        names: &[
            "multiple sclerosis",
            "neuromyelitis optica",
            "Richter syndrome",
            "chronic lymphocytic leukemia",
            "optic neuritis",
            "transverse myelitis",
            "acute disseminated encephalomyelitis",
            "Alzheimer disease",
            "systemic lupus erythematosus",
            "rheumatoid arthritis",
            "type 1 diabetes mellitus",
            "psoriasis",
            "Crohn disease",
            "myasthenia gravis",
            "Guillain-Barre syndrome",
            "sarcoidosis",
            "migraine",
            "epilepsy",
            "hypertension",
            "major depressive disorder",
        ],
    },
    LabelSpec {
        label: "phenotype",
        id_prefix: "HP",
        names: &[
            "fatigue",
            "spasticity",
            "ataxia",
            "diplopia",
            "paresthesia",
            "urinary urgency",
            "visual loss",
            "hyperreflexia",
            "nystagmus",
            "tremor",
            "dysarthria",
            "depression",
            "cognitive impairment",
            "muscle weakness",
            "headache",
            "nausea",
            "lymphadenopathy",
            "splenomegaly",
            "obesity",
            "hypoglycemia",
        ],
    },
    LabelSpec {
        label: "gene/protein",
        id_prefix: "NCBI",
        names: &[
            "APOE", "POMC", "HLA-DRB1", "IL7R", "IL2RA", "CD6", "TNFRSF1A", "AQP4", "MOG", "MBP", "PLP1", "CD19",
            "MS4A1", "BTK", "BCL2", "TP53", "APP", "CLU", "LEPR", "MC4R", "S1PR1", "CD52", "DHODH", "KCNA1", "GABBR1",
        ],
    },
    LabelSpec {
        label: "anatomy",
        id_prefix: "UBERON",
        names: &[
            "brain",
            "spinal cord",
            "optic nerve",
            "cerebellum",
            "white matter",
            "lymph node",
            "spleen",
            "bone marrow",
            "liver",
            "thymus",
            "retina",
            "hippocampus",
            "blood",
            "skin",
            "kidney",
        ],
    },
    LabelSpec {
        label: "cellular_component",
        id_prefix: "GOCC",
        names: &[
            "myelin sheath",
            "axon",
            "plasma membrane",
            "nucleus",
            "mitochondrion",
            "endoplasmic reticulum",
            "synapse",
            "lysosome",
            "Golgi apparatus",
            "cytosol",
            "extracellular space",
            "cell surface",
            "node of Ranvier",
            "dendrite",
            "ribosome",
        ],
    },
    LabelSpec {
        label: "pathway",
        id_prefix: "REACT",
        names: &[
            "Interferon signaling",
            "Cytokine signaling in immune system",
            "Sphingolipid metabolism",
            "Apoptosis",
            "B cell receptor signaling",
            "T cell receptor signaling",
            "NF-kB activation",
            "Lipoprotein metabolism",
            "Neurotransmitter release cycle",
            "Toll-like receptor cascade",
            "PI3K-Akt signaling",
            "Complement cascade",
            "Peptide hormone metabolism",
            "MAPK signaling",
            "Axon guidance",
        ],
    },
    LabelSpec {
        label: "molecular_function",
        id_prefix: "GOMF",
        names: &[
            "protein binding",
            "cytokine receptor activity",
            "lipid binding",
            "sphingosine-1-phosphate receptor activity",
            "potassium channel activity",
            "water channel activity",
            "kinase activity",
            "hormone activity",
            "receptor binding",
            "DNA binding",
            "GABA receptor activity",
            "antigen binding",
            "cholesterol binding",
            "ATP binding",
            "ubiquitin ligase activity",
        ],
    },
    LabelSpec {
        label: "exposure",
        id_prefix: "CTD",
        names: &[
            "cigarette smoking",
            "Epstein-Barr virus infection",
            "vitamin D deficiency",
            "air pollution",
            "particulate matter",
            "organic solvents",
            "shift work",
            "childhood obesity",
            "ultraviolet radiation",
            "heavy metals",
            "pesticides",
            "alcohol consumption",
            "lead",
            "benzene",
            "bisphenol A",
        ],
    },
    LabelSpec {
        label: "biological_process",
        id_prefix: "GOBP",
        names: &[
            "immune response",
            "inflammatory response",
            "myelination",
            "axon ensheathment",
            "T cell activation",
            "B cell proliferation",
            "apoptotic process",
            "lipid transport",
            "cholesterol homeostasis",
            "response to virus",
            "antigen processing and presentation",
            "neuron apoptotic process",
            "regulation of appetite",
            "synaptic transmission",
            "cell migration",
            "response to oxidative stress",
            "DNA repair",
            "angiogenesis",
            "cytokine production",
            "glucose homeostasis",
        ],
    },
];

/// One relation type of the upstream graph. Raw facts run `x -> y`, the
/// orientation kept after transformation.
pub(super) struct RelSpec {
    /// Upstream relation column, recorded as the rename note.
    pub relation: &'static str,
    /// Upstream display name, used on raw edges.
    pub display: &'static str,
    pub renamed: Option<&'static str>,
    pub x: &'static str,
    pub y: &'static str,
    /// Random facts drawn on top of the anchors.
    pub count: usize,
    /// Noun phrase for the `y` nodes reached from `{x}`.
    pub forward: &'static str,
    /// Noun phrase for the `x` nodes reached from `{x}` (a `y` node).
    pub backward: &'static str,
}

impl RelSpec {
    pub fn name(&self) -> &'static str {
        self.renamed.unwrap_or(self.display)
    }

    pub fn is_self(&self) -> bool {
        self.x == self.y
    }
}

macro_rules! rel {
    ($relation:literal, $display:literal => $renamed:expr, $x:literal -> $y:literal, $count:literal, $fwd:literal, $bwd:literal) => {
        RelSpec {
            relation: $relation,
            display: $display,
            renamed: $renamed,
            x: $x,
            y: $y,
            count: $count,
            forward: $fwd,
            backward: $bwd,
        }
    };
}

pub(super) const RELATIONS: &[RelSpec] = &[
    rel!("drug_disease", "contraindication" => None, "drug" -> "disease", 30,
        "diseases that are contraindications of {x}", "drugs contraindicated for {x}"),
    rel!("drug_disease", "indication" => None, "drug" -> "disease", 30,
        "diseases that are indications of {x}", "drugs indicated for {x}"),
    rel!("drug_disease", "off-label use" => None, "drug" -> "disease", 12,
        "diseases treated off-label with {x}", "drugs used off-label for {x}"),
    rel!("drug_effect", "side effect" => None, "drug" -> "phenotype", 40,
        "side effects of {x}", "drugs that cause {x}"),
    rel!("drug_protein", "target" => None, "drug" -> "gene/protein", 25,
        "targets of {x}", "drugs that target {x}"),
    rel!("drug_drug", "synergistic interaction" => None, "drug" -> "drug", 12,
        "drugs with a synergistic interaction with {x}", "drugs with a synergistic interaction with {x}"),
    rel!("protein_protein", "ppi" => Some("protein-protein interaction"), "gene/protein" -> "gene/protein", 30,
        "proteins that interact with {x}", "proteins that interact with {x}"),
    rel!("phenotype_protein", "associated with" => Some("gene/protein associated with phenotype"), "gene/protein" -> "phenotype", 30,
        "phenotypes associated with {x}", "genes associated with {x}"),
    rel!("disease_phenotype_positive", "phenotype present" => Some("phenotype present in disease"), "disease" -> "phenotype", 40,
        "phenotypes that occur in {x}", "diseases that present with {x}"),
    rel!("disease_phenotype_negative", "phenotype absent" => None, "disease" -> "phenotype", 10,
        "phenotypes absent in {x}", "diseases lacking {x}"),
    rel!("disease_protein", "associated with" => Some("gene/protein associated with disease"), "gene/protein" -> "disease", 35,
        "diseases associated with {x}", "genes associated with {x}"),
    rel!("disease_disease", "parent-child" => Some("related to disease"), "disease" -> "disease", 12,
        "diseases related to {x}", "diseases related to {x}"),
    rel!("phenotype_phenotype", "parent-child" => None, "phenotype" -> "phenotype", 10,
        "phenotypes related to {x}", "phenotypes related to {x}"),
    rel!("molfunc_protein", "interacts with" => Some("interacts with molecular function"), "gene/protein" -> "molecular_function", 25,
        "molecular functions of {x}", "genes that interact with {x}"),
    rel!("cellcomp_protein", "interacts with" => Some("interacts with cellular component"), "gene/protein" -> "cellular_component", 25,
        "cellular components that interact with {x}", "genes that interact with {x}"),
    rel!("bioprocess_protein", "interacts with" => Some("interacts with biological process"), "gene/protein" -> "biological_process", 35,
        "biological processes affected by {x}", "genes that affect {x}"),
    rel!("exposure_protein", "interacts with" => Some("interacts with gene_protein"), "exposure" -> "gene/protein", 25,
        "genes that interact with {x}", "exposures that interact with {x}"),
    rel!("exposure_disease", "linked to" => Some("disease linked to exposure"), "exposure" -> "disease", 20,
        "diseases linked to {x}", "exposures linked to {x}"),
    rel!("exposure_exposure", "parent-child" => Some("related to exposure"), "exposure" -> "exposure", 8,
        "exposures related to {x}", "exposures related to {x}"),
    rel!("exposure_bioprocess", "interacts with" => Some("interacts with biological process"), "exposure" -> "biological_process", 25,
        "biological processes affected by {x}", "exposures that affect {x}"),
    rel!("exposure_molfunc", "interacts with" => Some("interacts with molecular function"), "exposure" -> "molecular_function", 12,
        "molecular functions that interact with {x}", "exposures that interact with {x}"),
    rel!("pathway_protein", "interacts with" => Some("interacts with pathway"), "pathway" -> "gene/protein", 30,
        "genes that interact with {x}", "pathways that interact with {x}"),
    rel!("anatomy_protein_present", "expression present" => Some("expression present in anatomical structure"), "anatomy" -> "gene/protein", 30,
        "genes expressed in {x}", "anatomical structures expressing {x}"),
    rel!("anatomy_protein_absent", "expression absent" => Some("expression absent in anatomical structure"), "anatomy" -> "gene/protein", 12,
        "genes not expressed in {x}", "anatomical structures that do not express {x}"),
];

/// Facts that make the running examples answerable, as
/// (x name, upstream relation, display name, y name).
pub(super) const ANCHORS: &[(&str, &str, &str, &str)] = &[
    ("natalizumab", "drug_disease", "contraindication", "multiple sclerosis"),
    ("alemtuzumab", "drug_disease", "contraindication", "multiple sclerosis"),
    ("cladribine", "drug_disease", "contraindication", "multiple sclerosis"),
    ("ibrutinib", "drug_disease", "indication", "Richter syndrome"),
    ("venetoclax", "drug_disease", "indication", "Richter syndrome"),
    ("ibrutinib", "drug_effect", "side effect", "nausea"),
    ("venetoclax", "drug_effect", "side effect", "fatigue"),
    ("POMC", "phenotype_protein", "associated with", "obesity"),
    ("POMC", "phenotype_protein", "associated with", "fatigue"),
    ("POMC", "phenotype_protein", "associated with", "depression"),
    ("neuromyelitis optica", "disease_phenotype_positive", "phenotype present", "fatigue"),
    ("neuromyelitis optica", "disease_phenotype_positive", "phenotype present", "visual loss"),
    ("vitamin D deficiency", "exposure_disease", "linked to", "multiple sclerosis"),
    ("Epstein-Barr virus infection", "exposure_disease", "linked to", "multiple sclerosis"),
    ("cigarette smoking", "exposure_disease", "linked to", "multiple sclerosis"),
    ("Epstein-Barr virus infection", "exposure_protein", "interacts with", "IL2RA"),
    ("Cytokine signaling in immune system", "pathway_protein", "interacts with", "IL2RA"),
    ("APOE", "bioprocess_protein", "interacts with", "lipid transport"),
    ("APOE", "bioprocess_protein", "interacts with", "cholesterol homeostasis"),
    ("cigarette smoking", "exposure_bioprocess", "interacts with", "cholesterol homeostasis"),
];
