//! Finite categories given by explicit composition tables.
//!
//! Beyond the axiom check this module answers one question: given a class
//! `S` of objects and an object `X`, which `(Y, f_Y: X -> Y)` with `Y` in `S`
//! and `f_Y` mono factor every other mono `f_Z: X -> Z` (with `Z` in `S`) as
//! `f_Z = f . f_Y` for some mono `f: Y -> Z`? "1-1 morphism" is read as
//! monomorphism, and "Y contains X" as "there is a mono `X -> Y`".

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::metric::{AxiomOutcome, AxiomReport};
use crate::spaces::FiniteSpaceTable;

/// Default cap on the size of a single hom-set.
pub const DEFAULT_HOM_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorphismId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub src: ObjectId,
    pub dst: ObjectId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDescriptor {
    pub name: String,
    pub src: String,
    pub dst: String,
}

/// JSON form of a finite category. `composition` lists triples
/// `[g, f, g∘f]`; composites with an identity may be omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDescriptor {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDescriptor>,
    #[serde(default)]
    pub composition: Vec<[String; 3]>,
    pub identities: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorphismId>,
    table: HashMap<(MorphismId, MorphismId), MorphismId>,
    homs: HashMap<(ObjectId, ObjectId), Vec<MorphismId>>,
}

impl FiniteCategory {
    pub fn from_descriptor(desc: &CategoryDescriptor) -> Result<Self> {
        Self::from_descriptor_with_cap(desc, DEFAULT_HOM_CAP)
    }

    /// Resolves names and fills in identity composites. The table must be
    /// total on composable pairs; whether it is associative and unital is
    /// left to [`verify_category_axioms`].
    pub fn from_descriptor_with_cap(desc: &CategoryDescriptor, hom_cap: usize) -> Result<Self> {
        let invalid = |msg: String| Error::InvalidCategory(msg);

        let mut object_ids = HashMap::new();
        for (i, o) in desc.objects.iter().enumerate() {
            if object_ids.insert(o.as_str(), ObjectId(i)).is_some() {
                return Err(invalid(format!("duplicate object {o:?}")));
            }
        }
        let object = |name: &str| {
            object_ids
                .get(name)
                .copied()
                .ok_or_else(|| invalid(format!("unknown object {name:?}")))
        };

        let mut morphism_ids = HashMap::new();
        let mut morphisms = Vec::with_capacity(desc.morphisms.len());
        for (i, m) in desc.morphisms.iter().enumerate() {
            if morphism_ids.insert(m.name.as_str(), MorphismId(i)).is_some() {
                return Err(invalid(format!("duplicate morphism {:?}", m.name)));
            }
            morphisms.push(Morphism {
                name: m.name.clone(),
                src: object(&m.src)?,
                dst: object(&m.dst)?,
            });
        }
        let morphism = |name: &str| {
            morphism_ids
                .get(name)
                .copied()
                .ok_or_else(|| invalid(format!("unknown morphism {name:?}")))
        };

        let mut homs: HashMap<(ObjectId, ObjectId), Vec<MorphismId>> = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            let hom = homs.entry((m.src, m.dst)).or_default();
            hom.push(MorphismId(i));
            if hom.len() > hom_cap {
                return Err(invalid(format!(
                    "hom-set {} -> {} exceeds the cap of {hom_cap} morphisms",
                    desc.objects[m.src.0], desc.objects[m.dst.0]
                )));
            }
        }

        let mut identities = Vec::with_capacity(desc.objects.len());
        for o in &desc.objects {
            let name = desc
                .identities
                .get(o)
                .ok_or_else(|| invalid(format!("object {o:?} has no identity")))?;
            identities.push(morphism(name)?);
        }
        for o in desc.identities.keys() {
            object(o)?;
        }

        let mut table = HashMap::new();
        for [g, f, gf] in &desc.composition {
            let (g, f, gf) = (morphism(g)?, morphism(f)?, morphism(gf)?);
            if morphisms[f.0].dst != morphisms[g.0].src {
                return Err(invalid(format!(
                    "{} and {} are not composable",
                    morphisms[g.0].name, morphisms[f.0].name
                )));
            }
            if let Some(prev) = table.insert((g, f), gf) {
                if prev != gf {
                    return Err(invalid(format!(
                        "conflicting entries for {} ∘ {}",
                        morphisms[g.0].name, morphisms[f.0].name
                    )));
                }
            }
        }

        for (i, m) in morphisms.iter().enumerate() {
            let f = MorphismId(i);
            table.entry((identities[m.dst.0], f)).or_insert(f);
            table.entry((f, identities[m.src.0])).or_insert(f);
        }

        for (fi, f) in morphisms.iter().enumerate() {
            for (gi, g) in morphisms.iter().enumerate() {
                if f.dst == g.src && !table.contains_key(&(MorphismId(gi), MorphismId(fi))) {
                    return Err(invalid(format!("composition table has no entry for {} ∘ {}", g.name, f.name)));
                }
            }
        }

        Ok(FiniteCategory {
            objects: desc.objects.clone(),
            morphisms,
            identities,
            table,
            homs,
        })
    }

    pub fn to_descriptor(&self) -> CategoryDescriptor {
        let mut composition: Vec<[String; 3]> = self
            .table
            .iter()
            .map(|(&(g, f), &gf)| [self.name(g).into(), self.name(f).into(), self.name(gf).into()])
            .collect();
        composition.sort();
        CategoryDescriptor {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismDescriptor {
                    name: m.name.clone(),
                    src: self.objects[m.src.0].clone(),
                    dst: self.objects[m.dst.0].clone(),
                })
                .collect(),
            composition,
            identities: self
                .objects
                .iter()
                .zip(&self.identities)
                .map(|(o, &id)| (o.clone(), self.name(id).to_string()))
                .collect(),
        }
    }

    /// The category of a preorder: one morphism `a->b` whenever `leq(a, b)`.
    /// Identities are named `id_a`.
    pub fn preorder(labels: &[&str], leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = labels.len();
        let arrow = |i: usize, j: usize| {
            if i == j {
                format!("id_{}", labels[i])
            } else {
                format!("{}->{}", labels[i], labels[j])
            }
        };
        let mut morphisms = Vec::new();
        let mut composition = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || leq(i, j) {
                    morphisms.push(MorphismDescriptor {
                        name: arrow(i, j),
                        src: labels[i].to_string(),
                        dst: labels[j].to_string(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let ij = i == j || leq(i, j);
                    let jk = j == k || leq(j, k);
                    if ij && jk {
                        if !(i == k || leq(i, k)) {
                            return Err(Error::InvalidCategory(format!(
                                "relation is not transitive at ({}, {}, {})",
                                labels[i], labels[j], labels[k]
                            )));
                        }
                        composition.push([arrow(j, k), arrow(i, j), arrow(i, k)]);
                    }
                }
            }
        }
        let desc = CategoryDescriptor {
            objects: labels.iter().map(|s| s.to_string()).collect(),
            morphisms,
            composition,
            identities: labels
                .iter()
                .enumerate()
                .map(|(i, l)| (l.to_string(), arrow(i, i)))
                .collect(),
        };
        Self::from_descriptor(&desc)
    }

    /// A total order `labels[0] < labels[1] < ...`.
    pub fn chain(labels: &[&str]) -> Result<Self> {
        Self::preorder(labels, |i, j| i <= j)
    }

    /// The cyclic group of order `n` as a one-object category on `*`.
    /// Morphism `gk` is the k-th power of the generator; `g0` is the identity.
    pub fn cyclic_group(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCategory("group order must be positive".into()));
        }
        let name = |k: usize| format!("g{k}");
        let desc = CategoryDescriptor {
            objects: vec!["*".into()],
            morphisms: (0..n)
                .map(|k| MorphismDescriptor {
                    name: name(k),
                    src: "*".into(),
                    dst: "*".into(),
                })
                .collect(),
            composition: (0..n)
                .flat_map(|a| (0..n).map(move |b| [name(a), name(b), name((a + b) % n)]))
                .collect(),
            identities: BTreeMap::from([("*".to_string(), name(0))]),
        };
        Self::from_descriptor(&desc)
    }

    /// Finite metric spaces as objects, every distance-preserving map between
    /// them as a morphism, composition of functions as composition.
    ///
    /// A map is named `X->Y[i0,i1,...]` by the indices of its images.
    pub fn of_finite_metric_spaces(spaces: &[(&str, FiniteSpaceTable)]) -> Result<Self> {
        let mut morphisms = Vec::new();
        // (src space, dst space, image indices)
        let mut maps: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        for (si, (sname, src)) in spaces.iter().enumerate() {
            for (ti, (tname, dst)) in spaces.iter().enumerate() {
                for images in all_functions(src.len(), dst.len()) {
                    let preserves = (0..src.len()).all(|a| {
                        (0..src.len()).all(|b| src.entry(a, b) == dst.entry(images[a], images[b]))
                    });
                    if preserves {
                        morphisms.push(MorphismDescriptor {
                            name: map_name(sname, tname, &images),
                            src: sname.to_string(),
                            dst: tname.to_string(),
                        });
                        maps.push((si, ti, images));
                    }
                }
            }
        }
        let mut composition = Vec::new();
        for (fs, ft, f) in &maps {
            for (gs, gt, g) in &maps {
                if ft == gs {
                    let gf: Vec<usize> = f.iter().map(|&i| g[i]).collect();
                    composition.push([
                        map_name(spaces[*gs].0, spaces[*gt].0, g),
                        map_name(spaces[*fs].0, spaces[*ft].0, f),
                        map_name(spaces[*fs].0, spaces[*gt].0, &gf),
                    ]);
                }
            }
        }
        let desc = CategoryDescriptor {
            objects: spaces.iter().map(|(n, _)| n.to_string()).collect(),
            morphisms,
            composition,
            identities: spaces
                .iter()
                .map(|(n, t)| (n.to_string(), map_name(n, n, &(0..t.len()).collect::<Vec<_>>())))
                .collect(),
        };
        Self::from_descriptor(&desc)
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjectId> + '_ {
        (0..self.objects.len()).map(ObjectId)
    }

    pub fn morphism_ids(&self) -> impl Iterator<Item = MorphismId> + '_ {
        (0..self.morphisms.len()).map(MorphismId)
    }

    pub fn object_label(&self, o: ObjectId) -> &str {
        &self.objects[o.0]
    }

    pub fn object_by_label(&self, label: &str) -> Option<ObjectId> {
        self.objects.iter().position(|o| o == label).map(ObjectId)
    }

    pub fn morphism_by_name(&self, name: &str) -> Option<MorphismId> {
        self.morphisms.iter().position(|m| m.name == name).map(MorphismId)
    }

    pub fn morphism(&self, f: MorphismId) -> &Morphism {
        &self.morphisms[f.0]
    }

    pub fn name(&self, f: MorphismId) -> &str {
        &self.morphisms[f.0].name
    }

    pub fn src(&self, f: MorphismId) -> ObjectId {
        self.morphisms[f.0].src
    }

    pub fn dst(&self, f: MorphismId) -> ObjectId {
        self.morphisms[f.0].dst
    }

    pub fn identity(&self, o: ObjectId) -> MorphismId {
        self.identities[o.0]
    }

    pub fn hom(&self, a: ObjectId, b: ObjectId) -> &[MorphismId] {
        self.homs.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `g ∘ f`, or `None` when the pair is not composable.
    pub fn compose(&self, g: MorphismId, f: MorphismId) -> Option<MorphismId> {
        self.table.get(&(g, f)).copied()
    }

    pub fn len_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn len_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    /// Reroutes one composition entry, keeping everything else. Used to build
    /// deliberately broken tables.
    pub fn with_entry(&self, g: MorphismId, f: MorphismId, gf: MorphismId) -> Self {
        let mut out = self.clone();
        out.table.insert((g, f), gf);
        out
    }
}

fn map_name(src: &str, dst: &str, images: &[usize]) -> String {
    let parts: Vec<String> = images.iter().map(|i| i.to_string()).collect();
    format!("{src}->{dst}[{}]", parts.join(","))
}

fn all_functions(from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..from {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..to).map(move |t| {
                    let mut next = prefix.clone();
                    next.push(t);
                    next
                })
            })
            .collect();
    }
    out
}

impl fmt::Display for FiniteCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "category with {} objects and {} morphisms",
            self.objects.len(),
            self.morphisms.len()
        )
    }
}

pub const COMPOSITION_TYPING: &str = "composition_typing";
pub const IDENTITY_TYPING: &str = "identity_typing";
pub const IDENTITY_LAWS: &str = "identity_laws";
pub const ASSOCIATIVITY: &str = "associativity";

fn names(cat: &FiniteCategory, fs: &[MorphismId]) -> Vec<Value> {
    fs.iter().map(|&f| Value::String(cat.name(f).to_string())).collect()
}

/// Exhaustive check of typing, identity laws and associativity. Witnesses
/// are morphism names; the associativity witness is `[f, g, h]` for the
/// composable chain `h ∘ g ∘ f`.
pub fn verify_category_axioms(cat: &FiniteCategory) -> AxiomReport {
    let mut report = AxiomReport::default();

    let mut outcome = AxiomOutcome::pass();
    for o in cat.objects() {
        let id = cat.identity(o);
        if cat.src(id) != o || cat.dst(id) != o {
            outcome = AxiomOutcome::fail(
                names(cat, &[id]),
                format!("identity of {} is not an endomorphism of it", cat.object_label(o)),
            );
            break;
        }
    }
    report.record(IDENTITY_TYPING, outcome);

    let mut outcome = AxiomOutcome::pass();
    'typing: for f in cat.morphism_ids() {
        for g in cat.morphism_ids() {
            if cat.dst(f) != cat.src(g) {
                continue;
            }
            let gf = cat.compose(g, f).expect("table is total");
            if cat.src(gf) != cat.src(f) || cat.dst(gf) != cat.dst(g) {
                outcome = AxiomOutcome::fail(
                    names(cat, &[f, g, gf]),
                    format!("{} ∘ {} = {} has the wrong type", cat.name(g), cat.name(f), cat.name(gf)),
                );
                break 'typing;
            }
        }
    }
    report.record(COMPOSITION_TYPING, outcome);

    let mut outcome = AxiomOutcome::pass();
    for f in cat.morphism_ids() {
        let left = cat.compose(cat.identity(cat.dst(f)), f);
        let right = cat.compose(f, cat.identity(cat.src(f)));
        if left != Some(f) || right != Some(f) {
            outcome = AxiomOutcome::fail(
                names(cat, &[f]),
                format!("identity laws fail for {}", cat.name(f)),
            );
            break;
        }
    }
    report.record(IDENTITY_LAWS, outcome);

    let mut outcome = AxiomOutcome::pass();
    'assoc: for f in cat.morphism_ids() {
        for g in cat.morphism_ids() {
            let Some(gf) = cat.compose(g, f) else { continue };
            for h in cat.morphism_ids() {
                let Some(hg) = cat.compose(h, g) else { continue };
                let left = cat.compose(h, gf);
                let right = cat.compose(hg, f);
                if left != right {
                    let show = |m: Option<MorphismId>| m.map_or("undefined".to_string(), |m| cat.name(m).to_string());
                    outcome = AxiomOutcome::fail(
                        names(cat, &[f, g, h]),
                        format!(
                            "h∘(g∘f) = {} but (h∘g)∘f = {}",
                            show(left),
                            show(right)
                        ),
                    );
                    break 'assoc;
                }
            }
        }
    }
    report.record(ASSOCIATIVITY, outcome);

    report
}

/// Left-cancellable: `f ∘ g = f ∘ h` implies `g = h` for all parallel `g, h`.
pub fn is_mono(cat: &FiniteCategory, f: MorphismId) -> bool {
    let a = cat.src(f);
    cat.objects().all(|w| {
        let hom = cat.hom(w, a);
        let mut seen = HashSet::with_capacity(hom.len());
        hom.iter().all(|&g| seen.insert(cat.compose(f, g)))
    })
}

type Membership = Arc<dyn Fn(&FiniteCategory, ObjectId) -> bool + Send + Sync>;

/// Membership in the class `S` of objects with some property.
#[derive(Clone)]
pub struct PropertyPredicate {
    member: Membership,
}

impl PropertyPredicate {
    pub fn new(member: impl Fn(&FiniteCategory, ObjectId) -> bool + Send + Sync + 'static) -> Self {
        PropertyPredicate {
            member: Arc::new(member),
        }
    }

    pub fn all() -> Self {
        Self::new(|_, _| true)
    }

    pub fn none() -> Self {
        Self::new(|_, _| false)
    }

    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: HashSet<String> = labels.into_iter().map(Into::into).collect();
        Self::new(move |cat, o| set.contains(cat.object_label(o)))
    }

    pub fn contains(&self, cat: &FiniteCategory, o: ObjectId) -> bool {
        (self.member)(cat, o)
    }
}

impl fmt::Debug for PropertyPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PropertyPredicate")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RigidityViolation {
    pub object: String,
    pub morphism: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RigidityReport {
    pub objects_checked: usize,
    pub violations: Vec<RigidityViolation>,
}

impl RigidityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every mono endomorphism of every object in `S` must be its identity.
pub fn check_rigidity(cat: &FiniteCategory, s: &PropertyPredicate) -> RigidityReport {
    let mut report = RigidityReport {
        objects_checked: 0,
        violations: Vec::new(),
    };
    for a in cat.objects().filter(|&a| s.contains(cat, a)) {
        report.objects_checked += 1;
        let id = cat.identity(a);
        for &e in cat.hom(a, a) {
            if e != id && is_mono(cat, e) {
                report.violations.push(RigidityViolation {
                    object: cat.object_label(a).to_string(),
                    morphism: cat.name(e).to_string(),
                });
            }
        }
    }
    report
}

/// Monos `f: Y -> Z` with `f ∘ f_y = f_z`, where `Y = dst(f_y)`, `Z = dst(f_z)`.
pub fn closing_monos(cat: &FiniteCategory, f_y: MorphismId, f_z: MorphismId) -> Vec<MorphismId> {
    cat.hom(cat.dst(f_y), cat.dst(f_z))
        .iter()
        .copied()
        .filter(|&f| cat.compose(f, f_y) == Some(f_z) && is_mono(cat, f))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PtionCandidate {
    pub object: String,
    pub morphism: String,
    #[serde(skip)]
    pub object_id: ObjectId,
    #[serde(skip)]
    pub morphism_id: MorphismId,
}

/// All `(Y, f_Y)` with `Y` in `S`, `f_Y: X -> Y` mono, such that every mono
/// `f_Z: X -> Z` into `S` factors through `f_Y` by a mono.
///
/// Fails if `S` is not rigid.
pub fn find_ption(cat: &FiniteCategory, s: &PropertyPredicate, x: ObjectId) -> Result<Vec<PtionCandidate>> {
    let rigidity = check_rigidity(cat, s);
    if let Some(v) = rigidity.violations.first() {
        return Err(Error::RigidityViolated {
            object: v.object.clone(),
            morphism: v.morphism.clone(),
        });
    }

    let in_s: Vec<ObjectId> = cat.objects().filter(|&o| s.contains(cat, o)).collect();
    let monos_from_x: Vec<MorphismId> = in_s
        .iter()
        .flat_map(|&z| cat.hom(x, z).iter().copied())
        .filter(|&f| is_mono(cat, f))
        .collect();

    let mut out = Vec::new();
    for &f_y in &monos_from_x {
        let universal = monos_from_x
            .iter()
            .all(|&f_z| !closing_monos(cat, f_y, f_z).is_empty());
        if universal {
            let y = cat.dst(f_y);
            out.push(PtionCandidate {
                object: cat.object_label(y).to_string(),
                morphism: cat.name(f_y).to_string(),
                object_id: y,
                morphism_id: f_y,
            });
        }
    }
    Ok(out)
}
