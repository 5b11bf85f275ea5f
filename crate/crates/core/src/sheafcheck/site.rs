//! Finite truncations of the category of symbol contexts and renamings.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::contexts::{Renaming, SymbolCtx};
use crate::name::{Name, Sort};

pub type ObjId = usize;
pub type ArrowId = usize;

/// An injective, sort-preserving map between two objects of a site, given on
/// binding positions: binding `i` of `dom` goes to binding `map[i]` of `cod`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub dom: ObjId,
    pub cod: ObjId,
    pub map: Vec<usize>,
}

/// All symbol contexts over `sorts` drawn from a pool of `max_size + 1` names,
/// with every injective sort-preserving renaming between them.
///
/// Objects with at most `max_size` bindings form the *interior*. The extra
/// level of `max_size + 1` bindings is headroom: deciding whether a context
/// supports an element quantifies over renamings into contexts one binding
/// larger, and those have to exist for the answer to mean anything.
pub struct TruncatedSite {
    sorts: Vec<Sort>,
    max_size: usize,
    pool: Vec<Name>,
    /// `(pool index, sort index)` per binding, per object.
    layouts: Vec<Vec<(usize, usize)>>,
    objects: Vec<SymbolCtx>,
    /// Sort index of each binding, per object (bindings are sorted by name).
    layout: Vec<Vec<usize>>,
    arrows: Vec<Arrow>,
    identities: Vec<ArrowId>,
    outgoing: Vec<Vec<ArrowId>>,
    /// `after[f][k]` is `outgoing[cod f][k] ∘ f`.
    after: Vec<Vec<ArrowId>>,
    /// Position of each arrow within `outgoing` of its domain.
    out_pos: Vec<usize>,
    hom: HashMap<(ObjId, ObjId), Vec<ArrowId>>,
    index: HashMap<Arrow, ArrowId>,
    squares: OnceLock<Vec<PullbackSquare>>,
}

/// A commuting square `s_i ∘ f_i = s_j ∘ f_j` that is a pullback in the site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackSquare {
    pub f_i: ArrowId,
    pub f_j: ArrowId,
    pub s_i: ArrowId,
    pub s_j: ArrowId,
}

const POOL: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h"];

impl TruncatedSite {
    /// # Panics
    ///
    /// If the pool of `max_size + 1` names would exceed the built-in pool.
    pub fn new(sorts: Vec<Sort>, max_size: usize) -> TruncatedSite {
        let pool_size = max_size + 1;
        assert!(pool_size <= POOL.len(), "name pool exhausted");
        let pool: Vec<Name> = POOL[..pool_size].iter().map(|s| Name::from(*s)).collect();

        // every subset of the pool, every sort assignment
        let mut layouts = Vec::new();
        for mask in 0u32..(1 << pool_size) {
            let members: Vec<usize> = (0..pool_size).filter(|i| mask & (1 << i) != 0).collect();
            if sorts.is_empty() && !members.is_empty() {
                continue;
            }
            let combos = sorts.len().max(1).pow(members.len() as u32);
            for code in 0..combos {
                let mut c = code;
                let assignment: Vec<(usize, usize)> = members
                    .iter()
                    .map(|&m| {
                        let s = c % sorts.len().max(1);
                        c /= sorts.len().max(1);
                        (m, s)
                    })
                    .collect();
                layouts.push(assignment);
            }
        }
        layouts.sort_by_key(|l| (l.len(), l.clone()));
        Self::from_layouts(sorts, max_size, pool, layouts)
    }

    fn from_layouts(
        sorts: Vec<Sort>,
        max_size: usize,
        pool: Vec<Name>,
        layouts: Vec<Vec<(usize, usize)>>,
    ) -> TruncatedSite {
        let objects: Vec<SymbolCtx> = layouts
            .iter()
            .map(|l| {
                SymbolCtx::from_bindings(l.iter().map(|&(n, s)| (pool[n].clone(), sorts[s].clone())))
                    .expect("pool names are distinct")
            })
            .collect();
        let layout: Vec<Vec<usize>> = layouts.iter().map(|l| l.iter().map(|&(_, s)| s).collect()).collect();

        let mut arrows = Vec::new();
        let mut hom: HashMap<(ObjId, ObjId), Vec<ArrowId>> = HashMap::new();
        // arrows into the interior come first, so an interior site's arrows
        // are a prefix of the full site's
        let phases = [false, true].into_iter().flat_map(|margin| {
            let layout = &layout;
            (0..layout.len()).flat_map(move |d| {
                (0..layout.len()).filter(move |&c| (layout[c].len() > max_size) == margin).map(move |c| (d, c))
            })
        });
        for (d, c) in phases {
            let (dl, cl) = (&layout[d], &layout[c]);
            {
                let mut maps = Vec::new();
                injections(dl, cl, &mut Vec::new(), &mut maps);
                for map in maps {
                    hom.entry((d, c)).or_default().push(arrows.len());
                    arrows.push(Arrow { dom: d, cod: c, map });
                }
            }
        }
        let index: HashMap<Arrow, ArrowId> = arrows.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let identities = (0..objects.len())
            .map(|o| index[&Arrow { dom: o, cod: o, map: (0..layout[o].len()).collect() }])
            .collect();
        let mut outgoing = vec![Vec::new(); objects.len()];
        let mut out_pos = vec![0; arrows.len()];
        for (i, a) in arrows.iter().enumerate() {
            out_pos[i] = outgoing[a.dom].len();
            outgoing[a.dom].push(i);
        }
        let after = arrows
            .iter()
            .map(|f| {
                outgoing[f.cod]
                    .iter()
                    .map(|&g| {
                        let g = &arrows[g];
                        let map = f.map.iter().map(|&i| g.map[i]).collect();
                        index[&Arrow { dom: f.dom, cod: g.cod, map }]
                    })
                    .collect()
            })
            .collect();
        TruncatedSite {
            sorts,
            max_size,
            pool,
            layouts,
            objects,
            layout,
            arrows,
            identities,
            outgoing,
            after,
            out_pos,
            hom,
            index,
            squares: OnceLock::new(),
        }
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn pool(&self) -> &[Name] {
        &self.pool
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn object(&self, o: ObjId) -> &SymbolCtx {
        &self.objects[o]
    }

    pub fn size(&self, o: ObjId) -> usize {
        self.layout[o].len()
    }

    /// Whether `o` has at least one binding of headroom inside the site.
    pub fn is_interior(&self, o: ObjId) -> bool {
        self.size(o) <= self.max_size
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        0..self.objects.len()
    }

    pub fn find_object(&self, ctx: &SymbolCtx) -> Option<ObjId> {
        self.objects.iter().position(|o| o == ctx)
    }

    pub fn arrow(&self, a: ArrowId) -> &Arrow {
        &self.arrows[a]
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrowId> {
        0..self.arrows.len()
    }

    pub fn identity(&self, o: ObjId) -> ArrowId {
        self.identities[o]
    }

    pub fn is_identity(&self, a: ArrowId) -> bool {
        self.identities[self.arrows[a].dom] == a
    }

    pub fn outgoing(&self, o: ObjId) -> &[ArrowId] {
        &self.outgoing[o]
    }

    pub fn hom(&self, dom: ObjId, cod: ObjId) -> &[ArrowId] {
        self.hom.get(&(dom, cod)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `g ∘ f`, when `cod f = dom g`.
    pub fn compose(&self, g: ArrowId, f: ArrowId) -> Option<ArrowId> {
        if self.arrows[f].cod != self.arrows[g].dom {
            return None;
        }
        Some(self.after[f][self.out_pos[g]])
    }

    /// `outgoing(cod f)` zipped with the composites `g ∘ f`.
    pub fn postcompositions(&self, f: ArrowId) -> impl Iterator<Item = (ArrowId, ArrowId)> + '_ {
        let cod = self.arrows[f].cod;
        self.outgoing[cod].iter().copied().zip(self.after[f].iter().copied())
    }

    /// The inclusion of `sub` into `sup`, when `sub`'s bindings are among `sup`'s.
    pub fn inclusion(&self, sub: ObjId, sup: ObjId) -> Option<ArrowId> {
        let sup_ctx = &self.objects[sup];
        let map: Option<Vec<usize>> = self.objects[sub]
            .iter()
            .map(|(n, s)| {
                sup_ctx
                    .iter()
                    .position(|(m, t)| m == n && t == s)
            })
            .collect();
        self.index.get(&Arrow { dom: sub, cod: sup, map: map? }).copied()
    }

    pub fn renaming(&self, a: ArrowId) -> Renaming {
        let arrow = &self.arrows[a];
        let dom = &self.objects[arrow.dom];
        let cod = &self.objects[arrow.cod];
        let cod_names: Vec<&Name> = cod.names().collect();
        Renaming::new(
            dom.clone(),
            cod.clone(),
            dom.names().zip(&arrow.map).map(|(u, &j)| (u.clone(), cod_names[j].clone())),
        )
        .expect("site arrows are renamings")
    }

    /// Looks up the arrow realizing a renaming between two objects of the site.
    pub fn arrow_of(&self, rho: &Renaming) -> Option<ArrowId> {
        let dom = self.find_object(rho.dom())?;
        let cod = self.find_object(rho.cod())?;
        let cod_names: Vec<&Name> = self.objects[cod].names().collect();
        let map = self.objects[dom]
            .names()
            .map(|u| {
                let v = rho.apply(u.as_str())?;
                cod_names.iter().position(|w| *w == v)
            })
            .collect::<Option<Vec<_>>>()?;
        self.index.get(&Arrow { dom, cod, map }).copied()
    }

    /// One pullback square for every cospan `C_i → D ← C_j` of the site,
    /// found by brute force: among the commuting cones over the cospan, the
    /// one through which every other cone factors uniquely.
    pub fn pullback_squares(&self) -> &[PullbackSquare] {
        self.squares.get_or_init(|| {
            let mut incoming = vec![Vec::new(); self.objects.len()];
            for (i, a) in self.arrows.iter().enumerate() {
                incoming[a.cod].push(i);
            }
            let mut squares = Vec::new();
            for d in self.objects() {
                for &s_i in &incoming[d] {
                    for &s_j in &incoming[d] {
                        if let Some((f_i, f_j)) = self.universal_cone(s_i, s_j) {
                            squares.push(PullbackSquare { f_i, f_j, s_i, s_j });
                        }
                    }
                }
            }
            squares
        })
    }

    fn universal_cone(&self, s_i: ArrowId, s_j: ArrowId) -> Option<(ArrowId, ArrowId)> {
        let (c_i, c_j) = (self.arrows[s_i].dom, self.arrows[s_j].dom);
        let mut cones = Vec::new();
        for c in self.objects() {
            for &f_i in self.hom(c, c_i) {
                for &f_j in self.hom(c, c_j) {
                    if self.compose(s_i, f_i) == self.compose(s_j, f_j) {
                        cones.push((c, f_i, f_j));
                    }
                }
            }
        }
        // the apex of a pullback is as large as any cone's, so try those first
        let largest = cones.iter().map(|&(c, _, _)| self.size(c)).max()?;
        cones
            .iter()
            .filter(|&&(c, _, _)| self.size(c) == largest)
            .find(|&&(c, f_i, f_j)| {
                cones.iter().all(|&(c2, g_i, g_j)| {
                    self.hom(c2, c)
                        .iter()
                        .filter(|&&u| self.compose(f_i, u) == Some(g_i) && self.compose(f_j, u) == Some(g_j))
                        .count()
                        == 1
                })
            })
            .map(|&(_, f_i, f_j)| (f_i, f_j))
    }

    /// Number of bindings of each sort.
    pub fn shape(&self, o: ObjId) -> Vec<usize> {
        let mut counts = vec![0; self.sorts.len()];
        for &s in &self.layout[o] {
            counts[s] += 1;
        }
        counts
    }

    /// The canonical representative of `o`'s isomorphism class (the first
    /// `n` pool names, sorts in declaration order) and an isomorphism into it.
    pub fn canonical(&self, o: ObjId) -> (ObjId, ArrowId) {
        let shape = self.shape(o);
        let canon = self
            .objects()
            .find(|&c| self.shape(c) == shape && self.is_canonical(c))
            .expect("every shape has a canonical object");
        // position of binding i of o among o's bindings ordered by sort, then name
        let mut order: Vec<usize> = (0..self.size(o)).collect();
        order.sort_by_key(|&i| (self.layout[o][i], i));
        let mut map = vec![0; order.len()];
        let canon_order = {
            let mut v: Vec<usize> = (0..self.size(canon)).collect();
            v.sort_by_key(|&i| (self.layout[canon][i], i));
            v
        };
        for (rank, &i) in order.iter().enumerate() {
            map[i] = canon_order[rank];
        }
        (canon, self.index[&Arrow { dom: o, cod: canon, map }])
    }

    fn is_canonical(&self, o: ObjId) -> bool {
        let n = self.size(o);
        let names: Vec<&str> = self.objects[o].names().map(Name::as_str).collect();
        let expected: Vec<&str> = self.pool[..n].iter().map(Name::as_str).collect();
        if names != expected {
            return false;
        }
        self.layout[o].windows(2).all(|w| w[0] <= w[1])
    }

    /// The full subcategory on canonical objects: one object per shape.
    pub fn skeleton(&self) -> TruncatedSite {
        let layouts = self.objects().filter(|&o| self.is_canonical(o)).map(|o| self.layouts[o].clone()).collect();
        Self::from_layouts(self.sorts.clone(), self.max_size, self.pool.clone(), layouts)
    }

    /// The full subcategory on interior objects. Its objects and arrows are
    /// numbered as in `self`: ids below [`interior_arrow_count`] coincide.
    ///
    /// [`interior_arrow_count`]: TruncatedSite::interior_arrow_count
    pub fn interior(&self) -> TruncatedSite {
        let layouts = self.objects().filter(|&o| self.is_interior(o)).map(|o| self.layouts[o].clone()).collect();
        Self::from_layouts(self.sorts.clone(), self.max_size, self.pool.clone(), layouts)
    }

    pub fn interior_object_count(&self) -> usize {
        self.objects().filter(|&o| self.is_interior(o)).count()
    }

    /// Number of arrows between interior objects; these come first.
    pub fn interior_arrow_count(&self) -> usize {
        self.arrows.iter().filter(|a| self.is_interior(a.cod)).count()
    }
}

fn injections(dom: &[usize], cod: &[usize], partial: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let i = partial.len();
    if i == dom.len() {
        out.push(partial.clone());
        return;
    }
    for j in 0..cod.len() {
        if cod[j] == dom[i] && !partial.contains(&j) {
            partial.push(j);
            injections(dom, cod, partial, out);
            partial.pop();
        }
    }
}

impl fmt::Debug for TruncatedSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedSite")
            .field("sorts", &self.sorts)
            .field("max_size", &self.max_size)
            .field("objects", &self.objects.len())
            .field("arrows", &self.arrows.len())
            .finish()
    }
}
