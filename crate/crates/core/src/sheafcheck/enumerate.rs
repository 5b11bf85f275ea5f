//! Enumeration of functors on a skeletal site by constraint propagation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::site::{ArrowId, TruncatedSite};

/// Per-element action tables, `None` while unassigned.
struct Search<'a> {
    site: &'a TruncatedSite,
    fibers: Vec<usize>,
    values: Vec<Vec<Option<u32>>>,
    trail: Vec<(ArrowId, usize)>,
    /// `(h, a∘h)` for every `h` into `dom a`.
    pre: Vec<Vec<(ArrowId, ArrowId)>>,
    /// `(h, g)` with `g∘h = a`.
    factor: Vec<Vec<(ArrowId, ArrowId)>>,
    /// Unassigned slots in search order.
    order: Vec<(ArrowId, usize)>,
}

/// Shared by all searches on one site.
pub(crate) struct Tables {
    pre: Vec<Vec<(ArrowId, ArrowId)>>,
    factor: Vec<Vec<(ArrowId, ArrowId)>>,
}

impl Tables {
    pub(crate) fn new(site: &TruncatedSite) -> Tables {
        let mut pre = vec![Vec::new(); site.arrow_count()];
        let mut factor = vec![Vec::new(); site.arrow_count()];
        for h in site.arrows() {
            for (g, gh) in site.postcompositions(h) {
                pre[g].push((h, gh));
                factor[gh].push((h, g));
            }
        }
        Tables { pre, factor }
    }
}

impl<'a> Search<'a> {
    fn new(site: &'a TruncatedSite, tables: &Tables, fibers: Vec<usize>) -> Option<Search<'a>> {
        let mut values: Vec<Vec<Option<u32>>> =
            site.arrows().map(|a| vec![None; fibers[site.arrow(a).dom]]).collect();
        for a in site.arrows() {
            if fibers[site.arrow(a).dom] > 0 && fibers[site.arrow(a).cod] == 0 {
                return None;
            }
        }
        let mut order = Vec::new();
        for a in site.arrows() {
            for m in 0..fibers[site.arrow(a).dom] {
                if site.is_identity(a) {
                    values[a][m] = Some(m as u32);
                } else {
                    order.push((a, m));
                }
            }
        }
        Some(Search {
            site,
            fibers,
            values,
            trail: Vec::new(),
            pre: tables.pre.clone(),
            factor: tables.factor.clone(),
            order,
        })
    }

    fn get(&self, a: ArrowId, m: usize) -> Option<usize> {
        self.values[a][m].map(|v| v as usize)
    }

    /// Assigns and propagates; false on conflict. Assignments are recorded
    /// on the trail either way.
    fn assign(&mut self, a: ArrowId, m: usize, v: usize) -> bool {
        let mut queue = vec![(a, m, v)];
        while let Some((a, m, v)) = queue.pop() {
            match self.get(a, m) {
                Some(w) if w == v => continue,
                Some(_) => return false,
                None => {}
            }
            self.values[a][m] = Some(v as u32);
            self.trail.push((a, m));
            // a first: X(g∘a)(m) = X(g)(v)
            for (g, ga) in self.site.postcompositions(a) {
                match (self.get(g, v), self.get(ga, m)) {
                    (Some(x), _) => queue.push((ga, m, x)),
                    (None, Some(y)) => queue.push((g, v, y)),
                    (None, None) => {}
                }
            }
            // a second: X(a∘h)(m') = v whenever X(h)(m') = m
            for i in 0..self.pre[a].len() {
                let (h, ah) = self.pre[a][i];
                for mp in 0..self.fibers[self.site.arrow(h).dom] {
                    if self.get(h, mp) == Some(m) {
                        queue.push((ah, mp, v));
                    }
                }
            }
            // a as a composite g∘h: X(g)(X(h)(m)) = v
            for i in 0..self.factor[a].len() {
                let (h, g) = self.factor[a][i];
                if let Some(w) = self.get(h, m) {
                    queue.push((g, w, v));
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (a, m) = self.trail.pop().unwrap();
            self.values[a][m] = None;
        }
    }

    fn next_slot(&self, from: usize) -> Option<usize> {
        (from..self.order.len()).find(|&i| {
            let (a, m) = self.order[i];
            self.values[a][m].is_none()
        })
    }

    fn solution(&self) -> Vec<Vec<u32>> {
        self.values.iter().map(|row| row.iter().map(|v| v.unwrap()).collect()).collect()
    }

    /// Depth-first search; `visit` returns false to stop.
    fn run(&mut self, from: usize, rng: Option<&mut ChaCha8Rng>, visit: &mut dyn FnMut(Vec<Vec<u32>>) -> bool) -> bool {
        let Some(i) = self.next_slot(from) else {
            return visit(self.solution());
        };
        let (a, m) = self.order[i];
        let mut choices: Vec<usize> = (0..self.fibers[self.site.arrow(a).cod]).collect();
        let mut rng = rng;
        if let Some(r) = rng.as_deref_mut() {
            choices.shuffle(r);
        }
        for v in choices {
            let mark = self.trail.len();
            let ok = self.assign(a, m, v);
            let keep_going = !ok || self.run(i + 1, rng.as_deref_mut(), visit);
            self.undo(mark);
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Calls `visit` with the action tables of every functor on `site` whose
/// fibers are exactly `fibers`. Stops early when `visit` returns false;
/// returns false in that case.
pub(crate) fn functors_with_fibers(
    site: &TruncatedSite,
    tables: &Tables,
    fibers: &[usize],
    visit: &mut dyn FnMut(Vec<Vec<u32>>) -> bool,
) -> bool {
    match Search::new(site, tables, fibers.to_vec()) {
        Some(mut s) => s.run(0, None, visit),
        None => true,
    }
}

/// Every fiber-size vector with entries in `0..=max_fiber`.
pub(crate) fn fiber_vectors(objects: usize, max_fiber: usize) -> impl Iterator<Item = Vec<usize>> {
    let base = max_fiber + 1;
    let total = base.checked_pow(objects as u32).expect("too many fiber vectors");
    (0..total).map(move |mut code| {
        (0..objects)
            .map(|_| {
                let d = code % base;
                code /= base;
                d
            })
            .collect()
    })
}

/// A random functor with fibers in `1..=max_fiber`, or `None` if the
/// randomly chosen fibers admit none.
pub(crate) fn random_functor(
    site: &TruncatedSite,
    tables: &Tables,
    max_fiber: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(Vec<usize>, Vec<Vec<u32>>)> {
    let fibers: Vec<usize> = site.objects().map(|_| rng.gen_range(1..=max_fiber)).collect();
    let mut search = Search::new(site, tables, fibers.clone())?;
    search.order.shuffle(rng);
    let mut found = None;
    let mut child = ChaCha8Rng::seed_from_u64(rng.gen());
    search.run(0, Some(&mut child), &mut |sol| {
        found = Some(sol);
        false
    });
    found.map(|sol| (fibers, sol))
}
