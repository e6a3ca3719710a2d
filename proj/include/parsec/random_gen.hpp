#pragma once

// Seeded generators for the randomized check suites: groupoids assembled
// from a fixed list of small groups acting on few points, functors between
// them, natural isomorphisms, exact vector bundles (monomial construction)
// and natural intertwiners (vertex averaging).

#include "parsec/groupoid.hpp"
#include "parsec/rng.hpp"
#include "parsec/twovecbun.hpp"
#include "parsec/vecbun.hpp"

#include <map>
#include <string>
#include <vector>

namespace parsec {

struct GroupSpec {
    std::string name;
    GroupTable table;
};

inline const std::vector<GroupSpec>& standard_groups() {
    static const std::vector<GroupSpec> gs = [] {
        std::vector<GroupSpec> v;
        v.push_back({"Z2", GroupTable::cyclic(2)});
        v.push_back({"Z3", GroupTable::cyclic(3)});
        v.push_back({"Z4", GroupTable::cyclic(4)});
        v.push_back({"Z2xZ2", GroupTable::direct_product(GroupTable::cyclic(2), GroupTable::cyclic(2))});
        v.push_back({"S3", GroupTable::symmetric(3)});
        return v;
    }();
    return gs;
}

// cached homomorphism tables between named groups / symmetric groups
inline const std::vector<std::vector<int>>& cached_homs(const std::string& ka, const GroupTable& a,
                                                        const std::string& kb, const GroupTable& b) {
    static std::map<std::pair<std::string, std::string>, std::vector<std::vector<int>>> cache;
    auto key = std::make_pair(ka, kb);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, all_group_homs(a, b)).first;
    return it->second;
}

// Actions of a named group on n points, as act[g][s] tables.
inline std::vector<std::vector<std::vector<int>>> group_actions(const GroupSpec& g, int n_points) {
    std::vector<std::vector<int>> perms;
    GroupTable sym = GroupTable::symmetric(n_points, &perms);
    const auto& homs = cached_homs(g.name, g.table, "S" + std::to_string(n_points), sym);
    std::vector<std::vector<std::vector<int>>> out;
    for (const auto& h : homs) {
        std::vector<std::vector<int>> act(g.table.n);
        for (int e = 0; e < g.table.n; ++e) act[e] = perms[h[e]];
        out.push_back(std::move(act));
    }
    return out;
}

// A random groupoid: a disjoint union of action groupoids over the standard
// group list, at most `max_comp` components on at most 3 points each.
struct RandomGroupoid {
    Gpd g;
    std::vector<GroupSpec> comp_groups;  // the abstract group used per building block
};

inline RandomGroupoid random_groupoid(Rng& rng, int max_comp = 2, int max_points = 2) {
    int n_comp = 1 + static_cast<int>(rng.uniform(max_comp));
    RandomGroupoid out;
    Gpd acc;
    for (int c = 0; c < n_comp; ++c) {
        const auto& spec = standard_groups()[rng.uniform(standard_groups().size())];
        int pts = 1 + static_cast<int>(rng.uniform(max_points));
        auto actions = group_actions(spec, pts);
        const auto& act = actions[rng.uniform(actions.size())];
        Gpd block = action_groupoid(spec.table, pts, act);
        acc = acc ? disjoint_union(acc, block) : block;
        out.comp_groups.push_back(spec);
    }
    out.g = acc;
    return out;
}

// A random functor dom -> cod: pick a target component per domain component,
// a group homomorphism between the vertex groups, a target object per domain
// object and a random vertex twist.
inline GroupoidFunctor random_functor(const Gpd& dom, const Gpd& cod, Rng& rng) {
    auto sd = skeleton_info(*dom);
    auto sc = skeleton_info(*cod);
    GroupoidFunctor f;
    f.dom = dom;
    f.cod = cod;
    f.ob.resize(dom->n_obj);
    f.mo.resize(dom->n_mor());
    struct CompChoice {
        VertexGroup vd, vc;
        std::vector<int> hom;     // vd.table -> vc.table
        int target_comp;
    };
    std::vector<CompChoice> choice(sd.n_comp());
    for (int c = 0; c < sd.n_comp(); ++c) {
        CompChoice ch;
        ch.target_comp = static_cast<int>(rng.uniform(sc.n_comp()));
        ch.vd = vertex_group(*dom, sd, c);
        ch.vc = vertex_group(*cod, sc, ch.target_comp);
        auto homs = all_group_homs(ch.vd.table, ch.vc.table);
        ch.hom = homs[rng.uniform(homs.size())];
        choice[c] = std::move(ch);
    }
    // object images and twists q_x : f(x) -> rep(target comp)
    std::vector<int> q(dom->n_obj);
    for (int x = 0; x < dom->n_obj; ++x) {
        const auto& ch = choice[sd.comp_of[x]];
        int tc = ch.target_comp;
        std::vector<int> objs;
        for (int y = 0; y < cod->n_obj; ++y)
            if (sc.comp_of[y] == tc) objs.push_back(y);
        int ty = objs[rng.uniform(objs.size())];
        f.ob[x] = ty;
        int v = ch.vc.elems[rng.uniform(ch.vc.elems.size())];
        q[x] = cod->compose(v, sc.to_rep[ty]);  // f(x) -> rep, with a twist
    }
    for (int m = 0; m < dom->n_mor(); ++m) {
        int x = dom->src(m), y = dom->tgt(m);
        const auto& ch = choice[sd.comp_of[x]];
        int hat = framed_hat(*dom, sd, m);
        int img = ch.vc.elems[ch.hom[ch.vd.index_of(hat)]];
        f.mo[m] = cod->compose(cod->inv_of[q[y]], cod->compose(img, q[x]));
    }
    return f;
}

// Replace f by a naturally isomorphic functor via randomly chosen component
// morphisms; returns the natural isomorphism f => f'.
inline NatIso random_nat_iso(const GroupoidFunctor& f, Rng& rng) {
    NatIso n;
    n.source = f;
    GroupoidFunctor fp = f;
    n.comp.resize(f.dom->n_obj);
    for (int x = 0; x < f.dom->n_obj; ++x) {
        const auto& outm = f.cod->out[f.ob[x]];
        int m = outm[rng.uniform(outm.size())];
        n.comp[x] = m;
        fp.ob[x] = f.cod->tgt(m);
    }
    for (int m = 0; m < f.dom->n_mor(); ++m) {
        int x = f.dom->src(m), y = f.dom->tgt(m);
        fp.mo[m] = f.cod->compose(n.comp[y], f.cod->compose(f.mo[m], f.cod->inv_of[n.comp[x]]));
    }
    n.target = std::move(fp);
    return n;
}

// ---------------------------------------------------------------------------
// Random exact vector bundles via monomial representations.

// Monomial representation of an abstract group from a subgroup and a
// character chi : H -> Z_N (exponents).
inline std::vector<CMat> monomial_rep(const GroupTable& g, const std::vector<int>& sub,
                                      const std::vector<int>& chi, unsigned n_root) {
    std::vector<bool> in_sub(g.n, false);
    std::vector<int> sub_index(g.n, -1);
    for (size_t i = 0; i < sub.size(); ++i) {
        in_sub[sub[i]] = true;
        sub_index[sub[i]] = static_cast<int>(i);
    }
    // coset representatives, in ascending order
    std::vector<int> reps;
    std::vector<int> coset_of(g.n, -1);
    for (int e = 0; e < g.n; ++e) {
        if (coset_of[e] != -1) continue;
        int c = static_cast<int>(reps.size());
        reps.push_back(e);
        for (int h : sub) coset_of[g.mul(e, h)] = c;
    }
    size_t d = reps.size();
    std::vector<CMat> rho(g.n, CMat(d, d));
    for (int e = 0; e < g.n; ++e)
        for (size_t i = 0; i < d; ++i) {
            int t = g.mul(e, reps[i]);
            int j = coset_of[t];
            int h = g.mul(g.inv[reps[j]], t);  // t = reps[j] * h with h in sub
            rho[e](j, i) = Cyclo::root(n_root, chi[sub_index[h]]);
        }
    return rho;
}

inline CMat random_gauge(size_t d, Rng& rng) {
    CMat l = CMat::identity(d), u = CMat::identity(d);
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < i; ++j) {
            l(i, j) = Cyclo::from_rational(rat(rng.range(-1, 1)));
            u(j, i) = Cyclo::from_rational(rat(rng.range(-1, 1)));
        }
    return l * u;
}

// Random bundle over an arbitrary base: per component a monomial vertex
// representation of dimension <= max_dim, transported along framings with a
// random gauge per object.
inline VecBundlePtr random_vec_bundle(const Gpd& base, Rng& rng, unsigned n_root = 4, size_t max_dim = 3) {
    auto sk = skeleton_info(*base);
    VecBundle b;
    b.base = base;
    b.dim.resize(base->n_obj);
    b.mat.resize(base->n_mor());
    struct CompData {
        VertexGroup vg;
        std::vector<CMat> rho;  // per vertex element index
    };
    std::vector<CompData> comp(sk.n_comp());
    for (int c = 0; c < sk.n_comp(); ++c) {
        comp[c].vg = vertex_group(*base, sk, c);
        const auto& tab = comp[c].vg.table;
        auto subs = subgroups(tab);
        std::vector<std::vector<int>> eligible;
        for (const auto& s : subs)
            if (tab.n / static_cast<int>(s.size()) <= static_cast<int>(max_dim)) eligible.push_back(s);
        const auto& sub = eligible[rng.uniform(eligible.size())];
        // character into mu_N: a homomorphism sub-table -> Z_N
        GroupTable subtab;
        subtab.n = static_cast<int>(sub.size());
        subtab.mult.resize(subtab.n * subtab.n);
        subtab.inv.resize(subtab.n);
        std::vector<int> pos(tab.n, -1);
        for (size_t i = 0; i < sub.size(); ++i) pos[sub[i]] = static_cast<int>(i);
        for (size_t i = 0; i < sub.size(); ++i) {
            subtab.inv[i] = pos[tab.inv[sub[i]]];
            for (size_t j = 0; j < sub.size(); ++j)
                subtab.mult[i * subtab.n + j] = pos[tab.mul(sub[i], sub[j])];
        }
        auto chis = all_group_homs(subtab, GroupTable::cyclic(static_cast<int>(n_root)));
        const auto& chi = chis[rng.uniform(chis.size())];
        comp[c].rho = monomial_rep(tab, sub, chi, n_root);
    }
    std::vector<CMat> gauge(base->n_obj);
    for (int x = 0; x < base->n_obj; ++x) {
        size_t d = comp[sk.comp_of[x]].rho[0].rows();
        b.dim[x] = d;
        gauge[x] = random_gauge(d, rng);
    }
    for (int m = 0; m < base->n_mor(); ++m) {
        int x = base->src(m), y = base->tgt(m);
        int c = sk.comp_of[x];
        int hat = framed_hat(*base, sk, m);
        b.mat[m] = inverse(gauge[y]) * comp[c].rho[comp[c].vg.index_of(hat)] * gauge[x];
    }
    return std::make_shared<VecBundle>(std::move(b));
}

// ---------------------------------------------------------------------------
// Random 2-vector bundle data.

// Cocycle generators are expensive (Smith normal form); cache per shape.
inline const std::vector<std::vector<std::vector<std::vector<int>>>>& cached_cocycle_generators(
    const std::string& group_name, const GroupTable& grp, const std::vector<std::vector<int>>& action,
    unsigned n_root) {
    static std::map<std::string, std::vector<std::vector<std::vector<std::vector<int>>>>> cache;
    std::string key = group_name + "/" + std::to_string(n_root);
    for (const auto& row : action)
        for (int v : row) key += "." + std::to_string(v);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, cocycle_generators(grp, action, n_root)).first;
    return it->second;
}

inline CorePtr random_core(Rng& rng, unsigned n_root, int max_labels = 3, int max_group_order = 6) {
    std::vector<const GroupSpec*> pool;
    for (const auto& g : standard_groups())
        if (g.table.n <= max_group_order) pool.push_back(&g);
    const auto& spec = *pool[rng.uniform(pool.size())];
    int pts = 1 + static_cast<int>(rng.uniform(max_labels));
    auto actions = group_actions(spec, pts);
    const auto& act = actions[rng.uniform(actions.size())];
    const auto& gens = cached_cocycle_generators(spec.name, spec.table, act, n_root);
    int n = spec.table.n;
    std::vector<std::vector<std::vector<int>>> alpha(
        n, std::vector<std::vector<int>>(n, std::vector<int>(pts, 0)));
    for (const auto& gen : gens) {
        int coeff = static_cast<int>(rng.uniform(n_root));
        if (!coeff) continue;
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int s = 0; s < pts; ++s)
                    alpha[x][y][s] = (alpha[x][y][s] + coeff * gen[x][y][s]) % static_cast<int>(n_root);
    }
    return make_core(spec.table, act, std::move(alpha), n_root);
}

// Random bundle over an arbitrary base: per component a random core and a
// random vertex homomorphism into its group.
inline Bundle3Ptr random_bundle3(const Gpd& base, Rng& rng, unsigned n_root, int max_labels = 3,
                                 int max_group_order = 6) {
    auto sk = skeleton_info(*base);
    std::vector<CorePtr> cores;
    std::vector<std::vector<int>> vh;
    for (int c = 0; c < sk.n_comp(); ++c) {
        auto core = random_core(rng, n_root, max_labels, max_group_order);
        auto vg = vertex_group(*base, sk, c);
        auto homs = all_group_homs(vg.table, core->group);
        vh.push_back(homs[rng.uniform(homs.size())]);
        cores.push_back(std::move(core));
    }
    return make_bundle3(base, std::move(cores), std::move(vh));
}

inline CMat random_invertible(size_t d, Rng& rng, unsigned n_root) {
    CMat l = CMat::identity(d), u = CMat::identity(d), dg = CMat::identity(d);
    for (size_t i = 0; i < d; ++i) {
        dg(i, i) = Cyclo::root(n_root, rng.uniform(n_root));
        for (size_t j = 0; j < i; ++j) {
            l(i, j) = Cyclo::from_rational(rat(rng.range(-1, 1)));
            u(j, i) = Cyclo::from_rational(rat(rng.range(-1, 1)));
        }
    }
    return l * dg * u;
}

// Random parallel section: a direct sum of induced probes, gauge-conjugated.
inline ParallelSection random_section(const Bundle3Ptr& b, Rng& rng, int max_summands = 1) {
    ParallelSection s = zero_section(*b);
    for (int c = 0; c < b->sk.n_comp(); ++c) {
        int n_sum = 1 + static_cast<int>(rng.uniform(max_summands));
        for (int k = 0; k < n_sum; ++k) {
            int label = static_cast<int>(rng.uniform(b->labels_at(c)));
            ParallelSection probe = induced_probe(*b, c, label);
            s = direct_sum(*b, s, probe);
        }
    }
    std::vector<std::vector<CMat>> gauge(b->sk.n_comp());
    for (int c = 0; c < b->sk.n_comp(); ++c)
        for (size_t t = 0; t < b->labels_at(c); ++t)
            gauge[c].push_back(random_invertible(s.comp[c].x.mult[t], rng, b->n_root));
    return conjugate_section(*b, s, gauge);
}

// Random morphism of parallel sections via the averaging projector.
inline SectionMor random_section_mor(const Bundle3Ptr& b, const ParallelSection& s,
                                     const ParallelSection& sp, Rng& rng) {
    SectionMor f;
    f.blocks.resize(b->sk.n_comp());
    for (int c = 0; c < b->sk.n_comp(); ++c) {
        auto e = effective_data(*b, c);
        int ns = static_cast<int>(e.core->n_labels);
        CMat p = hom_projector(e, s.comp[c], sp.comp[c]);
        // random element of the image
        std::vector<Cyclo> seed(p.cols());
        for (auto& x : seed) x = Cyclo::from_rational(rat(rng.range(-2, 2)));
        auto img = p.apply(seed);
        f.blocks[c].resize(ns);
        size_t off = 0;
        for (int t = 0; t < ns; ++t) {
            CMat m(sp.comp[c].x.mult[t], s.comp[c].x.mult[t]);
            for (size_t a = 0; a < m.rows(); ++a)
                for (size_t bb = 0; bb < m.cols(); ++bb) m(a, bb) = img[off + a * m.cols() + bb];
            off += m.rows() * m.cols();
            f.blocks[c][t] = std::move(m);
        }
    }
    return f;
}

// Random intertwiner between bundles over a common base, produced as a
// random parallel section of the internal-hom bundle.
inline Intertwiner2 random_intertwiner3(const Bundle3Ptr& a, const Bundle3Ptr& b, Rng& rng) {
    auto homb = hom_bundle3(a, b);
    auto hs = random_section(homb, rng, 1);
    return intertwiner_from_hom_section(a, b, homb, hs);
}

// Random natural intertwiner r0*xi0 -> r1*xi1 over the common apex, by
// averaging a random seed matrix over the vertex groups.
inline std::vector<CMat> random_intertwiner(const GroupoidFunctor& r0, const GroupoidFunctor& r1,
                                            const VecBundlePtr& xi0, const VecBundlePtr& xi1, Rng& rng) {
    auto a = pullback_bundle(r0, xi0);
    auto b = pullback_bundle(r1, xi1);
    const auto& apex = *r0.dom;
    auto sk = skeleton_info(apex);
    std::vector<CMat> mu(apex.n_obj);
    for (int c = 0; c < sk.n_comp(); ++c) {
        int rep = sk.rep_of[c];
        size_t rows = b->dim[rep], cols = a->dim[rep];
        CMat seed(rows, cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) seed(i, j) = Cyclo::from_rational(rat(rng.range(-2, 2)));
        CMat avg(rows, cols);
        const auto& vg = sk.vertex[c];
        for (int k : vg) avg = avg + inverse(b->mat[k]) * seed * a->mat[k];
        avg = Cyclo(Rational(1, Int(vg.size()))) * avg;
        for (int x = 0; x < apex.n_obj; ++x) {
            if (sk.comp_of[x] != c) continue;
            int p = sk.to_rep[x];
            mu[x] = inverse(b->mat[p]) * avg * a->mat[p];
        }
    }
    return mu;
}

}  // namespace parsec
