#pragma once

// Essentially finite groupoids as explicit object/morphism tables, together
// with functors, natural isomorphisms, skeleta, homotopy fibers and homotopy
// pullbacks.  Everything is deterministic: objects and morphisms are dense
// integer ids and all derived structures enumerate in ascending id order.

#include "parsec/scalar.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

namespace parsec {

// ---------------------------------------------------------------------------
// Abstract finite groups (multiplication tables, identity at index 0).

struct GroupTable {
    int n = 1;
    std::vector<int> mult;  // n*n, mult[i*n+j] = i*j  ("i after j")
    std::vector<int> inv;

    int mul(int i, int j) const { return mult[i * n + j]; }
    int inverse(int i) const { return inv[i]; }

    static GroupTable trivial() {
        GroupTable g;
        g.n = 1;
        g.mult = {0};
        g.inv = {0};
        return g;
    }
    static GroupTable cyclic(int k) {
        GroupTable g;
        g.n = k;
        g.mult.resize(k * k);
        g.inv.resize(k);
        for (int i = 0; i < k; ++i) {
            g.inv[i] = (k - i) % k;
            for (int j = 0; j < k; ++j) g.mult[i * k + j] = (i + j) % k;
        }
        return g;
    }
    static GroupTable direct_product(const GroupTable& a, const GroupTable& b) {
        GroupTable g;
        g.n = a.n * b.n;
        g.mult.resize(g.n * g.n);
        g.inv.resize(g.n);
        for (int i = 0; i < g.n; ++i) {
            int ia = i / b.n, ib = i % b.n;
            g.inv[i] = a.inv[ia] * b.n + b.inv[ib];
            for (int j = 0; j < g.n; ++j) {
                int ja = j / b.n, jb = j % b.n;
                g.mult[i * g.n + j] = a.mul(ia, ja) * b.n + b.mul(ib, jb);
            }
        }
        return g;
    }
    // Symmetric group on k letters; elements are permutations in lexicographic
    // one-line order, composition (p*q)(x) = p(q(x)).
    static GroupTable symmetric(int k, std::vector<std::vector<int>>* perms_out = nullptr) {
        std::vector<int> base(k);
        for (int i = 0; i < k; ++i) base[i] = i;
        std::vector<std::vector<int>> perms;
        std::vector<int> p = base;
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        GroupTable g;
        g.n = static_cast<int>(perms.size());
        g.mult.resize(g.n * g.n);
        g.inv.resize(g.n);
        auto index_of = [&](const std::vector<int>& q) {
            return static_cast<int>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
        };
        for (int i = 0; i < g.n; ++i) {
            std::vector<int> ip(k);
            for (int x = 0; x < k; ++x) ip[perms[i][x]] = x;
            g.inv[i] = index_of(ip);
            for (int j = 0; j < g.n; ++j) {
                std::vector<int> r(k);
                for (int x = 0; x < k; ++x) r[x] = perms[i][perms[j][x]];
                g.mult[i * g.n + j] = index_of(r);
            }
        }
        if (perms_out) *perms_out = perms;
        return g;
    }

    std::vector<int> conjugacy_class_of(int h) const {
        std::vector<bool> seen(n, false);
        std::vector<int> cls;
        for (int c = 0; c < n; ++c) {
            int x = mul(mul(c, h), inv[c]);
            if (!seen[x]) {
                seen[x] = true;
                cls.push_back(x);
            }
        }
        std::sort(cls.begin(), cls.end());
        return cls;
    }
    std::vector<std::vector<int>> conjugacy_classes() const {
        std::vector<bool> done(n, false);
        std::vector<std::vector<int>> out;
        for (int h = 0; h < n; ++h) {
            if (done[h]) continue;
            auto cls = conjugacy_class_of(h);
            for (int x : cls) done[x] = true;
            out.push_back(std::move(cls));
        }
        return out;
    }
    std::vector<int> centralizer(int h) const {
        std::vector<int> out;
        for (int c = 0; c < n; ++c)
            if (mul(c, h) == mul(h, c)) out.push_back(c);
        return out;
    }
};

// All group homomorphisms A -> B by exhaustive search (desk scale).
inline std::vector<std::vector<int>> all_group_homs(const GroupTable& a, const GroupTable& b) {
    std::vector<std::vector<int>> homs;
    std::vector<int> f(a.n, 0);
    while (true) {
        bool ok = true;
        for (int x = 0; x < a.n && ok; ++x)
            for (int y = 0; y < a.n && ok; ++y) ok = f[a.mul(x, y)] == b.mul(f[x], f[y]);
        if (ok) homs.push_back(f);
        int i = 1;
        while (i < a.n) {
            if (++f[i] < b.n) break;
            f[i] = 0;
            ++i;
        }
        if (i >= a.n) break;
    }
    return homs;
}

inline std::vector<std::vector<int>> subgroups(const GroupTable& g) {
    std::vector<std::vector<int>> out;
    int m = g.n - 1;
    for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<int> elems{0};
        for (int i = 0; i < m; ++i)
            if (mask & (1 << i)) elems.push_back(i + 1);
        bool closed = true;
        std::vector<bool> in(g.n, false);
        for (int e : elems) in[e] = true;
        for (int x : elems)
            for (int y : elems)
                if (!in[g.mul(x, y)]) {
                    closed = false;
                    break;
                }
        if (closed) out.push_back(elems);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite groupoids.

struct FiniteGroupoid {
    struct Mor {
        int src, tgt;
    };
    int n_obj = 0;
    std::vector<Mor> mor;
    std::vector<int> id_of;   // object -> identity morphism
    std::vector<int> inv_of;  // morphism -> inverse
    std::unordered_map<uint64_t, int> comp;  // key(a,b) -> a∘b  (src(a)==tgt(b))
    std::vector<std::vector<int>> out;       // object -> morphisms with this src
    std::vector<std::vector<int>> in;        // object -> morphisms with this tgt

    uint64_t key(int a, int b) const { return static_cast<uint64_t>(a) * mor.size() + b; }
    int compose(int a, int b) const {  // a∘b
        auto it = comp.find(key(a, b));
        if (it == comp.end()) throw std::invalid_argument("compose: morphisms not composable");
        return it->second;
    }
    bool composable(int a, int b) const { return mor[a].src == mor[b].tgt; }
    int src(int g) const { return mor[g].src; }
    int tgt(int g) const { return mor[g].tgt; }
    int n_mor() const { return static_cast<int>(mor.size()); }

    void build_index() {
        out.assign(n_obj, {});
        in.assign(n_obj, {});
        for (int g = 0; g < n_mor(); ++g) {
            out[mor[g].src].push_back(g);
            in[mor[g].tgt].push_back(g);
        }
    }
    std::vector<int> hom(int x, int y) const {
        std::vector<int> h;
        for (int g : out[x])
            if (mor[g].tgt == y) h.push_back(g);
        return h;
    }
    std::vector<int> aut(int x) const { return hom(x, x); }
};

using Gpd = std::shared_ptr<const FiniteGroupoid>;

// ---------------------------------------------------------------------------
// Validation.

struct ValidationReport {
    bool ok = true;
    std::string message;
    static ValidationReport pass() { return {}; }
    static ValidationReport fail(std::string m) { return {false, std::move(m)}; }
};

inline ValidationReport validate(const FiniteGroupoid& g) {
    if (static_cast<int>(g.id_of.size()) != g.n_obj) return ValidationReport::fail("identity table size mismatch");
    if (g.inv_of.size() != g.mor.size()) return ValidationReport::fail("inverse table size mismatch");
    for (int x = 0; x < g.n_obj; ++x) {
        int e = g.id_of[x];
        if (e < 0 || e >= g.n_mor() || g.src(e) != x || g.tgt(e) != x)
            return ValidationReport::fail("identity endpoints wrong at object " + std::to_string(x));
    }
    for (int m = 0; m < g.n_mor(); ++m) {
        if (g.src(m) < 0 || g.src(m) >= g.n_obj || g.tgt(m) < 0 || g.tgt(m) >= g.n_obj)
            return ValidationReport::fail("morphism endpoints out of range");
        int i = g.inv_of[m];
        if (g.src(i) != g.tgt(m) || g.tgt(i) != g.src(m))
            return ValidationReport::fail("inverse endpoints wrong at morphism " + std::to_string(m));
    }
    // composition table total on composable pairs, with correct endpoints
    for (int a = 0; a < g.n_mor(); ++a)
        for (int b : g.in[g.src(a)]) {
            auto it = g.comp.find(g.key(a, b));
            if (it == g.comp.end())
                return ValidationReport::fail("missing composite " + std::to_string(a) + "∘" + std::to_string(b));
            int c = it->second;
            if (g.src(c) != g.src(b) || g.tgt(c) != g.tgt(a))
                return ValidationReport::fail("composite endpoints wrong");
        }
    if (g.comp.size() != [&] {
            size_t n = 0;
            for (int a = 0; a < g.n_mor(); ++a) n += g.in[g.src(a)].size();
            return n;
        }())
        return ValidationReport::fail("composition table has extraneous entries");
    // identity laws and inverses
    for (int m = 0; m < g.n_mor(); ++m) {
        if (g.compose(m, g.id_of[g.src(m)]) != m || g.compose(g.id_of[g.tgt(m)], m) != m)
            return ValidationReport::fail("identity law fails at morphism " + std::to_string(m));
        if (g.compose(g.inv_of[m], m) != g.id_of[g.src(m)] || g.compose(m, g.inv_of[m]) != g.id_of[g.tgt(m)])
            return ValidationReport::fail("associativity/inverse violation at morphism " + std::to_string(m));
    }
    // associativity on all composable triples
    for (int h = 0; h < g.n_mor(); ++h)
        for (int m : g.out[g.tgt(h)])
            for (int f : g.out[g.tgt(m)])
                if (g.compose(g.compose(f, m), h) != g.compose(f, g.compose(m, h)))
                    return ValidationReport::fail("associativity/inverse violation (triple)");
    return ValidationReport::pass();
}

// ---------------------------------------------------------------------------
// Builders.

class GroupoidBuilder {
public:
    explicit GroupoidBuilder(int n_obj) { g_.n_obj = n_obj; }
    int add_mor(int src, int tgt) {
        g_.mor.push_back({src, tgt});
        return g_.n_mor() - 1;
    }
    void set_identities(std::vector<int> ids) { g_.id_of = std::move(ids); }
    void set_inverses(std::vector<int> inv) { g_.inv_of = std::move(inv); }
    void set_compose(int a, int b, int c) { g_.comp[g_.key(a, b)] = c; }
    Gpd finish() {
        g_.build_index();
        return std::make_shared<FiniteGroupoid>(std::move(g_));
    }

private:
    FiniteGroupoid g_;
};

inline Gpd terminal_groupoid() {
    GroupoidBuilder b(1);
    b.add_mor(0, 0);
    b.set_identities({0});
    b.set_inverses({0});
    b.set_compose(0, 0, 0);
    return b.finish();
}

// Action groupoid S//G for a right-to-left action given by permutations:
// act[g][s] is g.s.  Objects are the points of S, morphism (s,g): s -> g.s.
inline Gpd action_groupoid(const GroupTable& grp, int n_points, const std::vector<std::vector<int>>& act) {
    GroupoidBuilder b(n_points);
    auto mid = [&](int s, int g) { return s * grp.n + g; };
    std::vector<int> ids(n_points), invs(n_points * grp.n);
    for (int s = 0; s < n_points; ++s)
        for (int g = 0; g < grp.n; ++g) b.add_mor(s, act[g][s]);
    for (int s = 0; s < n_points; ++s) ids[s] = mid(s, 0);
    for (int s = 0; s < n_points; ++s)
        for (int g = 0; g < grp.n; ++g) invs[mid(s, g)] = mid(act[g][s], grp.inv[g]);
    for (int s = 0; s < n_points; ++s)
        for (int g = 0; g < grp.n; ++g)
            for (int h = 0; h < grp.n; ++h)
                b.set_compose(mid(act[g][s], h), mid(s, g), mid(s, grp.mul(h, g)));
    b.set_identities(std::move(ids));
    b.set_inverses(std::move(invs));
    return b.finish();
}

inline Gpd group_groupoid(const GroupTable& grp) {
    std::vector<std::vector<int>> act(grp.n, std::vector<int>{0});
    return action_groupoid(grp, 1, act);
}

inline Gpd disjoint_union(const Gpd& a, const Gpd& b) {
    GroupoidBuilder bu(a->n_obj + b->n_obj);
    for (const auto& m : a->mor) bu.add_mor(m.src, m.tgt);
    for (const auto& m : b->mor) bu.add_mor(m.src + a->n_obj, m.tgt + a->n_obj);
    std::vector<int> ids(a->n_obj + b->n_obj), invs(a->n_mor() + b->n_mor());
    for (int x = 0; x < a->n_obj; ++x) ids[x] = a->id_of[x];
    for (int x = 0; x < b->n_obj; ++x) ids[a->n_obj + x] = b->id_of[x] + a->n_mor();
    for (int m = 0; m < a->n_mor(); ++m) invs[m] = a->inv_of[m];
    for (int m = 0; m < b->n_mor(); ++m) invs[a->n_mor() + m] = b->inv_of[m] + a->n_mor();
    for (const auto& [k, c] : a->comp) {
        int x = static_cast<int>(k / a->mor.size()), y = static_cast<int>(k % a->mor.size());
        bu.set_compose(x, y, c);
    }
    for (const auto& [k, c] : b->comp) {
        int x = static_cast<int>(k / b->mor.size()), y = static_cast<int>(k % b->mor.size());
        bu.set_compose(x + a->n_mor(), y + a->n_mor(), c + a->n_mor());
    }
    bu.set_identities(std::move(ids));
    bu.set_inverses(std::move(invs));
    return bu.finish();
}

inline Gpd product_groupoid(const Gpd& a, const Gpd& b) {
    GroupoidBuilder bu(a->n_obj * b->n_obj);
    auto mid = [&](int m1, int m2) { return m1 * b->n_mor() + m2; };
    for (int m1 = 0; m1 < a->n_mor(); ++m1)
        for (int m2 = 0; m2 < b->n_mor(); ++m2)
            bu.add_mor(a->src(m1) * b->n_obj + b->src(m2), a->tgt(m1) * b->n_obj + b->tgt(m2));
    std::vector<int> ids(a->n_obj * b->n_obj), invs(a->n_mor() * b->n_mor());
    for (int x = 0; x < a->n_obj; ++x)
        for (int y = 0; y < b->n_obj; ++y) ids[x * b->n_obj + y] = mid(a->id_of[x], b->id_of[y]);
    for (int m1 = 0; m1 < a->n_mor(); ++m1)
        for (int m2 = 0; m2 < b->n_mor(); ++m2) invs[mid(m1, m2)] = mid(a->inv_of[m1], b->inv_of[m2]);
    for (const auto& [k1, c1] : a->comp) {
        int x1 = static_cast<int>(k1 / a->mor.size()), y1 = static_cast<int>(k1 % a->mor.size());
        for (const auto& [k2, c2] : b->comp) {
            int x2 = static_cast<int>(k2 / b->mor.size()), y2 = static_cast<int>(k2 % b->mor.size());
            bu.set_compose(mid(x1, x2), mid(y1, y2), mid(c1, c2));
        }
    }
    bu.set_identities(std::move(ids));
    bu.set_inverses(std::move(invs));
    return bu.finish();
}

// ---------------------------------------------------------------------------
// Functors and natural isomorphisms.

struct GroupoidFunctor {
    Gpd dom, cod;
    std::vector<int> ob;  // object map
    std::vector<int> mo;  // morphism map

    int operator()(int x) const { return ob[x]; }
    int on_mor(int m) const { return mo[m]; }
};

inline GroupoidFunctor identity_functor(const Gpd& g) {
    GroupoidFunctor f;
    f.dom = f.cod = g;
    f.ob.resize(g->n_obj);
    f.mo.resize(g->n_mor());
    for (int x = 0; x < g->n_obj; ++x) f.ob[x] = x;
    for (int m = 0; m < g->n_mor(); ++m) f.mo[m] = m;
    return f;
}

inline GroupoidFunctor compose_functors(const GroupoidFunctor& g, const GroupoidFunctor& f) {  // g∘f
    assert(f.cod.get() == g.dom.get());
    GroupoidFunctor h;
    h.dom = f.dom;
    h.cod = g.cod;
    h.ob.resize(f.ob.size());
    h.mo.resize(f.mo.size());
    for (size_t x = 0; x < f.ob.size(); ++x) h.ob[x] = g.ob[f.ob[x]];
    for (size_t m = 0; m < f.mo.size(); ++m) h.mo[m] = g.mo[f.mo[m]];
    return h;
}

inline GroupoidFunctor terminal_functor(const Gpd& g, const Gpd& star) {
    GroupoidFunctor f;
    f.dom = g;
    f.cod = star;
    f.ob.assign(g->n_obj, 0);
    f.mo.assign(g->n_mor(), 0);
    return f;
}

inline ValidationReport validate_functor(const GroupoidFunctor& f) {
    const auto& d = *f.dom;
    const auto& c = *f.cod;
    if (static_cast<int>(f.ob.size()) != d.n_obj || static_cast<int>(f.mo.size()) != d.n_mor())
        return ValidationReport::fail("functor table size mismatch");
    for (int m = 0; m < d.n_mor(); ++m)
        if (c.src(f.mo[m]) != f.ob[d.src(m)] || c.tgt(f.mo[m]) != f.ob[d.tgt(m)])
            return ValidationReport::fail("functor breaks src/tgt");
    for (int x = 0; x < d.n_obj; ++x)
        if (f.mo[d.id_of[x]] != c.id_of[f.ob[x]]) return ValidationReport::fail("functor breaks identities");
    for (int b = 0; b < d.n_mor(); ++b)
        for (int a : d.out[d.tgt(b)])
            if (f.mo[d.compose(a, b)] != c.compose(f.mo[a], f.mo[b]))
                return ValidationReport::fail("functor breaks composition");
    return ValidationReport::pass();
}

struct NatIso {
    GroupoidFunctor source, target;
    std::vector<int> comp;  // object of dom -> morphism source(x) -> target(x) in cod

    int at(int x) const { return comp[x]; }
};

inline ValidationReport validate_nat_iso(const NatIso& n) {
    const auto& d = *n.source.dom;
    const auto& c = *n.source.cod;
    if (n.source.dom.get() != n.target.dom.get() || n.source.cod.get() != n.target.cod.get())
        return ValidationReport::fail("natural isomorphism endpoints mismatch");
    for (int x = 0; x < d.n_obj; ++x)
        if (c.src(n.comp[x]) != n.source.ob[x] || c.tgt(n.comp[x]) != n.target.ob[x])
            return ValidationReport::fail("component endpoints wrong");
    for (int m = 0; m < d.n_mor(); ++m)
        if (c.compose(n.comp[d.tgt(m)], n.source.mo[m]) != c.compose(n.target.mo[m], n.comp[d.src(m)]))
            return ValidationReport::fail("naturality square fails");
    return ValidationReport::pass();
}

inline NatIso identity_nat_iso(const GroupoidFunctor& f) {
    NatIso n;
    n.source = n.target = f;
    n.comp.resize(f.dom->n_obj);
    for (int x = 0; x < f.dom->n_obj; ++x) n.comp[x] = f.cod->id_of[f.ob[x]];
    return n;
}

inline NatIso inverse_nat_iso(const NatIso& n) {
    NatIso r;
    r.source = n.target;
    r.target = n.source;
    r.comp.resize(n.comp.size());
    for (size_t x = 0; x < n.comp.size(); ++x) r.comp[x] = n.source.cod->inv_of[n.comp[x]];
    return r;
}

inline NatIso vcompose_nat_iso(const NatIso& b, const NatIso& a) {  // b • a : a.source => b.target
    NatIso r;
    r.source = a.source;
    r.target = b.target;
    r.comp.resize(a.comp.size());
    for (size_t x = 0; x < a.comp.size(); ++x) r.comp[x] = a.source.cod->compose(b.comp[x], a.comp[x]);
    return r;
}

inline NatIso whisker_left(const GroupoidFunctor& g, const NatIso& n) {  // g ⋆ n : g∘src => g∘tgt
    NatIso r;
    r.source = compose_functors(g, n.source);
    r.target = compose_functors(g, n.target);
    r.comp.resize(n.comp.size());
    for (size_t x = 0; x < n.comp.size(); ++x) r.comp[x] = g.mo[n.comp[x]];
    return r;
}

inline NatIso whisker_right(const NatIso& n, const GroupoidFunctor& f) {  // n ⋆ f : src∘f => tgt∘f
    NatIso r;
    r.source = compose_functors(n.source, f);
    r.target = compose_functors(n.target, f);
    r.comp.resize(f.dom->n_obj);
    for (int x = 0; x < f.dom->n_obj; ++x) r.comp[x] = n.comp[f.ob[x]];
    return r;
}

// ---------------------------------------------------------------------------
// Components, skeleton, framings.

struct SkeletonInfo {
    std::vector<int> comp_of;             // object -> component
    std::vector<int> rep_of;              // component -> minimal-id representative
    std::vector<int> to_rep;              // object -> morphism x -> rep
    std::vector<std::vector<int>> vertex; // component -> morphisms of Aut(rep), ascending

    int n_comp() const { return static_cast<int>(rep_of.size()); }
};

inline SkeletonInfo skeleton_info(const FiniteGroupoid& g) {
    SkeletonInfo s;
    s.comp_of.assign(g.n_obj, -1);
    s.to_rep.assign(g.n_obj, -1);
    for (int start = 0; start < g.n_obj; ++start) {
        if (s.comp_of[start] != -1) continue;
        int c = s.n_comp();
        s.rep_of.push_back(start);
        s.comp_of[start] = c;
        s.to_rep[start] = g.id_of[start];
        std::queue<int> q;
        q.push(start);
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            for (int m : g.out[x]) {
                int y = g.tgt(m);
                if (s.comp_of[y] != -1) continue;
                s.comp_of[y] = c;
                s.to_rep[y] = g.compose(s.to_rep[x], g.inv_of[m]);  // y -> x -> rep
                q.push(y);
            }
            for (int m : g.in[x]) {
                int y = g.src(m);
                if (s.comp_of[y] != -1) continue;
                s.comp_of[y] = c;
                s.to_rep[y] = g.compose(s.to_rep[x], m);  // y -> x -> rep
                q.push(y);
            }
        }
    }
    s.vertex.resize(s.n_comp());
    for (int c = 0; c < s.n_comp(); ++c) s.vertex[c] = g.aut(s.rep_of[c]);
    return s;
}

// hat(g : x -> y) = p_y ∘ g ∘ p_x^{-1} ∈ Aut(rep)
inline int framed_hat(const FiniteGroupoid& g, const SkeletonInfo& s, int m) {
    return g.compose(g.compose(s.to_rep[g.tgt(m)], m), g.inv_of[s.to_rep[g.src(m)]]);
}

// Vertex group of a component as an abstract table; elems lists the morphism
// ids in ascending order, elems[0] is the identity after the swap below.
struct VertexGroup {
    std::vector<int> elems;  // morphism ids
    GroupTable table;
    std::unordered_map<int, int> pos;

    int index_of(int m) const { return pos.at(m); }
};

inline VertexGroup vertex_group(const FiniteGroupoid& g, const SkeletonInfo& s, int comp) {
    VertexGroup v;
    v.elems = s.vertex[comp];
    int rep = s.rep_of[comp];
    int e = g.id_of[rep];
    auto it = std::find(v.elems.begin(), v.elems.end(), e);
    std::iter_swap(v.elems.begin(), it);  // identity first
    for (size_t i = 0; i < v.elems.size(); ++i) v.pos[v.elems[i]] = static_cast<int>(i);
    int n = static_cast<int>(v.elems.size());
    v.table.n = n;
    v.table.mult.resize(n * n);
    v.table.inv.resize(n);
    for (int i = 0; i < n; ++i) {
        v.table.inv[i] = v.pos.at(g.inv_of[v.elems[i]]);
        for (int j = 0; j < n; ++j) v.table.mult[i * n + j] = v.pos.at(g.compose(v.elems[i], v.elems[j]));
    }
    return v;
}

struct Pi0Class {
    int representative;
    std::vector<int> members;
    size_t aut_order;
};

inline std::vector<Pi0Class> pi0(const FiniteGroupoid& g) {
    auto s = skeleton_info(g);
    std::vector<Pi0Class> classes(s.n_comp());
    for (int c = 0; c < s.n_comp(); ++c) {
        classes[c].representative = s.rep_of[c];
        classes[c].aut_order = s.vertex[c].size();
    }
    for (int x = 0; x < g.n_obj; ++x) classes[s.comp_of[x]].members.push_back(x);
    return classes;
}

inline Gpd automorphism_group(const Gpd& g, int x) {
    if (x < 0 || x >= g->n_obj) throw std::invalid_argument("automorphism_group: unknown object id");
    auto auts = g->aut(x);
    int n = static_cast<int>(auts.size());
    std::unordered_map<int, int> pos;
    for (int i = 0; i < n; ++i) pos[auts[i]] = i;
    GroupoidBuilder b(1);
    for (int i = 0; i < n; ++i) b.add_mor(0, 0);
    std::vector<int> inv(n);
    for (int i = 0; i < n; ++i) inv[i] = pos.at(g->inv_of[auts[i]]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b.set_compose(i, j, pos.at(g->compose(auts[i], auts[j])));
    b.set_identities({pos.at(g->id_of[x])});
    b.set_inverses(std::move(inv));
    return b.finish();
}

inline Rational groupoid_cardinality(const FiniteGroupoid& g) {
    Rational c(0);
    for (const auto& cls : pi0(g)) c += Rational(1, Int(cls.aut_order));
    return c;
}

struct SkeletonData {
    Gpd skel;
    GroupoidFunctor inclusion;   // skel -> G
    GroupoidFunctor retraction;  // G -> skel
    NatIso incl_retr_to_id;      // inclusion∘retraction => id_G
    NatIso id_to_retr_incl;      // identity (retraction∘inclusion == id_skel)
};

inline SkeletonData skeleton(const Gpd& g) {
    auto s = skeleton_info(*g);
    int k = s.n_comp();
    GroupoidBuilder b(k);
    std::vector<int> ids(k);
    std::vector<int> inv;
    std::vector<std::pair<int, int>> back;  // skeleton morphism -> (comp, groupoid morphism id)
    std::vector<std::unordered_map<int, int>> fwd(k);
    for (int c = 0; c < k; ++c)
        for (int m : s.vertex[c]) {
            int nm = b.add_mor(c, c);
            back.emplace_back(c, m);
            fwd[c][m] = nm;
        }
    inv.resize(back.size());
    for (size_t nm = 0; nm < back.size(); ++nm) {
        auto [c, m] = back[nm];
        inv[nm] = fwd[c].at(g->inv_of[m]);
        if (m == g->id_of[s.rep_of[c]]) ids[c] = static_cast<int>(nm);
    }
    for (size_t a = 0; a < back.size(); ++a)
        for (size_t bb = 0; bb < back.size(); ++bb) {
            if (back[a].first != back[bb].first) continue;
            b.set_compose(static_cast<int>(a), static_cast<int>(bb),
                          fwd[back[a].first].at(g->compose(back[a].second, back[bb].second)));
        }
    b.set_identities(std::move(ids));
    b.set_inverses(std::move(inv));
    SkeletonData d;
    d.skel = b.finish();

    d.inclusion.dom = d.skel;
    d.inclusion.cod = g;
    d.inclusion.ob.resize(k);
    d.inclusion.mo.resize(back.size());
    for (int c = 0; c < k; ++c) d.inclusion.ob[c] = s.rep_of[c];
    for (size_t nm = 0; nm < back.size(); ++nm) d.inclusion.mo[nm] = back[nm].second;

    d.retraction.dom = g;
    d.retraction.cod = d.skel;
    d.retraction.ob.resize(g->n_obj);
    d.retraction.mo.resize(g->n_mor());
    for (int x = 0; x < g->n_obj; ++x) d.retraction.ob[x] = s.comp_of[x];
    for (int m = 0; m < g->n_mor(); ++m)
        d.retraction.mo[m] = fwd[s.comp_of[g->src(m)]].at(framed_hat(*g, s, m));

    d.incl_retr_to_id.source = compose_functors(d.inclusion, d.retraction);
    d.incl_retr_to_id.target = identity_functor(g);
    d.incl_retr_to_id.comp.resize(g->n_obj);
    for (int x = 0; x < g->n_obj; ++x) d.incl_retr_to_id.comp[x] = g->inv_of[s.to_rep[x]];

    d.id_to_retr_incl = identity_nat_iso(identity_functor(d.skel));
    return d;
}

// ---------------------------------------------------------------------------
// Homotopy fibers and homotopy pullbacks.

struct HomotopyFiber {
    Gpd fib;
    std::vector<std::pair<int, int>> objs;  // (x, g : φ(x) -> y)
    std::vector<int> mor_wit;               // fiber morphism -> underlying domain morphism
    GroupoidFunctor proj;                   // fib -> dom(φ)
    std::unordered_map<uint64_t, int> obj_index;  // key x * n_mor + g

    int find_obj(int x, int g) const { return obj_index.at(static_cast<uint64_t>(x) * stride + g); }
    uint64_t stride = 0;
};

inline HomotopyFiber homotopy_fiber(const GroupoidFunctor& phi, int y) {
    const auto& d = *phi.dom;
    const auto& c = *phi.cod;
    if (y < 0 || y >= c.n_obj) throw std::invalid_argument("homotopy_fiber: unknown object id");
    HomotopyFiber hf;
    hf.stride = c.mor.size();
    for (int x = 0; x < d.n_obj; ++x)
        for (int g : c.hom(phi.ob[x], y)) {
            hf.obj_index[static_cast<uint64_t>(x) * hf.stride + g] = static_cast<int>(hf.objs.size());
            hf.objs.emplace_back(x, g);
        }
    int n = static_cast<int>(hf.objs.size());
    GroupoidBuilder b(n);
    std::unordered_map<uint64_t, int> mor_index;  // (i,j,h) -> fiber morphism
    auto mkey = [&](int i, int j, int h) {
        return (static_cast<uint64_t>(i) * n + j) * d.mor.size() + h;
    };
    // enumerate morphisms: for h : x -> x' and g' : φ(x') -> y the source is (x, g'∘φ(h))
    std::vector<std::tuple<int, int, int>> mors;  // (src obj, tgt obj, h)
    for (int i = 0; i < n; ++i) {
        auto [x, g] = hf.objs[i];
        for (int h : d.out[x]) {
            int xp = d.tgt(h);
            int gp = c.compose(g, c.inv_of[phi.mo[h]]);  // g' = g ∘ φ(h)^{-1}
            int j = hf.find_obj(xp, gp);
            mor_index[mkey(i, j, h)] = b.add_mor(i, j);
            mors.emplace_back(i, j, h);
            hf.mor_wit.push_back(h);
        }
    }
    std::vector<int> ids(n), invs(mors.size());
    for (int i = 0; i < n; ++i) ids[i] = mor_index.at(mkey(i, i, d.id_of[hf.objs[i].first]));
    for (size_t m = 0; m < mors.size(); ++m) {
        auto [i, j, h] = mors[m];
        invs[m] = mor_index.at(mkey(j, i, d.inv_of[h]));
    }
    for (size_t m2 = 0; m2 < mors.size(); ++m2) {
        auto [j2, k2, h2] = mors[m2];
        for (size_t m1 = 0; m1 < mors.size(); ++m1) {
            auto [i1, j1, h1] = mors[m1];
            if (j1 != j2) continue;
            b.set_compose(static_cast<int>(m2), static_cast<int>(m1),
                          mor_index.at(mkey(i1, k2, d.compose(h2, h1))));
        }
    }
    b.set_identities(std::move(ids));
    b.set_inverses(std::move(invs));
    hf.fib = b.finish();
    hf.proj.dom = hf.fib;
    hf.proj.cod = phi.dom;
    hf.proj.ob.resize(n);
    for (int i = 0; i < n; ++i) hf.proj.ob[i] = hf.objs[i].first;
    hf.proj.mo = hf.mor_wit;
    return hf;
}

struct HomotopyPullback {
    Gpd pb;
    std::vector<std::tuple<int, int, int>> objs;  // (x, y, g : φ(x) -> ψ(y))
    std::vector<std::pair<int, int>> mor_wit;     // (h in Γ, k in Λ)
    GroupoidFunctor pi_gamma, pi_lambda;
    NatIso eta;  // φ∘π_Γ => ψ∘π_Λ
    std::unordered_map<uint64_t, int> obj_index;
    uint64_t s1 = 0, s2 = 0;

    int find_obj(int x, int y, int g) const {
        return obj_index.at((static_cast<uint64_t>(x) * s1 + y) * s2 + g);
    }
};

inline HomotopyPullback homotopy_pullback(const GroupoidFunctor& phi, const GroupoidFunctor& psi) {
    if (phi.cod.get() != psi.cod.get()) throw std::invalid_argument("homotopy_pullback: codomain mismatch");
    const auto& a = *phi.dom;
    const auto& b = *psi.dom;
    const auto& c = *phi.cod;
    HomotopyPullback hp;
    hp.s1 = b.n_obj;
    hp.s2 = c.mor.size();
    for (int x = 0; x < a.n_obj; ++x)
        for (int y = 0; y < b.n_obj; ++y)
            for (int g : c.hom(phi.ob[x], psi.ob[y])) {
                hp.obj_index[(static_cast<uint64_t>(x) * hp.s1 + y) * hp.s2 + g] =
                    static_cast<int>(hp.objs.size());
                hp.objs.emplace_back(x, y, g);
            }
    int n = static_cast<int>(hp.objs.size());
    GroupoidBuilder bu(n);
    std::unordered_map<uint64_t, int> mor_index;  // (i, h, k)
    auto mkey = [&](int i, int h, int k) {
        return (static_cast<uint64_t>(i) * a.mor.size() + h) * b.mor.size() + k;
    };
    std::vector<std::tuple<int, int, int, int>> mors;  // (src, tgt, h, k)
    for (int i = 0; i < n; ++i) {
        auto [x, y, g] = hp.objs[i];
        for (int h : a.out[x])
            for (int k : b.out[y]) {
                // g' = ψ(k) ∘ g ∘ φ(h)^{-1}
                int gp = c.compose(c.compose(psi.mo[k], g), c.inv_of[phi.mo[h]]);
                int j = hp.find_obj(a.tgt(h), b.tgt(k), gp);
                mor_index[mkey(i, h, k)] = bu.add_mor(i, j);
                mors.emplace_back(i, j, h, k);
                hp.mor_wit.emplace_back(h, k);
            }
    }
    std::vector<int> ids(n), invs(mors.size());
    for (int i = 0; i < n; ++i) {
        auto [x, y, g] = hp.objs[i];
        ids[i] = mor_index.at(mkey(i, a.id_of[x], b.id_of[y]));
    }
    for (size_t m = 0; m < mors.size(); ++m) {
        auto [i, j, h, k] = mors[m];
        invs[m] = mor_index.at(mkey(j, a.inv_of[h], b.inv_of[k]));
    }
    for (size_t m2 = 0; m2 < mors.size(); ++m2) {
        auto [j2, k2obj, h2, k2] = mors[m2];
        for (size_t m1 = 0; m1 < mors.size(); ++m1) {
            auto [i1, j1, h1, k1] = mors[m1];
            if (j1 != j2) continue;
            bu.set_compose(static_cast<int>(m2), static_cast<int>(m1),
                           mor_index.at(mkey(i1, a.compose(h2, h1), b.compose(k2, k1))));
        }
    }
    bu.set_identities(std::move(ids));
    bu.set_inverses(std::move(invs));
    hp.pb = bu.finish();

    hp.pi_gamma.dom = hp.pb;
    hp.pi_gamma.cod = phi.dom;
    hp.pi_lambda.dom = hp.pb;
    hp.pi_lambda.cod = psi.dom;
    hp.pi_gamma.ob.resize(n);
    hp.pi_lambda.ob.resize(n);
    for (int i = 0; i < n; ++i) {
        hp.pi_gamma.ob[i] = std::get<0>(hp.objs[i]);
        hp.pi_lambda.ob[i] = std::get<1>(hp.objs[i]);
    }
    hp.pi_gamma.mo.resize(mors.size());
    hp.pi_lambda.mo.resize(mors.size());
    for (size_t m = 0; m < mors.size(); ++m) {
        hp.pi_gamma.mo[m] = hp.mor_wit[m].first;
        hp.pi_lambda.mo[m] = hp.mor_wit[m].second;
    }
    hp.eta.source = compose_functors(phi, hp.pi_gamma);
    hp.eta.target = compose_functors(psi, hp.pi_lambda);
    hp.eta.comp.resize(n);
    for (int i = 0; i < n; ++i) hp.eta.comp[i] = std::get<2>(hp.objs[i]);
    return hp;
}

// Weakly commuting square (P : Π -> Γ, Q : Π -> Λ, φ : Γ -> Ω, ψ : Λ -> Ω,
// η : φ∘P => ψ∘Q).
struct WeakSquare {
    GroupoidFunctor p, q, phi, psi;
    NatIso eta;
};

inline ValidationReport validate_square(const WeakSquare& s) {
    if (s.p.dom.get() != s.q.dom.get() || s.p.cod.get() != s.phi.dom.get() ||
        s.q.cod.get() != s.psi.dom.get() || s.phi.cod.get() != s.psi.cod.get())
        return ValidationReport::fail("square endpoints mismatch");
    if (s.eta.source.dom.get() != s.p.dom.get()) return ValidationReport::fail("eta domain mismatch");
    return validate_nat_iso(s.eta);
}

// F : Q^{-1}[y] -> φ^{-1}[ψ(y)],  F(z, g) = (P(z), ψ(g) ∘ η_z)
inline GroupoidFunctor fiber_comparison_functor(const WeakSquare& s, const HomotopyFiber& qfib,
                                                const HomotopyFiber& phifib, int /*y*/) {
    const auto& om = *s.phi.cod;
    GroupoidFunctor f;
    f.dom = qfib.fib;
    f.cod = phifib.fib;
    f.ob.resize(qfib.objs.size());
    for (size_t i = 0; i < qfib.objs.size(); ++i) {
        auto [z, g] = qfib.objs[i];
        f.ob[i] = phifib.find_obj(s.p.ob[z], om.compose(s.psi.mo[g], s.eta.comp[z]));
    }
    f.mo.resize(qfib.mor_wit.size());
    for (size_t m = 0; m < qfib.mor_wit.size(); ++m) {
        int h = qfib.mor_wit[m];  // morphism of Π
        int i = qfib.fib->src(static_cast<int>(m));
        int j = qfib.fib->tgt(static_cast<int>(m));
        int ph = s.p.mo[h];
        // locate the fiber morphism of φ^{-1}[ψ(y)] over ph with matching endpoints
        int fi = f.ob[i], fj = f.ob[j];
        int found = -1;
        for (int fm : phifib.fib->out[fi])
            if (phifib.fib->tgt(fm) == fj && phifib.mor_wit[fm] == ph) {
                found = fm;
                break;
            }
        if (found < 0) throw std::logic_error("fiber_comparison_functor: no matching morphism");
        f.mo[m] = found;
    }
    return f;
}

// Equivalence check (essentially surjective + full + faithful) with quasi-
// inverse certificate.
struct EquivalenceCertificate {
    bool is_equivalence = false;
    std::string failure;
    GroupoidFunctor quasi_inverse;
    NatIso counit;  // φ∘ψ => id_cod
    NatIso unit;    // ψ∘φ => id_dom
};

inline EquivalenceCertificate check_equivalence(const GroupoidFunctor& phi) {
    EquivalenceCertificate cert;
    const auto& d = *phi.dom;
    const auto& c = *phi.cod;
    auto sd = skeleton_info(d);
    auto sc = skeleton_info(c);
    std::vector<int> comp_map(sd.n_comp());
    std::vector<int> comp_pre(sc.n_comp(), -1);
    for (int cc = 0; cc < sd.n_comp(); ++cc) {
        comp_map[cc] = sc.comp_of[phi.ob[sd.rep_of[cc]]];
        if (comp_pre[comp_map[cc]] == -1) comp_pre[comp_map[cc]] = cc;
    }
    for (int cc = 0; cc < sc.n_comp(); ++cc)
        if (comp_pre[cc] == -1) {
            cert.failure = "not essentially surjective: component " + std::to_string(sc.rep_of[cc]) + " missed";
            return cert;
        }
    {
        std::vector<bool> hit(sc.n_comp(), false);
        for (int cc = 0; cc < sd.n_comp(); ++cc) {
            if (hit[comp_map[cc]]) {
                cert.failure = "not full: components merge";
                return cert;
            }
            hit[comp_map[cc]] = true;
        }
    }
    // vertex bijectivity at each representative
    std::vector<std::unordered_map<int, int>> vertex_pre(sd.n_comp());
    for (int cc = 0; cc < sd.n_comp(); ++cc) {
        int r = sd.rep_of[cc];
        int fr = phi.ob[r];
        auto auts_d = d.aut(r);
        auto auts_c = c.aut(fr);
        std::unordered_map<int, int> pre;
        for (int m : auts_d) {
            int im = phi.mo[m];
            if (pre.count(im)) {
                cert.failure = "not faithful at object " + std::to_string(r);
                return cert;
            }
            pre[im] = m;
        }
        if (pre.size() != auts_c.size()) {
            cert.failure = "not full at object " + std::to_string(r);
            return cert;
        }
        vertex_pre[cc] = std::move(pre);
    }
    // build quasi-inverse ψ
    GroupoidFunctor psi;
    psi.dom = phi.cod;
    psi.cod = phi.dom;
    psi.ob.resize(c.n_obj);
    psi.mo.resize(c.n_mor());
    // q_cc : φ(rep_dom) -> rep_cod for the codomain component hit by cc
    std::vector<int> qpath(sd.n_comp());
    for (int cc = 0; cc < sd.n_comp(); ++cc) qpath[cc] = sc.to_rep[phi.ob[sd.rep_of[cc]]];
    for (int y = 0; y < c.n_obj; ++y) psi.ob[y] = sd.rep_of[comp_pre[sc.comp_of[y]]];
    for (int m = 0; m < c.n_mor(); ++m) {
        int cc = comp_pre[sc.comp_of[c.src(m)]];
        int hat = framed_hat(c, sc, m);
        int conj = c.compose(c.compose(c.inv_of[qpath[cc]], hat), qpath[cc]);
        psi.mo[m] = vertex_pre[cc].at(conj);
    }
    // counit: φψ => id, component p_y^{-1} ∘ q at y
    NatIso counit;
    counit.source = compose_functors(phi, psi);
    counit.target = identity_functor(phi.cod);
    counit.comp.resize(c.n_obj);
    for (int y = 0; y < c.n_obj; ++y) {
        int cc = comp_pre[sc.comp_of[y]];
        counit.comp[y] = c.compose(c.inv_of[sc.to_rep[y]], qpath[cc]);
    }
    // unit: ψφ => id, component p_x^{-1} ∘ ψφ(p_x) at x
    NatIso unit;
    unit.source = compose_functors(psi, phi);
    unit.target = identity_functor(phi.dom);
    unit.comp.resize(d.n_obj);
    for (int x = 0; x < d.n_obj; ++x)
        unit.comp[x] = d.compose(d.inv_of[sd.to_rep[x]], psi.mo[phi.mo[sd.to_rep[x]]]);
    cert.is_equivalence = true;
    cert.quasi_inverse = std::move(psi);
    cert.counit = std::move(counit);
    cert.unit = std::move(unit);
    return cert;
}

// Canonical equivalence (ψ∘φ)^{-1}[z] -> ψ^{-1}[z] ×_Ω Γ for composable
// φ : Γ -> Ω, ψ : Ω -> Λ.  The pullback is of pr : ψ^{-1}[z] -> Ω against φ.
struct FiberComposition {
    HomotopyFiber composite_fiber;  // (ψφ)^{-1}[z]
    HomotopyFiber psi_fiber;        // ψ^{-1}[z]
    HomotopyPullback pullback;      // ψ^{-1}[z] ×_Ω Γ
    GroupoidFunctor comparison;     // composite_fiber -> pullback
};

inline FiberComposition fiber_composition_equivalence(const GroupoidFunctor& phi, const GroupoidFunctor& psi,
                                                      int z) {
    FiberComposition fc;
    fc.composite_fiber = homotopy_fiber(compose_functors(psi, phi), z);
    fc.psi_fiber = homotopy_fiber(psi, z);
    fc.pullback = homotopy_pullback(fc.psi_fiber.proj, phi);
    const auto& om = *phi.cod;
    GroupoidFunctor f;
    f.dom = fc.composite_fiber.fib;
    f.cod = fc.pullback.pb;
    f.ob.resize(fc.composite_fiber.objs.size());
    for (size_t i = 0; i < fc.composite_fiber.objs.size(); ++i) {
        auto [x, k] = fc.composite_fiber.objs[i];
        int pf_obj = fc.psi_fiber.find_obj(phi.ob[x], k);
        f.ob[i] = fc.pullback.find_obj(pf_obj, x, om.id_of[phi.ob[x]]);
    }
    f.mo.resize(fc.composite_fiber.mor_wit.size());
    for (size_t m = 0; m < fc.composite_fiber.mor_wit.size(); ++m) {
        int h = fc.composite_fiber.mor_wit[m];
        int i = fc.composite_fiber.fib->src(static_cast<int>(m));
        int j = fc.composite_fiber.fib->tgt(static_cast<int>(m));
        // fiber morphism of ψ^{-1}[z] over φ(h)
        int ph = phi.mo[h];
        int fi = fc.psi_fiber.find_obj(phi.ob[fc.composite_fiber.objs[i].first],
                                       fc.composite_fiber.objs[i].second);
        int fj = fc.psi_fiber.find_obj(phi.ob[fc.composite_fiber.objs[j].first],
                                       fc.composite_fiber.objs[j].second);
        int fm1 = -1;
        for (int fm : fc.psi_fiber.fib->out[fi])
            if (fc.psi_fiber.fib->tgt(fm) == fj && fc.psi_fiber.mor_wit[fm] == ph) {
                fm1 = fm;
                break;
            }
        if (fm1 < 0) throw std::logic_error("fiber_composition_equivalence: missing morphism");
        int found = -1;
        for (int pm : fc.pullback.pb->out[f.ob[i]])
            if (fc.pullback.pb->tgt(pm) == f.ob[j] && fc.pullback.mor_wit[pm] == std::make_pair(fm1, h)) {
                found = pm;
                break;
            }
        if (found < 0) throw std::logic_error("fiber_composition_equivalence: missing pullback morphism");
        f.mo[m] = found;
    }
    fc.comparison = std::move(f);
    return fc;
}

}  // namespace parsec
