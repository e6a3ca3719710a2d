#pragma once

// 2-vector bundles over groupoids in the skeletal encoding: per component an
// ambient group carrying a label set, a permutation action and a normalized
// mu_N-valued 2-cocycle; arbitrary bases are handled through a multiplicative
// transport labeling of all base morphisms.  Contains cocycle extraction and
// cohomology tests, the homotopy-fixed-point category data (orbit/stabilizer/
// regular-class counts cross-checked against twisted group algebra centers),
// parallel section objects, intertwiners and bundle 2-morphisms.

#include "parsec/groupoid.hpp"
#include "parsec/matrix.hpp"
#include "parsec/smith.hpp"
#include "parsec/twovec.hpp"

#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace parsec {

// ---------------------------------------------------------------------------
// Bundle cores.

struct BundleCore {
    GroupTable group;                                 // ambient group G
    size_t n_labels = 1;
    unsigned n_root = 1;                              // modulus N
    std::vector<std::vector<int>> action;             // [g][s] -> g.s
    std::vector<std::vector<std::vector<int>>> alpha; // [g][h][s] exponent mod N

    int act(int g, int s) const { return action[g][s]; }
    int act_inv(int g, int s) const { return action[group.inv[g]][s]; }
    int a(int g, int h, int s) const { return alpha[g][h][s]; }
    Cyclo root(long long e) const { return Cyclo::root(n_root, e); }
};

using CorePtr = std::shared_ptr<const BundleCore>;

inline CorePtr trivial_core(size_t n_labels, unsigned n_root = 1) {
    auto c = std::make_shared<BundleCore>();
    c->group = GroupTable::trivial();
    c->n_labels = n_labels;
    c->n_root = n_root;
    c->action = {std::vector<int>(n_labels)};
    for (size_t s = 0; s < n_labels; ++s) c->action[0][s] = static_cast<int>(s);
    c->alpha.assign(1, std::vector<std::vector<int>>(1, std::vector<int>(n_labels, 0)));
    return c;
}

inline CorePtr make_core(GroupTable g, std::vector<std::vector<int>> action,
                         std::vector<std::vector<std::vector<int>>> alpha, unsigned n_root) {
    auto c = std::make_shared<BundleCore>();
    c->group = std::move(g);
    c->n_labels = action.empty() ? 0 : action[0].size();
    c->n_root = n_root;
    c->action = std::move(action);
    c->alpha = std::move(alpha);
    return c;
}

// The twisted 2-cocycle identity: a(h,k)(g^{-1}s) + a(g,hk)(s) = a(gh,k)(s) + a(g,h)(s).
inline ValidationReport validate_core(const BundleCore& c) {
    const auto& g = c.group;
    if (static_cast<int>(c.action.size()) != g.n || static_cast<int>(c.alpha.size()) != g.n)
        return ValidationReport::fail("core table size mismatch");
    for (int e = 0; e < g.n; ++e) {
        std::vector<bool> hit(c.n_labels, false);
        for (size_t s = 0; s < c.n_labels; ++s) {
            int t = c.action[e][s];
            if (t < 0 || t >= static_cast<int>(c.n_labels) || hit[t])
                return ValidationReport::fail("action is not a permutation");
            hit[t] = true;
        }
    }
    for (int x = 0; x < g.n; ++x)
        for (int y = 0; y < g.n; ++y)
            for (size_t s = 0; s < c.n_labels; ++s)
                if (c.act(x, c.act(y, static_cast<int>(s))) != c.act(g.mul(x, y), static_cast<int>(s)))
                    return ValidationReport::fail("action is not a homomorphism");
    for (size_t s = 0; s < c.n_labels; ++s)
        for (int e = 0; e < g.n; ++e)
            if (c.a(0, e, static_cast<int>(s)) != 0 || c.a(e, 0, static_cast<int>(s)) != 0)
                return ValidationReport::fail("cocycle is not normalized");
    for (int x = 0; x < g.n; ++x)
        for (int y = 0; y < g.n; ++y)
            for (int z = 0; z < g.n; ++z)
                for (size_t s = 0; s < c.n_labels; ++s) {
                    int si = static_cast<int>(s);
                    int lhs = c.a(y, z, c.act_inv(x, si)) + c.a(x, g.mul(y, z), si);
                    int rhs = c.a(g.mul(x, y), z, si) + c.a(x, y, si);
                    if ((lhs - rhs) % static_cast<int>(c.n_root) != 0)
                        return ValidationReport::fail("cocycle identity fails");
                }
    return ValidationReport::pass();
}

// ---------------------------------------------------------------------------
// Cocycle extraction from raw equivalence data and cohomology testing.

struct RawEquivalenceData {
    GroupTable group;
    size_t n_labels = 1;
    unsigned n_root = 1;
    std::vector<std::vector<int>> perm;  // [g][s]
    std::vector<std::vector<int>> xi;    // [g][s] exponent of the chosen isomorphism
    std::vector<std::vector<std::vector<int>>> beta;  // [g][h][s] coherence exponents
};

// alpha(g,h)(s) = xi_g(h.s) + xi_h(s) - beta(g,h)(s) - xi_{gh}(s), then
// normalized; the cocycle identity is verified and failure reported.
inline CorePtr extract_cocycle(const RawEquivalenceData& raw) {
    int n = raw.group.n;
    int nr = static_cast<int>(raw.n_root);
    auto norm = [&](long long v) { return static_cast<int>(((v % nr) + nr) % nr); };
    std::vector<std::vector<std::vector<int>>> alpha(
        n, std::vector<std::vector<int>>(n, std::vector<int>(raw.n_labels, 0)));
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            for (size_t s = 0; s < raw.n_labels; ++s)
                alpha[g][h][s] = norm((long long)raw.xi[g][raw.perm[h][s]] + raw.xi[h][s] -
                                      raw.beta[g][h][s] - raw.xi[raw.group.mul(g, h)][s]);
    // normalize: subtract the coboundary of the constant cochain alpha(e,e)
    std::vector<std::vector<std::vector<int>>> norm_alpha = alpha;
    std::vector<std::vector<int>> inv_perm(n, std::vector<int>(raw.n_labels));
    for (int g = 0; g < n; ++g)
        for (size_t s = 0; s < raw.n_labels; ++s) inv_perm[g][raw.perm[g][s]] = static_cast<int>(s);
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            for (size_t s = 0; s < raw.n_labels; ++s)
                norm_alpha[g][h][s] = norm(alpha[g][h][s] - alpha[0][0][inv_perm[g][s]]);
    auto core = make_core(raw.group, raw.perm, std::move(norm_alpha), raw.n_root);
    auto rep = validate_core(*core);
    if (!rep.ok) throw std::invalid_argument("extract_cocycle: " + rep.message);
    return core;
}

// Coboundary witness c : G -> (S -> Z_N) with dc = alpha' - alpha, when the
// classes agree; variables are c_g(s), equations over all (g,h,s).
inline std::optional<std::vector<std::vector<Int>>> cohomologous(const BundleCore& a, const BundleCore& b) {
    if (a.group.n != b.group.n || a.n_labels != b.n_labels || a.n_root != b.n_root ||
        a.action != b.action)
        throw std::invalid_argument("cohomologous: incompatible data");
    int n = a.group.n;
    int ns = static_cast<int>(a.n_labels);
    auto var = [&](int g, int s) { return g * ns + s; };
    IntMatrix m(n * n * ns, n * ns);
    std::vector<Int> rhs(n * n * ns);
    size_t row = 0;
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            for (int s = 0; s < ns; ++s, ++row) {
                // (dc)(g,h)(s) = c_h(g^{-1}s) - c_{gh}(s) + c_g(s)
                m(row, var(h, a.act_inv(g, s))) += 1;
                m(row, var(a.group.mul(g, h), s)) -= 1;
                m(row, var(g, s)) += 1;
                rhs[row] = b.a(g, h, s) - a.a(g, h, s);
            }
    auto sol = solve_mod_n(m, rhs, Int(a.n_root));
    if (!sol) return std::nullopt;
    std::vector<std::vector<Int>> witness(n, std::vector<Int>(ns));
    for (int g = 0; g < n; ++g)
        for (int s = 0; s < ns; ++s) witness[g][s] = (*sol)[var(g, s)];
    return witness;
}

// All normalized cocycles: generators of the solution lattice mod N.
inline std::vector<std::vector<std::vector<std::vector<int>>>> cocycle_generators(
    const GroupTable& grp, const std::vector<std::vector<int>>& action, unsigned n_root) {
    int n = grp.n;
    int ns = static_cast<int>(action.empty() ? 0 : action[0].size());
    std::vector<std::vector<int>> inv_act(n, std::vector<int>(ns));
    for (int g = 0; g < n; ++g)
        for (int s = 0; s < ns; ++s) inv_act[g][action[g][s]] = s;
    auto var = [&](int g, int h, int s) { return (g * n + h) * ns + s; };
    std::vector<std::vector<Int>> rows;
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            for (int k = 0; k < n; ++k)
                for (int s = 0; s < ns; ++s) {
                    std::vector<Int> r(n * n * ns, Int(0));
                    r[var(h, k, inv_act[g][s])] += 1;
                    r[var(g, grp.mul(h, k), s)] += 1;
                    r[var(grp.mul(g, h), k, s)] -= 1;
                    r[var(g, h, s)] -= 1;
                    rows.push_back(std::move(r));
                }
    for (int e = 0; e < n; ++e)
        for (int s = 0; s < ns; ++s) {
            std::vector<Int> r1(n * n * ns, Int(0)), r2(n * n * ns, Int(0));
            r1[var(0, e, s)] = 1;
            r2[var(e, 0, s)] = 1;
            rows.push_back(std::move(r1));
            rows.push_back(std::move(r2));
        }
    IntMatrix m(rows.size(), n * n * ns);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < n * n * ns; ++j) m(i, j) = rows[i][j];
    auto gens = nullspace_mod_n(m, Int(n_root));
    std::vector<std::vector<std::vector<std::vector<int>>>> out;
    for (const auto& g : gens) {
        std::vector<std::vector<std::vector<int>>> alpha(
            n, std::vector<std::vector<int>>(n, std::vector<int>(ns, 0)));
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int s = 0; s < ns; ++s)
                    alpha[x][y][s] = static_cast<int>(g[var(x, y, s)] % n_root);
        out.push_back(std::move(alpha));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bundles over arbitrary bases: core per component + multiplicative labeling.

struct TwoVecBundle {
    Gpd base;
    SkeletonInfo sk;
    std::vector<VertexGroup> vg;   // per component
    std::vector<CorePtr> core;     // per component
    std::vector<int> w;            // per base morphism -> element of the component core
    unsigned n_root = 1;

    int comp_of(int x) const { return sk.comp_of[x]; }
    const BundleCore& core_at(int comp) const { return *core[comp]; }
    size_t labels_at(int comp) const { return core[comp]->n_labels; }
    int w_of(int m) const { return w[m]; }
};

using Bundle3Ptr = std::shared_ptr<const TwoVecBundle>;

// vertex_hom[c] maps the vertex-group element index (per VertexGroup order)
// to an element of core[c]'s group; it must be a group homomorphism.
inline Bundle3Ptr make_bundle3(Gpd base, std::vector<CorePtr> cores,
                               std::vector<std::vector<int>> vertex_hom) {
    auto b = std::make_shared<TwoVecBundle>();
    b->base = std::move(base);
    b->sk = skeleton_info(*b->base);
    unsigned nr = 1;
    for (const auto& c : cores) nr = std::lcm(nr, c->n_root);
    b->n_root = nr;
    b->core = std::move(cores);
    for (int c = 0; c < b->sk.n_comp(); ++c) b->vg.push_back(vertex_group(*b->base, b->sk, c));
    b->w.resize(b->base->n_mor());
    for (int m = 0; m < b->base->n_mor(); ++m) {
        int c = b->sk.comp_of[b->base->src(m)];
        int hat = framed_hat(*b->base, b->sk, m);
        b->w[m] = vertex_hom[c][b->vg[c].index_of(hat)];
    }
    return b;
}

// Skeletal constructor: the vertex group at each representative must equal
// the core group elementwise (vertex_hom the identity indexing).
inline Bundle3Ptr make_skeletal_bundle3(Gpd base, std::vector<CorePtr> cores) {
    auto sk = skeleton_info(*base);
    std::vector<std::vector<int>> vh;
    for (int c = 0; c < sk.n_comp(); ++c) {
        auto v = vertex_group(*base, sk, c);
        if (v.table.n != cores[c]->group.n)
            throw std::invalid_argument("make_skeletal_bundle3: vertex group order mismatch");
        std::vector<int> id(v.table.n);
        for (int i = 0; i < v.table.n; ++i) id[i] = i;
        vh.push_back(std::move(id));
    }
    return make_bundle3(std::move(base), std::move(cores), std::move(vh));
}

inline ValidationReport validate_bundle3(const TwoVecBundle& b) {
    for (const auto& c : b.core) {
        auto rep = validate_core(*c);
        if (!rep.ok) return rep;
    }
    const auto& g = *b.base;
    for (int x = 0; x < g.n_obj; ++x)
        if (b.w[g.id_of[x]] != 0) return ValidationReport::fail("labeling breaks identities");
    for (int m2 = 0; m2 < g.n_mor(); ++m2)
        for (int m1 : g.in[g.src(m2)]) {
            const auto& grp = b.core[b.comp_of(g.src(m1))]->group;
            if (b.w[g.compose(m2, m1)] != grp.mul(b.w[m2], b.w[m1]))
                return ValidationReport::fail("labeling is not multiplicative");
        }
    return ValidationReport::pass();
}

inline Bundle3Ptr pullback1(const GroupoidFunctor& phi, const Bundle3Ptr& rho) {
    if (phi.cod.get() != rho->base.get()) throw std::invalid_argument("pullback1: base mismatch");
    auto b = std::make_shared<TwoVecBundle>();
    b->base = phi.dom;
    b->sk = skeleton_info(*b->base);
    b->n_root = rho->n_root;
    for (int c = 0; c < b->sk.n_comp(); ++c) {
        b->core.push_back(rho->core[rho->comp_of(phi.ob[b->sk.rep_of[c]])]);
        b->vg.push_back(vertex_group(*b->base, b->sk, c));
    }
    b->w.resize(b->base->n_mor());
    for (int m = 0; m < b->base->n_mor(); ++m) b->w[m] = rho->w[phi.mo[m]];
    return b;
}

// Effective vertex data of a component: the base vertex group acting on the
// core labels through the labeling.
struct EffectiveData {
    GroupTable group;                      // abstract vertex group
    std::vector<int> to_core;              // element -> core group element
    const BundleCore* core = nullptr;
    int act(int k, int s) const { return core->act(to_core[k], s); }
    int act_inv(int k, int s) const { return core->act(core->group.inv[to_core[k]], s); }
    int a(int k1, int k2, int s) const { return core->a(to_core[k1], to_core[k2], s); }
};

inline EffectiveData effective_data(const TwoVecBundle& b, int comp) {
    EffectiveData e;
    e.group = b.vg[comp].table;
    e.core = b.core[comp].get();
    e.to_core.resize(e.group.n);
    for (int i = 0; i < e.group.n; ++i) e.to_core[i] = b.w[b.vg[comp].elems[i]];
    return e;
}

// ---------------------------------------------------------------------------
// Twisted group algebra center and homotopy-fixed-point counting.

// Dimension of the center of the algebra with basis {(k, s) : s in orbit},
// product (k1, k2.s)(k2, s) = zeta^{alpha(k1,k2)((k1 k2).s)} (k1 k2, s).
inline size_t twisted_center_dim(const EffectiveData& e, const std::vector<int>& orbit) {
    int n = e.group.n;
    int no = static_cast<int>(orbit.size());
    std::vector<int> pos(e.core->n_labels, -1);
    for (int i = 0; i < no; ++i) pos[orbit[i]] = i;
    auto bidx = [&](int k, int oi) { return k * no + oi; };
    int dim = n * no;
    // structure constants: b(k1,t) * b(k2,s) = [t == k2.s] zeta^alpha b(k1k2, s)
    // center: for all (k2, s): z * b - b * z = 0
    CMat sys(static_cast<size_t>(dim) * dim, dim);
    size_t row_base = 0;
    for (int k2 = 0; k2 < n; ++k2)
        for (int oi = 0; oi < no; ++oi) {
            int s = orbit[oi];
            // z * b(k2, s): sum over k1 with t = k2.s
            for (int k1 = 0; k1 < n; ++k1) {
                int k12 = e.group.mul(k1, k2);
                Cyclo coeff = e.core->root(e.a(k1, k2, e.act(e.group.mul(k1, k2), s)));
                // contributes +coeff * z[k1, k2.s] to output coordinate (k12, s)
                sys(row_base + bidx(k12, oi), bidx(k1, pos[e.act(k2, s)])) =
                    sys(row_base + bidx(k12, oi), bidx(k1, pos[e.act(k2, s)])) + coeff;
            }
            // b(k2, s) * z: z[k1, t] contributes when s_b-source matches: (k2, k1.t)(k1, t)
            for (int k1 = 0; k1 < n; ++k1)
                for (int oj = 0; oj < no; ++oj) {
                    int t = orbit[oj];
                    if (e.act(k1, t) != s) continue;
                    int k21 = e.group.mul(k2, k1);
                    Cyclo coeff = e.core->root(e.a(k2, k1, e.act(k21, t)));
                    sys(row_base + bidx(k21, oj), bidx(k1, oj)) =
                        sys(row_base + bidx(k21, oj), bidx(k1, oj)) - coeff;
                }
            row_base += dim;
        }
    return kernel_basis(sys).size();
}

struct OrbitInfo {
    int component = 0;
    int rep_label = 0;
    std::vector<int> orbit;
    std::vector<int> stabilizer;        // effective vertex element indices
    size_t regular_class_count = 0;     // alpha-regular conjugacy classes of the stabilizer
    size_t center_dim = 0;              // cross-check: center of the twisted orbit algebra
    size_t simple_count = 0;
};

struct HFPDescriptor {
    std::vector<OrbitInfo> orbits;
    size_t total = 0;
};

inline HFPDescriptor hfp_category(const TwoVecBundle& b) {
    HFPDescriptor d;
    for (int c = 0; c < b.sk.n_comp(); ++c) {
        auto e = effective_data(b, c);
        int ns = static_cast<int>(e.core->n_labels);
        std::vector<bool> seen(ns, false);
        for (int s0 = 0; s0 < ns; ++s0) {
            if (seen[s0]) continue;
            OrbitInfo oi;
            oi.component = c;
            oi.rep_label = s0;
            for (int k = 0; k < e.group.n; ++k) {
                int t = e.act(k, s0);
                if (!seen[t]) {
                    seen[t] = true;
                    oi.orbit.push_back(t);
                }
                if (t == s0 && std::find(oi.stabilizer.begin(), oi.stabilizer.end(), k) == oi.stabilizer.end())
                    oi.stabilizer.push_back(k);
            }
            std::sort(oi.orbit.begin(), oi.orbit.end());
            std::sort(oi.stabilizer.begin(), oi.stabilizer.end());
            // stabilizer as an abstract table
            GroupTable st;
            st.n = static_cast<int>(oi.stabilizer.size());
            st.mult.resize(st.n * st.n);
            st.inv.resize(st.n);
            std::vector<int> pos(e.group.n, -1);
            for (int i = 0; i < st.n; ++i) pos[oi.stabilizer[i]] = i;
            for (int i = 0; i < st.n; ++i) {
                st.inv[i] = pos[e.group.inv[oi.stabilizer[i]]];
                for (int j = 0; j < st.n; ++j)
                    st.mult[i * st.n + j] = pos[e.group.mul(oi.stabilizer[i], oi.stabilizer[j])];
            }
            // alpha-regular classes: a(h,c) = a(c,h) at the fixed label for all
            // centralizing c
            auto tau = [&](int i, int j) { return e.a(oi.stabilizer[i], oi.stabilizer[j], s0); };
            size_t regular = 0;
            int nr = static_cast<int>(b.core[c]->n_root);
            for (const auto& cls : st.conjugacy_classes()) {
                int h = cls[0];
                bool reg = true;
                for (int z : st.centralizer(h))
                    if ((tau(h, z) - tau(z, h)) % nr != 0) {
                        reg = false;
                        break;
                    }
                if (reg) ++regular;
            }
            oi.regular_class_count = regular;
            oi.center_dim = twisted_center_dim(e, oi.orbit);
            if (oi.center_dim != oi.regular_class_count)
                throw std::logic_error("hfp_category: regular class count disagrees with center dimension");
            oi.simple_count = regular;
            d.orbits.push_back(std::move(oi));
        }
    }
    for (const auto& o : d.orbits) d.total += o.simple_count;
    return d;
}

// ---------------------------------------------------------------------------
// Parallel section objects.

struct ParallelSection {
    struct Comp {
        KVObj x;
        // phi[k][s] : X[act_eff(k)^{-1} s] -> X[s], k over vertex elements
        std::vector<std::vector<CMat>> phi;
    };
    std::vector<Comp> comp;
};

inline ValidationReport validate_parallel_object(const TwoVecBundle& b, const ParallelSection& s) {
    if (s.comp.size() != static_cast<size_t>(b.sk.n_comp()))
        return ValidationReport::fail("component count mismatch");
    for (int c = 0; c < b.sk.n_comp(); ++c) {
        auto e = effective_data(b, c);
        const auto& sc = s.comp[c];
        int ns = static_cast<int>(e.core->n_labels);
        if (static_cast<int>(sc.x.dim()) != ns) return ValidationReport::fail("label count mismatch");
        if (static_cast<int>(sc.phi.size()) != e.group.n)
            return ValidationReport::fail("coherence table size mismatch");
        for (int k = 0; k < e.group.n; ++k)
            for (int t = 0; t < ns; ++t) {
                const CMat& m = sc.phi[k][t];
                if (m.rows() != sc.x.mult[t] || m.cols() != sc.x.mult[e.act_inv(k, t)])
                    return ValidationReport::fail("coherence block shape mismatch");
                if (!try_inverse(m)) return ValidationReport::fail("coherence block not invertible");
            }
        for (int t = 0; t < ns; ++t)
            if (!sc.phi[0][t].is_identity()) return ValidationReport::fail("identity coherence not trivial");
        // phi_{k1,s} phi_{k2, k1^{-1}s} = zeta^{a(k1,k2)(s)} phi_{k1 k2, s}
        for (int k1 = 0; k1 < e.group.n; ++k1)
            for (int k2 = 0; k2 < e.group.n; ++k2)
                for (int t = 0; t < ns; ++t) {
                    CMat lhs = sc.phi[k1][t] * sc.phi[k2][e.act_inv(k1, t)];
                    CMat rhs = e.core->root(e.a(k1, k2, t)) * sc.phi[e.group.mul(k1, k2)][t];
                    if (lhs != rhs)
                        return ValidationReport::fail("twisted coherence fails at (" + std::to_string(k1) +
                                                      "," + std::to_string(k2) + "," + std::to_string(t) +
                                                      ") in component " + std::to_string(c));
                }
    }
    return ValidationReport::pass();
}

inline ParallelSection zero_section(const TwoVecBundle& b) {
    ParallelSection s;
    for (int c = 0; c < b.sk.n_comp(); ++c) {
        ParallelSection::Comp sc;
        int ns = static_cast<int>(b.labels_at(c));
        sc.x.mult.assign(ns, 0);
        auto e = effective_data(b, c);
        sc.phi.assign(e.group.n, std::vector<CMat>(ns, CMat(0, 0)));
        s.comp.push_back(std::move(sc));
    }
    return s;
}

// Induced object at an orbit representative: X = (+)_{k in H} X_{k.s0} with
// phi_g e_k = zeta^{alpha(g,k)((gk).s0)} e_{gk}.
inline ParallelSection induced_probe(const TwoVecBundle& b, int comp, int label) {
    ParallelSection s = zero_section(b);
    auto e = effective_data(b, comp);
    int ns = static_cast<int>(e.core->n_labels);
    auto& sc = s.comp[comp];
    // basis positions: e_k lands in label k.s0, ordered by element index
    std::vector<std::vector<int>> slots(ns);  // per label: list of k
    for (int k = 0; k < e.group.n; ++k) slots[e.act(k, label)].push_back(k);
    for (int t = 0; t < ns; ++t) sc.x.mult[t] = slots[t].size();
    auto pos_in = [&](int t, int k) {
        const auto& v = slots[t];
        return static_cast<int>(std::find(v.begin(), v.end(), k) - v.begin());
    };
    for (int g = 0; g < e.group.n; ++g)
        for (int t = 0; t < ns; ++t) {
            int tsrc = e.act_inv(g, t);
            CMat m(sc.x.mult[t], sc.x.mult[tsrc]);
            for (int k : slots[tsrc]) {
                int gk = e.group.mul(g, k);
                m(pos_in(t, gk), pos_in(tsrc, k)) = e.core->root(e.a(g, k, e.act(gk, label)));
            }
            sc.phi[g][t] = std::move(m);
        }
    return s;
}

// A morphism of parallel sections: per component, per label, a block map
// X_s -> X'_s commuting with the coherences.
struct SectionMor {
    std::vector<std::vector<CMat>> blocks;  // [comp][label]
};

inline ValidationReport validate_section_mor(const TwoVecBundle& b, const ParallelSection& s,
                                             const ParallelSection& sp, const SectionMor& f) {
    for (int c = 0; c < b.sk.n_comp(); ++c) {
        auto e = effective_data(b, c);
        int ns = static_cast<int>(e.core->n_labels);
        for (int t = 0; t < ns; ++t)
            if (f.blocks[c][t].rows() != sp.comp[c].x.mult[t] || f.blocks[c][t].cols() != s.comp[c].x.mult[t])
                return ValidationReport::fail("block shape mismatch");
        for (int k = 0; k < e.group.n; ++k)
            for (int t = 0; t < ns; ++t)
                if (sp.comp[c].phi[k][t] * f.blocks[c][e.act_inv(k, t)] != f.blocks[c][t] * s.comp[c].phi[k][t])
                    return ValidationReport::fail("morphism does not intertwine coherences");
    }
    return ValidationReport::pass();
}

// Averaging projector on (+)_s Hom(X_s, X'_s); its rank is the hom dimension
// in the section category and its image gives concrete morphisms.
inline CMat hom_projector(const EffectiveData& e, const ParallelSection::Comp& s,
                          const ParallelSection::Comp& sp) {
    int ns = static_cast<int>(e.core->n_labels);
    std::vector<size_t> off(ns + 1, 0);
    for (int t = 0; t < ns; ++t) off[t + 1] = off[t] + s.x.mult[t] * sp.x.mult[t];
    size_t dim = off[ns];
    CMat p(dim, dim);
    std::vector<std::vector<CMat>> phi_inv(e.group.n, std::vector<CMat>(ns));
    for (int k = 0; k < e.group.n; ++k)
        for (int t = 0; t < ns; ++t)
            if (s.x.mult[t] && s.x.mult[e.act_inv(k, t)]) phi_inv[k][t] = inverse(s.phi[k][t]);
            else phi_inv[k][t] = CMat(s.phi[k][t].cols(), s.phi[k][t].rows());
    Cyclo wt = Cyclo(Rational(1, Int(e.group.n)));
    for (int k = 0; k < e.group.n; ++k) {
        // T_k(f)_t = phi'_{k,t} f_{k^{-1}t} phi_{k,t}^{-1}
        for (int t = 0; t < ns; ++t) {
            int u = e.act_inv(k, t);
            // entry: T(f)_t[a,b] = sum_{a0,b0} phi'[a,a0] f_u[a0,b0] phiinv[b0,b]
            for (size_t a = 0; a < sp.x.mult[t]; ++a)
                for (size_t bb = 0; bb < s.x.mult[t]; ++bb)
                    for (size_t a0 = 0; a0 < sp.x.mult[u]; ++a0)
                        for (size_t b0 = 0; b0 < s.x.mult[u]; ++b0) {
                            size_t r = off[t] + a * s.x.mult[t] + bb;
                            size_t cc = off[u] + a0 * s.x.mult[u] + b0;
                            p(r, cc) = p(r, cc) + wt * (sp.phi[k][t](a, a0) * phi_inv[k][t](b0, bb));
                        }
        }
    }
    return p;
}

// Hom dimension via the trace of the averaging idempotent:
// rank = tr P = (1/|H|) Σ_k Σ_{t fixed by k} tr(φ'_{k,t}) tr(φ_{k,t}^{-1}).
inline size_t hom_dim_par(const TwoVecBundle& b, const ParallelSection& s, const ParallelSection& sp) {
    Cyclo total;
    for (int c = 0; c < b.sk.n_comp(); ++c) {
        auto e = effective_data(b, c);
        int ns = static_cast<int>(e.core->n_labels);
        Cyclo acc;
        for (int k = 0; k < e.group.n; ++k)
            for (int t = 0; t < ns; ++t) {
                if (e.act_inv(k, t) != t) continue;
                if (s.comp[c].x.mult[t] == 0 || sp.comp[c].x.mult[t] == 0) continue;
                Cyclo tr1, tr2;
                const CMat& a = sp.comp[c].phi[k][t];
                CMat binv = inverse(s.comp[c].phi[k][t]);
                for (size_t i = 0; i < a.rows(); ++i) tr1 = tr1 + a(i, i);
                for (size_t i = 0; i < binv.rows(); ++i) tr2 = tr2 + binv(i, i);
                acc = acc + tr1 * tr2;
            }
        total = total + Cyclo(Rational(1, Int(e.group.n))) * acc;
    }
    if (!total.is_rational() || denominator(total.rational_part()) != 1 || total.rational_part() < 0)
        throw std::logic_error("hom_dim_par: trace is not a nonnegative integer");
    return static_cast<size_t>(numerator(total.rational_part()).convert_to<long long>());
}

inline bool sections_isomorphic(const TwoVecBundle& b, const ParallelSection& s, const ParallelSection& sp) {
    return iso_test(hom_dim_par(b, s, s), hom_dim_par(b, s, sp), hom_dim_par(b, sp, sp));
}

inline ParallelSection direct_sum(const TwoVecBundle& b, const ParallelSection& s,
                                  const ParallelSection& sp) {
    ParallelSection out = zero_section(b);
    for (int c = 0; c < b.sk.n_comp(); ++c) {
        auto e = effective_data(b, c);
        int ns = static_cast<int>(e.core->n_labels);
        auto& oc = out.comp[c];
        for (int t = 0; t < ns; ++t) oc.x.mult[t] = s.comp[c].x.mult[t] + sp.comp[c].x.mult[t];
        for (int k = 0; k < e.group.n; ++k)
            for (int t = 0; t < ns; ++t) {
                int u = e.act_inv(k, t);
                CMat m(oc.x.mult[t], oc.x.mult[u]);
                const CMat& a = s.comp[c].phi[k][t];
                const CMat& c2 = sp.comp[c].phi[k][t];
                for (size_t i = 0; i < a.rows(); ++i)
                    for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
                for (size_t i = 0; i < c2.rows(); ++i)
                    for (size_t j = 0; j < c2.cols(); ++j)
                        m(s.comp[c].x.mult[t] + i, s.comp[c].x.mult[u] + j) = c2(i, j);
                oc.phi[k][t] = std::move(m);
            }
    }
    return out;
}

// Conjugate a section by invertible per-label blocks (gauge change).
inline ParallelSection conjugate_section(const TwoVecBundle& b, const ParallelSection& s,
                                         const std::vector<std::vector<CMat>>& gauge) {
    ParallelSection out = s;
    for (int c = 0; c < b.sk.n_comp(); ++c) {
        auto e = effective_data(b, c);
        int ns = static_cast<int>(e.core->n_labels);
        for (int k = 0; k < e.group.n; ++k)
            for (int t = 0; t < ns; ++t)
                out.comp[c].phi[k][t] =
                    gauge[c][t] * s.comp[c].phi[k][t] * inverse(gauge[c][e.act_inv(k, t)]);
    }
    return out;
}

// Transport of a stored section along a base morphism e : x -> x', expressed
// in representative frames: maps V(x)[act_inv(w(e)) v] -> V(x')[v] where
// V(x)[u] = X[act(f(x), u)] and f(x) labels the framing path of x.
inline CMat section_transport_block(const TwoVecBundle& b, const ParallelSection& s, int e, int v) {
    const auto& g = *b.base;
    int x = g.src(e), xp = g.tgt(e);
    int c = b.comp_of(x);
    const auto& core = b.core_at(c);
    int fx = b.w_of(b.sk.to_rep[x]), fxp = b.w_of(b.sk.to_rep[xp]);
    int ehat = g.compose(g.compose(b.sk.to_rep[xp], e), g.inv_of[b.sk.to_rep[x]]);
    int what = b.w_of(ehat);
    int we = b.w_of(e);
    long long sc = (long long)core.a(we, core.group.inv[fx], v) -
                   core.a(core.group.inv[fxp], what, v);
    return core.root(sc) * s.comp[c].phi[b.vg[c].index_of(ehat)][core.act(fxp, v)];
}

// Pullback of a section along a functor into the base.
inline ParallelSection pullback1_section(const GroupoidFunctor& phi, const TwoVecBundle& rho,
                                         const ParallelSection& s) {
    auto pulled = pullback1(phi, std::make_shared<TwoVecBundle>(rho));
    // stored value at each new representative: the old value transported into
    // the representative frame
    ParallelSection out;
    const auto& bp = *pulled;
    for (int c = 0; c < bp.sk.n_comp(); ++c) {
        int rep = bp.sk.rep_of[c];
        int y = phi.ob[rep];
        int cr = rho.comp_of(y);
        const auto& core = rho.core_at(cr);
        int ns = static_cast<int>(core.n_labels);
        int p = rho.sk.to_rep[y];            // y -> rep(cr) in the old base
        int d = rho.w_of(p);                 // frame shift
        ParallelSection::Comp oc;
        oc.x.mult.resize(ns);
        for (int t = 0; t < ns; ++t) oc.x.mult[t] = s.comp[cr].x.mult[core.act(d, t)];
        auto e = effective_data(bp, c);
        const auto& vg_old = rho.vg[cr];
        oc.phi.assign(e.group.n, std::vector<CMat>(ns));
        int dinv = core.group.inv[d];
        for (int k = 0; k < e.group.n; ++k) {
            int kmor = bp.vg[c].elems[k];
            int fk = phi.mo[kmor];  // automorphism of y in the old base
            int hat = rho.base->compose(rho.base->compose(p, fk), rho.base->inv_of[p]);
            int what = rho.w_of(hat);
            int ufk = rho.w_of(fk);
            for (int t = 0; t < ns; ++t) {
                long long sc = core.a(ufk, dinv, t) - core.a(dinv, what, t);
                oc.phi[k][t] = core.root(sc) * s.comp[cr].phi[vg_old.index_of(hat)][core.act(d, t)];
            }
        }
        out.comp.push_back(std::move(oc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Intertwiners (1-morphisms of 2-vector bundles) and bundle 2-morphisms.

struct Intertwiner2 {
    Bundle3Ptr src, tgt;                     // over the same base
    std::vector<KVMap> lam;                  // per base object
    std::vector<std::vector<CMat>> theta;    // per base morphism, blocks [t * nS_src + s]

    const CMat& th(int m, int t, int s) const {
        return theta[m][static_cast<size_t>(t) * src->labels_at(src->comp_of(src->base->src(m))) + s];
    }
};

inline size_t theta_index(const Intertwiner2& l, int m, int t, int s) {
    return static_cast<size_t>(t) * l.src->labels_at(l.src->comp_of(l.src->base->src(m))) + s;
}

inline ValidationReport validate_intertwiner(const Intertwiner2& l) {
    const auto& g = *l.src->base;
    if (l.tgt->base.get() != l.src->base.get()) return ValidationReport::fail("intertwiner base mismatch");
    for (int x = 0; x < g.n_obj; ++x) {
        int c = l.src->comp_of(x);
        if (l.lam[x].rows != l.tgt->labels_at(c) || l.lam[x].cols != l.src->labels_at(c))
            return ValidationReport::fail("lambda shape mismatch");
    }
    for (int m = 0; m < g.n_mor(); ++m) {
        int x = g.src(m), y = g.tgt(m);
        int c = l.src->comp_of(x);
        const auto& c0 = l.src->core_at(c);
        const auto& c1 = l.tgt->core_at(c);
        int ns0 = static_cast<int>(c0.n_labels), ns1 = static_cast<int>(c1.n_labels);
        int w0 = l.src->w_of(m), w1 = l.tgt->w_of(m);
        for (int t = 0; t < ns1; ++t)
            for (int s = 0; s < ns0; ++s) {
                const CMat& b = l.th(m, t, s);
                if (b.rows() != l.lam[y](t, c0.act(w0, s)) ||
                    b.cols() != l.lam[x](c1.act(c1.group.inv[w1], t), s))
                    return ValidationReport::fail("theta block shape mismatch");
                if (b.rows() != b.cols() || (b.rows() && !try_inverse(b)))
                    return ValidationReport::fail("theta block not invertible");
            }
    }
    // coherence under composition
    for (int m2 = 0; m2 < g.n_mor(); ++m2)
        for (int m1 : g.in[g.src(m2)]) {
            int m21 = g.compose(m2, m1);
            int x = g.src(m1);
            int c = l.src->comp_of(x);
            const auto& c0 = l.src->core_at(c);
            const auto& c1 = l.tgt->core_at(c);
            int u2 = l.src->w_of(m2), u1 = l.src->w_of(m1);
            int v2 = l.tgt->w_of(m2), v1 = l.tgt->w_of(m1);
            for (int t = 0; t < static_cast<int>(c1.n_labels); ++t)
                for (int s = 0; s < static_cast<int>(c0.n_labels); ++s) {
                    CMat lhs = c0.root(c0.a(u2, u1, c0.act(c0.group.mul(u2, u1), s))) *
                               (l.th(m2, t, c0.act(u1, s)) * l.th(m1, c1.act(c1.group.inv[v2], t), s));
                    CMat rhs = c1.root(c1.a(v2, v1, t)) * l.th(m21, t, s);
                    if (lhs != rhs) return ValidationReport::fail("theta coherence fails");
                }
        }
    return ValidationReport::pass();
}

inline Intertwiner2 identity_intertwiner(const Bundle3Ptr& rho) {
    Intertwiner2 l;
    l.src = l.tgt = rho;
    const auto& g = *rho->base;
    l.lam.resize(g.n_obj);
    for (int x = 0; x < g.n_obj; ++x) l.lam[x] = KVMap::identity(rho->labels_at(rho->comp_of(x)));
    l.theta.resize(g.n_mor());
    for (int m = 0; m < g.n_mor(); ++m) {
        int c = rho->comp_of(g.src(m));
        const auto& core = rho->core_at(c);
        int ns = static_cast<int>(core.n_labels);
        int wm = rho->w_of(m);
        l.theta[m].resize(static_cast<size_t>(ns) * ns);
        for (int t = 0; t < ns; ++t)
            for (int s = 0; s < ns; ++s)
                l.theta[m][static_cast<size_t>(t) * ns + s] =
                    CMat::identity(s == core.act(core.group.inv[wm], t) ? 1 : 0);
    }
    return l;
}

inline Intertwiner2 pullback_intertwiner(const GroupoidFunctor& phi, const Intertwiner2& l) {
    Intertwiner2 out;
    out.src = pullback1(phi, l.src);
    out.tgt = pullback1(phi, l.tgt);
    out.lam.resize(phi.dom->n_obj);
    out.theta.resize(phi.dom->n_mor());
    for (int x = 0; x < phi.dom->n_obj; ++x) out.lam[x] = l.lam[phi.ob[x]];
    for (int m = 0; m < phi.dom->n_mor(); ++m) out.theta[m] = l.theta[phi.mo[m]];
    return out;
}

// The intertwiner rho(eta) : f*rho -> f'*rho induced by a natural
// isomorphism eta : f => f'.
inline Intertwiner2 nat_iso_intertwiner(const NatIso& eta, const Bundle3Ptr& rho) {
    Intertwiner2 l;
    l.src = pullback1(eta.source, rho);
    l.tgt = pullback1(eta.target, rho);
    const auto& g = *eta.source.dom;
    l.lam.resize(g.n_obj);
    for (int z = 0; z < g.n_obj; ++z) {
        int c = l.src->comp_of(z);
        const auto& core = l.src->core_at(c);
        int ns = static_cast<int>(core.n_labels);
        int e = rho->w_of(eta.comp[z]);
        KVMap p(ns, ns);
        for (int s = 0; s < ns; ++s) p(core.act(e, s), s) = 1;
        l.lam[z] = std::move(p);
    }
    l.theta.resize(g.n_mor());
    for (int m = 0; m < g.n_mor(); ++m) {
        int z = g.src(m), zp = g.tgt(m);
        int c = l.src->comp_of(z);
        const auto& core = l.src->core_at(c);
        int ns = static_cast<int>(core.n_labels);
        int a = rho->w_of(eta.source.mo[m]);
        int b = rho->w_of(eta.target.mo[m]);
        int ez = rho->w_of(eta.comp[z]);
        int ezp = rho->w_of(eta.comp[zp]);
        l.theta[m].resize(static_cast<size_t>(ns) * ns);
        for (int t = 0; t < ns; ++t)
            for (int s = 0; s < ns; ++s) {
                bool on = core.act(ez, s) == core.act(core.group.inv[b], t);
                CMat blk = CMat::identity(on ? 1 : 0);
                if (on) blk(0, 0) = core.root((long long)core.a(b, ez, t) - core.a(ezp, a, t));
                l.theta[m][static_cast<size_t>(t) * ns + s] = std::move(blk);
            }
    }
    return l;
}

// Offsets of the q-summands in a composite multiplicity (L2 L1)[t,s].
inline std::vector<size_t> composite_offsets(const KVMap& l2, const KVMap& l1, int t, int s) {
    std::vector<size_t> off(l2.cols + 1, 0);
    for (size_t q = 0; q < l2.cols; ++q) off[q + 1] = off[q] + l2(t, q) * l1(q, s);
    return off;
}

inline Intertwiner2 compose_intertwiners(const Intertwiner2& l2, const Intertwiner2& l1) {
    if (l1.tgt->base.get() != l2.src->base.get())
        throw std::invalid_argument("compose_intertwiners: base mismatch");
    Intertwiner2 out;
    out.src = l1.src;
    out.tgt = l2.tgt;
    const auto& g = *l1.src->base;
    out.lam.resize(g.n_obj);
    for (int x = 0; x < g.n_obj; ++x) out.lam[x] = compose(l2.lam[x], l1.lam[x]);
    out.theta.resize(g.n_mor());
    for (int m = 0; m < g.n_mor(); ++m) {
        int x = g.src(m), y = g.tgt(m);
        int c = l1.src->comp_of(x);
        const auto& c0 = l1.src->core_at(c);
        const auto& cm = l1.tgt->core_at(c);
        const auto& c2 = l2.tgt->core_at(c);
        int ns0 = static_cast<int>(c0.n_labels), ns2 = static_cast<int>(c2.n_labels);
        int w0 = l1.src->w_of(m), wm = l1.tgt->w_of(m), w2 = l2.tgt->w_of(m);
        out.theta[m].resize(static_cast<size_t>(ns2) * ns0);
        for (int t = 0; t < ns2; ++t)
            for (int s = 0; s < ns0; ++s) {
                int tsrc = c2.act(c2.group.inv[w2], t);
                int stgt = c0.act(w0, s);
                auto src_off = composite_offsets(l2.lam[x], l1.lam[x], tsrc, s);
                auto tgt_off = composite_offsets(l2.lam[y], l1.lam[y], t, stgt);
                CMat blk(tgt_off.back(), src_off.back());
                for (size_t q = 0; q < l2.lam[x].cols; ++q) {
                    int qp = cm.act(wm, static_cast<int>(q));
                    const CMat& a = l2.th(m, t, static_cast<int>(q));
                    const CMat& bb = l1.th(m, qp, s);
                    CMat kr = CMat::kron(a, bb);
                    for (size_t i = 0; i < kr.rows(); ++i)
                        for (size_t j = 0; j < kr.cols(); ++j)
                            blk(tgt_off[qp] + i, src_off[q] + j) = kr(i, j);
                }
                out.theta[m][static_cast<size_t>(t) * ns0 + s] = std::move(blk);
            }
    }
    return out;
}

// Apply an intertwiner to a parallel section: multiplicities compose, the
// coherence picks up theta blocks.
inline ParallelSection intertwiner_apply(const Intertwiner2& l, const ParallelSection& s) {
    const auto& bsrc = *l.src;
    const auto& btgt = *l.tgt;
    ParallelSection out;
    for (int c = 0; c < bsrc.sk.n_comp(); ++c) {
        int rep = bsrc.sk.rep_of[c];
        const auto& c0 = bsrc.core_at(c);
        const auto& c1 = btgt.core_at(c);
        int ns0 = static_cast<int>(c0.n_labels), ns1 = static_cast<int>(c1.n_labels);
        auto e1 = effective_data(btgt, c);
        auto e0 = effective_data(bsrc, c);
        ParallelSection::Comp oc;
        oc.x = apply(l.lam[rep], s.comp[c].x);
        oc.phi.assign(e1.group.n, std::vector<CMat>(ns1));
        auto offsets = [&](int t) {
            std::vector<size_t> off(ns0 + 1, 0);
            for (int ss = 0; ss < ns0; ++ss)
                off[ss + 1] = off[ss] + l.lam[rep](t, ss) * s.comp[c].x.mult[ss];
            return off;
        };
        for (int k = 0; k < e1.group.n; ++k) {
            int kmor = btgt.vg[c].elems[k];
            for (int t = 0; t < ns1; ++t) {
                int tsrc = e1.act_inv(k, t);
                auto to = offsets(t);
                auto so = offsets(tsrc);
                CMat m(to.back(), so.back());
                for (int ss = 0; ss < ns0; ++ss) {
                    int sp = e0.act(k, ss);
                    CMat kr = CMat::kron(l.th(kmor, t, ss), s.comp[c].phi[k][sp]);
                    for (size_t i = 0; i < kr.rows(); ++i)
                        for (size_t j = 0; j < kr.cols(); ++j) m(to[sp] + i, so[ss] + j) = kr(i, j);
                }
                oc.phi[k][t] = std::move(m);
            }
        }
        out.comp.push_back(std::move(oc));
    }
    return out;
}

struct Bundle2Mor {
    std::vector<std::vector<CMat>> eta;  // per object, blocks [t * nS_src + s]
};

inline ValidationReport validate_bundle_2mor(const Intertwiner2& a, const Intertwiner2& b,
                                             const Bundle2Mor& n) {
    if (a.src.get() != b.src.get() || a.tgt.get() != b.tgt.get())
        return ValidationReport::fail("2-morphism endpoints mismatch");
    const auto& g = *a.src->base;
    for (int x = 0; x < g.n_obj; ++x) {
        int c = a.src->comp_of(x);
        int ns0 = static_cast<int>(a.src->labels_at(c)), ns1 = static_cast<int>(a.tgt->labels_at(c));
        for (int t = 0; t < ns1; ++t)
            for (int s = 0; s < ns0; ++s) {
                const CMat& blk = n.eta[x][static_cast<size_t>(t) * ns0 + s];
                if (blk.rows() != b.lam[x](t, s) || blk.cols() != a.lam[x](t, s))
                    return ValidationReport::fail("2-morphism block shape mismatch");
            }
    }
    for (int m = 0; m < g.n_mor(); ++m) {
        int x = g.src(m), y = g.tgt(m);
        int c = a.src->comp_of(x);
        const auto& c0 = a.src->core_at(c);
        const auto& c1 = a.tgt->core_at(c);
        int ns0 = static_cast<int>(c0.n_labels);
        int w0 = a.src->w_of(m), w1 = a.tgt->w_of(m);
        for (int t = 0; t < static_cast<int>(c1.n_labels); ++t)
            for (int s = 0; s < ns0; ++s) {
                const CMat& ex = n.eta[x][static_cast<size_t>(c1.act(c1.group.inv[w1], t)) * ns0 + s];
                const CMat& ey = n.eta[y][static_cast<size_t>(t) * ns0 + c0.act(w0, s)];
                if (b.th(m, t, s) * ex != ey * a.th(m, t, s))
                    return ValidationReport::fail("2-morphism square fails");
            }
    }
    return ValidationReport::pass();
}

inline Bundle2Mor identity_bundle_2mor(const Intertwiner2& a) {
    Bundle2Mor n;
    const auto& g = *a.src->base;
    n.eta.resize(g.n_obj);
    for (int x = 0; x < g.n_obj; ++x) {
        int c = a.src->comp_of(x);
        int ns0 = static_cast<int>(a.src->labels_at(c)), ns1 = static_cast<int>(a.tgt->labels_at(c));
        n.eta[x].resize(static_cast<size_t>(ns1) * ns0);
        for (int t = 0; t < ns1; ++t)
            for (int s = 0; s < ns0; ++s)
                n.eta[x][static_cast<size_t>(t) * ns0 + s] = CMat::identity(a.lam[x](t, s));
    }
    return n;
}

// ---------------------------------------------------------------------------
// The internal-hom bundle: its parallel sections are exactly intertwiners.

inline Bundle3Ptr hom_bundle3(const Bundle3Ptr& a, const Bundle3Ptr& b) {
    if (a->base.get() != b->base.get()) throw std::invalid_argument("hom_bundle3: base mismatch");
    auto h = std::make_shared<TwoVecBundle>();
    h->base = a->base;
    h->sk = a->sk;
    h->vg = a->vg;
    h->n_root = std::lcm(a->n_root, b->n_root);
    unsigned nr = h->n_root;
    for (int c = 0; c < a->sk.n_comp(); ++c) {
        const auto& ca = a->core_at(c);
        const auto& cb = b->core_at(c);
        auto core = std::make_shared<BundleCore>();
        core->group = GroupTable::direct_product(ca.group, cb.group);
        int nsa = static_cast<int>(ca.n_labels), nsb = static_cast<int>(cb.n_labels);
        core->n_labels = static_cast<size_t>(nsb) * nsa;  // label (t, s) -> t * nsa + s
        core->n_root = nr;
        int n = core->group.n;
        core->action.assign(n, std::vector<int>(core->n_labels));
        core->alpha.assign(n, std::vector<std::vector<int>>(n, std::vector<int>(core->n_labels, 0)));
        for (int e = 0; e < n; ++e) {
            int ga = e / cb.group.n, gb = e % cb.group.n;
            for (int t = 0; t < nsb; ++t)
                for (int s = 0; s < nsa; ++s)
                    core->action[e][t * nsa + s] = cb.act(gb, t) * nsa + ca.act(ga, s);
        }
        int ra = static_cast<int>(nr / ca.n_root), rb = static_cast<int>(nr / cb.n_root);
        for (int e1 = 0; e1 < n; ++e1)
            for (int e2 = 0; e2 < n; ++e2)
                for (int t = 0; t < nsb; ++t)
                    for (int s = 0; s < nsa; ++s) {
                        int va = ca.a(e1 / cb.group.n, e2 / cb.group.n, s) * ra;
                        int vb = cb.a(e1 % cb.group.n, e2 % cb.group.n, t) * rb;
                        int nri = static_cast<int>(nr);
                        core->alpha[e1][e2][t * nsa + s] = ((vb - va) % nri + nri) % nri;
                    }
        h->core.push_back(std::move(core));
    }
    h->w.resize(a->base->n_mor());
    for (int m = 0; m < a->base->n_mor(); ++m) {
        int c = a->comp_of(a->base->src(m));
        h->w[m] = a->w_of(m) * b->core_at(c).group.n + b->w_of(m);
    }
    return h;
}

// Reinterpret a parallel section of the hom bundle as an intertwiner a -> b.
inline Intertwiner2 intertwiner_from_hom_section(const Bundle3Ptr& a, const Bundle3Ptr& b,
                                                 const Bundle3Ptr& homb, const ParallelSection& hs) {
    Intertwiner2 l;
    l.src = a;
    l.tgt = b;
    const auto& g = *a->base;
    l.lam.resize(g.n_obj);
    for (int x = 0; x < g.n_obj; ++x) {
        int c = a->comp_of(x);
        const auto& ca = a->core_at(c);
        const auto& cb = b->core_at(c);
        int nsa = static_cast<int>(ca.n_labels), nsb = static_cast<int>(cb.n_labels);
        int fa = a->w_of(a->sk.to_rep[x]), fb = b->w_of(b->sk.to_rep[x]);
        KVMap m(nsb, nsa);
        for (int t = 0; t < nsb; ++t)
            for (int s = 0; s < nsa; ++s)
                m(t, s) = hs.comp[c].x.mult[cb.act(fb, t) * nsa + ca.act(fa, s)];
        l.lam[x] = std::move(m);
    }
    l.theta.resize(g.n_mor());
    for (int m = 0; m < g.n_mor(); ++m) {
        int c = a->comp_of(g.src(m));
        const auto& ca = a->core_at(c);
        const auto& cb = b->core_at(c);
        int nsa = static_cast<int>(ca.n_labels), nsb = static_cast<int>(cb.n_labels);
        int wa = a->w_of(m);
        l.theta[m].resize(static_cast<size_t>(nsb) * nsa);
        for (int t = 0; t < nsb; ++t)
            for (int s = 0; s < nsa; ++s)
                l.theta[m][static_cast<size_t>(t) * nsa + s] =
                    section_transport_block(*homb, hs, m, t * nsa + ca.act(wa, s));
    }
    return l;
}

// Image of a bundle 2-morphism on a parallel section: a morphism between the
// two intertwiner images.
inline SectionMor two_mor_apply(const Intertwiner2& a, const Intertwiner2& b, const Bundle2Mor& n,
                                const ParallelSection& s) {
    const auto& bsrc = *a.src;
    SectionMor f;
    f.blocks.resize(bsrc.sk.n_comp());
    for (int c = 0; c < bsrc.sk.n_comp(); ++c) {
        int rep = bsrc.sk.rep_of[c];
        int ns0 = static_cast<int>(bsrc.labels_at(c));
        int ns1 = static_cast<int>(a.tgt->labels_at(c));
        f.blocks[c].resize(ns1);
        for (int t = 0; t < ns1; ++t) {
            std::vector<size_t> aoff(ns0 + 1, 0), boff(ns0 + 1, 0);
            for (int ss = 0; ss < ns0; ++ss) {
                aoff[ss + 1] = aoff[ss] + a.lam[rep](t, ss) * s.comp[c].x.mult[ss];
                boff[ss + 1] = boff[ss] + b.lam[rep](t, ss) * s.comp[c].x.mult[ss];
            }
            CMat m(boff.back(), aoff.back());
            for (int ss = 0; ss < ns0; ++ss) {
                CMat kr = CMat::kron(n.eta[rep][static_cast<size_t>(t) * ns0 + ss],
                                     CMat::identity(s.comp[c].x.mult[ss]));
                for (size_t i = 0; i < kr.rows(); ++i)
                    for (size_t j = 0; j < kr.cols(); ++j) m(boff[ss] + i, aoff[ss] + j) = kr(i, j);
            }
            f.blocks[c][t] = std::move(m);
        }
    }
    return f;
}

}  // namespace parsec
