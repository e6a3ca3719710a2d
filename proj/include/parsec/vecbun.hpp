#pragma once

// Vector bundles over groupoids and their parallel-section calculus:
// Par as a limit (kernel computation), pullback and pushforward maps, the
// groupoid-cardinality integral, composition laws and the equivariant
// Beck-Chevalley pentagon, and pull-act-push evaluation of decorated spans.

#include "parsec/groupoid.hpp"
#include "parsec/matrix.hpp"

#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace parsec {

struct VecBundle {
    Gpd base;
    std::vector<size_t> dim;  // per object
    std::vector<CMat> mat;    // per morphism, dim(tgt) x dim(src), invertible
};

using VecBundlePtr = std::shared_ptr<const VecBundle>;

inline VecBundlePtr make_bundle(Gpd base, std::vector<size_t> dim, std::vector<CMat> mat) {
    auto b = std::make_shared<VecBundle>();
    b->base = std::move(base);
    b->dim = std::move(dim);
    b->mat = std::move(mat);
    return b;
}

inline VecBundlePtr constant_bundle(const Gpd& base, size_t dim) {
    std::vector<size_t> dims(base->n_obj, dim);
    std::vector<CMat> mats(base->n_mor(), CMat::identity(dim));
    return make_bundle(base, std::move(dims), std::move(mats));
}

inline ValidationReport validate_bundle(const VecBundle& b) {
    const auto& g = *b.base;
    if (static_cast<int>(b.dim.size()) != g.n_obj || static_cast<int>(b.mat.size()) != g.n_mor())
        return ValidationReport::fail("bundle table size mismatch");
    for (int m = 0; m < g.n_mor(); ++m) {
        if (b.mat[m].rows() != b.dim[g.tgt(m)] || b.mat[m].cols() != b.dim[g.src(m)])
            return ValidationReport::fail("bundle matrix shape mismatch at morphism " + std::to_string(m));
        if (b.mat[m].rows() != b.mat[m].cols() || !try_inverse(b.mat[m]))
            return ValidationReport::fail("bundle matrix not invertible at morphism " + std::to_string(m));
    }
    for (int x = 0; x < g.n_obj; ++x)
        if (!b.mat[g.id_of[x]].is_identity()) return ValidationReport::fail("bundle breaks identities");
    for (int h = 0; h < g.n_mor(); ++h)
        for (int a : g.out[g.tgt(h)])
            if (b.mat[g.compose(a, h)] != b.mat[a] * b.mat[h])
                return ValidationReport::fail("bundle breaks composition");
    return ValidationReport::pass();
}

inline VecBundlePtr pullback_bundle(const GroupoidFunctor& phi, const VecBundlePtr& xi) {
    if (phi.cod.get() != xi->base.get()) throw std::invalid_argument("pullback_bundle: base mismatch");
    VecBundle b;
    b.base = phi.dom;
    b.dim.resize(phi.dom->n_obj);
    b.mat.resize(phi.dom->n_mor());
    for (int x = 0; x < phi.dom->n_obj; ++x) b.dim[x] = xi->dim[phi.ob[x]];
    for (int m = 0; m < phi.dom->n_mor(); ++m) b.mat[m] = xi->mat[phi.mo[m]];
    return std::make_shared<VecBundle>(std::move(b));
}

// ---------------------------------------------------------------------------
// Parallel sections as a kernel.  Sections are stored stacked over objects.

struct ParBasis {
    VecBundlePtr bundle;
    std::vector<size_t> offset;  // per object, into the stacked coordinate vector
    size_t total = 0;
    std::vector<std::vector<Cyclo>> vecs;  // basis sections

    size_t dim() const { return vecs.size(); }
    // value of the j-th basis section at object x, as a column
    CMat value(size_t j, int x) const {
        size_t d = bundle->dim[x];
        CMat v(d, 1);
        for (size_t i = 0; i < d; ++i) v(i, 0) = vecs[j][offset[x] + i];
        return v;
    }
};

using ParBasisPtr = std::shared_ptr<const ParBasis>;

inline bool section_is_parallel(const VecBundle& b, const std::vector<size_t>& offset,
                                const std::vector<Cyclo>& v) {
    const auto& g = *b.base;
    for (int m = 0; m < g.n_mor(); ++m) {
        int x = g.src(m), y = g.tgt(m);
        for (size_t i = 0; i < b.dim[y]; ++i) {
            Cyclo acc;
            for (size_t j = 0; j < b.dim[x]; ++j) acc = acc + b.mat[m](i, j) * v[offset[x] + j];
            if (!(acc == v[offset[y] + i])) return false;
        }
    }
    return true;
}

// Basis of { (v_x)_x : xi(g) v_src = v_tgt for all g }, via the deterministic
// kernel routine on a sufficient constraint set (framing edges plus vertex
// automorphisms; any other morphism is a composite of these).
inline ParBasisPtr par_space(const VecBundlePtr& xi) {
    auto pb = std::make_shared<ParBasis>();
    pb->bundle = xi;
    const auto& g = *xi->base;
    pb->offset.resize(g.n_obj);
    for (int x = 0; x < g.n_obj; ++x) {
        pb->offset[x] = pb->total;
        pb->total += xi->dim[x];
    }
    auto sk = skeleton_info(g);
    std::vector<int> rows;  // constraint morphisms
    for (int x = 0; x < g.n_obj; ++x)
        if (sk.to_rep[x] != g.id_of[x]) rows.push_back(sk.to_rep[x]);
    for (int c = 0; c < sk.n_comp(); ++c)
        for (int m : sk.vertex[c])
            if (m != g.id_of[sk.rep_of[c]]) rows.push_back(m);
    size_t nrows = 0;
    for (int m : rows) nrows += xi->dim[g.tgt(m)];
    CMat a(nrows, pb->total);
    size_t r = 0;
    for (int m : rows) {
        int x = g.src(m), y = g.tgt(m);
        for (size_t i = 0; i < xi->dim[y]; ++i) {
            for (size_t j = 0; j < xi->dim[x]; ++j) a(r + i, pb->offset[x] + j) = xi->mat[m](i, j);
            a(r + i, pb->offset[y] + i) = a(r + i, pb->offset[y] + i) - Cyclo::one();
        }
        r += xi->dim[y];
    }
    pb->vecs = kernel_basis(a);
    return pb;
}

// Express a stacked section in the basis; throws when not in the span.
inline std::vector<Cyclo> express_in_basis(const ParBasis& pb, const std::vector<Cyclo>& v) {
    CMat bm(pb.total, pb.dim());
    for (size_t j = 0; j < pb.dim(); ++j)
        for (size_t i = 0; i < pb.total; ++i) bm(i, j) = pb.vecs[j][i];
    auto sol = solve_linear(bm, v);
    if (!sol) throw std::logic_error("section does not lie in the parallel subspace");
    return *sol;
}


// Express many stacked sections at once (columns); single elimination.
inline CMat express_columns(const ParBasis& pb, const CMat& cols) {
    CMat bm(pb.total, pb.dim());
    for (size_t j = 0; j < pb.dim(); ++j)
        for (size_t i = 0; i < pb.total; ++i) bm(i, j) = pb.vecs[j][i];
    auto sol = solve_matrix(bm, cols);
    if (!sol) throw std::logic_error("sections do not lie in the parallel subspace");
    return *sol;
}

struct SectionMap {
    ParBasisPtr source, target;
    CMat matrix;  // target coords = matrix * source coords
};

inline SectionMap compose_maps(const SectionMap& g, const SectionMap& f) {
    return {f.source, g.target, g.matrix * f.matrix};
}

// ---------------------------------------------------------------------------
// Pullback, pushforward, and the action of natural isomorphisms.

inline SectionMap pullback_map(const GroupoidFunctor& phi, const VecBundlePtr& xi, const ParBasisPtr& par_xi,
                               const ParBasisPtr& par_pull) {
    const auto& d = *phi.dom;
    CMat cols(par_pull->total, par_xi->dim());
    for (size_t j = 0; j < par_xi->dim(); ++j)
        for (int x = 0; x < d.n_obj; ++x)
            for (size_t i = 0; i < par_pull->bundle->dim[x]; ++i)
                cols(par_pull->offset[x] + i, j) = par_xi->vecs[j][par_xi->offset[phi.ob[x]] + i];
    return {par_xi, par_pull, express_columns(*par_pull, cols)};
}

// (φ_* s)(y) = Σ_{[x,g] ∈ π₀(φ^{-1}[y])} ξ(g) s(x) / |Aut(x,g)|
inline SectionMap pushforward_map(const GroupoidFunctor& phi, const VecBundlePtr& xi,
                                  const ParBasisPtr& par_pull, const ParBasisPtr& par_xi) {
    const auto& cod = *phi.cod;
    // per object y, the classes of the homotopy fiber with minimal-id reps
    std::vector<std::vector<std::pair<int, Rational>>> classes(cod.n_obj);  // (fiber obj, weight)
    std::vector<HomotopyFiber> fibers;
    fibers.reserve(cod.n_obj);
    for (int y = 0; y < cod.n_obj; ++y) {
        fibers.push_back(homotopy_fiber(phi, y));
        for (const auto& cls : pi0(*fibers[y].fib))
            classes[y].emplace_back(cls.representative, Rational(1, Int(cls.aut_order)));
    }
    CMat cols(par_xi->total, par_pull->dim());
    for (size_t j = 0; j < par_pull->dim(); ++j) {
        std::vector<Cyclo> w(par_xi->total);
        for (int y = 0; y < cod.n_obj; ++y) {
            for (auto [rep, wt] : classes[y]) {
                auto [x, g] = fibers[y].objs[rep];
                CMat val = xi->mat[g] * par_pull->value(j, x);
                for (size_t i = 0; i < xi->dim[y]; ++i)
                    w[par_xi->offset[y] + i] = w[par_xi->offset[y] + i] + Cyclo(wt) * val(i, 0);
            }
        }
        if (!section_is_parallel(*xi, par_xi->offset, w))
            throw std::logic_error("pushforward output is not parallel");
        for (size_t i = 0; i < w.size(); ++i) cols(i, j) = w[i];
    }
    return {par_pull, par_xi, express_columns(*par_xi, cols)};
}

// ξ(η)_* : Par φ*ξ -> Par φ'*ξ, blockwise application of ξ(η_x).
inline SectionMap nat_iso_action(const NatIso& eta, const VecBundlePtr& xi, const ParBasisPtr& par_src,
                                 const ParBasisPtr& par_tgt) {
    const auto& d = *eta.source.dom;
    CMat cols(par_tgt->total, par_src->dim());
    for (size_t j = 0; j < par_src->dim(); ++j)
        for (int x = 0; x < d.n_obj; ++x) {
            CMat val = xi->mat[eta.comp[x]] * par_src->value(j, x);
            for (size_t i = 0; i < val.rows(); ++i) cols(par_tgt->offset[x] + i, j) = val(i, 0);
        }
    return {par_src, par_tgt, express_columns(*par_tgt, cols)};
}

// ---------------------------------------------------------------------------
// Composition laws and the equivariant Beck-Chevalley pentagon.

struct CheckReport {
    bool ok = true;
    std::string witness;
    static CheckReport pass() { return {}; }
    static CheckReport fail(std::string w) { return {false, std::move(w)}; }
};

inline CheckReport check_composition_laws(const GroupoidFunctor& phi, const GroupoidFunctor& psi,
                                          const VecBundlePtr& xi) {
    // pullbacks: (ψ∘φ)* = φ* ∘ ψ*
    auto psixi = pullback_bundle(psi, xi);
    auto comp = compose_functors(psi, phi);
    auto compxi = pullback_bundle(comp, xi);
    auto par_xi = par_space(xi);
    auto par_psixi = par_space(psixi);
    auto par_compxi = par_space(compxi);
    auto lhs = pullback_map(comp, xi, par_xi, par_compxi);
    auto rhs = compose_maps(pullback_map(phi, psixi, par_psixi, par_compxi),
                            pullback_map(psi, xi, par_xi, par_psixi));
    if (lhs.matrix != rhs.matrix) return CheckReport::fail("pullback composition law fails");
    // pushforwards: (ψ∘φ)_* = ψ_* ∘ φ_*
    auto lhs2 = pushforward_map(comp, xi, par_compxi, par_xi);
    auto rhs2 = compose_maps(pushforward_map(psi, xi, par_psixi, par_xi),
                             pushforward_map(phi, psixi, par_compxi, par_psixi));
    if (lhs2.matrix != rhs2.matrix) return CheckReport::fail("pushforward composition law fails");
    return CheckReport::pass();
}

inline CheckReport check_beck_chevalley(const GroupoidFunctor& psi, const GroupoidFunctor& phi,
                                        const VecBundlePtr& xi) {
    if (psi.cod.get() != phi.cod.get() || phi.cod.get() != xi->base.get())
        return CheckReport::fail("cospan endpoints mismatch");
    auto hp = homotopy_pullback(phi, psi);
    auto phixi = pullback_bundle(phi, xi);
    auto psixi = pullback_bundle(psi, xi);
    auto topxi = pullback_bundle(compose_functors(phi, hp.pi_gamma), xi);
    auto botxi = pullback_bundle(compose_functors(psi, hp.pi_lambda), xi);
    auto par_xi = par_space(xi);
    auto par_phixi = par_space(phixi);
    auto par_psixi = par_space(psixi);
    auto par_top = par_space(topxi);
    auto par_bot = par_space(botxi);
    auto lhs = compose_maps(pullback_map(psi, xi, par_xi, par_psixi),
                            pushforward_map(phi, xi, par_phixi, par_xi));
    auto rhs = compose_maps(
        pushforward_map(hp.pi_lambda, psixi, par_bot, par_psixi),
        compose_maps(nat_iso_action(hp.eta, xi, par_top, par_bot),
                     pullback_map(hp.pi_gamma, phixi, par_phixi, par_top)));
    if (lhs.matrix != rhs.matrix) return CheckReport::fail("pentagon fails");
    return CheckReport::pass();
}

// Block map ⊕_{π₀(G)} V -> V with weights 1/|Aut|; the groupoid-cardinality
// integral of the constant bundle.
inline SectionMap integrate_constant(const Gpd& g, size_t vdim, const Gpd& star) {
    auto cb = constant_bundle(g, vdim);
    auto vb = constant_bundle(star, vdim);
    auto par_cb = par_space(cb);
    auto par_vb = par_space(vb);
    auto classes = pi0(*g);
    CMat cols(vdim, par_cb->dim());
    for (size_t j = 0; j < par_cb->dim(); ++j)
        for (const auto& cls : classes) {
            CMat val = par_cb->value(j, cls.representative);
            for (size_t i = 0; i < vdim; ++i)
                cols(i, j) = cols(i, j) + Cyclo(Rational(1, Int(cls.aut_order))) * val(i, 0);
        }
    return {par_cb, par_vb, express_columns(*par_vb, cols)};
}

// ---------------------------------------------------------------------------
// Decorated spans of vector bundles (the categorical pull-act-push functor).

struct Tier2Span {
    GroupoidFunctor r0, r1;  // legs Λ -> Γ0, Λ -> Γ1
    VecBundlePtr xi0, xi1;   // bundles on Γ0, Γ1
    std::vector<CMat> mu;    // per apex object, xi1(r1 x)-by-xi0(r0 x), natural
};

inline ValidationReport validate_tier2_span(const Tier2Span& s) {
    if (s.r0.dom.get() != s.r1.dom.get()) return ValidationReport::fail("span legs domain mismatch");
    if (s.r0.cod.get() != s.xi0->base.get() || s.r1.cod.get() != s.xi1->base.get())
        return ValidationReport::fail("span bundle bases mismatch");
    const auto& apex = *s.r0.dom;
    if (static_cast<int>(s.mu.size()) != apex.n_obj)
        return ValidationReport::fail("intertwiner table size mismatch");
    for (int x = 0; x < apex.n_obj; ++x)
        if (s.mu[x].rows() != s.xi1->dim[s.r1.ob[x]] || s.mu[x].cols() != s.xi0->dim[s.r0.ob[x]])
            return ValidationReport::fail("intertwiner shape mismatch");
    for (int m = 0; m < apex.n_mor(); ++m) {
        int x = apex.src(m), y = apex.tgt(m);
        if (s.mu[y] * s.xi0->mat[s.r0.mo[m]] != s.xi1->mat[s.r1.mo[m]] * s.mu[x])
            return ValidationReport::fail("intertwiner not natural at morphism " + std::to_string(m));
    }
    return ValidationReport::pass();
}

// Composition by homotopy pullback over the shared foot; the composite
// intertwiner is π'*μ' ∘ ξ1(η) ∘ π*μ.
inline Tier2Span compose_tier2_spans(const Tier2Span& m, const Tier2Span& mp) {
    if (m.xi1.get() != mp.xi0.get() || m.r1.cod.get() != mp.r0.cod.get())
        throw std::invalid_argument("compose_tier2_spans: feet mismatch");
    auto hp = homotopy_pullback(m.r1, mp.r0);
    Tier2Span out;
    out.r0 = compose_functors(m.r0, hp.pi_gamma);
    out.r1 = compose_functors(mp.r1, hp.pi_lambda);
    out.xi0 = m.xi0;
    out.xi1 = mp.xi1;
    out.mu.resize(hp.pb->n_obj);
    for (int z = 0; z < hp.pb->n_obj; ++z) {
        auto [y, yp, g] = hp.objs[z];
        out.mu[z] = mp.mu[yp] * (m.xi1->mat[g] * m.mu[y]);
    }
    return out;
}

struct Tier2SpanPar {
    ParBasisPtr par0, par1;  // Par xi0, Par xi1
    SectionMap map;          // the composite pushforward ∘ action ∘ pullback
};

inline Tier2SpanPar rep_span_par(const Tier2Span& s) {
    auto rep = validate_tier2_span(s);
    if (!rep.ok) throw std::invalid_argument("rep_span_par: " + rep.message);
    auto pull0 = pullback_bundle(s.r0, s.xi0);
    auto pull1 = pullback_bundle(s.r1, s.xi1);
    auto par0 = par_space(s.xi0);
    auto par1 = par_space(s.xi1);
    auto par_p0 = par_space(pull0);
    auto par_p1 = par_space(pull1);
    auto pull = pullback_map(s.r0, s.xi0, par0, par_p0);
    // action of the intertwiner on sections
    const auto& apex = *s.r0.dom;
    CMat cols(par_p1->total, par_p0->dim());
    for (size_t j = 0; j < par_p0->dim(); ++j)
        for (int x = 0; x < apex.n_obj; ++x) {
            CMat val = s.mu[x] * par_p0->value(j, x);
            for (size_t i = 0; i < val.rows(); ++i) cols(par_p1->offset[x] + i, j) = val(i, 0);
        }
    CMat act = express_columns(*par_p1, cols);
    auto push = pushforward_map(s.r1, s.xi1, par_p1, par1);
    Tier2SpanPar out;
    out.par0 = par0;
    out.par1 = par1;
    out.map = compose_maps(push, compose_maps(SectionMap{par_p0, par_p1, std::move(act)}, pull));
    return out;
}

}  // namespace parsec
