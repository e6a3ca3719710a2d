#pragma once

// The fiber-limit engine.  A pushed parallel section is realized, per target
// object, as the limit of an explicit Vect^S-valued bundle over the homotopy
// fiber of the pushing leg; limits are computed by skeletonizing the fiber
// and taking averaging-projector images at the component representatives.
// All multiplicity data is anchored in the frames of the source base, which
// makes the comparison functors between different pull-push composites act
// by plain reindexing.

#include "parsec/twovecbun.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace parsec {

struct LimitRealization {
    GroupoidFunctor r0, r1;
    Bundle3Ptr rho0, rho1;
    std::shared_ptr<const Intertwiner2> lam;
    std::shared_ptr<const ParallelSection> sec;
    int y_target = 0, comp1 = 0;
    int t_hat = 0;   // morphism y_target -> rep(comp1) in Γ1
    int anchor = 0;  // core element prefixed to all fiber frames
    const BundleCore* core1 = nullptr;
    int ns1 = 0;

    HomotopyFiber hf;
    SkeletonInfo fsk;
    std::vector<int> frame;  // per fiber object: w1(t_hat ∘ g)
    std::vector<int> c0;     // per fiber object: Γ0-component of r0(y)
    std::vector<int> f0;     // per fiber object: w0 of the Γ0 framing of r0(y)

    struct LabelBasis {
        std::vector<CMat> comp_basis;     // per fiber component: vertex-dim x k_c
        std::vector<size_t> comp_offset;  // per fiber component, into coordinates
        size_t dim = 0;
    };
    std::vector<LabelBasis> bases;  // per ambient label

    size_t dim(int t) const { return bases[t].dim; }

    int lam_row_index(int i, int t) const { return core1->act(core1->group.inv[frame[i]], t); }

    // summand offsets over p for fiber object i at ambient label t
    std::vector<size_t> offsets(int i, int t) const {
        int y = hf.objs[i].first;
        const auto& core0 = rho0->core_at(c0[i]);
        int ns0 = static_cast<int>(core0.n_labels);
        int lt = lam_row_index(i, t);
        std::vector<size_t> off(ns0 + 1, 0);
        for (int p = 0; p < ns0; ++p)
            off[p + 1] = off[p] + lam->lam[y](lt, p) * sec->comp[c0[i]].x.mult[core0.act(f0[i], p)];
        return off;
    }
    size_t vertex_dim(int i, int t) const { return offsets(i, t).back(); }

    // transition along a fiber morphism, per ambient label
    CMat transition(int m, int t) const {
        int i = hf.fib->src(m), ip = hf.fib->tgt(m);
        int h = hf.mor_wit[m];  // apex morphism
        int y = hf.objs[i].first, yp = hf.objs[ip].first;
        const auto& core0 = rho0->core_at(c0[i]);
        int ns0 = static_cast<int>(core0.n_labels);
        int w1h = lam->tgt->w_of(h);
        Cyclo sc1 = core1->root(-(long long)core1->a(frame[ip], w1h, t));
        // Γ0 transport of the section along r0(h)
        int e = r0.mo[h];
        int w0e = rho0->w_of(e);
        int lt = lam_row_index(ip, t);
        auto soff = offsets(i, t);
        auto toff = offsets(ip, t);
        CMat out(toff.back(), soff.back());
        for (int p = 0; p < ns0; ++p) {
            int pp = core0.act(w0e, p);
            const CMat& th = lam->th(h, lt, p);
            CMat xb = section_transport_block(*rho0, *sec, e, pp);
            CMat kr = CMat::kron(th, xb);
            for (size_t a = 0; a < kr.rows(); ++a)
                for (size_t b = 0; b < kr.cols(); ++b) out(toff[pp] + a, soff[p] + b) = sc1 * kr(a, b);
        }
        return out;
    }

    // value of the j-th basis family of label t at an arbitrary fiber object
    CMat eval(int t, size_t j, int i) const {
        int c = fsk.comp_of[i];
        const auto& lb = bases[t];
        // locate the owning component of family j
        size_t local = j;
        int owner = -1;
        for (int fc = 0; fc < fsk.n_comp(); ++fc) {
            size_t k = lb.comp_basis[fc].cols();
            if (j >= lb.comp_offset[fc] && j < lb.comp_offset[fc] + k) {
                owner = fc;
                local = j - lb.comp_offset[fc];
                break;
            }
        }
        if (owner != c) return CMat(vertex_dim(i, t), 1);  // supported elsewhere
        CMat at_rep = lb.comp_basis[c].col(local);
        int q = fsk.to_rep[i];
        if (q == hf.fib->id_of[i]) return at_rep;
        return inverse(transition(q, t)) * at_rep;
    }

    // express values (given at every fiber-component representative) in the basis
    std::vector<Cyclo> express(int t, const std::vector<CMat>& vals) const {
        const auto& lb = bases[t];
        std::vector<Cyclo> coords(lb.dim);
        for (int fc = 0; fc < fsk.n_comp(); ++fc) {
            size_t k = lb.comp_basis[fc].cols();
            if (k == 0) {
                if (!vals[fc].is_zero()) throw std::logic_error("express: value outside the limit");
                continue;
            }
            auto sol = solve_matrix(lb.comp_basis[fc], vals[fc]);
            if (!sol) throw std::logic_error("express: value outside the limit");
            for (size_t a = 0; a < k; ++a) coords[lb.comp_offset[fc] + a] = (*sol)(a, 0);
        }
        return coords;
    }

    CMat express_col(int t, const std::vector<CMat>& vals) const {
        auto v = express(t, vals);
        CMat c(v.size(), 1);
        for (size_t i = 0; i < v.size(); ++i) c(i, 0) = v[i];
        return c;
    }
};

// Realize the limit of the pull-act-push diagram of a decorated span over the
// homotopy fiber of r1 at y_target.
inline LimitRealization realize_span_push(const GroupoidFunctor& r0, const Bundle3Ptr& rho0,
                                          const GroupoidFunctor& r1, const Bundle3Ptr& rho1,
                                          const Intertwiner2& lam, const ParallelSection& s,
                                          int y_target, std::optional<int> anchor = {}) {
    LimitRealization r;
    r.r0 = r0;
    r.r1 = r1;
    r.rho0 = rho0;
    r.rho1 = rho1;
    r.lam = std::make_shared<Intertwiner2>(lam);
    r.sec = std::make_shared<ParallelSection>(s);
    r.y_target = y_target;
    r.comp1 = rho1->comp_of(y_target);
    r.t_hat = rho1->sk.to_rep[y_target];
    r.core1 = &rho1->core_at(r.comp1);
    r.ns1 = static_cast<int>(r.core1->n_labels);
    r.anchor = anchor.value_or(rho1->w_of(r.t_hat));
    r.hf = homotopy_fiber(r1, y_target);
    r.fsk = skeleton_info(*r.hf.fib);
    int n = static_cast<int>(r.hf.objs.size());
    r.frame.resize(n);
    r.c0.resize(n);
    r.f0.resize(n);
    const auto& g1 = *rho1->base;
    for (int i = 0; i < n; ++i) {
        auto [y, g] = r.hf.objs[i];
        r.frame[i] = r.core1->group.mul(r.anchor, rho1->w_of(g));
        int x0 = r0.ob[y];
        r.c0[i] = rho0->comp_of(x0);
        r.f0[i] = rho0->w_of(rho0->sk.to_rep[x0]);
    }
    // bases per label by averaging over fiber-component vertex groups
    r.bases.resize(r.ns1);
    for (int t = 0; t < r.ns1; ++t) {
        auto& lb = r.bases[t];
        lb.comp_basis.resize(r.fsk.n_comp());
        lb.comp_offset.resize(r.fsk.n_comp());
        for (int fc = 0; fc < r.fsk.n_comp(); ++fc) {
            int rep = r.fsk.rep_of[fc];
            size_t d = r.vertex_dim(rep, t);
            CMat p(d, d);
            const auto& auts = r.fsk.vertex[fc];
            for (int h : auts) p = p + r.transition(h, t);
            p = Cyclo(Rational(1, Int(auts.size()))) * p;
            CMat probe = p;
            auto pivots = rref_inplace(probe);
            CMat basis(d, pivots.size());
            for (size_t k = 0; k < pivots.size(); ++k)
                for (size_t a = 0; a < d; ++a) basis(a, k) = p(a, pivots[k]);
            lb.comp_offset[fc] = lb.dim;
            lb.dim += pivots.size();
            lb.comp_basis[fc] = std::move(basis);
        }
    }
    return r;
}

// Extract the abstract parallel section from realizations at each component
// representative of the target base.
struct PushedSection {
    ParallelSection sec;
    std::vector<LimitRealization> real;  // per target-base component
};

inline PushedSection extract_pushed(const GroupoidFunctor& r0, const Bundle3Ptr& rho0,
                                    const GroupoidFunctor& r1, const Bundle3Ptr& rho1,
                                    const Intertwiner2& lam, const ParallelSection& s) {
    PushedSection out;
    const auto& g1 = *rho1->base;
    for (int c1 = 0; c1 < rho1->sk.n_comp(); ++c1) {
        int y0 = rho1->sk.rep_of[c1];
        out.real.push_back(realize_span_push(r0, rho0, r1, rho1, lam, s, y0));
        const auto& r = out.real.back();
        ParallelSection::Comp oc;
        oc.x.mult.resize(r.ns1);
        for (int t = 0; t < r.ns1; ++t) oc.x.mult[t] = r.dim(t);
        auto e = effective_data(*rho1, c1);
        oc.phi.assign(e.group.n, std::vector<CMat>(r.ns1));
        for (int k = 0; k < e.group.n; ++k) {
            int km = rho1->vg[c1].elems[k];
            int kbar = rho1->w_of(km);
            for (int t = 0; t < r.ns1; ++t) {
                int tp = r.core1->act(r.core1->group.inv[kbar], t);
                CMat m(r.dim(t), r.dim(tp));
                for (size_t j = 0; j < r.dim(tp); ++j) {
                    std::vector<CMat> vals(r.fsk.n_comp());
                    for (int fc = 0; fc < r.fsk.n_comp(); ++fc) {
                        int rep = r.fsk.rep_of[fc];
                        auto [y, g] = r.hf.objs[rep];
                        int gp = g1.compose(g1.inv_of[km], g);
                        int ip = r.hf.find_obj(y, gp);
                        Cyclo sc = r.core1->root(r.core1->a(kbar, r.frame[ip], t));
                        vals[fc] = sc * r.eval(tp, j, ip);
                    }
                    CMat col = r.express_col(t, vals);
                    for (size_t a = 0; a < r.dim(t); ++a) m(a, j) = col(a, 0);
                }
                oc.phi[k][t] = std::move(m);
            }
        }
        out.sec.comp.push_back(std::move(oc));
    }
    return out;
}

// Pushforward of a parallel section along a functor into the bundle's base.
inline PushedSection pushforward1(const GroupoidFunctor& phi, const Bundle3Ptr& rho,
                                  const ParallelSection& s) {
    auto pulled = pullback1(phi, rho);
    auto idl = identity_intertwiner(pulled);
    return extract_pushed(identity_functor(phi.dom), pulled, phi, rho, idl, s);
}

// ---------------------------------------------------------------------------
// Maps between realized limits along fiber functors.

using VertexBlocks = std::function<CMat(int /*dst fiber obj*/, int /*label*/)>;

// Pullback map lim D -> lim u*D for u : dst.fib -> src.fib whose pulled
// diagram matches dst's up to the optional vertexwise blocks.
inline std::vector<CMat> limit_pullback(const LimitRealization& src, const LimitRealization& dst,
                                        const GroupoidFunctor& u, const VertexBlocks& blocks = {}) {
    std::vector<CMat> out(src.ns1);
    for (int t = 0; t < src.ns1; ++t) {
        CMat m(dst.dim(t), src.dim(t));
        for (size_t j = 0; j < src.dim(t); ++j) {
            std::vector<CMat> vals(dst.fsk.n_comp());
            for (int fc = 0; fc < dst.fsk.n_comp(); ++fc) {
                int rep = dst.fsk.rep_of[fc];
                CMat v = src.eval(t, j, u.ob[rep]);
                vals[fc] = blocks ? blocks(rep, t) * v : v;
            }
            CMat col = dst.express_col(t, vals);
            for (size_t a = 0; a < dst.dim(t); ++a) m(a, j) = col(a, 0);
        }
        out[t] = std::move(m);
    }
    return out;
}

// Pushforward map lim u*D -> lim D with groupoid-cardinality weights over the
// fibers of u.
inline std::vector<CMat> limit_pushforward(const LimitRealization& src, const LimitRealization& dst,
                                           const GroupoidFunctor& u, const VertexBlocks& blocks = {}) {
    std::vector<CMat> out(dst.ns1);
    // per dst fiber-component representative, the π0 classes of u over it
    std::vector<std::vector<std::tuple<int, int, Rational>>> classes(dst.fsk.n_comp());
    for (int fc = 0; fc < dst.fsk.n_comp(); ++fc) {
        auto uf = homotopy_fiber(u, dst.fsk.rep_of[fc]);
        for (const auto& cls : pi0(*uf.fib)) {
            auto [z, mwit] = uf.objs[cls.representative];
            classes[fc].emplace_back(z, mwit, Rational(1, Int(cls.aut_order)));
        }
    }
    for (int t = 0; t < dst.ns1; ++t) {
        CMat m(dst.dim(t), src.dim(t));
        for (size_t j = 0; j < src.dim(t); ++j) {
            std::vector<CMat> vals(dst.fsk.n_comp());
            for (int fc = 0; fc < dst.fsk.n_comp(); ++fc) {
                int rep = dst.fsk.rep_of[fc];
                CMat acc(dst.vertex_dim(rep, t), 1);
                for (auto [z, mwit, wt] : classes[fc]) {
                    CMat v = src.eval(t, j, z);
                    if (blocks) v = blocks(z, t) * v;
                    acc = acc + Cyclo(wt) * (dst.transition(mwit, t) * v);
                }
                vals[fc] = std::move(acc);
            }
            CMat col = dst.express_col(t, vals);
            for (size_t a = 0; a < dst.dim(t); ++a) m(a, j) = col(a, 0);
        }
        out[t] = std::move(m);
    }
    return out;
}

// Coherence transport of a realized limit along an automorphism of the
// target object, as per-label matrices from label act^{-1}(e) t to t.
inline std::vector<CMat> fiber_vertex_transport(const LimitRealization& r, int e_mor) {
    const auto& g1 = *r.rho1->base;
    const auto& grp = r.core1->group;
    int ebar = grp.mul(grp.mul(r.anchor, r.rho1->w_of(e_mor)), grp.inv[r.anchor]);
    std::vector<CMat> out(r.ns1);
    for (int t = 0; t < r.ns1; ++t) {
        int tp = r.core1->act(r.core1->group.inv[ebar], t);
        CMat m(r.dim(t), r.dim(tp));
        for (size_t j = 0; j < r.dim(tp); ++j) {
            std::vector<CMat> vals(r.fsk.n_comp());
            for (int fc = 0; fc < r.fsk.n_comp(); ++fc) {
                int rep = r.fsk.rep_of[fc];
                auto [y, g] = r.hf.objs[rep];
                int gp = g1.compose(g1.inv_of[e_mor], g);
                int ip = r.hf.find_obj(y, gp);
                Cyclo sc = r.core1->root(r.core1->a(ebar, r.frame[ip], t));
                vals[fc] = sc * r.eval(tp, j, ip);
            }
            CMat col = r.express_col(t, vals);
            for (size_t a = 0; a < r.dim(t); ++a) m(a, j) = col(a, 0);
        }
        out[t] = std::move(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pull and push 2-morphisms of a weakly commuting square, and the two-level
// equivariant Beck-Chevalley check.

struct SquareMaps {
    LimitRealization upper;  // limit over the φ-fiber at ψ(y)
    LimitRealization lower;  // limit over the Q-fiber at y
    GroupoidFunctor f;       // comparison functor between the fibers
    std::vector<CMat> pull;  // per label: upper -> lower
    std::vector<CMat> push;  // per label: lower -> upper
};

// square (P : Π -> Γ, Q : Π -> Λ, φ : Γ -> Ω, ψ : Λ -> Ω, η : φP => ψQ),
// s parallel for φ*ρ, y an object of Λ.  The lower realization is anchored
// in the frame of ψ(y) so the fiber comparison acts by plain reindexing.
inline SquareMaps square_pull_push(const WeakSquare& sq, const Bundle3Ptr& rho,
                                   const ParallelSection& s, int y) {
    SquareMaps out;
    auto phirho = pullback1(sq.phi, rho);
    auto idl = identity_intertwiner(phirho);
    int psy = sq.psi.ob[y];
    out.upper = realize_span_push(identity_functor(sq.phi.dom), phirho, sq.phi, rho, idl, s, psy);
    auto natl = nat_iso_intertwiner(sq.eta, rho);
    auto psirho = pullback1(sq.psi, rho);
    int anchor = rho->w_of(rho->sk.to_rep[psy]);
    out.lower = realize_span_push(sq.p, phirho, sq.q, psirho, natl, s, y, anchor);
    out.f = fiber_comparison_functor(sq, out.lower.hf, out.upper.hf, y);
    out.pull = limit_pullback(out.upper, out.lower, out.f);
    out.push = limit_pushforward(out.lower, out.upper, out.f);
    return out;
}

struct BCReport {
    bool ok = true;
    std::string witness;
};

}  // namespace parsec
