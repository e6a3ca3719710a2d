#include <doctest.h>

#include "parsec/random_gen.hpp"
#include "parsec/vecbun.hpp"

using namespace parsec;

namespace {

Cyclo cy(long q) { return Cyclo::from_rational(rat(q)); }
Cyclo cy(long n, long d) { return Cyclo::from_rational(rat(n, d)); }

VecBundlePtr z2_bundle(const Gpd& bz2, CMat sigma) {
    // bundle on *//Z2 sending the generator to sigma
    std::vector<size_t> dims{sigma.rows()};
    std::vector<CMat> mats(2);
    mats[bz2->id_of[0]] = CMat::identity(sigma.rows());
    int gen = bz2->id_of[0] == 0 ? 1 : 0;
    mats[gen] = sigma;
    return make_bundle(bz2, dims, mats);
}

CMat swap2() {
    CMat m(2, 2);
    m(0, 1) = Cyclo::one();
    m(1, 0) = Cyclo::one();
    return m;
}

}  // namespace

TEST_CASE("par_space basics") {
    auto bz2 = group_groupoid(GroupTable::cyclic(2));
    // trivial 1-dim bundle: one parallel section
    auto triv = constant_bundle(bz2, 1);
    CHECK(par_space(triv)->dim() == 1);
    // sign representation: none
    CMat sgn(1, 1);
    sgn(0, 0) = cy(-1);
    CHECK(par_space(z2_bundle(bz2, sgn))->dim() == 0);
    // regular representation (swap): one
    auto reg = z2_bundle(bz2, swap2());
    REQUIRE(validate_bundle(*reg).ok);
    auto pb = par_space(reg);
    REQUIRE(pb->dim() == 1);
    CHECK(pb->value(0, 0)(0, 0) == pb->value(0, 0)(1, 0));  // invariant vector
}

TEST_CASE("pullback bundle and map") {
    auto star = terminal_groupoid();
    auto bz2 = group_groupoid(GroupTable::cyclic(2));
    auto reg = z2_bundle(bz2, swap2());
    auto par_reg = par_space(reg);

    // identity pullback
    auto idf = identity_functor(bz2);
    auto same = pullback_bundle(idf, reg);
    CHECK(same->mat == reg->mat);
    auto par_same = par_space(same);
    auto pm = pullback_map(idf, reg, par_reg, par_same);
    CHECK(pm.matrix.is_identity());

    // terminal pullback of a 2-dim space is the constant bundle
    auto t = terminal_functor(bz2, star);
    auto v2 = constant_bundle(star, 2);
    auto cst = pullback_bundle(t, v2);
    for (const auto& m : cst->mat) CHECK(m.is_identity());

    // inclusion *//{e} -> *//Z2 on the regular representation: the invariants
    // inject into the 2-dim fiber
    GroupoidFunctor incl;
    incl.dom = star;
    incl.cod = bz2;
    incl.ob = {0};
    incl.mo = {bz2->id_of[0]};
    auto res = pullback_bundle(incl, reg);
    auto par_res = par_space(res);
    CHECK(par_res->dim() == 2);
    auto inj = pullback_map(incl, reg, par_reg, par_res);
    CHECK(rank(inj.matrix) == 1);

    // pullback along an equivalence is invertible
    auto tp = action_groupoid(GroupTable::cyclic(2), 3, {{0, 1, 2}, {1, 0, 2}});
    Rng rng(3);
    auto xi = random_vec_bundle(tp, rng);
    REQUIRE(validate_bundle(*xi).ok);
    auto sk = skeleton(tp);
    REQUIRE(check_equivalence(sk.inclusion).is_equivalence);
    auto pxi = pullback_bundle(sk.inclusion, xi);
    auto a = par_space(xi);
    auto b = par_space(pxi);
    auto eq = pullback_map(sk.inclusion, xi, a, b);
    CHECK(a->dim() == b->dim());
    CHECK(try_inverse(eq.matrix).has_value());
}

TEST_CASE("pushforward map") {
    auto star = terminal_groupoid();
    auto bz2 = group_groupoid(GroupTable::cyclic(2));

    // identity
    auto reg = z2_bundle(bz2, swap2());
    auto par_reg = par_space(reg);
    auto idf = identity_functor(bz2);
    auto same = pullback_bundle(idf, reg);
    auto par_same = par_space(same);
    CHECK(pushforward_map(idf, reg, par_same, par_reg).matrix.is_identity());

    // t : *//Z2 -> * with the trivial line: multiplication by 1/2
    auto t = terminal_functor(bz2, star);
    auto line = constant_bundle(star, 1);
    auto tline = pullback_bundle(t, line);
    auto p1 = par_space(tline);
    auto p2 = par_space(line);
    auto push = pushforward_map(t, line, p1, p2);
    REQUIRE(push.matrix.rows() == 1);
    CHECK(push.matrix(0, 0) == cy(1, 2));

    // composite φ_* φ* on invariants of the regular representation is
    // multiplication by |G| = 2 (sum over the two-object discrete fiber)
    GroupoidFunctor incl;
    incl.dom = star;
    incl.cod = bz2;
    incl.ob = {0};
    incl.mo = {bz2->id_of[0]};
    auto res = pullback_bundle(incl, reg);
    auto par_res = par_space(res);
    auto up = pullback_map(incl, reg, par_reg, par_res);
    auto dn = pushforward_map(incl, reg, par_res, par_reg);
    auto round = compose_maps(dn, up);
    REQUIRE(round.matrix.rows() == 1);
    CHECK(round.matrix(0, 0) == cy(2));
}

TEST_CASE("nat_iso_action") {
    auto bs3 = group_groupoid(GroupTable::symmetric(3));
    Rng rng(17);
    auto xi = random_vec_bundle(bs3, rng);
    auto idf = identity_functor(bs3);
    auto id_eta = identity_nat_iso(idf);
    auto pxi = pullback_bundle(idf, xi);
    auto a = par_space(pxi);
    CHECK(nat_iso_action(id_eta, xi, a, a).matrix.is_identity());

    // conjugation eta and its inverse compose to the identity; functoriality
    auto eta = random_nat_iso(idf, rng);
    auto phi2 = eta.target;
    auto pxi2 = pullback_bundle(phi2, xi);
    auto b = par_space(pxi2);
    auto fwd = nat_iso_action(eta, xi, a, b);
    CHECK(try_inverse(fwd.matrix).has_value());
    auto bwd = nat_iso_action(inverse_nat_iso(eta), xi, b, a);
    CHECK((bwd.matrix * fwd.matrix).is_identity());

    auto eta2 = random_nat_iso(phi2, rng);
    auto c = par_space(pullback_bundle(eta2.target, xi));
    auto snd = nat_iso_action(eta2, xi, b, c);
    auto both = nat_iso_action(vcompose_nat_iso(eta2, eta), xi, a, c);
    CHECK(both.matrix == (snd.matrix * fwd.matrix));
}

TEST_CASE("composition laws") {
    auto star = terminal_groupoid();
    auto bz2 = group_groupoid(GroupTable::cyclic(2));
    // identities
    auto reg = z2_bundle(bz2, swap2());
    CHECK(check_composition_laws(identity_functor(bz2), identity_functor(bz2), reg).ok);
    // both terminal through *//Z2
    GroupoidFunctor t1 = terminal_functor(bz2, star);
    GroupoidFunctor t2 = identity_functor(star);
    CHECK(check_composition_laws(t1, t2, constant_bundle(star, 2)).ok);
    // random instances
    for (uint64_t seed = 0; seed < 12; ++seed) {
        Rng rng(1000 + seed);
        auto g0 = random_groupoid(rng).g;
        auto g1 = random_groupoid(rng).g;
        auto g2 = random_groupoid(rng).g;
        auto phi = random_functor(g0, g1, rng);
        auto psi = random_functor(g1, g2, rng);
        auto xi = random_vec_bundle(g2, rng);
        REQUIRE(validate_functor(phi).ok);
        REQUIRE(validate_functor(psi).ok);
        REQUIRE(validate_bundle(*xi).ok);
        CHECK(check_composition_laws(phi, psi, xi).ok);
    }
}

TEST_CASE("beck-chevalley pentagon") {
    auto star = terminal_groupoid();
    auto bz2 = group_groupoid(GroupTable::cyclic(2));
    auto reg = z2_bundle(bz2, swap2());
    CHECK(check_beck_chevalley(identity_functor(bz2), identity_functor(bz2), reg).ok);

    GroupoidFunctor incl;
    incl.dom = star;
    incl.cod = bz2;
    incl.ob = {0};
    incl.mo = {bz2->id_of[0]};
    CHECK(check_beck_chevalley(incl, incl, reg).ok);

    for (uint64_t seed = 0; seed < 8; ++seed) {
        Rng rng(2000 + seed);
        auto gl = random_groupoid(rng).g;
        auto gg = random_groupoid(rng).g;
        auto om = random_groupoid(rng).g;
        auto psi = random_functor(gl, om, rng);
        auto phi = random_functor(gg, om, rng);
        auto xi = random_vec_bundle(om, rng);
        CHECK(check_beck_chevalley(psi, phi, xi).ok);
    }
}

TEST_CASE("integrate_constant") {
    auto star = terminal_groupoid();
    CHECK(integrate_constant(star, 3, star).matrix.is_identity());

    auto bz2 = group_groupoid(GroupTable::cyclic(2));
    auto m = integrate_constant(bz2, 1, star);
    REQUIRE(m.matrix.rows() == 1);
    CHECK(m.matrix(0, 0) == cy(1, 2));

    auto du = disjoint_union(bz2, group_groupoid(GroupTable::cyclic(3)));
    auto m2 = integrate_constant(du, 1, star);
    REQUIRE(m2.matrix.rows() == 1);
    REQUIRE(m2.matrix.cols() == 2);

    // agreement with the pushforward along the terminal functor
    auto t = terminal_functor(du, star);
    auto cb = constant_bundle(du, 1);
    auto vb = constant_bundle(star, 1);
    auto push = pushforward_map(t, vb, par_space(pullback_bundle(t, vb)), par_space(vb));
    CHECK(push.matrix == m2.matrix);
}

TEST_CASE("rep_span_par") {
    auto star = terminal_groupoid();
    auto bz2 = group_groupoid(GroupTable::cyclic(2));
    auto line = constant_bundle(star, 1);

    // identity span with identity intertwiner
    Tier2Span ids;
    ids.r0 = ids.r1 = identity_functor(bz2);
    ids.xi0 = ids.xi1 = z2_bundle(bz2, swap2());
    ids.mu.assign(1, CMat::identity(2));
    auto idp = rep_span_par(ids);
    CHECK(idp.map.matrix.is_identity());

    // * <- *//Z2 -> * with scalar intertwiner c: the averaged value c/|G|
    Tier2Span avg;
    avg.r0 = avg.r1 = terminal_functor(bz2, star);
    avg.xi0 = avg.xi1 = line;
    CMat c(1, 1);
    c(0, 0) = cy(3);
    avg.mu.assign(1, c);
    auto avgp = rep_span_par(avg);
    REQUIRE(avgp.map.matrix.rows() == 1);
    CHECK(avgp.map.matrix(0, 0) == cy(3, 2));

    // composition of spans agrees with the composite span
    for (uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(3000 + seed);
        auto g0 = random_groupoid(rng).g;
        auto g1 = random_groupoid(rng).g;
        auto g2 = random_groupoid(rng).g;
        auto l0 = random_groupoid(rng).g;
        auto l1 = random_groupoid(rng).g;
        Tier2Span m;
        m.r0 = random_functor(l0, g0, rng);
        m.r1 = random_functor(l0, g1, rng);
        m.xi0 = random_vec_bundle(g0, rng);
        m.xi1 = random_vec_bundle(g1, rng);
        m.mu = random_intertwiner(m.r0, m.r1, m.xi0, m.xi1, rng);
        Tier2Span mp;
        mp.r0 = random_functor(l1, g1, rng);
        mp.r1 = random_functor(l1, g2, rng);
        mp.xi0 = m.xi1;
        mp.xi1 = random_vec_bundle(g2, rng);
        mp.mu = random_intertwiner(mp.r0, mp.r1, mp.xi0, mp.xi1, rng);
        REQUIRE(validate_tier2_span(m).ok);
        REQUIRE(validate_tier2_span(mp).ok);
        auto comp = compose_tier2_spans(m, mp);
        REQUIRE(validate_tier2_span(comp).ok);
        auto lhs = rep_span_par(comp);
        auto rhs1 = rep_span_par(m);
        auto rhs2 = rep_span_par(mp);
        CHECK(lhs.map.matrix == rhs2.map.matrix * rhs1.map.matrix);
    }
}

TEST_CASE("parallelity closure and equivalence-invertibility") {
    for (uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(4000 + seed);
        auto g = random_groupoid(rng).g;
        auto xi = random_vec_bundle(g, rng);
        auto sk = skeleton(g);
        auto pxi = pullback_bundle(sk.inclusion, xi);
        auto a = par_space(xi);
        auto b = par_space(pxi);
        auto m = pullback_map(sk.inclusion, xi, a, b);
        CHECK(a->dim() == b->dim());
        if (a->dim()) CHECK(try_inverse(m.matrix).has_value());
        for (size_t j = 0; j < a->dim(); ++j) CHECK(section_is_parallel(*xi, a->offset, a->vecs[j]));
    }
}
