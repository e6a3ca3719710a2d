#include <doctest.h>

#include "parsec/groupoid.hpp"

using namespace parsec;

namespace {

std::vector<std::vector<int>> perm_action(const GroupTable& g, std::vector<std::vector<int>> act) { return act; }

// Z2 acting on {0,1,2} by swapping 0 and 1.
Gpd three_points_mod_swap() {
    GroupTable z2 = GroupTable::cyclic(2);
    return action_groupoid(z2, 3, {{0, 1, 2}, {1, 0, 2}});
}

}  // namespace

TEST_CASE("validation of basic groupoids") {
    auto star = terminal_groupoid();
    CHECK(validate(*star).ok);
    auto z2 = group_groupoid(GroupTable::cyclic(2));
    CHECK(validate(*z2).ok);
    auto s3 = group_groupoid(GroupTable::symmetric(3));
    CHECK(validate(*s3).ok);
    CHECK(validate(*three_points_mod_swap()).ok);
    CHECK(validate(*product_groupoid(z2, s3)).ok);
    CHECK(validate(*disjoint_union(z2, s3)).ok);

    // corrupt a table: declare the order-2 generator its own identity-composite
    FiniteGroupoid bad = *z2;
    bad.comp[bad.key(1, 1)] = 1;  // g∘g = g instead of e
    auto rep = validate(bad);
    CHECK(!rep.ok);
    CHECK(rep.message.find("associativity/inverse violation") != std::string::npos);
}

TEST_CASE("automorphism groups") {
    auto star = terminal_groupoid();
    CHECK(automorphism_group(star, 0)->n_mor() == 1);
    auto s3 = group_groupoid(GroupTable::symmetric(3));
    CHECK(automorphism_group(s3, 0)->n_mor() == 6);
    auto du = disjoint_union(group_groupoid(GroupTable::cyclic(2)), group_groupoid(GroupTable::cyclic(3)));
    CHECK(automorphism_group(du, 1)->n_mor() == 3);
    CHECK_THROWS(automorphism_group(star, 5));
}

TEST_CASE("pi0 and cardinality") {
    GroupTable triv = GroupTable::trivial();
    auto discrete3 = action_groupoid(triv, 3, {{0, 1, 2}});
    CHECK(pi0(*discrete3).size() == 3);
    auto s3 = group_groupoid(GroupTable::symmetric(3));
    CHECK(pi0(*s3).size() == 1);
    auto tp = three_points_mod_swap();
    auto classes = pi0(*tp);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0].representative == 0);
    CHECK(classes[0].members == std::vector<int>{0, 1});
    CHECK(classes[1].representative == 2);

    CHECK(groupoid_cardinality(*terminal_groupoid()) == rat(1));
    CHECK(groupoid_cardinality(*group_groupoid(GroupTable::cyclic(2))) == rat(1, 2));
    auto du = disjoint_union(group_groupoid(GroupTable::cyclic(2)), group_groupoid(GroupTable::cyclic(3)));
    CHECK(groupoid_cardinality(*du) == rat(5, 6));
}

TEST_CASE("skeleton") {
    // already skeletal: inclusion/retraction are identity-like
    auto z2 = group_groupoid(GroupTable::cyclic(2));
    auto sk = skeleton(z2);
    CHECK(sk.skel->n_obj == 1);
    CHECK(sk.skel->n_mor() == 2);
    CHECK(validate(*sk.skel).ok);
    CHECK(validate_functor(sk.inclusion).ok);
    CHECK(validate_functor(sk.retraction).ok);
    CHECK(validate_nat_iso(sk.incl_retr_to_id).ok);

    // 2-object contractible groupoid collapses to the point
    GroupTable triv = GroupTable::trivial();
    GroupoidBuilder b(2);
    int e0 = b.add_mor(0, 0), f = b.add_mor(0, 1), fi = b.add_mor(1, 0), e1 = b.add_mor(1, 1);
    b.set_identities({e0, e1});
    b.set_inverses({e0, fi, f, e1});
    b.set_compose(e0, e0, e0);
    b.set_compose(f, e0, f);
    b.set_compose(fi, f, e0);
    b.set_compose(e1, f, f);
    b.set_compose(e0, fi, fi);
    b.set_compose(f, fi, e1);
    b.set_compose(fi, e1, fi);
    b.set_compose(e1, e1, e1);
    auto contractible = b.finish();
    REQUIRE(validate(*contractible).ok);
    auto sk2 = skeleton(contractible);
    CHECK(sk2.skel->n_obj == 1);
    CHECK(sk2.skel->n_mor() == 1);
    CHECK(validate_nat_iso(sk2.incl_retr_to_id).ok);

    // {0,1,2}//Z2 with swap of {0,1} -> point + one Z2 vertex group
    auto tp = three_points_mod_swap();
    auto sk3 = skeleton(tp);
    CHECK(sk3.skel->n_obj == 2);
    auto s = skeleton_info(*sk3.skel);
    CHECK(s.vertex[0].size() == 1);   // free orbit: trivial stabilizer
    CHECK(s.vertex[1].size() == 2);   // fixed point keeps Z2
    CHECK(validate(*sk3.skel).ok);
    CHECK(validate_functor(sk3.inclusion).ok);
    CHECK(validate_functor(sk3.retraction).ok);
    CHECK(validate_nat_iso(sk3.incl_retr_to_id).ok);
    CHECK(groupoid_cardinality(*tp) == groupoid_cardinality(*sk3.skel));
}

TEST_CASE("homotopy fibers") {
    auto star = terminal_groupoid();
    GroupTable g6 = GroupTable::symmetric(3);
    auto bg = group_groupoid(g6);

    // identity functor: fiber over the base object is contractible
    auto idf = identity_functor(bg);
    auto hf = homotopy_fiber(idf, 0);
    CHECK(validate(*hf.fib).ok);
    CHECK(pi0(*hf.fib).size() == 1);
    CHECK(pi0(*hf.fib)[0].aut_order == 1);

    // terminal functor from *//Z2: fiber is equivalent to *//Z2
    auto bz2 = group_groupoid(GroupTable::cyclic(2));
    auto t = terminal_functor(bz2, star);
    auto hf2 = homotopy_fiber(t, 0);
    CHECK(validate(*hf2.fib).ok);
    CHECK(groupoid_cardinality(*hf2.fib) == rat(1, 2));

    // inclusion *//{e} -> *//G: fiber is discrete with |G| objects
    GroupoidFunctor incl;
    incl.dom = terminal_groupoid();
    incl.cod = bg;
    incl.ob = {0};
    incl.mo = {bg->id_of[0]};
    auto hf3 = homotopy_fiber(incl, 0);
    CHECK(validate(*hf3.fib).ok);
    CHECK(hf3.fib->n_obj == 6);
    auto cls = pi0(*hf3.fib);
    CHECK(cls.size() == 6);
    for (const auto& c : cls) CHECK(c.aut_order == 1);
    CHECK(validate_functor(hf3.proj).ok);
}

TEST_CASE("homotopy pullbacks") {
    auto star = terminal_groupoid();
    GroupTable z3 = GroupTable::cyclic(3);
    auto bg = group_groupoid(z3);

    // pullback of id against id over Ω is equivalent to Ω
    auto idf = identity_functor(bg);
    auto hp = homotopy_pullback(idf, idf);
    CHECK(validate(*hp.pb).ok);
    CHECK(validate_functor(hp.pi_gamma).ok);
    CHECK(validate_functor(hp.pi_lambda).ok);
    CHECK(validate_nat_iso(hp.eta).ok);
    CHECK(check_equivalence(hp.pi_gamma).is_equivalence);

    // * -> *//G <- * is discrete with |G| objects
    GroupoidFunctor incl;
    incl.dom = star;
    incl.cod = bg;
    incl.ob = {0};
    incl.mo = {bg->id_of[0]};
    auto hp2 = homotopy_pullback(incl, incl);
    CHECK(hp2.pb->n_obj == 3);
    CHECK(groupoid_cardinality(*hp2.pb) == rat(3));

    // fiberwise criterion: the fiber of π_Λ over y matches the fiber of φ over ψ(y)
    auto bz2 = group_groupoid(GroupTable::cyclic(2));
    auto t2 = terminal_functor(bz2, star);
    GroupoidFunctor inc2;
    inc2.dom = star;
    inc2.cod = star;
    inc2.ob = {0};
    inc2.mo = {0};
    auto hp3 = homotopy_pullback(t2, inc2);  // *//Z2 -> * <- *
    auto fib_pl = homotopy_fiber(hp3.pi_lambda, 0);
    auto fib_phi = homotopy_fiber(t2, 0);
    auto c1 = pi0(*fib_pl.fib);
    auto c2 = pi0(*fib_phi.fib);
    REQUIRE(c1.size() == c2.size());
    for (size_t i = 0; i < c1.size(); ++i) CHECK(c1[i].aut_order == c2[i].aut_order);
}

TEST_CASE("fiber comparison functor") {
    auto star = terminal_groupoid();
    auto bz2 = group_groupoid(GroupTable::cyclic(2));

    // identity square: F is an isomorphism of fibers
    auto idf = identity_functor(bz2);
    WeakSquare sq{idf, idf, idf, idf, identity_nat_iso(idf)};
    auto qf = homotopy_fiber(sq.q, 0);
    auto pf = homotopy_fiber(sq.phi, 0);
    auto f = fiber_comparison_functor(sq, qf, pf, 0);
    CHECK(validate_functor(f).ok);
    CHECK(check_equivalence(f).is_equivalence);

    // homotopy pullback square of * -> *//Z2 <- *//Z2 (identity leg): F is an equivalence
    GroupoidFunctor incl;
    incl.dom = star;
    incl.cod = bz2;
    incl.ob = {0};
    incl.mo = {bz2->id_of[0]};
    auto hp = homotopy_pullback(incl, identity_functor(bz2));
    WeakSquare sq2{hp.pi_gamma, hp.pi_lambda, incl, identity_functor(bz2), hp.eta};
    REQUIRE(validate_square(sq2).ok);
    auto qf2 = homotopy_fiber(sq2.q, 0);
    auto pf2 = homotopy_fiber(sq2.phi, incl.ob[0]);
    auto f2 = fiber_comparison_functor(sq2, qf2, pf2, 0);
    CHECK(validate_functor(f2).ok);
    CHECK(check_equivalence(f2).is_equivalence);

    // non-pullback square: Π = *//Z2 over the cospan t,t : *//Z2 -> *
    auto t = terminal_functor(bz2, star);
    WeakSquare sq3{identity_functor(bz2), identity_functor(bz2), t, t,
                   identity_nat_iso(t)};
    auto qf3 = homotopy_fiber(sq3.q, 0);
    auto pf3 = homotopy_fiber(sq3.phi, 0);
    auto f3 = fiber_comparison_functor(sq3, qf3, pf3, 0);
    CHECK(validate_functor(f3).ok);
    CHECK(!check_equivalence(f3).is_equivalence);
}

TEST_CASE("fiber composition equivalence") {
    auto star = terminal_groupoid();
    auto bz2 = group_groupoid(GroupTable::cyclic(2));

    // φ = id: the comparison is an equivalence onto the pullback
    auto fc = fiber_composition_equivalence(identity_functor(bz2), terminal_functor(bz2, star), 0);
    CHECK(validate_functor(fc.comparison).ok);
    CHECK(check_equivalence(fc.comparison).is_equivalence);

    // both terminal through *//Z2: both sides have cardinality 1/4
    auto t = terminal_functor(bz2, star);
    GroupoidFunctor idstar = identity_functor(star);
    auto fc2 = fiber_composition_equivalence(t, idstar, 0);
    CHECK(check_equivalence(fc2.comparison).is_equivalence);
    CHECK(groupoid_cardinality(*fc2.composite_fiber.fib) == groupoid_cardinality(*fc2.pullback.pb));

    // a small mixed instance
    auto tp = three_points_mod_swap();
    GroupoidFunctor phi = terminal_functor(tp, bz2);  // send everything to identity component
    phi.ob.assign(tp->n_obj, 0);
    phi.mo.assign(tp->n_mor(), bz2->id_of[0]);
    REQUIRE(validate_functor(phi).ok);
    auto fc3 = fiber_composition_equivalence(phi, terminal_functor(bz2, star), 0);
    CHECK(check_equivalence(fc3.comparison).is_equivalence);
    CHECK(groupoid_cardinality(*fc3.composite_fiber.fib) == groupoid_cardinality(*fc3.pullback.pb));
}

TEST_CASE("equivalence certificates") {
    auto bz2 = group_groupoid(GroupTable::cyclic(2));
    auto idf = identity_functor(bz2);
    auto cert = check_equivalence(idf);
    CHECK(cert.is_equivalence);
    CHECK(validate_functor(cert.quasi_inverse).ok);
    CHECK(validate_nat_iso(cert.counit).ok);
    CHECK(validate_nat_iso(cert.unit).ok);

    auto star = terminal_groupoid();
    auto t = terminal_functor(bz2, star);
    auto cert2 = check_equivalence(t);
    CHECK(!cert2.is_equivalence);
    CHECK(cert2.failure.find("faithful") != std::string::npos);

    // skeleton inclusion is an equivalence
    auto tp = three_points_mod_swap();
    auto sk = skeleton(tp);
    auto cert3 = check_equivalence(sk.inclusion);
    CHECK(cert3.is_equivalence);
    CHECK(validate_nat_iso(cert3.counit).ok);
    CHECK(validate_nat_iso(cert3.unit).ok);
}

TEST_CASE("group hom enumeration") {
    auto homs = all_group_homs(GroupTable::cyclic(2), GroupTable::cyclic(4));
    CHECK(homs.size() == 2);  // 0 -> 0 and 1 -> 2
    auto homs2 = all_group_homs(GroupTable::cyclic(3), GroupTable::symmetric(3));
    CHECK(homs2.size() == 3);  // trivial + two embeddings onto A3
    auto subs = subgroups(GroupTable::symmetric(3));
    CHECK(subs.size() == 6);  // 1, three Z2, A3, S3
}
