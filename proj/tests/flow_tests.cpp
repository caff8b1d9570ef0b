#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <mcal/construct.hpp>
#include <mcal/flow.hpp>
#include <mcal/rewrite.hpp>

#include "test_util.hpp"

using namespace mcal;

TEST_CASE("star-decomposition search agrees with brute force", "[flow]") {
    std::mt19937 rng(4242);
    int yes = 0, no = 0;
    for (int iter = 0; iter < 2000; ++iter) {
        auto [g, M] = mcal_test::random_geometry(rng, 2 + (int)(rng() % 5));
        auto algo = find_mod_star_decomp(g, M);
        auto brute = brute_force_mod_flow(g, M);
        INFO("iter " << iter);
        REQUIRE(algo.has_value() == brute.has_value());
        if (!algo) {
            ++no;
            continue;
        }
        ++yes;
        REQUIRE(is_modified_flow(g, M, algo->f));
        // |I| = |O| admits at most one successor function
        if (g.inputs.size() == g.outputs.size()) REQUIRE(algo->f == *brute);
        // L lists roots in non-increasing natural pre-order
        auto le = natural_preorder(g, algo->f);
        for (std::size_t i = 0; i < algo->L.size(); ++i)
            for (std::size_t j = i + 1; j < algo->L.size(); ++j) {
                bool bad = !(algo->L[i] == algo->L[j]) && le[algo->L[j]].count(algo->L[i]) &&
                           !le[algo->L[i]].count(algo->L[j]);
                REQUIRE_FALSE(bad);
            }
    }
    // both outcomes must actually be exercised
    CHECK(yes > 100);
    CHECK(no > 100);
}

TEST_CASE("constructed patterns always carry a modified flow", "[flow]") {
    std::mt19937 rng(99);
    for (int iter = 0; iter < 40; ++iter) {
        Circuit c = mcal_test::random_circuit(rng, {.max_wires = 3, .max_gates = 6});
        for (Method m : {Method::DKP, Method::RBB}) {
            Pattern pat = construct(c, m);
            auto [g, ang] = geometry_of(pat);
            std::set<QubitId> M;
            for (const auto& [q, mi] : ang)
                if (mi.plane == Plane::XY && mi.angle.eighths == 2) M.insert(q);
            auto d = find_mod_star_decomp(g, M);
            REQUIRE(d.has_value());
            REQUIRE(is_modified_flow(g, M, d->f));
        }
    }
}

TEST_CASE("edge bound certifies flow absence", "[flow]") {
    // K2 with both endpoints measured: n=2, k=0, m=1 > 0
    CHECK_FALSE(edge_bound_ok(2, 0, 1));
    Geometry g;
    g.vertices = {QubitId("v"), QubitId("w")};
    g.edges = {Geometry::edge(QubitId("v"), QubitId("w"))};
    CHECK_FALSE(brute_force_mod_flow(g, {}).has_value());
    // a path I-x-O saturates the bound and has a flow
    CHECK(edge_bound_ok(3, 1, 2));
}
