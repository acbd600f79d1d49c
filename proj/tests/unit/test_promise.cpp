#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "sstkit/error.hpp"
#include "sstkit/promise.hpp"

using namespace sst;

namespace {

Promise make(const std::string& giver, const std::string& receiver, Polarity pol,
             const Body& body, std::optional<Body> condition = std::nullopt) {
    Promise p;
    p.giver = giver;
    p.receiver = receiver;
    p.polarity = pol;
    p.body = body;
    p.condition = std::move(condition);
    return p;
}

Body random_body(std::mt19937& rng, int universe, double keep_prob) {
    Body b;
    std::bernoulli_distribution keep(keep_prob);
    for (int i = 0; i < universe; ++i) {
        if (keep(rng)) b.insert("a" + std::to_string(i));
    }
    return b;
}

// Offers that act as downstream conditions must be non-empty.
Body random_offer(std::mt19937& rng, int universe, double keep_prob) {
    Body b = random_body(rng, universe, keep_prob);
    while (b.empty()) b = random_body(rng, universe, keep_prob);
    return b;
}

}  // namespace

TEST_CASE("bind_channel takes the body intersection as bandwidth") {
    auto plus = make("S", "R", Polarity::offer, Body{"a", "b"});
    auto minus = make("R", "S", Polarity::accept, Body{"b", "c"});
    CHECK(bind_channel(plus, minus).bandwidth == Body{"b"});

    CHECK(bind_channel(make("S", "R", Polarity::offer, Body{"a"}),
                       make("R", "S", Polarity::accept, Body{"a"}))
              .bandwidth == Body{"a"});

    // Disjoint intent binds to an empty channel rather than failing.
    CHECK(bind_channel(make("S", "R", Polarity::offer, Body{"a", "b", "c"}),
                       make("R", "S", Polarity::accept, Body{"d"}))
              .bandwidth.empty());
}

TEST_CASE("bind_channel rejects wrong polarities and endpoints") {
    auto plus = make("S", "R", Polarity::offer, Body{"a"});
    auto minus = make("R", "S", Polarity::accept, Body{"a"});
    CHECK_THROWS_AS(bind_channel(minus, plus), Error);
    CHECK_THROWS_AS(bind_channel(plus, make("X", "S", Polarity::accept, Body{"a"})), Error);
    CHECK_THROWS_AS(bind_channel(plus, make("R", "X", Polarity::accept, Body{"a"})), Error);
}

TEST_CASE("bandwidth is contained in both bodies for random pairs") {
    std::mt19937 rng(20250311);
    for (int trial = 0; trial < 1000; ++trial) {
        Body bs = random_body(rng, 8, 0.5);
        Body br = random_body(rng, 8, 0.5);
        auto ch = bind_channel(make("S", "R", Polarity::offer, bs),
                               make("R", "S", Polarity::accept, br));
        CHECK(ch.bandwidth.subset_of(bs));
        CHECK(ch.bandwidth.subset_of(br));
    }
}

TEST_CASE("verdicts follow the observation table") {
    Body bandwidth{"a", "b"};
    CHECK(verdict_for(bandwidth, bandwidth) == Verdict::kept);
    CHECK(verdict_for(bandwidth, Body{"a", "b", "c"}) == Verdict::kept);
    CHECK(verdict_for(bandwidth, Body{}) == Verdict::undetermined);
    CHECK(verdict_for(bandwidth, Body{"a"}) == Verdict::not_kept);
    CHECK(verdict_for(bandwidth, Body{"z"}) == Verdict::not_kept);
    // Empty obligation with some observation is trivially kept.
    CHECK(verdict_for(Body{}, Body{"x"}) == Verdict::kept);
}

TEST_CASE("verdict matches subset enumeration over a small universe") {
    // All subsets of {a,b,c} as bandwidth and as observation.
    const std::vector<std::string> atoms = {"a", "b", "c"};
    for (int bw_mask = 0; bw_mask < 8; ++bw_mask) {
        for (int ob_mask = 0; ob_mask < 8; ++ob_mask) {
            Body bw, ob;
            for (int i = 0; i < 3; ++i) {
                if (bw_mask & (1 << i)) bw.insert(atoms[i]);
                if (ob_mask & (1 << i)) ob.insert(atoms[i]);
            }
            const Verdict got = verdict_for(bw, ob);
            if (ob_mask == 0) CHECK(got == Verdict::undetermined);
            else if ((bw_mask & ob_mask) == bw_mask) CHECK(got == Verdict::kept);
            else CHECK(got == Verdict::not_kept);
        }
    }
}

TEST_CASE("assessment confidence follows the doubled-rate rule") {
    CHECK(assessment_confidence(2.0, 1.0) == 1.0);
    CHECK(assessment_confidence(1.0, 1.0) == 0.5);
    CHECK(assessment_confidence(10.0, 1.0) == 1.0);  // clamped
    CHECK(assessment_confidence(0.0, 1.0) == 0.0);
    CHECK(assessment_confidence(0.0, 0.0) == 1.0);  // constant source
}

TEST_CASE("relay delivers the payload cut to every hop bandwidth") {
    World w;
    w.add_agent("S");
    w.add_agent("I");
    w.add_agent("R");
    Body xs{"a", "b", "c"};
    w.add_promise(make("S", "I", Polarity::offer, xs));
    w.add_promise(make("I", "S", Polarity::accept, Body{"a", "b"}));
    w.add_promise(make("I", "R", Polarity::offer, Body{"a", "b"}, xs));
    w.add_promise(make("R", "I", Polarity::accept, Body{"a"}));

    auto res = relay(w, "S", "I", "R", xs);
    REQUIRE(res.hops.size() == 2);
    CHECK_FALSE(res.blocked());
    // {a,b,c} cut by {a,b} then by {a}.
    CHECK(res.delivered == Body{"a"});
    CHECK(res.hops[0].assessment.verdict == Verdict::kept);
    CHECK(res.hops[1].assessment.verdict == Verdict::kept);
}

TEST_CASE("relay across several hops equals the running intersection oracle") {
    std::mt19937 rng(424242);
    for (int trial = 0; trial < 200; ++trial) {
        World w;
        const int hops = 3;
        std::vector<std::string> chain;
        for (int i = 0; i <= hops; ++i) {
            chain.push_back("n" + std::to_string(i));
            w.add_agent(chain.back());
        }
        // Payload covers the whole universe so every obligation is met.
        Body payload;
        for (int i = 0; i < 6; ++i) payload.insert("a" + std::to_string(i));

        std::vector<Body> offers, accepts;
        for (int k = 0; k < hops; ++k) {
            offers.push_back(random_offer(rng, 6, 0.7));
            accepts.push_back(random_body(rng, 6, 0.7));
        }
        for (int k = 0; k < hops; ++k) {
            std::optional<Body> cond;
            if (k > 0) cond = offers[k - 1];  // conditional on upstream offer
            w.add_promise(make(chain[k], chain[k + 1], Polarity::offer, offers[k], cond));
            w.add_promise(make(chain[k + 1], chain[k], Polarity::accept, accepts[k]));
        }

        auto res = relay_chain(w, chain, payload);
        // An intermediary whose cut runs dry cannot vouch for the payload
        // and blocks; in every case what comes out is the running
        // intersection (empty once blocked).
        Body expect = payload;
        bool starved_midway = false;
        for (int k = 0; k < hops; ++k) {
            expect = expect.intersect(offers[k].intersect(accepts[k]));
            if (k + 1 < hops && expect.empty()) starved_midway = true;
        }
        CHECK(res.blocked() == starved_midway);
        CHECK(res.delivered == expect);
        CHECK(res.delivered.subset_of(payload));
    }
}

TEST_CASE("enlarging a hop bandwidth never shrinks the delivered set") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        Body payload;
        for (int i = 0; i < 6; ++i) payload.insert("a" + std::to_string(i));

        std::vector<Body> offers(3), accepts(3);
        for (int k = 0; k < 3; ++k) {
            offers[k] = random_offer(rng, 6, 0.6);
            accepts[k] = random_body(rng, 6, 0.6);
        }
        auto build = [&](const std::vector<Body>& off, const std::vector<Body>& acc) {
            World w;
            std::vector<std::string> chain = {"n0", "n1", "n2", "n3"};
            for (const auto& id : chain) w.add_agent(id);
            for (int k = 0; k < 3; ++k) {
                std::optional<Body> cond;
                if (k > 0) cond = off[k - 1];
                w.add_promise(make(chain[k], chain[k + 1], Polarity::offer, off[k], cond));
                w.add_promise(make(chain[k + 1], chain[k], Polarity::accept, acc[k]));
            }
            return relay_chain(w, chain, payload).delivered;
        };
        const Body before = build(offers, accepts);

        // Widen one random hop on both sides.
        std::uniform_int_distribution<int> pick(0, 2);
        const int k = pick(rng);
        Body extra = random_body(rng, 6, 0.5);
        auto offers2 = offers;
        auto accepts2 = accepts;
        offers2[k] = offers[k].unite(extra);
        accepts2[k] = accepts[k].unite(extra);
        const Body after = build(offers2, accepts2);
        CHECK(before.subset_of(after));
    }
}

TEST_CASE("an unconvinced intermediary blocks the relay") {
    World w;
    w.add_agent("S");
    w.add_agent("I");
    w.add_agent("R");
    // Starve the first hop: the payload misses an atom the first
    // bandwidth promises, so I's own assessment is not kept.
    w.add_promise(make("S", "I", Polarity::offer, Body{"a", "b"}));
    w.add_promise(make("I", "S", Polarity::accept, Body{"a", "b"}));
    w.add_promise(make("I", "R", Polarity::offer, Body{"a", "b"}, Body{"a", "b"}));
    w.add_promise(make("R", "I", Polarity::accept, Body{"a", "b"}));

    auto res = relay(w, "S", "I", "R", Body{"a"});  // b promised but missing
    CHECK(res.blocked());
    CHECK(*res.blocked_at == "I");
    CHECK(res.delivered.empty());
    CHECK(res.hops.size() == 1);
    CHECK(res.hops[0].assessment.verdict == Verdict::not_kept);
}

TEST_CASE("relay validates the full promise pattern up front") {
    World w;
    w.add_agent("S");
    w.add_agent("I");
    w.add_agent("R");
    w.add_promise(make("S", "I", Polarity::offer, Body{"a"}));
    w.add_promise(make("I", "S", Polarity::accept, Body{"a"}));
    // Missing both promises of the second hop.
    CHECK_THROWS_WITH_AS(static_cast<void>(relay(w, "S", "I", "R", Body{"a"})),
                         doctest::Contains("incomplete relay chain"), Error);

    // Unconditional second offer is also an incomplete pattern.
    w.add_promise(make("I", "R", Polarity::offer, Body{"a"}));
    w.add_promise(make("R", "I", Polarity::accept, Body{"a"}));
    CHECK_THROWS_WITH_AS(static_cast<void>(relay(w, "S", "I", "R", Body{"a"})),
                         doctest::Contains("conditional"), Error);
}

TEST_CASE("promise matrix pairs offers with mirrored acceptances") {
    World w;
    w.add_agent("a");
    w.add_agent("b");
    w.add_promise(make("a", "b", Polarity::offer, Body{"x"}));
    w.add_promise(make("b", "a", Polarity::accept, Body{"x"}));
    Matrix m = promise_matrix(w);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(0, 0) == 0.0);
    CHECK(m(1, 0) == 0.0);
    CHECK(m(1, 1) == 0.0);

    // An unanswered offer contributes nothing.
    World w2;
    w2.add_agent("a");
    w2.add_agent("b");
    w2.add_promise(make("a", "b", Polarity::offer, Body{"x"}));
    Matrix z = promise_matrix(w2);
    for (size_t i = 0; i < 2; ++i)
        for (size_t j = 0; j < 2; ++j) CHECK(z(i, j) == 0.0);
}

TEST_CASE("a relay chain world yields a superdiagonal matrix") {
    World w;
    for (const char* id : {"a", "b", "c"}) w.add_agent(id);
    Body body{"x"};
    w.add_promise(make("a", "b", Polarity::offer, body));
    w.add_promise(make("b", "a", Polarity::accept, body));
    w.add_promise(make("b", "c", Polarity::offer, body, body));
    w.add_promise(make("c", "b", Polarity::accept, body));
    Matrix m = promise_matrix(w);
    for (size_t i = 0; i < 3; ++i) {
        for (size_t j = 0; j < 3; ++j) {
            CHECK(m(i, j) == ((j == i + 1) ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("promise matrix equals brute-force pairing on random worlds") {
    std::mt19937 rng(1337);
    for (int trial = 0; trial < 100; ++trial) {
        World w;
        const int n = 4;
        for (int i = 0; i < n; ++i) w.add_agent("g" + std::to_string(i));
        std::bernoulli_distribution flip(0.4);
        std::vector<std::vector<bool>> offer(n, std::vector<bool>(n, false));
        std::vector<std::vector<bool>> accept(n, std::vector<bool>(n, false));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (flip(rng)) {
                    offer[i][j] = true;
                    w.add_promise(make("g" + std::to_string(i), "g" + std::to_string(j),
                                       Polarity::offer, Body{"x"}));
                }
                if (flip(rng)) {
                    accept[i][j] = true;
                    w.add_promise(make("g" + std::to_string(i), "g" + std::to_string(j),
                                       Polarity::accept, Body{"x"}));
                }
            }
        }
        Matrix m = promise_matrix(w);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const bool expect = offer[i][j] && accept[j][i];
                CHECK(m(i, j) == (expect ? 1.0 : 0.0));
            }
        }
    }
}

TEST_CASE("promise lines round trip") {
    auto p = make("alice", "bob", Polarity::offer, Body::parse("{data,rate=0.5}"),
                  Body::parse("{auth}"));
    const std::string line = promise_to_line(p);
    CHECK(line == "PROMISE alice bob + {data,rate=0.5} | {auth}");
    Promise back = promise_from_line(line);
    CHECK(promise_to_line(back) == line);
    CHECK(back.condition.has_value());

    CHECK_THROWS_AS(promise_from_line("PROMISE x y ? {a}"), Error);
    CHECK_THROWS_AS(promise_from_line("PROMISE x y +"), Error);
}

TEST_CASE("world rejects duplicate agents and unknown promise endpoints") {
    World w;
    w.add_agent("a");
    CHECK_THROWS_AS(w.add_agent("a"), Error);
    CHECK_THROWS_AS(w.add_promise(make("a", "ghost", Polarity::offer, Body{"x"})), Error);
}
