#include <cmath>
#include <random>

#include "doctest.h"
#include "sstkit/attention.hpp"
#include "sstkit/error.hpp"

using namespace sst;

namespace {

KeyEntry entry(std::string id, std::set<std::string> key, std::string value,
               std::set<std::string> ctx = {}) {
    return KeyEntry{std::move(id), std::move(key), std::move(value), std::move(ctx)};
}

FeatureBasis basis16() {
    std::vector<std::string> f;
    for (int i = 0; i < 16; ++i) f.push_back("f" + std::to_string(i));
    return FeatureBasis(std::move(f));
}

}  // namespace

TEST_CASE("feature basis rejects duplicates") {
    CHECK_THROWS_AS(FeatureBasis({"a", "b", "a"}), Error);
    FeatureBasis b({"a", "b"});
    CHECK(b.size() == 2);
    CHECK(b.contains("a"));
    CHECK_FALSE(b.contains("z"));
}

TEST_CASE("projection right-multiplies the data matrix") {
    DataBatch batch = DataBatch::from_rows({"x", "y"}, {{"1", "0"}, {"0", "1"}});
    ProjectionWeights weights;
    weights.query = Matrix(2, 2, {2.0, 0.0, 0.0, 3.0});
    weights.key = Matrix::identity(2);
    weights.value = Matrix(2, 2, 0.0);
    Projection p = project(batch, weights);
    CHECK(p.query(0, 0) == 2.0);
    CHECK(p.query(1, 1) == 3.0);
    CHECK(p.query(0, 1) == 0.0);
    CHECK(p.key == batch.values);   // identity leaves X alone
    CHECK(p.value(0, 0) == 0.0);
    CHECK(p.value(1, 1) == 0.0);

    ProjectionWeights wrong;
    wrong.query = Matrix(3, 3, 0.0);
    wrong.key = Matrix::identity(2);
    wrong.value = Matrix::identity(2);
    CHECK_THROWS_AS(project(batch, wrong), Error);

    CHECK_THROWS_AS(DataBatch::from_rows({"x"}, {{"abc"}}), Error);
    CHECK_THROWS_AS(DataBatch::from_rows({"x", "y"}, {{"1"}}), Error);
}

TEST_CASE("set scores divide the overlap by the root of the basis size") {
    AttentionQuery q;
    q.accept = {"f0", "f1"};
    CHECK(score_sets(q, {"f0", "f1"}, 16) == 0.5);  // 2/sqrt(16)
    CHECK(score_sets(q, {"f7"}, 16) == 0.0);

    AttentionQuery full;
    for (int i = 0; i < 9; ++i) full.accept.insert("f" + std::to_string(i));
    std::set<std::string> key = full.accept;
    CHECK(score_sets(full, key, 9) == doctest::Approx(3.0).epsilon(1e-12));  // D/sqrt(D)

    CHECK_THROWS_AS(score_sets(q, {"f0"}, 0), Error);
}

TEST_CASE("set score is symmetric under role swap") {
    std::mt19937 rng(2024);
    std::bernoulli_distribution keep(0.5);
    for (int trial = 0; trial < 300; ++trial) {
        std::set<std::string> a, b;
        for (int i = 0; i < 10; ++i) {
            if (keep(rng)) a.insert("f" + std::to_string(i));
            if (keep(rng)) b.insert("f" + std::to_string(i));
        }
        AttentionQuery qa, qb;
        qa.accept = a;
        qb.accept = b;
        CHECK(score_sets(qa, b, 10) == score_sets(qb, a, 10));
    }
}

TEST_CASE("attend ranks by score with ids breaking ties") {
    std::vector<KeyEntry> store = {
        entry("k2", {"f0"}, "10"),
        entry("k1", {"f0", "f1", "f2"}, "30"),
        entry("k3", {"f0"}, "20"),
    };
    AttentionQuery q;
    q.accept = {"f0", "f1", "f2"};
    auto res = attend(store, q, basis16(), Embedding::softmax, 1.0);
    REQUIRE(res.matches.size() == 3);
    CHECK(res.matches[0].id == "k1");
    CHECK(res.matches[0].raw_score == doctest::Approx(3.0 / 4.0).epsilon(1e-12));
    // Equal raw scores fall back to id order.
    CHECK(res.matches[1].id == "k2");
    CHECK(res.matches[2].id == "k3");

    double sum = 0.0;
    for (const auto& m : res.matches) sum += m.score;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    REQUIRE(res.value_rms.has_value());
    CHECK(*res.value_rms ==
          doctest::Approx(std::sqrt((100.0 + 900.0 + 400.0) / 3.0)).epsilon(1e-12));
}

TEST_CASE("a single exact match takes the whole softmax mass") {
    std::vector<KeyEntry> store = {entry("only", {"f0", "f1"}, "v")};
    AttentionQuery q;
    q.accept = {"f0", "f1"};
    auto res = attend(store, q, basis16(), Embedding::softmax, 1.0);
    REQUIRE(res.matches.size() == 1);
    CHECK(res.matches[0].score == 1.0);
    CHECK_FALSE(res.value_rms.has_value());  // value is not numeric
}

TEST_CASE("context filtering keeps only overlapping entries") {
    std::vector<KeyEntry> store = {
        entry("a", {"f0"}, "1", {"work"}),
        entry("b", {"f0"}, "2", {"home"}),
        entry("c", {"f0"}, "3", {"work", "home"}),
    };
    AttentionQuery q;
    q.accept = {"f0"};
    q.context = {"work"};
    auto res = attend(store, q, basis16(), Embedding::inverted, 1.0);
    REQUIRE(res.matches.size() == 2);
    CHECK(res.matches[0].id == "a");
    CHECK(res.matches[1].id == "c");
    for (const auto& m : res.matches) CHECK_FALSE(m.context_overlap.empty());

    // Disjoint context shuts the gate entirely.
    AttentionQuery off;
    off.accept = {"f0"};
    off.context = {"vacation"};
    CHECK(attend(store, off, basis16(), Embedding::softmax, 1.0).matches.empty());

    // An empty query context skips the filter.
    AttentionQuery open;
    open.accept = {"f0"};
    CHECK(attend(store, open, basis16(), Embedding::softmax, 1.0).matches.size() == 3);
}

TEST_CASE("ranking does not depend on embedding or temperature") {
    std::mt19937 rng(99);
    std::bernoulli_distribution keep(0.4);
    std::vector<KeyEntry> store;
    for (int k = 0; k < 12; ++k) {
        std::set<std::string> key;
        for (int i = 0; i < 16; ++i) {
            if (keep(rng)) key.insert("f" + std::to_string(i));
        }
        store.push_back(entry("k" + std::to_string(k / 10) + std::to_string(k % 10), key,
                              std::to_string(k)));
    }
    AttentionQuery q;
    q.accept = {"f0", "f3", "f5", "f8", "f11"};

    std::vector<std::string> reference;
    for (const auto& m : attend(store, q, basis16(), Embedding::softmax, 1.0).matches) {
        reference.push_back(m.id);
    }
    for (Embedding e : {Embedding::softmax, Embedding::inverted}) {
        for (double beta : {0.1, 1.0, 10.0}) {
            std::vector<std::string> order;
            for (const auto& m : attend(store, q, basis16(), e, beta).matches) {
                order.push_back(m.id);
            }
            CHECK(order == reference);
        }
    }
}

TEST_CASE("attend rejects queries outside the basis and an empty basis") {
    std::vector<KeyEntry> store = {entry("a", {"f0"}, "1")};
    AttentionQuery q;
    q.accept = {"not_a_feature"};
    CHECK_THROWS_AS(attend(store, q, basis16(), Embedding::softmax, 1.0), Error);
    AttentionQuery ok;
    ok.accept = {"f0"};
    CHECK_THROWS_AS(attend(store, ok, FeatureBasis{}, Embedding::softmax, 1.0), Error);
}

TEST_CASE("empty store attends to nothing") {
    AttentionQuery q;
    q.accept = {"f0"};
    auto res = attend(std::vector<KeyEntry>{}, q, basis16(), Embedding::softmax, 1.0);
    CHECK(res.matches.empty());
    CHECK_FALSE(res.value_rms.has_value());
}
