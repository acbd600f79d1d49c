#include "sstkit/attention.hpp"

#include <algorithm>
#include <cmath>

#include "sstkit/chain.hpp"
#include "sstkit/error.hpp"
#include "sstkit/strings.hpp"

namespace sst {

Embedding embedding_from_string(const std::string& s) {
    if (s == "softmax") return Embedding::softmax;
    if (s == "inverted") return Embedding::inverted;
    throw Error("unknown embedding: " + s);
}

const char* to_string(Embedding e) {
    return e == Embedding::softmax ? "softmax" : "inverted";
}

FeatureBasis::FeatureBasis(std::vector<std::string> features) : features_(std::move(features)) {
    for (const auto& f : features_) {
        if (!lookup_.insert(f).second) throw Error("duplicate feature in basis: " + f);
    }
}

DataBatch DataBatch::from_rows(std::vector<std::string> features,
                               const std::vector<std::vector<std::string>>& rows) {
    DataBatch batch;
    const size_t d = features.size();
    batch.features = std::move(features);
    batch.values = Matrix(rows.size(), d);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) {
            throw Error("homogeneous batch requires " + std::to_string(d) +
                        " cells per row, row " + std::to_string(i) + " has " +
                        std::to_string(rows[i].size()));
        }
        for (size_t j = 0; j < d; ++j) {
            auto v = parse_double(rows[i][j]);
            if (!v) throw Error("non-numeric cell in homogeneous batch: " + rows[i][j]);
            batch.values(i, j) = *v;
        }
    }
    return batch;
}

Projection project(const DataBatch& batch, const ProjectionWeights& weights) {
    const size_t d = batch.features.size();
    for (const Matrix* w : {&weights.query, &weights.key, &weights.value}) {
        if (w->rows() != d || w->cols() != d) {
            throw Error("projection weights must be " + std::to_string(d) + "x" +
                        std::to_string(d));
        }
    }
    return Projection{batch.values * weights.query, batch.values * weights.key,
                      batch.values * weights.value};
}

double score_sets(const AttentionQuery& query, const std::set<std::string>& key,
                  size_t basis_size) {
    if (basis_size == 0) throw Error("feature basis is empty");
    size_t overlap = 0;
    for (const auto& f : query.accept) overlap += key.count(f);
    return static_cast<double>(overlap) / std::sqrt(static_cast<double>(basis_size));
}

static std::set<std::string> set_intersection(const std::set<std::string>& a,
                                              const std::set<std::string>& b) {
    std::set<std::string> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.begin()));
    return out;
}

AttendResult attend(std::span<const KeyEntry> store, const AttentionQuery& query,
                    const FeatureBasis& basis, Embedding embedding, double beta) {
    if (basis.empty()) throw Error("attend requires a non-empty feature basis");
    for (const auto& f : query.accept) {
        if (!basis.contains(f)) throw Error("query feature outside the basis: " + f);
    }

    AttendResult result;
    std::vector<const KeyEntry*> candidates;
    for (const auto& entry : store) {
        if (!query.context.empty() &&
            set_intersection(entry.context, query.context).empty()) {
            continue;
        }
        candidates.push_back(&entry);
    }
    if (candidates.empty()) return result;

    std::vector<double> raw(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        raw[i] = score_sets(query, candidates[i]->key, basis.size());
    }
    const std::vector<double> embedded = embedding == Embedding::softmax
                                             ? softmax(raw, beta)
                                             : inverted_embedding(raw, beta);

    for (size_t i = 0; i < candidates.size(); ++i) {
        RankedMatch m;
        m.id = candidates[i]->id;
        m.score = embedded[i];
        m.raw_score = raw[i];
        m.value = candidates[i]->value;
        m.context_overlap = set_intersection(candidates[i]->context, query.context);
        result.matches.push_back(std::move(m));
    }
    std::stable_sort(result.matches.begin(), result.matches.end(),
                     [](const RankedMatch& a, const RankedMatch& b) {
                         if (a.score != b.score) return a.score > b.score;
                         return a.id < b.id;
                     });

    double sq = 0.0;
    size_t numeric = 0;
    for (const auto& m : result.matches) {
        if (auto v = parse_double(m.value)) {
            sq += *v * *v;
            ++numeric;
        }
    }
    if (numeric > 0) result.value_rms = std::sqrt(sq / static_cast<double>(numeric));
    return result;
}

}  // namespace sst
