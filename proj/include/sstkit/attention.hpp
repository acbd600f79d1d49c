#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sstkit/matrix.hpp"

namespace sst {

enum class Embedding { softmax, inverted };

Embedding embedding_from_string(const std::string& s);
const char* to_string(Embedding e);

/// The declared spanning set of feature labels. Its size is the D that
/// scales match scores.
class FeatureBasis {
public:
    FeatureBasis() = default;
    explicit FeatureBasis(std::vector<std::string> features);

    size_t size() const { return features_.size(); }
    bool empty() const { return features_.empty(); }
    bool contains(const std::string& f) const { return lookup_.count(f) != 0; }
    const std::vector<std::string>& features() const { return features_; }

private:
    std::vector<std::string> features_;
    std::set<std::string> lookup_;
};

/// Homogeneous batch: N rows of data, one numeric cell per feature column.
struct DataBatch {
    std::vector<std::string> features;  // column labels, size D
    Matrix values;                      // N x D

    // Validates that every cell parses as a number.
    static DataBatch from_rows(std::vector<std::string> features,
                               const std::vector<std::vector<std::string>>& rows);
};

struct ProjectionWeights {
    Matrix query;  // D x D
    Matrix key;
    Matrix value;
};

struct Projection {
    Matrix query;
    Matrix key;
    Matrix value;
};

/// Right-multiplies the batch by each projection weight matrix.
Projection project(const DataBatch& batch, const ProjectionWeights& weights);

/// One stored candidate: a (+) key pointing at a value, annotated with the
/// contexts it was curated for.
struct KeyEntry {
    std::string id;
    std::set<std::string> key;
    std::string value;
    std::set<std::string> context;
};

/// The (-) side: acceptable features plus the contexts the query is made in.
struct AttentionQuery {
    std::set<std::string> accept;
    std::set<std::string> context;
};

struct RankedMatch {
    std::string id;
    double score = 0.0;      // embedded score used for ranking
    double raw_score = 0.0;  // |key ∩ accept| / sqrt(D)
    std::string value;
    std::set<std::string> context_overlap;
};

struct AttendResult {
    std::vector<RankedMatch> matches;
    // Root mean square over the numeric values of all matches, when any.
    std::optional<double> value_rms;
};

/// |key ∩ accept| / sqrt(basis_size). Throws when the basis is empty.
double score_sets(const AttentionQuery& query, const std::set<std::string>& key,
                  size_t basis_size);

/// Context-filters the store (non-empty overlap with the query context,
/// when one is given), scores the survivors, embeds the scores, and ranks
/// descending with ties broken by key id.
AttendResult attend(std::span<const KeyEntry> store, const AttentionQuery& query,
                    const FeatureBasis& basis, Embedding embedding, double beta);

}  // namespace sst
