#pragma once

// Single-file line-delimited workspace store. Records keep their exact
// source text, so save(load(f)) reproduces f byte for byte even around
// unknown record kinds; mutations rewrite only the records they touch.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sstkit/attention.hpp"
#include "sstkit/chain.hpp"
#include "sstkit/graph.hpp"
#include "sstkit/periodic.hpp"
#include "sstkit/promise.hpp"

namespace sst {

// One record as it appears on disk. LAYER records span several lines;
// everything else is a single line. kind is the first token, empty for a
// blank line.
struct StoreRecord {
    std::string kind;
    std::vector<std::string> lines;
};

// Persisted per-slot aggregates of one named series.
struct SeriesState {
    std::string name;
    std::int64_t period = 604800;
    int slots = 336;
    double forgetting = 0.9;
    std::map<std::pair<std::int64_t, int>, CellStats> cells;

    PeriodicModel model(int local_window) const;
};

struct Workspace {
    World world;
    Graph graph;
    std::vector<std::string> basis;
    std::vector<KeyEntry> keys;
    std::vector<LayerSpec> layers;
    std::map<std::string, SeriesState> series;

    std::vector<StoreRecord> records;
    bool trailing_newline = true;
    bool missing_on_load = false;

    // Mutators keep the parsed views and the record list in step.
    void append_promise(const Promise& p);
    void append_node(const std::string& id, const std::string& text);
    void upsert_link(const std::string& from, const std::string& to, LinkClass cls,
                     double weight, std::set<std::string> context,
                     LinkOrigin origin = LinkOrigin::curator,
                     const std::string& origin_agent = "");
    void set_basis(std::vector<std::string> features);
    void upsert_key(const KeyEntry& entry);
    void set_layers(std::vector<LayerSpec> stack);
    void replace_series(const SeriesState& state);

    // Basis for attention queries: the declared BASIS when present, else
    // the sorted union of stored key features.
    FeatureBasis attend_basis() const;
};

// Missing file yields an empty workspace with missing_on_load set; the
// caller decides whether that deserves a warning. Corrupt known-kind
// lines throw ParseError with the 1-based line number.
Workspace load_store(const std::string& path);

// Atomic: writes a sibling temp file, then renames over the target.
void save_store(const Workspace& ws, const std::string& path);

// Canonical single-line forms. For each of these, serializing a parsed
// canonical line reproduces it exactly.
std::string node_to_line(const SSTNode& node);
std::string link_to_line(const SSTLink& link);
std::string basis_to_line(const std::vector<std::string>& features);
std::string key_to_line(const KeyEntry& entry);
std::string series_to_line(const SeriesState& state);
std::string series_slot_to_line(const std::string& name, std::int64_t period, int slot,
                                const CellStats& stats);
std::vector<std::string> layer_record_lines(const LayerSpec& layer);

// Advisory file lock beside the store (suffix ".lock"): shared for
// readers, exclusive for writers. Held for the object's lifetime.
class StoreLock {
public:
    StoreLock(const std::string& store_path, bool exclusive);
    ~StoreLock();
    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace sst
