#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sst {

/// The four semantic link classes. Combined with the three orientations
/// (+1 forward, 0 none, -1 reverse) they form the gamma(3,4) classification.
/// NEAR is the undirected similarity class; the other three are directed
/// with a derivable inverse.
enum class LinkClass { near = 0, leads_to = 1, contains = 2, expresses = 3 };

LinkClass link_class_from_string(const std::string& s);
const char* to_string(LinkClass c);

enum class LinkOrigin { curator, emergent };

struct SSTLink {
    std::string from;
    std::string to;
    LinkClass cls = LinkClass::near;
    double weight = 1.0;  // in [0,1]
    std::set<std::string> context;
    LinkOrigin origin = LinkOrigin::curator;
    std::string origin_agent;  // set when origin == emergent
};

/// A link as seen while traversing: orientation 0 for NEAR, +1 along the
/// stored direction, -1 against it.
struct LinkView {
    std::string from;
    std::string to;
    LinkClass cls = LinkClass::near;
    int orientation = 0;
    double weight = 1.0;
    std::set<std::string> context;
};

/// A knowable: the full text plus a compact id, with the n-gram
/// fractionation of the text regenerable on demand.
struct SSTNode {
    std::string id;
    std::string text;
    std::vector<std::string> fractionation;
};

struct TracedPath {
    enum class End { absorbed, depth_capped, cycle };
    std::vector<std::string> nodes;
    End end = End::absorbed;
};

/// Lowercased word 1-grams plus adjacent 2-grams, sorted and deduplicated.
std::vector<std::string> fractionate(const std::string& text);

class Graph {
public:
    /// Inserts or re-asserts a node. The id<->text mapping is bijective:
    /// re-adding the same pair is a no-op, conflicting pairs throw.
    const SSTNode& add_node(const std::string& id, const std::string& text);

    bool has_node(const std::string& id) const;
    const SSTNode& node(const std::string& id) const;
    std::optional<std::string> id_for_text(const std::string& text) const;
    std::vector<std::string> node_ids() const;  // sorted
    size_t node_count() const { return nodes_.size(); }

    /// Stores a typed link. NEAR links are undirected and kept once per
    /// unordered pair; re-adding an existing (from,to,class) replaces the
    /// weight and unions the context. Returns the link index.
    size_t add_link(const std::string& from, const std::string& to, LinkClass cls,
                    double weight = 1.0, std::set<std::string> context = {},
                    LinkOrigin origin = LinkOrigin::curator, const std::string& origin_agent = "");

    const std::vector<SSTLink>& links() const { return links_; }

    /// Links leaving a node: directed links forward (+1) and NEAR links (0).
    std::vector<LinkView> out_links(const std::string& id) const;

    /// The stored or derived relation from `from` to `to`, if any; a
    /// directed link queried against its direction comes back with
    /// orientation -1.
    std::optional<LinkView> link_between(const std::string& from, const std::string& to) const;

    /// Eigenvector centrality of the symmetrized weighted adjacency,
    /// scaled to unit maximum. A graph with no links scores all zero.
    std::map<std::string, double> evc() const;

    /// Betweenness centrality of the transposed directed adjacency,
    /// shortest-path counted, endpoints excluded, unnormalized.
    std::map<std::string, double> btc() const;

    /// Depth-first path enumeration from `start` along links whose class is
    /// in `classes` and whose context meets the query context (any context
    /// passes an empty query). Paths end at absorbing nodes, at the depth
    /// cap, or where every continuation revisits the path.
    std::vector<TracedPath> trace_paths(const std::string& start,
                                        const std::set<LinkClass>& classes,
                                        const std::set<std::string>& context = {},
                                        int max_depth = 32) const;

private:
    std::map<std::string, SSTNode> nodes_;
    std::map<std::string, std::string> text_to_id_;
    std::vector<SSTLink> links_;
    // (from, to, class) -> index into links_; NEAR keys use the ordered pair.
    std::map<std::tuple<std::string, std::string, LinkClass>, size_t> link_index_;
};

}  // namespace sst
