#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

namespace sst {

/// A finite set of labelled atoms, each with an optional numeric weight.
/// Promise bodies are sets of these; set operations work on labels, and
/// intersection keeps the smaller weight (the bottleneck) where both sides
/// carry one.
class Body {
public:
    using Map = std::map<std::string, std::optional<double>>;

    Body() = default;
    Body(std::initializer_list<std::string> labels) {
        for (const auto& l : labels) atoms_[l] = std::nullopt;
    }

    void insert(const std::string& label, std::optional<double> weight = std::nullopt) {
        atoms_[label] = weight;
    }

    bool contains(const std::string& label) const { return atoms_.count(label) != 0; }
    bool empty() const { return atoms_.empty(); }
    size_t size() const { return atoms_.size(); }

    std::optional<double> weight(const std::string& label) const {
        auto it = atoms_.find(label);
        return it == atoms_.end() ? std::nullopt : it->second;
    }

    Body intersect(const Body& other) const;
    Body unite(const Body& other) const;

    // True when every label of this body appears in other.
    bool subset_of(const Body& other) const;
    bool superset_of(const Body& other) const { return other.subset_of(*this); }
    bool disjoint_with(const Body& other) const;

    std::set<std::string> labels() const;

    const Map& atoms() const { return atoms_; }

    bool operator==(const Body& rhs) const { return atoms_ == rhs.atoms_; }

    /// Canonical text form: `{a,b=0.5,c}`, labels sorted, no spaces.
    std::string to_string() const;

    /// Parses the canonical form; throws Error on malformed input.
    static Body parse(const std::string& text);

private:
    Map atoms_;
};

}  // namespace sst
