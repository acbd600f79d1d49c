#include "sstkit/atoms.hpp"

#include <algorithm>

#include "sstkit/error.hpp"
#include "sstkit/strings.hpp"

namespace sst {

Body Body::intersect(const Body& other) const {
    Body out;
    for (const auto& [label, w] : atoms_) {
        auto it = other.atoms_.find(label);
        if (it == other.atoms_.end()) continue;
        std::optional<double> merged;
        if (w && it->second) {
            merged = std::min(*w, *it->second);
        } else {
            merged = w ? w : it->second;
        }
        out.atoms_[label] = merged;
    }
    return out;
}

Body Body::unite(const Body& other) const {
    Body out = *this;
    for (const auto& [label, w] : other.atoms_) {
        auto it = out.atoms_.find(label);
        if (it == out.atoms_.end() || !it->second) out.atoms_[label] = w;
    }
    return out;
}

bool Body::subset_of(const Body& other) const {
    for (const auto& [label, w] : atoms_) {
        if (!other.contains(label)) return false;
    }
    return true;
}

bool Body::disjoint_with(const Body& other) const {
    for (const auto& [label, w] : atoms_) {
        if (other.contains(label)) return false;
    }
    return true;
}

std::set<std::string> Body::labels() const {
    std::set<std::string> out;
    for (const auto& [label, w] : atoms_) out.insert(label);
    return out;
}

std::string Body::to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [label, w] : atoms_) {
        if (!first) out += ",";
        out += label;
        if (w) {
            out += "=";
            out += format_double(*w);
        }
        first = false;
    }
    out += "}";
    return out;
}

Body Body::parse(const std::string& text) {
    std::string s = trim(text);
    if (s.size() < 2 || s.front() != '{' || s.back() != '}') {
        throw Error("malformed atom set, expected {...}: " + text);
    }
    Body out;
    std::string inner = s.substr(1, s.size() - 2);
    if (trim(inner).empty()) return out;
    for (const auto& piece : split(inner, ',')) {
        std::string atom = trim(piece);
        if (atom.empty()) throw Error("empty atom in set: " + text);
        auto eq = atom.find('=');
        if (eq == std::string::npos) {
            out.insert(atom);
        } else {
            std::string label = trim(atom.substr(0, eq));
            std::string wtext = trim(atom.substr(eq + 1));
            auto w = parse_double(wtext);
            if (label.empty() || !w) throw Error("malformed weighted atom: " + atom);
            out.insert(label, *w);
        }
    }
    return out;
}

}  // namespace sst
