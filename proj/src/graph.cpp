#include "sstkit/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <functional>

#include "sstkit/error.hpp"

namespace sst {

LinkClass link_class_from_string(const std::string& s) {
    if (s == "NEAR") return LinkClass::near;
    if (s == "LEADS_TO") return LinkClass::leads_to;
    if (s == "CONTAINS") return LinkClass::contains;
    if (s == "EXPRESSES") return LinkClass::expresses;
    throw Error("unknown link class: " + s);
}

const char* to_string(LinkClass c) {
    switch (c) {
        case LinkClass::near: return "NEAR";
        case LinkClass::leads_to: return "LEADS_TO";
        case LinkClass::contains: return "CONTAINS";
        case LinkClass::expresses: return "EXPRESSES";
    }
    return "?";
}

std::vector<std::string> fractionate(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        } else if (!cur.empty()) {
            words.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(cur);

    std::set<std::string> grams(words.begin(), words.end());
    for (size_t i = 0; i + 1 < words.size(); ++i) {
        grams.insert(words[i] + " " + words[i + 1]);
    }
    return {grams.begin(), grams.end()};
}

const SSTNode& Graph::add_node(const std::string& id, const std::string& text) {
    if (id.empty()) throw Error("node id must not be empty");
    auto it = nodes_.find(id);
    if (it != nodes_.end()) {
        if (it->second.text != text) {
            throw Error("node id " + id + " already bound to different text");
        }
        return it->second;
    }
    auto tit = text_to_id_.find(text);
    if (tit != text_to_id_.end() && tit->second != id) {
        throw Error("node text already bound to id " + tit->second);
    }
    SSTNode node{id, text, fractionate(text)};
    text_to_id_[text] = id;
    return nodes_.emplace(id, std::move(node)).first->second;
}

bool Graph::has_node(const std::string& id) const { return nodes_.count(id) != 0; }

const SSTNode& Graph::node(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error("unknown node: " + id);
    return it->second;
}

std::optional<std::string> Graph::id_for_text(const std::string& text) const {
    auto it = text_to_id_.find(text);
    if (it == text_to_id_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> Graph::node_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, n] : nodes_) out.push_back(id);
    return out;
}

size_t Graph::add_link(const std::string& from, const std::string& to, LinkClass cls,
                       double weight, std::set<std::string> context, LinkOrigin origin,
                       const std::string& origin_agent) {
    if (!has_node(from)) throw Error("unknown node: " + from);
    if (!has_node(to)) throw Error("unknown node: " + to);
    if (weight < 0.0 || weight > 1.0) throw Error("link weight must lie in [0,1]");

    std::string a = from, b = to;
    if (cls == LinkClass::near && b < a) std::swap(a, b);  // one record per unordered pair

    auto key = std::make_tuple(a, b, cls);
    auto it = link_index_.find(key);
    if (it != link_index_.end()) {
        SSTLink& link = links_[it->second];
        link.weight = weight;
        link.context.insert(context.begin(), context.end());
        return it->second;
    }
    SSTLink link{a, b, cls, weight, std::move(context), origin, origin_agent};
    links_.push_back(std::move(link));
    link_index_[key] = links_.size() - 1;
    return links_.size() - 1;
}

std::vector<LinkView> Graph::out_links(const std::string& id) const {
    std::vector<LinkView> out;
    for (const auto& link : links_) {
        if (link.cls == LinkClass::near) {
            if (link.from == id) out.push_back({link.from, link.to, link.cls, 0, link.weight, link.context});
            if (link.to == id) out.push_back({link.to, link.from, link.cls, 0, link.weight, link.context});
        } else if (link.from == id) {
            out.push_back({link.from, link.to, link.cls, +1, link.weight, link.context});
        }
    }
    return out;
}

std::optional<LinkView> Graph::link_between(const std::string& from,
                                            const std::string& to) const {
    for (const auto& link : links_) {
        if (link.cls == LinkClass::near) {
            if ((link.from == from && link.to == to) || (link.from == to && link.to == from)) {
                return LinkView{from, to, link.cls, 0, link.weight, link.context};
            }
        } else if (link.from == from && link.to == to) {
            return LinkView{from, to, link.cls, +1, link.weight, link.context};
        } else if (link.from == to && link.to == from) {
            return LinkView{from, to, link.cls, -1, link.weight, link.context};
        }
    }
    return std::nullopt;
}

// Directed weighted adjacency over sorted node ids. NEAR links are
// traversable both ways, so they appear in both directions.
static std::vector<std::vector<double>> adjacency(const Graph& g,
                                                  const std::vector<std::string>& ids) {
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < ids.size(); ++i) idx[ids[i]] = i;
    std::vector<std::vector<double>> a(ids.size(), std::vector<double>(ids.size(), 0.0));
    for (const auto& link : g.links()) {
        const size_t u = idx.at(link.from);
        const size_t v = idx.at(link.to);
        a[u][v] += link.weight;
        if (link.cls == LinkClass::near) a[v][u] += link.weight;
    }
    return a;
}

std::map<std::string, double> Graph::evc() const {
    const auto ids = node_ids();
    const size_t n = ids.size();
    if (n == 0) throw Error("eigenvector centrality of an empty graph");

    std::map<std::string, double> scores;
    for (const auto& id : ids) scores[id] = 0.0;
    if (links_.empty()) return scores;

    auto a = adjacency(*this, ids);
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    double max_row = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < n; ++j) {
            m[i][j] = a[i][j] + a[j][i];
            row += m[i][j];
        }
        max_row = std::max(max_row, row);
    }
    if (max_row == 0.0) return scores;

    // Small diagonal shift: a symmetric non-negative matrix can have a
    // -lambda_max eigenvalue (bipartite structure), which makes the plain
    // iteration oscillate. The shift leaves the eigenvectors unchanged.
    const double shift = 0.25 * max_row;

    std::vector<double> x(n, 1.0), next(n, 0.0);
    for (int iter = 0; iter < 1000; ++iter) {
        for (size_t i = 0; i < n; ++i) {
            double acc = shift * x[i];
            for (size_t j = 0; j < n; ++j) acc += m[i][j] * x[j];
            next[i] = acc;
        }
        const double mx = *std::max_element(next.begin(), next.end());
        if (mx <= 0.0) break;
        double delta = 0.0;
        for (size_t i = 0; i < n; ++i) {
            next[i] /= mx;
            delta = std::max(delta, std::abs(next[i] - x[i]));
        }
        x.swap(next);
        if (delta < 1e-10) break;
    }
    // Nodes with no incident mass stay at zero even though the shift term
    // would preserve their start value.
    for (size_t i = 0; i < n; ++i) {
        bool incident = false;
        for (size_t j = 0; j < n && !incident; ++j) incident = m[i][j] != 0.0;
        scores[ids[i]] = incident ? x[i] : 0.0;
    }
    const double mx = std::max(1e-300, *std::max_element(x.begin(), x.end()));
    for (auto& [id, s] : scores) s /= mx;
    return scores;
}

std::map<std::string, double> Graph::btc() const {
    const auto ids = node_ids();
    const size_t n = ids.size();
    std::map<std::string, double> scores;
    for (const auto& id : ids) scores[id] = 0.0;
    if (n == 0 || links_.empty()) return scores;

    // Transposed unweighted adjacency lists.
    auto a = adjacency(*this, ids);
    std::vector<std::vector<size_t>> succ(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (a[j][i] != 0.0) succ[i].push_back(j);

    // Brandes accumulation, one BFS per source.
    std::vector<double> btc_acc(n, 0.0);
    for (size_t s = 0; s < n; ++s) {
        std::vector<long long> sigma(n, 0);
        std::vector<int> dist(n, -1);
        std::vector<std::vector<size_t>> pred(n);
        std::vector<size_t> order;
        sigma[s] = 1;
        dist[s] = 0;
        std::deque<size_t> queue{s};
        while (!queue.empty()) {
            const size_t v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (size_t w : succ[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    pred[w].push_back(v);
                }
            }
        }
        std::vector<double> delta(n, 0.0);
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const size_t w = *it;
            for (size_t v : pred[w]) {
                delta[v] += (static_cast<double>(sigma[v]) / static_cast<double>(sigma[w])) *
                            (1.0 + delta[w]);
            }
            if (w != s) btc_acc[w] += delta[w];
        }
    }
    for (size_t i = 0; i < n; ++i) scores[ids[i]] = btc_acc[i];
    return scores;
}

std::vector<TracedPath> Graph::trace_paths(const std::string& start,
                                           const std::set<LinkClass>& classes,
                                           const std::set<std::string>& context,
                                           int max_depth) const {
    if (max_depth <= 0) throw Error("path depth cap must be positive");
    node(start);  // throws on unknown

    auto context_ok = [&](const std::set<std::string>& link_ctx) {
        if (context.empty()) return true;
        for (const auto& c : context)
            if (link_ctx.count(c)) return true;
        return false;
    };

    auto successors = [&](const std::string& id) {
        std::vector<std::string> out;
        for (const auto& view : out_links(id)) {
            if (!classes.count(view.cls)) continue;
            if (!context_ok(view.context)) continue;
            out.push_back(view.to);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };

    std::vector<TracedPath> paths;
    std::vector<std::string> path{start};
    std::set<std::string> on_path{start};

    std::function<void()> walk = [&]() {
        const auto succ = successors(path.back());
        if (succ.empty()) {
            paths.push_back({path, TracedPath::End::absorbed});
            return;
        }
        if (static_cast<int>(path.size()) >= max_depth) {
            paths.push_back({path, TracedPath::End::depth_capped});
            return;
        }
        bool advanced = false;
        for (const auto& next : succ) {
            if (on_path.count(next)) continue;
            advanced = true;
            path.push_back(next);
            on_path.insert(next);
            walk();
            on_path.erase(next);
            path.pop_back();
        }
        // Every continuation loops back into the path.
        if (!advanced) paths.push_back({path, TracedPath::End::cycle});
    };
    walk();
    return paths;
}

}  // namespace sst
