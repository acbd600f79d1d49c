#include "sstkit/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sstkit/error.hpp"
#include "sstkit/strings.hpp"

namespace sst {

namespace {

[[noreturn]] void fail(size_t lineno, const std::string& msg) { throw ParseError(lineno, msg); }

long long int_field(const std::string& token, const char* what, size_t lineno) {
    auto v = parse_int(token);
    if (!v) fail(lineno, std::string(what) + " is not an integer: " + token);
    return *v;
}

double double_field(const std::string& token, const char* what, size_t lineno) {
    auto v = parse_double(token);
    if (!v) fail(lineno, std::string(what) + " is not a number: " + token);
    return *v;
}

std::set<std::string> parse_label_list(const std::string& csv) {
    std::set<std::string> out;
    for (const auto& piece : split(csv, ',')) {
        if (!piece.empty()) out.insert(piece);
    }
    return out;
}

// Remainder of `line` after its first n whitespace-separated tokens.
std::string rest_after(const std::string& line, int n) {
    size_t pos = 0;
    for (int i = 0; i < n; ++i) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    }
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    return line.substr(pos);
}

struct LinkFields {
    std::string from, to;
    LinkClass cls = LinkClass::near;
    double weight = 1.0;
    std::set<std::string> context;
    LinkOrigin origin = LinkOrigin::curator;
    std::string agent;
};

LinkFields parse_link_line(const std::string& line, size_t lineno) {
    const auto tokens = split_ws(line);
    if (tokens.size() < 4) fail(lineno, "LINK needs: from class to");
    LinkFields f;
    f.from = tokens[1];
    f.to = tokens[3];
    try {
        f.cls = link_class_from_string(tokens[2]);
    } catch (const Error& e) {
        fail(lineno, e.what());
    }
    for (size_t i = 4; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        if (t.rfind("w=", 0) == 0) {
            f.weight = double_field(t.substr(2), "link weight", lineno);
        } else if (t.rfind("ctx=", 0) == 0) {
            f.context = parse_label_list(t.substr(4));
        } else if (t.rfind("by=", 0) == 0) {
            f.origin = LinkOrigin::emergent;
            f.agent = t.substr(3);
        } else {
            fail(lineno, "LINK: unknown field " + t);
        }
    }
    return f;
}

// Normalized key for matching a LINK record against a stored link.
std::tuple<std::string, std::string, LinkClass> link_key(const LinkFields& f) {
    std::string a = f.from, b = f.to;
    if (f.cls == LinkClass::near && b < a) std::swap(a, b);
    return {a, b, f.cls};
}

std::set<std::string> body_labels(const std::string& text, size_t lineno) {
    try {
        return Body::parse(text).labels();
    } catch (const Error& e) {
        fail(lineno, e.what());
    }
}

}  // namespace

PeriodicModel SeriesState::model(int local_window) const {
    return PeriodicModel::from_cells(period, slots, forgetting, local_window, cells);
}

std::string node_to_line(const SSTNode& node) { return "NODE " + node.id + " " + node.text; }

std::string link_to_line(const SSTLink& link) {
    std::string out = "LINK " + link.from + " " + to_string(link.cls) + " " + link.to +
                      " w=" + format_double(link.weight);
    if (!link.context.empty()) out += " ctx=" + join(link.context, ",");
    if (link.origin == LinkOrigin::emergent) out += " by=" + link.origin_agent;
    return out;
}

std::string basis_to_line(const std::vector<std::string>& features) {
    return "BASIS " + join(features, ",");
}

std::string key_to_line(const KeyEntry& entry) {
    Body body;
    for (const auto& f : entry.key) body.insert(f);
    return "KEY " + entry.id + " " + body.to_string() + " ctx=" + join(entry.context, ",") + " " +
           entry.value;
}

std::string series_to_line(const SeriesState& state) {
    return "SERIES " + state.name + " period=" + std::to_string(state.period) +
           " slots=" + std::to_string(state.slots) + " c=" + format_double(state.forgetting);
}

std::string series_slot_to_line(const std::string& name, std::int64_t period, int slot,
                                const CellStats& stats) {
    return "SERIES-SLOT " + name + " " + std::to_string(period) + " " + std::to_string(slot) +
           " " + std::to_string(stats.count) + " " + format_double(stats.mean) + " " +
           format_double(stats.m2);
}

std::vector<std::string> layer_record_lines(const LayerSpec& layer) {
    std::vector<std::string> lines;
    lines.push_back("LAYER " + std::to_string(layer.width()) + " " +
                    std::string(to_string(layer.activation)) + " " + format_double(layer.beta));
    for (size_t u = 0; u < layer.width(); ++u) {
        std::vector<std::string> nums;
        for (double w : layer.weights[u]) nums.push_back(format_double(w));
        nums.push_back(format_double(layer.bias[u]));
        lines.push_back(join(nums, " "));
    }
    return lines;
}

Workspace load_store(const std::string& path) {
    Workspace ws;
    if (!std::filesystem::exists(path)) {
        ws.missing_on_load = true;
        return ws;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open store: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    std::vector<std::string> lines;
    {
        size_t start = 0;
        while (start <= content.size()) {
            const size_t nl = content.find('\n', start);
            if (nl == std::string::npos) {
                lines.push_back(content.substr(start));
                break;
            }
            lines.push_back(content.substr(start, nl - start));
            start = nl + 1;
        }
        ws.trailing_newline = content.empty() || content.back() == '\n';
        if (ws.trailing_newline && !lines.empty() && lines.back().empty()) lines.pop_back();
    }

    std::map<std::string, size_t> key_slot;  // key id -> index in ws.keys
    bool basis_seen = false;

    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        const size_t lineno = i + 1;
        const auto tokens = split_ws(line);
        if (tokens.empty()) {
            ws.records.push_back({"", {line}});
            continue;
        }
        const std::string& kind = tokens[0];

        if (kind == "NODE") {
            if (tokens.size() < 3) fail(lineno, "NODE needs: id text");
            try {
                ws.graph.add_node(tokens[1], rest_after(line, 2));
            } catch (const Error& e) {
                fail(lineno, e.what());
            }
            ws.records.push_back({kind, {line}});
        } else if (kind == "LINK") {
            const auto f = parse_link_line(line, lineno);
            try {
                ws.graph.add_link(f.from, f.to, f.cls, f.weight, f.context, f.origin, f.agent);
            } catch (const Error& e) {
                fail(lineno, e.what());
            }
            ws.records.push_back({kind, {line}});
        } else if (kind == "PROMISE") {
            try {
                Promise p = promise_from_line(line);
                if (!ws.world.has_agent(p.giver)) ws.world.add_agent(p.giver);
                if (!ws.world.has_agent(p.receiver)) ws.world.add_agent(p.receiver);
                ws.world.add_promise(std::move(p));
            } catch (const Error& e) {
                fail(lineno, e.what());
            }
            ws.records.push_back({kind, {line}});
        } else if (kind == "BASIS") {
            if (basis_seen) fail(lineno, "duplicate BASIS record");
            basis_seen = true;
            std::vector<std::string> features;
            for (const auto& piece : split(rest_after(line, 1), ',')) {
                if (!piece.empty()) features.push_back(piece);
            }
            if (features.empty()) fail(lineno, "BASIS needs at least one feature");
            try {
                [[maybe_unused]] FeatureBasis check(features);  // rejects duplicates
            } catch (const Error& e) {
                fail(lineno, e.what());
            }
            ws.basis = std::move(features);
            ws.records.push_back({kind, {line}});
        } else if (kind == "KEY") {
            if (tokens.size() < 4) fail(lineno, "KEY needs: id {features} ctx=... value");
            KeyEntry entry;
            entry.id = tokens[1];
            entry.key = body_labels(tokens[2], lineno);
            if (tokens[3].rfind("ctx=", 0) != 0) fail(lineno, "KEY: expected ctx= field");
            entry.context = parse_label_list(tokens[3].substr(4));
            entry.value = rest_after(line, 4);
            if (entry.value.empty()) fail(lineno, "KEY needs a value");
            auto slot = key_slot.find(entry.id);
            if (slot == key_slot.end()) {
                key_slot[entry.id] = ws.keys.size();
                ws.keys.push_back(std::move(entry));
            } else {
                ws.keys[slot->second] = std::move(entry);
            }
            ws.records.push_back({kind, {line}});
        } else if (kind == "SERIES") {
            if (tokens.size() != 5) fail(lineno, "SERIES needs: name period= slots= c=");
            SeriesState st;
            st.name = tokens[1];
            for (size_t t = 2; t < 5; ++t) {
                const std::string& tok = tokens[t];
                if (tok.rfind("period=", 0) == 0) {
                    st.period = int_field(tok.substr(7), "period", lineno);
                } else if (tok.rfind("slots=", 0) == 0) {
                    st.slots = static_cast<int>(int_field(tok.substr(6), "slots", lineno));
                } else if (tok.rfind("c=", 0) == 0) {
                    st.forgetting = double_field(tok.substr(2), "forgetting factor", lineno);
                } else {
                    fail(lineno, "SERIES: unknown field " + tok);
                }
            }
            if (st.period <= 0 || st.slots <= 0 || st.period % st.slots != 0) {
                fail(lineno, "SERIES: period must be a positive multiple of slots");
            }
            if (st.forgetting <= 0.0 || st.forgetting >= 1.0) {
                fail(lineno, "SERIES: c must lie in (0,1)");
            }
            if (ws.series.count(st.name)) fail(lineno, "duplicate SERIES record: " + st.name);
            ws.series[st.name] = std::move(st);
            ws.records.push_back({kind, {line}});
        } else if (kind == "SERIES-SLOT") {
            if (tokens.size() != 7) {
                fail(lineno, "SERIES-SLOT needs: series period slot count mean m2");
            }
            auto it = ws.series.find(tokens[1]);
            if (it == ws.series.end()) {
                fail(lineno, "SERIES-SLOT before SERIES header: " + tokens[1]);
            }
            const std::int64_t period = int_field(tokens[2], "period index", lineno);
            const long long slot = int_field(tokens[3], "slot", lineno);
            const long long count = int_field(tokens[4], "count", lineno);
            CellStats stats;
            stats.mean = double_field(tokens[5], "mean", lineno);
            stats.m2 = double_field(tokens[6], "m2", lineno);
            if (period < 0) fail(lineno, "period index must be non-negative");
            if (slot < 0 || slot >= it->second.slots) fail(lineno, "slot out of range");
            if (count <= 0) fail(lineno, "count must be positive");
            if (stats.m2 < 0.0) fail(lineno, "m2 must be non-negative");
            stats.count = static_cast<std::uint64_t>(count);
            auto cell_key = std::make_pair(period, static_cast<int>(slot));
            if (it->second.cells.count(cell_key)) fail(lineno, "duplicate SERIES-SLOT cell");
            it->second.cells[cell_key] = stats;
            ws.records.push_back({kind, {line}});
        } else if (kind == "LAYER") {
            if (tokens.size() != 4) fail(lineno, "LAYER needs: width activation beta");
            const long long width = int_field(tokens[1], "width", lineno);
            if (width <= 0) fail(lineno, "width must be positive");
            if (i + static_cast<size_t>(width) >= lines.size()) {
                fail(lineno, "LAYER record truncated");
            }
            std::vector<std::string> block;
            block.push_back(line);
            for (long long r = 1; r <= width; ++r) block.push_back(lines[i + r]);
            std::istringstream ss(join(block, "\n"));
            std::vector<LayerSpec> parsed = parse_layer_stack(ss, lineno);
            if (parsed.size() != 1) fail(lineno, "LAYER record parsed ambiguously");
            if (!ws.layers.empty() && parsed[0].fan_in() != ws.layers.back().width()) {
                fail(lineno, "layer fan-in does not match previous layer width");
            }
            ws.layers.push_back(std::move(parsed[0]));
            ws.records.push_back({kind, std::move(block)});
            i += static_cast<size_t>(width);
        } else {
            // Forward compatibility: unknown kinds ride along untouched.
            ws.records.push_back({kind, {line}});
        }
    }
    return ws;
}

void save_store(const Workspace& ws, const std::string& path) {
    std::string out;
    for (const auto& record : ws.records) {
        for (const auto& line : record.lines) {
            out += line;
            out += '\n';
        }
    }
    if (!ws.trailing_newline && !out.empty()) out.pop_back();

    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write store: " + tmp);
        f << out;
        f.flush();
        if (!f) {
            std::filesystem::remove(tmp);
            throw Error("short write saving store: " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot replace store " + path + ": " + ec.message());
    }
}

void Workspace::append_promise(const Promise& p) {
    if (!world.has_agent(p.giver)) world.add_agent(p.giver);
    if (!world.has_agent(p.receiver)) world.add_agent(p.receiver);
    world.add_promise(p);
    records.push_back({"PROMISE", {promise_to_line(p)}});
}

void Workspace::append_node(const std::string& id, const std::string& text) {
    const bool existed = graph.has_node(id);
    graph.add_node(id, text);
    if (!existed) records.push_back({"NODE", {node_to_line(graph.node(id))}});
}

void Workspace::upsert_link(const std::string& from, const std::string& to, LinkClass cls,
                            double weight, std::set<std::string> context, LinkOrigin origin,
                            const std::string& origin_agent) {
    const size_t idx = graph.add_link(from, to, cls, weight, std::move(context), origin,
                                      origin_agent);
    const SSTLink& merged = graph.links()[idx];
    const auto want = std::make_tuple(merged.from, merged.to, merged.cls);

    std::vector<size_t> matches;
    for (size_t i = 0; i < records.size(); ++i) {
        if (records[i].kind != "LINK") continue;
        const auto f = parse_link_line(records[i].lines[0], 0);
        if (link_key(f) == want) matches.push_back(i);
    }
    if (matches.empty()) {
        records.push_back({"LINK", {link_to_line(merged)}});
        return;
    }
    records[matches.back()].lines[0] = link_to_line(merged);
    for (size_t k = matches.size() - 1; k-- > 0;) {
        records.erase(records.begin() + static_cast<std::ptrdiff_t>(matches[k]));
    }
}

void Workspace::set_basis(std::vector<std::string> features) {
    if (features.empty()) throw Error("basis must not be empty");
    [[maybe_unused]] FeatureBasis check(features);  // rejects duplicates
    basis = std::move(features);
    for (auto& record : records) {
        if (record.kind == "BASIS") {
            record.lines[0] = basis_to_line(basis);
            return;
        }
    }
    records.push_back({"BASIS", {basis_to_line(basis)}});
}

void Workspace::upsert_key(const KeyEntry& entry) {
    if (entry.id.empty()) throw Error("key id must not be empty");
    if (entry.value.empty()) throw Error("key value must not be empty");
    bool replaced = false;
    for (auto& k : keys) {
        if (k.id == entry.id) {
            k = entry;
            replaced = true;
            break;
        }
    }
    if (!replaced) keys.push_back(entry);

    std::vector<size_t> matches;
    for (size_t i = 0; i < records.size(); ++i) {
        if (records[i].kind != "KEY") continue;
        const auto tokens = split_ws(records[i].lines[0]);
        if (tokens.size() >= 2 && tokens[1] == entry.id) matches.push_back(i);
    }
    if (matches.empty()) {
        records.push_back({"KEY", {key_to_line(entry)}});
        return;
    }
    records[matches.back()].lines[0] = key_to_line(entry);
    for (size_t k = matches.size() - 1; k-- > 0;) {
        records.erase(records.begin() + static_cast<std::ptrdiff_t>(matches[k]));
    }
}

void Workspace::set_layers(std::vector<LayerSpec> stack) {
    for (size_t i = 1; i < stack.size(); ++i) {
        if (stack[i].fan_in() != stack[i - 1].width()) {
            throw Error("layer fan-in does not match previous layer width");
        }
    }
    layers = std::move(stack);
    records.erase(std::remove_if(records.begin(), records.end(),
                                 [](const StoreRecord& r) { return r.kind == "LAYER"; }),
                  records.end());
    for (const auto& layer : layers) records.push_back({"LAYER", layer_record_lines(layer)});
}

void Workspace::replace_series(const SeriesState& state) {
    series[state.name] = state;
    auto matches_name = [&](const StoreRecord& r) {
        if (r.kind != "SERIES" && r.kind != "SERIES-SLOT") return false;
        const auto tokens = split_ws(r.lines[0]);
        return tokens.size() >= 2 && tokens[1] == state.name;
    };
    records.erase(std::remove_if(records.begin(), records.end(), matches_name), records.end());
    records.push_back({"SERIES", {series_to_line(state)}});
    for (const auto& [cell, stats] : state.cells) {
        records.push_back(
            {"SERIES-SLOT", {series_slot_to_line(state.name, cell.first, cell.second, stats)}});
    }
}

FeatureBasis Workspace::attend_basis() const {
    if (!basis.empty()) return FeatureBasis(basis);
    std::set<std::string> all;
    for (const auto& k : keys) all.insert(k.key.begin(), k.key.end());
    return FeatureBasis(std::vector<std::string>(all.begin(), all.end()));
}

StoreLock::StoreLock(const std::string& store_path, bool exclusive) {
    const std::string lock_path = store_path + ".lock";
    fd_ = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw Error("cannot open lock file: " + lock_path);
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw Error("cannot lock " + lock_path);
    }
}

StoreLock::~StoreLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

}  // namespace sst
