// Workspace CLI: ingest -> learn -> graph -> attend over a single
// line-delimited store file. Exit 0 on success, 1 on domain errors,
// 2 on usage errors. Data goes to stdout, diagnostics to stderr.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sstkit/attention.hpp"
#include "sstkit/chain.hpp"
#include "sstkit/config.hpp"
#include "sstkit/error.hpp"
#include "sstkit/graph.hpp"
#include "sstkit/periodic.hpp"
#include "sstkit/promise.hpp"
#include "sstkit/store.hpp"
#include "sstkit/strings.hpp"

namespace {

using namespace sst;

Workspace open_workspace(const WorkspaceConfig& cfg) {
    Workspace ws = load_store(cfg.store_path);
    if (ws.missing_on_load) {
        std::cerr << "note: store " << cfg.store_path << " not found, starting empty\n";
    }
    return ws;
}

std::vector<double> parse_number_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    for (const auto& piece : split(csv, ',')) {
        auto v = parse_double(piece);
        if (!v) throw Error(std::string(what) + ": not a number: " + piece);
        out.push_back(*v);
    }
    if (out.empty()) throw Error(std::string(what) + ": empty list");
    return out;
}

std::set<std::string> parse_label_set(const std::string& csv) {
    std::set<std::string> out;
    for (const auto& piece : split(csv, ',')) {
        if (!piece.empty()) out.insert(piece);
    }
    return out;
}

const char* end_label(TracedPath::End e) {
    switch (e) {
        case TracedPath::End::absorbed: return "absorbed";
        case TracedPath::End::depth_capped: return "depth-capped";
        case TracedPath::End::cycle: return "cycle";
    }
    return "?";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"promise-oriented workspace: time-series learning, knowledge graph, attention"};
    app.require_subcommand(1);

    WorkspaceConfig cfg;
    std::string config_path;
    std::string store_flag;
    auto* config_opt = app.add_option("--config", config_path, "config file (key=value lines)");
    auto* store_opt = app.add_option("--store", store_flag, "workspace store path");

    // Defaults, then config file, then environment, then flags.
    auto resolve = [&]() {
        cfg = WorkspaceConfig{};
        if (config_opt->count()) apply_config_file(cfg, config_path);
        apply_env_overrides(cfg);
        if (store_opt->count()) cfg.store_path = store_flag;
    };

    // ---- promises ----
    auto* promises = app.add_subcommand("promises", "declare and inspect promises");
    promises->require_subcommand(1);
    promises->fallthrough();

    auto* p_add = promises->add_subcommand("add", "record a promise");
    p_add->fallthrough();
    std::string pa_giver, pa_receiver, pa_polarity, pa_body, pa_condition;
    p_add->add_option("giver", pa_giver)->required();
    p_add->add_option("receiver", pa_receiver)->required();
    p_add->add_option("polarity", pa_polarity, "+ offers, - accepts")->required();
    p_add->add_option("body", pa_body, "atoms, e.g. {data,rate=0.5}")->required();
    p_add->add_option("--if", pa_condition, "condition atoms for a conditional promise");
    p_add->callback([&]() {
        resolve();
        cfg.validate();
        Promise p;
        p.giver = pa_giver;
        p.receiver = pa_receiver;
        if (pa_polarity == "+") p.polarity = Polarity::offer;
        else if (pa_polarity == "-") p.polarity = Polarity::accept;
        else throw Error("polarity must be + or -");
        p.body = Body::parse(pa_body);
        if (!pa_condition.empty()) p.condition = Body::parse(pa_condition);
        StoreLock lock(cfg.store_path, true);
        Workspace ws = open_workspace(cfg);
        ws.append_promise(p);
        save_store(ws, cfg.store_path);
        std::cerr << "recorded " << promise_to_line(p) << "\n";
    });

    auto* p_list = promises->add_subcommand("list", "print all recorded promises");
    p_list->fallthrough();
    p_list->callback([&]() {
        resolve();
        cfg.validate();
        StoreLock lock(cfg.store_path, false);
        Workspace ws = open_workspace(cfg);
        for (const auto& p : ws.world.promises()) std::cout << promise_to_line(p) << "\n";
    });

    auto* p_bind = promises->add_subcommand("bind", "bind an offer to its acceptance");
    p_bind->fallthrough();
    std::string pb_giver, pb_receiver, pb_type, pb_ctx;
    double pb_weight = 1.0;
    p_bind->add_option("giver", pb_giver)->required();
    p_bind->add_option("receiver", pb_receiver)->required();
    p_bind->add_option("--type", pb_type, "link type label");
    p_bind->add_option("--ctx", pb_ctx, "comma-separated context labels");
    p_bind->add_option("--weight", pb_weight, "channel weight in [0,1]");
    p_bind->callback([&]() {
        resolve();
        cfg.validate();
        StoreLock lock(cfg.store_path, false);
        Workspace ws = open_workspace(cfg);
        const Promise* plus = ws.world.find_promise(pb_giver, pb_receiver, Polarity::offer);
        const Promise* minus = ws.world.find_promise(pb_receiver, pb_giver, Polarity::accept);
        if (!plus) throw Error("no (+) promise from " + pb_giver + " to " + pb_receiver);
        if (!minus) throw Error("no (-) promise from " + pb_receiver + " to " + pb_giver);
        Channel ch = bind_channel(*plus, *minus, pb_type, parse_label_set(pb_ctx), pb_weight);
        std::cout << "bandwidth " << ch.bandwidth.to_string() << "\n";
    });

    auto* p_matrix = promises->add_subcommand("matrix", "offer*accept adjacency over all agents");
    p_matrix->fallthrough();
    p_matrix->callback([&]() {
        resolve();
        cfg.validate();
        StoreLock lock(cfg.store_path, false);
        Workspace ws = open_workspace(cfg);
        const auto& agents = ws.world.agents();
        if (agents.empty()) return;
        std::vector<std::string> ids;
        for (const auto& a : agents) ids.push_back(a.id);
        std::cout << join(ids, " ") << "\n";
        Matrix m = promise_matrix(ws.world);
        for (size_t i = 0; i < m.rows(); ++i) {
            std::vector<std::string> row;
            for (size_t j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
            std::cout << join(row, " ") << "\n";
        }
    });

    auto* p_relay = promises->add_subcommand("relay", "push a payload along a promise chain");
    p_relay->fallthrough();
    std::vector<std::string> pr_chain;
    std::string pr_payload;
    p_relay->add_option("agents", pr_chain, "chain of agent ids, source first")
        ->expected(2, -1);
    p_relay->add_option("--payload", pr_payload, "atoms offered by the source")->required();
    p_relay->callback([&]() {
        resolve();
        cfg.validate();
        StoreLock lock(cfg.store_path, false);
        Workspace ws = open_workspace(cfg);
        RelayResult res = relay_chain(ws.world, pr_chain, Body::parse(pr_payload));
        for (const auto& hop : res.hops) {
            std::cout << "hop\t" << hop.from << "\t" << hop.to << "\t"
                      << hop.bandwidth.to_string() << "\t" << hop.arrived.to_string() << "\t"
                      << to_string(hop.assessment.verdict) << "\t"
                      << format_double(hop.assessment.confidence) << "\n";
        }
        if (res.blocked()) std::cout << "blocked\t" << *res.blocked_at << "\n";
        else std::cout << "delivered\t" << res.delivered.to_string() << "\n";
    });

    // ---- chain ----
    auto* chain = app.add_subcommand("chain", "evaluate a layer pipeline on an input vector");
    chain->fallthrough();
    std::string ch_layers, ch_input, ch_gates, ch_embed;
    double ch_beta = 0.0;
    auto* ch_layers_opt = chain->add_option("--layers", ch_layers, "layer stack file");
    chain->add_option("--input", ch_input, "comma-separated input vector")->required();
    chain->add_option("--gates", ch_gates, "per-layer verdicts, e.g. kept,not_kept");
    auto* ch_embed_opt = chain->add_option("--embed", ch_embed, "softmax or inverted");
    auto* ch_beta_opt = chain->add_option("--beta", ch_beta, "embedding temperature");
    chain->callback([&]() {
        resolve();
        cfg.validate();
        std::vector<LayerSpec> layers;
        if (ch_layers_opt->count()) {
            std::ifstream f(ch_layers);
            if (!f) throw Error("cannot open layer file: " + ch_layers);
            layers = parse_layer_stack(f);
        } else {
            StoreLock lock(cfg.store_path, false);
            Workspace ws = open_workspace(cfg);
            layers = ws.layers;
        }
        if (layers.empty()) throw Error("no layers: pass --layers or store LAYER records");
        std::vector<double> input = parse_number_list(ch_input, "--input");
        std::vector<Verdict> gates;
        if (!ch_gates.empty()) {
            for (const auto& g : split(ch_gates, ',')) gates.push_back(verdict_from_string(g));
        }
        ChainResult res = chain_forward(input, layers, gates);
        if (res.blocked()) {
            std::cerr << "blocked at layer " << *res.blocked_at << "\n";
        }
        std::vector<double> out = res.final_output;
        if (ch_embed_opt->count()) {
            const double beta = ch_beta_opt->count() ? ch_beta : cfg.beta;
            out = embedding_from_string(ch_embed) == Embedding::softmax
                      ? softmax(out, beta)
                      : inverted_embedding(out, beta);
        }
        std::vector<std::string> cells;
        for (double v : out) cells.push_back(format_double(v));
        std::cout << join(cells, " ") << "\n";
    });

    // ---- graph ----
    auto* graph = app.add_subcommand("graph", "knowledge graph operations");
    graph->require_subcommand(1);
    graph->fallthrough();

    auto* g_add_node = graph->add_subcommand("add-node", "add a node (id + full text)");
    g_add_node->fallthrough();
    std::string gn_id;
    std::vector<std::string> gn_text;
    g_add_node->add_option("id", gn_id)->required();
    g_add_node->add_option("text", gn_text, "node text")->required()->expected(1, -1);
    g_add_node->callback([&]() {
        resolve();
        cfg.validate();
        StoreLock lock(cfg.store_path, true);
        Workspace ws = open_workspace(cfg);
        ws.append_node(gn_id, join(gn_text, " "));
        save_store(ws, cfg.store_path);
        std::cerr << "node " << gn_id << " stored\n";
    });

    auto* g_add_link = graph->add_subcommand("add-link", "add a typed link between nodes");
    g_add_link->fallthrough();
    std::string gl_from, gl_class, gl_to, gl_ctx;
    double gl_weight = 1.0;
    g_add_link->add_option("from", gl_from)->required();
    g_add_link->add_option("class", gl_class, "NEAR, LEADS_TO, CONTAINS or EXPRESSES")->required();
    g_add_link->add_option("to", gl_to)->required();
    g_add_link->add_option("--weight", gl_weight, "link weight in [0,1]");
    g_add_link->add_option("--ctx", gl_ctx, "comma-separated context labels");
    g_add_link->callback([&]() {
        resolve();
        cfg.validate();
        StoreLock lock(cfg.store_path, true);
        Workspace ws = open_workspace(cfg);
        ws.upsert_link(gl_from, gl_to, link_class_from_string(gl_class), gl_weight,
                       parse_label_set(gl_ctx));
        save_store(ws, cfg.store_path);
        std::cerr << "link " << gl_from << " -> " << gl_to << " stored\n";
    });

    auto* g_stats = graph->add_subcommand("stats", "eigenvector and betweenness centrality");
    g_stats->fallthrough();
    g_stats->callback([&]() {
        resolve();
        cfg.validate();
        StoreLock lock(cfg.store_path, false);
        Workspace ws = open_workspace(cfg);
        if (ws.graph.node_count() == 0) return;
        const auto evc = ws.graph.evc();
        const auto btc = ws.graph.btc();
        for (const auto& id : ws.graph.node_ids()) {
            std::cout << id << "\t" << format_double(evc.at(id)) << "\t"
                      << format_double(btc.at(id)) << "\n";
        }
    });

    auto* g_paths = graph->add_subcommand("paths", "trace paths to absorbing nodes");
    g_paths->fallthrough();
    std::string gp_start, gp_classes, gp_ctx;
    int gp_depth = 32;
    g_paths->add_option("start", gp_start)->required();
    g_paths->add_option("--classes", gp_classes, "link classes to follow (default all)");
    g_paths->add_option("--ctx", gp_ctx, "context filter labels");
    g_paths->add_option("--max-depth", gp_depth, "path length cap");
    g_paths->callback([&]() {
        resolve();
        cfg.validate();
        StoreLock lock(cfg.store_path, false);
        Workspace ws = open_workspace(cfg);
        std::set<LinkClass> classes;
        if (gp_classes.empty()) {
            classes = {LinkClass::near, LinkClass::leads_to, LinkClass::contains,
                       LinkClass::expresses};
        } else {
            for (const auto& c : split(gp_classes, ',')) classes.insert(link_class_from_string(c));
        }
        for (const auto& path : ws.graph.trace_paths(gp_start, classes, parse_label_set(gp_ctx),
                                                     gp_depth)) {
            std::cout << join(path.nodes, " -> ") << "\t" << end_label(path.end) << "\n";
        }
    });

    // ---- attend ----
    auto* attend_cmd = app.add_subcommand("attend", "rank stored keys against a query");
    attend_cmd->fallthrough();
    std::string at_query, at_context, at_embedding;
    double at_beta = 0.0;
    attend_cmd->add_option("--query", at_query, "comma-separated acceptable features")
        ->required();
    attend_cmd->add_option("--context", at_context, "comma-separated context labels");
    auto* at_embed_opt = attend_cmd->add_option("--embedding", at_embedding, "softmax or inverted");
    auto* at_beta_opt = attend_cmd->add_option("--beta", at_beta, "embedding temperature");
    attend_cmd->callback([&]() {
        resolve();
        if (at_embed_opt->count()) cfg.embedding = at_embedding;
        if (at_beta_opt->count()) cfg.beta = at_beta;
        cfg.validate();
        StoreLock lock(cfg.store_path, false);
        Workspace ws = open_workspace(cfg);
        if (ws.keys.empty()) return;  // nothing to attend to
        AttentionQuery query;
        query.accept = parse_label_set(at_query);
        query.context = parse_label_set(at_context);
        if (query.accept.empty()) throw Error("--query needs at least one feature");
        AttendResult res = attend(ws.keys, query, ws.attend_basis(),
                                  embedding_from_string(cfg.embedding), cfg.beta);
        for (const auto& m : res.matches) {
            std::cout << format_double(m.score) << "\t" << m.id << "\t" << m.value << "\n";
        }
    });

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "fold timestamped samples into a series");
    ingest->fallthrough();
    std::string in_series, in_file;
    long long in_period = 0;
    int in_slots = 0;
    double in_forgetting = 0.0;
    ingest->add_option("--series", in_series, "series name")->required();
    auto* in_period_opt = ingest->add_option("--period", in_period, "seconds per period");
    auto* in_slots_opt = ingest->add_option("--slots", in_slots, "slots per period");
    auto* in_forget_opt = ingest->add_option("--forgetting", in_forgetting, "sliding-mean factor");
    ingest->add_option("file", in_file, "CSV of epoch_seconds,value rows")->required();
    ingest->callback([&]() {
        resolve();
        if (in_period_opt->count()) cfg.period = in_period;
        if (in_slots_opt->count()) cfg.slots = in_slots;
        if (in_forget_opt->count()) cfg.forgetting = in_forgetting;
        cfg.validate();
        StoreLock lock(cfg.store_path, true);
        Workspace ws = open_workspace(cfg);

        SeriesState st;
        auto it = ws.series.find(in_series);
        if (it != ws.series.end()) {
            st = it->second;
            if (in_period_opt->count() && in_period != st.period)
                throw Error("series " + in_series + " already uses period " +
                            std::to_string(st.period));
            if (in_slots_opt->count() && in_slots != st.slots)
                throw Error("series " + in_series + " already uses slots " +
                            std::to_string(st.slots));
        } else {
            st.name = in_series;
            st.period = cfg.period;
            st.slots = cfg.slots;
            st.forgetting = cfg.forgetting;
        }

        PeriodicModel model = st.model(cfg.local_window);
        std::ifstream f(in_file);
        if (!f) throw Error("cannot open input file: " + in_file);
        std::string line;
        size_t lineno = 0, count = 0;
        while (std::getline(f, line)) {
            ++lineno;
            line = trim(line);
            if (line.empty()) continue;
            const auto cells = split(line, ',');
            auto t = cells.size() == 2 ? parse_int(trim(cells[0])) : std::nullopt;
            auto v = cells.size() == 2 ? parse_double(trim(cells[1])) : std::nullopt;
            if (!t || !v) throw ParseError(lineno, in_file + ": expected epoch_seconds,value");
            try {
                model.update(*t, *v);
            } catch (const Error& e) {
                throw ParseError(lineno, in_file + ": " + e.what());
            }
            ++count;
        }
        st.cells = model.cells();
        ws.replace_series(st);
        save_store(ws, cfg.store_path);
        std::cerr << "ingested " << count << " samples into " << in_series << "\n";
    });

    // ---- detect ----
    auto* detect = app.add_subcommand("detect", "classify every learned cell by deviation");
    detect->fallthrough();
    std::string de_series;
    int de_window = 0;
    detect->add_option("--series", de_series, "series name")->required();
    auto* de_window_opt = detect->add_option("--local-window", de_window, "slots per local window");
    detect->callback([&]() {
        resolve();
        if (de_window_opt->count()) cfg.local_window = de_window;
        cfg.validate();
        StoreLock lock(cfg.store_path, false);
        Workspace ws = open_workspace(cfg);
        auto it = ws.series.find(de_series);
        if (it == ws.series.end()) throw Error("unknown series: " + de_series);
        PeriodicModel model = it->second.model(cfg.local_window);
        for (const auto& rep : model.detect()) {
            std::cout << rep.period << "\t" << rep.slot << "\t" << format_double(rep.value)
                      << "\t" << format_double(rep.severity) << "\t" << to_string(rep.band)
                      << "\n";
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
