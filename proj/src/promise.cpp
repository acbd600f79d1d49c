#include "sstkit/promise.hpp"

#include <algorithm>

#include "sstkit/error.hpp"
#include "sstkit/strings.hpp"

namespace sst {

const Agent& World::add_agent(Agent a) {
    if (a.id.empty()) throw Error("agent id must not be empty");
    if (a.sampling_rate < 0) throw Error("agent sampling rate must be non-negative");
    if (index_.count(a.id)) throw Error("duplicate agent id: " + a.id);
    index_[a.id] = agents_.size();
    agents_.push_back(std::move(a));
    return agents_.back();
}

const Agent& World::add_agent(const std::string& id, double sampling_rate) {
    Agent a;
    a.id = id;
    a.sampling_rate = sampling_rate;
    return add_agent(std::move(a));
}

bool World::has_agent(const std::string& id) const { return index_.count(id) != 0; }

const Agent& World::agent(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("unknown agent: " + id);
    return agents_[it->second];
}

const Promise& World::add_promise(Promise p) {
    if (!has_agent(p.giver)) throw Error("promise giver is not a registered agent: " + p.giver);
    if (!has_agent(p.receiver))
        throw Error("promise receiver is not a registered agent: " + p.receiver);
    promises_.push_back(std::move(p));
    return promises_.back();
}

const Promise* World::find_promise(const std::string& giver, const std::string& receiver,
                                   Polarity polarity) const {
    for (const auto& p : promises_) {
        if (p.giver == giver && p.receiver == receiver && p.polarity == polarity) return &p;
    }
    return nullptr;
}

Channel bind_channel(const Promise& plus, const Promise& minus, const std::string& link_type,
                     std::set<std::string> context, double weight) {
    if (plus.polarity != Polarity::offer || minus.polarity != Polarity::accept) {
        throw Error("polarity error: bind_channel needs a (+) offer and a (-) acceptance");
    }
    if (plus.giver != minus.receiver || plus.receiver != minus.giver) {
        throw Error("binding error: promise endpoints do not mirror each other (" + plus.giver +
                    "->" + plus.receiver + " vs " + minus.giver + "->" + minus.receiver + ")");
    }
    if (weight < 0.0 || weight > 1.0) throw Error("channel weight must lie in [0,1]");
    Channel ch;
    ch.plus = plus;
    ch.minus = minus;
    ch.bandwidth = plus.body.intersect(minus.body);
    ch.link_type = link_type;
    ch.context = std::move(context);
    ch.weight = weight;
    return ch;
}

Verdict verdict_for(const Body& obligation, const Body& observed) {
    if (observed.empty()) return Verdict::undetermined;
    if (observed.superset_of(obligation)) return Verdict::kept;
    return Verdict::not_kept;
}

double assessment_confidence(double assessor_rate, double source_rate) {
    if (source_rate <= 0.0) return 1.0;
    return std::min(1.0, assessor_rate / (2.0 * source_rate));
}

Assessment assess(const Agent& assessor, const Channel& channel, const Body& observed,
                  double source_rate) {
    Assessment a;
    a.assessor = assessor.id;
    a.promise = channel.plus;
    a.verdict = verdict_for(channel.bandwidth, observed);
    a.confidence = assessment_confidence(assessor.sampling_rate, source_rate);
    return a;
}

RelayResult relay_chain(const World& world, const std::vector<std::string>& chain,
                        const Body& payload) {
    if (chain.size() < 2) throw Error("relay chain needs at least two agents");
    for (const auto& id : chain) world.agent(id);  // throws on unknown

    // Collect and validate the promise pattern before moving any data.
    std::vector<Channel> channels;
    const Promise* upstream_offer = nullptr;
    for (size_t k = 0; k + 1 < chain.size(); ++k) {
        const std::string& from = chain[k];
        const std::string& to = chain[k + 1];
        const Promise* plus = world.find_promise(from, to, Polarity::offer);
        const Promise* minus = world.find_promise(to, from, Polarity::accept);
        if (!plus)
            throw Error("incomplete relay chain: missing (+) promise " + from + " -> " + to);
        if (!minus)
            throw Error("incomplete relay chain: missing (-) promise " + to + " -> " + from);
        if (k > 0) {
            if (!plus->condition)
                throw Error("incomplete relay chain: offer " + from + " -> " + to +
                            " must be conditional on upstream content");
            if (plus->condition->disjoint_with(upstream_offer->body))
                throw Error("incomplete relay chain: condition of " + from + " -> " + to +
                            " does not reference the upstream offer");
        }
        channels.push_back(bind_channel(*plus, *minus));
        upstream_offer = plus;
    }

    RelayResult result;
    Body current = payload;
    for (size_t k = 0; k < channels.size(); ++k) {
        const Channel& ch = channels[k];
        const Agent& hop_receiver = world.agent(chain[k + 1]);
        const Agent& hop_sender = world.agent(chain[k]);

        Body arrived = current.intersect(ch.bandwidth);
        // The first offer is unconditional, so its full bandwidth is owed.
        // Later offers were conditional: only the part enabled by what the
        // sender actually received is owed.
        Body obligation = (k == 0) ? ch.bandwidth : ch.bandwidth.intersect(current);
        Assessment a;
        a.assessor = hop_receiver.id;
        a.promise = ch.plus;
        a.verdict = verdict_for(obligation, arrived);
        a.confidence = assessment_confidence(hop_receiver.sampling_rate, hop_sender.sampling_rate);

        result.hops.push_back({chain[k], chain[k + 1], ch.bandwidth, arrived, a});
        current = arrived;

        const bool is_intermediary = (k + 1 < chain.size() - 1);
        if (is_intermediary && a.verdict != Verdict::kept) {
            result.blocked_at = chain[k + 1];
            result.delivered = Body{};
            return result;
        }
    }
    result.delivered = current;
    return result;
}

RelayResult relay(const World& world, const std::string& source, const std::string& intermediary,
                  const std::string& receiver, const Body& payload) {
    return relay_chain(world, {source, intermediary, receiver}, payload);
}

Matrix promise_matrix(const World& world) {
    const size_t n = world.agents().size();
    Matrix offers(n, n), accepts(n, n);
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < n; ++i) idx[world.agents()[i].id] = i;
    for (const auto& p : world.promises()) {
        const size_t g = idx.at(p.giver);
        const size_t r = idx.at(p.receiver);
        if (p.polarity == Polarity::offer) {
            offers(g, r) = 1.0;
        } else {
            // (-) from j to i accepts i's offer: it contributes to entry (i,j).
            accepts(r, g) = 1.0;
        }
    }
    Matrix out(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) out(i, j) = offers(i, j) * accepts(i, j);
    return out;
}

std::string to_string(Polarity p) { return p == Polarity::offer ? "+" : "-"; }

std::string promise_to_line(const Promise& p) {
    std::string line = "PROMISE " + p.giver + " " + p.receiver + " " + to_string(p.polarity) + " " +
                       p.body.to_string();
    if (p.condition) line += " | " + p.condition->to_string();
    return line;
}

Promise promise_from_line(const std::string& line) {
    auto tokens = split_ws(line);
    if (tokens.size() < 5 || tokens[0] != "PROMISE") {
        throw Error("malformed promise record: " + line);
    }
    Promise p;
    p.giver = tokens[1];
    p.receiver = tokens[2];
    if (tokens[3] == "+") {
        p.polarity = Polarity::offer;
    } else if (tokens[3] == "-") {
        p.polarity = Polarity::accept;
    } else {
        throw Error("malformed promise polarity: " + tokens[3]);
    }
    p.body = Body::parse(tokens[4]);
    if (tokens.size() > 5) {
        if (tokens.size() != 7 || tokens[5] != "|") {
            throw Error("malformed promise condition: " + line);
        }
        p.condition = Body::parse(tokens[6]);
    }
    return p;
}

}  // namespace sst
