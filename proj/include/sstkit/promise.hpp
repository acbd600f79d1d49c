#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sstkit/atoms.hpp"
#include "sstkit/matrix.hpp"
#include "sstkit/verdict.hpp"

namespace sst {

/// An autonomous node. The interior map is private working state and is
/// never written to any channel or store output.
struct Agent {
    std::string id;
    std::map<std::string, std::string> interior;
    double sampling_rate = 1.0;  // samples per unit time, >= 0
};

enum class Polarity { offer, accept };

/// A signed declaration of intent: (+) offers content, (-) accepts it.
/// A promise constrains only its giver. A conditional promise b|c is only
/// binding to the extent its condition c has been satisfied upstream.
struct Promise {
    std::string giver;
    std::string receiver;
    Polarity polarity = Polarity::offer;
    Body body;
    std::optional<Body> condition;
};

/// A bound (+)/(-) pair. The bandwidth is the body intersection: the most
/// the pair can actually communicate. Empty bandwidth is legal; the agents
/// simply bound incompatible intent.
struct Channel {
    Promise plus;
    Promise minus;
    Body bandwidth;
    std::string link_type;
    std::set<std::string> context;
    double weight = 1.0;  // in [0,1]
};

struct Assessment {
    std::string assessor;
    Promise promise;  // the promise being judged
    Verdict verdict = Verdict::undetermined;
    double confidence = 0.0;  // in [0,1]
};

/// Registry of agents and their promises. Agents keep insertion order,
/// which fixes the index order of promise_matrix. All query operations are
/// const and safe to run concurrently; mutation needs exclusive access.
class World {
public:
    const Agent& add_agent(Agent a);
    const Agent& add_agent(const std::string& id, double sampling_rate = 1.0);

    bool has_agent(const std::string& id) const;
    const Agent& agent(const std::string& id) const;
    const std::vector<Agent>& agents() const { return agents_; }

    const Promise& add_promise(Promise p);
    const std::vector<Promise>& promises() const { return promises_; }

    // First promise matching (giver, receiver, polarity), or nullptr.
    const Promise* find_promise(const std::string& giver, const std::string& receiver,
                                Polarity polarity) const;

private:
    std::vector<Agent> agents_;
    std::map<std::string, size_t> index_;
    std::vector<Promise> promises_;
};

/// Binds an offer to a matching acceptance. Throws on wrong polarities or
/// endpoints that do not mirror each other.
Channel bind_channel(const Promise& plus, const Promise& minus,
                     const std::string& link_type = "", std::set<std::string> context = {},
                     double weight = 1.0);

/// Verdict over an obligation given what was actually sampled: empty
/// observation is undetermined, full coverage is kept, anything else is
/// not kept.
Verdict verdict_for(const Body& obligation, const Body& observed);

/// Nyquist-style confidence: the assessor must sample at twice the source
/// rate for full confidence. Non-positive source rate counts as a constant
/// signal, which any sampling captures.
double assessment_confidence(double assessor_rate, double source_rate);

/// The assessor's judgement of the channel's (+) promise from its own
/// samples. Total: never throws.
Assessment assess(const Agent& assessor, const Channel& channel, const Body& observed,
                  double source_rate);

struct HopReport {
    std::string from;
    std::string to;
    Body bandwidth;
    Body arrived;
    Assessment assessment;
};

struct RelayResult {
    std::vector<HopReport> hops;
    Body delivered;
    std::optional<std::string> blocked_at;

    bool blocked() const { return blocked_at.has_value(); }
};

/// Forwards a payload across a chain of agents joined by relay promises.
/// Hop k needs an offer chain[k] -> chain[k+1] and a matching acceptance;
/// every offer after the first must be conditional on upstream content.
/// Each intermediary forwards only if it judges its upstream promise kept;
/// an intermediary whose own offer was conditional is judged against the
/// part of its promise the condition actually enabled.
RelayResult relay_chain(const World& world, const std::vector<std::string>& chain,
                        const Body& payload);

/// Three-agent form: source -> intermediary -> receiver.
RelayResult relay(const World& world, const std::string& source,
                  const std::string& intermediary, const std::string& receiver,
                  const Body& payload);

/// Square matrix over the world's agents (insertion order): entry (i,j) is
/// nonzero iff agent i offers to j and j accepts from i, i.e. the
/// elementwise product of the (+) and (-) incidence matrices.
Matrix promise_matrix(const World& world);

std::string to_string(Polarity p);

/// Line form: `PROMISE giver receiver +|- {atoms} [| {condition}]`.
std::string promise_to_line(const Promise& p);
Promise promise_from_line(const std::string& line);

}  // namespace sst
