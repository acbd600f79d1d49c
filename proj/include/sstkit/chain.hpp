#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sstkit/verdict.hpp"

namespace sst {

enum class Activation { identity, logistic, rectifier };

Activation activation_from_string(const std::string& s);
const char* to_string(Activation a);

/// One aggregation layer: width output units, each taking a weighted sum of
/// the upstream vector plus its own autonomous bias, pushed through the
/// activation. beta is the layer's embedding temperature, carried for
/// callers that sharpen the output.
struct LayerSpec {
    std::vector<std::vector<double>> weights;  // width rows, fan_in columns
    std::vector<double> bias;                  // one per output unit
    Activation activation = Activation::identity;
    double beta = 1.0;

    size_t width() const { return weights.size(); }
    size_t fan_in() const { return weights.empty() ? 0 : weights[0].size(); }
};

struct ChainResult {
    std::vector<std::vector<double>> layer_outputs;
    std::vector<Verdict> gates;  // effective gate per layer
    std::vector<double> final_output;
    std::optional<size_t> blocked_at;

    bool blocked() const { return blocked_at.has_value(); }
};

/// f(W s + r) for one layer. Throws on width mismatch.
std::vector<double> layer_eval(std::span<const double> inputs, const LayerSpec& layer);

/// Evaluates the layer pipeline as a chain of conditional hand-offs: the
/// gate before each layer is the downstream agent's verdict on its
/// upstream promise. A gate that is not kept stops propagation there and
/// zeroes everything downstream. Missing trailing gates count as kept.
ChainResult chain_forward(std::span<const double> inputs, std::span<const LayerSpec> layers,
                          std::span<const Verdict> gates = {});

/// exp(beta w_i) / sum_j exp(beta w_j), computed with max subtraction.
std::vector<double> softmax(std::span<const double> w, double beta);

/// 1 - exp(-beta w_i) per entry, for non-negative w. Needs no cross-entry
/// normalization, so each entry can be maintained independently.
std::vector<double> inverted_embedding(std::span<const double> w, double beta);

/// c*w + (1-c)*target, elementwise. Repeated application with a constant
/// target converges geometrically, forgetting old state at rate c.
std::vector<double> convex_update(std::span<const double> w, std::span<const double> target,
                                  double c);
double convex_update(double w, double target, double c);

/// Reads a layer stack: `LAYER <width> <activation> <beta>` followed by
/// width rows of fan_in weights plus a trailing bias each.
std::vector<LayerSpec> parse_layer_stack(std::istream& in, size_t first_line = 1);
std::string layer_stack_to_string(std::span<const LayerSpec> layers);

}  // namespace sst
