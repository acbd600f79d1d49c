#include "sstkit/chain.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>

#include "sstkit/error.hpp"
#include "sstkit/strings.hpp"

namespace sst {

Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "logistic") return Activation::logistic;
    if (s == "rectifier") return Activation::rectifier;
    throw Error("unknown activation: " + s);
}

const char* to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::logistic: return "logistic";
        case Activation::rectifier: return "rectifier";
    }
    return "?";
}

static double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::identity: return x;
        case Activation::logistic: return 1.0 / (1.0 + std::exp(-x));
        case Activation::rectifier: return x > 0.0 ? x : 0.0;
    }
    return x;
}

std::vector<double> layer_eval(std::span<const double> inputs, const LayerSpec& layer) {
    if (layer.bias.size() != layer.width()) throw Error("layer bias width mismatch");
    std::vector<double> out(layer.width());
    for (size_t j = 0; j < layer.width(); ++j) {
        const auto& row = layer.weights[j];
        if (row.size() != inputs.size()) {
            throw Error("layer fan-in " + std::to_string(row.size()) +
                        " does not match input width " + std::to_string(inputs.size()));
        }
        double acc = layer.bias[j];
        for (size_t i = 0; i < row.size(); ++i) acc += row[i] * inputs[i];
        out[j] = apply_activation(layer.activation, acc);
    }
    return out;
}

ChainResult chain_forward(std::span<const double> inputs, std::span<const LayerSpec> layers,
                          std::span<const Verdict> gates) {
    if (gates.size() > layers.size()) throw Error("more gates than layers");

    ChainResult result;
    result.gates.assign(layers.size(), Verdict::kept);
    std::copy(gates.begin(), gates.end(), result.gates.begin());

    std::vector<double> current(inputs.begin(), inputs.end());
    for (size_t l = 0; l < layers.size(); ++l) {
        if (!result.blocked_at && result.gates[l] != Verdict::kept) {
            result.blocked_at = l;
        }
        if (result.blocked_at) {
            current.assign(layers[l].width(), 0.0);
        } else {
            current = layer_eval(current, layers[l]);
        }
        result.layer_outputs.push_back(current);
    }
    result.final_output = current;
    return result;
}

std::vector<double> softmax(std::span<const double> w, double beta) {
    if (w.empty()) throw Error("softmax of an empty vector");
    if (!(beta > 0.0)) throw Error("softmax temperature must be positive");
    const double m = *std::max_element(w.begin(), w.end());
    if (!std::isfinite(m)) throw Error("softmax requires finite entries");
    std::vector<double> out(w.size());
    double sum = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
        out[i] = std::exp(beta * (w[i] - m));
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

std::vector<double> inverted_embedding(std::span<const double> w, double beta) {
    if (!(beta > 0.0)) throw Error("embedding temperature must be positive");
    std::vector<double> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0.0) throw Error("inverted embedding needs non-negative weights");
        out[i] = 1.0 - std::exp(-beta * w[i]);
    }
    return out;
}

std::vector<double> convex_update(std::span<const double> w, std::span<const double> target,
                                  double c) {
    if (w.size() != target.size()) throw Error("convex update length mismatch");
    if (!(c > 0.0 && c < 1.0)) throw Error("forgetting factor must lie in (0,1)");
    std::vector<double> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) out[i] = c * w[i] + (1.0 - c) * target[i];
    return out;
}

double convex_update(double w, double target, double c) {
    if (!(c > 0.0 && c < 1.0)) throw Error("forgetting factor must lie in (0,1)");
    return c * w + (1.0 - c) * target;
}

std::vector<LayerSpec> parse_layer_stack(std::istream& in, size_t first_line) {
    std::vector<LayerSpec> layers;
    std::string line;
    size_t lineno = first_line - 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto tokens = split_ws(t);
        if (tokens[0] != "LAYER" || tokens.size() != 4) {
            throw ParseError(lineno, "expected `LAYER <width> <activation> <beta>`, got: " + t);
        }
        auto width = parse_int(tokens[1]);
        if (!width || *width <= 0) throw ParseError(lineno, "bad layer width: " + tokens[1]);
        LayerSpec spec;
        const size_t header_lineno = lineno;
        try {
            spec.activation = activation_from_string(tokens[2]);
        } catch (const Error& e) {
            throw ParseError(header_lineno, e.what());
        }
        auto beta = parse_double(tokens[3]);
        if (!beta || !(*beta > 0.0)) throw ParseError(lineno, "bad layer beta: " + tokens[3]);
        spec.beta = *beta;

        for (long long r = 0; r < *width; ++r) {
            if (!std::getline(in, line)) {
                throw ParseError(lineno, "layer truncated: expected " + std::to_string(*width) +
                                             " weight rows");
            }
            ++lineno;
            auto cells = split_ws(line);
            if (cells.size() < 2) {
                throw ParseError(lineno, "weight row needs at least one weight and a bias");
            }
            std::vector<double> row;
            for (const auto& cell : cells) {
                auto v = parse_double(cell);
                if (!v) throw ParseError(lineno, "bad number in weight row: " + cell);
                row.push_back(*v);
            }
            spec.bias.push_back(row.back());
            row.pop_back();
            if (!spec.weights.empty() && spec.weights[0].size() != row.size()) {
                throw ParseError(lineno, "ragged weight rows within a layer");
            }
            spec.weights.push_back(std::move(row));
        }
        // Widths must agree between consecutive layers.
        if (!layers.empty() && spec.fan_in() != layers.back().width()) {
            throw ParseError(header_lineno,
                             "layer " + std::to_string(layers.size()) + " fan-in " +
                                 std::to_string(spec.fan_in()) + " does not match previous width " +
                                 std::to_string(layers.back().width()));
        }
        layers.push_back(std::move(spec));
    }
    return layers;
}

std::string layer_stack_to_string(std::span<const LayerSpec> layers) {
    std::string out;
    for (const auto& layer : layers) {
        out += "LAYER " + std::to_string(layer.width()) + " " +
               std::string(to_string(layer.activation)) + " " + format_double(layer.beta) + "\n";
        for (size_t j = 0; j < layer.width(); ++j) {
            std::vector<std::string> cells;
            for (double w : layer.weights[j]) cells.push_back(format_double(w));
            cells.push_back(format_double(layer.bias[j]));
            out += join(cells, " ") + "\n";
        }
    }
    return out;
}

}  // namespace sst
