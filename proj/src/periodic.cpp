#include "sstkit/periodic.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "sstkit/chain.hpp"
#include "sstkit/error.hpp"

namespace sst {

void CellStats::add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
}

void CellStats::merge(const CellStats& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double d = other.mean - mean;
    const double n = na + nb;
    mean += d * nb / n;
    m2 += other.m2 + d * d * na * nb / n;
    count += other.count;
}

double CellStats::variance() const {
    if (count == 0) return 0.0;
    return m2 / static_cast<double>(count);
}

double CellStats::sigma() const { return std::sqrt(variance()); }

const char* to_string(Band b) {
    switch (b) {
        case Band::normal: return "normal";
        case Band::yellow: return "yellow";
        case Band::orange: return "orange";
        case Band::red: return "red";
    }
    return "?";
}

Band band_for(double severity) {
    if (severity < kBandUnit) return Band::normal;
    if (severity < 2.0 * kBandUnit) return Band::yellow;
    if (severity < 3.0 * kBandUnit) return Band::orange;
    return Band::red;
}

PeriodicModel::PeriodicModel(std::int64_t period_seconds, int slots, double forgetting,
                             int local_window)
    : period_(period_seconds),
      slots_(slots),
      forgetting_(forgetting),
      local_window_(local_window) {
    if (period_ <= 0) throw Error("period must be positive");
    if (slots_ <= 0) throw Error("slot count must be positive");
    if (period_ % slots_ != 0) throw Error("period must be divisible by slot count");
    slot_seconds_ = period_ / slots_;
    if (forgetting_ <= 0.0 || forgetting_ >= 1.0) throw Error("forgetting factor must lie in (0,1)");
    if (local_window_ <= 0) throw Error("local window must be positive");
}

std::pair<std::int64_t, int> PeriodicModel::slot_of(std::int64_t t) const {
    if (t < 0) throw Error("timestamps must be non-negative");
    const std::int64_t n = t / period_;
    const std::int64_t tau = (t % period_) / slot_seconds_;
    return {n, static_cast<int>(tau)};
}

void PeriodicModel::update(std::int64_t t, double value) {
    const auto [n, tau] = slot_of(t);
    cells_[{n, tau}].add(value);
    if (!sliding_init_[tau]) {
        sliding_[tau] = value;
        sliding_init_[tau] = true;
    } else {
        sliding_[tau] = convex_update(sliding_[tau], value, forgetting_);
    }
}

std::optional<SlotView> PeriodicModel::slot_view(int slot) const {
    if (slot < 0 || slot >= slots_) throw Error("slot index out of range");
    CellStats merged;
    std::uint64_t periods_seen = 0;
    for (const auto& [key, stats] : cells_) {
        if (key.second != slot) continue;
        merged.merge(stats);
        ++periods_seen;
    }
    if (merged.count == 0) return std::nullopt;
    SlotView view;
    view.slot = slot;
    view.count = merged.count;
    view.mean = merged.mean;
    view.sigma = merged.sigma();
    auto sit = sliding_.find(slot);
    view.sliding_mean = sit == sliding_.end() ? merged.mean : sit->second;
    view.periods_seen = periods_seen;
    return view;
}

std::optional<std::pair<double, double>> PeriodicModel::local_average(std::int64_t period,
                                                                      int slot,
                                                                      int window) const {
    if (slot < 0 || slot >= slots_) throw Error("slot index out of range");
    if (window <= 0) throw Error("local window must be positive");
    if (window > slots_) window = slots_;
    CellStats merged;
    for (int k = 0; k < window; ++k) {
        const int s = (slot + k) % slots_;
        auto it = cells_.find({period, s});
        if (it != cells_.end()) merged.merge(it->second);
    }
    if (merged.count == 0) return std::nullopt;
    return std::make_pair(merged.mean, merged.sigma());
}

DeviationReport PeriodicModel::deviation(std::int64_t period, int slot) const {
    auto it = cells_.find({period, slot});
    if (it == cells_.end()) throw Error("no samples for requested cell");
    const double chi = it->second.mean;

    const auto cross = slot_view(slot);
    const auto local = local_average(period, slot, local_window_);
    // The cell itself is populated, so both merges found samples.

    DeviationReport rep;
    rep.period = period;
    rep.slot = slot;
    rep.value = chi;
    rep.cross_delta = chi - cross->mean;
    rep.cross_sigma = cross->sigma;
    rep.local_delta = chi - local->first;
    rep.local_sigma = local->second;
    rep.provisional = cross->periods_seen < 3;

    const double inf = std::numeric_limits<double>::infinity();
    auto z = [&](double delta, double sigma) {
        if (sigma == 0.0) return delta == 0.0 ? 0.0 : inf;
        return delta / sigma;
    };
    const double zt = z(rep.cross_delta, rep.cross_sigma);
    const double zp = z(rep.local_delta, rep.local_sigma);
    rep.severity = std::sqrt(zt * zt + zp * zp);
    rep.band = band_for(rep.severity);

    auto component_ok = [&](double delta, double sigma) {
        if (sigma == 0.0) return delta == 0.0;
        return std::abs(delta) < 2.0 * sigma;
    };
    rep.components_normal = component_ok(rep.cross_delta, rep.cross_sigma) &&
                            component_ok(rep.local_delta, rep.local_sigma);
    return rep;
}

std::vector<DeviationReport> PeriodicModel::detect() const {
    std::vector<DeviationReport> out;
    for (const auto& [key, stats] : cells_) out.push_back(deviation(key.first, key.second));
    return out;
}

PeriodicModel PeriodicModel::from_cells(
    std::int64_t period_seconds, int slots, double forgetting, int local_window,
    const std::map<std::pair<std::int64_t, int>, CellStats>& cells) {
    PeriodicModel model(period_seconds, slots, forgetting, local_window);
    model.cells_ = cells;
    // Raw samples are gone, so the exponential mean is reseeded from cell
    // means in arrival (period) order.
    for (const auto& [key, stats] : cells) {
        const int tau = key.second;
        if (!model.sliding_init_[tau]) {
            model.sliding_[tau] = stats.mean;
            model.sliding_init_[tau] = true;
        } else {
            model.sliding_[tau] = convex_update(model.sliding_[tau], stats.mean, forgetting);
        }
    }
    return model;
}

}  // namespace sst
