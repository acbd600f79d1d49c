#pragma once

// Pseudo-periodic time-series learner. Timestamps are folded onto a
// (period, slot) grid; each grid cell keeps streaming moments so that
// cross-period ("same slot, other weeks") and local ("nearby slots, same
// period") statistics can be merged without revisiting raw samples.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sst {

// Streaming mean and scatter (Welford). Merge combines two disjoint
// sample sets exactly, which lets slot and window statistics be built
// from per-cell aggregates.
struct CellStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const CellStats& other);
    double variance() const;  // population
    double sigma() const;
};

enum class Band { normal, yellow, orange, red };
const char* to_string(Band b);

struct DeviationReport {
    std::int64_t period = 0;
    int slot = 0;
    double value = 0.0;       // cell mean under test
    double cross_delta = 0.0;
    double cross_sigma = 0.0;
    double local_delta = 0.0;
    double local_sigma = 0.0;
    double severity = 0.0;    // combined z-radius
    Band band = Band::normal;
    bool components_normal = false;
    bool provisional = false; // too few periods observed to trust sigma
};

struct SlotView {
    int slot = 0;
    std::uint64_t count = 0;
    double mean = 0.0;
    double sigma = 0.0;
    double sliding_mean = 0.0;
    std::uint64_t periods_seen = 0;
};

class PeriodicModel {
  public:
    PeriodicModel(std::int64_t period_seconds, int slots, double forgetting = 0.9,
                  int local_window = 48);

    std::int64_t period_seconds() const { return period_; }
    int slots() const { return slots_; }
    double forgetting() const { return forgetting_; }
    int local_window() const { return local_window_; }

    // t = n*P + tau: period index and slot index for an epoch timestamp.
    std::pair<std::int64_t, int> slot_of(std::int64_t t) const;

    void update(std::int64_t t, double value);

    // Cross-period statistics for one slot, merged over all periods.
    std::optional<SlotView> slot_view(int slot) const;

    // Mean and sigma over the window of slots [slot, slot+window) within
    // one period, wrapped at the period boundary.
    std::optional<std::pair<double, double>> local_average(std::int64_t period, int slot,
                                                           int window) const;

    // Two-component deviation of one observed cell against its own slot
    // history and its local neighbourhood.
    DeviationReport deviation(std::int64_t period, int slot) const;

    // Reports for every populated cell, ordered by (period, slot).
    std::vector<DeviationReport> detect() const;

    const std::map<std::pair<std::int64_t, int>, CellStats>& cells() const { return cells_; }

    // Rebuild from persisted cell aggregates. Sliding means are reseeded
    // from cell means in (period, slot) order.
    static PeriodicModel from_cells(std::int64_t period_seconds, int slots, double forgetting,
                                    int local_window,
                                    const std::map<std::pair<std::int64_t, int>, CellStats>& cells);

  private:
    std::int64_t period_;
    int slots_;
    std::int64_t slot_seconds_;
    double forgetting_;
    int local_window_;
    std::map<std::pair<std::int64_t, int>, CellStats> cells_;
    std::map<int, double> sliding_;      // per-slot exponential mean
    std::map<int, bool> sliding_init_;
};

// Severity thresholds between bands, in units of combined z-radius.
inline constexpr double kBandUnit = 1.4142135623730951;  // sqrt(2)

Band band_for(double severity);

}  // namespace sst
