#pragma once

// Seeded Monte Carlo for competing-risk block extremes: parent sampling,
// replicated normalized maxima/minima, and goodness-of-fit tables comparing
// power against linear normalization.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmax/normalization.hpp"

namespace pmax {

enum class NormKind { Power, Linear };

struct Experiment {
    Parent parent1, parent2;
    std::int64_t n1{1}, n2{1};
    std::int64_t reps{1};
    NormKind norm{NormKind::Power};
    int normalize_by{2};  // block whose constants scale M_n
    Orientation orientation{Orientation::Max};
    std::uint64_t seed{42};
    int threads{0};
    std::optional<Coupling> coupling;  // enables the asymptotic regime rule
};

struct ReplicationResult {
    std::vector<double> values;  // normalized extremes, one per replication
    RegimeReport regime;
    std::optional<double> empirical_jump_mass;
};

// n i.i.d. draws from a parent family (inverse transform or exact
// representation), deterministic per seed.
std::vector<double> draw_parent(const Parent& p, std::size_t n, std::uint64_t seed);

// Raw replicated extremes before normalization: max(M_{1,n1}, M_{2,n2}) per
// replication, or the reciprocal-domain minimum for min orientation.
// Replication r draws from substream_seed(seed, r).
std::vector<double> simulate_extremes(const Experiment& exp);

ReplicationResult run_experiment(const Experiment& exp);

// One goodness-of-fit table row: statistic (p-value) for the three tests of
// the normalized sample against the regime's limit law.
struct GofRow {
    std::string label;
    NormKind norm{NormKind::Power};
    std::int64_t n1{0}, n2{0};
    double ks{0}, ks_p{0};
    double cvm{0}, cvm_p{0};
    double ad{0}, ad_p{0};
};

// Runs each experiment once and evaluates both normalizations on the same
// draws (linear rows are skipped with a note when the family has no l-max
// entry and `strict` is false; otherwise the gap is an error).
std::vector<GofRow> convergence_table(const std::vector<Experiment>& grid, bool strict = false);

}  // namespace pmax
