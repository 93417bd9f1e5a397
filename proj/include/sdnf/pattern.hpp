#pragma once

#include <utility>
#include <vector>

#include "sdnf/types.hpp"

namespace sdnf {

/// Supra-threshold activity regions of a field snapshot.
struct BumpPattern {
    int count = 0;
    std::vector<std::pair<int, int>> intervals; // inclusive node ranges
    double threshold_used = 0.0;
    int min_width_nodes = 1;
    bool wrapped = false; // first/last runs merged across the periodic boundary
};

/// Counts maximal contiguous runs of nodes with field >= theta.  Runs
/// shorter than min_width are discarded; with periodic on, runs touching
/// both domain ends merge into one bump.
BumpPattern count_bumps(const Vector& field, double theta, int min_width = 3,
                        bool periodic = true);

struct MismatchRow {
    int n_bumps = 0;
    int exact_count = 0;
    int recovered_count = 0;
    int mismatch = 0;
};

/// Histogram comparison of bump counts over M paired runs, in the layout
/// of the published pattern-recognition tables.
struct MismatchTable {
    std::vector<MismatchRow> rows;
    int total_mismatch = 0;
    int per_run_disagreements = 0; // secondary statistic: #runs with differing counts
};

MismatchTable mismatch_table(const std::vector<int>& truth_counts,
                             const std::vector<int>& recovered_counts);

} // namespace sdnf
