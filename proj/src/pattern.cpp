#include "sdnf/pattern.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdnf {

BumpPattern count_bumps(const Vector& field, double theta, int min_width, bool periodic) {
    if (!field.allFinite())
        throw std::invalid_argument("field contains non-finite values");
    if (min_width < 1)
        throw std::invalid_argument("min_width must be >= 1");

    const int n = static_cast<int>(field.size());
    BumpPattern pattern;
    pattern.threshold_used = theta;
    pattern.min_width_nodes = min_width;

    std::vector<std::pair<int, int>> runs;
    int start = -1;
    for (int i = 0; i < n; ++i) {
        const bool active = field[i] >= theta;
        if (active && start < 0)
            start = i;
        if (!active && start >= 0) {
            runs.emplace_back(start, i - 1);
            start = -1;
        }
    }
    if (start >= 0)
        runs.emplace_back(start, n - 1);

    // Merge the boundary-touching runs before width filtering so a bump
    // split by the domain edge is judged by its combined width.
    bool wrapped = false;
    if (periodic && runs.size() >= 2 && runs.front().first == 0 && runs.back().second == n - 1) {
        const int combined = (runs.front().second - runs.front().first + 1) +
                             (runs.back().second - runs.back().first + 1);
        if (combined >= min_width) {
            runs.back().second = runs.front().second; // wrapped interval marker
            runs.erase(runs.begin());
            wrapped = true;
        }
    }

    for (const auto& [a, b] : runs) {
        const int width = wrapped && b < a ? (n - a) + (b + 1) : b - a + 1;
        if (width >= min_width)
            pattern.intervals.emplace_back(a, b);
    }
    pattern.count = static_cast<int>(pattern.intervals.size());
    pattern.wrapped = wrapped;
    return pattern;
}

MismatchTable mismatch_table(const std::vector<int>& truth_counts,
                             const std::vector<int>& recovered_counts) {
    if (truth_counts.size() != recovered_counts.size())
        throw std::invalid_argument("bump-count lists must have equal length");

    int max_bumps = 1;
    for (int c : truth_counts)
        max_bumps = std::max(max_bumps, c);
    for (int c : recovered_counts)
        max_bumps = std::max(max_bumps, c);

    std::vector<int> exact(max_bumps + 1, 0), recovered(max_bumps + 1, 0);
    for (int c : truth_counts)
        exact[std::max(c, 0)]++;
    for (int c : recovered_counts)
        recovered[std::max(c, 0)]++;

    MismatchTable table;
    for (int b = exact[0] + recovered[0] > 0 ? 0 : 1; b <= max_bumps; ++b) {
        MismatchRow row;
        row.n_bumps = b;
        row.exact_count = exact[b];
        row.recovered_count = recovered[b];
        row.mismatch = std::abs(exact[b] - recovered[b]);
        table.total_mismatch += row.mismatch;
        table.rows.push_back(row);
    }
    for (size_t i = 0; i < truth_counts.size(); ++i)
        if (truth_counts[i] != recovered_counts[i])
            ++table.per_run_disagreements;
    return table;
}

} // namespace sdnf
