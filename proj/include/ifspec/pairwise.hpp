#ifndef IFSPEC_PAIRWISE_HPP
#define IFSPEC_PAIRWISE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace ifspec
{

/// A row of value indices, one per column.
using CombinationRow = std::vector<std::size_t>;

/// Full cartesian product of `sizes[i]` values per column, last column fastest.
inline std::vector<CombinationRow> cartesian_rows(const std::vector<std::size_t>& sizes)
{
    std::vector<CombinationRow> rows;
    for (auto n : sizes) {
        if (n == 0) return rows;
    }
    CombinationRow row(sizes.size(), 0);
    for (;;) {
        rows.push_back(row);
        std::size_t col = sizes.size();
        while (col > 0) {
            --col;
            if (++row[col] < sizes[col]) break;
            row[col] = 0;
            if (col == 0) return rows;
        }
        if (sizes.empty()) return rows;
    }
}

namespace detail
{

inline std::vector<CombinationRow> pairwise_rows_variant(const std::vector<std::size_t>& sizes, std::size_t shift)
{
    constexpr std::int64_t free_slot = -1;
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& r : cartesian_rows({sizes[0], sizes[1]})) {
        std::vector<std::int64_t> row(sizes.size(), free_slot);
        row[0] = static_cast<std::int64_t>(r[0]);
        row[1] = static_cast<std::int64_t>(r[1]);
        rows.push_back(std::move(row));
    }

    for (std::size_t col = 2; col < sizes.size(); ++col) {
        const std::size_t width = sizes[col];
        // covered[j][a * width + v]: value a in column j already meets value v in `col`
        std::vector<std::vector<char>> covered(col);
        for (std::size_t j = 0; j < col; ++j) covered[j].assign(sizes[j] * width, 0);

        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto& row = rows[r];
            // ties go to the value whose rotated index is smallest
            const std::size_t rotation = (shift * r) % width;
            std::size_t best = 0;
            std::size_t best_gain = 0;
            bool first = true;
            for (std::size_t k = 0; k < width; ++k) {
                const std::size_t v = (k + rotation) % width;
                std::size_t gain = 0;
                for (std::size_t j = 0; j < col; ++j) {
                    if (row[j] != free_slot && !covered[j][static_cast<std::size_t>(row[j]) * width + v]) ++gain;
                }
                if (first || gain > best_gain) {
                    best = v;
                    best_gain = gain;
                    first = false;
                }
            }
            row[col] = static_cast<std::int64_t>(best);
            for (std::size_t j = 0; j < col; ++j) {
                if (row[j] != free_slot) covered[j][static_cast<std::size_t>(row[j]) * width + best] = 1;
            }
        }

        for (std::size_t j = 0; j < col; ++j) {
            for (std::size_t a = 0; a < sizes[j]; ++a) {
                for (std::size_t v = 0; v < width; ++v) {
                    if (covered[j][a * width + v]) continue;
                    bool placed = false;
                    for (auto& row : rows) {
                        if (row[col] == static_cast<std::int64_t>(v) && row[j] == free_slot) {
                            row[j] = static_cast<std::int64_t>(a);
                            for (std::size_t k = 0; k < col; ++k) {
                                if (row[k] != free_slot) covered[k][static_cast<std::size_t>(row[k]) * width + v] = 1;
                            }
                            placed = true;
                            break;
                        }
                    }
                    if (!placed) {
                        std::vector<std::int64_t> row(sizes.size(), free_slot);
                        row[j] = static_cast<std::int64_t>(a);
                        row[col] = static_cast<std::int64_t>(v);
                        rows.push_back(std::move(row));
                    }
                    covered[j][a * width + v] = 1;
                }
            }
        }
    }

    std::vector<CombinationRow> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        CombinationRow r(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) r[i] = row[i] == free_slot ? 0 : static_cast<std::size_t>(row[i]);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace detail

/**
 *  Greedy in-parameter-order construction of a pairwise covering array.
 *
 *  Every pair of values from any two distinct columns appears together in
 *  at least one row. Columns are added one at a time: existing rows are
 *  extended with the value covering the most new pairs (horizontal growth),
 *  then leftover pairs are placed into rows with free slots or new rows
 *  (vertical growth). A few tie-breaking rotations are tried and the
 *  smallest array is kept.
 */
inline std::vector<CombinationRow> pairwise_rows(const std::vector<std::size_t>& sizes)
{
    for (auto n : sizes) {
        if (n == 0) return {};
    }
    if (sizes.size() <= 2) return cartesian_rows(sizes);
    std::size_t widest = 0;
    for (auto n : sizes) widest = std::max(widest, n);
    std::vector<CombinationRow> best;
    for (std::size_t shift = 0; shift < widest; ++shift) {
        auto rows = detail::pairwise_rows_variant(sizes, shift);
        if (best.empty() || rows.size() < best.size()) best = std::move(rows);
    }
    return best;
}

} // namespace ifspec
#endif // IFSPEC_PAIRWISE_HPP
