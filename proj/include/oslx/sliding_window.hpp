// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oslx {

/// Range extrema over windows whose endpoints move monotonically.
///
/// For every k in [0, out.size()), writes the best of values[first(k) ..
/// last(k)] (inclusive) into out[k]. Both first(k) and last(k) must be
/// nondecreasing in k and the range nonempty. Amortized O(values + out).
///
/// Equal values are kept in the deque (an element is only evicted by a
/// strictly better one), so the result does not depend on scan direction.
template <typename Better = std::greater<double>>
class MonotoneWindow {
public:
    template <typename First, typename Last>
    void run(std::span<const double> values, First first, Last last, std::span<double> out) {
        idx_.resize(values.size());
        std::size_t head = 0;
        std::size_t tail = 0;
        std::ptrdiff_t pushed = 0;
        const Better better{};
        for (std::size_t k = 0; k < out.size(); ++k) {
            const std::ptrdiff_t lo = first(k);
            const std::ptrdiff_t hi = last(k);
            if (pushed < lo) pushed = lo;
            for (; pushed <= hi; ++pushed) {
                const double v = values[static_cast<std::size_t>(pushed)];
                while (tail > head && better(v, values[static_cast<std::size_t>(idx_[tail - 1])])) --tail;
                idx_[tail++] = pushed;
            }
            while (idx_[head] < lo) ++head;
            out[k] = values[static_cast<std::size_t>(idx_[head])];
        }
    }

private:
    std::vector<std::ptrdiff_t> idx_;
};

using SlidingMax = MonotoneWindow<std::greater<double>>;
using SlidingMin = MonotoneWindow<std::less<double>>;

/// Minimum of every length-`len` run of `values`; out has values.size() - len + 1 entries.
inline std::vector<double> running_min(std::span<const double> values, std::size_t len) {
    std::vector<double> out(values.size() - len + 1);
    SlidingMin{}.run(
        values, [](std::size_t k) { return static_cast<std::ptrdiff_t>(k); },
        [len](std::size_t k) { return static_cast<std::ptrdiff_t>(k + len - 1); }, out);
    return out;
}

}  // namespace oslx
