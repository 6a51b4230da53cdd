// SPDX-License-Identifier: Apache-2.0
#include "oslx/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace oslx {

std::size_t thread_budget() {
    std::size_t budget = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("OSLX_THREADS")) {
        const std::string_view text(env);
        std::size_t cap = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
        if (ec == std::errc{} && ptr == text.data() + text.size() && cap > 0) budget = std::min(budget, cap);
    }
    return budget;
}

}  // namespace oslx
