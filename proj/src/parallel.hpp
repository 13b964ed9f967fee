#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qrenew::detail {

inline constexpr std::size_t kBlockSize = 1024;

inline std::size_t block_count(std::size_t items) { return (items + kBlockSize - 1) / kBlockSize; }

// Computes make(b) for every block b, running up to `workers` blocks at a time, and feeds the
// results to merge() strictly in block order. The merged result is independent of `workers`.
template <typename Acc, typename Make, typename Merge>
void ordered_block_reduce(std::size_t blocks, std::size_t workers, Make&& make, Merge&& merge) {
    workers = std::max<std::size_t>(1, std::min(workers, blocks));
    for (std::size_t wave = 0; wave < blocks; wave += workers) {
        const std::size_t count = std::min(workers, blocks - wave);
        std::vector<Acc> results(count);
        if (count == 1) {
            results[0] = make(wave);
        } else {
            std::vector<std::exception_ptr> errors(count);
            {
                std::vector<std::jthread> threads;
                threads.reserve(count);
                for (std::size_t i = 0; i < count; ++i) {
                    threads.emplace_back([&, i] {
                        try {
                            results[i] = make(wave + i);
                        } catch (...) {
                            errors[i] = std::current_exception();
                        }
                    });
                }
            }
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }
        for (auto& r : results) merge(r);
    }
}

}  // namespace qrenew::detail
