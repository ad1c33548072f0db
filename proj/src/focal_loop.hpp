#pragma once

// Shared Dirichlet-DSM sampling loop. Draw i lives in chunk
// i / focal_chunk_size and comes from Stream::derive(seed, chunk), so every
// caller that walks the same (counts, seed) sees the same focal sets.

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "dsinfer/dsm.hpp"
#include "dsinfer/parallel.hpp"

namespace dsinfer::detail {

// Non-owning view over a sampled (Z_0, Z_1, ..., Z_K) buffer.
struct FocalView {
    std::span<const double> full;

    double z0() const { return full[0]; }
    double z(std::size_t k) const { return full[k + 1]; }
    std::size_t size() const { return full.size() - 1; }

    // 1 - sum_{j != k} z_j; exact 1 when every other cell is exactly zero.
    double upper(std::size_t k) const {
        double others = 0.0;
        for (std::size_t j = 0; j < size(); ++j)
            if (j != k) others += z(j);
        return 1.0 - others;
    }
};

template <class Tally, class Visit>
Tally tally_focal_sets(const CountVector& counts, std::uint64_t n_draws, RandomSeed seed,
                       unsigned threads, Visit&& visit) {
    const ShapeVector shape = counts.posterior_shape();
    return run_chunked<Tally>(n_draws, focal_chunk_size, threads,
                              [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
                                  Stream stream = Stream::derive(seed, chunk);
                                  std::vector<double> buf(shape.size());
                                  Tally tally{};
                                  for (std::uint64_t i = begin; i < end; ++i) {
                                      sample_dirichlet(shape, stream, buf);
                                      visit(FocalView{buf}, tally);
                                  }
                                  return tally;
                              });
}

struct TriTally {
    std::uint64_t n_for = 0;
    std::uint64_t n_against = 0;
    std::uint64_t n = 0;

    TriTally& operator+=(const TriTally& o) {
        n_for += o.n_for;
        n_against += o.n_against;
        n += o.n;
        return *this;
    }
};

}  // namespace dsinfer::detail
