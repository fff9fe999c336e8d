#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string_view>

namespace structcov {

using Rng = std::mt19937_64;

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

/// Independent generator for (seed, replicate, tag). Streams for different tags never
/// share state, so adding a consumer leaves every other stream unchanged.
[[nodiscard]] Rng make_stream(std::uint64_t seed, std::uint64_t replicate, std::string_view tag);

/// T rows drawn i.i.d. from MVN(0, R) through the Cholesky factor of R.
[[nodiscard]] Eigen::MatrixXd sample_mvn(const Eigen::MatrixXd& R, Eigen::Index T, Rng& rng);

}  // namespace structcov
