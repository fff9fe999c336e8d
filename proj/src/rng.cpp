#include "structcov/rng.hpp"

#include "structcov/error.hpp"

namespace structcov {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint64_t replicate, std::string_view tag) {
  // FNV-1a over the tag, then mix everything through splitmix64.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ replicate);
  k = splitmix64(k ^ h);
  std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(replicate)};
  return Rng(seq);
}

Eigen::MatrixXd sample_mvn(const Eigen::MatrixXd& R, Eigen::Index T, Rng& rng) {
  const Eigen::Index d = R.rows();
  if (R.cols() != d) throw DimensionError("covariance must be square");
  if (T < 0) throw DomainError("sample size must be nonnegative");
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
  std::normal_distribution<double> z;
  Eigen::MatrixXd Z(T, d);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index i = 0; i < d; ++i) Z(t, i) = z(rng);
  const Eigen::MatrixXd L = llt.matrixL();
  return Z * L.transpose();
}

}  // namespace structcov
