#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucibdl {

using Scalar = double;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

template <typename Derived>
using Ref = Eigen::Ref<Derived>;
using ConstMatrixRef = Eigen::Ref<const Matrix>;
using ConstVectorRef = Eigen::Ref<const Vector>;

/// All recoverable failures (bad data, bad config, numerical breakdown)
/// surface as this exception type; the CLI maps it to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The two tuned hyperparameters: model precision tau (inverse observation
/// noise variance, in original target units) and the dropout rate.
struct HyperPair {
  Scalar tau = 1.0;
  Scalar dropout = 0.05;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

}  // namespace ucibdl
