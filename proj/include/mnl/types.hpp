/// @file  types.hpp
/// @brief Common dense types used across the library.

#pragma once

#include <Eigen/Dense>

namespace mnl {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Read-only views that bind Eigen expressions and blocks without copies.
using MatrixRef = Eigen::Ref<const Matrix>;
using VectorRef = Eigen::Ref<const Vector>;

}  // namespace mnl
