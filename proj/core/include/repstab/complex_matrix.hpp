#pragma once

#include <complex>
#include <Eigen/Dense>

namespace repstab {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using complexd = std::complex<double>;

bool all_finite(const ComplexMatrix& a);

/// Throws errc::dimension unless `a` is square (and finite when check_finite).
void require_square(const ComplexMatrix& a, const char* who, bool check_finite = true);

} // namespace repstab
