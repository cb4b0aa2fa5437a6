#pragma once

#include <Eigen/Dense>

namespace meshsens {

/// Small dense vectors and matrices for d <= 3. Storage is inline; no heap allocation.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

/// Barycentric coordinates of a point in a d-simplex (d + 1 entries).
using Bary = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

inline constexpr int kMaxDim = 3;

/// Largest singular value.
inline double spectral_norm(const Mat& m)
{
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

}  // namespace meshsens
