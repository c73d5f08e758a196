#include "sysmdp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sysmdp::linalg {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double inf_norm(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

Eigen::PartialPivLU<Matrix> factor(const Matrix& a) {
    if (a.rows() != a.cols()) throw NumericalError("matrix is not square");
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > kSingularRcond)) {
        throw NumericalError("matrix is singular (rcond " + std::to_string(rcond) + ")");
    }
    return lu;
}

}  // namespace

Vector solve(const Matrix& a, const Vector& b, double tolerance) {
    const auto lu = factor(a);
    Vector x = lu.solve(b);
    const double scale = std::max({1.0, inf_norm(a) * inf_norm(x), inf_norm(b)});
    const double residual = inf_norm(Vector(a * x - b)) / scale;
    if (!std::isfinite(residual) || residual > tolerance) {
        throw NumericalError("linear solve residual " + std::to_string(residual) +
                             " exceeds tolerance");
    }
    return x;
}

Matrix inverse(const Matrix& a, double tolerance) {
    const auto lu = factor(a);
    Matrix inv = lu.inverse();
    const auto n = a.rows();
    const double residual = inf_norm(Matrix(a * inv - Matrix::Identity(n, n)));
    if (!std::isfinite(residual) || residual > tolerance) {
        throw NumericalError("inverse residual " + std::to_string(residual) +
                             " exceeds tolerance");
    }
    return inv;
}

}  // namespace sysmdp::linalg
