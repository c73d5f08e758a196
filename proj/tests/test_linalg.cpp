#include <doctest.h>

#include "sysmdp/linalg.hpp"
#include "support.hpp"

using namespace sysmdp;
using namespace testing;

TEST_CASE("norms") {
    CHECK(linalg::inf_norm(vec({1, -3, 2})) == 3.0);
    CHECK(linalg::inf_norm(mat({{1, -2}, {0.5, 0.5}})) == 3.0);
}

TEST_CASE("solve recovers a known solution") {
    const Matrix a = mat({{4, 1, 0}, {1, 3, 1}, {0, 1, 2}});
    const Vector x = vec({1, -2, 3});
    CHECK(max_abs_diff(linalg::solve(a, a * x), x) < 1e-12);
}

TEST_CASE("singular systems raise NumericalError") {
    const Matrix a = mat({{1, 2}, {2, 4}});
    CHECK_THROWS_AS(linalg::solve(a, vec({1, 1})), NumericalError);
    CHECK_THROWS_AS(linalg::inverse(a), NumericalError);
}

TEST_CASE("inverse times matrix is the identity") {
    const Matrix a = mat({{2, 1}, {1, 3}});
    CHECK(max_abs_diff(Matrix(linalg::inverse(a) * a), Matrix::Identity(2, 2)) < 1e-14);
}
