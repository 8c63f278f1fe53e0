#pragma once

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

inline void expect_rel(double got, double want, double rtol, const char* what = "") {
  double scale = std::max(std::abs(got), std::abs(want));
  EXPECT_LE(std::abs(got - want), rtol * scale) << what << ": got " << got << " want " << want;
}

inline void expect_abs(double got, double want, double atol, const char* what = "") {
  EXPECT_LE(std::abs(got - want), atol) << what << ": got " << got << " want " << want;
}
