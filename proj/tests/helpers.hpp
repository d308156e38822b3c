#pragma once

#include <cmath>
#include <filesystem>
#include <memory>
#include <numbers>
#include <string>

#include "qpnls/fields.hpp"

namespace qpnls::testing {

inline FrequencyBasis standard_basis() {
  return FrequencyBasis({1.0, std::numbers::sqrt2}, {1.0, std::numbers::sqrt3});
}

// Box of radius 0 holding only c(0,0) = value.
inline CoefficientField constant_mode(Complex value = 1.0) {
  FrequencyBasis basis({1.0, std::numbers::sqrt2}, {1.0, std::numbers::sqrt3});
  auto table = std::make_shared<const ModeTable>(2, 2, TruncationBox{0, 0});
  return CoefficientField(basis, table, TimeGrid::single(), {value});
}

inline CoefficientField zero_field(const FrequencyBasis& basis, TruncationBox box) {
  auto table = std::make_shared<const ModeTable>(basis.nu1(), basis.nu2(), box);
  return CoefficientField(basis, table, TimeGrid::single());
}

inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::path(QPNLS_TEST_TMP) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace qpnls::testing
