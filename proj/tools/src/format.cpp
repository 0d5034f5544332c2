#include "pprx_cli/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "pprx/model.hpp"

namespace pprx::cli {

std::string format_number(double v) {
  if (!std::isfinite(v)) throw std::domain_error("format_number: non-finite value");
  if (v == 0.0) return "0";  // folds -0
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_money(double v) {
  if (!std::isfinite(v)) throw std::domain_error("format_money: non-finite value");
  double r = round_money(v);
  if (r == 0.0) r = 0.0;
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), r,
                                 std::chars_format::fixed, 9);
  return std::string(buf.data(), res.ptr);
}

}  // namespace pprx::cli
