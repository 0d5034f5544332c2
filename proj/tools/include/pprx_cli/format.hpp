#pragma once

#include <string>

namespace pprx::cli {

// Shortest text that parses back to the same double.
std::string format_number(double v);

// Fixed 9 decimals, the ledger precision.
std::string format_money(double v);

}  // namespace pprx::cli
