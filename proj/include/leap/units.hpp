#pragma once

#include <cmath>

// Scale conventions used throughout: path losses are linear ratios >= 1 and
// become dB only at I/O boundaries; optimization variables live on the
// natural-log scale, reached from dB by multiplying with ln(10)/10.
namespace leap {

inline constexpr double kLn10 = 2.302585092994045684;
inline constexpr double kDbToNat = kLn10 / 10.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }
inline double db_to_nat(double db) { return db * kDbToNat; }
inline double nat_to_db(double x) { return x / kDbToNat; }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace leap
