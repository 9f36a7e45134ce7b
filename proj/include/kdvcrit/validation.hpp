#pragma once

// Numbered end-to-end checks over all modules, shared by `kdvcrit validate`
// and the acceptance binary.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kdvcrit::validation {

enum class Level { Fast, Full };

enum class Outcome { Pass, Fail, Skipped, NotReproducible };

struct Options {
  Level level = Level::Fast;
  std::uint64_t seed = 0;
  /// Added to C11 before the coefficient check (negative control).
  double c11_offset = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  Outcome outcome = Outcome::Skipped;
  std::vector<std::string> details;  // one "name: measured (target)" entry per sub-check
  double seconds = 0.0;
  double budget = 0.0;  // wall-time limit in seconds, part of the pass condition
};

struct Report {
  std::vector<CriterionResult> rows;
  int count(Outcome o) const;
  bool all_pass() const { return count(Outcome::Fail) == 0; }
};

inline constexpr int kCriteria = 12;

CriterionResult run_criterion(int id, const Options& opt);
Report run(const Options& opt);

std::string_view to_string(Outcome o);
std::string_view to_string(Level l);
/// "[PASS] 4 E triangle (0.21 s / 5 s): detail; detail"
std::string format_line(const CriterionResult& r);

}  // namespace kdvcrit::validation
