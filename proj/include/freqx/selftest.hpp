#pragma once

#include <functional>
#include <string>
#include <vector>

namespace freqx {

struct SelftestOptions {
  // Flips one off-axis mask entry before the realness checks, to confirm the
  // suite notices broken mirror symmetry.
  bool inject_mask_asymmetry = false;
};

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Round trip, partition, Parseval, toy influence oracle and EER oracle checks
// at small scale.
std::vector<SelftestResult> run_selftest(const SelftestOptions& options = {});

}  // namespace freqx
