#pragma once

#include <string>
#include <vector>

namespace pnet {

struct SelftestItem {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// Fast invariant suite behind `persuasion-net selftest`; runs in seconds.
std::vector<SelftestItem> run_selftest();

}  // namespace pnet
