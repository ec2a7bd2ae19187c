#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "curvinv/parallel/parallel.hpp"

namespace curvinv::cli {

struct Job {
  std::string metric = "kerr";
  std::size_t dim = 4;
  std::string preset;  // empty when spec_text is given
  std::string spec_text;
  std::size_t workers = 1;
  std::size_t parcels = 1;
  bool json = false;
  std::vector<std::pair<std::string, std::string>> substitutions;  // symbol, rational
  bool enumerate = false;
  bool allow_large = false;
};

/// DSL text for the job's preset or explicit spec. Throws
/// std::invalid_argument for unknown presets, for a job naming both or
/// neither, and for I_1 at D >= 4 without allow_large.
std::string resolve_spec(const Job& job);

/// Registry metric with the job's substitutions applied. Substituting a
/// coordinate is rejected.
tensor::Metric build_metric(const Job& job);

parallel::RunReport run(const Job& job);

std::string report_text(const parallel::RunReport& r);
/// One JSON object on a single line.
std::string report_json(const parallel::RunReport& r);

/// Parses argv and dispatches to run, `count` or `components`. Returns the
/// process exit status.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace curvinv::cli
