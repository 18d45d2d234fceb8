#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pbntune/error.hpp"
#include "pbntune/pla.hpp"

namespace pbntune {

struct PartitionResult {
  std::vector<Region> accepting;
  std::vector<Region> rejecting;
  std::vector<Region> unknown;
  /// Conclusive fraction of the input's normalized volume.
  double coverage = 0.0;
  std::size_t verifications = 0;
};

struct PartitionOptions {
  std::size_t max_boxes = std::size_t{1} << 16;
  unsigned threads = 1;
};

/// Thrown when the box guard trips (or no box can be split further) before
/// the requested coverage is reached. Carries the partial result.
class CoverageUnreachable : public Error {
 public:
  explicit CoverageUnreachable(PartitionResult partial)
      : Error(ErrorKind::CoverageUnreachable,
              "coverage " + std::to_string(partial.coverage) + " reached before the box guard tripped"),
        partial_(std::move(partial)) {}

  const PartitionResult& partial() const { return partial_; }

 private:
  PartitionResult partial_;
};

/// FIFO worklist: verify, bisect inconclusive boxes along the widest
/// normalized axis, stop once the conclusive volume reaches `eta`. The
/// three lists tile `region` and are sorted lexicographically by bounds.
PartitionResult partition(const RegionVerifier& verifier, const Region& region, double eta,
                          PartitionOptions options = {});

PartitionResult partition(const PMC& pmc, const Region& region, const ReachSpec& spec, double eta,
                          PartitionOptions options = {});

/// One row per box: verdict, then lb,ub per parameter.
void write_boxes_csv(std::ostream& out, const PartitionResult& result, std::span<const std::string> param_names);

}  // namespace pbntune
