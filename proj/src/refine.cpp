#include "pbntune/refine.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <deque>
#include <optional>
#include <string_view>
#include <ostream>
#include <thread>

namespace pbntune {

namespace {

/// Widest axis in coordinates normalized to `input`; lowest index on ties.
/// Empty when no axis can be split in floating point.
std::optional<std::size_t> split_axis(const Region& box, const Region& input) {
  std::optional<std::size_t> best;
  double best_width = 0.0;
  for (std::size_t i = 0; i < box.dimension(); ++i) {
    const double reference = input[i].width();
    if (reference <= 0.0) continue;
    const double w = box[i].width() / reference;
    const double mid = 0.5 * (box[i].lo + box[i].hi);
    if (!(box[i].lo < mid && mid < box[i].hi)) continue;
    if (w > best_width) {
      best_width = w;
      best = i;
    }
  }
  return best;
}

std::vector<Verdict> verify_batch(const RegionVerifier& verifier, const std::vector<Region>& batch) {
  std::vector<Verdict> verdicts(batch.size(), Verdict::Inconclusive);
  if (batch.size() == 1) {
    verdicts[0] = verifier.verify(batch[0]);
    return verdicts;
  }
  std::vector<std::exception_ptr> errors(batch.size());
  {
    std::vector<std::jthread> workers;
    workers.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          verdicts[i] = verifier.verify(batch[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return verdicts;
}

}  // namespace

PartitionResult partition(const RegionVerifier& verifier, const Region& region, double eta, PartitionOptions options) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "coverage factor must lie in [0,1]");
  PartitionResult result;
  std::deque<Region> work{region};
  double conclusive = 0.0;
  std::size_t boxes = 1;
  bool done = false;
  bool guard_tripped = false;
  const unsigned threads = std::max(1U, options.threads);

  while (!work.empty() && !done) {
    const std::size_t k = std::min<std::size_t>(threads, work.size());
    std::vector<Region> batch(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(k));
    work.erase(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(k));
    const std::vector<Verdict> verdicts = verify_batch(verifier, batch);

    // Integrate strictly in FIFO order so the outcome does not depend on
    // the thread count.
    for (std::size_t i = 0; i < k; ++i) {
      if (done) {
        result.unknown.push_back(std::move(batch[i]));
        continue;
      }
      ++result.verifications;
      Region& box = batch[i];
      switch (verdicts[i]) {
        case Verdict::Accepting:
          conclusive += box.normalized_volume(region);
          result.accepting.push_back(std::move(box));
          break;
        case Verdict::Rejecting:
          conclusive += box.normalized_volume(region);
          result.rejecting.push_back(std::move(box));
          break;
        case Verdict::Inconclusive: {
          const auto axis = conclusive >= eta ? std::nullopt : split_axis(box, region);
          if (!axis) {
            result.unknown.push_back(std::move(box));
          } else {
            auto [left, right] = box.bisect(*axis);
            work.push_back(std::move(left));
            work.push_back(std::move(right));
            ++boxes;
          }
          break;
        }
      }
      if (conclusive >= eta) done = true;
      if (boxes > options.max_boxes) {
        guard_tripped = true;
        done = true;
      }
    }
  }
  for (auto& box : work) result.unknown.push_back(std::move(box));
  result.coverage = std::min(1.0, conclusive);
  std::sort(result.accepting.begin(), result.accepting.end());
  std::sort(result.rejecting.begin(), result.rejecting.end());
  std::sort(result.unknown.begin(), result.unknown.end());
  if (guard_tripped || conclusive < eta) throw CoverageUnreachable(std::move(result));
  return result;
}

PartitionResult partition(const PMC& pmc, const Region& region, const ReachSpec& spec, double eta,
                          PartitionOptions options) {
  return partition(RegionVerifier(pmc, spec), region, eta, options);
}

void write_boxes_csv(std::ostream& out, const PartitionResult& result, std::span<const std::string> param_names) {
  // shortest representation that reads back to the same double
  auto num = [&](double x) {
    std::array<char, 32> buf;
    out << std::string_view(buf.data(), std::to_chars(buf.data(), buf.data() + buf.size(), x).ptr);
  };
  out << "verdict";
  for (const auto& name : param_names) out << "," << name << "_lb," << name << "_ub";
  out << "\n";
  auto rows = [&](const std::vector<Region>& boxes, std::string_view verdict) {
    for (const auto& box : boxes) {
      out << verdict;
      for (const auto& axis : box.axes()) {
        out << ",";
        num(axis.lo);
        out << ",";
        num(axis.hi);
      }
      out << "\n";
    }
  };
  rows(result.accepting, to_string(Verdict::Accepting));
  rows(result.rejecting, to_string(Verdict::Rejecting));
  rows(result.unknown, to_string(Verdict::Inconclusive));
}

}  // namespace pbntune
