#include <algorithm>
#include <cmath>

#include "srs/codec.hpp"
#include "srs/error.hpp"
#include "srs/parallel.hpp"

namespace srs {

namespace {
constexpr std::size_t kBlocks = 64;
}

Archive compress_set(const SampleSet& samples, double e_presv, const ModelDescriptor& model,
                     const QoIRecord& qoi, CompressionStats* stats) {
  if (!(e_presv > 0.0 && e_presv <= 1.0)) {
    fail(ErrorKind::invalid_argument, "e_presv must lie in (0, 1]");
  }
  require(model.dim() == samples.dim(), "model dimension does not match the samples");

  Archive a;
  a.e_presv = e_presv;
  a.kind = samples.kind();
  a.shape = samples.shape();
  a.model = model;
  a.qoi = qoi;
  a.samples.resize(samples.size());

  const DctPlan plan(a.shape);
  const std::size_t m = samples.size(), n = samples.dim();
  const std::size_t blocks = std::min(kBlocks, m);
  std::vector<double> fraction(m);
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> coeffs(n);
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      plan.forward(samples.row(i), coeffs);
      const std::size_t j = select_prefix(coeffs, e_presv);
      double kept = 0.0, total = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        total += coeffs[k] * coeffs[k];
        if (k < j) kept += coeffs[k] * coeffs[k];
      }
      fraction[i] = kept / total;
      a.samples[i].j_kept = static_cast<std::uint32_t>(j);
      a.samples[i].coeffs.assign(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(j));
    }
  });

  if (stats != nullptr) {
    double kept = 0.0, energy = 0.0, max_energy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      kept += a.samples[i].j_kept;
      energy += fraction[i];
      max_energy = std::max(max_energy, fraction[i]);
    }
    stats->mean_kept = kept / static_cast<double>(m);
    stats->retained_energy = energy / static_cast<double>(m);
    stats->max_retained_energy = max_energy;
    stats->payload_bytes = serialize_archive(a).size();
  }
  return a;
}

SampleSet decompress_set(const Archive& a) {
  require(!a.samples.empty(), "archive holds no samples");
  const std::size_t n = a.dim();
  const std::size_t m = a.size();
  SampleSet out(a.kind, m, n, a.shape.size() > 1 ? a.shape : std::vector<std::size_t>{});
  const DctPlan plan(a.shape);
  const std::size_t blocks = std::min(kBlocks, m);
  parallel_for(blocks, [&](std::size_t b) {
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const auto& cs = a.samples[i];
      require(cs.j_kept >= 1 && cs.j_kept <= n && cs.coeffs.size() == cs.j_kept,
              "archive sample has an invalid coefficient count");
      auto row = out.row(i);
      plan.inverse(cs.coeffs, row);
      if (a.kind == SampleKind::spin) {
        // Ties, including -0.0, go to +1.
        for (double& v : row) v = v >= 0.0 ? 1.0 : -1.0;
      }
    }
  });
  return out;
}

}  // namespace srs
