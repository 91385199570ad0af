#include "srs/qoi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "srs/error.hpp"
#include "srs/kernels.hpp"
#include "srs/parallel.hpp"

namespace srs {

QoiKind QoIRecord::kind() const {
  switch (payload.index()) {
    case 0: return QoiKind::moments12;
    case 1: return QoiKind::phi4_stats;
    default: return QoiKind::temperature;
  }
}

namespace {

// Fixed partition so the reduction order never depends on the thread count.
constexpr std::size_t kMomentBlocks = 8;
// Rows per rank-k update; each accumulator row is touched once per chunk.
constexpr std::size_t kChunk = 16;

Vector column_means(const SampleSet& s) {
  const std::size_t m = s.size(), n = s.dim();
  const std::size_t blocks = std::min(kMomentBlocks, m);
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
  const auto& k = kernels::active();
  parallel_for(blocks, [&](std::size_t b) {
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) k.axpy(1.0, s.row(i).data(), partial[b].data(), n);
  });
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(n));
  for (const auto& p : partial) {
    for (std::size_t j = 0; j < n; ++j) mean(static_cast<Eigen::Index>(j)) += p[j];
  }
  return mean / static_cast<double>(m);
}

}  // namespace

Moments moments12(const SampleSet& s) {
  const std::size_t m = s.size(), n = s.dim();
  require(m >= 2, "second moments need at least two samples");
  Moments out;
  out.m1 = column_means(s);

  const std::size_t blocks = std::min(kMomentBlocks, m);
  std::vector<Matrix> partial(blocks);
  const auto& k = kernels::active();
  parallel_for(blocks, [&](std::size_t b) {
    Matrix& acc = partial[b];
    acc = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> chunk(kChunk * n);   // centred rows, row-major
    std::vector<double> column(kChunk);
    const auto r = block_range(m, blocks, b);
    for (std::size_t start = r.begin; start < r.end; start += kChunk) {
      const std::size_t rows = std::min(kChunk, r.end - start);
      for (std::size_t q = 0; q < rows; ++q) {
        const auto x = s.row(start + q);
        for (std::size_t j = 0; j < n; ++j) chunk[q * n + j] = x[j] - out.m1(static_cast<Eigen::Index>(j));
      }
      // acc.row(i) += sum_q y_qi * y_q
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t q = 0; q < rows; ++q) column[q] = chunk[q * n + i];
        k.gemv_t(chunk.data(), rows, n, column.data(), acc.data() + i * n);
      }
    }
  });

  out.m2 = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& p : partial) out.m2 += p;
  // Vector tails round differently from the FMA body; restore exact symmetry.
  out.m2 = (0.5 * (out.m2 + out.m2.transpose())).eval();
  out.m2 /= static_cast<double>(m - 1);
  return out;
}

Moments moments12_naive(const SampleSet& s) {
  const std::size_t m = s.size(), n = s.dim();
  require(m >= 2, "second moments need at least two samples");
  Moments out;
  out.m1 = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += s(i, j);
    out.m1(static_cast<Eigen::Index>(j)) = sum / static_cast<double>(m);
  }
  out.m2 = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        sum += (s(i, a) - out.m1(static_cast<Eigen::Index>(a))) *
               (s(i, b) - out.m1(static_cast<Eigen::Index>(b)));
      }
      const double v = sum / static_cast<double>(m - 1);
      out.m2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      out.m2(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
    }
  }
  return out;
}

MomentError moment_error(const Moments& target, const Moments& recon) {
  require(target.m1.size() == recon.m1.size() && target.m2.rows() == recon.m2.rows(),
          "moment dimensions differ");
  MomentError e;
  e.e1 = (target.m1 - recon.m1).cwiseAbs().maxCoeff();
  e.e2 = (target.m2 - recon.m2).cwiseAbs().maxCoeff();
  return e;
}

double moment_error(const QoIRecord& target, const SampleSet& recon) {
  const auto* t = std::get_if<Moments>(&target.payload);
  require(t != nullptr, "QoI kind mismatch: expected moments12 target");
  require(static_cast<std::size_t>(t->m1.size()) == recon.dim(), "QoI dimension mismatch");
  return moment_error(*t, moments12(recon)).max();
}

Phi4Stats phi4_stats(const SampleSet& s, std::span<const Edge> edges) {
  require(!edges.empty(), "phi4 statistics need a non-empty edge set");
  validate_edges(s.dim(), edges);
  const Adjacency adj(s.dim(), edges);
  const std::size_t m = s.size(), n = s.dim();
  const std::size_t blocks = std::min(kMomentBlocks, m);
  std::vector<kernels::Phi4Sums> partial(blocks);
  const auto& k = kernels::active();
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> nbr(n);
    const auto r = block_range(m, blocks, b);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      adj.neighbour_sums(s.row(i), nbr);
      k.phi4_sums(s.row(i).data(), nbr.data(), n, &partial[b]);
    }
  });
  kernels::Phi4Sums tot;
  for (const auto& p : partial) {
    tot.x2 += p.x2;
    tot.x4 += p.x4;
    tot.xs += p.xs;
  }
  const double md = static_cast<double>(m);
  // Each edge appears twice in sum_i x_i s_i.
  return {0.5 * tot.xs / (md * static_cast<double>(edges.size())),
          tot.x2 / (md * static_cast<double>(n)), tot.x4 / (md * static_cast<double>(n))};
}

TemperatureResult temperature(const SampleSet& v, const TemperatureSpec& spec) {
  require(spec.n_dim >= 1, "n_dim must be positive");
  const auto n_dim = static_cast<std::size_t>(spec.n_dim);
  require(v.dim() % n_dim == 0, "velocity rows must hold whole atoms");
  const std::size_t atoms_per_row = v.dim() / n_dim;
  require(spec.masses.size() == 1 || spec.masses.size() == atoms_per_row,
          "need one mass, or one per atom in a row");
  for (double mass : spec.masses) require(mass > 0.0, "masses must be positive");

  const auto dof = [&](std::size_t atoms) {
    return static_cast<long long>(n_dim * atoms) - spec.n_dim - spec.n_fix_dofs;
  };
  const long long group_dof = dof(v.size() * atoms_per_row);
  if (group_dof <= 0) {
    fail(ErrorKind::invalid_argument,
         "temperature needs N_DOF > 0, got " + std::to_string(group_dof));
  }

  const double u2 = spec.velocity_unit * spec.velocity_unit;
  TemperatureResult out;
  const long long row_dof = dof(atoms_per_row);
  if (row_dof > 0) out.per_row.reserve(v.size());
  double total = 0.0;
  for (std::size_t r = 0; r < v.size(); ++r) {
    const auto row = v.row(r);
    double ekin = 0.0;
    for (std::size_t a = 0; a < atoms_per_row; ++a) {
      const double mass = spec.masses.size() == 1 ? spec.masses[0] : spec.masses[a];
      double v2 = 0.0;
      for (std::size_t d = 0; d < n_dim; ++d) v2 += row[a * n_dim + d] * row[a * n_dim + d];
      ekin += 0.5 * mass * v2 * u2;
    }
    total += ekin;
    if (row_dof > 0) out.per_row.push_back(2.0 * ekin / (static_cast<double>(row_dof) * spec.boltzmann));
  }
  out.group = 2.0 * total / (static_cast<double>(group_dof) * spec.boltzmann);
  return out;
}

QoIRecord compute_qoi(QoiKind kind, const SampleSet& s, std::span<const Edge> edges,
                      const TemperatureSpec& temp, double tolerance) {
  require(tolerance > 0.0, "QoI tolerance must be positive");
  QoIRecord r;
  r.tolerance = tolerance;
  switch (kind) {
    case QoiKind::moments12: r.payload = moments12(s); break;
    case QoiKind::phi4_stats: r.payload = phi4_stats(s, edges); break;
    case QoiKind::temperature: r.payload = TemperatureTarget{temperature(s, temp).group, temp}; break;
  }
  return r;
}

double qoi_error(const QoIRecord& target, const SampleSet& recon, std::span<const Edge> edges) {
  switch (target.kind()) {
    case QoiKind::moments12: return moment_error(target, recon);
    case QoiKind::phi4_stats: {
      const auto& t = std::get<Phi4Stats>(target.payload);
      const Phi4Stats q = phi4_stats(recon, edges);
      return std::max({std::abs(t.q1 - q.q1), std::abs(t.q2 - q.q2), std::abs(t.q3 - q.q3)});
    }
    case QoiKind::temperature: {
      const auto& t = std::get<TemperatureTarget>(target.payload);
      return std::abs(t.kelvin - temperature(recon, t.spec).group);
    }
  }
  return 0.0;
}

std::uint64_t spin_state_index(std::span<const double> sigma) {
  require(sigma.size() <= 64, "state index supports at most 64 spins");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > 0) idx |= std::uint64_t{1} << i;
  }
  return idx;
}

Histogram spin_histogram(const SampleSet& s) {
  require(s.kind() == SampleKind::spin, "histograms are defined for spin data");
  require(s.dim() <= 20, "state histograms are limited to N <= 20 spins");
  std::map<std::uint64_t, std::uint64_t> counts;
  for (std::size_t i = 0; i < s.size(); ++i) ++counts[spin_state_index(s.row(i))];
  return {counts.begin(), counts.end()};
}

namespace {

double histogram_total(const Histogram& h) {
  double t = 0.0;
  for (const auto& [state, count] : h) t += static_cast<double>(count);
  require(t > 0.0, "histogram has zero total count");
  return t;
}

}  // namespace

double tv_distance(const Histogram& p, const Histogram& q) {
  const double tp = histogram_total(p), tq = histogram_total(q);
  std::map<std::uint64_t, double> diff;
  for (const auto& [s, c] : p) diff[s] += static_cast<double>(c) / tp;
  for (const auto& [s, c] : q) diff[s] -= static_cast<double>(c) / tq;
  double sum = 0.0;
  for (const auto& [s, d] : diff) sum += std::abs(d);
  return 0.5 * sum;
}

double tv_distance(const Histogram& p, std::span<const double> table) {
  const double tp = histogram_total(p);
  double tq = 0.0;
  for (double v : table) tq += v;
  require(tq > 0.0, "distribution table has zero mass");
  std::vector<double> dense(table.size(), 0.0);
  for (const auto& [s, c] : p) {
    require(s < table.size(), "histogram state outside the table");
    dense[s] = static_cast<double>(c) / tp;
  }
  double sum = 0.0;
  for (std::size_t s = 0; s < table.size(); ++s) sum += std::abs(dense[s] - table[s] / tq);
  return 0.5 * sum;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), "distributions live on different state spaces");
  double tp = 0.0, tq = 0.0;
  for (double v : p) tp += v;
  for (double v : q) tq += v;
  require(tp > 0.0 && tq > 0.0, "distribution has zero mass");
  double sum = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) sum += std::abs(p[s] / tp - q[s] / tq);
  return 0.5 * sum;
}

}  // namespace srs
