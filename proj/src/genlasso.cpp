#include "oadm/genlasso.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "oadm/error.hpp"
#include "oadm/linalg.hpp"
#include "oadm/rng.hpp"

namespace oadm {

namespace {

void fill_design(RowMatrixXd& a, Rng& rng) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  }
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (norm > 0.0) a.col(j) /= norm;
  }
}

// First k entries of a seeded partial Fisher-Yates shuffle of [0, n).
std::vector<long> sample_positions(long n, long k, Rng& rng) {
  std::vector<long> idx(n);
  std::iota(idx.begin(), idx.end(), 0L);
  for (long i = 0; i < k; ++i) {
    const long j = rng.uniform_int(i, n - 1);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

Eigen::VectorXd make_targets(const RowMatrixXd& a, const Eigen::VectorXd& x0,
                             double sigma, Rng& rng) {
  Eigen::VectorXd b = (a * x0) / static_cast<double>(a.rows());
  for (Eigen::Index i = 0; i < b.size(); ++i) b[i] += sigma * rng.normal();
  return b;
}

double lambda_from_q(const RowMatrixXd& a, const Eigen::VectorXd& b, double q) {
  return q * (a.transpose() * b / static_cast<double>(a.rows()))
                 .lpNorm<Eigen::Infinity>();
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double GenLassoInstance::objective(const Eigen::VectorXd& x) const {
  if (x.size() != n) throw ParameterError("objective: dimension mismatch");
  const double ls = (data * x - targets).squaredNorm() / static_cast<double>(N);
  double l1 = 0.0;
  if (kind == ProblemKind::Lasso) {
    l1 = x.lpNorm<1>();
  } else {
    linalg::BidiagonalDifference d{n};
    l1 = d.apply(x).lpNorm<1>();
  }
  return ls + lambda * l1;
}

LossTerm GenLassoInstance::cyclic_loss(long t, double tikhonov) const {
  if (t < 0) throw ParameterError("cyclic_loss: round must be >= 0");
  const long i = t % N;
  return LossTerm::least_squares_row(data.row(i).transpose(), targets[i], 1.0,
                                     tikhonov);
}

ConstraintSpec GenLassoInstance::constraint() const {
  return kind == ProblemKind::Lasso ? ConstraintSpec::splitting(n)
                                    : ConstraintSpec::difference_splitting(n);
}

Regularizer GenLassoInstance::regularizer(double extra_strong_convexity) const {
  return Regularizer::l1(lambda, extra_strong_convexity);
}

LossTerm GenLassoInstance::batch_loss(double tikhonov) const {
  return LossTerm::least_squares_batch(data, targets, 1.0 / static_cast<double>(N),
                                       tikhonov);
}

GenLassoInstance generate_lasso(const DataGenConfig& cfg) {
  if (cfg.N < 1 || cfg.n < 1) throw ConfigError("generate_lasso: N and n must be >= 1");
  if (cfg.k > cfg.n) throw ConfigError("generate_lasso: k must be <= n");
  if (cfg.k < 0 || cfg.noise_sigma < 0.0) {
    throw ConfigError("generate_lasso: k and noise_sigma must be >= 0");
  }
  Rng rng(cfg.seed);
  GenLassoInstance inst;
  inst.kind = ProblemKind::Lasso;
  inst.N = cfg.N;
  inst.n = cfg.n;
  inst.seed = cfg.seed;
  inst.data.resize(cfg.N, cfg.n);
  fill_design(inst.data, rng);
  inst.ground_truth = Eigen::VectorXd::Zero(cfg.n);
  for (long pos : sample_positions(cfg.n, cfg.k, rng)) {
    inst.ground_truth[pos] = rng.normal();
  }
  inst.targets = make_targets(inst.data, inst.ground_truth, cfg.noise_sigma, rng);
  inst.lambda = cfg.lambda_override
                    ? *cfg.lambda_override
                    : lambda_from_q(inst.data, inst.targets, cfg.q);
  return inst;
}

GenLassoInstance generate_tv(const DataGenConfig& cfg) {
  if (cfg.N < 1 || cfg.n < 1) throw ConfigError("generate_tv: N and n must be >= 1");
  if (cfg.segments < 1) throw ConfigError("generate_tv: need at least one segment");
  if (cfg.segments > cfg.n) throw ConfigError("generate_tv: more segments than entries");
  if (cfg.noise_sigma < 0.0) throw ConfigError("generate_tv: noise_sigma must be >= 0");
  Rng rng(cfg.seed);
  GenLassoInstance inst;
  inst.kind = ProblemKind::TotalVariation;
  inst.N = cfg.N;
  inst.n = cfg.n;
  inst.seed = cfg.seed;
  inst.data.resize(cfg.N, cfg.n);
  fill_design(inst.data, rng);

  // Piecewise-constant ground truth: segments - 1 jump points.
  std::vector<long> jumps = sample_positions(cfg.n - 1, cfg.segments - 1, rng);
  for (long& j : jumps) j += 1;  // jump between index j-1 and j
  std::sort(jumps.begin(), jumps.end());
  jumps.push_back(cfg.n);
  inst.ground_truth.resize(cfg.n);
  long start = 0;
  for (long end : jumps) {
    const double level = rng.normal();
    for (long i = start; i < end; ++i) inst.ground_truth[i] = level;
    start = end;
  }

  inst.targets = make_targets(inst.data, inst.ground_truth, cfg.noise_sigma, rng);
  inst.lambda = cfg.lambda_override
                    ? *cfg.lambda_override
                    : lambda_from_q(inst.data, inst.targets, cfg.q);
  return inst;
}

GenLassoInstance generate(const DataGenConfig& cfg) {
  return cfg.kind == ProblemKind::Lasso ? generate_lasso(cfg) : generate_tv(cfg);
}

void save_instance(const GenLassoInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_instance: cannot open " + path);
  out << "genlasso v1 " << inst.N << ' ' << inst.n << ' '
      << (inst.kind == ProblemKind::Lasso ? "lasso" : "tv") << ' '
      << format_g17(inst.lambda) << ' ' << inst.seed << '\n';
  auto write_row = [&out](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i > 0) out << ',';
      out << format_g17(v[i]);
    }
    out << '\n';
  };
  for (long i = 0; i < inst.N; ++i) write_row(inst.data.row(i).transpose());
  write_row(inst.targets);
  write_row(inst.ground_truth);
  if (!out) throw IoError("save_instance: write failed for " + path);
}

namespace {

Eigen::VectorXd parse_csv_row(const std::string& line, Eigen::Index expected,
                              const std::string& path) {
  Eigen::VectorXd v(expected);
  std::stringstream ss(line);
  std::string cell;
  Eigen::Index i = 0;
  while (std::getline(ss, cell, ',')) {
    if (i >= expected) throw IoError("load_instance: too many columns in " + path);
    try {
      v[i++] = std::stod(cell);
    } catch (const std::exception&) {
      throw IoError("load_instance: bad number '" + cell + "' in " + path);
    }
  }
  if (i != expected) throw IoError("load_instance: too few columns in " + path);
  return v;
}

}  // namespace

GenLassoInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_instance: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw IoError("load_instance: empty file " + path);
  std::stringstream hs(header);
  std::string magic, version, kind;
  GenLassoInstance inst;
  hs >> magic >> version >> inst.N >> inst.n >> kind >> inst.lambda >> inst.seed;
  if (!hs || magic != "genlasso" || version != "v1" ||
      (kind != "lasso" && kind != "tv") || inst.N < 1 || inst.n < 1) {
    throw IoError("load_instance: bad header in " + path);
  }
  inst.kind = kind == "lasso" ? ProblemKind::Lasso : ProblemKind::TotalVariation;
  inst.data.resize(inst.N, inst.n);
  std::string line;
  for (long i = 0; i < inst.N; ++i) {
    if (!std::getline(in, line)) throw IoError("load_instance: truncated " + path);
    inst.data.row(i) = parse_csv_row(line, inst.n, path).transpose();
  }
  if (!std::getline(in, line)) throw IoError("load_instance: truncated " + path);
  inst.targets = parse_csv_row(line, inst.N, path);
  if (!std::getline(in, line)) throw IoError("load_instance: truncated " + path);
  inst.ground_truth = parse_csv_row(line, inst.n, path);
  return inst;
}

double estimate_gradient_bound(const GenLassoInstance& inst, double radius,
                               double tikhonov) {
  double bound = 0.0;
  for (long i = 0; i < inst.N; ++i) {
    const double an = inst.data.row(i).norm();
    bound = std::max(bound, 2.0 * an * (an * radius + std::abs(inst.targets[i])));
  }
  return bound + tikhonov * radius;
}

}  // namespace oadm
