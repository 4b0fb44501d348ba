#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qvecca/matio.hpp"
#include "qvecca/stats.hpp"

namespace testutil {

// Deterministic test RNG. Uniforms come straight from mt19937_64 bits and
// gaussians from Box-Muller, so sequences do not depend on unspecified
// std::*_distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }  // [0,1)

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  double gaussian() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = gaussian();
    }
    return m;
  }

  Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo = 0.0,
                                 double hi = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = uniform(lo, hi);
    }
    return m;
  }

  // Random rotation: Q factor of a gaussian matrix, sign-fixed so the
  // diagonal of R is positive.
  Eigen::MatrixXd orthonormal(Eigen::Index n) {
    const Eigen::MatrixXd g = gaussian_matrix(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (r(i, i) < 0) q.col(i) = -q.col(i);
    }
    return q;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<std::string> numbered_names(const char* prefix, std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
    names.emplace_back(buf);
  }
  return names;  // zero-padded, so already in lexicographic order
}

// Builds an AlignedPair directly from two matrices over a synthetic vocab.
inline qvecca::AlignedPair make_pair(const Eigen::MatrixXd& emb, const Eigen::MatrixXd& ling) {
  qvecca::AlignedPair pair;
  pair.vocab = numbered_names("w", static_cast<std::size_t>(emb.cols()));
  pair.emb = emb;
  pair.ling = ling;
  pair.ling_columns = numbered_names("c", static_cast<std::size_t>(ling.rows()));
  pair.emb_vocab_size = pair.vocab.size();
  pair.ling_vocab_size = pair.vocab.size();
  return pair;
}

inline qvecca::AlignedPair random_pair(Rng& rng, Eigen::Index d, Eigen::Index p,
                                       Eigen::Index n) {
  return make_pair(rng.gaussian_matrix(d, n), rng.uniform_matrix(p, n));
}

struct BruteForceQvec {
  double score = 0.0;
  std::vector<int> choice;  // per dimension: column index or -1 for none
};

// Exhaustive QVEC oracle: walks every feasible alignment matrix (each
// embedding dimension matched to one linguistic column or left out) in
// odometer order with "none" before ascending column indices, keeping the
// first maximum encountered. Alignments that touch an undefined correlation
// are infeasible.
inline BruteForceQvec brute_force_qvec(const qvecca::CorrelationGrid& grid) {
  const std::size_t d = grid.rows;
  const int p = static_cast<int>(grid.cols);

  std::vector<int> choice(d, -1);
  BruteForceQvec best;
  best.score = -std::numeric_limits<double>::infinity();

  while (true) {
    double score = 0.0;
    bool feasible = true;
    for (std::size_t i = 0; i < d && feasible; ++i) {
      if (choice[i] < 0) continue;
      const auto& r = grid.at(i, static_cast<std::size_t>(choice[i]));
      if (!r) {
        feasible = false;
      } else {
        score += *r;
      }
    }
    if (feasible && score > best.score) {
      best.score = score;
      best.choice = choice;
    }
    // advance the odometer, last dimension fastest
    std::size_t pos = d;
    while (pos > 0) {
      --pos;
      if (choice[pos] + 1 < p) {
        ++choice[pos];
        break;
      }
      choice[pos] = -1;
      if (pos == 0) return best;
    }
    if (d == 0) return best;
  }
}

// Direction-search CCA oracle for views of at most 2 dimensions: samples
// random unit direction pairs, then shrink-steps a local grid around the
// best. xc and sc are centered N x 1 or N x 2 data matrices; the angle of a
// one-column side is ignored.
inline double direction_search_cca(const Eigen::MatrixXd& xc, const Eigen::MatrixXd& sc,
                                   Rng& rng, int samples = 100000) {
  auto unit = [](Eigen::Index cols, double angle) {
    Eigen::VectorXd v(cols);
    if (cols == 2) {
      v << std::cos(angle), std::sin(angle);
    } else {
      v << 1.0;
    }
    return v;
  };
  auto abs_corr = [&](double theta, double phi) {
    const Eigen::VectorXd v = unit(xc.cols(), theta);
    const Eigen::VectorXd w = unit(sc.cols(), phi);
    const Eigen::VectorXd a = xc * v;
    const Eigen::VectorXd b = sc * w;
    const double num = a.dot(b);
    const double den = std::sqrt(a.dot(a) * b.dot(b));
    return den == 0.0 ? 0.0 : std::abs(num / den);
  };

  const double pi = std::numbers::pi;
  double best_theta = 0.0, best_phi = 0.0, best = abs_corr(0.0, 0.0);
  for (int k = 0; k < samples; ++k) {
    const double theta = rng.uniform(0.0, pi);
    const double phi = rng.uniform(0.0, pi);
    const double value = abs_corr(theta, phi);
    if (value > best) {
      best = value;
      best_theta = theta;
      best_phi = phi;
    }
  }
  double step = 0.05;
  for (int round = 0; round < 40; ++round) {
    for (int axis = 0; axis < 2; ++axis) {
      double& coord = axis == 0 ? best_theta : best_phi;
      const double center = coord;
      for (int k = -10; k <= 10; ++k) {
        const double candidate = center + step * static_cast<double>(k) / 10.0;
        const double value = axis == 0 ? abs_corr(candidate, best_phi)
                                       : abs_corr(best_theta, candidate);
        if (value > best) {
          best = value;
          coord = candidate;
        }
      }
    }
    step *= 0.5;
  }
  return best;
}

}  // namespace testutil
