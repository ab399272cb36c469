// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/LU>

#include "pellipt/error.hpp"
#include "pellipt/parallel.hpp"

namespace pellipt::oracle {

namespace {

// Generalized golden ratio: positive root of x^{D+1} = x + 1.
double harmonious_ratio(int dim) {
  double x = 2.0;
  for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (dim + 1));
  return x;
}

// Cranley-Patterson shifted R_dim sequence mapped to the sphere by
// Box-Muller on coordinate pairs.
class RSequence {
 public:
  RSequence(int dim, std::uint64_t seed) : alpha_(dim), shift_(dim) {
    if (dim < 2 || dim % 2 != 0) throw DomainError("sphere_point: dimension must be even");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double phi = harmonious_ratio(dim);
    double inv = 1.0;
    for (int j = 0; j < dim; ++j) {
      inv /= phi;
      alpha_(j) = inv;
      shift_(j) = uni(rng);
    }
  }

  int dim() const noexcept { return static_cast<int>(alpha_.size()); }

  /// Writes the unit point with the given index into x[0 .. dim).
  void point(std::uint64_t index, double* x) const {
    const Eigen::Index dim = alpha_.size();
    double n2 = 0.0;
    for (Eigen::Index j = 0; j < dim; j += 2) {
      const double u0 = std::fmod(shift_(j) + std::fmod(index * alpha_(j), 1.0), 1.0);
      const double u1 = std::fmod(shift_(j + 1) + std::fmod(index * alpha_(j + 1), 1.0), 1.0);
      const double r = std::sqrt(-2.0 * std::log(1.0 - u0));
      x[j] = r * std::cos(2.0 * std::numbers::pi * u1);
      x[j + 1] = r * std::sin(2.0 * std::numbers::pi * u1);
      n2 += x[j] * x[j] + x[j + 1] * x[j + 1];
    }
    if (!(n2 > 0.0)) {
      std::fill(x, x + dim, 0.0);
      x[0] = 1.0;
      return;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (Eigen::Index j = 0; j < dim; ++j) x[j] *= inv;
  }

  RVector point(std::uint64_t index) const {
    RVector x(alpha_.size());
    point(index, x.data());
    return x;
  }

 private:
  RVector alpha_;
  RVector shift_;
};

struct Candidate {
  double value;
  std::uint64_t index;
  bool operator<(const Candidate& o) const {
    return value < o.value || (value == o.value && index < o.index);
  }
};

constexpr std::size_t kSeeds = 4;

// Objectives take x = (alpha; beta) of length 2d as a raw pointer so the
// sampling loop does not allocate.
using Objective = std::function<double(const double*)>;

// A x for complex x = alpha + i beta.
void apply(const CMatrix& m, const double* x, std::vector<cplx>& xi, std::vector<cplx>& axi) {
  const Eigen::Index d = m.rows();
  for (Eigen::Index k = 0; k < d; ++k) xi[k] = cplx(x[k], x[k + d]);
  for (Eigen::Index i = 0; i < d; ++i) {
    cplx acc = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) acc += m(i, j) * xi[j];
    axi[i] = acc;
  }
}

RVector finite_gradient(const Objective& f, const RVector& x) {
  constexpr double h = 1e-6;
  RVector g(x.size());
  RVector probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double keep = probe(k);
    probe(k) = keep + h;
    const double fp = f(probe.data());
    probe(k) = keep - h;
    const double fm = f(probe.data());
    probe(k) = keep;
    g(k) = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Projected descent on the unit sphere with step halving; f must be
// 0-homogeneous so that its gradient at a unit vector is tangent.
double refine(const Objective& f, RVector x, int iters) {
  x.normalize();
  double fx = f(x.data());
  double step = 0.1;
  for (int it = 0; it < iters && step >= 1e-12; ++it) {
    RVector g = finite_gradient(f, x);
    g -= g.dot(x) * x;
    if (!(g.norm() > 1e-14)) break;
    RVector trial = (x - step * g).normalized();
    const double ft = f(trial.data());
    if (ft < fx) {
      x = trial;
      fx = ft;
      step = std::min(step * 1.5, 10.0);
    } else {
      step *= 0.5;
    }
  }
  return fx;
}

// Best kSeeds sample indices, reduced so the result is schedule independent.
std::vector<Candidate> best_samples(const Objective& f, int dim, int n, std::uint64_t seed) {
  const RSequence seq(dim, seed);
  const std::size_t ndim = static_cast<std::size_t>(dim);
  const std::size_t chunks = chunk_count(static_cast<std::size_t>(n), 4096);
  std::vector<std::vector<Candidate>> partial(chunks);
  parallel_chunks(
      static_cast<std::size_t>(n),
      [&](std::size_t begin, std::size_t end, std::size_t c) {
        std::vector<Candidate>& best = partial[c];
        std::vector<double> x(ndim);
        for (std::size_t i = begin; i < end; ++i) {
          seq.point(i, x.data());
          const double v = f(x.data());
          if (!std::isfinite(v)) continue;
          if (best.size() == kSeeds && !(Candidate{v, i} < best.back())) continue;
          best.push_back({v, i});
          std::sort(best.begin(), best.end());
          if (best.size() > kSeeds) best.pop_back();
        }
      },
      4096);
  std::vector<Candidate> merged;
  for (const auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  std::sort(merged.begin(), merged.end());
  if (merged.size() > kSeeds) merged.resize(kSeeds);
  return merged;
}

void require_samples(int n_samples, const char* who) {
  if (n_samples < 1000) throw DomainError(std::string(who) + ": n_samples must be >= 1000");
}

}  // namespace

RVector sphere_point(int dim, std::uint64_t index, std::uint64_t seed) {
  return RSequence(dim, seed).point(index);
}

SphereSample make_sphere_sample(int dim, int count, std::uint64_t seed) {
  SphereSample s;
  s.dim = dim;
  const RSequence seq(dim, seed);
  s.points.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) s.points.push_back(seq.point(static_cast<std::uint64_t>(i)));
  return s;
}

double sphere_min_delta(const ComplexMatrix& a, const Exponent& p, int n_samples,
                        int refine_iters, std::uint64_t seed) {
  require_samples(n_samples, "sphere_min_delta");
  const CMatrix& m = a.entries();
  const double wr = 2.0 / p.conjugate();
  const double wi = 2.0 / p.value();
  const std::size_t d = static_cast<std::size_t>(a.dim());
  // Re(A xi | J_p xi) / |xi|^2 evaluated in complex arithmetic.
  const Objective f = [&, d](const double* x) {
    thread_local std::vector<cplx> xi, axi;
    xi.resize(d);
    axi.resize(d);
    apply(m, x, xi, axi);
    double acc = 0.0;
    double n2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const cplx j(wr * xi[k].real(), wi * xi[k].imag());
      acc += (axi[k] * std::conj(j)).real();
      n2 += std::norm(xi[k]);
    }
    return acc / n2;
  };
  const int dim = 2 * a.dim();
  double best = std::numeric_limits<double>::infinity();
  for (const Candidate& c : best_samples(f, dim, n_samples, seed)) {
    best = std::min(best, refine(f, sphere_point(dim, c.index, seed), refine_iters));
  }
  return best;
}

double sphere_min_ratio(const ComplexMatrix& a, int n_samples, int refine_iters,
                        std::uint64_t seed) {
  require_samples(n_samples, "sphere_min_ratio");
  const CMatrix& m = a.entries();
  const std::size_t d = static_cast<std::size_t>(a.dim());
  // Re(A xi | xi) / |(A xi | conj xi)|.
  const Objective f = [&, d](const double* x) {
    thread_local std::vector<cplx> xi, axi;
    xi.resize(d);
    axi.resize(d);
    apply(m, x, xi, axi);
    cplx herm = 0.0;
    cplx bil = 0.0;
    double n2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      herm += axi[k] * std::conj(xi[k]);
      bil += axi[k] * xi[k];
      n2 += std::norm(xi[k]);
    }
    const double den = std::abs(bil) / n2;
    if (!(den > 1e-12)) return std::numeric_limits<double>::infinity();
    return herm.real() / std::abs(bil);
  };
  const int dim = 2 * a.dim();
  const auto seeds = best_samples(f, dim, n_samples, seed);
  if (seeds.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (const Candidate& c : seeds) {
    best = std::min(best, refine(f, sphere_point(dim, c.index, seed), refine_iters));
  }
  return best;
}

namespace {

// Pade coefficients and theta_m thresholds for the 1-norm.
constexpr std::array<double, 4> kB3 = {120., 60., 12., 1.};
constexpr std::array<double, 6> kB5 = {30240., 15120., 3360., 420., 30., 1.};
constexpr std::array<double, 8> kB7 = {17297280., 8648640., 1995840., 277200.,
                                       25200.,    1512.,    56.,      1.};
constexpr std::array<double, 10> kB9 = {17643225600., 8821612800., 2075673600., 302702400.,
                                        30270240.,    2162160.,    110880.,     3960.,
                                        90.,          1.};
constexpr std::array<double, 14> kB13 = {
    64764752532480000., 32382376266240000., 7771770303897600., 1187353796428800.,
    129060195264000.,   10559470521600.,    670442572800.,     33522128640.,
    1323241920.,        40840800.,          960960.,           16380.,
    182.,               1.};
constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
void pade_low(const CMatrix& x, const std::array<double, N>& b, CMatrix& u, CMatrix& v) {
  const Eigen::Index n = x.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix x2 = x * x;
  CMatrix power = id;
  CMatrix odd = b[1] * id;
  CMatrix even = b[0] * id;
  for (std::size_t k = 2; k + 1 < N + 1; k += 2) {
    power = power * x2;
    even += b[k] * power;
    if (k + 1 < N) odd += b[k + 1] * power;
  }
  u = x * odd;
  v = even;
}

void pade13(const CMatrix& x, CMatrix& u, CMatrix& v) {
  const Eigen::Index n = x.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix x2 = x * x;
  const CMatrix x4 = x2 * x2;
  const CMatrix x6 = x4 * x2;
  const auto& b = kB13;
  const CMatrix w1 = b[13] * x6 + b[11] * x4 + b[9] * x2;
  const CMatrix w2 = b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * id;
  const CMatrix z1 = b[12] * x6 + b[10] * x4 + b[8] * x2;
  const CMatrix z2 = b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;
  u = x * (x6 * w1 + w2);
  v = x6 * z1 + z2;
}

}  // namespace

CMatrix dense_expm(const CMatrix& m, double t) {
  if (m.rows() != m.cols()) throw DomainError("dense_expm: matrix must be square");
  if (m.rows() > kDenseExpmLimit) {
    throw DomainError("dense_expm: dimension " + std::to_string(m.rows()) + " exceeds " +
                      std::to_string(kDenseExpmLimit));
  }
  const Eigen::Index n = m.rows();
  if (n == 0) return CMatrix(0, 0);
  CMatrix x = -t * m;
  // 1-norm: maximum absolute column sum.
  const double norm1 = x.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return CMatrix::Identity(n, n);

  CMatrix u, v;
  int squarings = 0;
  if (norm1 <= kTheta[0]) {
    pade_low(x, kB3, u, v);
  } else if (norm1 <= kTheta[1]) {
    pade_low(x, kB5, u, v);
  } else if (norm1 <= kTheta[2]) {
    pade_low(x, kB7, u, v);
  } else if (norm1 <= kTheta[3]) {
    pade_low(x, kB9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
    x /= std::ldexp(1.0, squarings);
    pade13(x, u, v);
  }
  Eigen::PartialPivLU<CMatrix> lu(v - u);
  CMatrix r = lu.solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

}  // namespace pellipt::oracle
