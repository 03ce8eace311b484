#include "core/variance_lab.hpp"

#include "core/format.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace plateau {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(seed) ^ mix64(a + 0x9e3779b97f4a7c15ULL) ^ mix64(b + 0x2545f4914f6cdd1dULL));
}

// Closed-form cosine/Gaussian gradient in extended precision; the
// exponentials underflow double once ||w -+ w*|| passes ~6.
void grad_closed_l(const Vec& w, const Vec& wstar, std::vector<long double>& out) {
  const int d = static_cast<int>(w.size());
  const Vec diff = w - wstar;
  const Vec sum = w + wstar;
  const long double e0 = expl(-8.0L * kPi * kPi * static_cast<long double>(w.squaredNorm()));
  const long double ed = expl(-static_cast<long double>(kTwoPiSq) *
                              static_cast<long double>(diff.squaredNorm()));
  const long double es = expl(-static_cast<long double>(kTwoPiSq) *
                              static_cast<long double>(sum.squaredNorm()));
  out.assign(d, 0.0L);
  for (int i = 0; i < d; ++i) {
    out[i] = -8.0L * kPi * kPi * e0 * w[i] +
             static_cast<long double>(kFourPiSq) * (ed * diff[i] + es * sum[i]);
  }
}

}  // namespace

Mat sample_wstar_sphere(int d, double radius, int n, std::uint64_t seed) {
  if (d < 1) throw invalid_argument("sample_wstar_sphere: d must be >= 1");
  if (!(radius > 0.0)) throw invalid_argument("sample_wstar_sphere: radius must be > 0");
  if (n < 1) throw invalid_argument("sample_wstar_sphere: n must be >= 1");
  return sphere_points(d, radius, n, seed);
}

Vec ProbeRule::probe(int d, std::uint64_t seed) const {
  switch (kind) {
    case Kind::Fixed:
      if (static_cast<int>(fixed.size()) != d) {
        throw invalid_argument("ProbeRule: fixed probe has wrong dimension");
      }
      return fixed;
    case Kind::RandomUnitScaled: {
      RandomStream rs(seed, 0x705ULL + static_cast<std::uint64_t>(d));
      return scale * sphere_point(d, 1.0, rs);
    }
  }
  return Vec();
}

VarianceReport variance_of_gradient(const VarianceScanConfig& config) {
  if (config.n_wstar < 10) throw invalid_argument("variance scan: n_wstar must be >= 10");
  for (double r : config.radii) {
    if (!(r > 0.0)) throw invalid_argument("variance scan: radii must be > 0");
  }

  VarianceReport report;
  for (int d : config.dims) {
    const GaussianMixture mixture = GaussianMixture::standard(d);
    const PredictorFamily family = PredictorFamily::cosine(d);
    const PeriodicFn psi = PeriodicFn::cosine();
    const Vec w = config.probe.probe(d, derive_seed(config.seed, 0x9, d));
    const double g_w = cosine_grad_norm_exact(w, mixture);
    const ConcentrationProfile profile = mixture.epsilon_profile(0);

    // One set of directions per dimension, scaled to each radius, so the
    // decay across r is not confounded by re-drawn targets.
    const Mat dirs =
        sample_wstar_sphere(d, 1.0, config.n_wstar, derive_seed(config.seed, 0xd, d));

    for (size_t ri = 0; ri < config.radii.size(); ++ri) {
      const double r = config.radii[ri];
      const int n = config.n_wstar;
      std::vector<std::vector<long double>> grads(n);
      double mc_floor = 0.0;

      if (config.closed_form) {
        for (int k = 0; k < n; ++k) {
          const Vec wstar = (2.0 * r) * dirs.row(k).transpose();
          grad_closed_l(w, wstar, grads[k]);
        }
      } else {
        // MC gradients with common random numbers: one x-stream shared by
        // every target; estimator noise mostly cancels in the variance
        // over targets, and the residual floor is measured by split halves.
        const std::uint64_t x_seed = derive_seed(config.seed, 0xa, d * 1000 + ri);
        const std::int64_t n_x = config.n_x;
        const int p = family.param_dim();
        std::vector<Vec> wstars(n);
        for (int k = 0; k < n; ++k) wstars[k] = (2.0 * r) * dirs.row(k).transpose();

        struct Halves {
          Mat a;  // p x n accumulators, first half
          Mat b;  // second half
        };
        const std::int64_t nchunks = chunk_count(n_x, kDefaultChunk);
        std::vector<Halves> parts(nchunks);
        chunked_run(
            n_x, kDefaultChunk,
            [&](std::int64_t lo, std::int64_t hi, std::int64_t c) {
              parts[c].a = Mat::Zero(p, n);
              parts[c].b = Mat::Zero(p, n);
              Vec x(d), gf(p);
              for (std::int64_t i = lo; i < hi; ++i) {
                RandomStream rs(x_seed, static_cast<std::uint64_t>(i));
                mixture.draw(rs, x);
                const double f = family.predict(w, x);
                family.grad_params(w, x, gf);
                Mat& half = (i < n_x / 2) ? parts[c].a : parts[c].b;
                for (int k = 0; k < n; ++k) {
                  const double resid = f - psi(wstars[k].dot(x));
                  half.col(k) += (2.0 * resid) * gf;
                }
              }
            },
            nullptr);
        Mat suma = Mat::Zero(p, n), sumb = Mat::Zero(p, n);
        for (std::int64_t c = 0; c < nchunks; ++c) {
          suma += parts[c].a;
          sumb += parts[c].b;
        }
        const double na = static_cast<double>(n_x / 2);
        const double nb = static_cast<double>(n_x - n_x / 2);
        double floor_acc = 0.0;
        for (int k = 0; k < n; ++k) {
          grads[k].resize(p);
          for (int i = 0; i < p; ++i) {
            grads[k][i] = (suma(i, k) + sumb(i, k)) / static_cast<long double>(n_x);
          }
          floor_acc += (suma.col(k) / na - sumb.col(k) / nb).squaredNorm() / 4.0;
        }
        mc_floor = floor_acc / n;
      }

      const int p = static_cast<int>(grads[0].size());
      std::vector<long double> mean(p, 0.0L);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < p; ++i) mean[i] += grads[k][i];
      for (int i = 0; i < p; ++i) mean[i] /= n;
      long double var = 0.0L;
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < p; ++i) {
          const long double dev = grads[k][i] - mean[i];
          var += dev * dev;
        }
      }
      var /= (n - 1);

      VarianceCell cell;
      cell.d = d;
      cell.r = r;
      cell.variance = var;
      cell.log_variance =
          var > 0.0L ? static_cast<double>(logl(var)) : -std::numeric_limits<double>::infinity();
      cell.mc_floor = mc_floor;
      cell.bound_series = bound_tail_sum(profile, r, 50).value();
      cell.exp_term = std::exp(-static_cast<double>(d));
      cell.grad_norm_bound = g_w;
      report.cells.push_back(cell);
    }
  }
  return report;
}

std::string VarianceReport::csv() const {
  std::ostringstream os;
  os << "d,r,variance,mc_floor,bound_series,exp_term\n";
  for (const auto& c : cells) {
    os << c.d << ',' << fmt(c.r) << ',' << fmt_long(c.variance) << ',' << fmt(c.mc_floor) << ','
       << fmt(c.bound_series) << ',' << fmt(c.exp_term) << '\n';
  }
  return os.str();
}

LineFit decay_fit(const VarianceReport& report, int d) {
  std::vector<double> x, y;
  for (const auto& c : report.cells) {
    if (c.d != d) continue;
    if (!std::isfinite(c.log_variance)) continue;
    x.push_back(c.r * c.r);
    y.push_back(c.log_variance);
  }
  return fit_line(x, y);
}

double ProbeFunction::eval(const Vec& x) const {
  switch (kind) {
    case Kind::CosineDirection:
      return std::cos(2.0 * kPi * direction.dot(x));
    case Kind::Constant:
      return constant;
  }
  return 0.0;
}

double ProbeFunction::second_moment(const GaussianMixture& mixture) const {
  switch (kind) {
    case Kind::Constant:
      return constant * constant;
    case Kind::CosineDirection:
      break;
  }
  // E cos^2(2 pi <v,x>) = 1/2 (1 + E cos(4 pi <v,x>)).
  double acc = 0.0;
  for (const auto& c : mixture.components()) {
    const double damp = std::exp(-8.0 * kPi * kPi * direction.dot(c.cov * direction));
    acc += c.weight * damp * std::cos(4.0 * kPi * direction.dot(c.mean));
  }
  return 0.5 * (1.0 + acc);
}

namespace {

// E[cos(2 pi <a, x>)] for a Gaussian mixture (mean enters as a phase).
double mixture_cos_moment(const GaussianMixture& mixture, const Vec& a) {
  double acc = 0.0;
  for (const auto& c : mixture.components()) {
    acc += c.weight * std::exp(-kTwoPiSq * a.dot(c.cov * a)) *
           std::cos(2.0 * kPi * a.dot(c.mean));
  }
  return acc;
}

}  // namespace

CorrelationDecayResult correlation_decay(const GaussianMixture& mixture, const PeriodicFn& psi,
                                         const ProbeFunction& q, int d, double r, int n_wstar,
                                         std::int64_t n_x, std::uint64_t seed) {
  if (mixture.dim() != d) throw invalid_argument("correlation_decay: dimension mismatch");
  if (n_wstar < 2 || n_x < 4) throw invalid_argument("correlation_decay: too few samples");

  const Mat wstars = sample_wstar_sphere(d, 2.0 * r, n_wstar, derive_seed(seed, 0x17, d));
  const double a0 = psi.a0();

  // Single pass over x, shared across every target draw.
  struct Part {
    Eigen::VectorXd sa, sb;  // per-target sums of q * psi_k, split halves
    double qa = 0.0, qb = 0.0;
  };
  const std::int64_t nchunks = chunk_count(n_x, kDefaultChunk);
  std::vector<Part> parts(nchunks);
  chunked_run(
      n_x, kDefaultChunk,
      [&](std::int64_t lo, std::int64_t hi, std::int64_t c) {
        parts[c].sa = Vec::Zero(n_wstar);
        parts[c].sb = Vec::Zero(n_wstar);
        Vec x(d);
        for (std::int64_t i = lo; i < hi; ++i) {
          RandomStream rs(seed, static_cast<std::uint64_t>(i));
          mixture.draw(rs, x);
          const double qv = q.eval(x);
          Vec& s = (i < n_x / 2) ? parts[c].sa : parts[c].sb;
          double& qs = (i < n_x / 2) ? parts[c].qa : parts[c].qb;
          qs += qv;
          for (int k = 0; k < n_wstar; ++k) {
            s[k] += qv * psi(wstars.row(k).dot(x));
          }
        }
      },
      nullptr);

  Vec sa = Vec::Zero(n_wstar), sb = Vec::Zero(n_wstar);
  double qa = 0.0, qb = 0.0;
  for (std::int64_t c = 0; c < nchunks; ++c) {
    sa += parts[c].sa;
    sb += parts[c].sb;
    qa += parts[c].qa;
    qb += parts[c].qb;
  }
  const double na = static_cast<double>(n_x / 2);
  const double nb = static_cast<double>(n_x - n_x / 2);

  CorrelationDecayResult out;
  double lhs = 0.0, floor_acc = 0.0;
  for (int k = 0; k < n_wstar; ++k) {
    const double full = (sa[k] + sb[k]) / (na + nb) - a0 * (qa + qb) / (na + nb);
    const double half_a = sa[k] / na - a0 * qa / na;
    const double half_b = sb[k] / nb - a0 * qb / nb;
    lhs += full * full;
    const double hd = 0.5 * (half_a - half_b);
    floor_acc += hd * hd;
  }
  out.lhs = lhs / n_wstar;
  out.noise_floor = floor_acc / n_wstar;

  // Per-draw closed form when both psi and q are cosines.
  out.lhs_closed = std::numeric_limits<double>::quiet_NaN();
  if (psi.kind() == PeriodicFn::Kind::Cosine && q.kind == ProbeFunction::Kind::CosineDirection) {
    double acc = 0.0;
    for (int k = 0; k < n_wstar; ++k) {
      const Vec wk = wstars.row(k).transpose();
      const double cross = 0.5 * (mixture_cos_moment(mixture, q.direction - wk) +
                                  mixture_cos_moment(mixture, q.direction + wk));
      acc += cross * cross;  // a0 = 0 for the cosine target
    }
    out.lhs_closed = acc / n_wstar;
  }

  const double series = bound_tail_sum(mixture.epsilon_profile(), r, 50).value();
  out.rhs = 10.0 * q.second_moment(mixture) * (std::exp(-static_cast<double>(d)) + series);
  return out;
}

}  // namespace plateau
