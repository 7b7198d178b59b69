#include "tracelogdet/moments.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "tracelogdet/error.hpp"
#include "tracelogdet/numeric.hpp"

namespace tracelogdet {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
constexpr double kCancellationTol = 1e-6;

// log C(n, k) as a sum of logs of exact ratios.
double log_choose(std::size_t n, int k) {
  double s = 0.0;
  for (int i = 1; i <= k; ++i)
    s += std::log(static_cast<double>(n - static_cast<std::size_t>(k) + static_cast<std::size_t>(i)) /
                  static_cast<double>(i));
  return s;
}

SymmetricMeans from_log_means(std::vector<double> logE, std::size_t n) {
  SymmetricMeans sm;
  sm.n = n;
  sm.slopes.resize(logE.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < logE.size(); ++k) {
    sm.slopes[k] = logE[k] - prev;
    prev = logE[k];
  }
  sm.logE = std::move(logE);
  return sm;
}

std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

}  // namespace

NormalizedMoments normalize(const TracePowers& tp) {
  require(tp.n >= 1, "trace powers need n >= 1");
  require(tp.m() >= 1, "trace powers need p_1");
  for (double p : tp.p) require(std::isfinite(p) && p > 0.0, "trace powers must be positive");
  NormalizedMoments nm;
  nm.n = tp.n;
  nm.M.resize(tp.p.size());
  const double logn = std::log(static_cast<double>(tp.n));
  const double logp1 = std::log(tp.p[0]);
  nm.M[0] = 1.0;
  for (int k = 2; k <= tp.m(); ++k)
    nm.M[static_cast<std::size_t>(k - 1)] =
        std::exp((k - 1) * logn + std::log(tp.at(k)) - k * logp1);
  return nm;
}

NormalizedMoments normalized_from_eigenvalues(std::span<const double> x, int m) {
  require(!x.empty() && m >= 1, "need eigenvalues and m >= 1");
  double am = compensated_sum(x) / static_cast<double>(x.size());
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(m));
  for (double v : x) {
    double u = v / am, up = 1.0;
    for (int k = 0; k < m; ++k) {
      up *= u;
      acc[static_cast<std::size_t>(k)].add(up);
    }
  }
  NormalizedMoments nm;
  nm.n = x.size();
  nm.M.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    nm.M[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].value() / static_cast<double>(x.size());
  nm.M[0] = 1.0;
  return nm;
}

CumulantSamples cumulants(const NormalizedMoments& nm) {
  CumulantSamples cs;
  cs.K.assign(static_cast<std::size_t>(nm.m()) + 1, 0.0);
  for (int k = 2; k <= nm.m(); ++k) {
    double Mk = nm.at(k);
    require(Mk > 0.0, "moments must be positive");
    cs.K[static_cast<std::size_t>(k)] = std::log(Mk);
  }
  return cs;
}

SymmetricMeans newton_maclaurin(std::span<const double> q, std::size_t n) {
  const int m = static_cast<int>(q.size());
  require(m >= 1, "need at least q_1");
  require(static_cast<std::size_t>(m) <= n, "order exceeds n");
  for (double v : q) require(std::isfinite(v), "power sums must be finite");

  // Work with e_k / n^k and q_j / n^j to keep magnitudes near one.
  const double dn = static_cast<double>(n);
  std::vector<double> qs(q.size());
  for (int j = 1; j <= m; ++j) qs[j - 1] = q[j - 1] / std::pow(dn, j);

  std::vector<double> e(static_cast<std::size_t>(m) + 1, 0.0), err(e.size(), 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= m; ++k) {
    CompensatedSum sum;
    double propagated = 0.0;
    for (int j = 1; j <= k; ++j) {
      double term = e[k - j] * qs[j - 1];
      if (j % 2 == 0) term = -term;
      sum.add(term);
      propagated += std::abs(term) * (err[k - j] + 2 * kUnit);
    }
    double total = sum.value();
    if (!(total > 0.0))
      fail(ErrorCode::cancellation, "Newton identities produced e_" + std::to_string(k) + " <= 0");
    e[k] = total / k;
    err[k] = (propagated + kUnit * sum.magnitude()) / total + kUnit;
    if (err[k] > kCancellationTol)
      fail(ErrorCode::cancellation,
           "Newton identities lost precision at e_" + std::to_string(k) +
               " (estimated relative error " + std::to_string(err[k]) + ")");
  }
  std::vector<double> logE(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) logE[k - 1] = std::log(e[k]) + k * std::log(dn) - log_choose(n, k);
  return from_log_means(std::move(logE), n);
}

SymmetricMeans newton_maclaurin(const NormalizedMoments& nm) {
  std::vector<double> q(nm.M.size());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = static_cast<double>(nm.n) * nm.M[k];
  SymmetricMeans sm = newton_maclaurin(q, nm.n);
  sm.logE[0] = 0.0;
  sm.slopes[0] = 0.0;
  if (sm.m() >= 2) sm.slopes[1] = sm.logE[1];
  return sm;
}

SymmetricMeans symmetric_means_exact(std::span<const double> x, int m) {
  require(m >= 1 && static_cast<std::size_t>(m) <= x.size(), "need 1 <= m <= n");
  // E[k] holds e_k(x_1..x_i) / C(i, k); every update is a convex combination.
  std::vector<double> E(static_cast<std::size_t>(m) + 1, 0.0);
  E[0] = 1.0;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    const double di = static_cast<double>(i);
    int top = static_cast<int>(std::min<std::size_t>(i, static_cast<std::size_t>(m)));
    for (int k = top; k >= 1; --k) {
      double keep = (di - k) / di;
      E[k] = keep * E[k] + (k / di) * x[i - 1] * E[k - 1];
    }
  }
  std::vector<double> logE(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) logE[k - 1] = std::log(E[k]);
  return from_log_means(std::move(logE), x.size());
}

std::vector<double> central_moments(const NormalizedMoments& nm, int order) {
  require(order >= 2 && order <= nm.m(), "central moment order must be in [2, m]");
  std::vector<double> mu;
  for (int k = 2; k <= order; ++k) {
    CompensatedSum s;
    for (int j = 0; j <= k; ++j) {
      double c = static_cast<double>(binomial(static_cast<unsigned>(k), static_cast<unsigned>(j)));
      s.add(((k - j) % 2 ? -c : c) * nm.at(j));
    }
    mu.push_back(s.value());
  }
  return mu;
}

std::vector<double> boxcox_samples(const NormalizedMoments& nm, std::complex<double> alpha) {
  require(alpha != std::complex<double>(0.0, 0.0), "alpha = 0 is the log transform");
  std::vector<double> G(static_cast<std::size_t>(nm.m()) + 1, 0.0);
  for (int k = 2; k <= nm.m(); ++k) {
    double Mk = nm.at(k);
    require(Mk > 0.0, "moments must be positive");
    std::complex<double> z = alpha * std::log(Mk);
    std::complex<double> f;
    if (std::abs(z) < 1e-3) {
      // (e^z - 1)/alpha = L (1 + z/2 + z^2/6 + z^3/24 + z^4/120)
      f = std::log(Mk) * (1.0 + z / 2.0 * (1.0 + z / 3.0 * (1.0 + z / 4.0 * (1.0 + z / 5.0))));
    } else {
      f = (std::exp(z) - 1.0) / alpha;
    }
    G[static_cast<std::size_t>(k)] = f.real();
  }
  return G;
}

void write_traces_csv(std::ostream& out, const TracePowers& tp) {
  out << "n,k,p_k\n";
  char buf[64];
  for (int k = 1; k <= tp.m(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", tp.at(k));
    out << tp.n << ',' << k << ',' << buf << '\n';
  }
}

TracePowers read_traces_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "n,k,p_k")
    fail(ErrorCode::io, "traces CSV must start with header n,k,p_k");
  TracePowers tp;
  int expected_k = 1;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      fail(ErrorCode::io, "malformed traces row: " + line);
    std::size_t n = 0;
    int k = 0;
    double p = 0.0;
    try {
      n = std::stoull(a);
      k = std::stoi(b);
      p = std::stod(c);
    } catch (const std::exception&) {
      fail(ErrorCode::io, "malformed traces row: " + line);
    }
    if (k != expected_k) fail(ErrorCode::io, "traces rows must list k = 1, 2, ... in order");
    if (tp.n == 0) tp.n = n;
    if (n != tp.n) fail(ErrorCode::io, "inconsistent n in traces CSV");
    tp.p.push_back(p);
    ++expected_k;
  }
  if (tp.p.empty()) fail(ErrorCode::io, "traces CSV has no rows");
  require(tp.n >= 1, "n must be positive");
  for (double p : tp.p) require(std::isfinite(p) && p > 0.0, "trace powers must be positive");
  return tp;
}

}  // namespace tracelogdet
