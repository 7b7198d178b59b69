#include "tracelogdet/measure_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "tracelogdet/error.hpp"
#include "tracelogdet/numeric.hpp"
#include "tracelogdet/parallel.hpp"
#include "tracelogdet/random.hpp"

namespace tracelogdet {

double AtomicMeasure::mass() const noexcept {
  CompensatedSum s;
  for (const Atom& a : atoms) s.add(a.w);
  return s.value();
}

double AtomicMeasure::moment(int j) const noexcept {
  CompensatedSum s;
  for (const Atom& a : atoms) {
    double xp = 1.0;
    for (int i = 0; i < j; ++i) xp *= a.x;
    s.add(a.w * xp);
  }
  return s.value();
}

double AtomicMeasure::mean_log() const noexcept {
  CompensatedSum s;
  for (const Atom& a : atoms) s.add(a.w * std::log(a.x));
  return s.value();
}

std::string_view to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::degenerate: return "degenerate";
    case SolveStatus::stalled: return "stalled";
  }
  return "stalled";
}

double moment_residual(const AtomicMeasure& mu, std::span<const double> moments) {
  double r = 0.0;
  for (std::size_t j = 1; j <= moments.size(); ++j)
    r = std::max(r, std::abs(mu.moment(static_cast<int>(j)) - moments[j - 1]));
  return r;
}

double scaled_moment_residual(const AtomicMeasure& mu, std::span<const double> moments) {
  double r = 0.0;
  for (std::size_t j = 1; j <= moments.size(); ++j)
    r = std::max(r, std::abs(mu.moment(static_cast<int>(j)) - moments[j - 1]) /
                        std::max(1.0, std::abs(moments[j - 1])));
  return r;
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Augmented Lagrangian for the moment program in the variables
// z = (y_free, v): y = log x for the non-pinned atoms, v = softmax logits.
class Program {
 public:
  Program(Sense sense, std::span<const double> moments, std::optional<double> pinned, double lo,
          double hi)
      : sign_(sense == Sense::max ? -1.0 : 1.0),
        M_(moments.begin(), moments.end()),
        k_(static_cast<int>(moments.size())),
        atoms_(k_ + 1),
        pinned_(pinned.has_value()),
        pinned_y_(pinned ? std::log(*pinned) : 0.0),
        lo_(std::log(lo)),
        hi_(std::log(hi)) {}

  int k() const { return k_; }
  int atoms() const { return atoms_; }
  int nfree() const { return pinned_ ? atoms_ - 1 : atoms_; }
  int dim() const { return nfree() + atoms_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double y(const Vec& z, int i) const {
    if (pinned_) return i == 0 ? pinned_y_ : z[i - 1];
    return z[i];
  }
  int yidx(int i) const { return pinned_ ? i - 1 : i; }  // -1 for the pinned atom
  int vidx(int i) const { return nfree() + i; }

  Vec weights(const Vec& z) const {
    Vec v = z.tail(atoms_);
    double mx = v.maxCoeff();
    Vec w = (v.array() - mx).exp();
    return w / w.sum();
  }

  double objective(const Vec& z) const {
    Vec w = weights(z);
    double f = 0.0;
    for (int i = 0; i < atoms_; ++i) f += w[i] * y(z, i);
    return f;
  }

  Vec constraints(const Vec& z) const {
    Vec w = weights(z);
    Vec c(k_);
    for (int j = 1; j <= k_; ++j) {
      CompensatedSum s;
      for (int i = 0; i < atoms_; ++i) s.add(w[i] * std::exp(j * y(z, i) - logM(j)));
      c[j - 1] = s.value() - 1.0;
    }
    return c;
  }

  double merit(const Vec& z, const Vec& lambda, double rho) const {
    Vec c = constraints(z);
    return sign_ * objective(z) + lambda.dot(c) + 0.5 * rho * c.squaredNorm();
  }

  // Value, gradient and Hessian of the augmented Lagrangian.
  double evaluate(const Vec& z, const Vec& lambda, double rho, Vec& g, Mat& H) const {
    const int n = dim();
    g.setZero(n);
    H.setZero(n, n);
    Vec w = weights(z);
    Vec phi(atoms_), d1(atoms_), d2(atoms_), grad(n);
    Mat hess(n, n);

    // objective: phi = y
    for (int i = 0; i < atoms_; ++i) {
      phi[i] = y(z, i);
      d1[i] = 1.0;
      d2[i] = 0.0;
    }
    double f = functional(z, w, phi, d1, d2, grad, hess);
    g += sign_ * grad;
    H += sign_ * hess;
    double value = sign_ * f;

    for (int j = 1; j <= k_; ++j) {
      for (int i = 0; i < atoms_; ++i) {
        phi[i] = std::exp(j * y(z, i) - logM(j));
        d1[i] = j * phi[i];
        d2[i] = j * d1[i];
      }
      double c = functional(z, w, phi, d1, d2, grad, hess) - 1.0;
      double mult = lambda[j - 1] + rho * c;
      value += lambda[j - 1] * c + 0.5 * rho * c * c;
      g += mult * grad;
      H += mult * hess;
      H.noalias() += rho * grad * grad.transpose();
    }
    return value;
  }

  // Least-squares multipliers: J^T lambda ~ -grad(sign f).
  Vec multiplier_estimate(const Vec& z) const {
    Vec g(dim()), gc(dim()), zero = Vec::Zero(k_);
    Mat H(dim(), dim());
    Mat J(dim(), k_);
    evaluate(z, zero, 0.0, g, H);
    for (int j = 0; j < k_; ++j) {
      Vec e = Vec::Zero(k_);
      e[j] = 1.0;
      evaluate(z, e, 0.0, gc, H);
      J.col(j) = gc - g;
    }
    Vec lambda = J.completeOrthogonalDecomposition().solve(-g);
    if (!lambda.allFinite()) lambda.setZero();
    return lambda;
  }

  void project(Vec& z) const {
    for (int i = 0; i < nfree(); ++i) z[i] = std::clamp(z[i], lo_, hi_);
  }

  double sign() const { return sign_; }

 private:
  double logM(int j) const { return std::log(M_[static_cast<std::size_t>(j - 1)]); }

  // h = sum_i w_i phi_i(y_i) with first and second derivatives of phi.
  double functional(const Vec& z, const Vec& w, const Vec& phi, const Vec& d1, const Vec& d2,
                    Vec& grad, Mat& hess) const {
    (void)z;
    grad.setZero(dim());
    hess.setZero(dim(), dim());
    double h = 0.0;
    for (int i = 0; i < atoms_; ++i) h += w[i] * phi[i];
    for (int i = 0; i < atoms_; ++i) {
      int yi = yidx(i), vi = vidx(i);
      if (yi >= 0) {
        grad[yi] = w[i] * d1[i];
        hess(yi, yi) = w[i] * d2[i];
        for (int l = 0; l < atoms_; ++l) {
          double v = w[i] * ((i == l ? 1.0 : 0.0) - w[l]) * d1[i];
          hess(yi, vidx(l)) = v;
          hess(vidx(l), yi) = v;
        }
      }
      grad[vi] = w[i] * (phi[i] - h);
      for (int l = 0; l < atoms_; ++l) {
        double v = w[i] * ((i == l ? 1.0 : 0.0) - w[l]) * (phi[i] - h) - w[i] * w[l] * (phi[l] - h);
        hess(vi, vidx(l)) = v;
      }
    }
    return h;
  }

  double sign_;
  std::vector<double> M_;
  int k_;
  int atoms_;
  bool pinned_;
  double pinned_y_;
  double lo_, hi_;
};

// Gauss rule with `count` nodes for the measure whose moments are nu[0..2*count-1],
// via Cholesky of the Hankel matrix and the Jacobi matrix eigenproblem.
std::optional<std::vector<Atom>> gauss_rule(const std::vector<long double>& nu, int count) {
  using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  if (count < 1 || static_cast<int>(nu.size()) < 2 * count) return std::nullopt;
  if (!(nu[0] > 0)) return std::nullopt;
  const int s = count;
  // Hankel of order s+1 needs nu up to 2s; the last entry only enters the
  // final diagonal of R, which the recurrence never reads, so pad with 0.
  LMat Hk(s + 1, s + 1);
  for (int i = 0; i <= s; ++i)
    for (int j = 0; j <= s; ++j) {
      int idx = i + j;
      Hk(i, j) = idx < static_cast<int>(nu.size()) ? nu[static_cast<std::size_t>(idx)] : 0.0L;
    }
  // Cholesky on the leading s x s block plus the off-diagonal column s.
  LMat R = LMat::Zero(s + 1, s + 1);
  for (int i = 0; i < s; ++i) {
    long double d = Hk(i, i);
    for (int l = 0; l < i; ++l) d -= R(l, i) * R(l, i);
    if (!(d > 0) || d < 1e-15L * Hk(i, i)) {
      return std::nullopt;
    }
    R(i, i) = std::sqrt(d);
    for (int j = i + 1; j <= s; ++j) {
      long double v = Hk(i, j);
      for (int l = 0; l < i; ++l) v -= R(l, i) * R(l, j);
      R(i, j) = v / R(i, i);
    }
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(s, s);
  for (int j = 0; j < s; ++j) {
    long double a = R(j, j + 1) / R(j, j);
    if (j > 0) a -= R(j - 1, j) / R(j - 1, j - 1);
    J(j, j) = static_cast<double>(a);
    if (j + 1 < s) {
      long double b = R(j + 1, j + 1) / R(j, j);
      J(j, j + 1) = J(j + 1, j) = static_cast<double>(b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  if (eig.info() != Eigen::Success) return std::nullopt;
  std::vector<Atom> rule;
  for (int i = 0; i < s; ++i) {
    double v0 = eig.eigenvectors()(0, i);
    rule.push_back({eig.eigenvalues()[i], static_cast<double>(nu[0]) * v0 * v0});
  }
  return rule;
}

// Extremal measure predicted by the sign pattern of the derivatives of log:
// odd k maximizes at the Gauss rule and minimizes at the rule with both
// endpoints; even k uses the rule with the upper (max) or lower (min) endpoint.
std::optional<std::vector<Atom>> principal_start(Sense sense, std::span<const double> M, double a,
                                                 double b) {
  const int k = static_cast<int>(M.size());
  std::vector<long double> mom(static_cast<std::size_t>(k) + 1);
  mom[0] = 1.0L;
  for (int j = 1; j <= k; ++j) mom[static_cast<std::size_t>(j)] = M[static_cast<std::size_t>(j - 1)];
  const long double la = a, lb = b;
  std::vector<long double> nu;
  std::vector<Atom> atoms;
  enum { gauss, radau_hi, radau_lo, lobatto } kind;
  if (k % 2 == 1)
    kind = sense == Sense::max ? gauss : lobatto;
  else
    kind = sense == Sense::max ? radau_hi : radau_lo;
  int count = 0;
  switch (kind) {
    case gauss:
      count = (k + 1) / 2;
      nu.assign(mom.begin(), mom.end());
      break;
    case radau_hi:
      count = k / 2;
      for (int j = 0; j < k; ++j) nu.push_back(mom[j] - mom[j + 1] / lb);
      break;
    case radau_lo:
      count = k / 2;
      for (int j = 0; j < k; ++j) nu.push_back(mom[j + 1] - la * mom[j]);
      break;
    case lobatto:
      count = (k - 1) / 2;
      for (int j = 0; j + 1 < k; ++j)
        nu.push_back((-mom[j + 2] + (la + lb) * mom[j + 1] - la * lb * mom[j]) / lb);
      break;
  }
  std::vector<Atom> rule;
  if (count > 0) {
    auto g = gauss_rule(nu, count);
    if (!g) return std::nullopt;
    rule = *g;
  }
  long double mass = 0;
  for (Atom& at : rule) {
    if (!(at.x > a) || !(at.x < b) || !(at.w > 0)) {
      return std::nullopt;
    }
    switch (kind) {
      case gauss: break;
      case radau_hi: at.w = static_cast<double>(at.w / (1.0L - at.x / lb)); break;
      case radau_lo: at.w = static_cast<double>(at.w / (at.x - la)); break;
      case lobatto: at.w = static_cast<double>(at.w / ((at.x - la) * (1.0L - at.x / lb))); break;
    }
    mass += at.w;
  }
  // The cap atom may carry a weight far below rounding of the total mass, so
  // it is read off the top moment instead.
  auto cap_weight = [&] {
    long double top = mom[static_cast<std::size_t>(k)];
    for (const Atom& at : rule) top -= at.w * std::pow(static_cast<long double>(at.x), k);
    if (kind == lobatto) top -= (1.0L - mass) * std::pow(la, k);
    long double denom = std::pow(lb, k) - (kind == lobatto ? std::pow(la, k) : 0.0L);
    return std::max(0.0L, top / denom);
  };
  if (kind == radau_hi) rule.push_back({b, static_cast<double>(cap_weight())});
  if (kind == radau_lo) rule.insert(rule.begin(), {a, static_cast<double>(1.0L - mass)});
  if (kind == lobatto) {
    long double wb = cap_weight();
    rule.insert(rule.begin(), {a, static_cast<double>(1.0L - mass - wb)});
    rule.push_back({b, static_cast<double>(wb)});
  }
  for (const Atom& at : rule)
    if (!(at.w >= 0)) return std::nullopt;
  return rule;
}

struct InnerResult {
  int iterations = 0;
  bool converged = false;
};

// Projected damped Newton on the box for the y block.
InnerResult minimize_inner(const Program& P, Vec& z, const Vec& lambda, double rho, double gtol,
                           int budget) {
  const int n = P.dim();
  Vec g(n), gtrial(n);
  Mat H(n, n), Htrial(n, n);
  double mu = 1e-8;
  double val = P.evaluate(z, lambda, rho, g, H);
  InnerResult res;
  while (res.iterations < budget) {
    ++res.iterations;
    std::vector<int> free;
    const double edge = 1e-12;
    for (int i = 0; i < n; ++i) {
      if (i < P.nfree()) {
        if (z[i] <= P.lo() + edge && g[i] > 0) continue;
        if (z[i] >= P.hi() - edge && g[i] < 0) continue;
      }
      free.push_back(i);
    }
    double gnorm = 0.0;
    for (int i : free) gnorm = std::max(gnorm, std::abs(g[i]));
    if (gnorm <= gtol) {
      res.converged = true;
      break;
    }
    const int nf = static_cast<int>(free.size());
    Mat Hf(nf, nf);
    Vec gf(nf);
    for (int a = 0; a < nf; ++a) {
      gf[a] = g[free[a]];
      for (int b = 0; b < nf; ++b) Hf(a, b) = H(free[a], free[b]);
    }
    double scale = std::max(1.0, Hf.diagonal().cwiseAbs().maxCoeff());
    bool stepped = false;
    for (int attempt = 0; attempt < 30 && !stepped; ++attempt) {
      Mat A = Hf;
      for (int a = 0; a < nf; ++a) A(a, a) += mu * std::max(std::abs(Hf(a, a)), 1e-14 * scale);
      Eigen::LLT<Mat> llt(A);
      if (llt.info() != Eigen::Success) {
        mu = std::max(mu * 10.0, 1e-12);
        continue;
      }
      Vec df = llt.solve(-gf);
      // Newton decrement below rounding level: nothing left to gain.
      if (-gf.dot(df) <= 1e-15 * (1.0 + std::abs(val))) {
        res.converged = true;
        return res;
      }
      Vec d = Vec::Zero(n);
      for (int a = 0; a < nf; ++a) d[free[a]] = df[a];
      // cap the step in log-space to keep exp() well behaved
      double dmax = d.cwiseAbs().maxCoeff();
      if (dmax > 2.0) d *= 2.0 / dmax;
      double t = 1.0;
      for (int ls = 0; ls < 40; ++ls) {
        Vec zt = z + t * d;
        P.project(zt);
        double vt = P.merit(zt, lambda, rho);
        double pred = g.dot(zt - z);
        if (std::isfinite(vt) && pred < 0.0 && vt <= val + 1e-4 * pred) {
          z = zt;
          val = P.evaluate(z, lambda, rho, g, H);
          stepped = true;
          break;
        }
        t *= 0.5;
      }
      if (stepped) {
        if (t == 1.0) mu = std::max(mu * 0.1, 1e-14);
      } else {
        mu *= 10.0;
      }
    }
    if (!stepped) break;
  }
  return res;
}

struct RestartOutcome {
  bool feasible = false;
  bool converged = false;
  double objective = -std::numeric_limits<double>::infinity();  // on the solve's scale
  double residual = std::numeric_limits<double>::infinity();
  AtomicMeasure witness;
};

AtomicMeasure extract_witness(const Program& P, const Vec& z, std::optional<double> pinned,
                              std::span<const double> moments, double tol_feas, double atom_floor) {
  Vec w = P.weights(z);
  std::vector<Atom> raw;
  for (int i = 0; i < P.atoms(); ++i) {
    double x = (pinned && i == 0) ? *pinned : std::exp(P.y(z, i));
    raw.push_back({x, w[i]});
  }
  std::sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
  // merge atoms that coincide in log-space
  std::vector<Atom> merged;
  for (const Atom& a : raw) {
    if (!merged.empty() && std::abs(std::log(a.x / merged.back().x)) < 1e-10) {
      Atom& b = merged.back();
      if (!(pinned && b.x == *pinned)) b.x = (b.x * b.w + a.x * a.w) / (b.w + a.w);
      b.w += a.w;
    } else {
      merged.push_back(a);
    }
  }
  // Drop negligible atoms, but keep tiny-weight atoms far out in the tail that
  // still carry a visible share of a high moment.
  AtomicMeasure mu;
  for (const Atom& a : merged) {
    bool keep = a.w >= atom_floor || (pinned && a.x == *pinned);
    if (!keep) {
      double share = 0.0, xp = 1.0;
      for (std::size_t j = 1; j <= moments.size(); ++j) {
        xp *= a.x;
        share = std::max(share, a.w * xp / moments[j - 1]);
      }
      keep = share > 1e-3 * tol_feas;
    }
    if (keep) mu.atoms.push_back(a);
  }
  double total = mu.mass();
  for (Atom& a : mu.atoms) a.w /= total;
  return mu;
}

RestartOutcome run_restart(const Program& P, Vec z, std::optional<double> pinned,
                           std::span<const double> moments, const SolveConfig& cfg, double rho,
                           double dir) {
  P.project(z);
  AtomicMeasure start = extract_witness(P, z, pinned, moments, cfg.tol_feas, cfg.atom_floor);
  double start_res = scaled_moment_residual(start, moments);
  Vec lambda = P.multiplier_estimate(z);
  double prev_viol = std::numeric_limits<double>::infinity();
  double prev_obj = P.objective(z);
  int used = 0;
  bool converged = false;
  const double feas_target = std::min(cfg.tol_feas * 1e-2, 1e-11);
  while (used < cfg.max_iter) {
    double gtol = std::max(1e-13, std::min(1e-3, prev_viol * 1e-1));
    InnerResult in = minimize_inner(P, z, lambda, rho, gtol, cfg.max_iter - used);
    used += in.iterations;
    Vec c = P.constraints(z);
    double viol = c.cwiseAbs().maxCoeff();
    double obj = P.objective(z);
    bool stalled_obj = std::abs(obj - prev_obj) <= cfg.tol_opt * (1.0 + std::abs(obj));
    if (viol <= feas_target && in.converged && stalled_obj) {
      converged = true;
      break;
    }
    lambda += rho * c;
    if (viol > 0.25 * prev_viol) rho = std::min(rho * 10.0, 1e12);
    prev_viol = viol;
    prev_obj = obj;
    if (in.iterations == 0) break;
  }
  RestartOutcome out;
  out.witness = extract_witness(P, z, pinned, moments, cfg.tol_feas, cfg.atom_floor);
  out.residual = scaled_moment_residual(out.witness, moments);
  out.feasible = out.residual <= cfg.tol_feas;
  out.converged = converged;
  out.objective = out.witness.mean_log();
  // An exactly feasible start is kept when the iteration wandered off it.
  if (start_res <= cfg.tol_feas &&
      (!out.feasible || dir * (start.mean_log() - out.objective) > 0.0)) {
    out.witness = std::move(start);
    out.residual = start_res;
    out.feasible = true;
    out.converged = true;
    out.objective = out.witness.mean_log();
  }
  return out;
}

Vec initial_point(const Program& P, int restart, double a, double b, double sigma,
                  std::uint64_t seed) {
  const int N = P.atoms();
  Vec z = Vec::Zero(P.dim());
  std::vector<double> ys(static_cast<std::size_t>(N)), vs(static_cast<std::size_t>(N), 0.0);
  if (restart == 0) {
    for (int i = 0; i < N; ++i) ys[i] = std::log(a + (b - a) * (i + 0.5) / N);
  } else if (restart == 1) {
    for (int i = 0; i < N; ++i) ys[i] = std::log(a) + (std::log(b) - std::log(a)) * (i + 0.5) / N;
  } else {
    Rng rng(derive_seed(seed, 3, static_cast<std::uint64_t>(restart)));
    std::normal_distribution<double> draw(0.0, sigma);
    std::gamma_distribution<double> gam(1.0, 1.0);
    double total = 0.0;
    std::vector<double> g(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
      ys[i] = draw(rng);
      g[i] = std::max(gam(rng), 1e-300);
      total += g[i];
    }
    for (int i = 0; i < N; ++i) vs[i] = std::log(g[i] / total);
    std::sort(ys.begin(), ys.end());
  }
  int f = 0;
  for (int i = 0; i < N; ++i) {
    if (P.yidx(i) >= 0) z[f++] = ys[i];
    z[P.nfree() + i] = vs[i];
  }
  return z;
}

// Encodes a measure with at most k+1 atoms as a starting point; missing atoms
// are filled by splitting the heaviest one.
Vec point_from_atoms(const Program& P, std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  while (static_cast<int>(atoms.size()) < P.atoms()) {
    auto heavy = std::max_element(atoms.begin(), atoms.end(),
                                  [](const Atom& l, const Atom& r) { return l.w < r.w; });
    heavy->w /= 2;
    Atom copy = *heavy;
    atoms.insert(heavy + 1, copy);
  }
  Vec z = Vec::Zero(P.dim());
  int f = 0;
  for (int i = 0; i < P.atoms(); ++i) {
    if (P.yidx(i) >= 0) z[f++] = std::clamp(std::log(atoms[i].x), P.lo(), P.hi());
    z[P.nfree() + i] = std::log(std::max(atoms[i].w, 1e-300));
  }
  return z;
}

}  // namespace

SolveResult solve(Sense sense, std::span<const double> moments, std::optional<double> floor,
                  const SolveConfig& cfg) {
  const int k = static_cast<int>(moments.size());
  require(k >= 1, "need at least M_1");
  require(std::abs(moments[0] - 1.0) <= 1e-12, "moments must be mean-normalized (M_1 = 1)");
  for (double M : moments) require(std::isfinite(M) && M > 0.0, "moments must be positive");
  require(cfg.restarts >= 1 && cfg.max_iter >= 1, "restarts and max_iter must be positive");
  require(cfg.tol_feas > 0 && cfg.tol_opt > 0 && cfg.atom_floor > 0, "tolerances must be positive");
  if (sense == Sense::min) {
    require(floor.has_value() && *floor > 0.0, "lower problem needs a floor r > 0");
    require(*floor <= 1.0, "floor r must not exceed the mean");
  }

  SolveResult point_mass;
  point_mass.witness.atoms = {{1.0, 1.0}};
  if (k >= 2 && moments[1] - 1.0 <= 1e-14) {
    point_mass.status = SolveStatus::degenerate;
    point_mass.residual = scaled_moment_residual(point_mass.witness, moments);
    return point_mass;
  }
  if (k == 1 && sense == Sense::max) {
    point_mass.best_restart = 0;
    point_mass.feasible_restarts = 1;
    return point_mass;
  }
  if (sense == Sense::min && *floor >= 1.0)
    fail(ErrorCode::infeasible, "floor r = 1 forces a point mass but M_2 > 1");

  const double Mk_root = std::pow(moments[k - 1], 1.0 / k);
  const double cap = cfg.support_cap.value_or(Mk_root * 1e3);
  require(cap > 1.0, "support cap must exceed the mean");
  const double lo = sense == Sense::min ? *floor : cfg.atom_floor;
  std::optional<double> pinned = sense == Sense::min ? floor : std::nullopt;
  Program P(sense, moments, pinned, lo, cap);

  const double sigma = std::sqrt(std::log(moments.size() >= 2 ? moments[1] : 2.0));
  const double b = std::min(cap, std::max(Mk_root, 1.0 + 2.0 * sigma) * 1.5);
  const double a = std::max(lo * 1.01, std::min(0.5, 1.0 / (b * b)));

  // The generic starts come first; the moment-structured start, when the
  // moment sequence admits one, runs as one extra restart.
  auto structured = principal_start(sense, moments, lo, cap);
  // Near-degenerate sequences have no rule at full order; a lower-order rule
  // still lands close to the feasible set.
  for (int kk = k - 1; !structured && kk >= 2; --kk)
    structured = principal_start(sense, moments.first(static_cast<std::size_t>(kk)), lo, cap);
  const double dir = sense == Sense::max ? 1.0 : -1.0;
  std::size_t total = static_cast<std::size_t>(cfg.restarts) + (structured ? 1 : 0);
  std::vector<RestartOutcome> outcomes(total);
  parallel_for(
      outcomes.size(),
      [&](std::size_t r) {
        bool generic = r < static_cast<std::size_t>(cfg.restarts);
        Vec z0 = generic ? initial_point(P, static_cast<int>(r), a, b, sigma, cfg.seed)
                         : point_from_atoms(P, *structured);
        // a near-feasible start needs a stiff penalty to stay put
        outcomes[r] = run_restart(P, z0, pinned, moments, cfg, 1e4, dir);
      },
      cfg.threads);

  SolveResult best;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const RestartOutcome& o = outcomes[r];
    if (!o.feasible) continue;
    ++best.feasible_restarts;
    const double margin = dir * (o.objective - best.objective);
    const double tol = cfg.tol_opt * (1.0 + std::abs(best.objective));
    // ties keep the lower index unless only the later restart converged
    bool better = best.best_restart < 0 || margin > tol ||
                  (margin >= -tol && o.converged && best.status == SolveStatus::stalled);
    if (better) {
      best.best_restart = static_cast<int>(r);
      best.objective = o.objective;
      best.witness = o.witness;
      best.residual = o.residual;
      best.status = o.converged ? SolveStatus::converged : SolveStatus::stalled;
    }
  }
  if (best.best_restart < 0)
    fail(ErrorCode::infeasible, "no restart reached the moment tolerance");
  return best;
}

}  // namespace tracelogdet
