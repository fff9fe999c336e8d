#include "structcov/optim.hpp"

#include "structcov/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace structcov {

namespace {

struct Trial {
  double a = 0.0;
  double f = std::numeric_limits<double>::infinity();
  double df = 0.0;
  Eigen::VectorXd x, g;
  bool ok = false;
};

class LineSearch {
 public:
  LineSearch(const ValueGrad& fg, const Eigen::VectorXd& x, const Eigen::VectorXd& p, double f0,
             double df0, const BfgsOptions& opt)
      : fg_(fg), x_(x), p_(p), f0_(f0), df0_(df0), opt_(opt) {}

  Trial run(double amax) {
    Trial prev;
    prev.a = 0.0;
    prev.f = f0_;
    prev.df = df0_;
    double a = std::min(1.0, amax);
    for (int i = 0; i < 30; ++i) {
      Trial cur = eval(a);
      if (!armijo(cur) || (i > 0 && cur.f >= prev.f)) return zoom(prev, cur);
      if (std::abs(cur.df) <= -opt_.c2 * df0_) return accept(cur);
      if (cur.df >= 0.0) return zoom(cur, prev);
      if (a >= amax) return accept(cur);  // sufficient decrease at the box edge
      prev = std::move(cur);
      a = std::min(2.0 * a, amax);
    }
    return Trial{};
  }

 private:
  const ValueGrad& fg_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& p_;
  double f0_, df0_;
  const BfgsOptions& opt_;

  Trial eval(double a) const {
    Trial t;
    t.a = a;
    t.x = x_ + a * p_;
    t.g.resize(x_.size());
    t.f = fg_(t.x, t.g);
    if (!std::isfinite(t.f)) {
      t.f = std::numeric_limits<double>::infinity();
      t.df = 0.0;
    } else {
      t.df = t.g.dot(p_);
    }
    return t;
  }

  bool armijo(const Trial& t) const { return t.f <= f0_ + opt_.c1 * t.a * df0_; }

  static Trial accept(Trial t) {
    t.ok = true;
    return t;
  }

  Trial zoom(Trial lo, Trial hi) const {
    for (int i = 0; i < 40; ++i) {
      const double width = hi.a - lo.a;
      double a = 0.5 * (lo.a + hi.a);
      if (std::isfinite(hi.f)) {
        // Minimizer of the quadratic through f(lo), f'(lo), f(hi).
        const double denom = 2.0 * (hi.f - lo.f - lo.df * width);
        if (denom > 0.0) {
          const double q = lo.a - lo.df * width * width / denom;
          const double left = std::min(lo.a, hi.a) + 0.1 * std::abs(width);
          const double right = std::max(lo.a, hi.a) - 0.1 * std::abs(width);
          if (q > left && q < right) a = q;
        }
      }
      Trial cur = eval(a);
      if (!armijo(cur) || cur.f >= lo.f) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.df) <= -opt_.c2 * df0_) return accept(cur);
        if (cur.df * (hi.a - lo.a) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
      if (std::abs(hi.a - lo.a) < 1e-16) break;
    }
    // Fall back to the best point with sufficient decrease, if any.
    if (lo.a > 0.0 && armijo(lo)) return accept(lo);
    return Trial{};
  }
};

}  // namespace

BfgsResult minimize_bfgs(const ValueGrad& fg, Eigen::VectorXd x0, const BfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  Eigen::VectorXd x = x0.cwiseMax(opt.lower).cwiseMin(opt.upper);
  Eigen::VectorXd g(n);
  double f = fg(x, g);
  if (!std::isfinite(f)) throw SolverError("objective is not finite at the starting point");

  auto at_lower = [&](Eigen::Index i) { return x(i) <= opt.lower + 1e-12; };
  auto at_upper = [&](Eigen::Index i) { return x(i) >= opt.upper - 1e-12; };
  auto projected = [&] {
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < n; ++i)
      if ((at_lower(i) && g(i) > 0.0) || (at_upper(i) && g(i) < 0.0)) pg(i) = 0.0;
    return pg;
  };

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  bool fresh = true;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const Eigen::VectorXd pg = projected();
    res.pg_norm = n ? pg.cwiseAbs().maxCoeff() : 0.0;
    if (res.pg_norm < opt.grad_tol) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd mask = (pg.array() != 0.0).cast<double>();
    Eigen::VectorXd p = -(mask.asDiagonal() * H * mask.asDiagonal()) * g;
    for (Eigen::Index i = 0; i < n; ++i)
      if ((at_lower(i) && p(i) < 0.0) || (at_upper(i) && p(i) > 0.0)) p(i) = 0.0;
    if (!(g.dot(p) < 0.0)) {
      H.setIdentity();
      fresh = true;
      p = -pg;
    }
    double amax = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (p(i) > 0.0) amax = std::min(amax, (opt.upper - x(i)) / p(i));
      if (p(i) < 0.0) amax = std::min(amax, (opt.lower - x(i)) / p(i));
    }
    LineSearch ls(fg, x, p, f, g.dot(p), opt);
    Trial t = ls.run(amax);
    if (!t.ok) {
      if (!fresh) {
        H.setIdentity();
        fresh = true;
        continue;
      }
      break;
    }
    Eigen::VectorXd xn = t.x.cwiseMax(opt.lower).cwiseMin(opt.upper);
    Eigen::VectorXd s = xn - x;
    Eigen::VectorXd y = t.g - g;
    const double sy = s.dot(y);
    bool bounds_changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool was = at_lower(i) || at_upper(i);
      const bool now = xn(i) <= opt.lower + 1e-12 || xn(i) >= opt.upper - 1e-12;
      bounds_changed = bounds_changed || was != now;
    }
    if (bounds_changed) {
      // Curvature gathered on another face does not carry over.
      H.setIdentity();
      fresh = true;
    } else if (sy > 1e-10 * s.norm() * y.norm() && sy > 0.0) {
      if (fresh) {
        H = Eigen::MatrixXd::Identity(n, n) * (sy / y.squaredNorm());
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd Hy = H * y;
      H += rho * ((1.0 + rho * y.dot(Hy)) * s * s.transpose() - Hy * s.transpose() -
                  s * Hy.transpose());
    }
    x = std::move(xn);
    f = t.f;
    g = t.g;
  }
  if (it == opt.max_iterations) {
    const Eigen::VectorXd pg = projected();
    res.pg_norm = n ? pg.cwiseAbs().maxCoeff() : 0.0;
    res.converged = res.pg_norm < opt.grad_tol;
  }
  res.x = x;
  res.f = f;
  res.g = g;
  res.iterations = it;
  return res;
}

}  // namespace structcov
