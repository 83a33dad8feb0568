#include "covaug/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace covaug {

namespace {

constexpr double kTinyDenominator = 1e-300;

/// Accumulates residual and reference magnitudes point by point.
struct ResidualAccumulator {
  double res_sq = 0.0;
  double ref_sq = 0.0;
  double res_max = 0.0;
  double ref_max = 0.0;

  void add(double residual, double reference) {
    res_sq += residual * residual;
    ref_sq += reference * reference;
    res_max = std::max(res_max, std::abs(residual));
    ref_max = std::max(ref_max, std::abs(reference));
  }

  ResidualReport report() const {
    ResidualReport r;
    r.rel_l2 = std::sqrt(res_sq) / std::max(std::sqrt(ref_sq), kTinyDenominator);
    r.rel_linf = res_max / std::max(ref_max, kTinyDenominator);
    return r;
  }
};

void check(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

/// Conservative second-order flux divergence of a nodal 1D field:
///   [a_{i+1/2}(u_{i+1}-u_i) - a_{i-1/2}(u_i-u_{i-1})] / h^2
/// with midpoint-averaged a.
double flux_divergence_1d(const Eigen::VectorXd& a, const Eigen::VectorXd& u, int i,
                          double h) {
  const double a_right = 0.5 * (a(i) + a(i + 1));
  const double a_left = 0.5 * (a(i - 1) + a(i));
  return (a_right * (u(i + 1) - u(i)) - a_left * (u(i) - u(i - 1))) / (h * h);
}

/// Staggered-flux divergence of  d_i(A^{ij} d_j u)  at interior node (i, j);
/// `at` reads a nodal scalar.
template <typename At>
double flux_divergence_2d(const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a12,
                          const Eigen::MatrixXd& a22, At&& at, int i, int j, double h) {
  const auto avg_x = [](const Eigen::MatrixXd& m, int p, int q) {
    return 0.5 * (m(p, q) + m(p + 1, q));
  };
  const auto avg_y = [](const Eigen::MatrixXd& m, int p, int q) {
    return 0.5 * (m(p, q) + m(p, q + 1));
  };
  // x-fluxes at (i +- 1/2, j): A11 du/dx + A12 du/dy with the transverse
  // derivative averaged over the two columns sharing the face.
  const auto flux_x = [&](int p) {
    const double du_dx = (at(p + 1, j) - at(p, j)) / h;
    const double du_dy =
        (at(p, j + 1) - at(p, j - 1) + at(p + 1, j + 1) - at(p + 1, j - 1)) / (4.0 * h);
    return avg_x(a11, p, j) * du_dx + avg_x(a12, p, j) * du_dy;
  };
  const auto flux_y = [&](int q) {
    const double du_dy = (at(i, q + 1) - at(i, q)) / h;
    const double du_dx =
        (at(i + 1, q) - at(i - 1, q) + at(i + 1, q + 1) - at(i - 1, q + 1)) / (4.0 * h);
    return avg_y(a22, i, q) * du_dy + avg_y(a12, i, q) * du_dx;
  };
  return (flux_x(i) - flux_x(i - 1)) / h + (flux_y(j) - flux_y(j - 1)) / h;
}

}  // namespace

double rel_l2_error(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets) {
  check(predictions.rows() == targets.rows() && predictions.cols() == targets.cols(),
        "prediction and target shapes differ");
  check(predictions.rows() > 0, "need at least one sample");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < predictions.rows(); ++i) {
    const double norm = targets.row(i).norm();
    sum += (predictions.row(i) - targets.row(i)).norm() / std::max(norm, kTinyDenominator);
  }
  return sum / static_cast<double>(predictions.rows());
}

double relative_gain(double baseline_error, double augmented_error) {
  check(baseline_error > 0.0, "baseline error must be positive");
  return (1.0 - augmented_error / baseline_error) * 100.0;
}

double trapezoid(const Eigen::VectorXd& values, double h) {
  check(values.size() >= 2, "need at least 2 nodes");
  check(h > 0.0, "grid spacing must be positive");
  return h * (values.sum() - 0.5 * (values(0) + values(values.size() - 1)));
}

double trapezoid(const Eigen::MatrixXd& values, double h) {
  check(values.rows() >= 2 && values.cols() >= 2, "need at least 2 nodes per side");
  check(h > 0.0, "grid spacing must be positive");
  // tensor-product weights: 1 inside, 1/2 on edges, 1/4 at corners
  const Eigen::Index r = values.rows() - 1;
  const Eigen::Index c = values.cols() - 1;
  const double edges = values.row(0).sum() + values.row(r).sum() + values.col(0).sum() +
                       values.col(c).sum();
  const double corners = values(0, 0) + values(0, c) + values(r, 0) + values(r, c);
  return h * h * (values.sum() - 0.5 * edges + 0.25 * corners);
}

ResidualReport residual_elliptic_1d(const Eigen::VectorXd& a, const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& f, double h) {
  const Eigen::Index n = u.size();
  check(n >= 3, "need at least 3 nodes");
  check(a.size() == n && f.size() == n, "channel sizes differ");
  check(h > 0.0, "grid spacing must be positive");
  ResidualAccumulator acc;
  for (int i = 1; i + 1 < n; ++i) {
    const double diff = flux_divergence_1d(a, u, i, h);
    acc.add(diff - f(i), diff);
  }
  return acc.report();
}

ResidualReport residual_convdiff_1d(const Eigen::VectorXd& a, const Eigen::VectorXd& v,
                                    const SpaceTimeField& phi) {
  const int n = phi.grid.n;
  const int nt = phi.time.nt;
  check(phi.values.rows() == nt && phi.values.cols() == n, "trajectory shape mismatch");
  check(a.size() == n && v.size() == n, "channel sizes differ");
  check(nt >= 3, "need at least 3 time levels");
  const double h = phi.grid.h();
  const double dt = phi.time.dt();
  ResidualAccumulator acc;
  for (int m = 1; m + 1 < nt; ++m) {
    const auto prev = phi.values.row(m - 1);
    const auto curr = phi.values.row(m);
    const auto next = phi.values.row(m + 1);
    for (int i = 1; i + 1 < n; ++i) {
      const double a_right = 0.5 * (a(i) + a(i + 1));
      const double a_left = 0.5 * (a(i - 1) + a(i));
      const double diff =
          (a_right * (curr(i + 1) - curr(i)) - a_left * (curr(i) - curr(i - 1))) / (h * h);
      const double conv = (v(i + 1) * curr(i + 1) - v(i - 1) * curr(i - 1)) / (2.0 * h);
      const double dphi_dt = (next(i) - prev(i)) / (2.0 * dt);
      acc.add(dphi_dt + conv - diff, diff);
    }
  }
  return acc.report();
}

ResidualReport residual_wave_1d(const Eigen::VectorXd& c, const Eigen::VectorXd& v,
                                const Eigen::VectorXd& e, const SpaceTimeField& rho) {
  const int n = rho.grid.n;
  const int nt = rho.time.nt;
  check(rho.values.rows() == nt && rho.values.cols() == n, "trajectory shape mismatch");
  check(c.size() == n && v.size() == n && e.size() == n, "channel sizes differ");
  check(nt >= 3, "need at least 3 time levels");
  const double h = rho.grid.h();
  const double dt = rho.time.dt();
  ResidualAccumulator acc;
  for (int m = 1; m + 1 < nt; ++m) {
    const auto prev = rho.values.row(m - 1);
    const auto curr = rho.values.row(m);
    const auto next = rho.values.row(m + 1);
    for (int i = 1; i + 1 < n; ++i) {
      const double d2 = (curr(i + 1) - 2.0 * curr(i) + curr(i - 1)) / (h * h);
      const double d1 = (curr(i + 1) - curr(i - 1)) / (2.0 * h);
      const double d2t = (next(i) - 2.0 * curr(i) + prev(i)) / (dt * dt);
      const double stiff = c(i) * d2;
      acc.add(d2t + v(i) * d1 - stiff - e(i) * curr(i), stiff);
    }
  }
  return acc.report();
}

ResidualReport residual_elliptic_2d(const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a12,
                                    const Eigen::MatrixXd& a22, const Eigen::MatrixXd& u,
                                    const Eigen::MatrixXd& f, double h) {
  const Eigen::Index n = u.rows();
  check(n >= 3 && u.cols() == n, "need a square grid with at least 3 nodes");
  check(a11.rows() == n && a12.rows() == n && a22.rows() == n && f.rows() == n &&
            a11.cols() == n && a12.cols() == n && a22.cols() == n && f.cols() == n,
        "channel shapes differ");
  check(h > 0.0, "grid spacing must be positive");
  const auto at = [&](int p, int q) { return u(p, q); };
  ResidualAccumulator acc;
  for (int i = 1; i + 1 < n; ++i) {
    for (int j = 1; j + 1 < n; ++j) {
      const double diff = flux_divergence_2d(a11, a12, a22, at, i, j, h);
      acc.add(diff - f(i, j), diff);
    }
  }
  return acc.report();
}

ResidualReport residual_convdiff_2d(const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a12,
                                    const Eigen::MatrixXd& a22, const Eigen::MatrixXd& v1,
                                    const Eigen::MatrixXd& v2, const SpaceTimeField& phi) {
  const int n = phi.grid.n;
  const int nt = phi.time.nt;
  check(phi.values.rows() == nt && phi.values.cols() == n * n, "trajectory shape mismatch");
  check(a11.rows() == n && a12.rows() == n && a22.rows() == n && v1.rows() == n &&
            v2.rows() == n,
        "channel shapes differ");
  check(nt >= 3, "need at least 3 time levels");
  const double h = phi.grid.h();
  const double dt = phi.time.dt();
  ResidualAccumulator acc;
  for (int m = 1; m + 1 < nt; ++m) {
    const auto prev = phi.values.row(m - 1);
    const auto curr = phi.values.row(m);
    const auto next = phi.values.row(m + 1);
    const auto at = [&](int p, int q) { return curr(p * n + q); };
    for (int i = 1; i + 1 < n; ++i) {
      for (int j = 1; j + 1 < n; ++j) {
        const double diff = flux_divergence_2d(a11, a12, a22, at, i, j, h);
        const double conv =
            (v1(i + 1, j) * at(i + 1, j) - v1(i - 1, j) * at(i - 1, j)) / (2.0 * h) +
            (v2(i, j + 1) * at(i, j + 1) - v2(i, j - 1) * at(i, j - 1)) / (2.0 * h);
        const double dphi_dt = (next(i * n + j) - prev(i * n + j)) / (2.0 * dt);
        acc.add(dphi_dt + conv - diff, diff);
      }
    }
  }
  return acc.report();
}

ResidualReport residual_wave_2d(const Eigen::MatrixXd& c11, const Eigen::MatrixXd& c12,
                                const Eigen::MatrixXd& c22, const Eigen::MatrixXd& v1,
                                const Eigen::MatrixXd& v2, const SpaceTimeField& rho) {
  const int n = rho.grid.n;
  const int nt = rho.time.nt;
  check(rho.values.rows() == nt && rho.values.cols() == n * n, "trajectory shape mismatch");
  check(c11.rows() == n && c12.rows() == n && c22.rows() == n && v1.rows() == n &&
            v2.rows() == n,
        "channel shapes differ");
  check(nt >= 3, "need at least 3 time levels");
  const double h = rho.grid.h();
  const double dt = rho.time.dt();
  ResidualAccumulator acc;
  for (int m = 1; m + 1 < nt; ++m) {
    const auto prev = rho.values.row(m - 1);
    const auto curr = rho.values.row(m);
    const auto next = rho.values.row(m + 1);
    const auto at = [&](int p, int q) { return curr(p * n + q); };
    for (int i = 1; i + 1 < n; ++i) {
      for (int j = 1; j + 1 < n; ++j) {
        const double dxx = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (h * h);
        const double dyy = (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (h * h);
        const double dxy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) +
                            at(i - 1, j - 1)) /
                           (4.0 * h * h);
        const double dx = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
        const double dy = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
        const double stiff =
            c11(i, j) * dxx + 2.0 * c12(i, j) * dxy + c22(i, j) * dyy;
        const double d2t =
            (next(i * n + j) - 2.0 * curr(i * n + j) + prev(i * n + j)) / (dt * dt);
        acc.add(d2t + v1(i, j) * dx + v2(i, j) * dy - stiff, stiff);
      }
    }
  }
  return acc.report();
}

}  // namespace covaug
