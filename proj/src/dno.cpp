#include "twolayer/dno.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "twolayer/errors.hpp"

namespace twolayer {

namespace {

struct Gll {
  int N;
  std::vector<double> xi, w;
  Eigen::MatrixXd D;  // D(q, r) = derivative of basis r at node q
};

double legendre(int N, double x, double* dP = nullptr) {
  double p0 = 1, p1 = x;
  if (N == 0) {
    if (dP) *dP = 0;
    return 1;
  }
  for (int k = 2; k <= N; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  if (dP) *dP = (std::abs(x) < 1) ? N * (x * p1 - p0) / (x * x - 1) : 0.5 * x * N * (N + 1);
  return p1;
}

Gll make_gll(int N) {
  Gll g{N, std::vector<double>(N + 1), std::vector<double>(N + 1), Eigen::MatrixXd(N + 1, N + 1)};
  for (int i = 0; i <= N; ++i) {
    double x = -std::cos(M_PI * i / N);
    if (i > 0 && i < N) {
      // Newton on P'_N using (1-x^2) P''_N = 2x P'_N - N(N+1) P_N.
      for (int it = 0; it < 100; ++it) {
        double dp, p = legendre(N, x, &dp);
        double d2p = (2 * x * dp - N * (N + 1) * p) / (1 - x * x);
        double dxn = dp / d2p;
        x -= dxn;
        if (std::abs(dxn) < 1e-16) break;
      }
    }
    g.xi[i] = x;
  }
  std::vector<double> P(N + 1);
  for (int i = 0; i <= N; ++i) {
    P[i] = legendre(N, g.xi[i]);
    g.w[i] = 2.0 / (N * (N + 1) * P[i] * P[i]);
  }
  for (int q = 0; q <= N; ++q)
    for (int r = 0; r <= N; ++r)
      g.D(q, r) = (q == r) ? 0.0 : P[q] / (P[r] * (g.xi[q] - g.xi[r]));
  g.D(0, 0) = -0.25 * N * (N + 1);
  g.D(N, N) = 0.25 * N * (N + 1);
  return g;
}

// Element edges on [a, b] with geometric grading: the element touching each refined
// end has size about h0.
std::vector<double> graded_edges(double a, double b, int E, double h0, bool refine_a, bool refine_b) {
  std::vector<double> sizes;
  auto geometric = [&](double len, int m) {
    std::vector<double> s(m, len / m);
    if (len / m <= h0) return s;
    double lo = 1.0, hi = 10.0;
    auto total = [&](double r) { return h0 * (std::pow(r, m) - 1) / (r - 1); };
    while (total(hi) < len) hi *= 2;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (total(mid) < len ? lo : hi) = mid;
    }
    double r = 0.5 * (lo + hi), acc = 0;
    for (int i = 0; i < m; ++i) acc += (s[i] = h0 * std::pow(r, i));
    for (double& v : s) v *= len / acc;
    return s;
  };
  if (refine_a && refine_b) {
    int m = E / 2;
    auto s1 = geometric(0.5 * (b - a), m);
    auto s2 = geometric(0.5 * (b - a), E - m);
    sizes.assign(s1.begin(), s1.end());
    sizes.insert(sizes.end(), s2.rbegin(), s2.rend());
  } else {
    sizes = geometric(b - a, E);
    if (refine_b) std::reverse(sizes.begin(), sizes.end());
  }
  std::vector<double> edges{a};
  for (double s : sizes) edges.push_back(edges.back() + s);
  edges.back() = b;
  return edges;
}

// One layer in mapped coordinates (x, y') with symmetric coefficient fields per node.
class Layer {
 public:
  Layer(const PeriodicGrid& g, const std::vector<double>& edges, int N)
      : nx_(g.n), E_(static_cast<int>(edges.size()) - 1), N_(N), rows_(E_ * N + 1), dx_(g.dx()), ops_(g),
        fft_(g.n), gll_(make_gll(N)), edges_(edges) {
    y_.resize(rows_);
    for (int e = 0; e < E_; ++e)
      for (int q = 0; q <= N_; ++q)
        y_[e * N_ + q] = edges_[e] + 0.5 * (gll_.xi[q] + 1) * (edges_[e + 1] - edges_[e]);
    c11_.assign(rows_ * nx_, 1.0);
    c12_.assign(rows_ * nx_, 0.0);
    c22_.assign(rows_ * nx_, 1.0);
    build_preconditioner(g);
  }

  int rows() const { return rows_; }
  int nx() const { return nx_; }
  double y(int r) const { return y_[r]; }
  void set_coefficients(int row, int ix, double a11, double a12, double a22) {
    c11_[row * nx_ + ix] = a11;
    c12_[row * nx_ + ix] = a12;
    c22_[row * nx_ + ix] = a22;
  }

  // Solves the weak Neumann problem with the given boundary fluxes; returns the
  // iteration count and relative residual in `iters` and `res`.
  std::vector<double> solve(const Field& flux_bottom, const Field& flux_top, double tol, int max_iter, int& iters,
                            double& res) const {
    const int M = rows_ * nx_;
    std::vector<double> b(M, 0.0);
    for (int i = 0; i < nx_; ++i) {
      b[i] = dx_ * flux_bottom[i];
      b[(rows_ - 1) * nx_ + i] = dx_ * flux_top[i];
    }
    project(b);
    std::vector<double> x(M, 0.0), r = b, z = precondition(r), p = z, Ap(M);
    double rz = dotv(r, z), bn = std::sqrt(dotv(b, b));
    iters = 0;
    res = 0;
    if (bn == 0) return x;
    for (iters = 1; iters <= max_iter; ++iters) {
      apply(p, Ap);
      double alpha = rz / dotv(p, Ap);
      for (int i = 0; i < M; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
      }
      res = std::sqrt(dotv(r, r)) / bn;
      if (res < tol) break;
      z = precondition(r);
      double rz2 = dotv(r, z);
      double beta = rz2 / rz;
      rz = rz2;
      for (int i = 0; i < M; ++i) p[i] = z[i] + beta * p[i];
    }
    if (res >= tol) {
      // Report the residual of the final iterate recomputed from scratch.
      apply(x, Ap);
      double s = 0;
      for (int i = 0; i < M; ++i) s += (b[i] - Ap[i]) * (b[i] - Ap[i]);
      res = std::sqrt(s) / bn;
      if (res > 1e3 * tol) throw NumericalError("layer solve did not converge (relative residual " + std::to_string(res) + ")");
    }
    project(x);
    return x;
  }

 private:
  static double dotv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  // Removes the two null directions: constants, and the grid-scale alternation in x
  // that spectral differentiation does not see.
  void project(std::vector<double>& v) const {
    double s0 = 0, s1 = 0;
    for (int r = 0; r < rows_; ++r)
      for (int i = 0; i < nx_; ++i) {
        s0 += v[r * nx_ + i];
        s1 += (i % 2 ? -1.0 : 1.0) * v[r * nx_ + i];
      }
    s0 /= rows_ * nx_;
    s1 /= rows_ * nx_;
    for (int r = 0; r < rows_; ++r)
      for (int i = 0; i < nx_; ++i) v[r * nx_ + i] -= s0 + (i % 2 ? -1.0 : 1.0) * s1;
  }

  Field row_dx(const double* row) const { return ops_.dx(Field(row, row + nx_), 1); }

  void apply(const std::vector<double>& u, std::vector<double>& out) const {
    const int M = rows_ * nx_;
    std::vector<double> ux(M), gx(M, 0.0);
    out.assign(M, 0.0);
    for (int r = 0; r < rows_; ++r) {
      Field d = row_dx(&u[r * nx_]);
      std::copy(d.begin(), d.end(), ux.begin() + r * nx_);
    }
    std::vector<double> uy(nx_), g2(nx_);
    for (int e = 0; e < E_; ++e) {
      const double J = 0.5 * (edges_[e + 1] - edges_[e]);
      for (int q = 0; q <= N_; ++q) {
        const int gq = e * N_ + q;
        std::fill(uy.begin(), uy.end(), 0.0);
        for (int r = 0; r <= N_; ++r) {
          const double d = gll_.D(q, r) / J;
          if (d == 0) continue;
          const double* ur = &u[(e * N_ + r) * nx_];
          for (int i = 0; i < nx_; ++i) uy[i] += d * ur[i];
        }
        const double wq = gll_.w[q];
        for (int i = 0; i < nx_; ++i) {
          const int k = gq * nx_ + i;
          gx[k] += wq * J * (c11_[k] * ux[k] + c12_[k] * uy[i]);
          g2[i] = wq * (c12_[k] * ux[k] + c22_[k] * uy[i]);
        }
        for (int r = 0; r <= N_; ++r) {
          const double d = gll_.D(q, r);
          if (d == 0) continue;
          double* o = &out[(e * N_ + r) * nx_];
          for (int i = 0; i < nx_; ++i) o[i] += d * g2[i];
        }
      }
    }
    for (int r = 0; r < rows_; ++r) {
      Field d = row_dx(&gx[r * nx_]);
      double* o = &out[r * nx_];
      for (int i = 0; i < nx_; ++i) o[i] = dx_ * (o[i] - d[i]);
    }
  }

  // The flat operator is k^2 Mass + Stiff for each Fourier mode.  With
  // Stiff V = Mass V diag(lambda) and V^T Mass V = I its inverse is
  // V diag(1/(k^2 + lambda)) V^T, pseudo-inverted on the null direction.
  void build_preconditioner(const PeriodicGrid& g) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(rows_, rows_);
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(rows_);
    for (int e = 0; e < E_; ++e) {
      const double J = 0.5 * (edges_[e + 1] - edges_[e]);
      for (int q = 0; q <= N_; ++q) {
        mass(e * N_ + q) += gll_.w[q] * J;
        for (int r = 0; r <= N_; ++r)
          for (int s = 0; s <= N_; ++s)
            S(e * N_ + r, e * N_ + s) += gll_.w[q] / J * gll_.D(q, r) * gll_.D(q, s);
      }
    }
    Eigen::VectorXd mh = mass.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd Sh = mh.asDiagonal() * S * mh.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sh);
    V_ = mh.asDiagonal() * es.eigenvectors();
    lambda_ = es.eigenvalues();
    const int modes = nx_ / 2 + 1;
    inv_.resize(rows_, modes);
    const double lmax = lambda_.maxCoeff();
    for (int j = 0; j < modes; ++j) {
      double k = g.wavenumber(j);
      bool flat = (j == 0 || j == nx_ / 2);
      for (int i = 0; i < rows_; ++i) {
        double d = (flat ? 0.0 : k * k) + lambda_(i);
        inv_(i, j) = (d <= 1e-12 * lmax) ? 0.0 : 1.0 / (dx_ * d);
      }
    }
  }

  std::vector<double> precondition(const std::vector<double>& r) const {
    const int modes = nx_ / 2 + 1;
    Eigen::MatrixXd Re(rows_, modes), Im(rows_, modes);
    for (int row = 0; row < rows_; ++row) {
      Spectrum s = fft_.forward(Field(r.begin() + row * nx_, r.begin() + (row + 1) * nx_));
      for (int j = 0; j < modes; ++j) {
        Re(row, j) = s[j].real();
        Im(row, j) = s[j].imag();
      }
    }
    Eigen::MatrixXd a = (V_.transpose() * Re).cwiseProduct(inv_), b = (V_.transpose() * Im).cwiseProduct(inv_);
    Re = V_ * a;
    Im = V_ * b;
    std::vector<double> z(rows_ * nx_);
    Spectrum s(modes);
    for (int row = 0; row < rows_; ++row) {
      for (int j = 0; j < modes; ++j) s[j] = cplx(Re(row, j), Im(row, j));
      Field f = fft_.inverse(s);
      std::copy(f.begin(), f.end(), z.begin() + row * nx_);
    }
    return z;
  }

  int nx_, E_, N_, rows_;
  double dx_;
  SpectralOps ops_;
  Fft fft_;
  Gll gll_;
  std::vector<double> edges_, y_;
  std::vector<double> c11_, c12_, c22_;
  Eigen::MatrixXd V_, inv_;
  Eigen::VectorXd lambda_;
};

double first_element(const PeriodicGrid& g) { return 2.0 / g.wavenumber(g.n / 2 - 1); }

void check_options(const DnoOptions& o) {
  if (o.elements < 2 || o.order < 2) throw ConfigError("DNO needs at least two elements of order two");
  if (!(o.tol > 0) || o.max_iter < 1) throw ConfigError("DNO tolerance and iteration cap must be positive");
}

}  // namespace

Field ntd_lower(const Field& eta_under, const Field& flux_top, const PeriodicGrid& g, const DnoOptions& o,
                DnoStats* stats) {
  check_options(o);
  const double depth = o.lower_depth > 0 ? o.lower_depth : 4.0 * g.period;
  Layer L(g, graded_edges(-depth, 0.0, o.elements, first_element(g), false, true), o.order);
  SpectralOps ops(g);
  Field ex = ops.dx(eta_under, 1);
  for (int r = 0; r < L.rows(); ++r)
    for (int i = 0; i < g.n; ++i) L.set_coefficients(r, i, 1.0, -ex[i], 1.0 + ex[i] * ex[i]);
  int it;
  double res;
  auto u = L.solve(Field(g.n, 0.0), flux_top, o.tol, o.max_iter, it, res);
  if (stats) {
    stats->iter_lower = it;
    stats->res_lower = res;
  }
  Field trace(u.end() - g.n, u.end());
  double m = 0;
  for (double v : trace) m += v;
  for (double& v : trace) v -= m / g.n;
  return trace;
}

void ntd_upper(const ProfilePair& eta, const Field& flux_bottom, const Field& flux_top, Field& trace_bottom,
               Field& trace_top, const DnoOptions& o, DnoStats* stats) {
  check_options(o);
  const PeriodicGrid& g = eta.grid;
  double thin = 1e300;
  for (int i = 0; i < g.n; ++i) thin = std::min(thin, 1.0 + eta.over[i] - eta.under[i]);
  if (thin <= o.min_thickness)
    throw RegimeError("upper layer thickness " + std::to_string(thin) + " is below the pinch-off guard");
  Layer L(g, graded_edges(0.0, 1.0, o.elements, first_element(g), true, true), o.order);
  SpectralOps ops(g);
  Field ux = ops.dx(eta.under, 1), ox = ops.dx(eta.over, 1);
  for (int r = 0; r < L.rows(); ++r) {
    const double s = L.y(r);
    for (int i = 0; i < g.n; ++i) {
      double J = 1.0 + eta.over[i] - eta.under[i];
      double fx = ux[i] + (ox[i] - ux[i]) * s;
      L.set_coefficients(r, i, J, -fx, (1.0 + fx * fx) / J);
    }
  }
  int it;
  double res;
  auto u = L.solve(flux_bottom, flux_top, o.tol, o.max_iter, it, res);
  if (stats) {
    stats->iter_upper = it;
    stats->res_upper = res;
  }
  trace_bottom.assign(u.begin(), u.begin() + g.n);
  trace_top.assign(u.end() - g.n, u.end());
}

LExact eval_L_exact(const ProfilePair& eta, const Params& p, const DnoOptions& o) {
  const PeriodicGrid& g = eta.grid;
  SpectralOps ops(g);
  Field zu = ops.dx(eta.under, 1), zo = ops.dx(eta.over, 1), mzu(g.n);
  for (int i = 0; i < g.n; ++i) mzu[i] = -zu[i];
  LExact r;
  Field tl = ntd_lower(eta.under, zu, g, o, &r.stats);
  Field tb, tt;
  ntd_upper(eta, mzu, zo, tb, tt, o, &r.stats);
  r.under = 0.5 * ops.inner(zu, tl);
  r.over = 0.5 * (ops.inner(mzu, tb) + ops.inner(zo, tt));
  r.total = r.under + p.rho * r.over;
  return r;
}

}  // namespace twolayer
