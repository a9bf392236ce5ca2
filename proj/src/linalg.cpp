#include "mmot/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "mmot/error.hpp"

namespace mmot {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw InvalidArgument("matrix: data size does not match shape");
  for (double x : data_)
    if (!std::isfinite(x)) throw InvalidArgument("matrix: non-finite entry");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw InvalidArgument("matrix: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return DenseMatrix(r, c, std::move(data));
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double DenseMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  return worst;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("matrix product: shape mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

void canonical_sort(ComplexSpectrum& values) {
  for (auto& z : values)
    if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z))) z.imag(0.0);
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
  auto argument = [](const std::complex<double>& z) {
    if (z == 0.0) return 0.0;
    double t = std::atan2(z.imag(), z.real());
    if (t < 0.0) t += 2.0 * std::numbers::pi;
    return t;
  };
  std::size_t start = 0;
  while (start < values.size()) {
    const double lead = std::abs(values[start]);
    std::size_t end = start + 1;
    while (end < values.size() &&
           lead - std::abs(values[end]) <= 1e-8 * std::max(lead, 1e-300))
      ++end;
    std::stable_sort(values.begin() + std::ptrdiff_t(start), values.begin() + std::ptrdiff_t(end),
                     [&](const auto& a, const auto& b) { return argument(a) < argument(b); });
    start = end;
  }
}

namespace {

using Rows = std::vector<std::vector<double>>;

void balance(Rows& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.size();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(a[j][i]);
          r += std::abs(a[i][j]);
        }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a[i][j] *= g;
        for (std::size_t j = 0; j < n; ++j) a[j][i] *= f;
      }
    }
  }
}

// Similarity reduction to upper Hessenberg form by stabilized elementary
// transformations.
void hessenberg(Rows& a) {
  const std::size_t n = a.size();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t i = m;
    for (std::size_t j = m; j < n; ++j)
      if (std::abs(a[j][m - 1]) > std::abs(x)) {
        x = a[j][m - 1];
        i = j;
      }
    if (i != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a[i][j], a[m][j]);
      for (std::size_t j = 0; j < n; ++j) std::swap(a[j][i], a[j][m]);
    }
    if (x == 0.0) continue;
    for (i = m + 1; i < n; ++i) {
      double y = a[i][m - 1];
      if (y == 0.0) continue;
      y /= x;
      a[i][m - 1] = y;
      for (std::size_t j = m; j < n; ++j) a[i][j] -= y * a[m][j];
      for (std::size_t j = 0; j < n; ++j) a[j][m] += y * a[j][i];
    }
  }
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j) a[i][j] = 0.0;
}

double sign(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (indices signed
// because the deflation loop walks below zero).
ComplexSpectrum hessenberg_qr(Rows& a) {
  const int n = static_cast<int>(a.size());
  const double eps = std::numeric_limits<double>::epsilon();
  ComplexSpectrum w(static_cast<std::size_t>(n));
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a[i][j]);

  const long budget = 100L * n;
  long sweeps = 0;
  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        double s = std::abs(a[l - 1][l - 1]) + std::abs(a[l][l]);
        if (s == 0.0) s = anorm;
        if (std::abs(a[l][l - 1]) <= eps * s) {
          a[l][l - 1] = 0.0;
          break;
        }
      }
      double x = a[nn][nn];
      if (l == nn) {
        w[nn--] = x + t;
        continue;
      }
      double y = a[nn - 1][nn - 1];
      double ww = a[nn][nn - 1] * a[nn - 1][nn];
      if (l == nn - 1) {
        const double p = 0.5 * (y - x);
        const double q = p * p + ww;
        double z = std::sqrt(std::abs(q));
        x += t;
        if (q >= 0.0) {
          z = p + sign(z, p);
          w[nn - 1] = w[nn] = x + z;
          if (z != 0.0) w[nn] = x - ww / z;
        } else {
          w[nn] = {x + p, -z};
          w[nn - 1] = std::conj(w[nn]);
        }
        nn -= 2;
        continue;
      }
      if (++sweeps > budget) {
        std::ostringstream msg;
        msg << "eig_general: QR iteration did not converge within " << budget << " sweeps";
        throw NoConvergence(msg.str());
      }
      if (its > 0 && its % 10 == 0) {
        // Exceptional shift.
        t += x;
        for (int i = 0; i <= nn; ++i) a[i][i] -= x;
        const double s = std::abs(a[nn][nn - 1]) + std::abs(a[nn - 1][nn - 2]);
        y = x = 0.75 * s;
        ww = -0.4375 * s * s;
      }
      ++its;
      int m = nn - 2;
      double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
      for (; m >= l; --m) {
        z = a[m][m];
        r = x - z;
        double s = y - z;
        p = (r * s - ww) / a[m + 1][m] + a[m][m + 1];
        q = a[m + 1][m + 1] - z - r - s;
        r = a[m + 2][m + 1];
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        const double u = std::abs(a[m][m - 1]) * (std::abs(q) + std::abs(r));
        const double v =
            std::abs(p) * (std::abs(a[m - 1][m - 1]) + std::abs(z) + std::abs(a[m + 1][m + 1]));
        if (u <= eps * v) break;
      }
      for (int i = m; i < nn - 1; ++i) {
        a[i + 2][i] = 0.0;
        if (i != m) a[i + 2][i - 1] = 0.0;
      }
      for (int k = m; k < nn; ++k) {
        if (k != m) {
          p = a[k][k - 1];
          q = a[k + 1][k - 1];
          r = 0.0;
          if (k + 1 != nn) r = a[k + 2][k - 1];
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x != 0.0) {
            p /= x;
            q /= x;
            r /= x;
          }
        }
        const double s = sign(std::sqrt(p * p + q * q + r * r), p);
        if (s == 0.0) continue;
        if (k == m) {
          if (l != m) a[k][k - 1] = -a[k][k - 1];
        } else {
          a[k][k - 1] = -s * x;
        }
        p += s;
        x = p / s;
        y = q / s;
        z = r / s;
        q /= p;
        r /= p;
        for (int j = k; j <= nn; ++j) {
          p = a[k][j] + q * a[k + 1][j];
          if (k + 1 != nn) {
            p += r * a[k + 2][j];
            a[k + 2][j] -= p * z;
          }
          a[k + 1][j] -= p * y;
          a[k][j] -= p * x;
        }
        const int mmin = std::min(nn, k + 3);
        for (int i = l; i <= mmin; ++i) {
          p = x * a[i][k] + y * a[i][k + 1];
          if (k + 1 != nn) {
            p += z * a[i][k + 2];
            a[i][k + 2] -= p * r;
          }
          a[i][k + 1] -= p * q;
          a[i][k] -= p;
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

ComplexSpectrum eig_general(const DenseMatrix& m) {
  if (!m.square()) throw InvalidArgument("eig_general: matrix is not square");
  const std::size_t n = m.rows();
  if (n > 2000) throw InvalidArgument("eig_general: dimension above 2000");
  if (n == 0) return {};
  Rows a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
  balance(a);
  hessenberg(a);
  ComplexSpectrum w = hessenberg_qr(a);
  canonical_sort(w);
  return w;
}

SymmetricEigen eig_symmetric(const DenseMatrix& m, std::size_t k, Which which) {
  if (!m.square()) throw InvalidArgument("eig_symmetric: matrix is not square");
  const std::size_t n = m.rows();
  if (k == 0 || k > n) throw InvalidArgument("eig_symmetric: requested count out of range");
  double scale = 0.0;
  for (double x : m.data()) scale = std::max(scale, std::abs(x));
  if (m.max_asymmetry() > 1e-9 * std::max(1.0, scale))
    throw InvalidArgument("eig_symmetric: matrix is not symmetric");

  DenseMatrix a = m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (m(i, j) + m(j, i));
  DenseMatrix v = DenseMatrix::identity(n);

  const double fro = std::max(a.frobenius_norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= 1e-15 * fro) break;
    if (sweep == 99) throw NoConvergence("eig_symmetric: Jacobi sweeps did not converge");
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = sign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return which == Which::Smallest ? a(x, x) < a(y, y) : a(x, x) > a(y, y);
  });
  SymmetricEigen out;
  out.vectors = DenseMatrix(n, k);
  for (std::size_t c = 0; c < k; ++c) {
    out.values.push_back(a(order[c], order[c]));
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

}  // namespace mmot
