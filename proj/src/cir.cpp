#include "isac/cir.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isac/fft.hpp"

namespace isac {

std::size_t RangeProfile::peak_index() const {
  return static_cast<std::size_t>(
      std::distance(magnitude.begin(), std::max_element(magnitude.begin(), magnitude.end())));
}

CTensor3 estimate_channel(const CTensor3& y, const ResourceGrid& x) {
  if (y.dim(0) != static_cast<std::size_t>(x.n_subcarriers()) ||
      y.dim(1) != static_cast<std::size_t>(x.n_symbols())) {
    std::ostringstream os;
    os << "estimate_channel: received " << shape_string(y.shape()) << " vs payload ("
       << x.n_subcarriers() << " x " << x.n_symbols() << ")";
    throw ShapeError(os.str());
  }
  CTensor3 h = y;
  for (std::size_t m = 0; m < y.dim(0); ++m)
    for (std::size_t q = 0; q < y.dim(1); ++q) {
      const cplx xv = x.at(static_cast<int>(m), static_cast<int>(q));
      if (std::abs(xv) < 0.5)
        throw ValidationError("estimate_channel: payload cell (" + std::to_string(m) + ", " +
                              std::to_string(q) + ") has modulus below 0.5");
      const cplx inv = 1.0 / xv;
      for (std::size_t p = 0; p < y.dim(2); ++p) h(m, q, p) *= inv;
    }
  return h;
}

CirMatrix to_cir(const CTensor3& h_hat, const OfdmNumerology& num, int oversampling,
                 RangeWindow window) {
  validate(num);
  if (h_hat.dim(0) != static_cast<std::size_t>(num.n_valid_subcarriers))
    throw ShapeError("to_cir: channel has " + std::to_string(h_hat.dim(0)) +
                     " subcarrier rows, expected " +
                     std::to_string(num.n_valid_subcarriers));
  if (oversampling < 1) throw ValidationError("to_cir: oversampling must be at least 1");
  const auto bins = centered_bins(num);
  const std::size_t nv = h_hat.dim(0), nq = h_hat.dim(1), np = h_hat.dim(2);
  const std::size_t len = static_cast<std::size_t>(num.fft_size) * oversampling;

  std::vector<double> w(nv, 1.0);
  if (window == RangeWindow::kHann)
    for (std::size_t m = 0; m < nv; ++m)
      w[m] = 0.5 - 0.5 * std::cos(kTwoPi * (m + 0.5) / nv);

  CirMatrix cir{CTensor3({len, nq, np}), num, oversampling, 1};
  CVec col(len);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t p = 0; p < np; ++p) {
      std::fill(col.begin(), col.end(), cplx{});
      for (std::size_t m = 0; m < nv; ++m) {
        const long bin = (bins[m] + static_cast<long>(len)) % static_cast<long>(len);
        col[bin] = h_hat(m, q, p) * w[m];
      }
      fft::inverse(col);
      for (std::size_t l = 0; l < len; ++l) cir.taps(l, q, p) = col[l];
    }
  return cir;
}

CTensor3 to_frequency(const CirMatrix& cir) {
  const auto bins = centered_bins(cir.num);
  const std::size_t len = cir.n_taps(), nq = cir.n_symbols(), np = cir.n_elements();
  CTensor3 h({bins.size(), nq, np});
  CVec col(len);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t p = 0; p < np; ++p) {
      for (std::size_t l = 0; l < len; ++l) col[l] = cir.taps(l, q, p);
      fft::forward(col);
      for (std::size_t m = 0; m < bins.size(); ++m) {
        const long bin = (bins[m] + static_cast<long>(len)) % static_cast<long>(len);
        h(m, q, p) = col[bin];
      }
    }
  return h;
}

CirMatrix remove_static(CirMatrix cir) {
  const std::size_t nl = cir.n_taps(), nq = cir.n_symbols(), np = cir.n_elements();
  if (nq < 2) throw ValidationError("remove_static: needs at least 2 symbols");
  for (std::size_t l = 0; l < nl; ++l)
    for (std::size_t p = 0; p < np; ++p) {
      cplx mean{};
      for (std::size_t q = 0; q < nq; ++q) mean += cir.taps(l, q, p);
      mean /= static_cast<double>(nq);
      for (std::size_t q = 0; q < nq; ++q) cir.taps(l, q, p) -= mean;
    }
  return cir;
}

CirMatrix coherent_combine(const CirMatrix& cir, int n) {
  const std::size_t nq = cir.n_symbols();
  if (n < 1 || nq % static_cast<std::size_t>(n) != 0)
    throw ValidationError("coherent_combine: factor " + std::to_string(n) +
                          " does not divide " + std::to_string(nq) + " symbols");
  const std::size_t nl = cir.n_taps(), np = cir.n_elements();
  const std::size_t out_q = nq / n;
  CirMatrix out{CTensor3({nl, out_q, np}), cir.num, cir.range_oversampling,
                cir.combined_symbols * n};
  const double scale = 1.0 / n;
  for (std::size_t l = 0; l < nl; ++l)
    for (std::size_t q = 0; q < out_q; ++q)
      for (std::size_t p = 0; p < np; ++p) {
        cplx acc{};
        for (int i = 0; i < n; ++i) acc += cir.taps(l, q * n + i, p);
        out.taps(l, q, p) = acc * scale;
      }
  return out;
}

RangeProfile range_profile(const CirMatrix& cir, int element) {
  const std::size_t nl = cir.n_taps(), nq = cir.n_symbols(), np = cir.n_elements();
  RangeProfile prof{std::vector<double>(nl), cir.tap_distance_m(1.0)};
  for (std::size_t l = 0; l < nl; ++l) {
    cplx acc{};
    for (std::size_t q = 0; q < nq; ++q) {
      if (element >= 0) {
        acc += cir.taps(l, q, static_cast<std::size_t>(element));
      } else {
        for (std::size_t p = 0; p < np; ++p) acc += cir.taps(l, q, p);
      }
    }
    prof.magnitude[l] = std::abs(acc) / static_cast<double>(nq);
  }
  return prof;
}

double quadratic_peak(std::span<const double> v, std::size_t i) {
  if (i == 0 || i + 1 >= v.size()) return static_cast<double>(i);
  const double a = v[i - 1], b = v[i], c = v[i + 1];
  const double denom = a - 2.0 * b + c;
  if (denom >= 0.0) return static_cast<double>(i);
  const double delta = 0.5 * (a - c) / denom;
  return static_cast<double>(i) + std::clamp(delta, -0.5, 0.5);
}

}  // namespace isac
